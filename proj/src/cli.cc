// Copyright 2026 The EDRM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "edrm/cli.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "edrm/analysis.h"
#include "edrm/checkpoint.h"
#include "edrm/dataset.h"
#include "edrm/grad_check.h"
#include "edrm/io.h"
#include "edrm/synthetic.h"
#include "edrm/trainer.h"
#include "json.hpp"

namespace edrm {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void RunManifest::AddInput(const std::string &path) {
  inputs[path] = Sha256File(path);
}

std::string RunManifest::ToJson() const {
  ordered_json j;
  j["version"] = version;
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = config;
  j["inputs"] = ordered_json::object();
  for (const auto &[path, digest] : inputs) j["inputs"][path] = digest;
  j["outputs"] = outputs;
  j["output_digests"] = ordered_json::object();
  for (const auto &[path, digest] : output_digests) {
    j["output_digests"][path] = digest;
  }
  return j.dump(2) + "\n";
}

RunManifest RunManifest::FromJson(const std::string &text) {
  RunManifest m;
  try {
    ordered_json j = ordered_json::parse(text);
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.seed = j.at("seed").get<uint64_t>();
    m.config = j.at("config").get<std::string>();
    for (const auto &[k, v] : j.at("inputs").items()) m.inputs[k] = v;
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    for (const auto &[k, v] : j.at("output_digests").items()) {
      m.output_digests[k] = v;
    }
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

void WriteManifest(const std::string &path, const RunManifest &manifest) {
  WriteFileAtomic(path, manifest.ToJson());
}

void FinishManifest(const std::string &path, RunManifest &manifest) {
  fs::path base = fs::path(path).parent_path();
  manifest.output_digests.clear();
  for (const std::string &out : manifest.outputs) {
    fs::path p(out);
    if (p.is_relative()) p = base / p;
    manifest.output_digests[out] = Sha256File(p.string());
  }
  WriteManifest(path, manifest);
}

namespace {

// Output path as recorded in a manifest living in dir.
std::string Relative(const std::string &path, const std::string &dir) {
  fs::path rel = fs::path(path).lexically_relative(dir);
  if (rel.empty() || *rel.begin() == "..") return path;
  return rel.string();
}

std::string Join(const std::string &dir, const std::string &file) {
  return (fs::path(dir) / file).string();
}

// The manifest for a single output file sits next to it.
std::string SideManifest(const std::string &out) {
  return out + ".manifest.json";
}

// Writes contents to out, or stdout when out is empty.
void Emit(const std::string &out, const std::string &contents,
          RunManifest manifest) {
  if (out.empty()) {
    std::cout << contents;
    return;
  }
  fs::path parent = fs::path(out).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::string mpath = SideManifest(out);
  manifest.outputs = {Relative(out, parent.string())};
  WriteManifest(mpath, manifest);
  WriteFileAtomic(out, contents);
  FinishManifest(mpath, manifest);
}

std::string CommandLine(int argc, const char *const *argv) {
  std::string line;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) line += ' ';
    line += argv[i];
  }
  return line;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  uint64_t seed = 0;
  std::string out = "data";
  std::string mix;
  SyntheticSpec spec;
};

void RunGenerate(const GenerateArgs &args, const std::string &command) {
  SyntheticSpec spec = args.spec;
  if (!args.mix.empty()) ParseMix(args.mix, &spec);
  spec.Validate();
  fs::create_directories(args.out);

  RunManifest manifest;
  manifest.command = command;
  manifest.seed = args.seed;
  manifest.config = spec.ToString();
  for (const char *file : kDatasetFiles) manifest.outputs.push_back(file);
  std::string mpath = Join(args.out, "manifest.json");
  WriteManifest(mpath, manifest);

  Dataset d = GenerateSynthetic(args.seed, spec);
  SaveDataset(d, args.out);
  FinishManifest(mpath, manifest);
  std::cout << "generated " << d.corpus.queries.size() << " queries, "
            << d.corpus.docs.size() << " docs, " << d.kg.num_entities()
            << " entities into " << args.out << "\n";
}

// ---------------------------------------------------------------- annotate

struct AnnotateArgs {
  std::string kg;
  std::string input;
  std::string output;
  size_t max_mention_len = kMaxMentionLength;
  bool relink = false;
};

void RunAnnotate(const AnnotateArgs &args, const std::string &command) {
  std::map<std::string, std::string> meta;
  if (fs::exists(Join(args.kg, "meta.txt"))) {
    meta = ParseMeta(Join(args.kg, "meta.txt"));
  }
  Dataset probe;
  probe.meta = meta;
  KgLimits limits{probe.word_vocab(), probe.type_vocab()};
  KnowledgeGraph kg = LoadKnowledgeGraph(Join(args.kg, "entities.tsv"),
                                         Join(args.kg, "surface_forms.tsv"),
                                         limits);
  std::map<uint32_t, DuetText> texts = LoadTexts(args.input);
  size_t linked = 0;
  for (auto &[id, text] : texts) {
    if (args.relink || text.entities.empty()) {
      text.entities = Annotate(text.words, kg, args.max_mention_len);
    }
    linked += text.entities.size();
  }

  RunManifest manifest;
  manifest.command = command;
  manifest.config = "max_mention_len=" + std::to_string(args.max_mention_len) +
                    (args.relink ? ",relink" : "");
  manifest.AddInput(Join(args.kg, "entities.tsv"));
  manifest.AddInput(Join(args.kg, "surface_forms.tsv"));
  manifest.AddInput(args.input);
  Emit(args.output, SerializeTexts(texts, true), manifest);
  std::cerr << "annotated " << texts.size() << " texts, " << linked
            << " mentions\n";
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::string ablation;
  std::optional<uint64_t> seed;
  size_t threads = 1;
  bool record_time = false;
  bool gradcheck = false;
  double gradcheck_step = 1e-4;
  double gradcheck_tolerance = 1e-4;
  bool quiet = false;
};

ModelConfig BuildConfig(const TrainArgs &args, const Dataset &d) {
  ModelConfig config;
  if (!args.config.empty()) config.Apply(ReadFile(args.config));
  for (const std::string &kv : args.sets) config.Apply(kv);
  if (args.seed) config.seed = *args.seed;
  if (config.encoder.word_vocab == 0) config.encoder.word_vocab = d.word_vocab();
  if (config.encoder.entity_vocab == 0) {
    config.encoder.entity_vocab = d.entity_vocab();
  }
  if (config.encoder.type_vocab == 0) config.encoder.type_vocab = d.type_vocab();
  config.Validate();
  return config;
}

void RunGradCheck(EdrmModel &model, const Dataset &d,
                  const std::vector<LabeledPair> &labels,
                  const std::vector<QueryId> &queries, const TrainArgs &args) {
  std::vector<PairwiseInstance> pairs =
      MakePairs(LabelsFor(labels, queries), d.corpus, 0);
  if (pairs.size() > 4) pairs.resize(4);
  if (pairs.empty()) throw ValidationError("gradcheck: no training pairs");
  GradCheckOptions options;
  options.step = args.gradcheck_step;
  options.tolerance = args.gradcheck_tolerance;
  options.max_per_tensor = 128;
  options.seed = model.config().seed;
  GradCheckReport report = GradCheck(
      [&](const ParamStore &store, GradBuffer *grads) {
        return model.PairwiseLoss(store, pairs, grads);
      },
      model.params(), options);
  std::cerr << report.Summary();
  if (!report.pass) throw Error("gradcheck failed; training aborted");
}

void RunTrain(const TrainArgs &args, const std::string &command) {
  Dataset d = LoadDataset(args.data);
  ModelConfig base = BuildConfig(args, d);

  std::vector<std::pair<std::string, ModelConfig>> jobs;
  if (args.ablation.empty()) {
    jobs.emplace_back("", base);
  } else if (args.ablation == "all") {
    for (const auto &[name, switches] : AblationVariants()) {
      ModelConfig c = base;
      c.switches = switches;
      jobs.emplace_back(name, c);
    }
  } else {
    for (std::string_view name : Split(args.ablation, ',')) {
      ModelConfig c = base;
      c.switches = SwitchesForVariant(std::string(name));
      jobs.emplace_back(std::string(name), c);
    }
  }

  fs::create_directories(args.out);
  RunManifest manifest;
  manifest.command = command;
  manifest.seed = base.seed;
  manifest.config = base.ToText();
  if (!args.ablation.empty()) manifest.config += "ablation=" + args.ablation + "\n";
  for (const char *file : kDatasetFiles) {
    std::string path = Join(args.data, file);
    if (fs::exists(path)) manifest.AddInput(path);
  }
  if (!args.config.empty()) manifest.AddInput(args.config);
  for (const auto &[name, config] : jobs) {
    for (const char *file : {"config.txt", "train_log.csv", "model.ckpt", "run.tsv"}) {
      manifest.outputs.push_back(name.empty() ? file : name + "/" + file);
    }
  }
  std::string mpath = Join(args.out, "manifest.json");
  WriteManifest(mpath, manifest);

  std::vector<LabeledPair> labels = DctrLabels(d.clicks);
  std::vector<QueryId> train = d.Queries(SplitRole::kTrain);
  std::vector<QueryId> test = d.Queries(SplitRole::kTest);
  for (const auto &[name, config] : jobs) {
    std::string dir = name.empty() ? args.out : Join(args.out, name);
    std::string label = name.empty() ? config.VariantName() : name;
    fs::create_directories(dir);
    WriteFileAtomic(Join(dir, "config.txt"), config.ToText());

    EdrmModel model(config, d.kg);
    if (args.gradcheck) RunGradCheck(model, d, labels, train, args);
    TrainOptions options;
    options.threads = args.threads;
    options.record_time = args.record_time;
    if (!args.quiet) {
      options.on_epoch = [&](const EpochStats &s, const EdrmModel &) {
        std::cerr << label << " epoch " << s.epoch << " loss "
                  << FormatDouble(s.train_loss) << " val_mrr "
                  << (std::isnan(s.val_mrr) ? "NA" : FormatDouble(s.val_mrr))
                  << "\n";
        return true;
      };
    }
    TrainResult result = Train(model, d.corpus, labels, train, options);
    WriteFileAtomic(Join(dir, "train_log.csv"), result.log);
    WriteCheckpoint(Join(dir, "model.ckpt"), model.ToCheckpoint());
    Run run = ScoreRun(model, d.corpus, labels, test, args.threads);
    WriteFileAtomic(Join(dir, "run.tsv"), SerializeRun(run));
    std::cout << label << ": " << result.train_pairs << " pairs, best epoch "
              << result.best_epoch << ", val_mrr "
              << (std::isnan(result.best_val_mrr)
                      ? std::string("NA")
                      : FormatDouble(result.best_val_mrr))
              << (result.early_stopped ? " (early stop)" : "") << "\n";
  }
  FinishManifest(mpath, manifest);
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string run;
  std::string qrels;
  std::string metrics = "ndcg@1,ndcg@10,mrr";
  std::string baseline;
  std::string split;
  std::string stratum;
  std::string out;
  size_t trials = 100000;
  uint64_t seed = 1;
};

// Keeps only the queries of the requested stratum when a split is given.
Run Restrict(Run run, const std::set<QueryId> *keep) {
  if (keep == nullptr) return run;
  for (auto it = run.begin(); it != run.end();) {
    it = keep->count(it->first) ? std::next(it) : run.erase(it);
  }
  return run;
}

void RunEvaluate(const EvaluateArgs &args, const std::string &command) {
  Qrels qrels = LoadQrels(args.qrels);
  std::set<QueryId> keep;
  bool restrict = !args.split.empty();
  if (restrict) {
    for (const SplitEntry &e : LoadSplit(args.split)) {
      if (args.stratum.empty() || e.stratum == args.stratum) keep.insert(e.query);
    }
  } else if (!args.stratum.empty()) {
    throw ValidationError("--stratum needs --split");
  }
  const std::set<QueryId> *filter = restrict ? &keep : nullptr;
  Run run = Restrict(LoadRun(args.run), filter);
  std::optional<Run> baseline;
  if (!args.baseline.empty()) baseline = Restrict(LoadRun(args.baseline), filter);

  std::vector<MetricReport> reports;
  for (std::string_view metric : Split(args.metrics, ',')) {
    MetricReport r = Evaluate(run, qrels, std::string(metric));
    if (baseline) {
      AttachPValue(r, Evaluate(*baseline, qrels, std::string(metric)),
                   args.trials, args.seed);
    }
    reports.push_back(std::move(r));
  }

  RunManifest manifest;
  manifest.command = command;
  manifest.seed = args.seed;
  manifest.config = "metrics=" + args.metrics +
                    ",trials=" + std::to_string(args.trials) +
                    (args.stratum.empty() ? "" : ",stratum=" + args.stratum);
  manifest.AddInput(args.run);
  manifest.AddInput(args.qrels);
  if (!args.baseline.empty()) manifest.AddInput(args.baseline);
  if (!args.split.empty()) manifest.AddInput(args.split);
  if (!args.out.empty()) Emit(args.out, MetricsCsv(reports), manifest);
  std::cout << MetricsTable(reports);
}

// ----------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string checkpoint;
  std::string data;
  std::string run;
  std::string baseline;
  std::string qrels;
  std::string queries;
  std::string by = "difficulty";
  std::string out;
  std::string role = "test";
  QueryId query = 0;
  DocId doc = 0;
};

RunManifest AnalyzeManifest(const std::string &command,
                            const std::vector<std::string> &inputs) {
  RunManifest manifest;
  manifest.command = command;
  for (const std::string &path : inputs) {
    if (!path.empty()) manifest.AddInput(path);
  }
  return manifest;
}

void RunWeights(const AnalyzeArgs &args, const std::string &command) {
  WeightReport report = KernelWeightAnalysis(ReadCheckpoint(args.checkpoint));
  Emit(args.out, report.Csv(), AnalyzeManifest(command, {args.checkpoint}));
}

void RunBuckets(const AnalyzeArgs &args, const std::string &command) {
  BucketKind kind;
  std::map<QueryId, size_t> lengths;
  if (args.by == "difficulty") {
    kind = BucketKind::kDifficulty;
  } else if (args.by == "length") {
    kind = BucketKind::kLength;
    if (args.queries.empty()) throw ValidationError("--by length needs --queries");
    for (const auto &[id, text] : LoadTexts(args.queries)) {
      lengths[id] = text.words.size();
    }
  } else {
    throw ValidationError("--by must be difficulty or length");
  }
  Qrels qrels = LoadQrels(args.qrels);
  MetricReport base = Evaluate(LoadRun(args.baseline), qrels, "mrr");
  MetricReport mine = Evaluate(LoadRun(args.run), qrels, "mrr");
  std::vector<BucketRow> rows = BucketAnalysis(base, mine, kind, lengths);
  Emit(args.out, BucketCsv(rows),
       AnalyzeManifest(command, {args.run, args.baseline, args.qrels, args.queries}));
}

SplitRole ParseRole(const std::string &role) {
  if (role == "train") return SplitRole::kTrain;
  if (role == "test") return SplitRole::kTest;
  throw ValidationError("--role must be train or test");
}

void RunFeatures(const AnalyzeArgs &args, const std::string &command) {
  Dataset d = LoadDataset(args.data);
  EdrmModel model = EdrmModel::FromCheckpoint(ReadCheckpoint(args.checkpoint), d.kg);
  std::vector<LabeledPair> labels =
      LabelsFor(DctrLabels(d.clicks), d.Queries(ParseRole(args.role)));
  std::string csv = FeatureCsvHeader(model.layout(), model.config().kernels.size());
  for (const LabeledPair &l : labels) {
    FeatureVector phi = model.Features(model.params(), d.corpus.query(l.query),
                                       d.corpus.doc(l.doc));
    csv += FeatureCsvRow(l.query, l.doc, phi);
  }
  Emit(args.out, csv, AnalyzeManifest(command, {args.checkpoint}));
}

void RunMatrices(const AnalyzeArgs &args, const std::string &command) {
  Dataset d = LoadDataset(args.data);
  EdrmModel model = EdrmModel::FromCheckpoint(ReadCheckpoint(args.checkpoint), d.kg);
  std::vector<TranslationMatrix> matrices =
      model.Matrices(model.params(), d.corpus.query(args.query),
                     d.corpus.doc(args.doc));
  Emit(args.out, MatricesCsv(matrices), AnalyzeManifest(command, {args.checkpoint}));
}

}  // namespace

int RunCli(int argc, const char *const *argv) {
  CLI::App app{"Entity-duet neural ranking: data, training and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  const std::string command = CommandLine(argc, argv);

  GenerateArgs gen;
  CLI::App *generate = app.add_subcommand("generate", "Write a synthetic dataset");
  generate->add_option("--seed", gen.seed, "Random seed")->required();
  generate->add_option("--out", gen.out, "Output directory")->capture_default_str();
  generate->add_option("--queries", gen.spec.queries)->capture_default_str();
  generate->add_option("--docs-per-query", gen.spec.docs_per_query)
      ->capture_default_str();
  generate->add_option("--types", gen.spec.types)->capture_default_str();
  generate->add_option("--mix", gen.mix, "Stratum weights, e.g. a=1,b=1,c=1");
  generate->add_option("--test-fraction", gen.spec.test_fraction)
      ->capture_default_str();
  generate->add_option("--background-entities", gen.spec.background_entities)
      ->capture_default_str();
  generate->add_option("--filler-words", gen.spec.filler_words)
      ->capture_default_str();
  generate->add_option("--description-words", gen.spec.description_words)
      ->capture_default_str();
  generate->add_option("--bridge-words", gen.spec.bridge_words)
      ->capture_default_str();
  generate->add_option("--name-words", gen.spec.name_words)->capture_default_str();

  AnnotateArgs ann;
  CLI::App *annotate =
      app.add_subcommand("annotate", "Link entity mentions in a texts file");
  annotate->add_option("--kg", ann.kg, "Directory with entities.tsv and "
                                       "surface_forms.tsv")->required();
  annotate->add_option("--input", ann.input, "Texts file")->required();
  annotate->add_option("--output", ann.output, "Output file (default stdout)");
  annotate->add_option("--max-mention-len", ann.max_mention_len)
      ->capture_default_str();
  annotate->add_flag("--relink", ann.relink, "Replace inline annotations");

  TrainArgs tr;
  tr.threads = DefaultThreads();
  CLI::App *train = app.add_subcommand("train", "Train a ranker on a dataset");
  train->add_option("--data", tr.data, "Dataset directory")->required();
  train->add_option("--config", tr.config, "key=value config file");
  train->add_option("--set", tr.sets, "Config override key=value (repeatable)");
  train->add_option("--out", tr.out, "Output directory")->required();
  train->add_option("--seed", tr.seed, "Overrides the config seed");
  train->add_option("--ablation", tr.ablation,
                    "'all' or comma-separated variants, one model each");
  train->add_option("--threads", tr.threads, "Batch workers (EDRM_THREADS)")
      ->capture_default_str();
  train->add_flag("--record-time", tr.record_time, "Log wall-clock seconds");
  train->add_flag("--gradcheck", tr.gradcheck,
                  "Check gradients before training; abort on failure");
  train->add_option("--gradcheck-step", tr.gradcheck_step)->capture_default_str();
  train->add_option("--gradcheck-tolerance", tr.gradcheck_tolerance)
      ->capture_default_str();
  train->add_flag("--quiet", tr.quiet, "No per-epoch progress");

  EvaluateArgs ev;
  CLI::App *evaluate = app.add_subcommand("evaluate", "Score a run file");
  evaluate->add_option("--run", ev.run, "Run file")->required();
  evaluate->add_option("--qrels", ev.qrels, "Qrels file")->required();
  evaluate->add_option("--metrics", ev.metrics)->capture_default_str();
  evaluate->add_option("--baseline", ev.baseline, "Baseline run for p-values");
  evaluate->add_option("--split", ev.split, "Split file for --stratum");
  evaluate->add_option("--stratum", ev.stratum, "Only queries of this stratum");
  evaluate->add_option("--out", ev.out, "Metrics CSV");
  evaluate->add_option("--trials", ev.trials, "Permutation trials")
      ->capture_default_str();
  evaluate->add_option("--seed", ev.seed, "Permutation seed")->capture_default_str();

  AnalyzeArgs an;
  CLI::App *analyze = app.add_subcommand("analyze", "Model and run analyses");
  analyze->require_subcommand(1);
  CLI::App *weights =
      analyze->add_subcommand("weights", "Ranking weight shares per group");
  weights->add_option("--checkpoint", an.checkpoint)->required();
  weights->add_option("--out", an.out, "CSV (default stdout)");
  CLI::App *buckets =
      analyze->add_subcommand("buckets", "Win/tie/loss per query bucket");
  buckets->add_option("--run", an.run)->required();
  buckets->add_option("--baseline", an.baseline)->required();
  buckets->add_option("--qrels", an.qrels)->required();
  buckets->add_option("--by", an.by, "difficulty or length")->capture_default_str();
  buckets->add_option("--queries", an.queries, "Queries file for --by length");
  buckets->add_option("--out", an.out, "CSV (default stdout)");
  CLI::App *features =
      analyze->add_subcommand("features", "Kernel features per judged pair");
  features->add_option("--checkpoint", an.checkpoint)->required();
  features->add_option("--data", an.data)->required();
  features->add_option("--role", an.role, "train or test")->capture_default_str();
  features->add_option("--out", an.out, "CSV (default stdout)");
  CLI::App *matrices =
      analyze->add_subcommand("matrices", "Translation matrices of one pair");
  matrices->add_option("--checkpoint", an.checkpoint)->required();
  matrices->add_option("--data", an.data)->required();
  matrices->add_option("--query", an.query)->required();
  matrices->add_option("--doc", an.doc)->required();
  matrices->add_option("--out", an.out, "CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*generate) {
      RunGenerate(gen, command);
    } else if (*annotate) {
      RunAnnotate(ann, command);
    } else if (*train) {
      RunTrain(tr, command);
    } else if (*evaluate) {
      RunEvaluate(ev, command);
    } else if (*weights) {
      RunWeights(an, command);
    } else if (*buckets) {
      RunBuckets(an, command);
    } else if (*features) {
      RunFeatures(an, command);
    } else if (*matrices) {
      RunMatrices(an, command);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace edrm
