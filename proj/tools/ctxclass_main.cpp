#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ctxclass/classify.hpp"
#include "ctxclass/harness.hpp"
#include "ctxclass/preprocess.hpp"
#include "ctxclass/taxonomy.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace ctxclass;

namespace {

enum Exit { kOk = 0, kUsage = 1, kLoad = 2, kPrecondition = 3, kRuntime = 4 };

struct UsageError : Error {
  using Error::Error;
};

const std::vector<std::string> kClassifiers{"nn", "mlr", "nearest-neighbor", "linear-discriminant"};
const std::vector<std::string> kNormalizers{"off",      "minmax",     "zscore",        "percentile",
                                            "baseline", "contextual", "contextual-nn", "contextual-linear"};

fs::path data_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CTXCLASS_DATA_DIR")) return env;
  return {};
}

fs::path dataset_file(const std::string& explicit_path, const std::string& dir_flag, const char* name) {
  if (!explicit_path.empty()) return explicit_path;
  const fs::path dir = data_dir(dir_flag);
  if (dir.empty())
    throw UsageError(std::string("no path for ") + name + "; pass it or set --data-dir / CTXCLASS_DATA_DIR");
  return dir / name;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << text;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void write_reports(const ExperimentReport& report, const std::string& prefix) {
  if (prefix.empty()) return;
  write_file(prefix + ".txt", emit_table(report, TableFormat::Text));
  write_file(prefix + ".csv", emit_table(report, TableFormat::Csv));
  write_file(prefix + ".json", format_report_json(report));
}

// ---- taxonomy --------------------------------------------------------------

struct TaxonomyArgs {
  std::string spec, data, schema, format = "text";
  std::optional<double> eps;
  int bins = 0;
};

int cmd_taxonomy(const TaxonomyArgs& a) {
  if (a.spec.empty() == a.data.empty()) throw UsageError("give exactly one of --spec or --data");
  if (!a.data.empty() && a.schema.empty()) throw UsageError("--data needs --schema");
  std::optional<JointDistribution> dist;
  double eps = 1e-9;
  if (!a.spec.empty()) {
    dist = JointDistribution::from_spec(read_joint_spec(a.spec));
  } else {
    Dataset d = load_table(a.data, a.schema);
    eps = 0.03;
    bool continuous = false;
    for (const auto& f : d.schema().features()) continuous = continuous || f.kind == FeatureKind::Continuous;
    if (continuous) {
      if (a.bins < 2)
        throw PreconditionError("data has continuous features; pass --bins K (K >= 2) to discretize them");
      d = discretize(d, a.bins);
    }
    dist = estimate_distribution(d);
  }
  if (a.eps) eps = *a.eps;
  const FeatureVerdict verdict = classify_features(*dist, eps);
  std::cout << (a.format == "json" ? format_verdict_json(*dist, verdict) : format_verdict_text(*dist, verdict));
  return kOk;
}

// ---- run-grid --------------------------------------------------------------

struct GridArgs {
  std::string experiment;
  std::string dataset = "vowel";
  std::string classifier = "nn";
  std::uint64_t seed = 7;
  std::size_t splits = 10;
  std::size_t n_train = 100;
  bool no_selection = false;
  double f_enter = 4.0;
  std::string data_dir, vowel, hepatitis;
  std::string train, test, schema, context, statistics = "fitted";
  std::vector<std::string> expand;
  int bins = 0;
  bool impute = false;
  std::string out;
};

void apply_experiment_file(GridArgs& a, const CLI::App& sub) {
  if (a.experiment.empty()) return;
  std::ifstream in(a.experiment);
  if (!in) throw LoadError("cannot read experiment file " + a.experiment);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw LoadError(a.experiment + ": " + e.what());
  }
  auto take = [&](const char* key, const char* flag, auto& field) {
    if (j.contains(key) && sub.count(flag) == 0) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    take("dataset", "--dataset", a.dataset);
    take("classifier", "--classifier", a.classifier);
    take("seed", "--seed", a.seed);
    take("splits", "--splits", a.splits);
    take("n_train", "--n-train", a.n_train);
    take("f_enter", "--f-enter", a.f_enter);
    if (j.contains("selection") && sub.count("--no-selection") == 0) a.no_selection = !j.at("selection").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(a.experiment + ": " + e.what());
  }
  if (a.dataset != "vowel" && a.dataset != "hepatitis" && a.dataset != "table")
    throw UsageError("experiment file: unknown dataset '" + a.dataset + "'");
  if (std::find(kClassifiers.begin(), kClassifiers.end(), a.classifier) == kClassifiers.end())
    throw UsageError("experiment file: unknown classifier '" + a.classifier + "'");
}

int cmd_run_grid(GridArgs a, const CLI::App& sub) {
  apply_experiment_file(a, sub);
  const ClassifierKind kind = parse_classifier(a.classifier);
  SelectionParams selection;
  selection.enabled = !a.no_selection;
  selection.f_enter = a.f_enter;

  std::vector<std::string> warnings;
  ExperimentReport report;
  if (a.dataset == "vowel") {
    const fs::path file = dataset_file(a.vowel, a.data_dir, "vowel-context.data");
    const auto [train, test] = load_vowel(file, file, &warnings);
    print_warnings(warnings);
    report = run_vowel_grid(train, test, kind, selection);
  } else if (a.dataset == "hepatitis") {
    const Dataset data = load_hepatitis(dataset_file(a.hepatitis, a.data_dir, "hepatitis.data"), &warnings);
    print_warnings(warnings);
    report = run_hepatitis_grid(data, a.splits, a.seed, kind, a.n_train, selection);
  } else {
    if (a.train.empty() || a.test.empty() || a.schema.empty() || a.context.empty())
      throw UsageError("--dataset table needs --train, --test, --schema and --context");
    const Dataset train = load_table(a.train, a.schema);
    const Dataset test = load_table(a.test, a.schema);
    GridProtocol p;
    p.context = a.context;
    p.bins = a.bins;
    p.expand_features = a.expand;
    p.statistics = a.statistics == "transductive" ? ContextStatistics::Transductive : ContextStatistics::Fitted;
    p.impute = a.impute;
    p.selection = selection;
    if (p.expand_features.empty()) throw UsageError("--dataset table needs --expand FEATURE");
    report = run_strategy_grid(train, test, kind, p);
    report.dataset = fs::path(a.train).stem().string();
  }

  std::cout << emit_table(report, TableFormat::Text);
  const Synergy s = synergy(report);
  std::cout << "synergy: sum of individual gains " << s.individual_sum << " points, joint gain " << s.joint
            << " points\n";
  write_reports(report, a.out);
  return kOk;
}

// ---- compare-normalizers -----------------------------------------------------

struct CompareArgs {
  bool synth = false;
  std::uint64_t seed = 7;
  double shift = PlantParams{}.shift;
  double noise = PlantParams{}.noise;
  std::string train, test, schema, baseline, context, statistics = "fitted";
  int bins = 0;
  std::vector<std::string> classifiers{"nn", "mlr"};
  std::vector<std::string> normalizers;
  std::string out;
};

int cmd_compare(const CompareArgs& a) {
  if (a.synth == !a.train.empty()) throw UsageError("give either --synth or --train/--test/--schema");
  std::vector<ClassifierKind> kinds;
  for (const auto& c : a.classifiers) kinds.push_back(parse_classifier(c));
  std::vector<Normalization> norms;
  for (const auto& n : a.normalizers) norms.push_back(parse_normalization(n));
  if (norms.empty()) norms = default_normalizers();

  Dataset train, test;
  ComparisonOptions options;
  if (a.synth) {
    PlantParams p;
    p.shift = a.shift;
    p.noise = a.noise;
    try {
      p.validate();
    } catch (const PreconditionError& e) {
      throw UsageError(e.what());
    }
    auto planted = plant_context_dataset(p, a.seed);
    train = std::move(planted.train);
    test = std::move(planted.test);
    options.baseline = std::move(planted.baseline);
  } else {
    if (a.test.empty() || a.schema.empty()) throw UsageError("--train needs --test and --schema");
    train = load_table(a.train, a.schema);
    test = load_table(a.test, a.schema);
    if (!a.baseline.empty()) options.baseline = load_table(a.baseline, a.schema);
  }
  if (!a.context.empty()) options.context = a.context;
  options.bins = a.bins;
  options.statistics = a.statistics == "transductive" ? ContextStatistics::Transductive : ContextStatistics::Fitted;

  const ExperimentReport report = run_normalization_comparison(train, test, kinds, norms, options);
  std::cout << emit_table(report, TableFormat::Text);
  write_reports(report, a.out);
  return kOk;
}

// ---- synth -----------------------------------------------------------------------

struct SynthArgs {
  PlantParams params;
  std::uint64_t seed = 7;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  try {
    a.params.validate();
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  const PlantedContext planted = plant_context_dataset(a.params, a.seed);
  const fs::path dir = a.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  for (const auto& [name, data] : {std::pair<const char*, const Dataset*>{"train", &planted.train},
                                   {"test", &planted.test},
                                   {"baseline", &planted.baseline}}) {
    write_table(*data, dir / (std::string(name) + ".csv"));
    write_schema(data->schema(), dir / (std::string(name) + ".schema.json"));
  }
  std::cout << "wrote " << planted.train.size() << " train, " << planted.test.size() << " test and "
            << planted.baseline.size() << " baseline rows to " << dir.string() << "\n";
  return kOk;
}

// ---- impute ------------------------------------------------------------------------

struct ImputeArgs {
  std::string dataset, data_dir, data, schema, donors, out;
};

int cmd_impute(const ImputeArgs& a) {
  if (a.dataset.empty() == a.data.empty()) throw UsageError("give exactly one of --dataset hepatitis or --data");
  Dataset target;
  if (!a.dataset.empty()) {
    target = load_hepatitis(dataset_file("", a.data_dir, "hepatitis.data"));
  } else {
    if (a.schema.empty()) throw UsageError("--data needs --schema");
    target = load_table(a.data, a.schema);
  }
  const Dataset donors = a.donors.empty() ? target : load_table(a.donors, a.schema);
  const Dataset filled = impute_missing(donors, target);
  std::cerr << "filled " << target.missing_count() << " MISSING cells\n";
  if (a.out.empty()) std::cout << format_table(filled);
  else write_table(filled, a.out);
  return kOk;
}

// ---- normalize -----------------------------------------------------------------------

struct NormalizeArgs {
  std::string train, test, schema, baseline, out_train, out_test;
  std::string mode = "off", context, statistics = "fitted";
  std::vector<std::string> expand;
  bool weight = false, impute = false;
  int bins = 0;
};

int cmd_normalize(const NormalizeArgs& a) {
  PipelineConfig config;
  config.normalize = parse_normalization(a.mode);
  config.expand = !a.expand.empty();
  config.expand_features = a.expand;
  config.weight = a.weight;
  if (!a.context.empty()) config.context = a.context;
  config.bins = a.bins;
  config.statistics = a.statistics == "transductive" ? ContextStatistics::Transductive : ContextStatistics::Fitted;
  config.impute = a.impute;

  const Dataset train = load_table(a.train, a.schema);
  const Dataset test = load_table(a.test, a.schema);
  if (!a.baseline.empty()) config.baseline = load_table(a.baseline, a.schema);
  const auto [tr, te] = run_pipeline(config, train, test);
  if (a.out_train.empty()) std::cout << format_table(tr);
  else write_table(tr, a.out_train);
  if (!a.out_test.empty()) write_table(te, a.out_test);
  return kOk;
}

int guarded(const std::function<int()>& body, int precondition_code = kPrecondition) {
  try {
    return body();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const LoadError& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return kLoad;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return precondition_code;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-sensitive feature taxonomy, preprocessing and classification experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ctxclass 1.0");

  TaxonomyArgs tax;
  auto* t = app.add_subcommand("taxonomy", "Label features primary / contextual / irrelevant");
  t->add_option("--spec", tax.spec, "Joint distribution file (JSON)");
  t->add_option("--data", tax.data, "CSV data file");
  t->add_option("--schema", tax.schema, "Schema sidecar for --data");
  t->add_option("--eps", tax.eps, "Tolerance (default 1e-9 for --spec, 0.03 for --data)")->check(CLI::NonNegativeNumber);
  t->add_option("--bins", tax.bins, "Equal-frequency bins for continuous features")->check(CLI::Range(2, 1000));
  t->add_option("--format", tax.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  GridArgs grid;
  auto* g = app.add_subcommand("run-grid", "Run the 8-combination strategy grid");
  g->add_option("--experiment", grid.experiment, "Experiment file (JSON) with dataset, classifier, seed, splits");
  g->add_option("--dataset", grid.dataset, "vowel, hepatitis or table")->check(CLI::IsMember({"vowel", "hepatitis", "table"}));
  g->add_option("--classifier", grid.classifier, "nn or mlr")->check(CLI::IsMember(kClassifiers));
  g->add_option("--seed", grid.seed, "Seed for the hepatitis splits");
  g->add_option("--splits", grid.splits, "Number of hepatitis splits")->check(CLI::PositiveNumber);
  g->add_option("--n-train", grid.n_train, "Training rows per hepatitis split")->check(CLI::PositiveNumber);
  g->add_flag("--no-selection", grid.no_selection, "Fit the discriminant on all features");
  g->add_option("--f-enter", grid.f_enter, "Forward-selection entry threshold")->check(CLI::NonNegativeNumber);
  g->add_option("--data-dir", grid.data_dir, "Directory with vowel-context.data and hepatitis.data");
  g->add_option("--vowel", grid.vowel, "Vowel file (overrides --data-dir)");
  g->add_option("--hepatitis", grid.hepatitis, "Hepatitis file (overrides --data-dir)");
  g->add_option("--train", grid.train, "Training CSV (--dataset table)");
  g->add_option("--test", grid.test, "Test CSV (--dataset table)");
  g->add_option("--schema", grid.schema, "Schema sidecar (--dataset table)");
  g->add_option("--context", grid.context, "Context feature (--dataset table)");
  g->add_option("--bins", grid.bins, "Bins for a continuous context")->check(CLI::Range(2, 1000));
  g->add_option("--expand", grid.expand, "Contextual feature(s) to expand (--dataset table)");
  g->add_option("--statistics", grid.statistics, "fitted or transductive")->check(CLI::IsMember({"fitted", "transductive"}));
  g->add_flag("--impute", grid.impute, "Impute MISSING cells first (--dataset table)");
  g->add_option("--out", grid.out, "Write <out>.txt, <out>.csv and <out>.json");

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare-normalizers", "Compare the normalization menu");
  c->add_flag("--synth", cmp.synth, "Use the planted-context generator");
  c->add_option("--seed", cmp.seed, "Generator seed");
  c->add_option("--shift", cmp.shift, "Context shift magnitude (--synth)");
  c->add_option("--noise", cmp.noise, "Noise level (--synth)");
  c->add_option("--train", cmp.train, "Training CSV");
  c->add_option("--test", cmp.test, "Test CSV");
  c->add_option("--schema", cmp.schema, "Schema sidecar");
  c->add_option("--baseline", cmp.baseline, "Baseline CSV for baseline and model-based normalizers");
  c->add_option("--context", cmp.context, "Context feature for the group normalizer");
  c->add_option("--bins", cmp.bins, "Bins for a continuous context")->check(CLI::Range(2, 1000));
  c->add_option("--statistics", cmp.statistics, "fitted or transductive")->check(CLI::IsMember({"fitted", "transductive"}));
  c->add_option("--classifier", cmp.classifiers, "Classifier(s)")->check(CLI::IsMember(kClassifiers));
  c->add_option("--normalizer", cmp.normalizers, "Normalizer(s); default is the full menu")->check(CLI::IsMember(kNormalizers));
  c->add_option("--out", cmp.out, "Write <out>.txt, <out>.csv and <out>.json");

  SynthArgs syn;
  auto* s = app.add_subcommand("synth", "Write a planted-context train/test/baseline set");
  s->add_option("--out", syn.out, "Output directory")->required();
  s->add_option("--seed", syn.seed, "Generator seed");
  s->add_option("--classes", syn.params.classes, "Class count");
  s->add_option("--features", syn.params.features, "Primary feature count");
  s->add_option("--contexts", syn.params.contexts, "Context feature count");
  s->add_option("--shift", syn.params.shift, "Context shift magnitude");
  s->add_option("--noise", syn.params.noise, "Noise level");
  s->add_option("--n-train", syn.params.n_train, "Training rows");
  s->add_option("--n-test", syn.params.n_test, "Test rows");
  s->add_option("--n-baseline", syn.params.n_baseline, "Baseline rows");
  s->add_option("--train-context", syn.params.train_context_lo, "Lower end of the training context range");
  s->add_option("--train-context-hi", syn.params.train_context_hi, "Upper end of the training context range");
  s->add_option("--test-context", syn.params.test_context_lo, "Lower end of the test context range");
  s->add_option("--test-context-hi", syn.params.test_context_hi, "Upper end of the test context range");

  ImputeArgs imp;
  auto* i = app.add_subcommand("impute", "Fill MISSING cells from the nearest donor row");
  i->add_option("--dataset", imp.dataset, "Built-in dataset")->check(CLI::IsMember({"hepatitis"}));
  i->add_option("--data-dir", imp.data_dir, "Directory with hepatitis.data");
  i->add_option("--data", imp.data, "CSV data file");
  i->add_option("--schema", imp.schema, "Schema sidecar");
  i->add_option("--donors", imp.donors, "Donor CSV (default: the data itself)");
  i->add_option("--out", imp.out, "Output CSV (default: stdout)");

  NormalizeArgs nrm;
  auto* n = app.add_subcommand("normalize", "Run the preprocessing pipeline on a train/test pair");
  n->add_option("--train", nrm.train, "Training CSV")->required();
  n->add_option("--test", nrm.test, "Test CSV")->required();
  n->add_option("--schema", nrm.schema, "Schema sidecar")->required();
  n->add_option("--baseline", nrm.baseline, "Baseline CSV");
  n->add_option("--normalize", nrm.mode, "Normalization mode")->check(CLI::IsMember(kNormalizers));
  n->add_option("--expand", nrm.expand, "Contextual feature(s) to expand");
  n->add_flag("--weight", nrm.weight, "Apply contextual weights");
  n->add_option("--context", nrm.context, "Context feature");
  n->add_option("--bins", nrm.bins, "Bins for a continuous context")->check(CLI::Range(2, 1000));
  n->add_option("--statistics", nrm.statistics, "fitted or transductive")->check(CLI::IsMember({"fitted", "transductive"}));
  n->add_flag("--impute", nrm.impute, "Impute MISSING cells first");
  n->add_option("--out-train", nrm.out_train, "Transformed training CSV (default: stdout)");
  n->add_option("--out-test", nrm.out_test, "Transformed test CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (t->parsed()) return guarded([&] { return cmd_taxonomy(tax); });
  if (g->parsed()) return guarded([&] { return cmd_run_grid(grid, *g); }, kRuntime);
  if (c->parsed()) return guarded([&] { return cmd_compare(cmp); }, kRuntime);
  if (s->parsed()) return guarded([&] { return cmd_synth(syn); });
  if (i->parsed()) return guarded([&] { return cmd_impute(imp); });
  if (n->parsed()) return guarded([&] { return cmd_normalize(nrm); });
  return kUsage;
}
