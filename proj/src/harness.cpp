#include "ctxclass/harness.hpp"

#include <cmath>

#include "ctxclass/rng.hpp"

namespace ctxclass {

std::vector<StrategyCombo> strategy_grid() {
  std::vector<StrategyCombo> out;
  for (int k = 0; k < 8; ++k) out.push_back({(k & 4) != 0, (k & 2) != 0, (k & 1) != 0});
  return out;
}

std::string combo_code(const StrategyCombo& combo) {
  std::string s;
  s += combo.normalize ? 'Y' : 'N';
  s += combo.expand ? 'Y' : 'N';
  s += combo.weight ? 'Y' : 'N';
  return s;
}

int CellResult::percent() const {
  if (total == 0) return 0;
  return static_cast<int>(std::lround(100.0 * static_cast<double>(correct) / static_cast<double>(total)));
}

const CellResult* ExperimentReport::find(const StrategyCombo& combo) const {
  for (const auto& c : cells)
    if (c.combo == combo) return &c;
  return nullptr;
}

PipelineConfig grid_config(const GridProtocol& protocol, const StrategyCombo& combo) {
  PipelineConfig config;
  config.normalize = combo.normalize ? Normalization::Contextual : Normalization::Off;
  config.expand = combo.expand;
  config.weight = combo.weight;
  config.context = protocol.context;
  config.bins = protocol.bins;
  config.expand_features = protocol.expand_features;
  config.statistics = protocol.statistics;
  config.impute = protocol.impute;
  return config;
}

namespace {

std::size_t count_correct(const std::vector<int>& predicted, const Dataset& test) {
  std::size_t correct = 0;
  for (std::size_t r = 0; r < test.size(); ++r)
    if (predicted[r] == test.label(r)) ++correct;
  return correct;
}

std::size_t evaluate(const PipelineConfig& config, const Dataset& train, const Dataset& test,
                     ClassifierKind classifier, const SelectionParams& selection) {
  const auto [tr, te] = run_pipeline(config, train, test);
  return count_correct(fit_predict(classifier, tr, te, selection), te);
}

}  // namespace

ExperimentReport run_strategy_grid(const Dataset& train, const Dataset& test,
                                   ClassifierKind classifier, const GridProtocol& protocol) {
  ExperimentReport report;
  report.classifier = to_string(classifier);
  for (const auto& combo : strategy_grid()) {
    CellResult cell{combo, report.classifier, {}, 0, test.size()};
    cell.correct = evaluate(grid_config(protocol, combo), train, test, classifier, protocol.selection);
    report.cells.push_back(cell);
  }
  return report;
}

GridProtocol vowel_protocol() {
  GridProtocol p;
  p.context = "speaker";
  p.expand_features = {"sex"};
  p.statistics = ContextStatistics::Transductive;
  return p;
}

ExperimentReport run_vowel_grid(const Dataset& train, const Dataset& test,
                                ClassifierKind classifier, const SelectionParams& selection) {
  GridProtocol p = vowel_protocol();
  p.selection = selection;
  ExperimentReport report = run_strategy_grid(train, test, classifier, p);
  report.dataset = "vowel";
  return report;
}

GridProtocol hepatitis_protocol() {
  GridProtocol p;
  p.context = "age";
  p.bins = 5;
  p.expand_features = {"age"};
  p.statistics = ContextStatistics::Fitted;
  p.impute = true;
  return p;
}

ExperimentReport run_hepatitis_grid(const Dataset& dataset, std::size_t n_splits,
                                    std::uint64_t seed, ClassifierKind classifier,
                                    std::size_t n_train, const SelectionParams& selection) {
  if (n_splits == 0) throw PreconditionError("run_hepatitis_grid: need at least one split");
  GridProtocol protocol = hepatitis_protocol();
  protocol.selection = selection;

  ExperimentReport report;
  report.dataset = "hepatitis";
  report.classifier = to_string(classifier);
  report.seed = seed;
  const auto grid = strategy_grid();
  for (const auto& combo : grid) report.cells.push_back({combo, report.classifier, {}, 0, 0});

  for (std::size_t k = 0; k < n_splits; ++k) {
    const std::uint64_t split_seed = splitmix64(seed + k);
    const auto [train, test] = split_random(dataset, n_train, split_seed);
    SplitResult split{split_seed, test.size(), {}};
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const std::size_t correct =
          evaluate(grid_config(protocol, grid[c]), train, test, classifier, protocol.selection);
      split.correct.push_back(correct);
      report.cells[c].correct += correct;
      report.cells[c].total += test.size();
    }
    report.splits.push_back(std::move(split));
  }

  if (n_splits >= 2) {
    for (std::size_t c = 1; c < grid.size(); ++c) {
      std::vector<double> a, b;
      for (const auto& s : report.splits) {
        a.push_back(100.0 * static_cast<double>(s.correct[c]) / static_cast<double>(s.total));
        b.push_back(100.0 * static_cast<double>(s.correct[0]) / static_cast<double>(s.total));
      }
      report.significance.push_back({c, 0, paired_t_test(a, b)});
    }
  }
  return report;
}

std::vector<Normalization> default_normalizers() {
  return {Normalization::Off,        Normalization::MinMax,
          Normalization::ZScore,     Normalization::Percentile,
          Normalization::BaselineZScore, Normalization::ContextualNearest,
          Normalization::ContextualLinear};
}

ExperimentReport run_normalization_comparison(const Dataset& train, const Dataset& test,
                                              const std::vector<ClassifierKind>& classifiers,
                                              const std::vector<Normalization>& normalizers,
                                              const ComparisonOptions& options) {
  for (auto n : normalizers) {
    PipelineConfig probe;
    probe.normalize = n;
    probe.baseline = options.baseline;
    probe.context = options.context;
    probe.bins = options.bins;
    probe.validate(train.schema());
  }
  ExperimentReport report;
  report.layout = ReportLayout::NormalizerComparison;
  for (std::size_t k = 0; k < classifiers.size(); ++k)
    report.classifier += (k ? "," : "") + to_string(classifiers[k]);
  for (auto kind : classifiers) {
    for (auto n : normalizers) {
      PipelineConfig config;
      config.normalize = n;
      config.baseline = options.baseline;
      config.context = options.context;
      config.bins = options.bins;
      config.statistics = options.statistics;
      CellResult cell{{}, to_string(kind), to_string(n), 0, test.size()};
      cell.combo.normalize = n == Normalization::Contextual || n == Normalization::ContextualNearest ||
                             n == Normalization::ContextualLinear;
      cell.correct = evaluate(config, train, test, kind, options.selection);
      report.cells.push_back(cell);
    }
  }
  return report;
}

Synergy synergy(const ExperimentReport& report) {
  auto percent = [&](const StrategyCombo& c) {
    const CellResult* cell = report.find(c);
    if (!cell) throw PreconditionError("synergy: grid cell " + combo_code(c) + " is missing");
    return cell->percent();
  };
  const int base = percent({false, false, false});
  Synergy s;
  s.individual_sum = (percent({true, false, false}) - base) + (percent({false, true, false}) - base) +
                     (percent({false, false, true}) - base);
  s.joint = percent({true, true, true}) - base;
  return s;
}

}  // namespace ctxclass
