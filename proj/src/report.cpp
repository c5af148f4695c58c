#include <cstdio>

#include "ctxclass/harness.hpp"
#include "json.hpp"

namespace ctxclass {

namespace {

std::vector<std::string> combo_codes() {
  std::vector<std::string> codes;
  for (const auto& c : strategy_grid()) codes.push_back(combo_code(c));
  return codes;
}

std::vector<std::string> normalizer_names() {
  std::vector<std::string> names;
  for (auto n : {Normalization::Off, Normalization::MinMax, Normalization::ZScore,
                 Normalization::Percentile, Normalization::BaselineZScore, Normalization::Contextual,
                 Normalization::ContextualNearest, Normalization::ContextualLinear})
    names.push_back(to_string(n));
  return names;
}

const char* yes_no(bool b) { return b ? "Yes" : "No"; }

std::string line(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

}  // namespace

FeatureSchema report_schema(ReportLayout layout) {
  using R = FeatureRole;
  using K = FeatureKind;
  const std::vector<std::string> flag{"no", "yes"};
  if (layout == ReportLayout::StrategyGrid) {
    return FeatureSchema({{"combo", R::Class, K::Discrete, combo_codes()},
                          {"normalize", R::Contextual, K::Discrete, flag},
                          {"expand", R::Contextual, K::Discrete, flag},
                          {"weight", R::Contextual, K::Discrete, flag},
                          {"correct", R::Primary, K::Continuous, {}},
                          {"total", R::Primary, K::Continuous, {}},
                          {"percent", R::Primary, K::Continuous, {}}});
  }
  return FeatureSchema({{"classifier", R::Contextual, K::Discrete, {"nn", "mlr"}},
                        {"normalizer", R::Class, K::Discrete, normalizer_names()},
                        {"correct", R::Primary, K::Continuous, {}},
                        {"total", R::Primary, K::Continuous, {}},
                        {"percent", R::Primary, K::Continuous, {}}});
}

std::string emit_table(const ExperimentReport& report, TableFormat format) {
  const bool grid = report.layout == ReportLayout::StrategyGrid;
  if (format == TableFormat::Csv) {
    std::vector<Observation> rows;
    for (const auto& c : report.cells) {
      const auto counts = std::vector<Cell>{static_cast<double>(c.correct),
                                            static_cast<double>(c.total),
                                            static_cast<double>(c.percent())};
      Observation row;
      if (grid) {
        row = {combo_code(c.combo), std::string(c.combo.normalize ? "yes" : "no"),
               std::string(c.combo.expand ? "yes" : "no"), std::string(c.combo.weight ? "yes" : "no")};
      } else {
        row = {c.classifier, c.normalizer};
      }
      row.insert(row.end(), counts.begin(), counts.end());
      rows.push_back(std::move(row));
    }
    return format_table(Dataset(report_schema(report.layout), std::move(rows)));
  }

  std::string out;
  if (grid) {
    out += line("%-15s %-15s %-15s %8s %6s %8s\n", "normalization", "expansion", "weighting",
                "correct", "total", "percent");
    for (const auto& c : report.cells)
      out += line("%-15s %-15s %-15s %8zu %6zu %8d\n", yes_no(c.combo.normalize),
                  yes_no(c.combo.expand), yes_no(c.combo.weight), c.correct, c.total, c.percent());
  } else {
    out += line("%-12s %-18s %8s %6s %8s\n", "classifier", "normalizer", "correct", "total", "percent");
    for (const auto& c : report.cells)
      out += line("%-12s %-18s %8zu %6zu %8d\n", c.classifier.c_str(), c.normalizer.c_str(), c.correct,
                  c.total, c.percent());
  }
  return out;
}

std::string format_report_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["dataset"] = report.dataset;
  j["classifier"] = report.classifier;
  j["layout"] = report.layout == ReportLayout::StrategyGrid ? "strategy-grid" : "normalizer-comparison";
  j["seed"] = report.seed;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& c : report.cells) {
    nlohmann::ordered_json e;
    if (report.layout == ReportLayout::StrategyGrid) {
      e["normalize"] = c.combo.normalize;
      e["expand"] = c.combo.expand;
      e["weight"] = c.combo.weight;
    } else {
      e["classifier"] = c.classifier;
      e["normalizer"] = c.normalizer;
    }
    e["correct"] = c.correct;
    e["total"] = c.total;
    e["percent"] = c.percent();
    cells.push_back(e);
  }
  j["cells"] = cells;
  auto splits = nlohmann::ordered_json::array();
  for (const auto& s : report.splits)
    splits.push_back({{"seed", s.seed}, {"total", s.total}, {"correct", s.correct}});
  j["splits"] = splits;
  auto sig = nlohmann::ordered_json::array();
  for (const auto& s : report.significance) {
    nlohmann::ordered_json e;
    e["cell"] = combo_code(report.cells.at(s.cell).combo);
    e["reference"] = combo_code(report.cells.at(s.reference).combo);
    e["no_variance"] = s.result.no_variance;
    e["mean_difference"] = s.result.mean_difference;
    e["t"] = s.result.t;
    e["p"] = s.result.p;
    e["df"] = s.result.df;
    sig.push_back(e);
  }
  j["significance"] = sig;
  return j.dump(2) + "\n";
}

}  // namespace ctxclass
