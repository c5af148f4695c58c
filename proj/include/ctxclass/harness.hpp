#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctxclass/classify.hpp"
#include "ctxclass/dataset.hpp"
#include "ctxclass/preprocess.hpp"
#include "ctxclass/stats.hpp"

namespace ctxclass {

// One row of the 2^3 strategy grid.
struct StrategyCombo {
  bool normalize = false;  // contextual normalization
  bool expand = false;     // contextual expansion
  bool weight = false;     // contextual weighting

  friend bool operator==(const StrategyCombo&, const StrategyCombo&) = default;
};

// Table order: normalize, then expand, then weight, "No" before "Yes".
std::vector<StrategyCombo> strategy_grid();
std::string combo_code(const StrategyCombo& combo);  // e.g. "YNY"

struct CellResult {
  StrategyCombo combo;
  std::string classifier;
  std::string normalizer;  // comparison layout only
  std::size_t correct = 0;
  std::size_t total = 0;

  int percent() const;  // round(100 * correct / total)
};

struct SplitResult {
  std::uint64_t seed = 0;
  std::size_t total = 0;
  std::vector<std::size_t> correct;  // parallel to ExperimentReport::cells
};

struct SignificanceEntry {
  std::size_t cell = 0;       // compared cell
  std::size_t reference = 0;  // reference cell (the all-No combo)
  TTestResult result;
};

enum class ReportLayout { StrategyGrid, NormalizerComparison };

struct ExperimentReport {
  std::string dataset;
  std::string classifier;
  ReportLayout layout = ReportLayout::StrategyGrid;
  std::uint64_t seed = 0;
  std::vector<CellResult> cells;
  std::vector<SplitResult> splits;  // multi-split protocols
  std::vector<SignificanceEntry> significance;

  const CellResult* find(const StrategyCombo& combo) const;
};

// How the grid maps onto pipeline settings for one dataset.
struct GridProtocol {
  std::string context;
  int bins = 0;
  std::vector<std::string> expand_features;
  ContextStatistics statistics = ContextStatistics::Fitted;
  bool impute = false;
  SelectionParams selection;
};

PipelineConfig grid_config(const GridProtocol& protocol, const StrategyCombo& combo);

// All 8 combos on one train/test pair.
ExperimentReport run_strategy_grid(const Dataset& train, const Dataset& test,
                                   ClassifierKind classifier, const GridProtocol& protocol);

// Speaker as context (per-speaker transductive statistics), sex expanded.
GridProtocol vowel_protocol();
ExperimentReport run_vowel_grid(const Dataset& train, const Dataset& test,
                                ClassifierKind classifier, const SelectionParams& selection = {});

// Imputation, age cut into 5 equal-frequency bins on each training split,
// age expanded. Split k uses split_random(dataset, n_train, splitmix64(seed + k)).
GridProtocol hepatitis_protocol();
ExperimentReport run_hepatitis_grid(const Dataset& dataset, std::size_t n_splits,
                                    std::uint64_t seed, ClassifierKind classifier,
                                    std::size_t n_train = 100,
                                    const SelectionParams& selection = {});

// The normalization menu, context-free methods first.
std::vector<Normalization> default_normalizers();

struct ComparisonOptions {
  std::optional<Dataset> baseline;
  std::optional<std::string> context;  // needed by the group-statistics normalizer
  int bins = 0;
  ContextStatistics statistics = ContextStatistics::Fitted;
  SelectionParams selection;
};

ExperimentReport run_normalization_comparison(const Dataset& train, const Dataset& test,
                                              const std::vector<ClassifierKind>& classifiers,
                                              const std::vector<Normalization>& normalizers,
                                              const ComparisonOptions& options = {});

// Gains in rounded percentage points over the all-No cell.
struct Synergy {
  int individual_sum = 0;  // sum over the three single-strategy cells
  int joint = 0;           // all-Yes cell
};

Synergy synergy(const ExperimentReport& report);

// ---- emission ------------------------------------------------------------------

enum class TableFormat { Text, Csv };

std::string emit_table(const ExperimentReport& report, TableFormat format);

// Schema under which the CSV variant loads back through load_table/parse_table.
FeatureSchema report_schema(ReportLayout layout);

std::string format_report_json(const ExperimentReport& report);

}  // namespace ctxclass
