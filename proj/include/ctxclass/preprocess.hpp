#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ctxclass/dataset.hpp"
#include "ctxclass/scalers.hpp"

namespace ctxclass {

// ---- context keys ----------------------------------------------------------

struct DiscreteContext {
  std::size_t feature;
};

// Continuous context cut into half-open bins [b_{k-1}, b_k); values beyond
// the outer boundaries land in the first/last bin.
struct BinnedContext {
  std::size_t feature;
  std::vector<double> boundaries;  // strictly increasing, bins = size() + 1 >= 2
};

using ContextKey = std::variant<DiscreteContext, BinnedContext>;

BinnedContext make_binned_context(std::size_t feature, std::vector<double> boundaries);

/// k-1 cut points giving k bins of equal size up to ties. Cuts only fall
/// between distinct values; fewer than k distinct values is an error.
std::vector<double> equal_freq_bins(std::span<const double> values, int k);

int bin_of(std::span<const double> boundaries, double value);

std::size_t context_feature(const ContextKey& key);

// Group label of an observation under the key: the symbol for a discrete
// context, "bin<k>" for a binned one.
std::string context_group(const ContextKey& key, const FeatureSchema& schema,
                          const Observation& row);

// Resolves a feature name to a key: discrete features group by symbol,
// continuous ones need bins >= 2 and are cut on `fit_set`.
ContextKey resolve_context(const Dataset& fit_set, const std::string& feature, int bins);

/// Continuous non-class features cut into `bins` equal-frequency bins fitted
/// on the dataset itself; cells become the symbols "bin0", "bin1", ...
Dataset discretize(const Dataset& dataset, int bins);

// ---- numeric views ---------------------------------------------------------

/// Discrete primary features become continuous alphabet indices (binary -> {0, 1}).
Dataset encode_primary(const Dataset& dataset);

/// Primary columns as a matrix; all must be continuous and present.
Matrix primary_matrix(const Dataset& dataset);

/// Copy of `dataset` with the primary columns replaced by `values`.
Dataset with_primary(const Dataset& dataset, const Matrix& values);

// ---- imputation ------------------------------------------------------------

/// Fills every MISSING non-class cell of `target` from its most similar row
/// in `train` (similarity over features present in both, rescaled to [0,1]
/// by train min/max; discrete features compare by equality). Candidates
/// lacking the cell are skipped; ties go to the lowest train row.
Dataset impute_missing(const Dataset& train, const Dataset& target);

// ---- contextual normalization ---------------------------------------------

struct GroupStats {
  RowVector mean;
  RowVector deviation;
};

enum class ContextRegressor { NearestNeighbor, Linear };

// Expected value and deviation of each primary feature as a function of context.
struct ContextModel {
  std::vector<std::size_t> primary;  // columns covered, schema order

  std::optional<ContextKey> key;
  std::map<std::string, GroupStats> groups;
  GroupStats fallback;

  struct Regression {
    ContextRegressor kind = ContextRegressor::Linear;
    std::vector<std::size_t> context_features;
    Matrix contexts;      // baseline contexts (nearest-neighbor)
    Matrix targets;       // baseline primary values (nearest-neighbor)
    Matrix coefficients;  // (1 + contexts) x primary, intercept first (linear)
    RowVector deviation;  // residual deviation, constant in context
  };
  std::optional<Regression> regression;

  std::vector<std::string> warnings;

  GroupStats stats_for(const FeatureSchema& schema, const Observation& row) const;
};

ContextModel fit_contextual(const Dataset& train, const ContextKey& key);

ContextModel fit_contextual_model(const Dataset& baseline,
                                  std::span<const std::size_t> context_features,
                                  ContextRegressor regressor);

Observation apply_contextual(const ContextModel& model, const FeatureSchema& schema,
                             const Observation& row);
Dataset apply_contextual(const ContextModel& model, const Dataset& dataset);

// ---- contextual weighting ---------------------------------------------------

struct WeightVector {
  std::vector<std::size_t> features;  // primary columns
  Vector weight;
  Vector inter;  // mean over context groups of the within-group deviation
  Vector intra;  // mean over non-empty (group, class) cells of the cell deviation
};

WeightVector compute_weights(const Dataset& train, const ContextKey& key);

Observation apply_weights(const WeightVector& weights, const Observation& row);
Dataset apply_weights(const WeightVector& weights, const Dataset& dataset);

// ---- contextual expansion --------------------------------------------------

// Contextual features appended as primary inputs named "<name>:ctx", scaled
// to [0,1]: min-max for continuous (fitted on the fit set), index / (k-1) for
// discrete symbols.
struct ExpansionModel {
  struct Column {
    std::size_t source;
    std::string name;
    bool discrete = false;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t symbols = 0;
  };
  std::vector<Column> columns;
};

ExpansionModel fit_expansion(const Dataset& fit_set, std::span<const std::size_t> selection);
Dataset apply_expansion(const ExpansionModel& model, const Dataset& dataset);
Dataset expand_context(const Dataset& dataset, std::span<const std::size_t> selection);

// ---- pipeline --------------------------------------------------------------

enum class Normalization {
  Off,
  MinMax,
  ZScore,
  Percentile,
  BaselineZScore,
  Contextual,         // group statistics over the context key
  ContextualNearest,  // nearest-neighbor regression on the baseline set
  ContextualLinear,   // least-squares regression on the baseline set
};

std::string to_string(Normalization mode);
Normalization parse_normalization(const std::string& text);

enum class ContextStatistics {
  Fitted,        // test rows use statistics fitted on train
  Transductive,  // test rows use statistics of their own group in the test set
};

struct PipelineConfig {
  Normalization normalize = Normalization::Off;
  bool expand = false;
  bool weight = false;
  std::optional<std::string> context;        // context key feature
  int bins = 0;                              // > 0 for a continuous context key
  std::vector<std::string> expand_features;  // contextual features to expand
  ContextStatistics statistics = ContextStatistics::Fitted;
  bool impute = false;
  std::optional<Dataset> baseline;

  void validate(const FeatureSchema& schema) const;  // throws PreconditionError
};

/// Imputation, encoding, normalization, weighting, expansion, in that order.
/// Expanded columns are appended after weighting and stay unweighted.
std::pair<Dataset, Dataset> run_pipeline(const PipelineConfig& config, const Dataset& train,
                                         const Dataset& test);

}  // namespace ctxclass
