#include <algorithm>
#include <cmath>

#include "ctxclass/preprocess.hpp"

namespace ctxclass {

BinnedContext make_binned_context(std::size_t feature, std::vector<double> boundaries) {
  if (boundaries.empty()) throw PreconditionError("binned context needs at least 2 bins");
  for (std::size_t b = 1; b < boundaries.size(); ++b)
    if (!(boundaries[b - 1] < boundaries[b]))
      throw PreconditionError("bin boundaries must be strictly increasing");
  return {feature, std::move(boundaries)};
}

std::vector<double> equal_freq_bins(std::span<const double> values, int k) {
  if (values.empty()) throw PreconditionError("equal_freq_bins: no values");
  if (k < 2) throw PreconditionError("equal_freq_bins: need k >= 2");
  std::vector<double> s(values.begin(), values.end());
  for (double v : s)
    if (std::isnan(v)) throw PreconditionError("equal_freq_bins: NaN value");
  std::sort(s.begin(), s.end());

  // gap g separates s[g-1] and s[g]
  std::vector<std::size_t> gaps;
  for (std::size_t g = 1; g < s.size(); ++g)
    if (s[g - 1] < s[g]) gaps.push_back(g);
  const auto cuts = static_cast<std::size_t>(k - 1);
  if (gaps.size() < cuts)
    throw PreconditionError("equal_freq_bins: " + std::to_string(gaps.size() + 1) +
                            " distinct values, fewer than " + std::to_string(k) + " bins");

  std::vector<double> boundaries;
  std::size_t first = 0;  // first admissible gap for the next cut
  const double n = static_cast<double>(s.size());
  for (std::size_t j = 1; j <= cuts; ++j) {
    const double target = static_cast<double>(j) * n / k;
    const std::size_t last = gaps.size() - (cuts - j);  // exclusive
    std::size_t best = first;
    for (std::size_t g = first; g < last; ++g)
      if (std::abs(static_cast<double>(gaps[g]) - target) <
          std::abs(static_cast<double>(gaps[best]) - target))
        best = g;
    boundaries.push_back(0.5 * (s[gaps[best] - 1] + s[gaps[best]]));
    first = best + 1;
  }
  return boundaries;
}

int bin_of(std::span<const double> boundaries, double value) {
  return static_cast<int>(std::upper_bound(boundaries.begin(), boundaries.end(), value) -
                          boundaries.begin());
}

std::size_t context_feature(const ContextKey& key) {
  return std::visit([](const auto& k) { return k.feature; }, key);
}

std::string context_group(const ContextKey& key, const FeatureSchema& schema,
                          const Observation& row) {
  const std::size_t c = context_feature(key);
  if (is_missing(row[c]))
    throw PreconditionError("context feature '" + schema[c].name + "' is MISSING");
  if (std::holds_alternative<DiscreteContext>(key)) return std::get<std::string>(row[c]);
  const auto& b = std::get<BinnedContext>(key);
  return "bin" + std::to_string(bin_of(b.boundaries, std::get<double>(row[c])));
}

ContextKey resolve_context(const Dataset& fit_set, const std::string& feature, int bins) {
  const auto& schema = fit_set.schema();
  const std::size_t c = schema.require(feature);
  if (schema[c].role == FeatureRole::Class)
    throw PreconditionError("the class cannot serve as context");
  if (schema[c].kind == FeatureKind::Discrete) return DiscreteContext{c};
  if (bins < 2)
    throw PreconditionError("continuous context '" + feature + "' needs --bins >= 2");
  std::vector<double> values;
  for (std::size_t r = 0; r < fit_set.size(); ++r)
    if (!fit_set.missing(r, c)) values.push_back(fit_set.value(r, c));
  return make_binned_context(c, equal_freq_bins(values, bins));
}

Dataset discretize(const Dataset& dataset, int bins) {
  const auto& schema = dataset.schema();
  std::vector<FeatureSpec> specs = schema.features();
  std::vector<std::pair<std::size_t, std::vector<double>>> cuts;
  for (std::size_t c = 0; c < specs.size(); ++c) {
    if (specs[c].kind != FeatureKind::Continuous) continue;
    auto boundaries = equal_freq_bins(dataset.column_values(c), bins);
    specs[c].kind = FeatureKind::Discrete;
    specs[c].alphabet.clear();
    for (std::size_t k = 0; k <= boundaries.size(); ++k) specs[c].alphabet.push_back("bin" + std::to_string(k));
    cuts.emplace_back(c, std::move(boundaries));
  }
  std::vector<Observation> rows = dataset.rows();
  for (auto& row : rows)
    for (const auto& [c, b] : cuts)
      if (!is_missing(row[c])) row[c] = "bin" + std::to_string(bin_of(b, std::get<double>(row[c])));
  return Dataset(FeatureSchema(std::move(specs)), std::move(rows));
}

ExpansionModel fit_expansion(const Dataset& fit_set, std::span<const std::size_t> selection) {
  const auto& schema = fit_set.schema();
  ExpansionModel model;
  for (auto c : selection) {
    if (c >= schema.size()) throw PreconditionError("expansion: feature index out of range");
    if (schema[c].role != FeatureRole::Contextual)
      throw PreconditionError("expansion: '" + schema[c].name + "' is not contextual");
    ExpansionModel::Column col{c, schema[c].name + ":ctx"};
    if (schema[c].kind == FeatureKind::Discrete) {
      col.discrete = true;
      col.symbols = schema[c].alphabet.size();
    } else {
      bool seen = false;
      for (std::size_t r = 0; r < fit_set.size(); ++r) {
        if (fit_set.missing(r, c)) continue;
        const double v = fit_set.value(r, c);
        col.lo = seen ? std::min(col.lo, v) : v;
        col.hi = seen ? std::max(col.hi, v) : v;
        seen = true;
      }
      if (!seen) throw PreconditionError("expansion: '" + schema[c].name + "' has no values");
    }
    model.columns.push_back(std::move(col));
  }
  return model;
}

Dataset apply_expansion(const ExpansionModel& model, const Dataset& dataset) {
  if (model.columns.empty()) return dataset;
  const auto& schema = dataset.schema();
  std::vector<FeatureSpec> specs = schema.features();
  for (const auto& col : model.columns)
    specs.push_back({col.name, FeatureRole::Primary, FeatureKind::Continuous, {}});
  std::vector<Observation> rows = dataset.rows();
  for (auto& row : rows) {
    for (const auto& col : model.columns) {
      const Cell& cell = row[col.source];
      if (is_missing(cell)) {
        row.push_back(Missing{});
      } else if (col.discrete) {
        const auto idx = *schema[col.source].symbol_index(std::get<std::string>(cell));
        row.push_back(col.symbols > 1 ? static_cast<double>(idx) / static_cast<double>(col.symbols - 1)
                                      : 0.5);
      } else {
        const double v = std::get<double>(cell);
        row.push_back(col.hi > col.lo ? (v - col.lo) / (col.hi - col.lo) : 0.5);
      }
    }
  }
  return Dataset(FeatureSchema(std::move(specs)), std::move(rows));
}

Dataset expand_context(const Dataset& dataset, std::span<const std::size_t> selection) {
  return apply_expansion(fit_expansion(dataset, selection), dataset);
}

}  // namespace ctxclass
