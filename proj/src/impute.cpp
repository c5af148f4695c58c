#include <algorithm>
#include <numeric>

#include "ctxclass/preprocess.hpp"

namespace ctxclass {

Dataset encode_primary(const Dataset& dataset) {
  const auto& schema = dataset.schema();
  std::vector<FeatureSpec> specs = schema.features();
  std::vector<std::size_t> encoded;
  for (std::size_t c = 0; c < specs.size(); ++c) {
    if (specs[c].role == FeatureRole::Primary && specs[c].kind == FeatureKind::Discrete) {
      specs[c].kind = FeatureKind::Continuous;
      specs[c].alphabet.clear();
      encoded.push_back(c);
    }
  }
  if (encoded.empty()) return dataset;
  std::vector<Observation> rows = dataset.rows();
  for (auto& row : rows)
    for (auto c : encoded)
      if (const auto* s = std::get_if<std::string>(&row[c]))
        row[c] = static_cast<double>(*schema[c].symbol_index(*s));
  return Dataset(FeatureSchema(std::move(specs)), std::move(rows));
}

Matrix primary_matrix(const Dataset& dataset) {
  const auto cols = dataset.schema().indices_with(FeatureRole::Primary);
  Matrix x(static_cast<Index>(dataset.size()), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (dataset.schema()[cols[j]].kind != FeatureKind::Continuous)
      throw PreconditionError("primary feature '" + dataset.schema()[cols[j]].name +
                              "' is discrete; encode it first");
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      if (dataset.missing(r, cols[j]))
        throw PreconditionError("MISSING cell in row " + std::to_string(r) + ", feature '" +
                                dataset.schema()[cols[j]].name + "'; impute first");
      x(static_cast<Index>(r), static_cast<Index>(j)) = dataset.value(r, cols[j]);
    }
  }
  return x;
}

Dataset with_primary(const Dataset& dataset, const Matrix& values) {
  const auto cols = dataset.schema().indices_with(FeatureRole::Primary);
  if (values.rows() != static_cast<Index>(dataset.size()) ||
      values.cols() != static_cast<Index>(cols.size()))
    throw PreconditionError("with_primary: shape mismatch");
  std::vector<FeatureSpec> specs = dataset.schema().features();
  for (auto c : cols) {
    specs[c].kind = FeatureKind::Continuous;
    specs[c].alphabet.clear();
  }
  std::vector<Observation> rows = dataset.rows();
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < cols.size(); ++j)
      rows[r][cols[j]] = values(static_cast<Index>(r), static_cast<Index>(j));
  return Dataset(FeatureSchema(std::move(specs)), std::move(rows));
}

namespace {

struct ColumnScale {
  std::size_t column;
  bool discrete;
  double lo = 0.0;
  double hi = 0.0;

  double scaled(double x) const { return hi > lo ? (x - lo) / (hi - lo) : 0.5; }
};

}  // namespace

Dataset impute_missing(const Dataset& train, const Dataset& target) {
  if (!(train.schema() == target.schema()))
    throw PreconditionError("impute_missing: train and target schemas differ");
  const auto& schema = train.schema();

  std::vector<ColumnScale> scales;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c == schema.class_index()) continue;
    ColumnScale s{c, schema[c].kind == FeatureKind::Discrete};
    bool seen = false;
    for (std::size_t r = 0; r < train.size(); ++r) {
      if (train.missing(r, c)) continue;
      if (!s.discrete) {
        const double v = train.value(r, c);
        s.lo = seen ? std::min(s.lo, v) : v;
        s.hi = seen ? std::max(s.hi, v) : v;
      }
      seen = true;
    }
    if (!seen)
      throw PreconditionError("impute_missing: feature '" + schema[c].name +
                              "' is entirely MISSING in train");
    scales.push_back(s);
  }

  auto similarity_between = [&](const Observation& a, const Observation& b) {
    double total = 0.0;
    for (const auto& s : scales) {
      if (is_missing(a[s.column]) || is_missing(b[s.column])) continue;
      if (s.discrete) {
        total += std::get<std::string>(a[s.column]) == std::get<std::string>(b[s.column]) ? 1.0 : 0.0;
      } else {
        total += 1.0 - std::abs(s.scaled(std::get<double>(a[s.column])) -
                                s.scaled(std::get<double>(b[s.column])));
      }
    }
    return total;
  };

  std::vector<Observation> rows = target.rows();
  std::vector<std::size_t> order(train.size());
  std::vector<double> sim(train.size());
  for (auto& row : rows) {
    const bool any_missing = std::any_of(scales.begin(), scales.end(),
                                         [&](const ColumnScale& s) { return is_missing(row[s.column]); });
    if (!any_missing) continue;
    for (std::size_t t = 0; t < train.size(); ++t) sim[t] = similarity_between(row, train.row(t));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });
    for (const auto& s : scales) {
      if (!is_missing(row[s.column])) continue;
      for (auto t : order) {
        if (!train.missing(t, s.column)) {
          row[s.column] = train.cell(t, s.column);
          break;
        }
      }
    }
  }
  return Dataset(schema, std::move(rows));
}

}  // namespace ctxclass
