#include <algorithm>
#include <cmath>
#include <limits>

#include "ctxclass/preprocess.hpp"

namespace ctxclass {

namespace {

GroupStats stats_of(const Matrix& x) { return {column_mean(x), column_deviation(x)}; }

Matrix rows_of(const Matrix& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = x.row(rows[r]);
  return out;
}

RowVector context_vector(const FeatureSchema& schema, const Observation& row,
                         const std::vector<std::size_t>& features) {
  RowVector c(static_cast<Index>(features.size()));
  for (std::size_t j = 0; j < features.size(); ++j) {
    const Cell& cell = row[features[j]];
    if (!std::holds_alternative<double>(cell))
      throw PreconditionError("context feature '" + schema[features[j]].name +
                              "' must be a present continuous value");
    c(static_cast<Index>(j)) = std::get<double>(cell);
  }
  return c;
}

Index nearest_row(const Matrix& contexts, const RowVector& query, Index skip = -1) {
  Index best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index r = 0; r < contexts.rows(); ++r) {
    if (r == skip) continue;
    const double d = l1_distance(contexts.row(r), query);
    if (d < best_d) {
      best_d = d;
      best = r;
    }
  }
  return best;
}

}  // namespace

GroupStats ContextModel::stats_for(const FeatureSchema& schema, const Observation& row) const {
  if (regression) {
    const RowVector c = context_vector(schema, row, regression->context_features);
    if (regression->kind == ContextRegressor::Linear) {
      RowVector design(c.size() + 1);
      design << 1.0, c;
      return {design * regression->coefficients, regression->deviation};
    }
    return {regression->targets.row(nearest_row(regression->contexts, c)), regression->deviation};
  }
  if (key) {
    const auto it = groups.find(context_group(*key, schema, row));
    if (it != groups.end()) return it->second;
  }
  return fallback;
}

ContextModel fit_contextual(const Dataset& train, const ContextKey& key) {
  if (train.empty()) throw PreconditionError("fit_contextual: empty fit set");
  const auto& schema = train.schema();
  ContextModel model;
  model.primary = schema.indices_with(FeatureRole::Primary);
  model.key = key;
  const Matrix x = primary_matrix(train);

  std::map<std::string, std::vector<Index>> members;
  for (std::size_t r = 0; r < train.size(); ++r)
    members[context_group(key, schema, train.row(r))].push_back(static_cast<Index>(r));
  if (const auto* b = std::get_if<BinnedContext>(&key)) {
    for (std::size_t k = 0; k <= b->boundaries.size(); ++k)
      if (!members.count("bin" + std::to_string(k)))
        throw PreconditionError("fit_contextual: context bin " + std::to_string(k) + " of '" +
                                schema[b->feature].name + "' is empty");
  }
  for (const auto& [group, rows] : members) model.groups[group] = stats_of(rows_of(x, rows));
  model.fallback = stats_of(x);
  return model;
}

ContextModel fit_contextual_model(const Dataset& baseline,
                                  std::span<const std::size_t> context_features,
                                  ContextRegressor regressor) {
  if (baseline.empty()) throw PreconditionError("fit_contextual_model: empty baseline set");
  if (context_features.empty())
    throw PreconditionError("fit_contextual_model: no context features");
  const auto& schema = baseline.schema();
  ContextModel model;
  model.primary = schema.indices_with(FeatureRole::Primary);
  const Matrix y = primary_matrix(baseline);
  model.fallback = stats_of(y);

  ContextModel::Regression reg;
  reg.kind = regressor;
  reg.context_features.assign(context_features.begin(), context_features.end());
  for (auto c : reg.context_features)
    if (c >= schema.size() || schema[c].role != FeatureRole::Contextual ||
        schema[c].kind != FeatureKind::Continuous)
      throw PreconditionError("fit_contextual_model: context features must be continuous contextual features");
  Matrix ctx(static_cast<Index>(baseline.size()), static_cast<Index>(reg.context_features.size()));
  for (std::size_t r = 0; r < baseline.size(); ++r)
    ctx.row(static_cast<Index>(r)) = context_vector(schema, baseline.row(r), reg.context_features);

  if (regressor == ContextRegressor::Linear) {
    Matrix design(ctx.rows(), ctx.cols() + 1);
    design << Matrix::Ones(ctx.rows(), 1), ctx;
    const Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (design.rows() < design.cols() || qr.rank() < design.cols()) {
      model.warnings.push_back(
          "degenerate context design on the baseline set; using global baseline statistics");
      return model;
    }
    reg.coefficients = qr.solve(y);
    reg.deviation = column_deviation(y - design * reg.coefficients);
  } else {
    reg.contexts = ctx;
    reg.targets = y;
    if (ctx.rows() < 2) {
      reg.deviation = RowVector::Zero(y.cols());
    } else {
      Matrix residual(y.rows(), y.cols());
      for (Index r = 0; r < ctx.rows(); ++r)
        residual.row(r) = y.row(r) - y.row(nearest_row(ctx, ctx.row(r), r));
      reg.deviation = column_deviation(residual);
    }
  }
  model.regression = std::move(reg);
  return model;
}

Observation apply_contextual(const ContextModel& model, const FeatureSchema& schema,
                             const Observation& row) {
  const GroupStats s = model.stats_for(schema, row);
  Observation out = row;
  for (std::size_t j = 0; j < model.primary.size(); ++j) {
    const std::size_t c = model.primary[j];
    if (!std::holds_alternative<double>(row[c]))
      throw PreconditionError("apply_contextual: feature '" + schema[c].name +
                              "' must be a present continuous value");
    const auto i = static_cast<Index>(j);
    out[c] = (std::get<double>(row[c]) - s.mean(i)) / floored(s.deviation(i));
  }
  return out;
}

Dataset apply_contextual(const ContextModel& model, const Dataset& dataset) {
  std::vector<Observation> rows;
  rows.reserve(dataset.size());
  for (const auto& row : dataset.rows()) rows.push_back(apply_contextual(model, dataset.schema(), row));
  return Dataset(dataset.schema(), std::move(rows));
}

WeightVector compute_weights(const Dataset& train, const ContextKey& key) {
  if (train.empty()) throw PreconditionError("compute_weights: no labeled rows");
  const auto& schema = train.schema();
  const Matrix x = primary_matrix(train);

  std::map<std::string, std::vector<Index>> groups;
  std::map<std::pair<std::string, int>, std::vector<Index>> cells;
  for (std::size_t r = 0; r < train.size(); ++r) {
    const auto g = context_group(key, schema, train.row(r));
    groups[g].push_back(static_cast<Index>(r));
    cells[{g, train.label(r)}].push_back(static_cast<Index>(r));
  }

  WeightVector w;
  w.features = schema.indices_with(FeatureRole::Primary);
  w.inter = Vector::Zero(x.cols());
  w.intra = Vector::Zero(x.cols());
  for (const auto& [g, rows] : groups) w.inter += column_deviation(rows_of(x, rows)).transpose();
  w.inter /= static_cast<double>(groups.size());
  for (const auto& [gc, rows] : cells) w.intra += column_deviation(rows_of(x, rows)).transpose();
  w.intra /= static_cast<double>(cells.size());
  w.weight = w.inter.array() / w.intra.unaryExpr([](double s) { return floored(s); }).array();
  return w;
}

Observation apply_weights(const WeightVector& weights, const Observation& row) {
  Observation out = row;
  for (std::size_t j = 0; j < weights.features.size(); ++j) {
    const std::size_t c = weights.features[j];
    if (c >= row.size() || !std::holds_alternative<double>(row[c]))
      throw PreconditionError("apply_weights: weighted cells must be present continuous values");
    out[c] = weights.weight(static_cast<Index>(j)) * std::get<double>(row[c]);
  }
  return out;
}

Dataset apply_weights(const WeightVector& weights, const Dataset& dataset) {
  std::vector<Observation> rows;
  rows.reserve(dataset.size());
  for (const auto& row : dataset.rows()) rows.push_back(apply_weights(weights, row));
  return Dataset(dataset.schema(), std::move(rows));
}

}  // namespace ctxclass
