#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ctxclass/classify.hpp"
#include "json.hpp"

namespace ctxclass {

Matrix design_matrix(const Dataset& dataset) {
  const auto& schema = dataset.schema();
  const auto cols = schema.indices_with(FeatureRole::Primary);
  Matrix x(static_cast<Index>(dataset.size()), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (schema[cols[j]].kind != FeatureKind::Continuous)
      throw PreconditionError("classifier input '" + schema[cols[j]].name + "' is not numeric");
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      if (dataset.missing(r, cols[j]))
        throw PreconditionError("classifier input '" + schema[cols[j]].name + "' is MISSING in row " +
                                std::to_string(r));
      x(static_cast<Index>(r), static_cast<Index>(j)) = dataset.value(r, cols[j]);
    }
  }
  return x;
}

std::vector<std::string> design_names(const Dataset& dataset) {
  std::vector<std::string> names;
  for (auto c : dataset.schema().indices_with(FeatureRole::Primary))
    names.push_back(dataset.schema()[c].name);
  return names;
}

// ---- nearest neighbor ------------------------------------------------------

NearestNeighborModel nn_fit(const Matrix& rows, std::vector<int> labels) {
  if (rows.rows() == 0) throw PreconditionError("nn_fit: empty training set");
  if (static_cast<std::size_t>(rows.rows()) != labels.size())
    throw PreconditionError("nn_fit: row and label counts differ");
  return {rows, std::move(labels), {}, {}};
}

NearestNeighborModel nn_fit(const Dataset& train) {
  NearestNeighborModel m = nn_fit(design_matrix(train), train.labels());
  m.features = design_names(train);
  m.classes = train.schema().class_feature().alphabet;
  return m;
}

Index nn_nearest(const NearestNeighborModel& model, const RowVector& query) {
  if (query.size() != model.rows.cols()) throw PreconditionError("nn_predict: query length differs");
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index r = 0; r < model.rows.rows(); ++r) {
    const double d = l1_distance(model.rows.row(r), query);
    if (d < best_d) {
      best_d = d;
      best = r;
    }
  }
  return best;
}

int nn_predict(const NearestNeighborModel& model, const RowVector& query) {
  return model.labels[static_cast<std::size_t>(nn_nearest(model, query))];
}

std::vector<int> nn_predict(const NearestNeighborModel& model, const Matrix& queries) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  for (Index r = 0; r < queries.rows(); ++r) out.push_back(nn_predict(model, RowVector(queries.row(r))));
  return out;
}

// ---- linear discriminant ---------------------------------------------------

namespace {

// Diagonally pivoted LDL^T; returns the positions (into `subset`) whose pivot
// is negligible relative to the leading one.
std::vector<std::size_t> dependent_columns(const Matrix& gram, const std::vector<Index>& subset) {
  const auto p = static_cast<Index>(subset.size());
  Matrix a(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) a(i, j) = gram(subset[i], subset[j]);
  std::vector<std::size_t> order(subset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double lead = 0.0;
  for (Index k = 0; k < p; ++k) {
    Index piv = k;
    for (Index j = k + 1; j < p; ++j)
      if (a(j, j) > a(piv, piv)) piv = j;
    if (k == 0) lead = a(piv, piv);
    if (!(a(piv, piv) > kPivotTolerance * lead) || lead <= 0.0) {
      std::vector<std::size_t> rest(order.begin() + k, order.end());
      std::sort(rest.begin(), rest.end());
      return rest;
    }
    if (piv != k) {
      a.row(k).swap(a.row(piv));
      a.col(k).swap(a.col(piv));
      std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(piv)]);
    }
    const double d = a(k, k);
    for (Index i = k + 1; i < p; ++i) {
      const double l = a(i, k) / d;
      for (Index j = k + 1; j < p; ++j) a(i, j) -= l * a(k, j);
    }
    for (Index i = k + 1; i < p; ++i) a(i, k) = a(k, i) = 0.0;
  }
  return {};
}

struct ScaledProblem {
  RowVector mean;
  RowVector scale;  // column norms after centering; 0 for constant columns
  Matrix gram;      // correlation-scaled Gram of the centered columns
};

struct SubsetFit {
  Vector beta;  // scaled coefficients
  double rss = 0.0;
};

SubsetFit solve_subset(const ScaledProblem& prob, const Vector& xty, double yty,
                       const std::vector<Index>& subset) {
  SubsetFit fit;
  if (subset.empty()) {
    fit.rss = yty;
    return fit;
  }
  const auto p = static_cast<Index>(subset.size());
  Matrix g(p, p);
  Vector b(p);
  for (Index i = 0; i < p; ++i) {
    b(i) = xty(subset[i]);
    for (Index j = 0; j < p; ++j) g(i, j) = prob.gram(subset[i], subset[j]);
  }
  fit.beta = g.ldlt().solve(b);
  fit.rss = std::max(0.0, yty - fit.beta.dot(b));
  return fit;
}

ClassEquation finish(const ScaledProblem& prob, double ymean, const std::vector<Index>& subset,
                     const Vector& beta, std::vector<Index> dropped) {
  ClassEquation eq;
  eq.features = subset;
  eq.coefficients = Vector(static_cast<Index>(subset.size()));
  eq.intercept = ymean;
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const double c = beta(static_cast<Index>(k)) / prob.scale(subset[k]);
    eq.coefficients(static_cast<Index>(k)) = c;
    eq.intercept -= c * prob.mean(subset[k]);
  }
  std::sort(dropped.begin(), dropped.end());
  eq.dropped = std::move(dropped);
  return eq;
}

}  // namespace

Vector LinearDiscriminantModel::scores(const RowVector& query) const {
  if (query.size() != inputs) throw PreconditionError("mlr_predict: query length differs");
  Vector s(static_cast<Index>(equations.size()));
  for (std::size_t j = 0; j < equations.size(); ++j) {
    const auto& eq = equations[j];
    double y = eq.intercept;
    for (std::size_t k = 0; k < eq.features.size(); ++k)
      y += eq.coefficients(static_cast<Index>(k)) * query(eq.features[k]);
    s(static_cast<Index>(j)) = y;
  }
  return s;
}

LinearDiscriminantModel mlr_fit(const Matrix& x, const std::vector<int>& labels,
                                std::size_t n_classes, const SelectionParams& params) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (n == 0) throw PreconditionError("mlr_fit: empty training set");
  if (static_cast<std::size_t>(n) != labels.size())
    throw PreconditionError("mlr_fit: row and label counts differ");
  if (n_classes == 0) throw PreconditionError("mlr_fit: no classes");
  for (int l : labels)
    if (l < 0 || static_cast<std::size_t>(l) >= n_classes)
      throw PreconditionError("mlr_fit: label out of range");

  ScaledProblem prob;
  prob.mean = column_mean(x);
  const Matrix centered = x.rowwise() - prob.mean;
  prob.scale = centered.colwise().norm();
  Matrix z = centered;
  std::vector<Index> usable;
  std::vector<Index> constant;
  for (Index j = 0; j < d; ++j) {
    // relative test so that large offsets with rounding noise count as constant
    const double magnitude = std::max(prob.mean.cwiseAbs()(j) * std::sqrt(double(n)), 1.0);
    if (prob.scale(j) > 1e-12 * magnitude) {
      z.col(j) /= prob.scale(j);
      usable.push_back(j);
    } else {
      z.col(j).setZero();
      constant.push_back(j);
    }
  }
  prob.gram = z.transpose() * z;

  LinearDiscriminantModel model;
  model.inputs = d;
  const std::size_t cap = params.max_features.value_or(static_cast<std::size_t>(d));

  for (std::size_t cls = 0; cls < n_classes; ++cls) {
    Vector y(n);
    for (Index r = 0; r < n; ++r) y(r) = labels[static_cast<std::size_t>(r)] == static_cast<int>(cls) ? 1.0 : 0.0;
    const double ymean = y.mean();
    const Vector yc = y.array() - ymean;
    const Vector xty = z.transpose() * yc;
    const double yty = yc.squaredNorm();

    std::vector<Index> dropped = constant;
    if (!params.enabled) {
      std::vector<Index> subset = usable;
      for (auto pos : dependent_columns(prob.gram, subset)) dropped.push_back(subset[pos]);
      subset.erase(std::remove_if(subset.begin(), subset.end(),
                                  [&](Index f) { return std::find(dropped.begin(), dropped.end(), f) != dropped.end(); }),
                   subset.end());
      const SubsetFit fit = solve_subset(prob, xty, yty, subset);
      model.equations.push_back(finish(prob, ymean, subset, fit.beta, dropped));
      continue;
    }

    std::vector<Index> selected;
    SubsetFit current = solve_subset(prob, xty, yty, selected);
    std::vector<Index> candidates = usable;
    while (!candidates.empty() && selected.size() < cap) {
      const double dof = double(n) - double(selected.size() + 1) - 1.0;
      if (dof <= 0.0) break;
      std::optional<std::size_t> best;
      SubsetFit best_fit;
      for (std::size_t c = 0; c < candidates.size();) {
        std::vector<Index> trial = selected;
        trial.push_back(candidates[c]);
        if (!dependent_columns(prob.gram, trial).empty()) {
          dropped.push_back(candidates[c]);
          candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(c));
          continue;
        }
        SubsetFit fit = solve_subset(prob, xty, yty, trial);
        if (!best || fit.rss < best_fit.rss) {
          best = c;
          best_fit = std::move(fit);
        }
        ++c;
      }
      if (!best) break;
      const double reduction = current.rss - best_fit.rss;
      const double f = best_fit.rss > 0.0 ? reduction / (best_fit.rss / dof)
                                          : (reduction > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (!(f > params.f_enter)) break;
      selected.push_back(candidates[*best]);
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(*best));
      current = std::move(best_fit);
    }
    model.equations.push_back(finish(prob, ymean, selected, current.beta, dropped));
  }
  return model;
}

LinearDiscriminantModel mlr_fit(const Dataset& train, const SelectionParams& params) {
  LinearDiscriminantModel m = mlr_fit(design_matrix(train), train.labels(),
                                      train.schema().class_feature().alphabet.size(), params);
  m.features = design_names(train);
  m.classes = train.schema().class_feature().alphabet;
  return m;
}

int mlr_predict(const LinearDiscriminantModel& model, const RowVector& query) {
  const Vector s = model.scores(query);
  Index best = 0;
  for (Index j = 1; j < s.size(); ++j)
    if (s(j) > s(best)) best = j;
  return static_cast<int>(best);
}

std::vector<int> mlr_predict(const LinearDiscriminantModel& model, const Matrix& queries) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  for (Index r = 0; r < queries.rows(); ++r) out.push_back(mlr_predict(model, RowVector(queries.row(r))));
  return out;
}

// ---- common entry point ------------------------------------------------------

std::string to_string(ClassifierKind kind) {
  return kind == ClassifierKind::NearestNeighbor ? "nn" : "mlr";
}

ClassifierKind parse_classifier(const std::string& text) {
  if (text == "nn" || text == "nearest-neighbor") return ClassifierKind::NearestNeighbor;
  if (text == "mlr" || text == "linear-discriminant") return ClassifierKind::LinearDiscriminant;
  throw PreconditionError("unknown classifier '" + text + "'");
}

std::vector<int> fit_predict(ClassifierKind kind, const Dataset& train, const Dataset& test,
                             const SelectionParams& params) {
  const Matrix queries = design_matrix(test);
  if (kind == ClassifierKind::NearestNeighbor) return nn_predict(nn_fit(train), queries);
  return mlr_predict(mlr_fit(train, params), queries);
}

// ---- inspection ----------------------------------------------------------------

std::string format_model_json(const NearestNeighborModel& model) {
  nlohmann::ordered_json j;
  j["kind"] = "nearest-neighbor";
  j["features"] = model.features;
  j["classes"] = model.classes;
  std::vector<Index> rows(static_cast<std::size_t>(model.rows.rows()));
  std::iota(rows.begin(), rows.end(), Index{0});
  j["rows"] = rows;
  j["labels"] = model.labels;
  return j.dump(2) + "\n";
}

std::string format_model_json(const LinearDiscriminantModel& model) {
  nlohmann::ordered_json j;
  j["kind"] = "linear-discriminant";
  j["inputs"] = model.inputs;
  j["features"] = model.features;
  j["classes"] = model.classes;
  auto eqs = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < model.equations.size(); ++c) {
    const auto& eq = model.equations[c];
    nlohmann::ordered_json e;
    e["class"] = c < model.classes.size() ? nlohmann::ordered_json(model.classes[c])
                                          : nlohmann::ordered_json(c);
    e["intercept"] = eq.intercept;
    auto terms = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < eq.features.size(); ++k)
      terms.push_back({{"feature", eq.features[k]},
                       {"coefficient", eq.coefficients(static_cast<Index>(k))}});
    e["terms"] = terms;
    e["dropped"] = eq.dropped;
    eqs.push_back(e);
  }
  j["equations"] = eqs;
  return j.dump(2) + "\n";
}

}  // namespace ctxclass
