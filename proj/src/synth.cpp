#include "ctxclass/dataset.hpp"
#include "ctxclass/rng.hpp"

namespace ctxclass {

void PlantParams::validate() const {
  if (classes < 2) throw PreconditionError("plant: need at least 2 classes");
  if (features < 1) throw PreconditionError("plant: need at least 1 primary feature");
  if (contexts < 1) throw PreconditionError("plant: need at least 1 contextual feature");
  if (!(shift >= 0.0)) throw PreconditionError("plant: shift must be >= 0");
  if (!(noise >= 0.0)) throw PreconditionError("plant: noise must be >= 0");
  if (n_train == 0 || n_test == 0) throw PreconditionError("plant: empty train or test set");
  if (n_baseline < 2) throw PreconditionError("plant: baseline needs at least 2 rows");
  if (!(train_context_lo < train_context_hi) || !(test_context_lo < test_context_hi))
    throw PreconditionError("plant: empty context range");
  if (!(train_context_hi <= test_context_lo || test_context_hi <= train_context_lo))
    throw PreconditionError("plant: train and test context ranges overlap");
}

// Feature i of a row with class k and context c is
//   mean[k][i] + shift * sum_j coef[i][j] * c_j + noise * N(0, 1)
// so the context moves every primary feature along a fixed direction.
PlantedContext plant_context_dataset(const PlantParams& params, std::uint64_t seed) {
  params.validate();
  const Index k_classes = params.classes;
  const Index d = params.features;
  const Index c_count = params.contexts;

  std::vector<FeatureSpec> specs;
  for (Index j = 0; j < c_count; ++j)
    specs.push_back({"c" + std::to_string(j + 1), FeatureRole::Contextual, FeatureKind::Continuous, {}});
  for (Index i = 0; i < d; ++i)
    specs.push_back({"f" + std::to_string(i + 1), FeatureRole::Primary, FeatureKind::Continuous, {}});
  std::vector<std::string> classes{"healthy"};
  for (Index k = 1; k < k_classes; ++k) classes.push_back("fault" + std::to_string(k));
  specs.push_back({"condition", FeatureRole::Class, FeatureKind::Discrete, classes});
  const FeatureSchema schema(std::move(specs));

  Rng rng(seed);
  Matrix means(k_classes, d);
  for (Index k = 0; k < k_classes; ++k)
    for (Index i = 0; i < d; ++i) means(k, i) = rng.uniform(-1.0, 1.0);
  Matrix coef(d, c_count);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < c_count; ++j) {
      const double magnitude = rng.uniform(0.5, 1.5);
      coef(i, j) = rng.below(2) ? magnitude : -magnitude;
    }

  auto draw = [&](std::size_t n, double lo, double hi, bool healthy_only) {
    std::vector<Observation> rows;
    rows.reserve(n);
    Vector context(c_count);
    for (std::size_t r = 0; r < n; ++r) {
      for (Index j = 0; j < c_count; ++j) context(j) = rng.uniform(lo, hi);
      const Index k = healthy_only ? 0 : static_cast<Index>(rng.below(static_cast<std::uint64_t>(k_classes)));
      const Vector offset = params.shift * (coef * context);
      Observation o;
      for (Index j = 0; j < c_count; ++j) o.emplace_back(context(j));
      for (Index i = 0; i < d; ++i) o.emplace_back(means(k, i) + offset(i) + params.noise * rng.normal());
      o.emplace_back(classes[static_cast<std::size_t>(k)]);
      rows.push_back(std::move(o));
    }
    return Dataset(schema, std::move(rows));
  };

  PlantedContext out;
  out.train = draw(params.n_train, params.train_context_lo, params.train_context_hi, false);
  out.test = draw(params.n_test, params.test_context_lo, params.test_context_hi, false);
  out.baseline = draw(params.n_baseline, std::min(params.train_context_lo, params.test_context_lo),
                      std::max(params.train_context_hi, params.test_context_hi), true);
  return out;
}

}  // namespace ctxclass
