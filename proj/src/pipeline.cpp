#include "ctxclass/preprocess.hpp"

namespace ctxclass {

namespace {

constexpr std::pair<Normalization, const char*> kNormalizationNames[] = {
    {Normalization::Off, "off"},
    {Normalization::MinMax, "minmax"},
    {Normalization::ZScore, "zscore"},
    {Normalization::Percentile, "percentile"},
    {Normalization::BaselineZScore, "baseline"},
    {Normalization::Contextual, "contextual"},
    {Normalization::ContextualNearest, "contextual-nn"},
    {Normalization::ContextualLinear, "contextual-linear"},
};

bool needs_baseline(Normalization n) {
  return n == Normalization::BaselineZScore || n == Normalization::ContextualNearest ||
         n == Normalization::ContextualLinear;
}

std::vector<std::size_t> continuous_contexts(const FeatureSchema& schema) {
  std::vector<std::size_t> out;
  for (auto c : schema.indices_with(FeatureRole::Contextual))
    if (schema[c].kind == FeatureKind::Continuous) out.push_back(c);
  return out;
}

template <typename Scaler>
Dataset scaled(const Scaler& scaler, const Dataset& d) {
  return with_primary(d, scaler(primary_matrix(d)));
}

}  // namespace

std::string to_string(Normalization mode) {
  for (const auto& [m, name] : kNormalizationNames)
    if (m == mode) return name;
  return "?";
}

Normalization parse_normalization(const std::string& text) {
  for (const auto& [m, name] : kNormalizationNames)
    if (text == name) return m;
  throw PreconditionError("unknown normalization '" + text + "'");
}

void PipelineConfig::validate(const FeatureSchema& schema) const {
  const bool contextual = normalize == Normalization::Contextual;
  if ((contextual || weight) && !context)
    throw PreconditionError("contextual normalization and weighting need a context feature");
  if (context) {
    const std::size_t c = schema.require(*context);
    if (schema[c].role != FeatureRole::Contextual)
      throw PreconditionError("context feature '" + *context + "' is not contextual");
    if (schema[c].kind == FeatureKind::Continuous && bins < 2)
      throw PreconditionError("continuous context '" + *context + "' needs bins >= 2");
  }
  for (const auto& name : expand_features) {
    const std::size_t c = schema.require(name);
    if (schema[c].role != FeatureRole::Contextual)
      throw PreconditionError("cannot expand '" + name + "': not a contextual feature");
  }
  if (expand && expand_features.empty())
    throw PreconditionError("expansion enabled but no contextual feature selected");
  if (needs_baseline(normalize)) {
    if (!baseline) throw PreconditionError(to_string(normalize) + " normalization needs a baseline set");
    if (!(baseline->schema() == schema))
      throw PreconditionError("baseline schema differs from the training schema");
    if (baseline->empty()) throw PreconditionError("baseline set is empty");
  }
  if ((normalize == Normalization::ContextualNearest ||
       normalize == Normalization::ContextualLinear) &&
      continuous_contexts(schema).empty())
    throw PreconditionError("model-based contextual normalization needs a continuous contextual feature");
}

std::pair<Dataset, Dataset> run_pipeline(const PipelineConfig& config, const Dataset& train,
                                         const Dataset& test) {
  if (!(train.schema() == test.schema()))
    throw PreconditionError("train and test schemas differ");
  config.validate(train.schema());

  Dataset tr = train;
  Dataset te = test;
  std::optional<Dataset> base = config.baseline;
  if (config.impute) {
    te = impute_missing(train, test);
    tr = impute_missing(train, train);
    if (base) base = impute_missing(*base, *base);
  }
  tr = encode_primary(tr);
  te = encode_primary(te);
  if (base) base = encode_primary(*base);

  std::optional<ContextKey> key;
  if (config.context) key = resolve_context(tr, *config.context, config.bins);

  switch (config.normalize) {
    case Normalization::Off:
      break;
    case Normalization::MinMax: {
      const auto s = fit_minmax(primary_matrix(tr));
      tr = scaled(s, tr);
      te = scaled(s, te);
      break;
    }
    case Normalization::ZScore: {
      const auto s = fit_zscore(primary_matrix(tr));
      tr = scaled(s, tr);
      te = scaled(s, te);
      break;
    }
    case Normalization::Percentile: {
      const auto s = fit_percentile(primary_matrix(tr));
      tr = scaled(s, tr);
      te = scaled(s, te);
      break;
    }
    case Normalization::BaselineZScore: {
      const auto s = fit_zscore(primary_matrix(*base));
      tr = scaled(s, tr);
      te = scaled(s, te);
      break;
    }
    case Normalization::Contextual: {
      const ContextModel fitted = fit_contextual(tr, *key);
      const ContextModel test_model =
          config.statistics == ContextStatistics::Transductive ? fit_contextual(te, *key) : fitted;
      tr = apply_contextual(fitted, tr);
      te = apply_contextual(test_model, te);
      break;
    }
    case Normalization::ContextualNearest:
    case Normalization::ContextualLinear: {
      const auto features = continuous_contexts(tr.schema());
      const ContextModel m = fit_contextual_model(
          *base, features,
          config.normalize == Normalization::ContextualLinear ? ContextRegressor::Linear
                                                              : ContextRegressor::NearestNeighbor);
      tr = apply_contextual(m, tr);
      te = apply_contextual(m, te);
      break;
    }
  }

  if (config.weight) {
    const WeightVector w = compute_weights(tr, *key);
    tr = apply_weights(w, tr);
    te = apply_weights(w, te);
  }

  if (config.expand) {
    std::vector<std::size_t> selection;
    for (const auto& name : config.expand_features) selection.push_back(tr.schema().require(name));
    const ExpansionModel e = fit_expansion(tr, selection);
    tr = apply_expansion(e, tr);
    te = apply_expansion(e, te);
  }
  return {std::move(tr), std::move(te)};
}

}  // namespace ctxclass
