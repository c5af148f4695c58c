#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "ctxclass/taxonomy.hpp"
#include "json.hpp"

namespace ctxclass {

JointDistribution JointDistribution::from_spec(const JointSpec& spec) {
  spec.validate();
  JointDistribution d;
  d.names_ = spec.names;
  d.alphabets_ = spec.alphabets;
  d.class_variable_ = spec.class_variable;
  for (const auto& [tuple, p] : spec.entries)
    if (p > 0.0) d.table_[tuple] += p;
  return d;
}

std::size_t JointDistribution::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw PreconditionError("unknown variable '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

int JointDistribution::value_index(std::size_t variable, const std::string& value) const {
  const auto& a = alphabets_.at(variable);
  const auto it = std::find(a.begin(), a.end(), value);
  if (it == a.end())
    throw PreconditionError("value '" + value + "' not in alphabet of " + names_[variable]);
  return static_cast<int>(it - a.begin());
}

std::vector<std::size_t> JointDistribution::features() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < names_.size(); ++v)
    if (v != class_variable_) out.push_back(v);
  return out;
}

JointDistribution estimate_distribution(const Dataset& dataset) {
  if (dataset.empty()) throw PreconditionError("estimate_distribution: empty dataset");
  const auto& schema = dataset.schema();
  for (std::size_t c = 0; c < schema.size(); ++c)
    if (schema[c].kind != FeatureKind::Discrete)
      throw PreconditionError("estimate_distribution: feature '" + schema[c].name +
                              "' is continuous; bin it first (equal_freq_bins)");

  JointDistribution d;
  for (const auto& f : schema.features()) {
    d.names_.push_back(f.name);
    d.alphabets_.push_back(f.alphabet);
  }
  d.class_variable_ = schema.class_index();
  const double unit = 1.0 / static_cast<double>(dataset.size());
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    JointDistribution::Tuple t(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (dataset.missing(r, c))
        throw PreconditionError("estimate_distribution: MISSING cell in row " + std::to_string(r));
      t[c] = *schema[c].symbol_index(dataset.symbol(r, c));
    }
    d.table_[t] += unit;
  }
  return d;
}

namespace {

void check_condition(const JointDistribution& dist, const Condition& c) {
  if (c.variable >= dist.variable_count()) throw PreconditionError("condition: unknown variable");
  if (c.value < 0 || c.value >= static_cast<int>(dist.alphabets()[c.variable].size()))
    throw PreconditionError("condition: value out of range for " + dist.names()[c.variable]);
}

void check_feature(const JointDistribution& dist, std::size_t i) {
  if (i >= dist.variable_count()) throw PreconditionError("feature index out of range");
  if (i == dist.class_variable()) throw PreconditionError("feature index refers to the class");
}

bool matches(const JointDistribution::Tuple& t, std::span<const Condition> given) {
  return std::all_of(given.begin(), given.end(),
                     [&](const Condition& c) { return t[c.variable] == c.value; });
}

// Key of a tuple restricted to `keep` variables.
JointDistribution::Tuple project(const JointDistribution::Tuple& t,
                                 const std::vector<std::size_t>& keep) {
  JointDistribution::Tuple out;
  out.reserve(keep.size());
  for (auto v : keep) out.push_back(t[v]);
  return out;
}

// Map from the projection onto `keep` to the unnormalized class distribution.
std::map<JointDistribution::Tuple, std::vector<double>> class_profile(
    const JointDistribution& dist, const std::vector<std::size_t>& keep) {
  const auto k = dist.alphabets()[dist.class_variable()].size();
  std::map<JointDistribution::Tuple, std::vector<double>> out;
  for (const auto& [t, p] : dist.table()) {
    auto& row = out.try_emplace(project(t, keep), k, 0.0).first->second;
    row[static_cast<std::size_t>(t[dist.class_variable()])] += p;
  }
  return out;
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

std::optional<double> cond_prob(const JointDistribution& dist, const Condition& event,
                                std::span<const Condition> given) {
  check_condition(dist, event);
  for (const auto& c : given) check_condition(dist, c);
  double joint = 0.0, marginal = 0.0;
  for (const auto& [t, p] : dist.table()) {
    if (!matches(t, given)) continue;
    marginal += p;
    if (t[event.variable] == event.value) joint += p;
  }
  if (marginal <= 0.0) return std::nullopt;
  return joint / marginal;
}

std::optional<double> cond_prob(const JointDistribution& dist,
                                const std::pair<std::string, std::string>& event,
                                const std::vector<std::pair<std::string, std::string>>& given) {
  auto to_condition = [&](const std::pair<std::string, std::string>& nv) {
    const auto v = dist.index_of(nv.first);
    return Condition{v, dist.value_index(v, nv.second)};
  };
  std::vector<Condition> conds;
  for (const auto& g : given) conds.push_back(to_condition(g));
  return cond_prob(dist, to_condition(event), conds);
}

std::optional<Witness> primary_witness(const JointDistribution& dist, std::size_t i, double eps) {
  check_feature(dist, i);
  const auto prior = class_profile(dist, {}).begin()->second;
  for (const auto& [key, counts] : class_profile(dist, {i})) {
    const double mass = total(counts);
    if (mass <= 0.0) continue;
    for (std::size_t a0 = 0; a0 < counts.size(); ++a0) {
      const double conditional = counts[a0] / mass;
      if (std::abs(conditional - prior[a0]) > eps)
        return Witness{{{i, key[0]}}, static_cast<int>(a0), conditional, prior[a0]};
    }
  }
  return std::nullopt;
}

std::optional<Witness> contextual_witness(const JointDistribution& dist, std::size_t i,
                                          double eps) {
  check_feature(dist, i);
  if (primary_witness(dist, i, eps)) return std::nullopt;
  const auto all = dist.features();
  std::vector<std::size_t> others;
  std::copy_if(all.begin(), all.end(), std::back_inserter(others),
               [&](std::size_t v) { return v != i; });
  const auto full = class_profile(dist, all);
  const auto reduced = class_profile(dist, others);
  const auto slot = static_cast<std::size_t>(std::find(all.begin(), all.end(), i) - all.begin());

  for (const auto& [key, counts] : full) {
    const double mass = total(counts);
    if (mass <= 0.0) continue;
    auto reduced_key = key;
    reduced_key.erase(reduced_key.begin() + static_cast<long>(slot));
    const auto& rcounts = reduced.at(reduced_key);
    const double rmass = total(rcounts);
    for (std::size_t a0 = 0; a0 < counts.size(); ++a0) {
      const double with = counts[a0] / mass;
      const double without = rcounts[a0] / rmass;
      if (std::abs(with - without) > eps) {
        Witness w;
        for (std::size_t s = 0; s < all.size(); ++s) w.assignment.push_back({all[s], key[s]});
        w.class_value = static_cast<int>(a0);
        w.conditional = with;
        w.reference = without;
        return w;
      }
    }
  }
  return std::nullopt;
}

std::optional<Witness> sensitivity_witness(const JointDistribution& dist, std::size_t i,
                                           std::size_t j, double eps) {
  check_feature(dist, i);
  check_feature(dist, j);
  if (i == j) throw PreconditionError("is_context_sensitive: i and j must differ");
  // primary at all is enough; eps only thresholds the comparison below
  if (!primary_witness(dist, i, kExactEps))
    throw PreconditionError("is_context_sensitive: " + dist.names()[i] + " is not primary");
  const auto single = class_profile(dist, {i});
  for (const auto& [key, counts] : class_profile(dist, {i, j})) {
    const double mass = total(counts);
    if (mass <= 0.0) continue;
    const auto& base = single.at({key[0]});
    const double base_mass = total(base);
    for (std::size_t a0 = 0; a0 < counts.size(); ++a0) {
      const double with = counts[a0] / mass;
      const double without = base[a0] / base_mass;
      if (std::abs(with - without) > eps)
        return Witness{{{i, key[0]}, {j, key[1]}}, static_cast<int>(a0), with, without};
    }
  }
  return std::nullopt;
}

bool is_primary(const JointDistribution& dist, std::size_t i, double eps) {
  return primary_witness(dist, i, eps).has_value();
}

bool is_contextual(const JointDistribution& dist, std::size_t i, double eps) {
  return contextual_witness(dist, i, eps).has_value();
}

bool is_context_sensitive(const JointDistribution& dist, std::size_t i, std::size_t j,
                          double eps) {
  return sensitivity_witness(dist, i, j, eps).has_value();
}

std::string to_string(FeatureLabel label) {
  switch (label) {
    case FeatureLabel::Primary: return "primary";
    case FeatureLabel::Contextual: return "contextual";
    case FeatureLabel::Irrelevant: return "irrelevant";
  }
  return "?";
}

const FeatureVerdictEntry& FeatureVerdict::of(std::size_t variable) const {
  for (const auto& e : entries)
    if (e.variable == variable) return e;
  throw PreconditionError("verdict: no entry for variable " + std::to_string(variable));
}

FeatureVerdict classify_features(const JointDistribution& dist, double eps) {
  FeatureVerdict verdict;
  for (auto i : dist.features()) {
    FeatureVerdictEntry e{i, FeatureLabel::Irrelevant, {}, std::nullopt};
    if (auto w = primary_witness(dist, i, eps)) {
      e.label = FeatureLabel::Primary;
      e.witness = std::move(w);
    } else if (auto w2 = contextual_witness(dist, i, eps)) {
      e.label = FeatureLabel::Contextual;
      e.witness = std::move(w2);
    }
    verdict.entries.push_back(std::move(e));
  }
  for (auto& e : verdict.entries) {
    if (e.label != FeatureLabel::Primary) continue;
    for (const auto& other : verdict.entries)
      if (other.label == FeatureLabel::Contextual &&
          is_context_sensitive(dist, e.variable, other.variable, eps))
        e.sensitive_to.push_back(other.variable);
  }
  return verdict;
}

namespace {

std::string describe_witness(const JointDistribution& dist, const FeatureVerdictEntry& e) {
  if (!e.witness) return "-";
  const auto& w = *e.witness;
  const auto& names = dist.names();
  const auto c = dist.class_variable();
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  std::string cond;
  for (const auto& a : w.assignment) {
    if (!cond.empty()) cond += ",";
    cond += names[a.variable] + "=" + dist.alphabets()[a.variable][static_cast<std::size_t>(a.value)];
  }
  const auto cls = names[c] + "=" + dist.alphabets()[c][static_cast<std::size_t>(w.class_value)];
  out << "p(" << cls << "|" << cond << ")=" << w.conditional << " vs " << w.reference;
  return out.str();
}

}  // namespace

std::string format_verdict_text(const JointDistribution& dist, const FeatureVerdict& verdict) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "feature" << std::setw(12) << "label" << std::setw(20)
      << "sensitive_to"
      << "witness\n";
  for (const auto& e : verdict.entries) {
    std::string sens;
    for (auto j : e.sensitive_to) sens += (sens.empty() ? "" : ",") + dist.names()[j];
    out << std::setw(16) << dist.names()[e.variable] << std::setw(12) << to_string(e.label)
        << std::setw(20) << (sens.empty() ? "-" : sens) << describe_witness(dist, e) << "\n";
  }
  return out.str();
}

std::string format_verdict_json(const JointDistribution& dist, const FeatureVerdict& verdict) {
  using nlohmann::json;
  json features = json::array();
  for (const auto& e : verdict.entries) {
    json entry = {{"feature", dist.names()[e.variable]}, {"label", to_string(e.label)}};
    json sens = json::array();
    for (auto j : e.sensitive_to) sens.push_back(dist.names()[j]);
    entry["sensitive_to"] = sens;
    if (e.witness) {
      json assignment = json::object();
      for (const auto& a : e.witness->assignment)
        assignment[dist.names()[a.variable]] =
            dist.alphabets()[a.variable][static_cast<std::size_t>(a.value)];
      const auto c = dist.class_variable();
      entry["witness"] = {
          {"assignment", assignment},
          {"class", dist.alphabets()[c][static_cast<std::size_t>(e.witness->class_value)]},
          {"conditional", e.witness->conditional},
          {"reference", e.witness->reference}};
    } else {
      entry["witness"] = nullptr;
    }
    features.push_back(std::move(entry));
  }
  return json{{"class", dist.names()[dist.class_variable()]}, {"features", features}}.dump(2) + "\n";
}

}  // namespace ctxclass
