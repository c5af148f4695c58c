#include <algorithm>
#include <numeric>
#include <set>

#include "ctxclass/dataset.hpp"
#include "ctxclass/rng.hpp"

namespace ctxclass {

std::string to_string(FeatureRole role) {
  switch (role) {
    case FeatureRole::Class: return "class";
    case FeatureRole::Primary: return "primary";
    case FeatureRole::Contextual: return "contextual";
  }
  return "?";
}

std::string to_string(FeatureKind kind) {
  return kind == FeatureKind::Discrete ? "discrete" : "continuous";
}

FeatureRole parse_role(const std::string& text) {
  if (text == "class") return FeatureRole::Class;
  if (text == "primary") return FeatureRole::Primary;
  if (text == "contextual") return FeatureRole::Contextual;
  throw LoadError("unknown feature role '" + text + "'");
}

FeatureKind parse_kind(const std::string& text) {
  if (text == "discrete") return FeatureKind::Discrete;
  if (text == "continuous") return FeatureKind::Continuous;
  throw LoadError("unknown feature kind '" + text + "'");
}

std::optional<int> FeatureSpec::symbol_index(const std::string& symbol) const {
  const auto it = std::find(alphabet.begin(), alphabet.end(), symbol);
  if (it == alphabet.end()) return std::nullopt;
  return static_cast<int>(it - alphabet.begin());
}

bool operator==(const FeatureSpec& a, const FeatureSpec& b) {
  return a.name == b.name && a.role == b.role && a.kind == b.kind && a.alphabet == b.alphabet;
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
  std::set<std::string> names;
  std::size_t class_count = 0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& f = features_[i];
    if (f.name.empty()) throw PreconditionError("schema: empty feature name");
    if (!names.insert(f.name).second)
      throw PreconditionError("schema: duplicate feature name '" + f.name + "'");
    if (f.kind == FeatureKind::Discrete) {
      if (f.alphabet.empty())
        throw PreconditionError("schema: discrete feature '" + f.name + "' has an empty alphabet");
      const std::set<std::string> unique(f.alphabet.begin(), f.alphabet.end());
      if (unique.size() != f.alphabet.size())
        throw PreconditionError("schema: repeated symbol in alphabet of '" + f.name + "'");
    } else if (!f.alphabet.empty()) {
      throw PreconditionError("schema: continuous feature '" + f.name + "' has an alphabet");
    }
    if (f.role == FeatureRole::Class) {
      ++class_count;
      class_index_ = i;
      if (f.kind != FeatureKind::Discrete)
        throw PreconditionError("schema: class feature '" + f.name + "' must be discrete");
    }
  }
  if (class_count != 1)
    throw PreconditionError("schema: expected exactly one class feature, found " +
                            std::to_string(class_count));
}

std::optional<std::size_t> FeatureSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == name) return i;
  return std::nullopt;
}

std::size_t FeatureSchema::require(const std::string& name) const {
  if (auto i = index_of(name)) return *i;
  throw PreconditionError("no feature named '" + name + "'");
}

std::vector<std::size_t> FeatureSchema::indices_with(FeatureRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].role == role) out.push_back(i);
  return out;
}

bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
  return a.features_ == b.features_;
}

Dataset::Dataset(FeatureSchema schema, std::vector<Observation> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    if (row.size() != schema_.size())
      throw PreconditionError("row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                              " cells, schema has " + std::to_string(schema_.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& spec = schema_[c];
      const auto& cell = row[c];
      if (is_missing(cell)) continue;
      if (spec.kind == FeatureKind::Continuous) {
        if (!std::holds_alternative<double>(cell))
          throw PreconditionError("row " + std::to_string(r) + ": feature '" + spec.name +
                                  "' expects a number");
      } else {
        const auto* s = std::get_if<std::string>(&cell);
        if (!s || !spec.symbol_index(*s))
          throw PreconditionError("row " + std::to_string(r) + ": feature '" + spec.name +
                                  "' has an undeclared symbol");
      }
    }
  }
}

double Dataset::value(std::size_t r, std::size_t c) const {
  if (const auto* v = std::get_if<double>(&rows_[r][c])) return *v;
  throw PreconditionError("cell (" + std::to_string(r) + ", " + schema_[c].name +
                          ") is not a number");
}

const std::string& Dataset::symbol(std::size_t r, std::size_t c) const {
  if (const auto* s = std::get_if<std::string>(&rows_[r][c])) return *s;
  throw PreconditionError("cell (" + std::to_string(r) + ", " + schema_[c].name +
                          ") is not a symbol");
}

int Dataset::label(std::size_t r) const {
  const auto ci = schema_.class_index();
  if (missing(r, ci)) throw PreconditionError("row " + std::to_string(r) + " has no class");
  return *schema_[ci].symbol_index(symbol(r, ci));
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) out[r] = label(r);
  return out;
}

std::size_t Dataset::missing_count() const {
  std::size_t n = 0;
  for (const auto& row : rows_)
    n += static_cast<std::size_t>(std::count_if(row.begin(), row.end(), is_missing));
  return n;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Observation> rows;
  rows.reserve(indices.size());
  for (auto i : indices) rows.push_back(rows_.at(i));
  return Dataset(schema_, std::move(rows));
}

std::vector<double> Dataset::column_values(std::size_t c) const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_)
    if (const auto* v = std::get_if<double>(&row[c])) out.push_back(*v);
  return out;
}

void JointSpec::validate() const {
  if (names.empty()) throw PreconditionError("joint spec: no variables");
  if (alphabets.size() != names.size())
    throw PreconditionError("joint spec: alphabet count differs from variable count");
  if (class_variable >= names.size()) throw PreconditionError("joint spec: bad class variable");
  for (const auto& a : alphabets)
    if (a.empty()) throw PreconditionError("joint spec: empty alphabet");
  double total = 0.0;
  std::set<std::vector<int>> seen;
  for (const auto& [tuple, p] : entries) {
    if (tuple.size() != names.size()) throw PreconditionError("joint spec: tuple length mismatch");
    for (std::size_t v = 0; v < tuple.size(); ++v)
      if (tuple[v] < 0 || tuple[v] >= static_cast<int>(alphabets[v].size()))
        throw PreconditionError("joint spec: value index out of range");
    if (!(p >= 0.0)) throw PreconditionError("joint spec: negative probability");
    if (!seen.insert(tuple).second) throw PreconditionError("joint spec: repeated tuple");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw PreconditionError("joint spec: probabilities sum to " + std::to_string(total));
}

std::pair<Dataset, Dataset> split_random(const Dataset& dataset, std::size_t n_train,
                                         std::uint64_t seed) {
  if (n_train == 0 || n_train >= dataset.size())
    throw PreconditionError("split_random: n_train must lie strictly between 0 and " +
                            std::to_string(dataset.size()));
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(std::span<std::size_t>(order), rng);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<long>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<long>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {dataset.subset(train), dataset.subset(test)};
}

Dataset sample_from(const JointSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  std::vector<FeatureSpec> features;
  for (std::size_t v = 0; v < spec.names.size(); ++v)
    features.push_back({spec.names[v],
                        v == spec.class_variable ? FeatureRole::Class : FeatureRole::Primary,
                        FeatureKind::Discrete, spec.alphabets[v]});
  FeatureSchema schema(std::move(features));

  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& e : spec.entries) cumulative.push_back(acc += e.second);

  Rng rng(seed);
  std::vector<Observation> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    // skip zero-probability entries that share a cumulative value
    auto k = static_cast<std::size_t>(it - cumulative.begin());
    while (spec.entries[k].second == 0.0 && k + 1 < spec.entries.size()) ++k;
    const auto& tuple = spec.entries[k].first;
    Observation row;
    for (std::size_t v = 0; v < tuple.size(); ++v)
      row.emplace_back(spec.alphabets[v][static_cast<std::size_t>(tuple[v])]);
    rows.push_back(std::move(row));
  }
  return Dataset(std::move(schema), std::move(rows));
}

}  // namespace ctxclass
