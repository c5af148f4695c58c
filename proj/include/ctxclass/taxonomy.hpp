#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxclass/dataset.hpp"

namespace ctxclass {

// A discrete joint probability over (class, feature_1, ..., feature_n).
// Only tuples of positive probability are stored.
class JointDistribution {
 public:
  using Tuple = std::vector<int>;

  static JointDistribution from_spec(const JointSpec& spec);

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::vector<std::string>>& alphabets() const { return alphabets_; }
  std::size_t variable_count() const { return names_.size(); }
  std::size_t class_variable() const { return class_variable_; }
  const std::map<Tuple, double>& table() const { return table_; }

  std::size_t index_of(const std::string& name) const;
  int value_index(std::size_t variable, const std::string& value) const;

  // Non-class variables in order.
  std::vector<std::size_t> features() const;

 private:
  JointDistribution() = default;
  friend JointDistribution estimate_distribution(const Dataset& dataset);

  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> alphabets_;
  std::size_t class_variable_ = 0;
  std::map<Tuple, double> table_;
};

/// Empirical tuple frequencies. Every feature must be discrete and no cell
/// may be MISSING; bin continuous features first.
JointDistribution estimate_distribution(const Dataset& dataset);

struct Condition {
  std::size_t variable;
  int value;
};

/// p(event | given). std::nullopt when the conditioning event has probability zero.
std::optional<double> cond_prob(const JointDistribution& dist, const Condition& event,
                                std::span<const Condition> given = {});

// Name-based convenience, e.g. cond_prob(d, {"x0", "1"}, {{"x1", "1"}}).
std::optional<double> cond_prob(const JointDistribution& dist,
                                const std::pair<std::string, std::string>& event,
                                const std::vector<std::pair<std::string, std::string>>& given = {});

// The assignment on which a defining inequality was observed.
struct Witness {
  std::vector<Condition> assignment;  // feature values, class excluded
  int class_value = 0;
  double conditional = 0.0;  // the better-informed side
  double reference = 0.0;    // the side it is compared against
};

std::optional<Witness> primary_witness(const JointDistribution& dist, std::size_t i, double eps);
std::optional<Witness> contextual_witness(const JointDistribution& dist, std::size_t i, double eps);
// Requires i to be primary at kExactEps; j need not be contextual.
std::optional<Witness> sensitivity_witness(const JointDistribution& dist, std::size_t i,
                                           std::size_t j, double eps);

// Tolerance for exact (analytic) distributions.
inline constexpr double kExactEps = 1e-9;

bool is_primary(const JointDistribution& dist, std::size_t i, double eps = 1e-9);
bool is_contextual(const JointDistribution& dist, std::size_t i, double eps = 1e-9);
bool is_context_sensitive(const JointDistribution& dist, std::size_t i, std::size_t j,
                          double eps = 1e-9);

enum class FeatureLabel { Primary, Contextual, Irrelevant };
std::string to_string(FeatureLabel label);

struct FeatureVerdictEntry {
  std::size_t variable;
  FeatureLabel label;
  std::vector<std::size_t> sensitive_to;  // contextual variables, Primary only
  std::optional<Witness> witness;
};

struct FeatureVerdict {
  std::vector<FeatureVerdictEntry> entries;

  const FeatureVerdictEntry& of(std::size_t variable) const;
};

FeatureVerdict classify_features(const JointDistribution& dist, double eps = 1e-9);

std::string format_verdict_text(const JointDistribution& dist, const FeatureVerdict& verdict);
std::string format_verdict_json(const JointDistribution& dist, const FeatureVerdict& verdict);

}  // namespace ctxclass
