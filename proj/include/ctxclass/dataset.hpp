#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ctxclass/linalg.hpp"

namespace ctxclass {

enum class FeatureRole { Class, Primary, Contextual };
enum class FeatureKind { Discrete, Continuous };

std::string to_string(FeatureRole role);
std::string to_string(FeatureKind kind);
FeatureRole parse_role(const std::string& text);
FeatureKind parse_kind(const std::string& text);

struct FeatureSpec {
  std::string name;
  FeatureRole role = FeatureRole::Primary;
  FeatureKind kind = FeatureKind::Continuous;
  std::vector<std::string> alphabet;  // discrete only

  std::optional<int> symbol_index(const std::string& symbol) const;
};

// Ordered feature list. Exactly one feature carries the Class role.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  std::size_t size() const { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_[i]; }
  const std::vector<FeatureSpec>& features() const { return features_; }

  std::size_t class_index() const { return class_index_; }
  const FeatureSpec& class_feature() const { return features_[class_index_]; }
  std::optional<std::size_t> index_of(const std::string& name) const;
  std::size_t require(const std::string& name) const;
  std::vector<std::size_t> indices_with(FeatureRole role) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&);

 private:
  std::vector<FeatureSpec> features_;
  std::size_t class_index_ = 0;
};

bool operator==(const FeatureSpec& a, const FeatureSpec& b);

struct Missing {
  friend bool operator==(Missing, Missing) { return true; }
};

// A cell is MISSING, a real number (continuous) or a symbol (discrete).
using Cell = std::variant<Missing, double, std::string>;
using Observation = std::vector<Cell>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }

class Dataset {
 public:
  Dataset() = default;
  Dataset(FeatureSchema schema, std::vector<Observation> rows);

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<Observation>& rows() const { return rows_; }
  const Observation& row(std::size_t r) const { return rows_[r]; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  const Cell& cell(std::size_t r, std::size_t c) const { return rows_[r][c]; }
  bool missing(std::size_t r, std::size_t c) const { return is_missing(rows_[r][c]); }
  double value(std::size_t r, std::size_t c) const;
  const std::string& symbol(std::size_t r, std::size_t c) const;

  // Index of the row's class symbol in the class alphabet.
  int label(std::size_t r) const;
  std::vector<int> labels() const;

  std::size_t missing_count() const;

  // Rows at the given indices, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  // Column values as doubles; continuous cells only, MISSING excluded.
  std::vector<double> column_values(std::size_t c) const;

 private:
  FeatureSchema schema_;
  std::vector<Observation> rows_;
};

// Discrete joint distribution given extensionally: each entry is a full
// tuple of alphabet indices with its probability.
struct JointSpec {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> alphabets;
  std::vector<std::pair<std::vector<int>, double>> entries;
  std::size_t class_variable = 0;

  void validate() const;  // throws PreconditionError
};

// ---- loaders and writers -------------------------------------------------

// Row-count deviations from the canonical files (528/462, 155) are reported
// through `warnings` rather than raised.
std::pair<Dataset, Dataset> load_vowel(const std::filesystem::path& train_path,
                                       const std::filesystem::path& test_path,
                                       std::vector<std::string>* warnings = nullptr);
Dataset load_hepatitis(const std::filesystem::path& path,
                       std::vector<std::string>* warnings = nullptr);
Dataset load_table(const std::filesystem::path& data_path,
                   const std::filesystem::path& schema_path);
Dataset parse_table(const std::string& csv_text, const FeatureSchema& schema);

std::string format_table(const Dataset& dataset);
void write_table(const Dataset& dataset, const std::filesystem::path& path);

FeatureSchema parse_schema(const std::string& json_text);
FeatureSchema read_schema(const std::filesystem::path& path);
std::string format_schema(const FeatureSchema& schema);
void write_schema(const FeatureSchema& schema, const std::filesystem::path& path);

JointSpec parse_joint_spec(const std::string& json_text);
JointSpec read_joint_spec(const std::filesystem::path& path);
std::string format_joint_spec(const JointSpec& spec);

// ---- splits and generators -------------------------------------------------

// Uniform unstratified split: Fisher-Yates over row indices with Rng(seed),
// the first n_train shuffled indices form the training part. Both parts keep
// the original row order.
std::pair<Dataset, Dataset> split_random(const Dataset& dataset, std::size_t n_train,
                                         std::uint64_t seed);

Dataset sample_from(const JointSpec& spec, std::size_t n, std::uint64_t seed);

struct PlantParams {
  int classes = 5;
  int features = 8;
  int contexts = 2;
  double shift = 3.0;
  double noise = 0.2;
  std::size_t n_train = 300;
  std::size_t n_test = 300;
  std::size_t n_baseline = 200;
  double train_context_lo = 0.0;
  double train_context_hi = 1.0;
  double test_context_lo = 2.0;
  double test_context_hi = 3.0;

  void validate() const;  // throws PreconditionError
};

// Train and test come from disjoint context ranges; the baseline holds
// healthy-class rows spanning both ranges.
struct PlantedContext {
  Dataset train;
  Dataset test;
  Dataset baseline;
};

PlantedContext plant_context_dataset(const PlantParams& params, std::uint64_t seed);

}  // namespace ctxclass
