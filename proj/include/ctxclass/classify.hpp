#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctxclass/dataset.hpp"

namespace ctxclass {

// Classifier inputs: the primary columns, which must all be continuous and
// present (run the pipeline first).
Matrix design_matrix(const Dataset& dataset);
std::vector<std::string> design_names(const Dataset& dataset);

// ---- single nearest neighbor ------------------------------------------------

struct NearestNeighborModel {
  Matrix rows;
  std::vector<int> labels;
  std::vector<std::string> features;
  std::vector<std::string> classes;
};

NearestNeighborModel nn_fit(const Matrix& rows, std::vector<int> labels);
NearestNeighborModel nn_fit(const Dataset& train);

// Most similar stored row (max sum of 1 - |x_i - y_i|, i.e. min L1);
// ties go to the earliest row. Returns the row index.
Index nn_nearest(const NearestNeighborModel& model, const RowVector& query);
int nn_predict(const NearestNeighborModel& model, const RowVector& query);
std::vector<int> nn_predict(const NearestNeighborModel& model, const Matrix& queries);

// ---- one-vs-rest linear discriminant ---------------------------------------

struct SelectionParams {
  bool enabled = true;
  double f_enter = 4.0;
  std::optional<std::size_t> max_features;  // unlimited when empty
};

// y_j = intercept + sum_k coefficients[k] * x[features[k]], fitted to 0/1
// membership targets by least squares.
struct ClassEquation {
  std::vector<Index> features;
  Vector coefficients;
  double intercept = 0.0;
  std::vector<Index> dropped;  // left out as constant or collinear
};

struct LinearDiscriminantModel {
  Index inputs = 0;
  std::vector<ClassEquation> equations;  // one per class, class order
  std::vector<std::string> features;
  std::vector<std::string> classes;

  Vector scores(const RowVector& query) const;
};

// Columns whose pivot in the diagonally pivoted LDL^T of their scaled Gram
// matrix falls below this fraction of the leading pivot are dropped.
inline constexpr double kPivotTolerance = 1e-10;

LinearDiscriminantModel mlr_fit(const Matrix& x, const std::vector<int>& labels,
                                std::size_t n_classes, const SelectionParams& params = {});
LinearDiscriminantModel mlr_fit(const Dataset& train, const SelectionParams& params = {});

// Largest score wins; ties go to the lowest class index.
int mlr_predict(const LinearDiscriminantModel& model, const RowVector& query);
std::vector<int> mlr_predict(const LinearDiscriminantModel& model, const Matrix& queries);

// ---- common entry point ---------------------------------------------------

enum class ClassifierKind { NearestNeighbor, LinearDiscriminant };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier(const std::string& text);  // "nn" / "mlr" and long names

std::vector<int> fit_predict(ClassifierKind kind, const Dataset& train, const Dataset& test,
                             const SelectionParams& params = {});

// ---- inspection -------------------------------------------------------------

// Stored rows are listed by training-row index.
std::string format_model_json(const NearestNeighborModel& model);
std::string format_model_json(const LinearDiscriminantModel& model);

}  // namespace ctxclass
