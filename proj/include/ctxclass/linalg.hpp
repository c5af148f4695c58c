#pragma once

#include <Eigen/Dense>

#include "ctxclass/error.hpp"

namespace ctxclass {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// Every division by a deviation goes through this floor.
inline constexpr double kDeviationFloor = 1e-12;

template <typename Scalar>
Scalar floored(Scalar sigma) {
  return sigma < Scalar(kDeviationFloor) ? Scalar(kDeviationFloor) : sigma;
}

template <typename Derived>
RowVectorX<typename Derived::Scalar> column_mean(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.rows() == 0) return RowVectorX<Scalar>::Zero(x.cols());
  return x.colwise().mean();
}

/// Population (divide-by-N) standard deviation of each column.
template <typename Derived>
RowVectorX<typename Derived::Scalar> column_deviation(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.rows() == 0) return RowVectorX<Scalar>::Zero(x.cols());
  const RowVectorX<Scalar> mean = x.colwise().mean();
  return ((x.rowwise() - mean).array().square().colwise().sum() / Scalar(x.rows()))
      .sqrt()
      .matrix();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar l1_distance(const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedB>& b) {
  return (a - b).cwiseAbs().sum();
}

/// Instance similarity: sum over features of (1 - |a_i - b_i|).
/// Equals d - L1(a, b), so the most similar row is the L1-nearest one.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar similarity(const Eigen::MatrixBase<DerivedA>& a,
                                     const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) throw PreconditionError("similarity: vector lengths differ");
  Scalar total(0);
  for (Index i = 0; i < a.size(); ++i) total += Scalar(1) - std::abs(a(i) - b(i));
  return total;
}

}  // namespace ctxclass
