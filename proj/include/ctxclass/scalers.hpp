#pragma once

#include <algorithm>
#include <vector>

#include "ctxclass/linalg.hpp"

namespace ctxclass {

// Context-free per-feature normalizers. Each is fitted on the columns of a
// design matrix and maps a value of feature `i` independently of the others.

/// (x - min) / (max - min); a constant feature maps to 0.5. Not clipped.
template <typename Scalar = double>
struct MinMaxScaler {
  RowVectorX<Scalar> lo;
  RowVectorX<Scalar> hi;

  Scalar operator()(Index i, Scalar x) const {
    const Scalar range = hi(i) - lo(i);
    if (!(range > Scalar(0))) return Scalar(0.5);
    return (x - lo(i)) / range;
  }

  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> operator()(
      const Eigen::MatrixBase<Derived>& x) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(x.rows(), x.cols());
    for (Index c = 0; c < x.cols(); ++c)
      for (Index r = 0; r < x.rows(); ++r) out(r, c) = (*this)(c, x(r, c));
    return out;
  }
};

template <typename Derived>
MinMaxScaler<typename Derived::Scalar> fit_minmax(const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() == 0) throw PreconditionError("fit_minmax: empty fit set");
  return {x.colwise().minCoeff(), x.colwise().maxCoeff()};
}

/// (x - mean) / sigma with population sigma floored at kDeviationFloor.
template <typename Scalar = double>
struct ZScoreScaler {
  RowVectorX<Scalar> mean;
  RowVectorX<Scalar> deviation;

  Scalar operator()(Index i, Scalar x) const { return (x - mean(i)) / floored(deviation(i)); }

  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> operator()(
      const Eigen::MatrixBase<Derived>& x) const {
    const RowVectorX<Scalar> sigma = deviation.unaryExpr([](Scalar s) { return floored(s); });
    return (x.rowwise() - mean).array().rowwise() / sigma.array();
  }
};

template <typename Derived>
ZScoreScaler<typename Derived::Scalar> fit_zscore(const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() == 0) throw PreconditionError("fit_zscore: empty fit set");
  return {column_mean(x), column_deviation(x)};
}

/// Empirical CDF with the midpoint convention: (#{v < x} + #{v == x} / 2) / N.
template <typename Scalar = double>
struct PercentileScaler {
  std::vector<std::vector<Scalar>> sorted;  // one sorted column per feature

  Scalar operator()(Index i, Scalar x) const {
    const auto& col = sorted[static_cast<std::size_t>(i)];
    const auto below = std::lower_bound(col.begin(), col.end(), x) - col.begin();
    const auto equal = std::upper_bound(col.begin(), col.end(), x) - col.begin() - below;
    return (Scalar(below) + Scalar(0.5) * Scalar(equal)) / Scalar(col.size());
  }

  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> operator()(
      const Eigen::MatrixBase<Derived>& x) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(x.rows(), x.cols());
    for (Index c = 0; c < x.cols(); ++c)
      for (Index r = 0; r < x.rows(); ++r) out(r, c) = (*this)(c, x(r, c));
    return out;
  }
};

template <typename Derived>
PercentileScaler<typename Derived::Scalar> fit_percentile(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.rows() == 0) throw PreconditionError("fit_percentile: empty fit set");
  PercentileScaler<Scalar> s;
  for (Index c = 0; c < x.cols(); ++c) {
    std::vector<Scalar> col(static_cast<std::size_t>(x.rows()));
    for (Index r = 0; r < x.rows(); ++r) col[static_cast<std::size_t>(r)] = x(r, c);
    std::sort(col.begin(), col.end());
    s.sorted.push_back(std::move(col));
  }
  return s;
}

}  // namespace ctxclass
