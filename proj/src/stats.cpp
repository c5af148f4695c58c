#include "ctxclass/stats.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "ctxclass/error.hpp"

namespace ctxclass {

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw PreconditionError("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw PreconditionError("student_t_cdf: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("paired_t_test: sequences differ in length");
  if (a.size() < 2) throw PreconditionError("paired_t_test: need at least two pairs");
  const auto n = static_cast<double>(a.size());
  std::vector<double> diff(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff[i] = a[i] - b[i];
    mean += diff[i];
  }
  mean /= n;
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);

  TTestResult r;
  r.df = n - 1.0;
  r.mean_difference = mean;
  bool identical = true;
  for (double d : diff) identical = identical && d == diff.front();
  if (identical) {
    if (mean == 0.0) return r;  // a == b: t = 0, p = 1
    r.no_variance = true;
    r.t = std::numeric_limits<double>::quiet_NaN();
    r.p = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const double se = std::sqrt(ss / (n - 1.0) / n);
  r.t = mean / se;
  r.p = 2.0 * student_t_cdf(-std::abs(r.t), r.df);
  return r;
}

}  // namespace ctxclass
