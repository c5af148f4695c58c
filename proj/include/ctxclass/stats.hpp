#pragma once

#include <span>

namespace ctxclass {

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

struct TTestResult {
  bool no_variance = false;  // every difference identical; t and p undefined
  double t = 0.0;
  double p = 1.0;  // two-sided
  double df = 0.0;
  double mean_difference = 0.0;
};

// Paired two-sided t test on a[i] - b[i].
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace ctxclass
