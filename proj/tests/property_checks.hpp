#pragma once

// Randomized property checks shared by the property suite and the acceptance
// binary. Each returns whether the property held and the worst case seen.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ctxclass/classify.hpp"
#include "ctxclass/linalg.hpp"
#include "ctxclass/preprocess.hpp"
#include "ctxclass/rng.hpp"

namespace testing {

using namespace ctxclass;

struct Outcome {
  bool ok = true;
  std::string detail;
};

inline std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

// Random data: discrete context g over `groups` symbols, `d` continuous
// primaries with group-dependent location and scale, class over `classes`.
inline Dataset random_grouped(Rng& rng, std::size_t n, int d, int groups, int classes) {
  std::vector<FeatureSpec> specs;
  std::vector<std::string> gsym, csym;
  for (int g = 0; g < groups; ++g) gsym.push_back("g" + std::to_string(g));
  for (int c = 0; c < classes; ++c) csym.push_back("k" + std::to_string(c));
  specs.push_back({"g", FeatureRole::Contextual, FeatureKind::Discrete, gsym});
  for (int i = 0; i < d; ++i) specs.push_back({"x" + std::to_string(i), FeatureRole::Primary, FeatureKind::Continuous, {}});
  specs.push_back({"y", FeatureRole::Class, FeatureKind::Discrete, csym});
  std::vector<double> loc(static_cast<std::size_t>(groups * d)), scale(loc.size());
  for (auto& v : loc) v = rng.uniform(-10, 10);
  for (auto& v : scale) v = rng.uniform(0.5, 5);
  std::vector<Observation> rows;
  for (std::size_t r = 0; r < n; ++r) {
    const int g = static_cast<int>(r % static_cast<std::size_t>(groups));
    const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
    Observation o{gsym[static_cast<std::size_t>(g)]};
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(g * d + i);
      o.push_back(loc[k] + scale[k] * (rng.normal() + 0.8 * c));
    }
    o.push_back(csym[static_cast<std::size_t>(c)]);
    rows.push_back(std::move(o));
  }
  return Dataset(FeatureSchema(std::move(specs)), std::move(rows));
}

// (a) one context group: contextual normalization equals the global z-score
inline Outcome single_group_is_zscore(std::uint64_t seed, int trials = 20) {
  Rng rng(seed);
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    const Dataset d = random_grouped(rng, 10 + rng.below(40), 1 + static_cast<int>(rng.below(5)), 1, 2);
    const Dataset n = apply_contextual(fit_contextual(d, DiscreteContext{0}), d);
    const Matrix x = primary_matrix(d);
    const Matrix z = fit_zscore(x)(x);
    worst = std::max(worst, (primary_matrix(n) - z).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "max |contextual - zscore| = " + fmt(worst)};
}

// (b) after normalizing the fit set, every group has mean 0 and deviation 1
inline Outcome groups_standardized(std::uint64_t seed, int trials = 20) {
  Rng rng(seed);
  double worst_mean = 0, worst_dev = 0;
  for (int t = 0; t < trials; ++t) {
    const int groups = 2 + static_cast<int>(rng.below(4));
    const Dataset d = random_grouped(rng, static_cast<std::size_t>(groups) * (5 + rng.below(20)),
                                     1 + static_cast<int>(rng.below(5)), groups, 3);
    const Dataset n = apply_contextual(fit_contextual(d, DiscreteContext{0}), d);
    const Matrix x = primary_matrix(n);
    for (int g = 0; g < groups; ++g) {
      std::vector<Index> members;
      for (std::size_t r = 0; r < n.size(); ++r)
        if (n.symbol(r, 0) == "g" + std::to_string(g)) members.push_back(static_cast<Index>(r));
      for (Index c = 0; c < x.cols(); ++c) {
        double mean = 0, ss = 0;
        for (auto r : members) mean += x(r, c);
        mean /= static_cast<double>(members.size());
        for (auto r : members) ss += (x(r, c) - mean) * (x(r, c) - mean);
        worst_mean = std::max(worst_mean, std::abs(mean));
        worst_dev = std::max(worst_dev, std::abs(std::sqrt(ss / static_cast<double>(members.size())) - 1));
      }
    }
  }
  return {worst_mean <= 1e-9 && worst_dev <= 1e-9,
          "max |mean| = " + fmt(worst_mean) + ", max |dev - 1| = " + fmt(worst_dev)};
}

// (c) similarity = d - L1. Coordinates are multiples of 1/1024 so that both
// sides are computed without rounding and the comparison can be exact.
inline Outcome similarity_is_d_minus_l1(std::uint64_t seed, int pairs = 1000) {
  Rng rng(seed);
  int mismatches = 0;
  for (int k = 0; k < pairs; ++k) {
    const Index d = 1 + static_cast<Index>(rng.below(12));
    RowVector a(d), b(d);
    for (Index i = 0; i < d; ++i) {
      a(i) = static_cast<double>(rng.below(1025)) / 1024.0;
      b(i) = static_cast<double>(rng.below(1025)) / 1024.0;
    }
    double l1 = 0;
    for (Index i = 0; i < d; ++i) l1 += std::abs(a(i) - b(i));
    if (similarity(a, b) != static_cast<double>(d) - l1) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(pairs) + " pairs differ"};
}

inline Dataset affine_mapped(const Dataset& d, const RowVector& alpha, const RowVector& beta) {
  const Matrix x = primary_matrix(d);
  Matrix y = x;
  for (Index c = 0; c < x.cols(); ++c) y.col(c) = (x.col(c).array() * alpha(c) + beta(c)).matrix();
  return with_primary(d, y);
}

// (d) full-fit discriminant predictions survive per-feature positive affine maps
inline Outcome discriminant_affine_invariant(std::uint64_t seed, int datasets = 20) {
  Rng rng(seed);
  int changed = 0;
  const SelectionParams full{.enabled = false};
  for (int t = 0; t < datasets; ++t) {
    const int d = 2 + static_cast<int>(rng.below(4));
    const Dataset train = random_grouped(rng, 40, d, 2, 3);
    const Dataset test = random_grouped(rng, 30, d, 2, 3);
    RowVector alpha(d), beta(d);
    for (int c = 0; c < d; ++c) {
      alpha(c) = std::exp(rng.uniform(-3, 3));
      beta(c) = rng.uniform(-100, 100);
    }
    const auto before = mlr_predict(mlr_fit(train, full), primary_matrix(test));
    const auto after = mlr_predict(mlr_fit(affine_mapped(train, alpha, beta), full),
                                   primary_matrix(affine_mapped(test, alpha, beta)));
    if (before != after) ++changed;
  }
  return {changed == 0, std::to_string(changed) + " of " + std::to_string(datasets) + " datasets changed"};
}

// (e) contextual weights leave full-fit discriminant predictions unchanged
inline Outcome weights_leave_discriminant_unchanged(std::uint64_t seed, int datasets = 20) {
  Rng rng(seed);
  int changed = 0;
  const SelectionParams full{.enabled = false};
  for (int t = 0; t < datasets; ++t) {
    const int d = 2 + static_cast<int>(rng.below(4));
    const Dataset train = random_grouped(rng, 40, d, 2, 3);
    const Dataset test = random_grouped(rng, 30, d, 2, 3);
    const WeightVector w = compute_weights(train, DiscreteContext{0});
    const auto before = mlr_predict(mlr_fit(train, full), primary_matrix(test));
    const auto after =
        mlr_predict(mlr_fit(apply_weights(w, train), full), primary_matrix(apply_weights(w, test)));
    if (before != after) ++changed;
  }
  return {changed == 0, std::to_string(changed) + " of " + std::to_string(datasets) + " datasets changed"};
}

// Population deviation of the listed values.
inline double pop_dev(const std::vector<double>& v) {
  double m = 0, ss = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

// Two speakers, two classes, one feature.
inline Dataset two_speaker_toy() {
  FeatureSchema s({{"speaker", FeatureRole::Contextual, FeatureKind::Discrete, {"A", "B"}},
                   {"f", FeatureRole::Primary, FeatureKind::Continuous, {}},
                   {"y", FeatureRole::Class, FeatureKind::Discrete, {"c1", "c2"}}});
  const char* sp[] = {"A", "A", "A", "A", "B", "B", "B", "B"};
  const double f[] = {0, 2, 4, 6, 1, 3, 5, 7};
  const char* y[] = {"c1", "c1", "c2", "c2", "c1", "c1", "c2", "c2"};
  std::vector<Observation> rows;
  for (int i = 0; i < 8; ++i) rows.push_back({std::string(sp[i]), f[i], std::string(y[i])});
  return Dataset(s, rows);
}

// (f) compute_weights against a direct computation of inter and intra spread
inline Outcome toy_weight_matches_oracle() {
  const Dataset d = two_speaker_toy();
  // inter: mean over speakers of the speaker's deviation; intra: mean over
  // (speaker, class) cells of the cell's deviation
  double inter = 0, intra = 0;
  int cells = 0;
  for (const std::string sp : {"A", "B"}) {
    std::vector<double> all;
    for (const std::string cl : {"c1", "c2"}) {
      std::vector<double> cell;
      for (std::size_t r = 0; r < d.size(); ++r)
        if (d.symbol(r, 0) == sp && d.symbol(r, 2) == cl) cell.push_back(d.value(r, 1));
      all.insert(all.end(), cell.begin(), cell.end());
      intra += pop_dev(cell);
      ++cells;
    }
    inter += pop_dev(all) / 2;
  }
  intra /= cells;
  const double oracle = inter / intra;
  const double w = compute_weights(d, DiscreteContext{0}).weight(0);
  return {std::abs(w - oracle) < 1e-12 && std::abs(w - 2.2361) <= 1e-3,
          "w = " + fmt(w) + ", oracle " + fmt(oracle)};
}

// Random small table with holes in every non-class column.
inline std::pair<Dataset, Dataset> random_holes(Rng& rng) {
  FeatureSchema s({{"a", FeatureRole::Primary, FeatureKind::Continuous, {}},
                   {"b", FeatureRole::Primary, FeatureKind::Continuous, {}},
                   {"s", FeatureRole::Primary, FeatureKind::Discrete, {"u", "v", "w"}},
                   {"age", FeatureRole::Contextual, FeatureKind::Continuous, {}},
                   {"y", FeatureRole::Class, FeatureKind::Discrete, {"n", "p"}}});
  const double hole = rng.uniform(0.1, 0.4);
  auto make = [&](std::size_t n) {
    std::vector<Observation> rows;
    for (std::size_t r = 0; r < n; ++r) {
      Observation o{std::round(rng.uniform(0, 20)), rng.uniform(-1, 1), std::string(1, "uvw"[rng.below(3)]),
                    rng.uniform(20, 70), std::string(rng.below(2) ? "p" : "n")};
      for (std::size_t c = 0; c < 4; ++c)
        if (rng.uniform(0, 1) < hole) o[c] = Missing{};
      rows.push_back(std::move(o));
    }
    return rows;
  };
  auto train = make(4 + rng.below(12));
  // every column needs at least one donor
  for (std::size_t c = 0; c < 4; ++c) {
    const bool present = std::any_of(train.begin(), train.end(), [&](const Observation& o) { return !is_missing(o[c]); });
    if (!present) train[0][c] = c == 2 ? Cell(std::string("u")) : Cell(1.0);
  }
  return {Dataset(s, train), Dataset(s, make(3 + rng.below(10)))};
}

// Brute-force donor: scan all train rows that have the cell, keep the first
// one of maximal similarity.
inline Cell brute_force_donor(const Dataset& train, const Observation& row, std::size_t column) {
  const auto& schema = train.schema();
  std::vector<double> lo(schema.size(), 0), hi(schema.size(), 0);
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (schema[c].kind != FeatureKind::Continuous) continue;
    bool first = true;
    for (std::size_t r = 0; r < train.size(); ++r) {
      if (train.missing(r, c)) continue;
      const double v = train.value(r, c);
      lo[c] = first ? v : std::min(lo[c], v);
      hi[c] = first ? v : std::max(hi[c], v);
      first = false;
    }
  }
  auto scaled = [&](std::size_t c, double v) { return hi[c] > lo[c] ? (v - lo[c]) / (hi[c] - lo[c]) : 0.5; };
  double best = -std::numeric_limits<double>::infinity();
  Cell donor = Missing{};
  for (std::size_t r = 0; r < train.size(); ++r) {
    if (train.missing(r, column)) continue;
    double sim = 0;
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c == schema.class_index() || is_missing(row[c]) || train.missing(r, c)) continue;
      if (schema[c].kind == FeatureKind::Discrete)
        sim += std::get<std::string>(row[c]) == train.symbol(r, c) ? 1.0 : 0.0;
      else
        sim += 1.0 - std::abs(scaled(c, std::get<double>(row[c])) - scaled(c, train.value(r, c)));
    }
    if (sim > best) {
      best = sim;
      donor = train.cell(r, column);
    }
  }
  return donor;
}

// (g) imputation fills every hole with the brute-force donor's value
inline Outcome imputation_matches_brute_force(std::uint64_t seed, int datasets = 50) {
  Rng rng(seed);
  int wrong = 0, left = 0, altered = 0, filled = 0;
  for (int t = 0; t < datasets; ++t) {
    const auto [train, target] = random_holes(rng);
    const Dataset out = impute_missing(train, target);
    left += static_cast<int>(out.missing_count());
    for (std::size_t r = 0; r < target.size(); ++r)
      for (std::size_t c = 0; c < target.schema().size(); ++c) {
        if (!target.missing(r, c)) {
          if (!(out.cell(r, c) == target.cell(r, c))) ++altered;
          continue;
        }
        ++filled;
        if (!(out.cell(r, c) == brute_force_donor(train, target.row(r), c))) ++wrong;
      }
  }
  return {wrong == 0 && left == 0 && altered == 0,
          std::to_string(filled) + " holes filled, " + std::to_string(wrong) + " differ from brute force, " +
              std::to_string(left) + " left, " + std::to_string(altered) + " present cells altered"};
}

}  // namespace testing
