#include <chrono>
#include <cmath>
#include <functional>

#include "ctxclass/taxonomy.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace ctxclass;

namespace {

// Direct summation over the 16 rows; var -> required bit, -1 = free.
double mass(const std::array<int, 4>& fixed) {
  double total = 0;
  for (int i = 0; i < 16; ++i) {
    bool ok = true;
    for (int v = 0; v < 4; ++v) {
      const int bit = (i >> (3 - v)) & 1;
      if (fixed[v] >= 0 && fixed[v] != bit) ok = false;
    }
    if (ok) total += testing::kTable1[i];
  }
  return total;
}

double oracle_cond(int a0, std::array<int, 4> given) {
  const double denom = mass(given);
  given[0] = a0;
  return mass(given) / denom;
}

JointDistribution table1() { return JointDistribution::from_spec(testing::table1_spec()); }

}  // namespace

TEST_CASE("worked probabilities on the reference distribution") {
  const auto d = table1();
  CHECK(*cond_prob(d, {"x0", "1"}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*cond_prob(d, {"x0", "1"}, {{"x1", "1"}}) == doctest::Approx(0.44).epsilon(1e-12));
  const double v = *cond_prob(d, {"x0", "1"}, {{"x1", "1"}, {"x2", "1"}});
  CHECK(std::abs(v - 0.16 / 0.30) < 1e-12);
  CHECK(std::abs(v - 0.5333) < 1e-4);
}

TEST_CASE("cond_prob matches brute-force summation for every query") {
  const auto d = table1();
  // every subset of {x1,x2,x3} as the conditioning set, every value
  for (int mask = 0; mask < 8; ++mask)
    for (int vals = 0; vals < 8; ++vals)
      for (int a0 = 0; a0 < 2; ++a0) {
        std::array<int, 4> fixed{-1, -1, -1, -1};
        std::vector<Condition> given;
        for (int v = 1; v <= 3; ++v)
          if (mask & (1 << (v - 1))) {
            fixed[v] = (vals >> (v - 1)) & 1;
            given.push_back({static_cast<std::size_t>(v), fixed[v]});
          }
        const auto p = cond_prob(d, {0, a0}, given);
        REQUIRE(p.has_value());
        CHECK(std::abs(*p - oracle_cond(a0, fixed)) < 1e-12);
      }
}

TEST_CASE("cond_prob: zero-probability condition and unknown names") {
  JointSpec s;
  s.names = {"y", "x"};
  s.alphabets = {{"a", "b"}, {"u", "v", "w"}};
  s.entries = {{{0, 0}, 0.5}, {{1, 1}, 0.5}};
  const auto d = JointDistribution::from_spec(s);
  CHECK_FALSE(cond_prob(d, {"y", "a"}, {{"x", "w"}}).has_value());
  CHECK_THROWS(cond_prob(d, {"z", "a"}));
  CHECK_THROWS(cond_prob(d, {"y", "c"}));
}

TEST_CASE("conditional probabilities are consistent") {
  const auto d = table1();
  for (std::size_t v = 1; v < 4; ++v)
    for (int a = 0; a < 2; ++a) {
      const Condition given[] = {{v, a}};
      double sum = 0;
      for (int a0 = 0; a0 < 2; ++a0) sum += *cond_prob(d, {0, a0}, given);
      CHECK(std::abs(sum - 1.0) < 1e-12);
      // p(A, B) = p(A | B) p(B)
      for (int a0 = 0; a0 < 2; ++a0) {
        std::array<int, 4> joint{-1, -1, -1, -1};
        joint[0] = a0;
        joint[v] = a;
        const double pb = *cond_prob(d, {v, a});
        CHECK(std::abs(mass(joint) - *cond_prob(d, {0, a0}, given) * pb) < 1e-12);
      }
    }
}

TEST_CASE("primary, contextual, irrelevant on the reference distribution") {
  const auto start = std::chrono::steady_clock::now();
  const auto d = table1();
  CHECK(is_primary(d, 1));
  CHECK_FALSE(is_primary(d, 2));
  CHECK_FALSE(is_primary(d, 3));
  CHECK(is_contextual(d, 2));
  CHECK_FALSE(is_contextual(d, 3));
  CHECK_FALSE(is_contextual(d, 1));
  CHECK(is_context_sensitive(d, 1, 2));

  const auto verdict = classify_features(d);
  CHECK(verdict.entries.size() == 3);
  CHECK(verdict.of(1).label == FeatureLabel::Primary);
  CHECK(verdict.of(1).sensitive_to == std::vector<std::size_t>{2});
  CHECK(verdict.of(2).label == FeatureLabel::Contextual);
  CHECK(verdict.of(3).label == FeatureLabel::Irrelevant);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));

  CHECK_THROWS(is_primary(d, 0));
  CHECK_THROWS(is_primary(d, 9));
}

TEST_CASE("context sensitivity threshold against direct enumeration") {
  const auto d = table1();
  double largest = 0;
  for (int a0 = 0; a0 < 2; ++a0)
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2)
        largest = std::max(largest, std::abs(oracle_cond(a0, {-1, a1, a2, -1}) - oracle_cond(a0, {-1, a1, -1, -1})));
  CHECK(largest < 0.2);
  CHECK_FALSE(is_context_sensitive(d, 1, 2, 0.2));
  CHECK(is_context_sensitive(d, 1, 2, largest - 1e-9));
  CHECK_FALSE(is_context_sensitive(d, 1, 2, largest + 1e-9));
}

TEST_CASE("independent variables") {
  // y, x1, x2 mutually independent and uniform
  JointSpec s;
  s.names = {"y", "x1", "x2"};
  s.alphabets.assign(3, {"0", "1"});
  for (int i = 0; i < 8; ++i) s.entries.push_back({{(i >> 2) & 1, (i >> 1) & 1, i & 1}, 0.125});
  const auto d = JointDistribution::from_spec(s);
  const auto v = classify_features(d);
  for (const auto& e : v.entries) CHECK(e.label == FeatureLabel::Irrelevant);

  // x1 determines y, x2 independent of both
  JointSpec t;
  t.names = {"y", "x1", "x2"};
  t.alphabets.assign(3, {"0", "1"});
  for (int i = 0; i < 4; ++i) t.entries.push_back({{(i >> 1) & 1, (i >> 1) & 1, i & 1}, 0.25});
  const auto e = JointDistribution::from_spec(t);
  CHECK(is_primary(e, 1));
  CHECK_FALSE(is_primary(e, 2));
  CHECK_FALSE(is_context_sensitive(e, 1, 2));
}

TEST_CASE("verdict follows a permutation of the features") {
  // reorder to (x0, x3, x1, x2)
  const JointSpec base = testing::table1_spec();
  JointSpec s;
  s.names = {"x0", "x3", "x1", "x2"};
  s.alphabets.assign(4, {"0", "1"});
  for (const auto& [t, p] : base.entries) s.entries.push_back({{t[0], t[3], t[1], t[2]}, p});
  const auto v = classify_features(JointDistribution::from_spec(s));
  CHECK(v.of(1).label == FeatureLabel::Irrelevant);
  CHECK(v.of(2).label == FeatureLabel::Primary);
  CHECK(v.of(2).sensitive_to == std::vector<std::size_t>{3});
  CHECK(v.of(3).label == FeatureLabel::Contextual);

  // class placed last
  JointSpec u;
  u.names = {"x1", "x2", "x3", "x0"};
  u.alphabets.assign(4, {"0", "1"});
  u.class_variable = 3;
  for (const auto& [t, p] : base.entries) u.entries.push_back({{t[1], t[2], t[3], t[0]}, p});
  const auto w = classify_features(JointDistribution::from_spec(u));
  CHECK(w.of(0).label == FeatureLabel::Primary);
  CHECK(w.of(1).label == FeatureLabel::Contextual);
  CHECK(w.of(2).label == FeatureLabel::Irrelevant);
}

TEST_CASE("labels are monotone in eps") {
  const auto d = table1();
  const double grid[] = {0.3, 0.2, 0.1, 0.06, 0.05, 0.04, 0.03, 0.01, 1e-3, 1e-9};
  for (std::size_t v = 1; v < 4; ++v) {
    bool primary_seen = false;
    bool sensitive_seen = false;
    for (double eps : grid) {  // decreasing
      const bool p = is_primary(d, v, eps);
      if (primary_seen) CHECK(p);
      primary_seen = primary_seen || p;
      if (v == 1) {
        const bool s = is_context_sensitive(d, 1, 2, eps);
        if (sensitive_seen) CHECK(s);
        sensitive_seen = sensitive_seen || s;
      }
    }
  }
  // the existential of the contextual test alone is monotone too
  bool witness_seen = false;
  for (double eps : grid) {
    const bool w = contextual_witness(d, 2, eps).has_value();
    if (witness_seen) CHECK(w);
    witness_seen = witness_seen || w;
  }
}

TEST_CASE("estimated distributions") {
  // each reference tuple repeated round(1000 p) times
  FeatureSchema schema({{"x0", FeatureRole::Class, FeatureKind::Discrete, {"0", "1"}},
                        {"x1", FeatureRole::Primary, FeatureKind::Discrete, {"0", "1"}},
                        {"x2", FeatureRole::Primary, FeatureKind::Discrete, {"0", "1"}},
                        {"x3", FeatureRole::Primary, FeatureKind::Discrete, {"0", "1"}}});
  std::vector<Observation> rows;
  for (int i = 0; i < 16; ++i)
    for (long k = 0; k < std::lround(1000 * testing::kTable1[i]); ++k) {
      Observation o;
      for (int v = 0; v < 4; ++v) o.push_back(std::to_string((i >> (3 - v)) & 1));
      rows.push_back(o);
    }
  const auto d = estimate_distribution(Dataset(schema, rows));
  double total = 0;
  for (const auto& [t, p] : d.table()) {
    const int i = t[0] * 8 + t[1] * 4 + t[2] * 2 + t[3];
    CHECK(std::abs(p - testing::kTable1[i]) <= 0.001);
    total += p;
  }
  CHECK(std::abs(total - 1) < 1e-12);

  const auto single = estimate_distribution(Dataset(schema, {rows.front()}));
  REQUIRE(single.table().size() == 1);
  CHECK(single.table().begin()->second == 1.0);

  CHECK_THROWS_AS(estimate_distribution(Dataset(schema, {})), PreconditionError);

  FeatureSchema cont({{"y", FeatureRole::Class, FeatureKind::Discrete, {"0"}},
                      {"u", FeatureRole::Primary, FeatureKind::Continuous, {}}});
  try {
    estimate_distribution(Dataset(cont, {{std::string("0"), 1.5}}));
    FAIL("continuous feature accepted");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("bin") != std::string::npos);
  }
}

TEST_CASE("sampled reference distribution gives the exact verdict at eps 0.03") {
  const Dataset sample = sample_from(testing::table1_spec(), 10000, 31);
  const auto v = classify_features(estimate_distribution(sample), 0.03);
  const auto exact = classify_features(table1());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(v.entries[i].label == exact.entries[i].label);
    CHECK(v.entries[i].sensitive_to == exact.entries[i].sensitive_to);
  }
}

TEST_CASE("verdict formatting") {
  const auto d = table1();
  const auto v = classify_features(d);
  const std::string text = format_verdict_text(d, v);
  CHECK(text.find("primary") != std::string::npos);
  CHECK(text.find("contextual") != std::string::npos);
  CHECK(text.find("irrelevant") != std::string::npos);
  const std::string json = format_verdict_json(d, v);
  CHECK(json.find("\"sensitive_to\"") != std::string::npos);
  CHECK(json == format_verdict_json(d, classify_features(d)));
}
