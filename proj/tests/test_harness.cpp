#include <cmath>
#include <numbers>

#include "ctxclass/harness.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace ctxclass;

namespace {

ExperimentReport grid_of(const std::vector<std::size_t>& correct, std::size_t total) {
  ExperimentReport r;
  r.dataset = "toy";
  r.classifier = "nn";
  const auto combos = strategy_grid();
  for (std::size_t k = 0; k < combos.size(); ++k) r.cells.push_back({combos[k], "nn", "", correct[k], total});
  return r;
}

std::pair<Dataset, Dataset> vowel() {
  return load_vowel(testing::data_dir() / "vowel-context.data", testing::data_dir() / "vowel-context.data");
}

}  // namespace

TEST_CASE("incomplete beta and t distribution against closed forms") {
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
    CHECK(std::abs(incomplete_beta(1, 1, x) - x) < 1e-12);
    CHECK(std::abs(incomplete_beta(2, 1, x) - x * x) < 1e-12);
    CHECK(std::abs(incomplete_beta(2.5, 3.5, x) + incomplete_beta(3.5, 2.5, 1 - x) - 1) < 1e-12);
  }
  for (double t : {-30.0, -2.0, -0.3, 0.0, 0.7, 4.0}) {
    // df = 1 is Cauchy, df = 2 has a closed form too
    CHECK(std::abs(student_t_cdf(t, 1) - (0.5 + std::atan(t) / std::numbers::pi)) < 1e-12);
    CHECK(std::abs(student_t_cdf(t, 2) - (0.5 + t / (2 * std::sqrt(2 + t * t)))) < 1e-12);
  }
  // tabulated two-sided 5% critical value for df = 9
  CHECK(std::abs(student_t_cdf(2.262157, 9) - 0.975) < 1e-6);
}

TEST_CASE("paired t test") {
  const double a[] = {5, 6, 4, 7, 5, 6, 4, 5, 6, 7};
  const double b[] = {3, 3, 3, 3, 3, 3, 3, 3, 3, 3};
  const auto r = paired_t_test(a, b);
  // differences 2,3,1,4,2,3,1,2,3,4: mean 2.5, sum of squared deviations 10.5
  const double sd = std::sqrt(10.5 / 9);
  const double t = 2.5 / (sd / std::sqrt(10.0));
  CHECK_FALSE(r.no_variance);
  CHECK(r.df == 9);
  CHECK(r.mean_difference == doctest::Approx(2.5));
  CHECK(std::abs(r.t - t) < 1e-12);
  CHECK(std::abs(r.p - 2 * (1 - student_t_cdf(t, 9))) < 1e-15);
  CHECK(r.p < 1e-3);

  const auto swapped = paired_t_test(b, a);
  CHECK(std::abs(swapped.t + r.t) < 1e-12);
  CHECK(std::abs(swapped.p - r.p) < 1e-15);

  const auto same = paired_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);
  CHECK_FALSE(same.no_variance);

  const double shifted[] = {6, 7, 5, 8, 6, 7, 5, 6, 7, 8};
  const auto flat = paired_t_test(shifted, a);
  CHECK(flat.no_variance);
  CHECK(std::isnan(flat.t));
  CHECK(std::isnan(flat.p));

  const double one[] = {1};
  CHECK_THROWS_AS(paired_t_test(one, one), PreconditionError);
  CHECK_THROWS_AS(paired_t_test(a, one), PreconditionError);
}

TEST_CASE("strategy grid order and codes") {
  const auto g = strategy_grid();
  REQUIRE(g.size() == 8);
  CHECK(combo_code(g[0]) == "NNN");
  CHECK(combo_code(g[1]) == "NNY");
  CHECK(combo_code(g[4]) == "YNN");
  CHECK(combo_code(g[7]) == "YYY");
  CellResult c{g[0], "nn", "", 258, 462};
  CHECK(c.percent() == 56);
  c.correct = 305;
  CHECK(c.percent() == 66);
}

TEST_CASE("synergy arithmetic") {
  // vowel counts as tabulated: gains 2, -1, 2 individually and 10 jointly
  const auto v = synergy(grid_of({258, 269, 253, 272, 267, 295, 273, 305}, 462));
  CHECK(v.individual_sum == 3);
  CHECK(v.joint == 10);
  // hepatitis counts as tabulated: only normalization helps alone (12), 13 jointly
  const auto h = synergy(grid_of({393, 393, 390, 391, 454, 460, 457, 464}, 550));
  CHECK(h.individual_sum == 12);
  CHECK(h.joint == 13);
  const auto flat = synergy(grid_of({50, 50, 50, 50, 50, 50, 50, 50}, 100));
  CHECK(flat.individual_sum == 0);
  CHECK(flat.joint == 0);
}

TEST_CASE("table emission") {
  const auto r = grid_of({258, 269, 253, 272, 268, 295, 274, 305}, 462);
  const std::string text = emit_table(r, TableFormat::Text);
  CHECK(text.find("305") != std::string::npos);
  const std::string csv = emit_table(r, TableFormat::Csv);
  const Dataset back = parse_table(csv, report_schema(ReportLayout::StrategyGrid));
  REQUIRE(back.size() == 8);
  const auto& s = back.schema();
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(back.symbol(k, s.require("combo")) == combo_code(r.cells[k].combo));
    CHECK(back.value(k, s.require("correct")) == static_cast<double>(r.cells[k].correct));
    CHECK(back.value(k, s.require("percent")) == r.cells[k].percent());
  }
  ExperimentReport empty;
  const Dataset none = parse_table(emit_table(empty, TableFormat::Csv), report_schema(ReportLayout::StrategyGrid));
  CHECK(none.size() == 0);
  CHECK(format_report_json(r) == format_report_json(r));
}

TEST_CASE("vowel grid") {
  const auto [train, test] = vowel();
  const auto r = run_vowel_grid(train, test, ClassifierKind::NearestNeighbor);
  REQUIRE(r.cells.size() == 8);
  for (const auto& c : r.cells) CHECK(c.total == 462);
  CHECK(r.cells[7].percent() > r.cells[0].percent());
  CHECK(r.find(StrategyCombo{true, true, true}) == &r.cells[7]);
  CHECK(r.splits.empty());
}

TEST_CASE("hepatitis grid over splits") {
  const Dataset hep = load_hepatitis(testing::data_dir() / "hepatitis.data");
  const auto r = run_hepatitis_grid(hep, 3, 11, ClassifierKind::NearestNeighbor);
  REQUIRE(r.splits.size() == 3);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(r.cells[k].total == 165);
    std::size_t sum = 0;
    for (const auto& s : r.splits) sum += s.correct[k];
    CHECK(sum == r.cells[k].correct);
  }
  // every cell but the reference is tested against the all-No cell
  CHECK(r.significance.size() == 7);
  for (const auto& e : r.significance) CHECK(e.reference == 0);

  const auto again = run_hepatitis_grid(hep, 3, 11, ClassifierKind::NearestNeighbor);
  CHECK(format_report_json(r) == format_report_json(again));
  const auto other = run_hepatitis_grid(hep, 3, 12, ClassifierKind::NearestNeighbor);
  CHECK(other.splits[0].seed != r.splits[0].seed);

  CHECK_THROWS_AS(run_hepatitis_grid(hep, 0, 1, ClassifierKind::NearestNeighbor), PreconditionError);
  CHECK_THROWS_AS(run_hepatitis_grid(hep, 1, 1, ClassifierKind::NearestNeighbor, 155), PreconditionError);
}

TEST_CASE("normalizer comparison") {
  const auto p = plant_context_dataset({}, 7);
  ComparisonOptions opt;
  opt.baseline = p.baseline;
  const auto normalizers = default_normalizers();
  const auto r = run_normalization_comparison(p.train, p.test,
                                              {ClassifierKind::NearestNeighbor, ClassifierKind::LinearDiscriminant},
                                              normalizers, opt);
  CHECK(r.layout == ReportLayout::NormalizerComparison);
  CHECK(r.cells.size() == 2 * normalizers.size());
  const Dataset back = parse_table(emit_table(r, TableFormat::Csv), report_schema(ReportLayout::NormalizerComparison));
  CHECK(back.size() == r.cells.size());

  CHECK_THROWS_AS(run_normalization_comparison(p.train, p.test, {ClassifierKind::NearestNeighbor}, normalizers),
                  PreconditionError);
  // the group-statistics normalizer needs a context
  CHECK_THROWS_AS(run_normalization_comparison(p.train, p.test, {ClassifierKind::NearestNeighbor},
                                               {Normalization::Contextual}, opt),
                  PreconditionError);
}
