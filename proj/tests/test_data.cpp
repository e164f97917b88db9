#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "icemest/data/csv.hpp"
#include "icemest/data/design.hpp"
#include "icemest/data/plan.hpp"
#include "icemest/errors.hpp"
#include "icemest/sim/dgm.hpp"

using namespace icemest;
using data::DesignSpec;
using data::LongitudinalDataset;
using data::TreatmentPlan;
using testutil::kNaN;
using testutil::same_vector;
using testutil::two_period;

TEST_SUITE("dataset") {

TEST_CASE("a consistent dataset validates") {
  CHECK_NOTHROW(two_period().validate());
}

TEST_CASE("validation pinpoints the offending unit and time") {
  auto check = [](LongitudinalDataset d, std::size_t unit, int time,
                  const std::string& fragment) {
    try {
      d.validate();
      FAIL("expected ValidationError: " << fragment);
    } catch (const ValidationError& e) {
      CHECK(e.unit == unit);
      CHECK(e.time == time);
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };

  SUBCASE("missing censoring indicator") {
    auto d = two_period();
    d.set_censoring(1, {kNaN, 0, 0, 1, 0, 0});
    check(std::move(d), 0, 1, "censoring indicator is missing");
  }
  SUBCASE("non-binary censoring indicator") {
    auto d = two_period();
    d.set_censoring(2, {0, 2, 0, 1, 0, 1});
    check(std::move(d), 1, 2, "not in {0, 1}");
  }
  SUBCASE("censoring cannot revert to zero") {
    auto d = two_period();
    d.set_censoring(2, {0, 0, 0, 0, 0, 1});  // unit 3 has C1 = 1
    check(std::move(d), 3, 2, "not monotone");
  }
  SUBCASE("treatment missing while uncensored") {
    auto d = two_period();
    d.set_treatment(0, {1, kNaN, 1, 1, 0, 1});
    check(std::move(d), 1, 0, "treatment missing while uncensored");
  }
  SUBCASE("treatment must be binary") {
    auto d = two_period();
    d.set_treatment(0, {2, 0, 1, 1, 0, 1});
    check(std::move(d), 0, 0, "treatment not in {0, 1}");
  }
  SUBCASE("treatment observed after censoring") {
    auto d = two_period();
    d.set_treatment(1, {1, 0, 0, 1, 1, 1});  // unit 3 censored at time 1
    check(std::move(d), 3, 1, "treatment observed after censoring");
  }
  SUBCASE("covariate missing while uncensored") {
    auto d = two_period();
    d.add_covariate(0, "W", {0, 1, kNaN, 0, 1, 0});
    check(std::move(d), 2, 0, "'W' missing while uncensored");
  }
  SUBCASE("covariate observed after censoring") {
    auto d = two_period();
    d.add_covariate(1, "W", {1, 0, 1, 0.0, 1, 0});
    check(std::move(d), 3, 1, "'W' observed after censoring");
  }
  SUBCASE("outcome missing while uncensored") {
    auto d = two_period();
    d.set_outcome(2, {kNaN, 0, 1, kNaN, 0, kNaN});
    check(std::move(d), 0, 2, "outcome missing while uncensored");
  }
  SUBCASE("outcome outside the unit interval") {
    auto d = two_period();
    d.set_outcome(2, {1.5, 0, 1, kNaN, 0, kNaN});
    check(std::move(d), 0, 2, "outcome outside [0, 1]");
  }
  SUBCASE("fractional outcomes are allowed") {
    auto d = two_period();
    d.set_outcome(2, {0.5, 0, 1, kNaN, 0, kNaN});
    CHECK_NOTHROW(d.validate());
  }
  SUBCASE("outcome observed after censoring") {
    auto d = two_period();
    d.set_outcome(1, {0, 1, 0, 0.0, 1, 0});
    check(std::move(d), 3, 1, "outcome observed after censoring");
  }
}

TEST_CASE("unset columns are a dimension error, not a crash") {
  LongitudinalDataset d(4, 2);
  d.set_treatment(0, {0, 1, 0, 1});
  CHECK_THROWS_AS(d.validate(), DimensionMismatch);
}

TEST_CASE("uncensored masks follow the censoring columns") {
  const auto d = two_period();
  CHECK(same_vector(d.uncensored_mask(0), {1, 1, 1, 1, 1, 1}));
  CHECK(same_vector(d.uncensored_mask(1), {1, 1, 1, 0, 1, 1}));
  CHECK(same_vector(d.uncensored_mask(2), {1, 1, 1, 0, 1, 0}));
}

TEST_CASE("covariate lookup by name") {
  const auto d = two_period();
  CHECK(d.has_covariate(0, "W"));
  CHECK_FALSE(d.has_covariate(0, "Z"));
  CHECK_FALSE(d.has_covariate(5, "W"));
  CHECK_THROWS_AS(d.covariate(0, "Z"), MissingColumn);
  CHECK(d.covariate_names(1) == std::vector<std::string>{"W"});
}

TEST_CASE("selecting units copies rows, repeats included") {
  const auto d = two_period();
  const std::vector<std::size_t> idx{3, 5, 0, 5};
  const auto s = d.select_units(idx);
  REQUIRE(s.units() == 4);
  CHECK(s.horizon() == 2);
  CHECK(same_vector(s.treatment(0), {1, 1, 1, 1}));
  CHECK(same_vector(s.treatment(1), {kNaN, 1, 1, 1}));
  CHECK(same_vector(s.censoring(1), {1, 0, 0, 0}));
  CHECK(same_vector(s.censoring(2), {1, 1, 0, 1}));
  CHECK(same_vector(s.outcome(2), {kNaN, kNaN, 1, kNaN}));
  CHECK(same_vector(s.covariate(1, "W"), {kNaN, 0, 1, 0}));
  CHECK_NOTHROW(s.validate());

  const std::vector<std::size_t> bad{6};
  CHECK_THROWS_AS(d.select_units(bad), std::out_of_range);
}

TEST_CASE("time bounds are enforced on every accessor") {
  const auto d = two_period();
  CHECK_THROWS_AS(d.treatment(2), std::out_of_range);
  CHECK_THROWS_AS(d.treatment(-1), std::out_of_range);
  CHECK_THROWS_AS(d.censoring(0), std::out_of_range);
  CHECK_THROWS_AS(d.censoring(3), std::out_of_range);
  CHECK_THROWS_AS(d.outcome(0), std::out_of_range);
  CHECK_THROWS_AS(d.covariate(2, "W"), std::out_of_range);
}

}  // TEST_SUITE("dataset")

TEST_SUITE("plan") {

TEST_CASE("labels and assigned values") {
  CHECK(TreatmentPlan::always().label() == "always");
  CHECK(TreatmentPlan::never().label() == "never");
  CHECK(TreatmentPlan::natural_course().label() == "natural_course");
  CHECK(TreatmentPlan::custom({1, 0, 1}).label() == "custom(1,0,1)");

  CHECK(TreatmentPlan::always().assigned(7) == 1.0);
  CHECK(TreatmentPlan::never().assigned(0) == 0.0);
  const auto c = TreatmentPlan::custom({0, 1});
  CHECK(c.assigned(0) == 0.0);
  CHECK(c.assigned(1) == 1.0);
  CHECK_THROWS_AS(c.assigned(2), std::out_of_range);
  CHECK_THROWS_AS(TreatmentPlan::natural_course().assigned(0),
                  std::logic_error);

  CHECK(TreatmentPlan::always().deterministic());
  CHECK_FALSE(TreatmentPlan::natural_course().deterministic());
  CHECK(TreatmentPlan::custom({1}) == TreatmentPlan::custom({1}));
  CHECK_FALSE(TreatmentPlan::custom({1}) == TreatmentPlan::custom({0}));
  CHECK_FALSE(TreatmentPlan::always() == TreatmentPlan::never());
}

TEST_CASE("custom plans are checked at construction") {
  CHECK_THROWS_AS(TreatmentPlan::custom({}), ConfigError);
  CHECK_THROWS_AS(TreatmentPlan::custom({0.5}), ConfigError);
  CHECK_THROWS_AS(TreatmentPlan::custom({1, 2}), ConfigError);
}

}  // TEST_SUITE("plan")

TEST_SUITE("design") {

TEST_CASE("history specs expand to the expected columns") {
  const auto d = two_period();
  const auto full = DesignSpec::full_history(d, 1);
  CHECK(full.column_count() == 5);
  CHECK(full.has_treatment_term());
  CHECK(full.column_names() ==
        std::vector<std::string>{"(intercept)", "A0", "A1", "L0_W", "L1_W"});

  const auto cov = DesignSpec::covariate_history(d, 1);
  CHECK(cov.column_count() == 3);
  CHECK_FALSE(cov.has_treatment_term());
  CHECK(cov.column_names() ==
        std::vector<std::string>{"(intercept)", "L0_W", "L1_W"});
}

TEST_CASE("observed treatments fill the matrix when no plan is given") {
  const auto d = two_period();
  const auto m = data::design_matrix(d, 1, DesignSpec::full_history(d, 1));
  REQUIRE(m.columns.size() == 5);
  CHECK(m.n == 6);
  CHECK(same_vector(m.valid, {1, 1, 1, 0, 1, 1}));
  // Censored rows are zero-filled, intercept included.
  CHECK(same_vector(m.columns[0], {1, 1, 1, 0, 1, 1}));
  CHECK(same_vector(m.columns[1], {1, 0, 1, 0, 0, 1}));  // A0
  CHECK(same_vector(m.columns[2], {1, 0, 0, 0, 1, 1}));  // A1
  CHECK(same_vector(m.columns[3], {0, 1, 1, 0, 1, 0}));  // W0
  CHECK(same_vector(m.columns[4], {1, 0, 1, 0, 1, 0}));  // W1
  CHECK(m.names[2] == "A1");
}

TEST_CASE("deterministic plans overwrite the treatment columns") {
  const auto d = two_period();
  const auto spec = DesignSpec::full_history(d, 1);

  const auto always = TreatmentPlan::always();
  const auto m1 = data::design_matrix(d, 1, spec, &always);
  CHECK(same_vector(m1.columns[1], {1, 1, 1, 0, 1, 1}));
  CHECK(same_vector(m1.columns[2], {1, 1, 1, 0, 1, 1}));
  // Covariates keep their observed values.
  CHECK(same_vector(m1.columns[4], {1, 0, 1, 0, 1, 0}));

  const auto never = TreatmentPlan::never();
  const auto m0 = data::design_matrix(d, 1, spec, &never);
  CHECK(same_vector(m0.columns[1], {0, 0, 0, 0, 0, 0}));
  CHECK(same_vector(m0.columns[2], {0, 0, 0, 0, 0, 0}));

  const auto mixed = TreatmentPlan::custom({0, 1});
  const auto mc = data::design_matrix(d, 1, spec, &mixed);
  CHECK(same_vector(mc.columns[1], {0, 0, 0, 0, 0, 0}));
  CHECK(same_vector(mc.columns[2], {1, 1, 1, 0, 1, 1}));

  const auto natural = TreatmentPlan::natural_course();
  const auto mn = data::design_matrix(d, 1, spec, &natural);
  CHECK(same_vector(mn.columns[1], {1, 0, 1, 0, 0, 1}));
  CHECK(same_vector(mn.columns[2], {1, 0, 0, 0, 1, 1}));
}

TEST_CASE("missing values in uncensored rows are refused") {
  LongitudinalDataset d(2, 1);
  d.set_treatment(0, {1, 0});
  d.set_censoring(1, {0, 0});
  d.set_outcome(1, {1, 0});
  d.add_covariate(0, "W", {0.5, kNaN});  // never ran validate()
  const auto spec = DesignSpec::full_history(d, 0);
  CHECK_THROWS_AS(data::design_matrix(d, 0, spec), ValidationError);
}

TEST_CASE("followers are units matching the plan so far") {
  const auto d = two_period();
  const auto always = TreatmentPlan::always();
  CHECK(same_vector(data::followers_mask(d, always, 0), {1, 0, 1, 1, 0, 1}));
  // Missing A1 (unit 3) disqualifies; only units 0 and 5 treated twice.
  CHECK(same_vector(data::followers_mask(d, always, 1), {1, 0, 0, 0, 0, 1}));

  const auto never = TreatmentPlan::never();
  CHECK(same_vector(data::followers_mask(d, never, 1), {0, 1, 0, 0, 0, 0}));

  const auto mixed = TreatmentPlan::custom({1, 0});
  CHECK(same_vector(data::followers_mask(d, mixed, 1), {0, 0, 1, 0, 0, 0}));

  const auto natural = TreatmentPlan::natural_course();
  CHECK(same_vector(data::followers_mask(d, natural, 1), {1, 1, 1, 1, 1, 1}));
}

TEST_CASE("indicator terms expand a level to its own column") {
  const auto d = two_period();
  DesignSpec spec;
  spec.terms = {data::TermIntercept{}, data::TermIndicator{1, "W", 0.0}};
  const auto m = data::design_matrix(d, 1, spec);
  // W1 = {1,0,1,NaN,1,0}; the ==0 indicator on valid rows, zero when censored.
  CHECK(same_vector(m.columns[1], {0, 1, 0, 0, 0, 1}));
  CHECK(m.names[1] == "L1_W==0.000000");
}

TEST_CASE("interaction columns are elementwise products") {
  const auto d = two_period();
  DesignSpec spec;
  spec.terms = {data::TermIntercept{}, data::TermTreatment{0},
                data::TermCovariate{0, "W"}, data::TermInteraction{1, 2}};
  const auto m = data::design_matrix(d, 1, spec);
  REQUIRE(m.columns.size() == 4);
  // A0 * W0 masked by time-1 censoring.
  CHECK(same_vector(m.columns[3], {0, 0, 1, 0, 0, 0}));
  CHECK(m.names[3] == "term1:term2");
}

TEST_CASE("interactions reject unusable operands") {
  const auto d = two_period();
  auto build = [&](std::vector<data::Term> terms) {
    DesignSpec spec;
    spec.terms = std::move(terms);
    return data::design_matrix(d, 1, spec);
  };
  CHECK_THROWS_AS(build({data::TermIntercept{}, data::TermInteraction{0, 9}}),
                  ConfigError);
  CHECK_THROWS_AS(build({data::TermIntercept{}, data::TermInteraction{1, 0}}),
                  ConfigError);
  CHECK_THROWS_AS(
      build({data::TermTreatment{0}, data::TermInteraction{0, 2},
             data::TermInteraction{0, 1}}),
      ConfigError);
  CHECK_THROWS_AS(
      build({data::TermSpline{1, "W", {0.0, 0.5, 1.0}},
             data::TermTreatment{0}, data::TermInteraction{0, 1}}),
      ConfigError);
}

TEST_CASE("restricted cubic splines are zero left of the knots and linear "
          "beyond them") {
  std::vector<double> x;
  for (double v = -1.0; v <= 3.0 + 1e-12; v += 0.125) x.push_back(v);
  const std::vector<double> knots{0.0, 0.75, 2.0};
  const auto basis = data::rcspline_basis(x, knots);
  REQUIRE(basis.size() == 2);  // linear column + one curvature column
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(basis[0][i] == x[i]);
    if (x[i] <= knots.front()) CHECK(basis[1][i] == 0.0);
  }
  // Second differences on an equally spaced grid vanish where the function
  // is linear (beyond the last knot).
  for (std::size_t i = 0; i + 2 < x.size(); ++i) {
    if (x[i] < knots.back()) continue;
    const double dd = basis[1][i + 2] - 2.0 * basis[1][i + 1] + basis[1][i];
    CHECK(std::abs(dd) < 1e-9);
  }
  // Curvature is real between the knots.
  bool curved = false;
  for (std::size_t i = 0; i + 2 < x.size(); ++i) {
    if (x[i] < knots.front() || x[i + 2] > knots.back()) continue;
    const double dd = basis[1][i + 2] - 2.0 * basis[1][i + 1] + basis[1][i];
    if (std::abs(dd) > 1e-6) curved = true;
  }
  CHECK(curved);

  CHECK_THROWS_AS(data::rcspline_basis(x, std::vector<double>{0.0, 1.0}),
                  ConfigError);
  CHECK_THROWS_AS(data::rcspline_basis(x, std::vector<double>{0.0, 0.0, 1.0}),
                  ConfigError);
}

TEST_CASE("spline terms occupy knots-minus-one design columns") {
  LongitudinalDataset d(5, 1);
  d.set_treatment(0, {1, 0, 1, 0, 1});
  d.set_censoring(1, {0, 0, 0, 0, 0});
  d.set_outcome(1, {1, 0, 0, 1, 1});
  d.add_covariate(0, "age", {0.1, 0.4, 0.5, 0.7, 0.95});
  DesignSpec spec;
  spec.terms = {data::TermIntercept{},
                data::TermSpline{0, "age", {0.2, 0.5, 0.8}}};
  CHECK(spec.column_count() == 3);
  const auto m = data::design_matrix(d, 1, spec);
  REQUIRE(m.columns.size() == 3);
  CHECK(m.names[1] == "rcs(L0_age)[0]");
  CHECK(m.names[2] == "rcs(L0_age)[1]");
  CHECK(same_vector(m.columns[1], {0.1, 0.4, 0.5, 0.7, 0.95}));
  CHECK(m.columns[2][0] == 0.0);  // below the first knot
  CHECK(m.columns[2][4] > 0.0);
}

}  // TEST_SUITE("design")

TEST_SUITE("csv") {

TEST_CASE("a written dataset reads back bit for bit") {
  const auto d = sim::generate(80, 20260419);
  std::ostringstream out;
  data::save_csv(d, out);
  const std::string text = out.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "L0_L,A0,C1,Y1,L1_L,A1,C2,Y2,L2_L,A2,C3,Y3");

  std::istringstream in(text);
  const auto r = data::load_csv(in);
  REQUIRE(r.units() == d.units());
  REQUIRE(r.horizon() == d.horizon());
  for (int k = 0; k < d.horizon(); ++k) {
    CHECK(same_vector(r.treatment(k), d.treatment(k)));
    CHECK(same_vector(r.covariate(k, "L"), d.covariate(k, "L")));
  }
  for (int k = 1; k <= d.horizon(); ++k) {
    CHECK(same_vector(r.censoring(k), d.censoring(k)));
    CHECK(same_vector(r.outcome(k), d.outcome(k)));
  }
}

TEST_CASE("the exact serialized text of a small dataset") {
  std::ostringstream out;
  data::save_csv(two_period(), out);
  CHECK(out.str() ==
        "L0_W,A0,C1,Y1,L1_W,A1,C2,Y2\n"
        "0,1,0,0,1,1,0,1\n"
        "1,0,0,1,0,0,0,0\n"
        "1,1,0,0,1,0,0,1\n"
        "0,1,1,,,,1,\n"
        "1,0,0,1,1,1,0,0\n"
        "0,1,0,0,0,1,1,\n");
}

TEST_CASE("quoted cells and trailing carriage returns parse") {
  std::istringstream in(
      "A0,\"C1\",Y1,L0_W\r\n"
      "\"1\",0,\"0.5\",\"2.25\"\r\n"
      "0,0,1,-1\r\n");
  const auto d = data::load_csv(in);
  REQUIRE(d.units() == 2);
  CHECK(d.treatment(0)[0] == 1.0);
  CHECK(d.outcome(1)[0] == 0.5);
  CHECK(d.covariate(0, "W")[0] == 2.25);
  CHECK(d.covariate(0, "W")[1] == -1.0);
}

TEST_CASE("parse failures carry the row and column") {
  auto load = [](const std::string& text) {
    std::istringstream in(text);
    return data::load_csv(in);
  };

  SUBCASE("unknown header") {
    try {
      load("A0,B1,Y1,C1\n1,0,1,0\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row == 0);
      CHECK(e.column == "B1");
    }
  }
  SUBCASE("junk cell") {
    try {
      load("A0,C1,Y1\nok,0,1\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row == 1);
      CHECK(e.column == "A0");
    }
  }
  SUBCASE("non-binary treatment") {
    try {
      load("A0,C1,Y1\n2,0,1\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row == 1);
      CHECK(e.column == "A0");
      CHECK(std::string(e.what()).find("0 or 1") != std::string::npos);
    }
  }
  SUBCASE("ragged row") {
    CHECK_THROWS_AS(load("A0,C1,Y1\n1,0\n"), ParseError);
  }
  SUBCASE("unterminated quote") {
    CHECK_THROWS_AS(load("A0,C1,Y1\n\"1,0,1\n"), ParseError);
  }
  SUBCASE("empty file") {
    CHECK_THROWS_AS(load(""), ParseError);
  }
  SUBCASE("no outcome columns at all") {
    CHECK_THROWS_AS(load("A0,C1\n1,0\n"), MissingColumn);
  }
  SUBCASE("missing treatment column") {
    CHECK_THROWS_AS(load("C1,Y1\n0,1\n"), MissingColumn);
  }
  SUBCASE("missing censoring column") {
    CHECK_THROWS_AS(load("A0,Y1\n1,1\n"), MissingColumn);
  }
}

TEST_CASE("loading runs the structural checks") {
  // A0 empty while C1 = 0: a parseable file that is not a valid dataset.
  std::istringstream in("A0,C1,Y1\n,0,1\n");
  CHECK_THROWS_AS(data::load_csv(in), ValidationError);
}

TEST_CASE("missing files are a config error") {
  CHECK_THROWS_AS(data::load_csv(std::string("/nonexistent/nope.csv")),
                  ConfigError);
}

}  // TEST_SUITE("csv")
