// Copyright 2026 The matchaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "matchaudit/dominance.hpp"
#include "matchaudit/lp.hpp"
#include "matchaudit/market.hpp"
#include "matchaudit/rational.hpp"

namespace ma = matchaudit;
using ma::ConstraintSense;
using ma::DominanceRelation;
using ma::LinearConstraint;
using ma::LinearProgram;
using ma::man;
using ma::RankDistribution;
using ma::Rational;

namespace {

RankDistribution dist(std::vector<Rational> mass) {
  return RankDistribution{man(0), std::move(mass)};
}

}  // namespace

TEST_CASE("rational arithmetic and parsing") {
  CHECK(Rational::parse("3/4") == Rational(3, 4));
  CHECK(Rational::parse("-2/6") == Rational(-1, 3));
  CHECK(Rational::parse("5") == Rational(5));
  CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse(""), std::invalid_argument);

  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1, 2) * Rational(2, 3) == Rational(1, 3));
  CHECK((Rational(1, 2) - Rational(1, 2)).is_zero());
  CHECK(Rational(-1, 4).sign() == -1);
  CHECK(Rational(0).str() == "0/1");
  CHECK(Rational(7).str() == "7/1");
  CHECK(Rational(2, 8).str() == "1/4");
  CHECK(Rational(1, 3) < Rational(2, 5));
}

TEST_CASE("cumulative rank mass") {
  RankDistribution d = dist({Rational(1, 2), Rational(1, 3), Rational(1, 6)});
  CHECK(d.size() == 3);
  CHECK(d.cdf(0) == Rational(0));
  CHECK(d.cdf(1) == Rational(1, 2));
  CHECK(d.cdf(2) == Rational(5, 6));
  CHECK(d.cdf(3) == Rational(1));
  CHECK(d.total_mass() == Rational(1));
  CHECK_THROWS_AS(d.cdf(4), std::invalid_argument);
  CHECK_THROWS_AS(d.cdf(-1), std::invalid_argument);
}

TEST_CASE("stochastic dominance comparison covers all four relations") {
  RankDistribution base =
      dist({Rational(1, 2), Rational(1, 4), Rational(1, 4)});

  SECTION("equal") {
    ma::DominanceVerdict v = ma::fosd_compare(base, base);
    CHECK(v.relation == DominanceRelation::Equal);
    CHECK(v.strict_thresholds.empty());
    CHECK(ma::relation_name(v.relation) == std::string("equal"));
  }

  SECTION("strict dominance with exact threshold list") {
    RankDistribution better =
        dist({Rational(3, 4), Rational(0), Rational(1, 4)});
    ma::DominanceVerdict v = ma::fosd_compare(better, base);
    CHECK(v.relation == DominanceRelation::StrictlyDominates);
    // cdf gaps: 3/4 > 1/2 at 1, 3/4 == 3/4 at 2, 1 == 1 at 3.
    CHECK(v.strict_thresholds == std::vector<int>{1});
    ma::DominanceVerdict w = ma::fosd_compare(base, better);
    CHECK(w.relation == DominanceRelation::DominatedBy);
    CHECK(w.strict_thresholds == std::vector<int>{1});
    CHECK(ma::relation_name(v.relation) == std::string("strictly-dominates"));
    CHECK(ma::relation_name(w.relation) == std::string("dominated-by"));
  }

  SECTION("multiple strict thresholds") {
    RankDistribution better =
        dist({Rational(3, 4), Rational(1, 4), Rational(0)});
    ma::DominanceVerdict v = ma::fosd_compare(better, base);
    CHECK(v.relation == DominanceRelation::StrictlyDominates);
    CHECK(v.strict_thresholds == std::vector<int>{1, 2});
  }

  SECTION("incomparable") {
    RankDistribution other =
        dist({Rational(1, 4), Rational(3, 4), Rational(0)});
    // cdf: 1/4 < 1/2 at 1 but 1 > 3/4 at 2.
    ma::DominanceVerdict v = ma::fosd_compare(other, base);
    CHECK(v.relation == DominanceRelation::Incomparable);
    CHECK(ma::relation_name(v.relation) == std::string("incomparable"));
  }

  SECTION("validation") {
    RankDistribution wrong_agent{ma::woman(0), base.mass};
    CHECK_THROWS_AS(ma::fosd_compare(base, wrong_agent),
                    std::invalid_argument);
    RankDistribution short_d = dist({Rational(1, 2), Rational(1, 2)});
    CHECK_THROWS_AS(ma::fosd_compare(base, short_d), std::invalid_argument);
    RankDistribution deficient =
        dist({Rational(1, 2), Rational(1, 4), Rational(1, 8)});
    CHECK_THROWS_AS(ma::fosd_compare(deficient, deficient),
                    std::invalid_argument);
  }
}

TEST_CASE("simplex solves small programs exactly") {
  SECTION("bounded optimum with exact assignment") {
    // max x + y subject to x <= 2, y <= 3.
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {Rational(1), Rational(1)};
    lp.constraints.push_back(
        {{Rational(1), Rational(0)}, ConstraintSense::LessEq, Rational(2)});
    lp.constraints.push_back(
        {{Rational(0), Rational(1)}, ConstraintSense::LessEq, Rational(3)});
    ma::LpStats stats;
    ma::LpResult r = ma::solve_max(lp, &stats);
    REQUIRE(r.status == ma::LpResult::Status::Optimal);
    CHECK(r.value == Rational(5));
    CHECK(r.assignment == std::vector<Rational>{Rational(2), Rational(3)});
    CHECK(stats.solves == 1);
    CHECK(stats.verified_optima == 1);
  }

  SECTION("fractional optimum") {
    // max 3x + 2y subject to x + y <= 4, x + 3y <= 6  ->  x=4, y=0 gives 12;
    // with 2x + y <= 5 binding: x=3/2? Use exact known: max 3x+2y,
    // x+y<=4, 2x+y<=5 -> vertex (1,3): 3+6=9; vertex (5/2,0): 15/2.
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {Rational(3), Rational(2)};
    lp.constraints.push_back(
        {{Rational(1), Rational(1)}, ConstraintSense::LessEq, Rational(4)});
    lp.constraints.push_back(
        {{Rational(2), Rational(1)}, ConstraintSense::LessEq, Rational(5)});
    ma::LpResult r = ma::solve_max(lp);
    REQUIRE(r.status == ma::LpResult::Status::Optimal);
    CHECK(r.value == Rational(9));
    CHECK(r.assignment == std::vector<Rational>{Rational(1), Rational(3)});
  }

  SECTION("equality and lower-bound senses") {
    // max x subject to x + y == 1, x >= 1/3, y >= 1/3  ->  x = 2/3.
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {Rational(1), Rational(0)};
    lp.constraints.push_back(
        {{Rational(1), Rational(1)}, ConstraintSense::Equal, Rational(1)});
    lp.constraints.push_back({{Rational(1), Rational(0)},
                              ConstraintSense::GreaterEq, Rational(1, 3)});
    lp.constraints.push_back({{Rational(0), Rational(1)},
                              ConstraintSense::GreaterEq, Rational(1, 3)});
    ma::LpResult r = ma::solve_max(lp);
    REQUIRE(r.status == ma::LpResult::Status::Optimal);
    CHECK(r.value == Rational(2, 3));
  }

  SECTION("infeasible") {
    // x <= -1 contradicts the implicit x >= 0.
    LinearProgram lp;
    lp.num_vars = 1;
    lp.objective = {Rational(1)};
    lp.constraints.push_back(
        {{Rational(1)}, ConstraintSense::LessEq, Rational(-1)});
    ma::LpStats stats;
    ma::LpResult r = ma::solve_max(lp, &stats);
    CHECK(r.status == ma::LpResult::Status::Infeasible);
    CHECK(stats.verified_optima == 0);
  }

  SECTION("unbounded") {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {Rational(1), Rational(0)};
    lp.constraints.push_back(
        {{Rational(0), Rational(1)}, ConstraintSense::LessEq, Rational(1)});
    ma::LpResult r = ma::solve_max(lp);
    CHECK(r.status == ma::LpResult::Status::Unbounded);
  }

  SECTION("degenerate program known to cycle without an anti-cycling rule") {
    // Beale's example; the pivot rule must terminate at value 1/20.
    LinearProgram lp;
    lp.num_vars = 4;
    lp.objective = {Rational(3, 4), Rational(-150), Rational(1, 50),
                    Rational(-6)};
    lp.constraints.push_back({{Rational(1, 4), Rational(-60),
                               Rational(-1, 25), Rational(9)},
                              ConstraintSense::LessEq, Rational(0)});
    lp.constraints.push_back({{Rational(1, 2), Rational(-90),
                               Rational(-1, 50), Rational(3)},
                              ConstraintSense::LessEq, Rational(0)});
    lp.constraints.push_back({{Rational(0), Rational(0), Rational(1),
                               Rational(0)},
                              ConstraintSense::LessEq, Rational(1)});
    ma::LpStats stats;
    ma::LpResult r = ma::solve_max(lp, &stats);
    REQUIRE(r.status == ma::LpResult::Status::Optimal);
    CHECK(r.value == Rational(1, 20));
    CHECK(stats.pivots > 0);
  }

  SECTION("input validation") {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {Rational(1)};  // wrong arity
    CHECK_THROWS_AS(ma::solve_max(lp), std::invalid_argument);
  }
}
