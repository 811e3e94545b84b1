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

#include <string>

#include "matchaudit/cases.hpp"
#include "matchaudit/rational.hpp"

namespace ma = matchaudit;
using ma::CaseId;
using ma::CaseKind;
using ma::CaseReport;
using ma::Rational;

namespace {

const ma::CaseClaim* find_claim(const CaseReport& r, const std::string& label) {
  for (const ma::CaseClaim& c : r.claims) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("case names round-trip") {
  for (const std::string& name : ma::case_names()) {
    auto parsed = ma::parse_case_name(name);
    REQUIRE(parsed.has_value());
    CHECK(ma::case_name(*parsed) == name);
  }
  CHECK_FALSE(ma::parse_case_name("no-such-case").has_value());
}

TEST_CASE("case parameter validation") {
  CHECK_THROWS_AS(CaseId::exante_pair(Rational(0)), std::invalid_argument);
  CHECK_THROWS_AS(CaseId::exante_pair(Rational(1, 4)), std::invalid_argument);
  CHECK_THROWS_AS(CaseId::exante_pair(Rational(1, 3)), std::invalid_argument);
  CHECK_NOTHROW(CaseId::exante_pair(Rational(1, 5)));

  CHECK_THROWS_AS(CaseId::insurance_eu(Rational(0), {Rational(1),
                                                     Rational(1, 2),
                                                     Rational(0)}),
                  std::invalid_argument);
  // Utilities must be weakly decreasing with u1 > u3.
  CHECK_THROWS_AS(CaseId::insurance_eu(Rational(1, 2), {Rational(0),
                                                        Rational(1, 2),
                                                        Rational(1)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CaseId::insurance_eu(Rational(1, 2), {Rational(1),
                                                        Rational(1),
                                                        Rational(1)}),
                  std::invalid_argument);

  CHECK_THROWS_AS(CaseId::correlated_schools(Rational(2), Rational(0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(CaseId::correlated_schools(Rational(1, 2), Rational(-1)),
                  std::invalid_argument);
  CHECK_NOTHROW(CaseId::correlated_schools(Rational(0), Rational(0)));
}

TEST_CASE("every cataloged scenario passes with default parameters") {
  for (const std::string& name : ma::case_names()) {
    CaseKind k = ma::parse_case_name(name).value();
    CaseId id = [&] {
      switch (k) {
        case CaseKind::UniqueStable:
          return CaseId::unique_stable();
        case CaseKind::InterimGrand:
          return CaseId::interim_grand();
        case CaseKind::ExAntePair:
          return CaseId::exante_pair(Rational(1, 8));
        case CaseKind::InsuranceEu:
          return CaseId::insurance_eu(
              Rational(1, 2), {Rational(1), Rational(3, 4), Rational(0)});
        case CaseKind::CorrelatedSchools:
        default:
          return CaseId::correlated_schools(Rational(1, 5), Rational(3, 20));
      }
    }();
    CaseReport r = ma::run_case(id);
    INFO(r.name << ": " << r.headline);
    for (const ma::CaseClaim& c : r.claims) {
      INFO(c.label << " expected=" << c.expected << " actual=" << c.actual);
      CHECK(c.as_expected());
    }
    CHECK(r.pass);
  }
}

TEST_CASE("committed-pair scenario reports the exact distributions") {
  CaseReport r = ma::run_case(CaseId::exante_pair(Rational(1, 8)));
  CHECK(r.pass);
  const ma::CaseClaim* before = find_claim(r, "participation ranks for m1 and w1");
  REQUIRE(before != nullptr);
  CHECK(before->expected.find("11/16") != std::string::npos);
  CHECK(before->expected.find("3/16") != std::string::npos);

  // Other sanctioned parameter points.
  CHECK(ma::run_case(CaseId::exante_pair(Rational(1, 10))).pass);
  CHECK(ma::run_case(CaseId::exante_pair(Rational(1, 5))).pass);
}

TEST_CASE("insurance scenario switches verdict at the cardinal knife edge") {
  // 2*u2 > u1 + u3: the certain middle partner beats the gamble.
  CaseReport prefers = ma::run_case(ma::CaseId::insurance_eu(
      Rational(1, 2), {Rational(1), Rational(3, 4), Rational(0)}));
  CHECK(prefers.pass);

  // 2*u2 == u1 + u3: exact indifference.
  CaseReport knife = ma::run_case(ma::CaseId::insurance_eu(
      Rational(1, 2), {Rational(1), Rational(1, 2), Rational(0)}));
  CHECK(knife.pass);

  // 2*u2 < u1 + u3: the gamble wins; the claim set adapts.
  CaseReport gamble = ma::run_case(ma::CaseId::insurance_eu(
      Rational(1, 2), {Rational(1), Rational(1, 4), Rational(0)}));
  CHECK(gamble.pass);

  ma::EuBlockReport eu = ma::insurance_eu_report(
      Rational(1, 2), {Rational(1), Rational(3, 4), Rational(0)});
  CHECK(eu.eu_mechanism == Rational(5, 8));
  CHECK(eu.eu_pair == Rational(3, 4));
  CHECK(eu.pair_preferred);
  CHECK(eu.fosd.relation == ma::DominanceRelation::Incomparable);
}

TEST_CASE("school lottery scenario tracks the enumerated distributions") {
  ma::CorrelatedSchoolsReport r =
      ma::correlated_schools_check(Rational(1, 5), Rational(3, 20));
  // The enumeration is authoritative: the compact closed form for schools
  // under the full lottery holds only at delta = 0; its corrected variant
  // holds everywhere.
  CHECK_FALSE(r.schools_full_form_holds);
  CHECK(r.schools_full_corrected_holds);
  CHECK(r.schools_sub_form_holds);
  CHECK(r.students_full_form_holds);
  CHECK(r.students_sub_form_holds);
  CHECK_FALSE(r.all_four_prefer_sub);
  CHECK(r.stated_inequality);
  CHECK_FALSE(r.verdict_matches_inequality);
  CHECK_FALSE(r.schools_prefer_sub);  // delta = 1/5 < 2 epsilon = 3/10
  CHECK(r.students_prefer_sub);

  ma::CorrelatedSchoolsReport degenerate =
      ma::correlated_schools_check(Rational(0), Rational(0));
  CHECK(degenerate.schools_full_form_holds);
  CHECK(degenerate.schools_full_corrected_holds);
  CHECK_FALSE(degenerate.schools_prefer_sub);
  CHECK_FALSE(degenerate.students_prefer_sub);

  CHECK(ma::run_case(ma::CaseId::correlated_schools(Rational(1, 10),
                                                    Rational(1, 12)))
            .pass);
  // Coinciding mixture weights: a boundary the catalog records explicitly.
  CHECK(ma::run_case(ma::CaseId::correlated_schools(Rational(1, 10),
                                                    Rational(1, 10)))
            .pass);
}
