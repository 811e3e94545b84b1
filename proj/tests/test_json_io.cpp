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
#include <vector>

#include "matchaudit/cases.hpp"
#include "matchaudit/json_io.hpp"
#include "matchaudit/market.hpp"
#include "matchaudit/mechanism.hpp"
#include "matchaudit/prior.hpp"
#include "matchaudit/stability.hpp"
#include "matchaudit/witness.hpp"

namespace ma = matchaudit;
using ma::Json;
using ma::man;
using ma::Market;
using ma::Rational;
using ma::woman;

TEST_CASE("rationals serialize as exact num/den strings") {
  Json j = ma::rational_to_json(Rational(3, 4));
  CHECK(j.get<std::string>() == "3/4");
  CHECK(ma::rational_from_json(j, "x") == Rational(3, 4));
  CHECK(ma::rational_from_json(Json("7"), "x") == Rational(7));
  CHECK_THROWS_AS(ma::rational_from_json(Json(0.75), "x"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ma::rational_from_json(Json("1/0"), "x"),
                  std::invalid_argument);
}

TEST_CASE("profiles and matchings round-trip through JSON") {
  ma::PreferenceProfile p = ma::pinned_3x3_profile();
  Json pj = ma::profile_to_json(p);
  CHECK(pj.contains("market"));
  CHECK(ma::profile_from_json(pj) == p);

  // Without an embedded market a fallback must be supplied.
  Json no_market = pj;
  no_market.erase("market");
  Market market = p.market();
  CHECK(ma::profile_from_json(no_market, &market) == p);
  CHECK_THROWS_AS(ma::profile_from_json(no_market), std::invalid_argument);

  ma::Matching mu = ma::Matching::from_pairs(
      market, {{man(0), woman(1)}, {man(2), woman(0)}});
  Json mj = ma::matching_to_json(mu);
  CHECK(ma::matching_from_json(mj, market) == mu);

  // With a "single" list present, every agent must be covered exactly once.
  Json incomplete = Json::object();
  incomplete["pairs"] = Json::array({Json::array({"m1", "w1"})});
  incomplete["single"] = Json::array({"m2"});
  CHECK_THROWS_AS(ma::matching_from_json(incomplete, market),
                  std::invalid_argument);
}

TEST_CASE("priors round-trip in support and product form") {
  ma::Prior prior = ma::case_internal::commitment_prior(Rational(1, 8));
  Json pj = ma::prior_to_json(prior);
  ma::Prior back = ma::prior_from_json(pj);
  REQUIRE(back.support().size() == prior.support().size());
  for (std::size_t i = 0; i < back.support().size(); ++i) {
    CHECK(back.support()[i].profile == prior.support()[i].profile);
    CHECK(back.support()[i].weight == prior.support()[i].weight);
  }

  Market market{3, 3};
  std::vector<ma::AgentTypeDistribution> agents;
  for (const ma::AgentId& a : market.agents()) {
    agents.push_back({a, ma::marginal_types(prior, a)});
  }
  Json prod = ma::product_prior_to_json(market, agents);
  ma::Prior from_product = ma::prior_from_json(prod);
  REQUIRE(from_product.support().size() == prior.support().size());
  for (std::size_t i = 0; i < from_product.support().size(); ++i) {
    CHECK(from_product.support()[i].profile == prior.support()[i].profile);
    CHECK(from_product.support()[i].weight == prior.support()[i].weight);
  }

  Json both = pj;
  both["product"] = prod["product"];
  CHECK_THROWS_AS(ma::prior_from_json(both), std::invalid_argument);
  Json neither = Json::object();
  neither["market"] = ma::market_to_json(market);
  CHECK_THROWS_AS(ma::prior_from_json(neither), std::invalid_argument);
}

TEST_CASE("mechanism descriptors rebuild working mechanisms") {
  Market market{3, 3};
  ma::PreferenceProfile p = ma::pinned_3x3_profile();

  SECTION("builtin kinds") {
    for (const ma::Mechanism& mech :
         {ma::da_mechanism(market, ma::Side::Men),
          ma::da_mechanism(market, ma::Side::Women),
          ma::uniform_random_mechanism(market),
          ma::uniform_random_full_mechanism(market),
          ma::random_stable_mechanism(market)}) {
      Json j = ma::mechanism_to_json(mech);
      ma::Mechanism back = ma::mechanism_from_json(j);
      CHECK(back.name() == mech.name());
      CHECK(back.evaluate(p).outcomes() == mech.evaluate(p).outcomes());
    }
  }

  SECTION("table entries and fallback survive the round trip") {
    ma::Matching swapped = ma::Matching::from_pairs(
        market,
        {{man(0), woman(1)}, {man(1), woman(0)}, {man(2), woman(2)}});
    ma::Mechanism table = ma::table_mechanism(
        market, {{p, ma::RandomMatching::point_mass(swapped)}},
        ma::random_stable_mechanism(market));
    ma::Mechanism back = ma::mechanism_from_json(ma::mechanism_to_json(table));
    CHECK(back.evaluate(p).outcomes().front().first == swapped);
    ma::PreferenceProfile q = ma::case_internal::unique_stable_profile();
    CHECK(back.evaluate(q).outcomes() == table.evaluate(q).outcomes());
  }

  SECTION("partner-swap base and profile survive the round trip") {
    ma::Mechanism swap = ma::partner_swap_mechanism(
        ma::random_stable_mechanism(market), p);
    ma::Mechanism back = ma::mechanism_from_json(ma::mechanism_to_json(swap));
    CHECK(back.evaluate(p).outcomes() == swap.evaluate(p).outcomes());
  }

  SECTION("custom evaluators cannot be serialized") {
    ma::Mechanism funny = ma::custom_mechanism(
        market, "funny", [&](const ma::PreferenceProfile& prof) {
          return ma::RandomMatching::point_mass(
              ma::Matching::all_single(prof.market()));
        });
    CHECK_THROWS_AS(ma::mechanism_to_json(funny), std::invalid_argument);
  }

  SECTION("unknown kinds are rejected") {
    Json j = Json::object();
    j["kind"] = "coin-flip";
    j["market"] = ma::market_to_json(market);
    CHECK_THROWS_AS(ma::mechanism_from_json(j), std::invalid_argument);
  }
}

TEST_CASE("blocking witnesses survive serialization and re-verification") {
  Market market{3, 3};
  ma::PreferenceProfile p = ma::pinned_3x3_profile();
  ma::Mechanism urf = ma::uniform_random_full_mechanism(market);
  auto w = ma::ex_post_block(urf, p, ma::Coalition::of({man(0), woman(0)}));
  REQUIRE(w.has_value());

  Json j = ma::block_witness_to_json(*w);
  ma::BlockWitness back = ma::block_witness_from_json(j, market);
  CHECK(back.notion == w->notion);
  CHECK(back.coalition == w->coalition);
  REQUIRE(back.profile.has_value());
  CHECK(*back.profile == p);
  CHECK(ma::check_ex_post_witness(urf, *back.profile, back).ok);

  // Prior-weighted witnesses: serialize, parse, re-verify.
  ma::Prior prior = ma::case_internal::commitment_prior(Rational(1, 8));
  ma::Mechanism rs = ma::random_stable_mechanism(market);
  ma::StabilityReport report = ma::ex_ante_pairwise_stable(rs, prior);
  REQUIRE(report.witness.has_value());
  ma::BlockWitness ante = ma::block_witness_from_json(
      ma::block_witness_to_json(*report.witness), market);
  CHECK(ma::check_ex_ante_witness(rs, prior, ante).ok);

  // Per-type witnesses: the grand construction round-trips too.
  ma::InstabilityWitness grand =
      ma::interim_instability_witness(rs);
  REQUIRE(grand.grand_witness.has_value());
  ma::InterimWitness iw = ma::interim_witness_from_json(
      ma::interim_witness_to_json(*grand.grand_witness), market);
  CHECK(ma::check_interim_witness(rs, ma::iid_uniform_prior(market), iw).ok);

  Json full = ma::instability_witness_to_json(grand);
  CHECK(full["kind"].get<std::string>() == "grand-coalition");
  CHECK(full["verification"]["ok"].get<bool>());
}

TEST_CASE("malformed JSON carries line and column diagnostics") {
  try {
    ma::parse_json_text("{\n  \"men\": 3,\n  }", "mem.json");
    FAIL("expected a parse failure");
  } catch (const ma::JsonParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("mem.json:3:") != std::string::npos);
    CHECK(msg.find("malformed JSON") != std::string::npos);
  }

  CHECK_THROWS_AS(ma::load_json_file("/nonexistent/nope.json"),
                  ma::JsonParseError);
}

TEST_CASE("report serializations expose stable field names") {
  Market market{3, 3};
  ma::Mechanism rs = ma::random_stable_mechanism(market);
  ma::StabilityReport report =
      ma::ex_post_stable_at(rs, ma::pinned_3x3_profile());
  Json j = ma::stability_report_to_json(report);
  CHECK(j["notion"].get<std::string>() == "ex-post");
  CHECK(j["stable"].get<bool>());
  CHECK(j["exhaustive"].get<bool>());
  CHECK(j.contains("stats"));
  CHECK(j["stats"].contains("lps_solved"));

  ma::CaseReport cr = ma::run_case(ma::CaseId::unique_stable());
  Json cj = ma::case_report_to_json(cr);
  CHECK(cj["name"].get<std::string>() == "unique-stable");
  CHECK(cj["pass"].get<bool>());
  CHECK(cj["claims"].is_array());
  CHECK_FALSE(cj["claims"].empty());
}
