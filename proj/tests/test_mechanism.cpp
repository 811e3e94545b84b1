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

#include "matchaudit/cases.hpp"
#include "matchaudit/market.hpp"
#include "matchaudit/matching.hpp"
#include "matchaudit/mechanism.hpp"
#include "matchaudit/prior.hpp"
#include "matchaudit/profile.hpp"
#include "matchaudit/stability.hpp"

namespace ma = matchaudit;
using ma::AgentId;
using ma::man;
using ma::Market;
using ma::Matching;
using ma::Rational;
using ma::Side;
using ma::woman;

namespace {

ma::Ranking order_of(const AgentId& owner, const Market& market,
                     std::vector<AgentId> seq) {
  return ma::Ranking::from_order(owner, market, std::move(seq));
}

// The classic cyclic 3x3 instance with three stable matchings.
ma::PreferenceProfile cyclic_profile() {
  Market market{3, 3};
  auto mr = [&](int i, int a, int b, int c) {
    return order_of(man(i), market, {woman(a), woman(b), woman(c), man(i)});
  };
  auto wr = [&](int j, int a, int b, int c) {
    return order_of(woman(j), market, {man(a), man(b), man(c), woman(j)});
  };
  return ma::PreferenceProfile(market, {mr(0, 0, 1, 2), mr(1, 1, 2, 0),
                                        mr(2, 2, 0, 1), wr(0, 1, 2, 0),
                                        wr(1, 2, 0, 1), wr(2, 0, 1, 2)});
}

}  // namespace

TEST_CASE("deferred acceptance finds the proposing-side optimum") {
  ma::PreferenceProfile p = cyclic_profile();
  Market market = p.market();

  Matching men_opt = ma::deferred_acceptance(p, Side::Men);
  CHECK(men_opt == Matching::from_pairs(market, {{man(0), woman(0)},
                                                 {man(1), woman(1)},
                                                 {man(2), woman(2)}}));
  Matching women_opt = ma::deferred_acceptance(p, Side::Women);
  CHECK(women_opt == Matching::from_pairs(market, {{man(0), woman(2)},
                                                   {man(1), woman(0)},
                                                   {man(2), woman(1)}}));
  CHECK(ma::is_stable_matching(p, men_opt).stable);
  CHECK(ma::is_stable_matching(p, women_opt).stable);

  // Side-optimality: each man weakly prefers the men-optimal partner to his
  // partner in any stable matching, and dually for women.
  std::vector<Matching> stable = ma::stable_set(p);
  CHECK(stable.size() == 3);
  for (const Matching& mu : stable) {
    for (int i = 0; i < 3; ++i) {
      CHECK(p.rank_of(man(i), men_opt.partner_of(man(i))) <=
            p.rank_of(man(i), mu.partner_of(man(i))));
      CHECK(p.rank_of(woman(i), women_opt.partner_of(woman(i))) <=
            p.rank_of(woman(i), mu.partner_of(woman(i))));
    }
  }
}

TEST_CASE("deferred acceptance respects unacceptability") {
  Market market{2, 2};
  ma::PreferenceProfile p(
      market,
      {order_of(man(0), market, {woman(0), man(0), woman(1)}),
       order_of(man(1), market, {woman(0), woman(1), man(1)}),
       order_of(woman(0), market, {man(1), man(0), woman(0)}),
       order_of(woman(1), market, {woman(1), man(0), man(1)})});
  Matching mu = ma::deferred_acceptance(p, Side::Men);
  CHECK(mu.partner_of(man(1)) == woman(0));
  CHECK_FALSE(mu.is_matched(man(0)));   // his remaining option is unacceptable
  CHECK_FALSE(mu.is_matched(woman(1)));  // she accepts no one
  CHECK(ma::is_stable_matching(p, mu).stable);
}

TEST_CASE("deferred acceptance commutes with relabeling") {
  ma::PreferenceProfile p = cyclic_profile();
  ma::AgentPermutation sigma;
  sigma.man_map = {1, 2, 0};
  sigma.woman_map = {2, 0, 1};
  ma::PreferenceProfile q = ma::permute_profile(p, sigma);
  Matching direct = ma::deferred_acceptance(q, Side::Men);
  Matching base = ma::deferred_acceptance(p, Side::Men);
  for (int i = 0; i < 3; ++i) {
    AgentId partner = base.partner_of(man(i));
    AgentId expected = partner == man(i) ? sigma.apply(man(i))
                                         : sigma.apply(partner);
    CHECK(direct.partner_of(sigma.apply(man(i))) == expected);
  }
}

TEST_CASE("stable set enumeration matches the deterministic checker") {
  // Single stable matching instances.
  CHECK(ma::stable_set(ma::pinned_3x3_profile()).size() == 1);
  ma::PreferenceProfile unique = ma::case_internal::unique_stable_profile();
  std::vector<Matching> s = ma::stable_set(unique);
  REQUIRE(s.size() == 1);
  CHECK(s.front() == Matching::from_pairs(unique.market(),
                                          {{man(0), woman(1)},
                                           {man(1), woman(2)},
                                           {man(2), woman(0)}}));

  // Cross-check against a brute-force filter.
  ma::PreferenceProfile p = cyclic_profile();
  std::size_t brute = 0;
  for (const Matching& mu : ma::enumerate_matchings(p.market())) {
    if (ma::is_stable_matching(p, mu).stable) ++brute;
  }
  CHECK(ma::stable_set(p).size() == brute);
}

TEST_CASE("built-in lottery mechanisms put the advertised mass") {
  Market market{3, 3};
  ma::PreferenceProfile p = ma::pinned_3x3_profile();

  ma::Mechanism uniform = ma::uniform_random_mechanism(market);
  const ma::RandomMatching& all = uniform.evaluate(p);
  CHECK(all.outcomes().size() == 34);
  for (const auto& [mu, w] : all.outcomes()) CHECK(w == Rational(1, 34));

  ma::Mechanism full = ma::uniform_random_full_mechanism(market);
  const ma::RandomMatching& perfect = full.evaluate(p);
  CHECK(perfect.outcomes().size() == 6);
  for (const auto& [mu, w] : perfect.outcomes()) {
    CHECK(mu.is_perfect());
    CHECK(w == Rational(1, 6));
  }
  ma::RankDistribution d = ma::rank_distribution_at(full, p, man(0));
  CHECK(d.mass == std::vector<Rational>{Rational(1, 3), Rational(1, 3),
                                        Rational(1, 3), Rational(0)});

  ma::Mechanism rs = ma::random_stable_mechanism(market);
  const ma::RandomMatching& pinned_rs = rs.evaluate(p);
  CHECK(pinned_rs.outcomes().size() == 1);
  ma::PreferenceProfile cyc = cyclic_profile();
  const ma::RandomMatching& cyc_rs = rs.evaluate(cyc);
  CHECK(cyc_rs.outcomes().size() == 3);
  for (const auto& [mu, w] : cyc_rs.outcomes()) {
    CHECK(w == Rational(1, 3));
    CHECK(ma::is_stable_matching(cyc, mu).stable);
  }

  ma::Mechanism da = ma::da_mechanism(market, Side::Men);
  CHECK(da.evaluate(cyc).outcomes().size() == 1);
  CHECK(da.evaluate(cyc).outcomes().front().first ==
        ma::deferred_acceptance(cyc, Side::Men));
}

TEST_CASE("mechanism evaluations are memoized per profile") {
  ma::Mechanism rs = ma::random_stable_mechanism(Market{3, 3});
  ma::PreferenceProfile p = ma::pinned_3x3_profile();
  const ma::RandomMatching& first = rs.evaluate(p);
  const ma::RandomMatching& second = rs.evaluate(p);
  CHECK(&first == &second);

  // Copies share the cache.
  ma::Mechanism copy = rs;
  CHECK(&copy.evaluate(p) == &first);

  Market other{2, 2};
  ma::PreferenceProfile foreign(
      other,
      {order_of(man(0), other, {woman(0), woman(1), man(0)}),
       order_of(man(1), other, {woman(0), woman(1), man(1)}),
       order_of(woman(0), other, {man(0), man(1), woman(0)}),
       order_of(woman(1), other, {man(0), man(1), woman(1)})});
  CHECK_THROWS_AS(rs.evaluate(foreign), std::invalid_argument);
}

TEST_CASE("table mechanisms override listed profiles only") {
  Market market{3, 3};
  ma::PreferenceProfile p = ma::pinned_3x3_profile();
  ma::PreferenceProfile q = ma::case_internal::unique_stable_profile();
  Matching swapped = Matching::from_pairs(market, {{man(0), woman(1)},
                                                   {man(1), woman(0)},
                                                   {man(2), woman(2)}});
  ma::Mechanism base = ma::random_stable_mechanism(market);
  ma::Mechanism table = ma::table_mechanism(
      market, {{p, ma::RandomMatching::point_mass(swapped)}}, base);

  CHECK(table.evaluate(p).outcomes().front().first == swapped);
  // Off-table profiles fall through to the base mechanism.
  CHECK(table.evaluate(q).outcomes() == base.evaluate(q).outcomes());

  CHECK_THROWS_AS(
      ma::table_mechanism(market,
                          {{p, ma::RandomMatching::point_mass(swapped)},
                           {p, ma::RandomMatching::point_mass(swapped)}},
                          base),
      std::invalid_argument);
}

TEST_CASE("partner-swap mechanisms follow relabelings of the base profile") {
  Market market{3, 3};
  ma::PreferenceProfile p = ma::pinned_3x3_profile();
  ma::Mechanism rs = ma::random_stable_mechanism(market);
  ma::Mechanism swap = ma::partner_swap_mechanism(rs, p);

  // At the base profile: the swapped diagonal.
  Matching expected = Matching::from_pairs(market, {{man(0), woman(1)},
                                                    {man(1), woman(0)},
                                                    {man(2), woman(2)}});
  const ma::RandomMatching& at_base = swap.evaluate(p);
  REQUIRE(at_base.outcomes().size() == 1);
  CHECK(at_base.outcomes().front().first == expected);

  // At a relabeling of the base profile: the image of the swap.
  ma::AgentPermutation sigma;
  sigma.man_map = {2, 0, 1};
  sigma.woman_map = {1, 2, 0};
  ma::PreferenceProfile moved = ma::permute_profile(p, sigma);
  const ma::RandomMatching& at_moved = swap.evaluate(moved);
  REQUIRE(at_moved.outcomes().size() == 1);
  const Matching& image = at_moved.outcomes().front().first;
  for (int i = 0; i < 3; ++i) {
    CHECK(image.partner_of(sigma.apply(man(i))) ==
          sigma.apply(expected.partner_of(man(i))));
  }

  // Outside the relabeling class: agree with the base mechanism.
  ma::PreferenceProfile q = ma::case_internal::unique_stable_profile();
  CHECK(swap.evaluate(q).outcomes() == rs.evaluate(q).outcomes());
}

TEST_CASE("prior-weighted rank distributions mix per-profile values") {
  ma::Prior prior = ma::case_internal::commitment_prior(Rational(1, 8));
  ma::Mechanism rs = ma::random_stable_mechanism(Market{3, 3});
  ma::RankDistribution before = ma::rank_distribution(rs, prior, man(0));
  CHECK(before.mass == std::vector<Rational>{Rational(11, 16), Rational(1, 8),
                                             Rational(3, 16), Rational(0)});
  CHECK(before.total_mass() == Rational(1));

  // Against a point mass the mixture degenerates to the single profile.
  ma::PreferenceProfile p = ma::pinned_3x3_profile();
  ma::Prior point = ma::Prior::point_mass(p);
  ma::RankDistribution at = ma::rank_distribution_at(rs, p, woman(2));
  ma::RankDistribution mixed = ma::rank_distribution(rs, point, woman(2));
  CHECK(at.mass == mixed.mass);
}

TEST_CASE("expected utility weighs rank mass by cardinal values") {
  Market market{3, 3};
  ma::Prior prior = ma::case_internal::insurance_prior(Rational(1, 2));
  ma::Mechanism rs = ma::random_stable_mechanism(market);

  // Utilities keyed by outcome: (w1, w2, w3, self) for man m2, whose own
  // ranking is fixed at w1 > w2 > w3. His partner is w1 with probability
  // p(1-p), w2 with (1-p)^2 + p^2, and w3 with p(1-p); at p = 1/2 that is
  // (1/4, 1/2, 1/4), so utilities (1, 3/4, 0) integrate to 5/8.
  ma::UtilityFunction u{man(1), {Rational(1), Rational(3, 4), Rational(0),
                                 Rational(0)}};
  Rational eu = ma::expected_utility(rs, prior, man(1), u);
  CHECK(eu == Rational(5, 8));

  // Constant utilities integrate to the constant.
  ma::UtilityFunction ones{man(1), {Rational(1), Rational(1), Rational(1),
                                    Rational(1)}};
  CHECK(ma::expected_utility(rs, prior, man(1), ones) == Rational(1));

  ma::UtilityFunction wrong{man(1), {Rational(1), Rational(1)}};
  CHECK_THROWS_AS(ma::expected_utility(rs, prior, man(1), wrong),
                  std::invalid_argument);
}
