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
//
// End-to-end guarantees of the auditor, one line per criterion. The binary
// prints "criterion N: PASS/FAIL - detail" for each and exits with the
// number of failures, so it doubles as a regression gate.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "matchaudit.hpp"

namespace ma = matchaudit;
using ma::AgentId;
using ma::Coalition;
using ma::man;
using ma::Market;
using ma::Matching;
using ma::Prior;
using ma::Rational;
using ma::woman;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1fs", s);
  return buf;
}

bool claim_holds(const ma::CaseReport& rep, const std::string& label) {
  for (const ma::CaseClaim& c : rep.claims) {
    if (c.label == label) return c.as_expected();
  }
  return false;
}

ma::PreferenceProfile random_full_profile(const Market& market,
                                          std::mt19937& rng) {
  std::vector<ma::Ranking> rankings;
  for (const AgentId& a : market.agents()) {
    std::vector<AgentId> order;
    for (int i = 0; i < market.opposite_count(a); ++i) {
      order.push_back(AgentId{ma::opposite(a.side), i});
    }
    std::shuffle(order.begin(), order.end(), rng);
    order.push_back(a);
    rankings.push_back(ma::Ranking::from_order(a, market, std::move(order)));
  }
  return ma::PreferenceProfile(market, std::move(rankings));
}

Prior random_product_prior(const Market& market, std::mt19937& rng) {
  std::uniform_int_distribution<int> type_count(1, 3);
  std::uniform_int_distribution<long> weight(1, 9);
  std::vector<ma::AgentTypeDistribution> dists;
  for (const AgentId& a : market.agents()) {
    int t = type_count(rng);
    std::vector<ma::Ranking> types;
    while (static_cast<int>(types.size()) < t) {
      std::vector<AgentId> order;
      for (int i = 0; i < market.opposite_count(a); ++i) {
        order.push_back(AgentId{ma::opposite(a.side), i});
      }
      std::shuffle(order.begin(), order.end(), rng);
      order.push_back(a);
      ma::Ranking candidate = ma::Ranking::from_order(a, market, order);
      if (std::find(types.begin(), types.end(), candidate) == types.end()) {
        types.push_back(std::move(candidate));
      }
    }
    std::vector<long> raw;
    long total = 0;
    for (int i = 0; i < t; ++i) {
      raw.push_back(weight(rng));
      total += raw.back();
    }
    std::vector<std::pair<ma::Ranking, Rational>> weighted;
    for (int i = 0; i < t; ++i) {
      weighted.push_back({types[i], Rational(raw[i], total)});
    }
    dists.push_back({a, std::move(weighted)});
  }
  return ma::product_prior(market, dists);
}

// Recompute the per-threshold cdf slacks of one before/after comparison and
// confirm they certify exactly the claimed strict thresholds, with the
// sum-of-slacks positive precisely when some threshold is strict.
bool slacks_certify(const ma::RankDistribution& before,
                    const ma::RankDistribution& after,
                    const std::vector<int>& claimed_strict) {
  if (before.size() != after.size()) return false;
  std::vector<int> strict;
  Rational total;
  for (int n = 1; n <= before.size(); ++n) {
    Rational gap = after.cdf(n) - before.cdf(n);
    if (gap.sign() < 0) return false;  // not even a weak improvement
    if (gap.sign() > 0) strict.push_back(n);
    total += gap;
  }
  if (strict != claimed_strict) return false;
  return (total.sign() > 0) == !strict.empty();
}

// Artifacts shared across criteria: witnesses produced early feed the
// nesting transforms (criterion 6) and the slack audit (criterion 10).
struct Artifacts {
  std::optional<ma::InterimWitness> grand_witness;  // stable lottery, 3x3 iid
  std::optional<ma::BlockWitness> pair_witness;     // uniform perfect lottery
  std::optional<ma::PreferenceProfile> pair_profile;
  std::vector<std::pair<ma::BlockWitness, Prior>> ante_witnesses;
  std::size_t lps_solved = 0;
};

Outcome criterion_1() {
  auto start = std::chrono::steady_clock::now();
  Market market{3, 3};
  ma::CaseReport rep = ma::run_case(ma::CaseId::unique_stable());
  bool ok = rep.pass;

  ma::PreferenceProfile p = ma::case_internal::unique_stable_profile();
  std::vector<Matching> stable = ma::stable_set(p);
  ok = ok && stable.size() == 1 &&
       stable.front() == Matching::from_pairs(market, {{man(0), woman(1)},
                                                       {man(1), woman(2)},
                                                       {man(2), woman(0)}});

  ma::Mechanism urf = ma::uniform_random_full_mechanism(market);
  ma::StabilityReport r = ma::ex_post_stable_at(urf, p, 6);
  ok = ok && r.stable && r.exhaustive && r.stats.coalitions_checked == 63;

  ok = ok && !ma::ex_post_block(
                   urf, p,
                   Coalition::of({man(1), man(2), woman(0), woman(1)}))
                  .has_value();

  Rational grand_eps(7);  // sentinel; must be overwritten with exactly 0
  auto grand = ma::ex_post_block(urf, p, Coalition::of(market.agents()),
                                 nullptr, ma::kDefaultLpCellCap, &grand_eps);
  ok = ok && !grand.has_value() && grand_eps == Rational(0);

  ok = ok && claim_holds(
                 rep, "weak dominance forces the two rotation-triple equalities");
  ok = ok &&
       claim_holds(rep,
                   "weakly dominating lotteries keep every agent at "
                   "(1/3, 1/3, 1/3)");

  double elapsed = seconds_since(start);
  ok = ok && elapsed < 30.0;
  return {ok,
          "unique stable matching pinned, uniform perfect lottery ex-post "
          "stable at all 63 coalitions, grand epsilon = " +
              grand_eps.str() + ", " + fmt_seconds(elapsed)};
}

Outcome criterion_2(Artifacts& art) {
  auto start = std::chrono::steady_clock::now();
  Market market{3, 3};
  ma::CaseReport rep = ma::run_case(ma::CaseId::interim_grand());
  bool ok = rep.pass;

  ma::Mechanism rs = ma::random_stable_mechanism(market);
  ma::InstabilityWitness grand = ma::interim_instability_witness(rs);
  ok = ok && grand.kind == ma::InstabilityWitness::Kind::GrandCoalition &&
       grand.grand_witness.has_value() && grand.verification.ok;
  art.lps_solved += grand.stats.lps_solved;

  // Class-conditional rank distributions, recomputed from scratch.
  ma::PreferenceProfile pinned = ma::pinned_3x3_profile();
  std::vector<ma::PreferenceProfile> cls = ma::permutation_class(pinned);
  ok = ok && cls.size() == 36;
  Prior iid = ma::iid_uniform_prior(market);
  Prior conditioned = ma::condition(iid, ma::Event::profile_set(cls));
  ma::Mechanism swap = ma::partner_swap_mechanism(rs, pinned);
  const std::vector<Rational> before_form{Rational(2, 3), Rational(0),
                                          Rational(1, 3), Rational(0)};
  const std::vector<Rational> after_form{Rational(2, 3), Rational(1, 3),
                                         Rational(0), Rational(0)};
  for (const AgentId& a : market.agents()) {
    ok = ok && ma::rank_distribution(rs, conditioned, a).mass == before_form;
    ok = ok && ma::rank_distribution(swap, conditioned, a).mass == after_form;
  }

  if (grand.grand_witness) {
    const ma::InterimWitness& w = *grand.grand_witness;
    ok = ok && w.deviation.fallback() == ma::DeviationFallback::MimicBase;
    std::set<std::vector<int>> class_keys;
    for (const ma::PreferenceProfile& member : cls) {
      class_keys.insert(member.key());
    }
    for (const auto& [entry_profile, entry_lottery] : w.deviation.entries()) {
      (void)entry_lottery;
      ok = ok && class_keys.count(entry_profile.key()) == 1;
    }
    ok = ok && w.type_sets.size() == 6;
    ok = ok && ma::check_interim_witness(rs, iid, w).ok;
    art.grand_witness = w;
  }

  ma::Mechanism urf = ma::uniform_random_full_mechanism(market);
  ma::InstabilityWitness pair = ma::interim_instability_witness(urf);
  ok = ok && pair.kind == ma::InstabilityWitness::Kind::PairExPost &&
       pair.pair_witness.has_value() && pair.violation.has_value() &&
       pair.verification.ok;
  art.lps_solved += pair.stats.lps_solved;
  if (pair.pair_witness) {
    art.pair_witness = *pair.pair_witness;
    art.pair_profile = pair.violation->profile;
  }

  double elapsed = seconds_since(start);
  ok = ok && elapsed < 120.0;
  return {ok,
          "stable lottery blocked by the grand coalition at the interim "
          "stage (conditionals 2/3,0,1/3 vs 2/3,1/3,0); uniform perfect "
          "lottery blocked by an unmatched mutual-first pair; " +
              fmt_seconds(elapsed)};
}

Outcome criterion_3(Artifacts& art) {
  Market market{3, 3};
  bool ok = true;
  std::string details;
  for (const Rational& p :
       {Rational(1, 10), Rational(1, 8), Rational(1, 5)}) {
    auto start = std::chrono::steady_clock::now();
    ma::CaseReport rep = ma::run_case(ma::CaseId::exante_pair(p));
    ok = ok && rep.pass;

    Prior prior = ma::case_internal::commitment_prior(p);
    for (ma::Mechanism mech :
         {ma::random_stable_mechanism(market),
          ma::da_mechanism(market, ma::Side::Men),
          ma::da_mechanism(market, ma::Side::Women)}) {
      ma::AuditStats stats;
      auto w = ma::ex_ante_block(mech, prior,
                                 Coalition::of({man(0), woman(0)}), {},
                                 &stats);
      art.lps_solved += stats.lps_solved;
      ok = ok && w.has_value() &&
           ma::check_ex_ante_witness(mech, prior, *w).ok;
      if (w) art.ante_witnesses.push_back({*w, prior});
    }

    ma::StabilityReport sweep = ma::ex_ante_pairwise_stable(
        ma::random_stable_mechanism(market), prior);
    ok = ok && !sweep.stable && sweep.witness.has_value() &&
         sweep.witness->coalition == Coalition::of({man(0), woman(0)});

    double elapsed = seconds_since(start);
    ok = ok && elapsed < 10.0;
    if (!details.empty()) details += ", ";
    details += "p=" + p.str() + " " + fmt_seconds(elapsed);
  }
  return {ok,
          "commitment prior blocked ex-ante by {m1, w1} under all three "
          "mechanisms (" +
              details + ")"};
}

Outcome criterion_4(Artifacts& art) {
  auto start = std::chrono::steady_clock::now();
  Market market{3, 3};
  std::mt19937 rng(20260816u);
  ma::Mechanism rs = ma::random_stable_mechanism(market);

  bool ok = true;
  for (int i = 0; i < 200 && ok; ++i) {
    ma::PreferenceProfile p = random_full_profile(market, rng);
    ma::StabilityReport r = ma::ex_post_stable_at(rs, p, 6);
    art.lps_solved += r.stats.lps_solved;
    ok = r.stable && r.exhaustive;
  }

  std::uniform_int_distribution<long> weight(1, 10);
  for (int i = 0; i < 50 && ok; ++i) {
    ma::PreferenceProfile p = random_full_profile(market, rng);
    std::vector<Matching> stable = ma::stable_set(p);
    std::vector<std::pair<Matching, Rational>> outcomes;
    long total = 0;
    std::vector<long> raw;
    for (std::size_t k = 0; k < stable.size(); ++k) {
      raw.push_back(weight(rng));
      total += raw.back();
    }
    for (std::size_t k = 0; k < stable.size(); ++k) {
      outcomes.push_back({stable[k], Rational(raw[k], total)});
    }
    ma::RandomMatching lottery(std::move(outcomes));
    ma::Mechanism mix = ma::custom_mechanism(
        market, "stable-mixture",
        [lottery](const ma::PreferenceProfile&) { return lottery; });
    ma::StabilityReport r = ma::ex_post_stable_at(mix, p, 6);
    art.lps_solved += r.stats.lps_solved;
    ok = r.stable && r.exhaustive;
  }

  return {ok,
          "200 sampled profiles and 50 sampled stable mixtures all ex-post "
          "stable at every coalition, " +
              fmt_seconds(seconds_since(start))};
}

Outcome criterion_5(Artifacts& art) {
  auto start = std::chrono::steady_clock::now();
  Market market{3, 3};
  std::mt19937 rng(414213562u);
  ma::Mechanism da = ma::da_mechanism(market, ma::Side::Men);
  ma::Mechanism rs = ma::random_stable_mechanism(market);

  bool ok = true;
  for (int i = 0; i < 100 && ok; ++i) {
    Prior prior = random_product_prior(market, rng);
    for (const ma::Mechanism& mech : {da, rs}) {
      ma::StabilityReport r = ma::interim_pairwise_stable(mech, prior);
      art.lps_solved += r.stats.lps_solved;
      ok = ok && r.stable && r.exhaustive;
    }
  }
  return {ok,
          "100 sampled independent priors: proposing-side and stable-lottery "
          "mechanisms interim pairwise stable with exhaustive search, " +
              fmt_seconds(seconds_since(start))};
}

Outcome criterion_6(Artifacts& art) {
  Market market{3, 3};
  bool ok = true;
  int conditioned_count = 0;
  int lifted_count = 0;

  // Interim witnesses condition down to prior-weighted witnesses on the
  // conditioned prior, keeping the coalition.
  if (art.grand_witness) {
    ma::Mechanism rs = ma::random_stable_mechanism(market);
    Prior iid = ma::iid_uniform_prior(market);
    Prior conditioned = iid;
    ma::BlockWitness ante =
        ma::condition_to_ex_ante(rs, iid, *art.grand_witness, &conditioned);
    ok = ok && ante.coalition == art.grand_witness->coalition;
    ok = ok && ante.notion == ma::BlockNotion::ExAnte;
    ok = ok && ma::check_ex_ante_witness(rs, conditioned, ante).ok;
    for (const ma::AgentComparison& c : ante.agents) {
      ok = ok &&
           c.verdict.relation == ma::DominanceRelation::StrictlyDominates;
    }
    ++conditioned_count;
  } else {
    ok = false;
  }

  // Realized witnesses lift to interim witnesses at the point-mass prior.
  if (art.pair_witness && art.pair_profile) {
    ma::Mechanism urf = ma::uniform_random_full_mechanism(market);
    ma::InterimWitness lifted = ma::lift_to_interim(*art.pair_witness);
    ok = ok && lifted.coalition == art.pair_witness->coalition;
    ok = ok &&
         ma::check_interim_witness(
             urf, Prior::point_mass(*art.pair_profile), lifted)
             .ok;
    ++lifted_count;
  } else {
    ok = false;
  }

  // Every realized pair block found on the committed-pair support lifts too.
  ma::PreferenceProfile pinned = ma::pinned_3x3_profile();
  ma::Mechanism urf = ma::uniform_random_full_mechanism(market);
  auto pinned_block = ma::ex_post_block(
      urf, pinned, Coalition::of({man(0), woman(0)}));
  if (pinned_block) {
    ma::InterimWitness lifted = ma::lift_to_interim(*pinned_block);
    ok = ok &&
         ma::check_interim_witness(urf, Prior::point_mass(pinned), lifted).ok;
    ++lifted_count;
  } else {
    ok = false;
  }

  return {ok, "conditioned " + std::to_string(conditioned_count) +
                  " interim witness to the prior-weighted stage and lifted " +
                  std::to_string(lifted_count) +
                  " realized witnesses to the interim stage, all re-verified"};
}

Outcome criterion_7() {
  Market market{3, 3};
  ma::PreferenceProfile pinned = ma::pinned_3x3_profile();
  auto v = ma::mutual_first_violation(
      ma::uniform_random_full_mechanism(market), Prior::point_mass(pinned));
  bool ok = v.has_value() && v->man == man(0) && v->woman == woman(0) &&
            v->probability == Rational(1, 3);

  ma::Mechanism rs = ma::random_stable_mechanism(market);
  std::mt19937 rng(271828182u);
  int clean = 0;
  for (int i = 0; i < 100; ++i) {
    ma::PreferenceProfile p = random_full_profile(market, rng);
    if (!ma::mutual_first_violation(rs, Prior::point_mass(p)).has_value()) {
      ++clean;
    }
  }
  ok = ok && clean == 100;
  return {ok,
          "uniform perfect lottery matches the mutual-first pair with "
          "probability 1/3 only; stable lottery clean on 100 sampled "
          "point-mass priors"};
}

Outcome criterion_8() {
  Market market{3, 3};
  ma::Mechanism rs = ma::random_stable_mechanism(market);
  bool ok = true;

  for (const Rational& p : {Rational(1, 4), Rational(1, 2)}) {
    Prior prior = ma::case_internal::insurance_prior(p);
    const std::vector<Rational> form{
        p * (Rational(1) - p),
        (Rational(1) - p) * (Rational(1) - p) + p * p,
        p * (Rational(1) - p), Rational(0)};
    for (const AgentId& a : {man(1), woman(1)}) {
      ok = ok && ma::rank_distribution(rs, prior, a).mass == form;
    }
  }

  ma::EuBlockReport eu = ma::insurance_eu_report(
      Rational(1, 2), {Rational(1), Rational(3, 4), Rational(0)});
  ok = ok && eu.eu_mechanism == Rational(5, 8) && eu.eu_pair == Rational(3, 4);
  ok = ok && eu.pair_preferred;
  ok = ok && eu.fosd.relation == ma::DominanceRelation::Incomparable;

  Prior half = ma::case_internal::insurance_prior(Rational(1, 2));
  ok = ok && !ma::ex_ante_block(rs, half, Coalition::of({man(1), woman(1)}))
                  .has_value();
  ma::StabilityReport interim = ma::interim_pairwise_stable(rs, half);
  ok = ok && interim.stable && interim.exhaustive;

  ok = ok && ma::run_case(ma::CaseId::insurance_eu(
                              Rational(1, 2),
                              {Rational(1), Rational(3, 4), Rational(0)}))
                 .pass;

  return {ok,
          "insurance distributions exact at p = 1/4 and 1/2; cardinal "
          "comparison 5/8 vs 3/4 prefers the pairing while the ordinal "
          "auditor reports incomparable and finds no block"};
}

Outcome criterion_9() {
  auto start = std::chrono::steady_clock::now();
  bool ok = true;

  // The two pinned parameter points: the enumeration is the oracle. The
  // compact schools-full closed form holds only at delta = 0; its corrected
  // variant and the other three forms hold exactly.
  for (const auto& [d, e] :
       std::vector<std::pair<Rational, Rational>>{
           {Rational(1, 5), Rational(3, 20)},
           {Rational(1, 10), Rational(1, 12)}}) {
    ma::CorrelatedSchoolsReport r = ma::correlated_schools_check(d, e);
    ok = ok && !r.schools_full_form_holds && r.schools_full_corrected_holds &&
         r.schools_sub_form_holds && r.students_full_form_holds &&
         r.students_sub_form_holds;
    ok = ok && ma::run_case(ma::CaseId::correlated_schools(d, e)).pass;
  }

  // 5x5 grid sweep. The all-four-prefer verdict is false everywhere; the
  // stated parameter inequality nevertheless holds at exactly these four
  // points, which is precisely where verdict and inequality disagree.
  const std::vector<Rational> grid = {Rational(1, 12), Rational(1, 10),
                                      Rational(3, 20), Rational(1, 5),
                                      Rational(1, 4)};
  const std::set<std::pair<std::string, std::string>> inequality_points = {
      {"1/10", "1/12"}, {"3/20", "1/10"}, {"1/5", "3/20"}, {"1/4", "1/5"}};
  int mismatches = 0;
  for (const Rational& d : grid) {
    for (const Rational& e : grid) {
      ma::CorrelatedSchoolsReport r = ma::correlated_schools_check(d, e);
      ok = ok && !r.all_four_prefer_sub;
      bool expect_inequality =
          inequality_points.count({d.str(), e.str()}) == 1;
      ok = ok && r.stated_inequality == expect_inequality;
      ok = ok && r.verdict_matches_inequality == !expect_inequality;
      if (!r.verdict_matches_inequality) ++mismatches;
    }
  }
  ok = ok && mismatches == 4;

  return {ok,
          "enumeration authoritative on the 256-profile support: corrected "
          "schools form holds, all-four verdict false across the 5x5 grid, "
          "stated inequality marks exactly the 4 documented disagreements, " +
              fmt_seconds(seconds_since(start))};
}

Outcome criterion_10(const Artifacts& art) {
  bool ok = true;

  // The solver re-verifies every optimum internally (a mismatch throws, so
  // reaching this point means all runs re-verified). Confirm the accounting
  // on a fresh probe.
  ma::LinearProgram probe;
  probe.num_vars = 2;
  probe.objective = {Rational(1), Rational(1)};
  probe.constraints.push_back({{Rational(1), Rational(1)},
                               ma::ConstraintSense::LessEq, Rational(1)});
  ma::LpStats stats;
  ma::LpResult res = ma::solve_max(probe, &stats);
  ok = ok && res.status == ma::LpResult::Status::Optimal &&
       stats.verified_optima == 1 && stats.solves == 1;
  ok = ok && art.lps_solved > 0;

  // Recompute per-threshold slacks on every blocking witness produced above.
  std::size_t comparisons = 0;
  if (art.pair_witness) {
    for (const ma::AgentComparison& c : art.pair_witness->agents) {
      ok = ok && slacks_certify(c.before, c.after,
                                c.verdict.strict_thresholds);
      ok = ok && !c.verdict.strict_thresholds.empty();
      ++comparisons;
    }
  }
  for (const auto& [w, prior] : art.ante_witnesses) {
    for (const ma::AgentComparison& c : w.agents) {
      ok = ok && slacks_certify(c.before, c.after,
                                c.verdict.strict_thresholds);
      ok = ok && !c.verdict.strict_thresholds.empty();
      ++comparisons;
    }
  }
  if (art.grand_witness) {
    for (const ma::TypeComparison& c : art.grand_witness->per_type) {
      ok = ok && slacks_certify(c.before, c.after,
                                c.verdict.strict_thresholds);
      ok = ok && !c.verdict.strict_thresholds.empty();
      ++comparisons;
    }
  }
  ok = ok && comparisons >= 20;

  return {ok, "every optimum re-verified (" + std::to_string(art.lps_solved) +
                  " audit solves); per-threshold slack recomputation "
                  "certified strictness on " +
                  std::to_string(comparisons) + " witness comparisons"};
}

}  // namespace

int main() {
  int failures = 0;
  Artifacts art;
  auto run = [&](int n, const std::function<Outcome()>& body) {
    Outcome out;
    try {
      out = body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.ok) ++failures;
    std::printf("criterion %d: %s - %s\n", n, out.ok ? "PASS" : "FAIL",
                out.detail.c_str());
    std::fflush(stdout);
    return out.ok;
  };

  run(1, [&] { return criterion_1(); });
  run(2, [&] { return criterion_2(art); });
  run(3, [&] { return criterion_3(art); });
  run(4, [&] { return criterion_4(art); });
  run(5, [&] { return criterion_5(art); });
  run(6, [&] { return criterion_6(art); });
  run(7, [&] { return criterion_7(); });
  run(8, [&] { return criterion_8(); });
  run(9, [&] { return criterion_9(); });
  run(10, [&] { return criterion_10(art); });

  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", failures);
  }
  return failures;
}
