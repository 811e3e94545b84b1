// Copyright 2026 The matchaudit Authors
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

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matchaudit/dominance.hpp"
#include "matchaudit/errors.hpp"
#include "matchaudit/lp.hpp"
#include "matchaudit/market.hpp"
#include "matchaudit/matching.hpp"
#include "matchaudit/mechanism.hpp"
#include "matchaudit/prior.hpp"
#include "matchaudit/profile.hpp"
#include "matchaudit/rational.hpp"
#include "matchaudit/witness.hpp"

namespace matchaudit {

// Deciding whether a coalition blocks reduces, for each candidate deviation
// support, to one exact LP: variables are the deviation's lottery weights, a
// feasibility row per dominance threshold keeps every member weakly better
// off, and a slack variable shared across members (maximized) is positive
// exactly when every member can be made strictly better off. A positive
// optimum is converted into a witness; infeasibility or a zero optimum rules
// the candidate out exactly.

// Tableau-entry budget for a single LP (rows x columns). Searches that would
// exceed it skip the candidate and report themselves as non-exhaustive
// instead of thrashing.
inline constexpr std::size_t kDefaultLpCellCap = 2'000'000;

struct AuditStats {
  std::size_t coalitions_checked = 0;
  std::size_t families_examined = 0;  // interim candidate type-set families
  std::size_t lps_solved = 0;
  std::size_t lp_pivots = 0;
  std::size_t expansions = 0;      // interim only-if expansion rounds
  std::size_t seeds_accepted = 0;  // interim witnesses verified from a seed
  bool budget_exhausted = false;

  void absorb(const AuditStats& o) {
    coalitions_checked += o.coalitions_checked;
    families_examined += o.families_examined;
    lps_solved += o.lps_solved;
    lp_pivots += o.lp_pivots;
    expansions += o.expansions;
    seeds_accepted += o.seeds_accepted;
    budget_exhausted = budget_exhausted || o.budget_exhausted;
  }
};

struct StabilityReport {
  std::string notion;     // "ex-post", "ex-ante", or "interim"
  bool stable = true;
  bool exhaustive = true;  // false iff some budget cap was hit on the way
  std::optional<BlockWitness> witness;
  std::optional<InterimWitness> interim_witness;
  AuditStats stats;
};

struct ExAnteOptions {
  // When set, the deviation may differ from the mechanism only on these
  // profiles (elsewhere it mimics). Mimicking must itself be internal, which
  // holds trivially for the grand coalition and is validated otherwise.
  std::optional<std::vector<PreferenceProfile>> deviation_profiles;
  std::size_t max_lp_cells = kDefaultLpCellCap;
};

// A proposed interim witness to verify before searching: per-member type sets
// plus the deviation plan. If it checks out it is returned as-is.
struct InterimSeed {
  std::vector<std::pair<AgentId, std::vector<Ranking>>> type_sets;
  DeviationPlan deviation;
};

struct InterimOptions {
  std::size_t max_candidate_sets = 1024;  // type-set families per coalition
  int expansion_rounds = 8;               // only-if repair rounds per family
  std::optional<std::vector<PreferenceProfile>> deviation_profiles;
  std::optional<InterimSeed> seed;
  std::size_t max_lp_cells = kDefaultLpCellCap;
};

struct InterimBlockResult {
  std::optional<InterimWitness> witness;
  // Meaningful when no witness was found: true means every candidate family
  // was decided, so the coalition definitely does not block.
  bool exhaustive = true;
  AuditStats stats;
};

// Singleton coalitions in agent order, then man-woman pairs in (man, woman)
// order.
inline std::vector<Coalition> pairwise_coalitions(const Market& market) {
  std::vector<Coalition> out;
  for (AgentId a : market.agents()) out.push_back(Coalition::of({a}));
  for (int i = 0; i < market.num_men; ++i) {
    for (int j = 0; j < market.num_women; ++j) {
      out.push_back(Coalition::of({man(i), woman(j)}));
    }
  }
  return out;
}

// All coalitions of size up to max_size (0 means no limit), by increasing
// size and lexicographic member order within a size.
inline std::vector<Coalition> coalitions_up_to(const Market& market,
                                               int max_size = 0) {
  std::vector<AgentId> agents = market.agents();
  int n = market.total();
  int limit = max_size <= 0 ? n : std::min(max_size, n);
  std::vector<Coalition> out;
  for (int size = 1; size <= limit; ++size) {
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    for (;;) {
      std::vector<AgentId> members(size);
      for (int i = 0; i < size; ++i) members[i] = agents[idx[i]];
      out.push_back(Coalition::of(std::move(members)));
      int i = size - 1;
      while (i >= 0 && idx[i] == n - size + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int k = i + 1; k < size; ++k) idx[k] = idx[k - 1] + 1;
    }
  }
  return out;
}

namespace stability_internal {

// Ranks of each internal matching for one ranking, as rank of the owner's
// partner (self when single).
inline std::vector<int> internal_ranks(const std::vector<Matching>& internal,
                                       const Ranking& ranking) {
  std::vector<int> out(internal.size());
  for (std::size_t k = 0; k < internal.size(); ++k) {
    out[k] = ranking.rank_of(internal[k].partner_of(ranking.owner()));
  }
  return out;
}

inline std::vector<Rational> pmf_to_cdf(const std::vector<Rational>& pmf) {
  std::vector<Rational> cdf(pmf.size());
  Rational run;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    run += pmf[i];
    cdf[i] = run;
  }
  return cdf;
}

// Accumulate `weight * rank_pmf(lottery under ranking)` into acc.
inline void add_rank_pmf(std::vector<Rational>& acc, const Rational& weight,
                         const RandomMatching& lottery, const Ranking& ranking) {
  for (const auto& [mu, w] : lottery.outcomes()) {
    acc[ranking.rank_of(mu.partner_of(ranking.owner())) - 1] += weight * w;
  }
}

// Builds the blocking LP over a fixed set of lottery groups. Each group g is
// a simplex over the internal matchings (sum of its K variables equals 1) and
// carries a weight w_{g}. Dominance targets index into groups: target row set
// (a, n): sum over its groups of w_g * Pr_g(rank <= n) >= rhs(n); plus one
// strictness row per target with the shared slack variable. Returns nullopt
// when the tableau budget would be exceeded.
struct LpTarget {
  // Groups contributing to this target, with their weights and the rank of
  // each internal matching for the relevant (member, type).
  std::vector<std::pair<std::size_t, Rational>> groups;  // (group, weight)
  std::vector<const std::vector<int>*> ranks;            // per listed group
  std::vector<Rational> before_cdf;  // rhs per threshold, 1..S-1 (unnormalized)
  Rational strict_scale;             // epsilon coefficient (event mass)
  int outcome_count = 0;             // S
};

struct BlockLpSolution {
  // One optimal lottery per group, in group order: (matching index, weight).
  std::vector<std::vector<std::pair<std::size_t, Rational>>> lotteries;
  Rational epsilon;
};

inline std::optional<BlockLpSolution> solve_block_lp(
    std::size_t num_groups, std::size_t num_internal,
    const std::vector<LpTarget>& targets, std::size_t max_lp_cells,
    AuditStats* stats, bool* budget_hit, Rational* opt_epsilon = nullptr) {
  const std::size_t vars = num_groups * num_internal + 1;
  std::size_t rows = num_groups;
  for (const LpTarget& t : targets) rows += t.before_cdf.size() + 1;
  // Inequality rows each add a slack and an artificial; simplex rows add an
  // artificial. Estimate the tableau accordingly.
  std::size_t cols = vars + 2 * rows + 1;
  if (rows * cols > max_lp_cells) {
    if (budget_hit) *budget_hit = true;
    return std::nullopt;
  }

  LinearProgram lp;
  lp.num_vars = static_cast<int>(vars);
  lp.objective.assign(vars, Rational(0));
  lp.objective[vars - 1] = Rational(1);
  for (std::size_t g = 0; g < num_groups; ++g) {
    LinearConstraint c;
    c.coeffs.assign(vars, Rational(0));
    for (std::size_t k = 0; k < num_internal; ++k) {
      c.coeffs[g * num_internal + k] = Rational(1);
    }
    c.sense = ConstraintSense::Equal;
    c.rhs = Rational(1);
    lp.constraints.push_back(std::move(c));
  }
  for (const LpTarget& t : targets) {
    const int s = t.outcome_count;
    for (int n = 1; n <= s - 1; ++n) {
      LinearConstraint c;
      c.coeffs.assign(vars, Rational(0));
      for (std::size_t gi = 0; gi < t.groups.size(); ++gi) {
        const auto& [g, w] = t.groups[gi];
        const std::vector<int>& ranks = *t.ranks[gi];
        for (std::size_t k = 0; k < num_internal; ++k) {
          if (ranks[k] <= n) c.coeffs[g * num_internal + k] += w;
        }
      }
      c.sense = ConstraintSense::GreaterEq;
      c.rhs = t.before_cdf[n - 1];
      lp.constraints.push_back(std::move(c));
    }
    LinearConstraint strict;
    strict.coeffs.assign(vars, Rational(0));
    Rational rhs;
    for (std::size_t gi = 0; gi < t.groups.size(); ++gi) {
      const auto& [g, w] = t.groups[gi];
      const std::vector<int>& ranks = *t.ranks[gi];
      for (std::size_t k = 0; k < num_internal; ++k) {
        if (ranks[k] < s) {
          strict.coeffs[g * num_internal + k] += w * Rational(s - ranks[k]);
        }
      }
    }
    for (const Rational& f : t.before_cdf) rhs += f;
    strict.coeffs[vars - 1] = -t.strict_scale;
    strict.sense = ConstraintSense::GreaterEq;
    strict.rhs = rhs;
    lp.constraints.push_back(std::move(strict));
  }

  LpStats lp_stats;
  LpResult result = solve_max(lp, &lp_stats);
  if (stats) {
    ++stats->lps_solved;
    stats->lp_pivots += lp_stats.pivots;
  }
  if (result.status == LpResult::Status::Unbounded) {
    throw std::logic_error("solve_block_lp: blocking LP cannot be unbounded");
  }
  if (result.status == LpResult::Status::Optimal && opt_epsilon) {
    *opt_epsilon = result.value;
  }
  if (result.status != LpResult::Status::Optimal ||
      result.value.sign() <= 0) {
    return std::nullopt;
  }
  BlockLpSolution out;
  out.epsilon = result.value;
  out.lotteries.resize(num_groups);
  for (std::size_t g = 0; g < num_groups; ++g) {
    for (std::size_t k = 0; k < num_internal; ++k) {
      const Rational& q = result.assignment[g * num_internal + k];
      if (q.sign() > 0) out.lotteries[g].emplace_back(k, q);
    }
  }
  return out;
}

inline RandomMatching lottery_from_weights(
    const std::vector<Matching>& internal,
    const std::vector<std::pair<std::size_t, Rational>>& weights) {
  std::vector<std::pair<Matching, Rational>> outcomes;
  outcomes.reserve(weights.size());
  for (const auto& [k, q] : weights) outcomes.emplace_back(internal[k], q);
  return RandomMatching(std::move(outcomes));
}

}  // namespace stability_internal

// Decides whether the coalition blocks the mechanism at one realized profile:
// is there an internal lottery giving every member a rank distribution that
// strictly first-order dominates its distribution under the mechanism?
// Returns the witness, or nullopt when no such deviation exists. An LP too
// large for the budget sets stats->budget_exhausted and returns nullopt.
inline std::optional<BlockWitness> ex_post_block(
    const Mechanism& mechanism, const PreferenceProfile& profile,
    const Coalition& coalition, AuditStats* stats = nullptr,
    std::size_t max_lp_cells = kDefaultLpCellCap,
    Rational* opt_epsilon = nullptr) {
  namespace si = stability_internal;
  const Market& market = mechanism.market();
  if (profile.market() != market) {
    throw std::invalid_argument("ex_post_block: profile market mismatch");
  }
  coalition.validate_in(market);

  std::vector<Matching> internal =
      enumerate_internal_matchings(market, coalition.members());
  const RandomMatching& base = mechanism.evaluate(profile);

  std::vector<si::LpTarget> targets;
  std::vector<std::vector<int>> ranks_store;
  ranks_store.reserve(coalition.size());
  for (const AgentId& a : coalition.members()) {
    const Ranking& r = profile.ranking(a);
    ranks_store.push_back(si::internal_ranks(internal, r));
    si::LpTarget t;
    t.groups = {{0, Rational(1)}};
    t.ranks = {&ranks_store.back()};
    std::vector<Rational> cdf = si::pmf_to_cdf(base.rank_pmf(r));
    cdf.pop_back();  // threshold S is always tight
    t.before_cdf = std::move(cdf);
    t.strict_scale = Rational(1);
    t.outcome_count = r.outcome_count();
    targets.push_back(std::move(t));
  }

  bool budget_hit = false;
  auto solution = si::solve_block_lp(1, internal.size(), targets, max_lp_cells,
                                     stats, &budget_hit, opt_epsilon);
  if (budget_hit && stats) stats->budget_exhausted = true;
  if (!solution) return std::nullopt;

  RandomMatching dev = si::lottery_from_weights(internal, solution->lotteries[0]);
  BlockWitness w;
  w.notion = BlockNotion::ExPost;
  w.coalition = coalition;
  w.profile = profile;
  w.deviation = DeviationPlan({{profile, dev}}, DeviationFallback::AllSingle);
  for (const AgentId& a : coalition.members()) {
    const Ranking& r = profile.ranking(a);
    AgentComparison cmp;
    cmp.agent = a;
    cmp.before = {a, base.rank_pmf(r)};
    cmp.after = {a, dev.rank_pmf(r)};
    cmp.verdict = fosd_compare(cmp.after, cmp.before);
    if (cmp.verdict.relation != DominanceRelation::StrictlyDominates) {
      throw std::logic_error(
          "ex_post_block: LP optimum did not yield strict dominance");
    }
    w.agents.push_back(std::move(cmp));
  }
  return w;
}

// Sweeps coalitions (all sizes up to max_coalition_size; 0 = every size) in
// canonical order and reports the first ex-post block at the profile, or
// stability if none blocks.
inline StabilityReport ex_post_stable_at(const Mechanism& mechanism,
                                         const PreferenceProfile& profile,
                                         int max_coalition_size = 0,
                                         std::size_t max_lp_cells = kDefaultLpCellCap) {
  StabilityReport report;
  report.notion = "ex-post";
  for (const Coalition& c :
       coalitions_up_to(mechanism.market(), max_coalition_size)) {
    ++report.stats.coalitions_checked;
    auto w = ex_post_block(mechanism, profile, c, &report.stats, max_lp_cells);
    if (w) {
      report.stable = false;
      report.witness = std::move(w);
      return report;
    }
  }
  report.exhaustive = !report.stats.budget_exhausted;
  return report;
}

namespace stability_internal {

// Shared per-(prior, coalition) precomputation for the prior-based notions.
struct MemberContext {
  const Prior* prior = nullptr;
  const Mechanism* mechanism = nullptr;
  std::vector<AgentId> members;
  // Per member: its marginal types (canonical order) and their outcome count.
  std::vector<std::vector<std::pair<Ranking, Rational>>> types;
  std::vector<int> outcome_count;
  // type_of[p][j]: index into types[j] of member j's ranking at support
  // profile p.
  std::vector<std::vector<int>> type_of;
  std::vector<Matching> internal;
  // iranks[j][t][k]: rank member j of type t assigns to internal matching k.
  std::vector<std::vector<std::vector<int>>> iranks;
  // Cached mechanism lotteries, one per support profile (stable addresses).
  std::vector<const RandomMatching*> base;
  // Restriction (nullopt = deviation free everywhere): sorted profile keys.
  std::optional<std::vector<std::vector<int>>> restricted_keys;
  std::vector<bool> in_restriction;  // per support profile

  std::size_t num_members() const { return members.size(); }
  const WeightedProfile& wp(std::size_t p) const {
    return prior->support()[p];
  }
  std::size_t support_size() const { return prior->support().size(); }
};

inline MemberContext build_member_context(
    const Mechanism& mechanism, const Prior& prior, const Coalition& coalition,
    const std::optional<std::vector<PreferenceProfile>>& deviation_profiles) {
  const Market& market = mechanism.market();
  if (prior.market() != market) {
    throw std::invalid_argument("blocking search: prior market mismatch");
  }
  coalition.validate_in(market);
  MemberContext ctx;
  ctx.prior = &prior;
  ctx.mechanism = &mechanism;
  ctx.members = coalition.members();
  ctx.internal = enumerate_internal_matchings(market, ctx.members);
  for (const AgentId& a : ctx.members) {
    ctx.types.push_back(marginal_types(prior, a));
    ctx.outcome_count.push_back(market.opposite_count(a) + 1);
    if (ctx.types.back().size() > 64) {
      throw ResourceLimitError("blocking search: too many types per member",
                               "member_type_cap", 64);
    }
  }
  ctx.iranks.resize(ctx.members.size());
  for (std::size_t j = 0; j < ctx.members.size(); ++j) {
    ctx.iranks[j].reserve(ctx.types[j].size());
    for (const auto& [type, w] : ctx.types[j]) {
      ctx.iranks[j].push_back(internal_ranks(ctx.internal, type));
    }
  }
  ctx.type_of.assign(prior.support().size(),
                     std::vector<int>(ctx.members.size()));
  for (std::size_t p = 0; p < prior.support().size(); ++p) {
    for (std::size_t j = 0; j < ctx.members.size(); ++j) {
      const Ranking& r = prior.support()[p].profile.ranking(ctx.members[j]);
      const auto& list = ctx.types[j];
      auto it = std::lower_bound(
          list.begin(), list.end(), r,
          [](const auto& entry, const Ranking& rr) { return entry.first < rr; });
      ctx.type_of[p][j] = static_cast<int>(it - list.begin());
    }
  }
  ctx.base.resize(prior.support().size());
  for (std::size_t p = 0; p < prior.support().size(); ++p) {
    ctx.base[p] = &mechanism.evaluate(prior.support()[p].profile);
  }
  if (deviation_profiles) {
    std::vector<std::vector<int>> keys;
    keys.reserve(deviation_profiles->size());
    for (const PreferenceProfile& p : *deviation_profiles) {
      if (p.market() != market) {
        throw std::invalid_argument(
            "blocking search: restriction profile market mismatch");
      }
      keys.push_back(p.key());
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    ctx.restricted_keys = std::move(keys);
    ctx.in_restriction.resize(prior.support().size());
    for (std::size_t p = 0; p < prior.support().size(); ++p) {
      ctx.in_restriction[p] = std::binary_search(
          ctx.restricted_keys->begin(), ctx.restricted_keys->end(),
          prior.support()[p].profile.key());
    }
    // Outside the restriction the coalition mimics the mechanism, which is a
    // legal deviation only if the mechanism's own lottery is internal there.
    if (!coalition.is_grand(market)) {
      for (std::size_t p = 0; p < prior.support().size(); ++p) {
        if (!ctx.in_restriction[p] &&
            !lottery_internal_to(mechanism.evaluate(prior.support()[p].profile),
                                 coalition)) {
          throw std::invalid_argument(
              "blocking search: restricted deviations must mimic a mechanism "
              "that is internal to the coalition outside the restriction");
        }
      }
    }
  }
  return ctx;
}

}  // namespace stability_internal

}  // namespace matchaudit

#include "matchaudit/stability_search.hpp"  // IWYU pragma: export
