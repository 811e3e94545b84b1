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
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matchaudit/stability.hpp"

namespace matchaudit {

namespace stability_internal {

// Unnormalized CDF at thresholds 1..S-1 (threshold S is always tight and
// never constrains, so it is dropped).
inline std::vector<Rational> threshold_cdf(const std::vector<Rational>& pmf) {
  std::vector<Rational> cdf = pmf_to_cdf(pmf);
  cdf.pop_back();
  return cdf;
}

}  // namespace stability_internal

// Decides whether the coalition blocks the mechanism ex ante: is there an
// internal deviation plan whose prior-averaged rank distribution strictly
// first-order dominates the mechanism's for every member? With
// options.deviation_profiles set, the plan may differ from the mechanism only
// on those profiles and mimics it elsewhere. Returns the witness, or nullopt;
// an LP over the tableau budget sets stats->budget_exhausted and returns
// nullopt.
inline std::optional<BlockWitness> ex_ante_block(
    const Mechanism& mechanism, const Prior& prior, const Coalition& coalition,
    const ExAnteOptions& options = {}, AuditStats* stats = nullptr) {
  namespace si = stability_internal;
  si::MemberContext ctx = si::build_member_context(
      mechanism, prior, coalition, options.deviation_profiles);
  const std::size_t m = ctx.num_members();
  const std::size_t num_internal = ctx.internal.size();
  const std::size_t support = ctx.support_size();
  const bool restricted = ctx.restricted_keys.has_value();
  const std::size_t kNoGroup = static_cast<std::size_t>(-1);

  // LP groups. Unrestricted runs group profiles that agree on every member's
  // type into one cell (the dominance rows cannot tell them apart, so one
  // shared lottery per cell is without loss). Restricted runs keep one group
  // per profile inside the restriction.
  std::vector<std::size_t> group_of(support, kNoGroup);
  std::vector<Rational> group_mass;
  std::vector<std::vector<int>> group_cell;   // unrestricted: the type tuple
  std::vector<std::size_t> group_profile;     // restricted: the support index
  if (!restricted) {
    std::map<std::vector<int>, std::size_t> cell_index;
    for (std::size_t p = 0; p < support; ++p) {
      auto [it, inserted] =
          cell_index.try_emplace(ctx.type_of[p], group_mass.size());
      if (inserted) {
        group_mass.emplace_back();
        group_cell.push_back(ctx.type_of[p]);
      }
      group_of[p] = it->second;
      group_mass[it->second] += ctx.wp(p).weight;
    }
  } else {
    for (std::size_t p = 0; p < support; ++p) {
      if (!ctx.in_restriction[p]) continue;
      group_of[p] = group_mass.size();
      group_mass.push_back(ctx.wp(p).weight);
      group_profile.push_back(p);
    }
  }
  const std::size_t num_groups = group_mass.size();

  // Full-prior rank distribution of each member under the mechanism.
  std::vector<std::vector<Rational>> before_total(m);
  for (std::size_t j = 0; j < m; ++j) {
    before_total[j].assign(ctx.outcome_count[j], Rational(0));
    for (std::size_t p = 0; p < support; ++p) {
      si::add_rank_pmf(before_total[j], ctx.wp(p).weight, *ctx.base[p],
                       ctx.types[j][ctx.type_of[p][j]].first);
    }
  }

  // One dominance target per member. Unrestricted rows compare full-prior
  // CDFs; restricted rows compare only the restricted part, since the mimic
  // part contributes identically to both sides.
  std::vector<si::LpTarget> targets(m);
  for (std::size_t j = 0; j < m; ++j) {
    si::LpTarget& t = targets[j];
    t.outcome_count = ctx.outcome_count[j];
    t.strict_scale = Rational(1);
    t.groups.reserve(num_groups);
    t.ranks.reserve(num_groups);
    if (!restricted) {
      for (std::size_t g = 0; g < num_groups; ++g) {
        t.groups.emplace_back(g, group_mass[g]);
        t.ranks.push_back(&ctx.iranks[j][group_cell[g][j]]);
      }
      t.before_cdf = si::threshold_cdf(before_total[j]);
    } else {
      std::vector<Rational> part(ctx.outcome_count[j], Rational(0));
      for (std::size_t g = 0; g < num_groups; ++g) {
        const std::size_t p = group_profile[g];
        t.groups.emplace_back(g, group_mass[g]);
        t.ranks.push_back(&ctx.iranks[j][ctx.type_of[p][j]]);
        si::add_rank_pmf(part, ctx.wp(p).weight, *ctx.base[p],
                         ctx.types[j][ctx.type_of[p][j]].first);
      }
      t.before_cdf = si::threshold_cdf(part);
    }
  }

  bool budget_hit = false;
  auto solution = si::solve_block_lp(num_groups, num_internal, targets,
                                     options.max_lp_cells, stats, &budget_hit);
  if (budget_hit && stats) stats->budget_exhausted = true;
  if (!solution) return std::nullopt;

  std::vector<RandomMatching> group_lottery;
  group_lottery.reserve(num_groups);
  for (std::size_t g = 0; g < num_groups; ++g) {
    group_lottery.push_back(
        si::lottery_from_weights(ctx.internal, solution->lotteries[g]));
  }
  std::vector<std::pair<PreferenceProfile, RandomMatching>> entries;
  entries.reserve(num_groups == 0 ? 0 : support);
  for (std::size_t p = 0; p < support; ++p) {
    if (group_of[p] == kNoGroup) continue;
    entries.emplace_back(ctx.wp(p).profile, group_lottery[group_of[p]]);
  }

  BlockWitness w;
  w.notion = BlockNotion::ExAnte;
  w.coalition = coalition;
  w.deviation = DeviationPlan(std::move(entries),
                              restricted ? DeviationFallback::MimicBase
                                         : DeviationFallback::AllSingle);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Rational> after(ctx.outcome_count[j], Rational(0));
    for (std::size_t p = 0; p < support; ++p) {
      const RandomMatching& dev = group_of[p] == kNoGroup
                                      ? *ctx.base[p]
                                      : group_lottery[group_of[p]];
      si::add_rank_pmf(after, ctx.wp(p).weight, dev,
                       ctx.types[j][ctx.type_of[p][j]].first);
    }
    AgentComparison cmp;
    cmp.agent = ctx.members[j];
    cmp.before = {ctx.members[j], before_total[j]};
    cmp.after = {ctx.members[j], std::move(after)};
    cmp.verdict = fosd_compare(cmp.after, cmp.before);
    if (cmp.verdict.relation != DominanceRelation::StrictlyDominates) {
      throw std::logic_error(
          "ex_ante_block: LP optimum did not yield strict dominance");
    }
    w.agents.push_back(std::move(cmp));
  }
  return w;
}

// Sweeps all singletons and man-woman pairs; reports the first ex-ante block
// found, or stability.
inline StabilityReport ex_ante_pairwise_stable(
    const Mechanism& mechanism, const Prior& prior,
    const ExAnteOptions& options = {}) {
  StabilityReport report;
  report.notion = "ex-ante";
  for (const Coalition& c : pairwise_coalitions(mechanism.market())) {
    ++report.stats.coalitions_checked;
    auto w = ex_ante_block(mechanism, prior, c, options, &report.stats);
    if (w) {
      report.stable = false;
      report.witness = std::move(w);
      return report;
    }
  }
  report.exhaustive = !report.stats.budget_exhausted;
  return report;
}

// Sweeps coalitions of every size up to max_coalition_size (0 = all sizes).
inline StabilityReport ex_ante_stable(const Mechanism& mechanism,
                                      const Prior& prior,
                                      int max_coalition_size = 0,
                                      const ExAnteOptions& options = {}) {
  StabilityReport report;
  report.notion = "ex-ante";
  for (const Coalition& c :
       coalitions_up_to(mechanism.market(), max_coalition_size)) {
    ++report.stats.coalitions_checked;
    auto w = ex_ante_block(mechanism, prior, c, options, &report.stats);
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

// Per-(member, type) conditioning data for one candidate family of type sets:
// the event is "this member has this type and every other member's type lies
// in its set". Masses and pmfs are unnormalized (prior scale); the _r copies
// restrict the scan to profiles inside the deviation restriction.
struct FamilyBuckets {
  std::vector<std::vector<Rational>> mass;
  std::vector<std::vector<std::vector<Rational>>> before;
  std::vector<std::vector<Rational>> mass_r;
  std::vector<std::vector<std::vector<Rational>>> before_r;
  std::vector<int> fail_count;          // members whose type is out of set
  std::vector<std::uint64_t> out_bits;  // bit j: member j's type is out
};

// p lies in member j's conditioning event iff every *other* member is in-set:
// either nobody fails, or the only failure is j itself.
inline bool others_in_sets(const FamilyBuckets& b, std::size_t p,
                           std::size_t j) {
  return b.fail_count[p] == 0 ||
         (b.fail_count[p] == 1 && ((b.out_bits[p] >> j) & 1) != 0);
}

inline FamilyBuckets compute_buckets(const MemberContext& ctx,
                                     const std::vector<std::uint64_t>& masks) {
  const std::size_t m = ctx.num_members();
  const std::size_t support = ctx.support_size();
  const bool restricted = ctx.restricted_keys.has_value();
  FamilyBuckets b;
  b.mass.resize(m);
  b.before.resize(m);
  if (restricted) {
    b.mass_r.resize(m);
    b.before_r.resize(m);
  }
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t nt = ctx.types[j].size();
    b.mass[j].assign(nt, Rational(0));
    b.before[j].assign(nt,
                       std::vector<Rational>(ctx.outcome_count[j], Rational(0)));
    if (restricted) {
      b.mass_r[j].assign(nt, Rational(0));
      b.before_r[j] = b.before[j];
    }
  }
  b.fail_count.assign(support, 0);
  b.out_bits.assign(support, 0);
  for (std::size_t p = 0; p < support; ++p) {
    for (std::size_t j = 0; j < m; ++j) {
      if (((masks[j] >> ctx.type_of[p][j]) & 1) == 0) {
        ++b.fail_count[p];
        b.out_bits[p] |= std::uint64_t{1} << j;
      }
    }
  }
  for (std::size_t p = 0; p < support; ++p) {
    if (b.fail_count[p] > 1) continue;  // p lies in no member's event
    const Rational& psi = ctx.wp(p).weight;
    auto accumulate = [&](std::size_t j) {
      const int t = ctx.type_of[p][j];
      const Ranking& type = ctx.types[j][t].first;
      b.mass[j][t] += psi;
      add_rank_pmf(b.before[j][t], psi, *ctx.base[p], type);
      if (restricted && ctx.in_restriction[p]) {
        b.mass_r[j][t] += psi;
        add_rank_pmf(b.before_r[j][t], psi, *ctx.base[p], type);
      }
    };
    if (b.fail_count[p] == 0) {
      for (std::size_t j = 0; j < m; ++j) accumulate(j);
    } else {
      accumulate(static_cast<std::size_t>(std::countr_zero(b.out_bits[p])));
    }
  }
  return b;
}

// Recomputes, from the plan alone, every (member, type) conditional
// comparison the family induces: in-set types must strictly gain (those rows
// become the witness body), and out-of-set types with positive event mass
// must not (the only-if direction; violators are reported for expansion).
struct PlanEvaluation {
  bool in_set_ok = true;
  std::vector<std::pair<std::size_t, int>> only_if_violations;
  std::vector<TypeComparison> per_type;  // in-set rows, (member, type) order
};

inline PlanEvaluation evaluate_plan(const MemberContext& ctx,
                                    const std::vector<std::uint64_t>& masks,
                                    const FamilyBuckets& b,
                                    const DeviationPlan& plan) {
  const std::size_t m = ctx.num_members();
  const std::size_t support = ctx.support_size();
  PlanEvaluation ev;

  // Resolve each support profile's deviation lottery once; nullptr stands for
  // the all-single fallback.
  std::vector<const RandomMatching*> dev(support, nullptr);
  {
    std::map<std::vector<int>, const RandomMatching*> by_key;
    for (const auto& [profile, lottery] : plan.entries()) {
      by_key.emplace(profile.key(), &lottery);
    }
    for (std::size_t p = 0; p < support; ++p) {
      auto it = by_key.find(ctx.wp(p).profile.key());
      if (it != by_key.end()) {
        dev[p] = it->second;
      } else if (plan.fallback() == DeviationFallback::MimicBase) {
        dev[p] = ctx.base[p];
      }
    }
  }

  for (std::size_t j = 0; j < m; ++j) {
    for (int t = 0; t < static_cast<int>(ctx.types[j].size()); ++t) {
      const bool in_set = ((masks[j] >> t) & 1) != 0;
      if (b.mass[j][t].is_zero()) {
        if (in_set) ev.in_set_ok = false;  // condition 2a needs positive mass
        continue;
      }
      const Ranking& type = ctx.types[j][t].first;
      const int s = ctx.outcome_count[j];
      std::vector<Rational> after(s, Rational(0));
      for (std::size_t p = 0; p < support; ++p) {
        if (ctx.type_of[p][j] != t || !others_in_sets(b, p, j)) continue;
        if (dev[p] != nullptr) {
          add_rank_pmf(after, ctx.wp(p).weight, *dev[p], type);
        } else {
          after[type.self_rank() - 1] += ctx.wp(p).weight;
        }
      }
      RankDistribution before_d{ctx.members[j],
                                std::vector<Rational>(s, Rational(0))};
      RankDistribution after_d = before_d;
      for (int k = 0; k < s; ++k) {
        before_d.mass[k] = b.before[j][t][k] / b.mass[j][t];
        after_d.mass[k] = after[k] / b.mass[j][t];
      }
      DominanceVerdict verdict = fosd_compare(after_d, before_d);
      const bool strict =
          verdict.relation == DominanceRelation::StrictlyDominates;
      if (in_set) {
        if (!strict) {
          ev.in_set_ok = false;
          continue;
        }
        ev.per_type.push_back(TypeComparison{ctx.members[j], type,
                                             b.mass[j][t], std::move(before_d),
                                             std::move(after_d),
                                             std::move(verdict)});
      } else if (strict) {
        ev.only_if_violations.emplace_back(j, t);
      }
    }
  }
  return ev;
}

// Solves the family's blocking LP and turns a positive optimum into a
// deviation plan. Unrestricted: one lottery per member-type cell over the
// all-in-set profiles, all-single fallback elsewhere. Restricted: one lottery
// per restricted all-in-set profile, mimic fallback elsewhere. Returns
// nullopt when the LP is infeasible or its optimum is zero.
inline std::optional<DeviationPlan> family_lp_plan(
    const MemberContext& ctx, const std::vector<std::uint64_t>& masks,
    const FamilyBuckets& b, std::size_t max_lp_cells, AuditStats* stats,
    bool* budget_hit) {
  const std::size_t m = ctx.num_members();
  const std::size_t support = ctx.support_size();
  const bool restricted = ctx.restricted_keys.has_value();
  const std::size_t kNoGroup = static_cast<std::size_t>(-1);

  std::vector<std::size_t> group_of(support, kNoGroup);
  std::vector<Rational> group_mass;
  std::vector<std::vector<int>> group_cell;
  std::vector<std::size_t> group_profile;
  std::map<std::vector<int>, std::size_t> cell_index;
  for (std::size_t p = 0; p < support; ++p) {
    if (b.fail_count[p] != 0) continue;
    if (!restricted) {
      // Profiles agreeing on all member types share one cell lottery: the
      // conditional rows depend on a profile only through the type tuple, and
      // any split of a cell across lotteries is matched by their mixture.
      auto [it, inserted] =
          cell_index.try_emplace(ctx.type_of[p], group_mass.size());
      if (inserted) {
        group_mass.emplace_back();
        group_cell.push_back(ctx.type_of[p]);
      }
      group_of[p] = it->second;
      group_mass[it->second] += ctx.wp(p).weight;
    } else {
      if (!ctx.in_restriction[p]) continue;
      group_of[p] = group_mass.size();
      group_mass.push_back(ctx.wp(p).weight);
      group_profile.push_back(p);
    }
  }
  const std::size_t num_groups = group_mass.size();

  std::vector<LpTarget> targets;
  for (std::size_t j = 0; j < m; ++j) {
    for (int t = 0; t < static_cast<int>(ctx.types[j].size()); ++t) {
      if (((masks[j] >> t) & 1) == 0) continue;
      LpTarget target;
      target.outcome_count = ctx.outcome_count[j];
      // The strictness slack is scaled by the full event mass so epsilon is
      // measured in conditional units even when variables cover only the
      // restricted part of the event.
      target.strict_scale = b.mass[j][t];
      if (!restricted) {
        for (std::size_t g = 0; g < num_groups; ++g) {
          if (group_cell[g][j] != t) continue;
          target.groups.emplace_back(g, group_mass[g]);
          target.ranks.push_back(&ctx.iranks[j][t]);
        }
        target.before_cdf = threshold_cdf(b.before[j][t]);
      } else {
        for (std::size_t g = 0; g < num_groups; ++g) {
          const std::size_t p = group_profile[g];
          if (ctx.type_of[p][j] != t) continue;
          target.groups.emplace_back(g, group_mass[g]);
          target.ranks.push_back(&ctx.iranks[j][t]);
        }
        target.before_cdf = threshold_cdf(b.before_r[j][t]);
      }
      targets.push_back(std::move(target));
    }
  }

  auto solution = solve_block_lp(num_groups, ctx.internal.size(), targets,
                                 max_lp_cells, stats, budget_hit);
  if (!solution) return std::nullopt;

  std::vector<RandomMatching> group_lottery;
  group_lottery.reserve(num_groups);
  for (std::size_t g = 0; g < num_groups; ++g) {
    group_lottery.push_back(
        lottery_from_weights(ctx.internal, solution->lotteries[g]));
  }
  std::vector<std::pair<PreferenceProfile, RandomMatching>> entries;
  for (std::size_t p = 0; p < support; ++p) {
    if (b.fail_count[p] != 0) continue;
    if (restricted && group_of[p] == kNoGroup) continue;
    entries.emplace_back(ctx.wp(p).profile, group_lottery[group_of[p]]);
  }
  return DeviationPlan(std::move(entries), restricted
                                               ? DeviationFallback::MimicBase
                                               : DeviationFallback::AllSingle);
}

enum class FamilyOutcome { Witness, Infeasible, Skip, Budget };

struct FamilyAttempt {
  FamilyOutcome outcome = FamilyOutcome::Infeasible;
  std::optional<InterimWitness> witness;
};

inline std::vector<std::pair<AgentId, std::vector<Ranking>>> type_sets_from_masks(
    const MemberContext& ctx, const std::vector<std::uint64_t>& masks) {
  std::vector<std::pair<AgentId, std::vector<Ranking>>> out;
  out.reserve(ctx.num_members());
  for (std::size_t j = 0; j < ctx.num_members(); ++j) {
    std::vector<Ranking> list;
    for (int t = 0; t < static_cast<int>(ctx.types[j].size()); ++t) {
      if (((masks[j] >> t) & 1) != 0) list.push_back(ctx.types[j][t].first);
    }
    out.emplace_back(ctx.members[j], std::move(list));
  }
  return out;
}

// Runs one candidate family to a verdict, expanding the type sets along
// only-if violations up to options.expansion_rounds times.
inline FamilyAttempt attempt_family(const MemberContext& ctx,
                                    std::vector<std::uint64_t> masks,
                                    const InterimOptions& options,
                                    AuditStats* stats) {
  const std::size_t m = ctx.num_members();
  const bool restricted = ctx.restricted_keys.has_value();
  for (int round = 0;; ++round) {
    FamilyBuckets b = compute_buckets(ctx, masks);
    for (std::size_t j = 0; j < m; ++j) {
      for (int t = 0; t < static_cast<int>(ctx.types[j].size()); ++t) {
        if (((masks[j] >> t) & 1) != 0 && b.mass[j][t].is_zero()) {
          return {FamilyOutcome::Skip, std::nullopt};  // 2a cannot hold
        }
      }
    }
    if (!restricted) {
      // Necessary-condition prune: the best conditional distribution any
      // internal lottery can give (member, type) is the point mass at its
      // best internal rank. If even that fails weak dominance, or cannot be
      // strict anywhere, the family is infeasible.
      for (std::size_t j = 0; j < m; ++j) {
        for (int t = 0; t < static_cast<int>(ctx.types[j].size()); ++t) {
          if (((masks[j] >> t) & 1) == 0) continue;
          const int best =
              *std::min_element(ctx.iranks[j][t].begin(), ctx.iranks[j][t].end());
          const std::vector<Rational> cdf = pmf_to_cdf(b.before[j][t]);
          bool feasible = true;
          for (int n = 1; n < best && feasible; ++n) {
            feasible = cdf[n - 1].is_zero();
          }
          bool strict_possible = false;
          for (int n = best; n <= ctx.outcome_count[j] - 1; ++n) {
            if (cdf[n - 1] < b.mass[j][t]) {
              strict_possible = true;
              break;
            }
          }
          if (!feasible || !strict_possible) {
            return {FamilyOutcome::Infeasible, std::nullopt};
          }
        }
      }
    }
    bool budget_hit = false;
    auto plan = family_lp_plan(ctx, masks, b, options.max_lp_cells, stats,
                               &budget_hit);
    if (budget_hit) {
      if (stats) stats->budget_exhausted = true;
      return {FamilyOutcome::Budget, std::nullopt};
    }
    if (!plan) return {FamilyOutcome::Infeasible, std::nullopt};
    PlanEvaluation ev = evaluate_plan(ctx, masks, b, *plan);
    if (!ev.in_set_ok) {
      throw std::logic_error(
          "interim search: LP solution failed its own in-set recheck");
    }
    if (ev.only_if_violations.empty()) {
      InterimWitness w;
      w.coalition = Coalition::of(ctx.members);
      w.type_sets = type_sets_from_masks(ctx, masks);
      w.deviation = std::move(*plan);
      w.per_type = std::move(ev.per_type);
      return {FamilyOutcome::Witness, std::move(w)};
    }
    if (round >= options.expansion_rounds) {
      if (stats) stats->budget_exhausted = true;
      return {FamilyOutcome::Budget, std::nullopt};
    }
    for (const auto& [j, t] : ev.only_if_violations) {
      masks[j] |= std::uint64_t{1} << t;
    }
    if (stats) ++stats->expansions;
  }
}

// The candidate type subsets for one member, largest first and lexicographic
// within a size, truncated to `bound` entries (the family walk can never
// reach indices beyond its own budget).
inline std::vector<std::uint64_t> member_subsets(std::size_t num_types,
                                                 std::size_t bound) {
  std::vector<std::uint64_t> out;
  for (std::size_t size = num_types; size >= 1 && out.size() < bound; --size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    for (;;) {
      std::uint64_t mask = 0;
      for (std::size_t i : idx) mask |= std::uint64_t{1} << i;
      out.push_back(mask);
      if (out.size() >= bound) break;
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == num_types - size + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t k = i; k < size; ++k) idx[k] = idx[k - 1] + 1;
    }
  }
  return out;
}

// Verifies a caller-proposed witness (type sets plus plan) directly. Returns
// the assembled witness if every clause holds, nullopt otherwise.
inline std::optional<InterimWitness> try_seed(const MemberContext& ctx,
                                              const InterimSeed& seed) {
  const std::size_t m = ctx.num_members();
  if (seed.type_sets.size() != m) return std::nullopt;
  std::vector<std::uint64_t> masks(m, 0);
  for (const auto& [agent, list] : seed.type_sets) {
    auto it = std::find(ctx.members.begin(), ctx.members.end(), agent);
    if (it == ctx.members.end()) return std::nullopt;
    const std::size_t j = static_cast<std::size_t>(it - ctx.members.begin());
    if (masks[j] != 0 || list.empty()) return std::nullopt;
    for (const Ranking& r : list) {
      const auto& types = ctx.types[j];
      auto pos = std::lower_bound(
          types.begin(), types.end(), r,
          [](const auto& entry, const Ranking& rr) { return entry.first < rr; });
      if (pos == types.end() || !(pos->first == r)) return std::nullopt;
      masks[j] |= std::uint64_t{1} << (pos - types.begin());
    }
  }
  // The plan must stay internal on the support (the LP path guarantees this
  // by construction; a seed has to be checked).
  if (!Coalition::of(ctx.members).is_grand(ctx.mechanism->market())) {
    const Coalition coalition = Coalition::of(ctx.members);
    for (std::size_t p = 0; p < ctx.support_size(); ++p) {
      const RandomMatching* entry = seed.deviation.find(ctx.wp(p).profile);
      const bool internal =
          entry != nullptr
              ? lottery_internal_to(*entry, coalition)
              : (seed.deviation.fallback() == DeviationFallback::AllSingle ||
                 lottery_internal_to(*ctx.base[p], coalition));
      if (!internal) return std::nullopt;
    }
  }
  FamilyBuckets b = compute_buckets(ctx, masks);
  PlanEvaluation ev = evaluate_plan(ctx, masks, b, seed.deviation);
  if (!ev.in_set_ok || !ev.only_if_violations.empty()) return std::nullopt;
  InterimWitness w;
  w.coalition = Coalition::of(ctx.members);
  w.type_sets = type_sets_from_masks(ctx, masks);
  w.deviation = seed.deviation;
  w.per_type = std::move(ev.per_type);
  return w;
}

}  // namespace stability_internal

// Decides whether the coalition blocks the mechanism in the interim sense:
// is there a family of per-member type sets and an internal deviation plan
// such that every in-set type strictly gains conditionally (with positive
// event mass), and no positive-mass type outside the sets does? Candidate
// families are walked from the full sets downward, repairing only-if
// violations by expansion; caps make the search a semi-decision whose misses
// are reported via exhaustive=false, never as spurious stability.
inline InterimBlockResult interim_block(const Mechanism& mechanism,
                                        const Prior& prior,
                                        const Coalition& coalition,
                                        const InterimOptions& options = {}) {
  namespace si = stability_internal;
  InterimBlockResult result;
  si::MemberContext ctx = si::build_member_context(
      mechanism, prior, coalition, options.deviation_profiles);
  const std::size_t m = ctx.num_members();

  if (options.seed) {
    auto seeded = si::try_seed(ctx, *options.seed);
    if (seeded) {
      ++result.stats.seeds_accepted;
      result.witness = std::move(seeded);
      result.exhaustive = true;
      return result;
    }
  }

  std::vector<std::vector<std::uint64_t>> subsets(m);
  for (std::size_t j = 0; j < m; ++j) {
    subsets[j] = si::member_subsets(ctx.types[j].size(),
                                    options.max_candidate_sets + 1);
  }
  auto total_of = [&](const std::vector<std::size_t>& idx) {
    std::size_t total = 0;
    for (std::size_t j = 0; j < m; ++j) {
      total += static_cast<std::size_t>(std::popcount(subsets[j][idx[j]]));
    }
    return total;
  };
  using Node = std::pair<std::size_t, std::vector<std::size_t>>;
  struct LargerFamilyFirst {
    bool operator()(const Node& a, const Node& b) const {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    }
  };
  std::set<Node, LargerFamilyFirst> frontier;
  std::set<std::vector<std::size_t>> visited;
  std::vector<std::size_t> start(m, 0);
  frontier.emplace(total_of(start), start);
  visited.insert(start);

  while (!frontier.empty()) {
    if (result.stats.families_examined >= options.max_candidate_sets) {
      result.stats.budget_exhausted = true;
      break;
    }
    const Node node = *frontier.begin();
    frontier.erase(frontier.begin());
    const std::vector<std::size_t>& idx = node.second;
    ++result.stats.families_examined;

    std::vector<std::uint64_t> masks(m);
    for (std::size_t j = 0; j < m; ++j) masks[j] = subsets[j][idx[j]];
    si::FamilyAttempt attempt =
        si::attempt_family(ctx, std::move(masks), options, &result.stats);
    if (attempt.outcome == si::FamilyOutcome::Witness) {
      result.witness = std::move(attempt.witness);
      result.exhaustive = true;
      return result;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (idx[j] + 1 >= subsets[j].size()) continue;
      std::vector<std::size_t> next = idx;
      ++next[j];
      if (visited.insert(next).second) {
        frontier.emplace(total_of(next), std::move(next));
      }
    }
  }
  result.exhaustive = !result.stats.budget_exhausted;
  return result;
}

// Sweeps all singletons and man-woman pairs with interim_block.
inline StabilityReport interim_pairwise_stable(
    const Mechanism& mechanism, const Prior& prior,
    const InterimOptions& options = {}) {
  StabilityReport report;
  report.notion = "interim";
  InterimOptions per_coalition = options;
  per_coalition.seed.reset();
  for (const Coalition& c : pairwise_coalitions(mechanism.market())) {
    ++report.stats.coalitions_checked;
    InterimBlockResult r = interim_block(mechanism, prior, c, per_coalition);
    report.stats.absorb(r.stats);
    if (r.witness) {
      report.stable = false;
      report.interim_witness = std::move(r.witness);
      return report;
    }
  }
  report.exhaustive = !report.stats.budget_exhausted;
  return report;
}

// Sweeps coalitions of every size up to max_coalition_size (0 = all sizes)
// with interim_block.
inline StabilityReport interim_stable(const Mechanism& mechanism,
                                      const Prior& prior,
                                      int max_coalition_size = 0,
                                      const InterimOptions& options = {}) {
  StabilityReport report;
  report.notion = "interim";
  InterimOptions per_coalition = options;
  per_coalition.seed.reset();
  for (const Coalition& c :
       coalitions_up_to(mechanism.market(), max_coalition_size)) {
    ++report.stats.coalitions_checked;
    InterimBlockResult r = interim_block(mechanism, prior, c, per_coalition);
    report.stats.absorb(r.stats);
    if (r.witness) {
      report.stable = false;
      report.interim_witness = std::move(r.witness);
      return report;
    }
  }
  report.exhaustive = !report.stats.budget_exhausted;
  return report;
}

// A mutual-first pair the mechanism fails to match with certainty somewhere
// on the prior's support. Any mechanism that is ex-post pairwise stable at
// every support profile has none: such a pair can always pair off for a sure
// strict gain.
struct MutualFirstViolation {
  PreferenceProfile profile;
  AgentId man;
  AgentId woman;
  Rational probability;  // mass the mechanism puts on the pair at the profile
};

inline std::optional<MutualFirstViolation> mutual_first_violation(
    const Mechanism& mechanism, const Prior& prior) {
  const Market& market = mechanism.market();
  if (prior.market() != market) {
    throw std::invalid_argument("mutual_first_violation: prior market mismatch");
  }
  for (const WeightedProfile& wp : prior.support()) {
    for (int i = 0; i < market.num_men; ++i) {
      for (int j = 0; j < market.num_women; ++j) {
        const AgentId mi = man(i);
        const AgentId wj = woman(j);
        if (wp.profile.rank_of(mi, wj) != 1 || wp.profile.rank_of(wj, mi) != 1) {
          continue;
        }
        Rational p = mechanism.evaluate(wp.profile).pair_probability(mi, wj);
        if (!(p == Rational(1))) {
          return MutualFirstViolation{wp.profile, mi, wj, std::move(p)};
        }
      }
    }
  }
  return std::nullopt;
}

// The fixed 3x3 profile behind the partner-swap construction: (m1, w1) and
// (m3, w3) rank each other first, so its unique stable matching is
// {m1w1, m2w2, m3w3}, leaving m2 and w2 with their third choices.
inline PreferenceProfile pinned_3x3_profile() {
  const Market market(3, 3);
  auto mr = [&](int i, int a, int b, int c) {
    return Ranking::from_order(man(i), market,
                               {woman(a), woman(b), woman(c), man(i)});
  };
  auto wr = [&](int i, int a, int b, int c) {
    return Ranking::from_order(woman(i), market,
                               {man(a), man(b), man(c), woman(i)});
  };
  return PreferenceProfile(market, {mr(0, 0, 1, 2), mr(1, 0, 2, 1),
                                    mr(2, 2, 0, 1), wr(0, 0, 1, 2),
                                    wr(1, 0, 2, 1), wr(2, 2, 0, 1)});
}

// Constructive proof object that no 3x3 mechanism is interim stable under the
// iid uniform prior: either some mutual-first pair is left unmatched with
// positive probability somewhere (that pair blocks ex post at the offending
// profile), or the mechanism pins the swap class's stable matchings, and the
// grand coalition blocks in the interim via the partner-swap deviation.
struct InstabilityWitness {
  enum class Kind { PairExPost, GrandCoalition };
  Kind kind = Kind::PairExPost;
  std::optional<MutualFirstViolation> violation;  // PairExPost
  std::optional<BlockWitness> pair_witness;       // PairExPost
  std::optional<InterimWitness> grand_witness;    // GrandCoalition
  CheckResult verification;  // independent re-check of the emitted witness
  AuditStats stats;
};

inline InstabilityWitness interim_instability_witness(
    const Mechanism& mechanism, const InterimOptions& options = {}) {
  const Market& market = mechanism.market();
  if (market.num_men != 3 || market.num_women != 3) {
    throw std::invalid_argument(
        "interim_instability_witness: construction needs a 3x3 market");
  }
  const Prior prior = iid_uniform_prior(market);
  InstabilityWitness out;

  if (auto violation = mutual_first_violation(mechanism, prior)) {
    out.kind = InstabilityWitness::Kind::PairExPost;
    const Coalition pair = Coalition::of({violation->man, violation->woman});
    auto w = ex_post_block(mechanism, violation->profile, pair, &out.stats);
    if (!w) {
      throw std::logic_error(
          "interim_instability_witness: a mutual-first pair left unmatched "
          "must block by pairing off");
    }
    out.verification = check_ex_post_witness(mechanism, violation->profile, *w);
    out.pair_witness = std::move(w);
    out.violation = std::move(violation);
    return out;
  }

  // No violation anywhere: the mechanism matches all mutual firsts, so on
  // every relabeling of the pinned profile it produces the relabeled stable
  // matching. The partner-swap deviation then lifts two agents per relabeling
  // from third to first choice at the sole cost of moving one agent from
  // first to second, which every type strictly prefers conditionally.
  out.kind = InstabilityWitness::Kind::GrandCoalition;
  const PreferenceProfile base_profile = pinned_3x3_profile();
  const Mechanism swapped = partner_swap_mechanism(mechanism, base_profile);
  const std::vector<PreferenceProfile> klass = permutation_class(base_profile);

  InterimSeed seed;
  for (const AgentId& a : market.agents()) {
    std::vector<Ranking> all;
    for (auto& [type, weight] : marginal_types(prior, a)) {
      all.push_back(type);
    }
    seed.type_sets.emplace_back(a, std::move(all));
  }
  std::vector<std::pair<PreferenceProfile, RandomMatching>> entries;
  entries.reserve(klass.size());
  for (const PreferenceProfile& p : klass) {
    entries.emplace_back(p, swapped.evaluate(p));
  }
  seed.deviation = DeviationPlan(std::move(entries), DeviationFallback::MimicBase);

  InterimOptions grand_options = options;
  grand_options.deviation_profiles = klass;
  grand_options.seed = std::move(seed);
  InterimBlockResult r = interim_block(mechanism, prior,
                                       Coalition::of(market.agents()),
                                       grand_options);
  out.stats.absorb(r.stats);
  if (!r.witness) {
    throw std::logic_error(
        "interim_instability_witness: the partner-swap deviation must block "
        "when every mutual-first pair is matched with certainty");
  }
  out.verification = check_interim_witness(mechanism, prior, *r.witness);
  out.grand_witness = std::move(r.witness);
  return out;
}

}  // namespace matchaudit
