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
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matchaudit/dominance.hpp"
#include "matchaudit/market.hpp"
#include "matchaudit/matching.hpp"
#include "matchaudit/mechanism.hpp"
#include "matchaudit/prior.hpp"
#include "matchaudit/profile.hpp"
#include "matchaudit/rational.hpp"

namespace matchaudit {

// A non-empty set of agents acting together, kept sorted in canonical agent
// order (men before women, each side by index).
class Coalition {
 public:
  static Coalition of(std::vector<AgentId> members) {
    if (members.empty()) {
      throw std::invalid_argument("Coalition: empty");
    }
    std::sort(members.begin(), members.end());
    for (std::size_t i = 1; i < members.size(); ++i) {
      if (members[i] == members[i - 1]) {
        throw std::invalid_argument("Coalition: duplicate member " +
                                    agent_key(members[i]));
      }
    }
    Coalition c;
    c.members_ = std::move(members);
    return c;
  }

  const std::vector<AgentId>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(const AgentId& a) const {
    return std::binary_search(members_.begin(), members_.end(), a);
  }
  bool is_grand(const Market& market) const {
    return static_cast<int>(members_.size()) == market.total();
  }
  void validate_in(const Market& market) const {
    for (const AgentId& a : members_) {
      if (!market.contains(a)) {
        throw std::invalid_argument("Coalition: member " + agent_key(a) +
                                    " outside the market");
      }
    }
  }

  std::string describe() const {
    std::string out = "{";
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (i) out += ", ";
      out += agent_key(members_[i]);
    }
    return out + "}";
  }

  friend bool operator==(const Coalition& a, const Coalition& b) {
    return a.members_ == b.members_;
  }
  friend bool operator!=(const Coalition& a, const Coalition& b) {
    return !(a == b);
  }

 private:
  Coalition() = default;
  std::vector<AgentId> members_;
};

// Whether a lottery is internal to a coalition: every member is matched
// within the coalition or single, and every non-member is single.
inline bool matching_internal_to(const Matching& mu, const Coalition& coalition) {
  for (AgentId a : mu.market().agents()) {
    AgentId p = mu.partner_of(a);
    if (coalition.contains(a)) {
      if (p != a && !coalition.contains(p)) return false;
    } else {
      if (p != a) return false;
    }
  }
  return true;
}

inline bool lottery_internal_to(const RandomMatching& lottery,
                                const Coalition& coalition) {
  for (const auto& [mu, w] : lottery.outcomes()) {
    if (!matching_internal_to(mu, coalition)) return false;
  }
  return true;
}

// What a deviating coalition would run instead of the mechanism: explicit
// per-profile lotteries, plus a fallback for profiles not listed -- either
// everyone single (the coalition walks away outright) or mimicking the base
// mechanism (deviating only on the listed profiles).
enum class DeviationFallback { AllSingle, MimicBase };

inline std::string fallback_name(DeviationFallback f) {
  return f == DeviationFallback::AllSingle ? "all-single" : "mimic-base";
}

class DeviationPlan {
 public:
  DeviationPlan() = default;
  DeviationPlan(std::vector<std::pair<PreferenceProfile, RandomMatching>> entries,
                DeviationFallback fallback)
      : entries_(std::move(entries)), fallback_(fallback) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (entries_[i].first == entries_[i - 1].first) {
        throw std::invalid_argument("DeviationPlan: duplicate profile entry");
      }
    }
  }

  const std::vector<std::pair<PreferenceProfile, RandomMatching>>& entries()
      const {
    return entries_;
  }
  DeviationFallback fallback() const { return fallback_; }

  const RandomMatching* find(const PreferenceProfile& profile) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), profile,
        [](const auto& e, const PreferenceProfile& p) { return e.first < p; });
    if (it != entries_.end() && it->first == profile) return &it->second;
    return nullptr;
  }

  // The lottery the plan produces at a profile.
  RandomMatching realize(const PreferenceProfile& profile,
                         const Mechanism& base) const {
    if (const RandomMatching* entry = find(profile)) return *entry;
    if (fallback_ == DeviationFallback::MimicBase) return base.evaluate(profile);
    return RandomMatching::point_mass(Matching::all_single(profile.market()));
  }

 private:
  std::vector<std::pair<PreferenceProfile, RandomMatching>> entries_;
  DeviationFallback fallback_ = DeviationFallback::AllSingle;
};

// One member's gain: its rank distribution before (under the mechanism) and
// after (under the deviation), with the dominance verdict of after vs before.
struct AgentComparison {
  AgentId agent;
  RankDistribution before;
  RankDistribution after;
  DominanceVerdict verdict;
};

enum class BlockNotion { ExPost, ExAnte };

inline std::string notion_name(BlockNotion n) {
  return n == BlockNotion::ExPost ? "ex-post" : "ex-ante";
}

// A self-contained certificate that a coalition blocks: the deviation plan
// and, per member, the exact before/after rank distributions. Ex-post
// witnesses carry the profile they apply at; ex-ante witnesses compare
// prior-averaged distributions.
struct BlockWitness {
  BlockNotion notion = BlockNotion::ExPost;
  Coalition coalition = Coalition::of({man(0)});
  std::optional<PreferenceProfile> profile;  // ex-post only
  DeviationPlan deviation;
  std::vector<AgentComparison> agents;  // one per member, in member order
};

// One (member, type) row of an interim witness: the conditioning event's
// mass and the conditional before/after distributions for that type.
struct TypeComparison {
  AgentId agent;
  Ranking type;
  Rational event_mass;
  RankDistribution before;
  RankDistribution after;
  DominanceVerdict verdict;
};

// A certificate of an interim block: per-member type sets, the deviation
// plan, and for every in-set (member, type) the conditional comparison on
// the event "this member has this type and every other member's type lies in
// its set". Validity additionally requires that no out-of-set type with a
// positive-mass event would strictly gain (checked, not stored).
struct InterimWitness {
  Coalition coalition = Coalition::of({man(0)});
  std::vector<std::pair<AgentId, std::vector<Ranking>>> type_sets;
  DeviationPlan deviation;
  std::vector<TypeComparison> per_type;
};

struct CheckResult {
  bool ok = false;
  std::vector<std::string> failures;

  static CheckResult success() { return {true, {}}; }
};

namespace witness_internal {

inline void require(CheckResult& res, bool cond, const std::string& message) {
  if (!cond) {
    res.ok = false;
    res.failures.push_back(message);
  }
}

inline bool distributions_equal(const RankDistribution& a,
                                const RankDistribution& b) {
  return a.agent == b.agent && a.mass == b.mass;
}

inline std::string mass_string(const std::vector<Rational>& mass) {
  std::string out = "(";
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (i) out += ", ";
    out += mass[i].str();
  }
  return out + ")";
}

}  // namespace witness_internal

// Recomputes every claim in an ex-post witness from scratch: internality of
// the deviation, the per-member before/after distributions, and strict
// dominance for every member. Stored values must match the recomputation
// exactly.
inline CheckResult check_ex_post_witness(const Mechanism& mechanism,
                                         const PreferenceProfile& profile,
                                         const BlockWitness& witness) {
  using witness_internal::require;
  CheckResult res = CheckResult::success();
  const Market& market = mechanism.market();
  require(res, profile.market() == market, "profile market mismatch");
  witness.coalition.validate_in(market);
  require(res, witness.notion == BlockNotion::ExPost,
          "witness notion must be ex-post");
  require(res, witness.profile.has_value() && *witness.profile == profile,
          "witness must carry the profile it blocks at");
  if (!res.ok) return res;

  RandomMatching dev = witness.deviation.realize(profile, mechanism);
  require(res, lottery_internal_to(dev, witness.coalition),
          "deviation is not internal to the coalition");

  const std::vector<AgentId>& members = witness.coalition.members();
  require(res, witness.agents.size() == members.size(),
          "witness must compare every coalition member exactly once");
  for (std::size_t i = 0; i < members.size() && res.ok; ++i) {
    const AgentId& a = members[i];
    const Ranking& r = profile.ranking(a);
    RankDistribution before{a, mechanism.evaluate(profile).rank_pmf(r)};
    RankDistribution after{a, dev.rank_pmf(r)};
    DominanceVerdict verdict = fosd_compare(after, before);
    require(res, verdict.relation == DominanceRelation::StrictlyDominates,
            "member " + agent_key(a) + " does not strictly gain: after " +
                witness_internal::mass_string(after.mass) + " vs before " +
                witness_internal::mass_string(before.mass));
    const AgentComparison& stored = witness.agents[i];
    require(res, stored.agent == a,
            "agent comparisons must follow member order");
    require(res, witness_internal::distributions_equal(stored.before, before),
            "stored before-distribution for " + agent_key(a) +
                " does not match recomputation");
    require(res, witness_internal::distributions_equal(stored.after, after),
            "stored after-distribution for " + agent_key(a) +
                " does not match recomputation");
    require(res, stored.verdict == verdict,
            "stored verdict for " + agent_key(a) +
                " does not match recomputation");
  }
  return res;
}

// Recomputes every claim in an ex-ante witness: internality at every support
// profile and strict dominance of the prior-averaged after-distribution over
// the before-distribution for every member.
inline CheckResult check_ex_ante_witness(const Mechanism& mechanism,
                                         const Prior& prior,
                                         const BlockWitness& witness) {
  using witness_internal::require;
  CheckResult res = CheckResult::success();
  const Market& market = mechanism.market();
  require(res, prior.market() == market, "prior market mismatch");
  witness.coalition.validate_in(market);
  require(res, witness.notion == BlockNotion::ExAnte,
          "witness notion must be ex-ante");
  require(res, !witness.profile.has_value(),
          "ex-ante witnesses carry no profile");
  if (!res.ok) return res;

  const std::vector<AgentId>& members = witness.coalition.members();
  std::vector<std::vector<Rational>> before(members.size()),
      after(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    int n = market.opposite_count(members[i]) + 1;
    before[i].assign(n, Rational(0));
    after[i].assign(n, Rational(0));
  }
  for (const WeightedProfile& wp : prior.support()) {
    RandomMatching dev = witness.deviation.realize(wp.profile, mechanism);
    if (!lottery_internal_to(dev, witness.coalition)) {
      require(res, false, "deviation is not internal at a support profile");
      return res;
    }
    const RandomMatching& base = mechanism.evaluate(wp.profile);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const Ranking& r = wp.profile.ranking(members[i]);
      std::vector<Rational> b = base.rank_pmf(r), d = dev.rank_pmf(r);
      for (std::size_t k = 0; k < b.size(); ++k) {
        before[i][k] += wp.weight * b[k];
        after[i][k] += wp.weight * d[k];
      }
    }
  }
  require(res, witness.agents.size() == members.size(),
          "witness must compare every coalition member exactly once");
  for (std::size_t i = 0; i < members.size() && res.ok; ++i) {
    const AgentId& a = members[i];
    RankDistribution b{a, before[i]}, d{a, after[i]};
    DominanceVerdict verdict = fosd_compare(d, b);
    require(res, verdict.relation == DominanceRelation::StrictlyDominates,
            "member " + agent_key(a) + " does not strictly gain: after " +
                witness_internal::mass_string(d.mass) + " vs before " +
                witness_internal::mass_string(b.mass));
    const AgentComparison& stored = witness.agents[i];
    require(res, stored.agent == a,
            "agent comparisons must follow member order");
    require(res, witness_internal::distributions_equal(stored.before, b),
            "stored before-distribution for " + agent_key(a) +
                " does not match recomputation");
    require(res, witness_internal::distributions_equal(stored.after, d),
            "stored after-distribution for " + agent_key(a) +
                " does not match recomputation");
    require(res, stored.verdict == verdict,
            "stored verdict for " + agent_key(a) +
                " does not match recomputation");
  }
  return res;
}

// Recomputes every claim in an interim witness: internality at every support
// profile, positive event mass and strict conditional dominance for every
// in-set (member, type), exact agreement with the stored rows, and -- the
// "only if" direction -- no strict conditional gain for any out-of-set type
// whose event has positive mass.
inline CheckResult check_interim_witness(const Mechanism& mechanism,
                                         const Prior& prior,
                                         const InterimWitness& witness) {
  using witness_internal::require;
  CheckResult res = CheckResult::success();
  const Market& market = mechanism.market();
  require(res, prior.market() == market, "prior market mismatch");
  witness.coalition.validate_in(market);
  const std::vector<AgentId>& members = witness.coalition.members();
  require(res, witness.type_sets.size() == members.size(),
          "witness must carry one type set per member");
  if (!res.ok) return res;
  for (std::size_t i = 0; i < members.size(); ++i) {
    require(res, witness.type_sets[i].first == members[i],
            "type sets must follow member order");
    require(res, !witness.type_sets[i].second.empty(),
            "type set for " + agent_key(members[i]) + " is empty");
    for (const Ranking& r : witness.type_sets[i].second) {
      require(res, r.owner() == members[i],
              "type set for " + agent_key(members[i]) +
                  " holds a ranking of another agent");
    }
  }
  if (!res.ok) return res;

  // Condition 1: the plan must stay internal at every support profile.
  for (const WeightedProfile& wp : prior.support()) {
    if (!lottery_internal_to(witness.deviation.realize(wp.profile, mechanism),
                             witness.coalition)) {
      require(res, false, "deviation is not internal at a support profile");
      return res;
    }
  }

  auto in_set = [&](std::size_t i, const Ranking& r) {
    const std::vector<Ranking>& set = witness.type_sets[i].second;
    return std::find(set.begin(), set.end(), r) != set.end();
  };

  std::size_t stored_row = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const AgentId& a = members[i];
    for (const auto& [type, marginal_weight] : marginal_types(prior, a)) {
      // The event: member i has this type, every other member's type lies in
      // its set.
      Rational mass;
      int n = type.outcome_count();
      std::vector<Rational> before_pmf(n), after_pmf(n);
      for (const WeightedProfile& wp : prior.support()) {
        if (wp.profile.ranking(a) != type) continue;
        bool ok = true;
        for (std::size_t j = 0; j < members.size() && ok; ++j) {
          if (j != i) ok = in_set(j, wp.profile.ranking(members[j]));
        }
        if (!ok) continue;
        mass += wp.weight;
        const RandomMatching& base = mechanism.evaluate(wp.profile);
        RandomMatching dev = witness.deviation.realize(wp.profile, mechanism);
        std::vector<Rational> b = base.rank_pmf(type), d = dev.rank_pmf(type);
        for (int k = 0; k < n; ++k) {
          before_pmf[k] += wp.weight * b[k];
          after_pmf[k] += wp.weight * d[k];
        }
      }
      bool member_in_set = in_set(i, type);
      if (member_in_set) {
        require(res, mass.sign() > 0,
                "event for in-set type of " + agent_key(a) +
                    " has zero mass");
        if (mass.sign() <= 0) continue;
        for (int k = 0; k < n; ++k) {
          before_pmf[k] /= mass;
          after_pmf[k] /= mass;
        }
        RankDistribution b{a, before_pmf}, d{a, after_pmf};
        DominanceVerdict verdict = fosd_compare(d, b);
        require(res,
                verdict.relation == DominanceRelation::StrictlyDominates,
                "in-set type of " + agent_key(a) +
                    " does not strictly gain: after " +
                    witness_internal::mass_string(d.mass) + " vs before " +
                    witness_internal::mass_string(b.mass));
        require(res, stored_row < witness.per_type.size(),
                "missing stored row for an in-set type of " + agent_key(a));
        if (stored_row < witness.per_type.size()) {
          const TypeComparison& stored = witness.per_type[stored_row];
          require(res, stored.agent == a && stored.type == type,
                  "stored rows must follow (member, type) order");
          require(res, stored.event_mass == mass,
                  "stored event mass for " + agent_key(a) +
                      " does not match recomputation");
          require(res, witness_internal::distributions_equal(stored.before, b),
                  "stored conditional before-distribution for " +
                      agent_key(a) + " does not match recomputation");
          require(res, witness_internal::distributions_equal(stored.after, d),
                  "stored conditional after-distribution for " + agent_key(a) +
                      " does not match recomputation");
          require(res, stored.verdict == verdict,
                  "stored verdict for " + agent_key(a) +
                      " does not match recomputation");
        }
        ++stored_row;
      } else if (mass.sign() > 0) {
        // Only-if direction: this type was left out, so it must not strictly
        // gain on its event.
        for (int k = 0; k < n; ++k) {
          before_pmf[k] /= mass;
          after_pmf[k] /= mass;
        }
        RankDistribution b{a, before_pmf}, d{a, after_pmf};
        DominanceVerdict verdict = fosd_compare(d, b);
        require(res,
                verdict.relation != DominanceRelation::StrictlyDominates,
                "out-of-set type of " + agent_key(a) +
                    " would strictly gain, violating the only-if direction");
      }
    }
  }
  require(res, stored_row == witness.per_type.size(),
          "witness stores more rows than there are in-set types");
  return res;
}

// Conditions an interim witness on its full joint event (every member's type
// in its set) to produce an ex-ante witness for the conditioned prior: the
// per-type strict conditional gains mix into a strict prior-averaged gain for
// each member. When `conditioned` is non-null it receives the prior the
// returned witness applies to.
inline BlockWitness condition_to_ex_ante(const Mechanism& mechanism,
                                         const Prior& prior,
                                         const InterimWitness& witness,
                                         Prior* conditioned = nullptr) {
  Prior cond = condition(prior, Event::conjunction(witness.type_sets));
  BlockWitness out;
  out.notion = BlockNotion::ExAnte;
  out.coalition = witness.coalition;
  out.deviation = witness.deviation;
  for (const AgentId& a : witness.coalition.members()) {
    const int n = prior.market().opposite_count(a) + 1;
    std::vector<Rational> before(n), after(n);
    for (const WeightedProfile& wp : cond.support()) {
      const Ranking& r = wp.profile.ranking(a);
      for (const auto& [mu, w] : mechanism.evaluate(wp.profile).outcomes()) {
        before[r.rank_of(mu.partner_of(a)) - 1] += wp.weight * w;
      }
      const RandomMatching dev = witness.deviation.realize(wp.profile, mechanism);
      for (const auto& [mu, w] : dev.outcomes()) {
        after[r.rank_of(mu.partner_of(a)) - 1] += wp.weight * w;
      }
    }
    RankDistribution b{a, std::move(before)};
    RankDistribution d{a, std::move(after)};
    DominanceVerdict v = fosd_compare(d, b);
    out.agents.push_back({a, std::move(b), std::move(d), std::move(v)});
  }
  if (conditioned) *conditioned = std::move(cond);
  return out;
}

// Lifts an ex-post witness to an interim witness at the point-mass prior on
// its profile: singleton type sets and unit-mass conditional rows.
inline InterimWitness lift_to_interim(const BlockWitness& witness) {
  if (witness.notion != BlockNotion::ExPost || !witness.profile) {
    throw std::invalid_argument("lift_to_interim: needs an ex-post witness");
  }
  InterimWitness out;
  out.coalition = witness.coalition;
  out.deviation = witness.deviation;
  for (const AgentComparison& ac : witness.agents) {
    const Ranking& type = witness.profile->ranking(ac.agent);
    out.type_sets.push_back({ac.agent, {type}});
    out.per_type.push_back(
        {ac.agent, type, Rational(1), ac.before, ac.after, ac.verdict});
  }
  return out;
}

}  // namespace matchaudit
