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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matchaudit/dominance.hpp"
#include "matchaudit/market.hpp"
#include "matchaudit/matching.hpp"
#include "matchaudit/prior.hpp"
#include "matchaudit/profile.hpp"
#include "matchaudit/rational.hpp"

namespace matchaudit {

// Declarative description of how a mechanism was built, for serialization
// and reporting. Custom mechanisms carry only a label.
struct MechanismDescriptor {
  enum class Kind {
    DaMen,
    DaWomen,
    UniformRandom,      // uniform over all matchings
    UniformRandomFull,  // uniform over perfect matchings
    RandomStable,       // uniform over the stable set
    Table,              // explicit per-profile entries over a fallback
    PartnerSwap,        // relabeling-aware point deviation over a base
    Custom,
  };
  Kind kind = Kind::Custom;
  std::string name = "custom";
  std::shared_ptr<const MechanismDescriptor> base;  // Table / PartnerSwap
  std::vector<std::pair<PreferenceProfile, RandomMatching>> entries;  // Table
  std::optional<PreferenceProfile> base_profile;  // PartnerSwap
};

inline std::string kind_name(MechanismDescriptor::Kind k) {
  switch (k) {
    case MechanismDescriptor::Kind::DaMen: return "da-men";
    case MechanismDescriptor::Kind::DaWomen: return "da-women";
    case MechanismDescriptor::Kind::UniformRandom: return "uniform-random";
    case MechanismDescriptor::Kind::UniformRandomFull:
      return "uniform-random-full";
    case MechanismDescriptor::Kind::RandomStable: return "random-stable";
    case MechanismDescriptor::Kind::Table: return "table";
    case MechanismDescriptor::Kind::PartnerSwap: return "partner-swap";
    case MechanismDescriptor::Kind::Custom: return "custom";
  }
  throw std::logic_error("kind_name: bad enum");
}

// A (possibly randomized) matching mechanism: an exact map from preference
// profiles to lotteries over matchings. Evaluation is memoized per profile;
// the returned reference stays valid for the life of the mechanism (copies
// share the cache).
class Mechanism {
 public:
  Mechanism(Market market, MechanismDescriptor desc,
            std::function<RandomMatching(const PreferenceProfile&)> eval)
      : market_(market),
        desc_(std::move(desc)),
        eval_(std::move(eval)),
        cache_(std::make_shared<Cache>()) {}

  const Market& market() const { return market_; }
  const MechanismDescriptor& descriptor() const { return desc_; }
  std::string name() const {
    return desc_.kind == MechanismDescriptor::Kind::Custom
               ? desc_.name
               : kind_name(desc_.kind);
  }

  const RandomMatching& evaluate(const PreferenceProfile& profile) const {
    if (profile.market() != market_) {
      throw std::invalid_argument("Mechanism: profile from a different market");
    }
    std::vector<int> key = profile.key();
    {
      std::lock_guard<std::mutex> lock(cache_->mu);
      auto it = cache_->map.find(key);
      if (it != cache_->map.end()) return it->second;
    }
    RandomMatching value = eval_(profile);
    if (value.market() != market_) {
      throw std::logic_error("Mechanism: evaluator returned a foreign lottery");
    }
    std::lock_guard<std::mutex> lock(cache_->mu);
    return cache_->map.emplace(std::move(key), std::move(value)).first->second;
  }

 private:
  struct Cache {
    std::mutex mu;
    std::map<std::vector<int>, RandomMatching> map;
  };

  Market market_;
  MechanismDescriptor desc_;
  std::function<RandomMatching(const PreferenceProfile&)> eval_;
  std::shared_ptr<Cache> cache_;
};

// Classic deferred acceptance with the given proposing side. Proposers work
// down their acceptable lists; receivers hold the best acceptable proposal.
// The result is the proposing-side-optimal stable matching.
inline Matching deferred_acceptance(const PreferenceProfile& profile,
                                    Side proposing) {
  const Market& market = profile.market();
  const int np = market.side_count(proposing);
  std::vector<std::vector<AgentId>> choice(np);  // acceptable, best first
  for (int i = 0; i < np; ++i) {
    for (AgentId o : profile.ranking(AgentId{proposing, i}).order()) {
      if (o.side != proposing) choice[i].push_back(o);
    }
    // order() lists outcomes best-to-worst with self included, so partners
    // after self are unacceptable and must be dropped.
    const Ranking& r = profile.ranking(AgentId{proposing, i});
    choice[i].erase(
        std::remove_if(choice[i].begin(), choice[i].end(),
                       [&](const AgentId& w) { return !r.acceptable(w); }),
        choice[i].end());
  }
  std::vector<int> next(np, 0);
  std::vector<int> held(market.side_count(opposite(proposing)), -1);
  for (;;) {
    int p = -1;
    for (int i = 0; i < np; ++i) {
      bool engaged = false;
      for (int h : held) engaged = engaged || h == i;
      if (!engaged && next[i] < static_cast<int>(choice[i].size())) {
        p = i;
        break;
      }
    }
    if (p < 0) break;
    AgentId r = choice[p][next[p]++];
    const Ranking& rr = profile.ranking(r);
    AgentId proposer{proposing, p};
    if (!rr.acceptable(proposer)) continue;
    if (held[r.index] < 0 ||
        rr.prefers(proposer, AgentId{proposing, held[r.index]})) {
      held[r.index] = p;
    }
  }
  std::vector<std::pair<AgentId, AgentId>> pairs;
  for (int j = 0; j < static_cast<int>(held.size()); ++j) {
    if (held[j] >= 0) {
      pairs.emplace_back(AgentId{proposing, held[j]},
                         AgentId{opposite(proposing), j});
    }
  }
  return Matching::from_pairs(market, pairs);
}

// The full stable set of a profile, in canonical matching order, by
// exhaustive enumeration and checking. Never empty.
inline std::vector<Matching> stable_set(const PreferenceProfile& profile,
                                        long cap = kMatchingEnumerationCap) {
  std::vector<Matching> out;
  for (Matching& mu : enumerate_matchings(profile.market(), cap)) {
    if (is_stable_matching(profile, mu).stable) out.push_back(std::move(mu));
  }
  if (out.empty()) {
    throw std::logic_error("stable_set: no stable matching found");
  }
  return out;
}

inline Mechanism da_mechanism(const Market& market, Side proposing) {
  MechanismDescriptor d;
  d.kind = proposing == Side::Men ? MechanismDescriptor::Kind::DaMen
                                  : MechanismDescriptor::Kind::DaWomen;
  return Mechanism(market, d, [proposing](const PreferenceProfile& p) {
    return RandomMatching::point_mass(deferred_acceptance(p, proposing));
  });
}

// Uniform over all matchings of the market, regardless of preferences.
inline Mechanism uniform_random_mechanism(const Market& market) {
  auto all = std::make_shared<std::vector<Matching>>(enumerate_matchings(market));
  MechanismDescriptor d;
  d.kind = MechanismDescriptor::Kind::UniformRandom;
  return Mechanism(market, d, [all](const PreferenceProfile&) {
    return RandomMatching::uniform(*all);
  });
}

// Uniform over perfect matchings (everyone matched); requires a square
// market.
inline Mechanism uniform_random_full_mechanism(const Market& market) {
  if (market.num_men != market.num_women) {
    throw std::invalid_argument(
        "uniform_random_full_mechanism: market must be square");
  }
  auto perfect = std::make_shared<std::vector<Matching>>();
  for (Matching& mu : enumerate_matchings(market)) {
    if (mu.is_perfect()) perfect->push_back(std::move(mu));
  }
  MechanismDescriptor d;
  d.kind = MechanismDescriptor::Kind::UniformRandomFull;
  return Mechanism(market, d, [perfect](const PreferenceProfile&) {
    return RandomMatching::uniform(*perfect);
  });
}

// Uniform over the stable set of the reported profile.
inline Mechanism random_stable_mechanism(const Market& market) {
  MechanismDescriptor d;
  d.kind = MechanismDescriptor::Kind::RandomStable;
  return Mechanism(market, d, [](const PreferenceProfile& p) {
    return RandomMatching::uniform(stable_set(p));
  });
}

// Explicit per-profile entries over a fallback mechanism: profiles named in
// the table map to their listed lottery, all others to fallback(profile).
inline Mechanism table_mechanism(
    const Market& market,
    std::vector<std::pair<PreferenceProfile, RandomMatching>> entries,
    const Mechanism& fallback) {
  if (fallback.market() != market) {
    throw std::invalid_argument("table_mechanism: fallback market mismatch");
  }
  auto index = std::make_shared<std::map<std::vector<int>, RandomMatching>>();
  for (auto& [profile, lottery] : entries) {
    if (profile.market() != market || lottery.market() != market) {
      throw std::invalid_argument("table_mechanism: entry market mismatch");
    }
    if (!index->emplace(profile.key(), lottery).second) {
      throw std::invalid_argument("table_mechanism: duplicate profile entry");
    }
  }
  MechanismDescriptor d;
  d.kind = MechanismDescriptor::Kind::Table;
  d.base = std::make_shared<const MechanismDescriptor>(fallback.descriptor());
  d.entries = std::move(entries);
  return Mechanism(market, d,
                   [index, fallback](const PreferenceProfile& p) {
                     auto it = index->find(p.key());
                     if (it != index->end()) return it->second;
                     return fallback.evaluate(p);
                   });
}

// A relabeling-aware point deviation for 3x3 markets: on any profile equal to
// a side-preserving relabeling sigma of base_profile, the mechanism outputs
// the point mass on {sigma(m1)-sigma(w2), sigma(m2)-sigma(w1),
// sigma(m3)-sigma(w3)} -- the first two men's partners swapped relative to
// the matching that pairs everyone by index -- and on every other profile it
// mimics the base mechanism.
inline Mechanism partner_swap_mechanism(const Mechanism& base,
                                        const PreferenceProfile& base_profile) {
  const Market& market = base.market();
  if (base_profile.market() != market) {
    throw std::invalid_argument("partner_swap_mechanism: market mismatch");
  }
  if (market.num_men != 3 || market.num_women != 3) {
    throw std::invalid_argument("partner_swap_mechanism: market must be 3x3");
  }
  Matching swapped = Matching::from_pairs(
      market, {{man(0), woman(1)}, {man(1), woman(0)}, {man(2), woman(2)}});
  // Precompute the relabeling class: profile key -> lexicographically least
  // sigma producing it.
  auto klass = std::make_shared<std::map<std::vector<int>, Matching>>();
  {
    AgentPermutation sigma = AgentPermutation::identity(market);
    std::vector<int>& mm = sigma.man_map;
    std::vector<int>& wm = sigma.woman_map;
    std::sort(mm.begin(), mm.end());
    do {
      std::sort(wm.begin(), wm.end());
      do {
        klass->emplace(permute_profile(base_profile, sigma).key(),
                       permute_matching(swapped, sigma));
      } while (std::next_permutation(wm.begin(), wm.end()));
    } while (std::next_permutation(mm.begin(), mm.end()));
  }
  MechanismDescriptor d;
  d.kind = MechanismDescriptor::Kind::PartnerSwap;
  d.base = std::make_shared<const MechanismDescriptor>(base.descriptor());
  d.base_profile = base_profile;
  return Mechanism(market, d, [klass, base](const PreferenceProfile& p) {
    auto it = klass->find(p.key());
    if (it != klass->end()) return RandomMatching::point_mass(it->second);
    return base.evaluate(p);
  });
}

inline Mechanism custom_mechanism(
    const Market& market, std::string name,
    std::function<RandomMatching(const PreferenceProfile&)> eval) {
  MechanismDescriptor d;
  d.kind = MechanismDescriptor::Kind::Custom;
  d.name = std::move(name);
  return Mechanism(market, d, std::move(eval));
}

// Rank distribution of one agent at a fixed profile.
inline RankDistribution rank_distribution_at(const Mechanism& mechanism,
                                             const PreferenceProfile& profile,
                                             const AgentId& agent) {
  return {agent, mechanism.evaluate(profile).rank_pmf(profile.ranking(agent))};
}

// Rank distribution of one agent under a prior: the prior-weighted mixture of
// its per-profile distributions (ranks always taken under the agent's
// realized own ranking).
inline RankDistribution rank_distribution(const Mechanism& mechanism,
                                          const Prior& prior,
                                          const AgentId& agent) {
  std::vector<Rational> pmf(prior.market().opposite_count(agent) + 1);
  for (const WeightedProfile& wp : prior.support()) {
    const Ranking& r = wp.profile.ranking(agent);
    for (const auto& [mu, w] : mechanism.evaluate(wp.profile).outcomes()) {
      pmf[r.rank_of(mu.partner_of(agent)) - 1] += wp.weight * w;
    }
  }
  return {agent, std::move(pmf)};
}

// A cardinal utility for one agent: a value per outcome (opposite side by
// index, then self last).
struct UtilityFunction {
  AgentId agent;
  std::vector<Rational> by_outcome;
};

inline Rational expected_utility(const Mechanism& mechanism, const Prior& prior,
                                 const AgentId& agent,
                                 const UtilityFunction& utility) {
  if (utility.agent != agent ||
      static_cast<int>(utility.by_outcome.size()) !=
          prior.market().opposite_count(agent) + 1) {
    throw std::invalid_argument("expected_utility: utility shape mismatch");
  }
  Rational total;
  for (const WeightedProfile& wp : prior.support()) {
    for (const auto& [mu, w] : mechanism.evaluate(wp.profile).outcomes()) {
      AgentId partner = mu.partner_of(agent);
      int outcome = partner == agent
                        ? static_cast<int>(utility.by_outcome.size()) - 1
                        : partner.index;
      total += wp.weight * w * utility.by_outcome[outcome];
    }
  }
  return total;
}

}  // namespace matchaudit
