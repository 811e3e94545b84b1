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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matchaudit/errors.hpp"
#include "matchaudit/market.hpp"
#include "matchaudit/profile.hpp"
#include "matchaudit/rational.hpp"

namespace matchaudit {

struct WeightedProfile {
  PreferenceProfile profile;
  Rational weight;
};

// A measurable event over preference profiles, in one of two shapes:
//  - a conjunction "agent a's ranking lies in this set", over any subset of
//    agents (agents not mentioned are unconstrained); or
//  - an explicit finite set of profiles.
// intersect() combines events of either shape.
class Event {
 public:
  // The trivial event (always true).
  static Event all() { return Event(); }

  static Event agent_types(const AgentId& agent, std::vector<Ranking> allowed) {
    return conjunction({{agent, std::move(allowed)}});
  }

  static Event conjunction(
      std::vector<std::pair<AgentId, std::vector<Ranking>>> constraints) {
    Event e;
    for (auto& [agent, allowed] : constraints) {
      if (allowed.empty()) {
        throw std::invalid_argument("Event: empty type set for " +
                                    agent_key(agent));
      }
      for (const Ranking& r : allowed) {
        if (r.owner() != agent) {
          throw std::invalid_argument("Event: type set for " +
                                      agent_key(agent) +
                                      " contains a ranking of another agent");
        }
      }
      std::sort(allowed.begin(), allowed.end());
      allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
    }
    e.constraints_ = std::move(constraints);
    std::sort(e.constraints_.begin(), e.constraints_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < e.constraints_.size(); ++i) {
      if (e.constraints_[i].first == e.constraints_[i - 1].first) {
        throw std::invalid_argument("Event: duplicate constraint for " +
                                    agent_key(e.constraints_[i].first));
      }
    }
    return e;
  }

  static Event profile_set(const std::vector<PreferenceProfile>& profiles) {
    Event e;
    std::vector<std::vector<int>> keys;
    keys.reserve(profiles.size());
    for (const PreferenceProfile& p : profiles) keys.push_back(p.key());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    e.explicit_keys_ = std::move(keys);
    return e;
  }

  // Intersection of two events; conjunction constraints for the same agent
  // intersect their allowed sets (an empty intersection yields an event that
  // matches nothing).
  Event intersect(const Event& other) const {
    Event out = *this;
    for (const auto& [agent, allowed] : other.constraints_) {
      auto it = std::find_if(
          out.constraints_.begin(), out.constraints_.end(),
          [&, a = agent](const auto& c) { return c.first == a; });
      if (it == out.constraints_.end()) {
        out.constraints_.emplace_back(agent, allowed);
      } else {
        std::vector<Ranking> both;
        std::set_intersection(it->second.begin(), it->second.end(),
                              allowed.begin(), allowed.end(),
                              std::back_inserter(both));
        it->second = std::move(both);
      }
    }
    std::sort(out.constraints_.begin(), out.constraints_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (other.explicit_keys_) {
      if (!out.explicit_keys_) {
        out.explicit_keys_ = other.explicit_keys_;
      } else {
        std::vector<std::vector<int>> both;
        std::set_intersection(out.explicit_keys_->begin(),
                              out.explicit_keys_->end(),
                              other.explicit_keys_->begin(),
                              other.explicit_keys_->end(),
                              std::back_inserter(both));
        out.explicit_keys_ = std::move(both);
      }
    }
    return out;
  }

  bool matches(const PreferenceProfile& profile) const {
    for (const auto& [agent, allowed] : constraints_) {
      const Ranking& r = profile.ranking(agent);
      if (!std::binary_search(allowed.begin(), allowed.end(), r)) return false;
    }
    if (explicit_keys_) {
      return std::binary_search(explicit_keys_->begin(), explicit_keys_->end(),
                                profile.key());
    }
    return true;
  }

 private:
  Event() = default;
  // Sorted by agent; each allowed set sorted and distinct.
  std::vector<std::pair<AgentId, std::vector<Ranking>>> constraints_;
  std::optional<std::vector<std::vector<int>>> explicit_keys_;
};

// An exact prior over preference profiles: a finite support of distinct
// profiles with positive rational weights summing to exactly 1, kept sorted
// in canonical profile order.
class Prior {
 public:
  Prior(Market market, std::vector<WeightedProfile> support)
      : market_(market), support_(std::move(support)) {
    if (support_.empty()) {
      throw std::invalid_argument("Prior: empty support");
    }
    for (const WeightedProfile& wp : support_) {
      if (wp.profile.market() != market_) {
        throw std::invalid_argument("Prior: profile from a different market");
      }
      if (wp.weight.sign() <= 0) {
        throw std::invalid_argument("Prior: weights must be positive");
      }
    }
    std::sort(support_.begin(), support_.end(),
              [](const WeightedProfile& a, const WeightedProfile& b) {
                return a.profile < b.profile;
              });
    Rational total;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (i > 0 && support_[i].profile == support_[i - 1].profile) {
        throw std::invalid_argument("Prior: duplicate profile in support");
      }
      total += support_[i].weight;
    }
    if (total != Rational(1)) {
      throw std::invalid_argument("Prior: weights sum to " + total.str() +
                                  ", expected 1/1");
    }
  }

  static Prior point_mass(const PreferenceProfile& profile) {
    return Prior(profile.market(), {{profile, Rational(1)}});
  }

  const Market& market() const { return market_; }
  const std::vector<WeightedProfile>& support() const { return support_; }
  std::size_t size() const { return support_.size(); }

 private:
  Market market_;
  std::vector<WeightedProfile> support_;
};

inline Rational mass_of(const Prior& prior, const Event& event) {
  Rational total;
  for (const WeightedProfile& wp : prior.support()) {
    if (event.matches(wp.profile)) total += wp.weight;
  }
  return total;
}

// Exact Bayesian conditioning. Throws ZeroMassEventError when the event has
// zero mass under the prior.
inline Prior condition(const Prior& prior, const Event& event) {
  std::vector<WeightedProfile> kept;
  Rational total;
  for (const WeightedProfile& wp : prior.support()) {
    if (event.matches(wp.profile)) {
      kept.push_back(wp);
      total += wp.weight;
    }
  }
  if (total.is_zero()) {
    throw ZeroMassEventError("condition: event has zero mass under the prior");
  }
  for (WeightedProfile& wp : kept) wp.weight /= total;
  return Prior(prior.market(), std::move(kept));
}

// The marginal distribution of one agent's ranking under the prior, sorted in
// canonical ranking order.
inline std::vector<std::pair<Ranking, Rational>> marginal_types(
    const Prior& prior, const AgentId& agent) {
  std::map<std::vector<int>, std::pair<const Ranking*, Rational>> acc;
  for (const WeightedProfile& wp : prior.support()) {
    const Ranking& r = wp.profile.ranking(agent);
    auto [it, fresh] = acc.emplace(r.ranks(), std::pair(&r, wp.weight));
    if (!fresh) it->second.second += wp.weight;
  }
  std::vector<std::pair<Ranking, Rational>> out;
  out.reserve(acc.size());
  for (const auto& [key, entry] : acc) {
    out.emplace_back(*entry.first, entry.second);
  }
  return out;
}

inline constexpr long kPriorSupportCap = 100'000;

struct AgentTypeDistribution {
  AgentId agent;
  // Distinct rankings of that agent with positive weights summing to 1.
  std::vector<std::pair<Ranking, Rational>> types;
};

// Independent private types: the product distribution over one type
// distribution per agent. Throws ResourceLimitError when the support would
// exceed the cap.
inline Prior product_prior(const Market& market,
                           const std::vector<AgentTypeDistribution>& agents,
                           long cap = kPriorSupportCap) {
  if (static_cast<int>(agents.size()) != market.total()) {
    throw std::invalid_argument(
        "product_prior: need one type distribution per agent");
  }
  std::vector<const AgentTypeDistribution*> by_slot(market.total(), nullptr);
  for (const AgentTypeDistribution& d : agents) {
    int s = market.slot(d.agent);
    if (by_slot[s]) {
      throw std::invalid_argument("product_prior: duplicate distribution for " +
                                  agent_key(d.agent));
    }
    if (d.types.empty()) {
      throw std::invalid_argument("product_prior: empty type set for " +
                                  agent_key(d.agent));
    }
    Rational total;
    for (std::size_t i = 0; i < d.types.size(); ++i) {
      const auto& [r, w] = d.types[i];
      if (r.owner() != d.agent) {
        throw std::invalid_argument("product_prior: ranking owner mismatch for " +
                                    agent_key(d.agent));
      }
      if (w.sign() <= 0) {
        throw std::invalid_argument("product_prior: type weights must be positive");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (d.types[j].first == r) {
          throw std::invalid_argument("product_prior: duplicate type for " +
                                      agent_key(d.agent));
        }
      }
      total += w;
    }
    if (total != Rational(1)) {
      throw std::invalid_argument("product_prior: type weights for " +
                                  agent_key(d.agent) + " sum to " +
                                  total.str() + ", expected 1/1");
    }
    by_slot[s] = &d;
  }
  long support_size = 1;
  for (const AgentTypeDistribution* d : by_slot) {
    long k = static_cast<long>(d->types.size());
    if (support_size > cap / k + 1) support_size = cap + 1;  // saturate
    else support_size *= k;
    if (support_size > cap) {
      throw ResourceLimitError("product_prior: support too large",
                               "prior_support_cap", cap);
    }
  }
  std::vector<WeightedProfile> support;
  support.reserve(support_size);
  std::vector<std::size_t> pick(market.total(), 0);
  for (;;) {
    std::vector<Ranking> rankings;
    rankings.reserve(market.total());
    Rational weight(1);
    for (int s = 0; s < market.total(); ++s) {
      rankings.push_back(by_slot[s]->types[pick[s]].first);
      weight *= by_slot[s]->types[pick[s]].second;
    }
    support.push_back({PreferenceProfile(market, std::move(rankings)), weight});
    int s = market.total() - 1;
    while (s >= 0 && ++pick[s] == by_slot[s]->types.size()) pick[s--] = 0;
    if (s < 0) break;
  }
  return Prior(market, std::move(support));
}

// Uniform independent prior over complete rankings: every agent draws
// uniformly among the orderings that list all potential partners above self.
inline Prior iid_uniform_prior(const Market& market,
                               long cap = kPriorSupportCap) {
  std::vector<AgentTypeDistribution> agents;
  for (AgentId a : market.agents()) {
    int k = market.opposite_count(a);
    std::vector<AgentId> order(k + 1, a);
    for (int i = 0; i < k; ++i) order[i] = AgentId{opposite(a.side), i};
    // Permute the first k entries (partners); self stays last.
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::vector<std::pair<Ranking, Rational>> types;
    do {
      std::vector<AgentId> o(k + 1, a);
      for (int i = 0; i < k; ++i) o[i] = AgentId{opposite(a.side), idx[i]};
      types.emplace_back(Ranking::from_order(a, market, o), Rational(0));
    } while (std::next_permutation(idx.begin(), idx.end()));
    Rational w(1, static_cast<long>(types.size()));
    for (auto& [r, weight] : types) weight = w;
    agents.push_back({a, std::move(types)});
  }
  return product_prior(market, agents, cap);
}

}  // namespace matchaudit
