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

// A matching: a pairing of some men with some women; everyone else is
// single. Internally an involution on slots with fixed points = singles.
class Matching {
 public:
  static Matching all_single(const Market& market) {
    return Matching(market);
  }

  // Builds a matching from (man, woman) pairs (either element order is
  // accepted). Each agent may appear at most once.
  static Matching from_pairs(const Market& market,
                             const std::vector<std::pair<AgentId, AgentId>>& pairs) {
    Matching out(market);
    for (const auto& [a, b] : pairs) {
      if (a.side == b.side) {
        throw std::invalid_argument("Matching: cannot pair " + agent_key(a) +
                                    " with " + agent_key(b) +
                                    " on the same side");
      }
      int sa = market.slot(a), sb = market.slot(b);
      if (out.partner_[sa] != sa || out.partner_[sb] != sb) {
        throw std::invalid_argument("Matching: agent matched twice");
      }
      out.partner_[sa] = sb;
      out.partner_[sb] = sa;
    }
    return out;
  }

  const Market& market() const { return market_; }

  // The partner of an agent; returns the agent itself when single.
  AgentId partner_of(const AgentId& a) const {
    return market_.agent_at(partner_[market_.slot(a)]);
  }
  bool is_matched(const AgentId& a) const {
    return partner_[market_.slot(a)] != market_.slot(a);
  }
  bool is_perfect() const {
    for (std::size_t s = 0; s < partner_.size(); ++s) {
      if (partner_[s] == static_cast<int>(s)) return false;
    }
    return true;
  }

  // Matched pairs as (man, woman), ordered by the man's index.
  std::vector<std::pair<AgentId, AgentId>> pairs() const {
    std::vector<std::pair<AgentId, AgentId>> out;
    for (int i = 0; i < market_.num_men; ++i) {
      if (partner_[i] != i) {
        out.emplace_back(man(i), market_.agent_at(partner_[i]));
      }
    }
    return out;
  }
  std::vector<AgentId> singles() const {
    std::vector<AgentId> out;
    for (int s = 0; s < market_.total(); ++s) {
      if (partner_[s] == s) out.push_back(market_.agent_at(s));
    }
    return out;
  }

  // Canonical key: each man's partner as a woman index, with "single" encoded
  // as num_women so that it sorts after every woman. (For a fixed market the
  // women's assignments are determined by the men's.)
  std::vector<int> key() const {
    std::vector<int> out(market_.num_men);
    for (int i = 0; i < market_.num_men; ++i) {
      out[i] = partner_[i] == i ? market_.num_women : partner_[i] - market_.num_men;
    }
    return out;
  }

  friend bool operator==(const Matching& a, const Matching& b) {
    return a.market_ == b.market_ && a.partner_ == b.partner_;
  }
  friend bool operator!=(const Matching& a, const Matching& b) {
    return !(a == b);
  }
  friend bool operator<(const Matching& a, const Matching& b) {
    return a.key() < b.key();
  }

 private:
  explicit Matching(const Market& market)
      : market_(market), partner_(market.total()) {
    for (int s = 0; s < market_.total(); ++s) partner_[s] = s;
  }

  Market market_;
  std::vector<int> partner_;  // slot -> partner slot; own slot when single
};

inline Matching permute_matching(const Matching& mu,
                                 const AgentPermutation& sigma) {
  std::vector<std::pair<AgentId, AgentId>> pairs;
  for (const auto& [m, w] : mu.pairs()) {
    pairs.emplace_back(sigma.apply(m), sigma.apply(w));
  }
  return Matching::from_pairs(mu.market(), pairs);
}

inline constexpr long kMatchingEnumerationCap = 1'000'000;

// All matchings of the market in canonical (key-lexicographic) order: for
// each man in turn, free women by ascending index, then single. The count is
// sum over k of C(num_men, k) * C(num_women, k) * k!.
inline std::vector<Matching> enumerate_matchings(
    const Market& market, long cap = kMatchingEnumerationCap) {
  std::vector<Matching> out;
  std::vector<std::pair<AgentId, AgentId>> pairs;
  std::vector<bool> taken(market.num_women, false);
  auto rec = [&](auto&& self, int next_man) -> void {
    if (next_man == market.num_men) {
      if (static_cast<long>(out.size()) >= cap) {
        throw ResourceLimitError("enumerate_matchings: too many matchings",
                                 "matching_enumeration_cap", cap);
      }
      out.push_back(Matching::from_pairs(market, pairs));
      return;
    }
    for (int w = 0; w < market.num_women; ++w) {
      if (taken[w]) continue;
      taken[w] = true;
      pairs.emplace_back(man(next_man), woman(w));
      self(self, next_man + 1);
      pairs.pop_back();
      taken[w] = false;
    }
    self(self, next_man + 1);  // next_man stays single
  };
  rec(rec, 0);
  return out;
}

// All matchings in which every listed member is matched within the member set
// (or single) and every non-member is single; canonical order as above.
// Members must be distinct agents of the market.
inline std::vector<Matching> enumerate_internal_matchings(
    const Market& market, const std::vector<AgentId>& members,
    long cap = kMatchingEnumerationCap) {
  std::vector<int> men_in, women_in;
  for (const AgentId& a : members) {
    if (!market.contains(a)) {
      throw std::invalid_argument("enumerate_internal_matchings: agent " +
                                  agent_key(a) + " outside the market");
    }
    (a.side == Side::Men ? men_in : women_in).push_back(a.index);
  }
  std::sort(men_in.begin(), men_in.end());
  std::sort(women_in.begin(), women_in.end());
  std::vector<Matching> out;
  std::vector<std::pair<AgentId, AgentId>> pairs;
  std::vector<bool> taken(market.num_women, false);
  auto rec = [&](auto&& self, std::size_t next) -> void {
    if (next == men_in.size()) {
      if (static_cast<long>(out.size()) >= cap) {
        throw ResourceLimitError(
            "enumerate_internal_matchings: too many matchings",
            "matching_enumeration_cap", cap);
      }
      out.push_back(Matching::from_pairs(market, pairs));
      return;
    }
    for (int w : women_in) {
      if (taken[w]) continue;
      taken[w] = true;
      pairs.emplace_back(man(men_in[next]), woman(w));
      self(self, next + 1);
      pairs.pop_back();
      taken[w] = false;
    }
    self(self, next + 1);  // this member stays single
  };
  rec(rec, 0);
  return out;
}

// One witnessed defect of a matching at a profile.
struct StabilityViolation {
  enum class Kind { IndividualRationality, BlockingPair };
  Kind kind = Kind::BlockingPair;
  AgentId agent;                   // IR: the harmed agent; pair: the man
  std::optional<AgentId> partner;  // pair: the woman

  std::string describe() const {
    if (kind == Kind::IndividualRationality) {
      return agent_key(agent) + " prefers staying single to its assignment";
    }
    return "(" + agent_key(agent) + ", " + agent_key(*partner) +
           ") both prefer each other to their assignments";
  }
};

struct StabilityCheck {
  bool stable = false;
  // All violations: individual-rationality failures in slot order, then
  // blocking pairs in (man, woman) lexicographic order.
  std::vector<StabilityViolation> violations;
};

// Exhaustive stability check of a matching at a profile: individual
// rationality for every agent, and absence of blocking pairs, where a pair
// (m, w) blocks when each strictly prefers the other to its current outcome.
inline StabilityCheck is_stable_matching(const PreferenceProfile& profile,
                                         const Matching& mu) {
  if (profile.market() != mu.market()) {
    throw std::invalid_argument("is_stable_matching: market mismatch");
  }
  StabilityCheck out;
  const Market& market = profile.market();
  for (AgentId a : market.agents()) {
    const Ranking& r = profile.ranking(a);
    if (r.rank_of(mu.partner_of(a)) > r.self_rank()) {
      out.violations.push_back(
          {StabilityViolation::Kind::IndividualRationality, a, std::nullopt});
    }
  }
  for (int i = 0; i < market.num_men; ++i) {
    const Ranking& rm = profile.ranking(man(i));
    for (int j = 0; j < market.num_women; ++j) {
      const Ranking& rw = profile.ranking(woman(j));
      if (rm.rank_of(woman(j)) < rm.rank_of(mu.partner_of(man(i))) &&
          rw.rank_of(man(i)) < rw.rank_of(mu.partner_of(woman(j)))) {
        out.violations.push_back(
            {StabilityViolation::Kind::BlockingPair, man(i), woman(j)});
      }
    }
  }
  out.stable = out.violations.empty();
  return out;
}

// An exact lottery over matchings of one market: finitely many distinct
// outcomes with positive rational weights summing to exactly 1, kept in
// canonical matching order.
class RandomMatching {
 public:
  explicit RandomMatching(std::vector<std::pair<Matching, Rational>> outcomes) {
    if (outcomes.empty()) {
      throw std::invalid_argument("RandomMatching: empty lottery");
    }
    const Market market = outcomes.front().first.market();
    std::map<std::vector<int>, std::size_t> index;
    for (auto& [mu, w] : outcomes) {
      if (mu.market() != market) {
        throw std::invalid_argument("RandomMatching: mixed markets");
      }
      if (w.sign() <= 0) {
        throw std::invalid_argument("RandomMatching: weights must be positive");
      }
      auto [it, fresh] = index.emplace(mu.key(), outcomes_.size());
      if (fresh) {
        outcomes_.emplace_back(std::move(mu), w);
      } else {
        outcomes_[it->second].second += w;
      }
    }
    std::sort(outcomes_.begin(), outcomes_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Rational total;
    for (const auto& [mu, w] : outcomes_) total += w;
    if (total != Rational(1)) {
      throw std::invalid_argument("RandomMatching: weights sum to " +
                                  total.str() + ", expected 1/1");
    }
  }

  static RandomMatching point_mass(const Matching& mu) {
    return RandomMatching({{mu, Rational(1)}});
  }
  static RandomMatching uniform(const std::vector<Matching>& support) {
    if (support.empty()) {
      throw std::invalid_argument("RandomMatching: empty uniform support");
    }
    std::vector<std::pair<Matching, Rational>> outcomes;
    Rational w(1, static_cast<long>(support.size()));
    for (const Matching& mu : support) outcomes.emplace_back(mu, w);
    return RandomMatching(std::move(outcomes));
  }

  const Market& market() const { return outcomes_.front().first.market(); }
  const std::vector<std::pair<Matching, Rational>>& outcomes() const {
    return outcomes_;
  }

  // Probability that agent a ends up with partner b; b == a means single.
  Rational pair_probability(const AgentId& a, const AgentId& b) const {
    Rational total;
    for (const auto& [mu, w] : outcomes_) {
      if (mu.partner_of(a) == b) total += w;
    }
    return total;
  }

  // Probability mass by rank of the realized outcome under the given ranking:
  // entry r-1 is the probability the ranking's owner gets its r-th best
  // outcome (self counts as an outcome).
  std::vector<Rational> rank_pmf(const Ranking& ranking) const {
    std::vector<Rational> pmf(ranking.outcome_count());
    for (const auto& [mu, w] : outcomes_) {
      pmf[ranking.rank_of(mu.partner_of(ranking.owner())) - 1] += w;
    }
    return pmf;
  }

  friend bool operator==(const RandomMatching& a, const RandomMatching& b) {
    return a.outcomes_ == b.outcomes_;
  }
  friend bool operator!=(const RandomMatching& a, const RandomMatching& b) {
    return !(a == b);
  }

 private:
  std::vector<std::pair<Matching, Rational>> outcomes_;
};

}  // namespace matchaudit
