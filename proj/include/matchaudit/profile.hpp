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
#include <tuple>
#include <utility>
#include <vector>

#include "matchaudit/market.hpp"

namespace matchaudit {

// A strict total order held by one agent over its possible outcomes: every
// agent on the opposite side plus the option of staying single ("self").
// Rank 1 is best. Outcomes ranked below self are unacceptable. Rankings are
// always complete: every opposite-side agent and self receive exactly one
// rank, so the ranks form a bijection onto 1..(opposite count + 1).
class Ranking {
 public:
  // rank_by_outcome[i] is the rank of opposite-side agent i for
  // i < opposite_count; the last entry is the rank of staying single.
  Ranking(AgentId owner, const Market& market, std::vector<int> rank_by_outcome)
      : Ranking(owner, market.opposite_count(owner), std::move(rank_by_outcome),
                Checked::No) {
    if (!market.contains(owner)) {
      throw std::invalid_argument("Ranking: owner outside the market");
    }
  }

  // Builds a ranking from a best-to-worst list that names every opposite-side
  // agent exactly once and the owner itself (meaning "stay single") once.
  static Ranking from_order(AgentId owner, const Market& market,
                            const std::vector<AgentId>& best_to_worst) {
    if (!market.contains(owner)) {
      throw std::invalid_argument("Ranking: owner outside the market");
    }
    int opposite_count = market.opposite_count(owner);
    int n = opposite_count + 1;
    if (static_cast<int>(best_to_worst.size()) != n) {
      throw std::invalid_argument("Ranking: order for " + agent_key(owner) +
                                  " must list all " +
                                  std::to_string(opposite_count) +
                                  " potential partners plus self");
    }
    std::vector<int> ranks(n, 0);
    for (int pos = 0; pos < n; ++pos) {
      const AgentId& o = best_to_worst[pos];
      int outcome;
      if (o == owner) {
        outcome = n - 1;
      } else if (o.side == opposite(owner.side) && o.index >= 0 &&
                 o.index < opposite_count) {
        outcome = o.index;
      } else {
        throw std::invalid_argument("Ranking: '" + agent_key(o) +
                                    "' is not an outcome for " +
                                    agent_key(owner));
      }
      if (ranks[outcome] != 0) {
        throw std::invalid_argument("Ranking: duplicate outcome " +
                                    agent_key(o));
      }
      ranks[outcome] = pos + 1;
    }
    return Ranking(owner, opposite_count, std::move(ranks), Checked::No);
  }

  AgentId owner() const { return owner_; }
  int opposite_count() const { return opposite_count_; }
  // Number of possible outcomes |S| = opposite count + 1.
  int outcome_count() const { return opposite_count_ + 1; }

  // Rank of an outcome: an opposite-side agent, or the owner itself for
  // "stay single".
  int rank_of(const AgentId& outcome) const {
    if (outcome == owner_) return rank_by_outcome_.back();
    if (outcome.side != opposite(owner_.side) || outcome.index < 0 ||
        outcome.index >= opposite_count_) {
      throw std::invalid_argument("Ranking: '" + agent_key(outcome) +
                                  "' is not an outcome for " +
                                  agent_key(owner_));
    }
    return rank_by_outcome_[outcome.index];
  }
  int self_rank() const { return rank_by_outcome_.back(); }
  bool prefers(const AgentId& a, const AgentId& b) const {
    return rank_of(a) < rank_of(b);
  }
  bool acceptable(const AgentId& partner) const {
    return rank_of(partner) < self_rank();
  }

  // Best-to-worst outcome list; the owner's own id stands for staying single.
  std::vector<AgentId> order() const {
    std::vector<AgentId> out(outcome_count(), owner_);
    for (int i = 0; i < opposite_count_; ++i) {
      out[rank_by_outcome_[i] - 1] = AgentId{opposite(owner_.side), i};
    }
    out[self_rank() - 1] = owner_;
    return out;
  }

  const std::vector<int>& ranks() const { return rank_by_outcome_; }

  friend bool operator==(const Ranking& a, const Ranking& b) {
    return a.owner_ == b.owner_ && a.rank_by_outcome_ == b.rank_by_outcome_;
  }
  friend bool operator!=(const Ranking& a, const Ranking& b) {
    return !(a == b);
  }
  // Canonical order: by owner, then lexicographically by the rank vector.
  friend bool operator<(const Ranking& a, const Ranking& b) {
    if (a.owner_ != b.owner_) return a.owner_ < b.owner_;
    return a.rank_by_outcome_ < b.rank_by_outcome_;
  }

 private:
  enum class Checked { No };
  Ranking(AgentId owner, int opposite_count, std::vector<int> rank_by_outcome,
          Checked)
      : owner_(owner),
        opposite_count_(opposite_count),
        rank_by_outcome_(std::move(rank_by_outcome)) {
    int n = opposite_count_ + 1;
    if (static_cast<int>(rank_by_outcome_.size()) != n) {
      throw std::invalid_argument("Ranking: expected " + std::to_string(n) +
                                  " ranks for " + agent_key(owner_));
    }
    std::vector<bool> seen(n, false);
    for (int r : rank_by_outcome_) {
      if (r < 1 || r > n || seen[r - 1]) {
        throw std::invalid_argument(
            "Ranking: ranks must be a bijection onto 1.." + std::to_string(n));
      }
      seen[r - 1] = true;
    }
  }

  AgentId owner_;
  int opposite_count_;
  std::vector<int> rank_by_outcome_;
};

// One complete preference profile: a ranking for every agent in the market,
// stored in slot order (men by index, then women by index).
class PreferenceProfile {
 public:
  PreferenceProfile(Market market, std::vector<Ranking> by_slot)
      : market_(market), rankings_(std::move(by_slot)) {
    if (static_cast<int>(rankings_.size()) != market_.total()) {
      throw std::invalid_argument("PreferenceProfile: need one ranking per agent");
    }
    for (int s = 0; s < market_.total(); ++s) {
      AgentId expect = market_.agent_at(s);
      if (rankings_[s].owner() != expect ||
          rankings_[s].opposite_count() != market_.opposite_count(expect)) {
        throw std::invalid_argument(
            "PreferenceProfile: slot " + std::to_string(s) +
            " must hold the ranking of " + agent_key(expect));
      }
    }
  }

  const Market& market() const { return market_; }
  const Ranking& ranking(const AgentId& a) const {
    return rankings_[market_.slot(a)];
  }
  int rank_of(const AgentId& agent, const AgentId& outcome) const {
    return ranking(agent).rank_of(outcome);
  }
  const std::vector<Ranking>& rankings() const { return rankings_; }

  // Returns a copy with one agent's ranking replaced.
  PreferenceProfile with_ranking(const Ranking& r) const {
    if (!market_.contains(r.owner()) ||
        r.outcome_count() != market_.opposite_count(r.owner()) + 1) {
      throw std::invalid_argument(
          "PreferenceProfile::with_ranking: ranking does not fit this market");
    }
    PreferenceProfile out = *this;
    out.rankings_[market_.slot(r.owner())] = r;
    return out;
  }

  // Flattened rank vectors in slot order; the canonical sort/equality key.
  std::vector<int> key() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(market_.total()) *
                (market_.num_men + 1));
    for (const Ranking& r : rankings_) {
      out.insert(out.end(), r.ranks().begin(), r.ranks().end());
    }
    return out;
  }

  friend bool operator==(const PreferenceProfile& a,
                         const PreferenceProfile& b) {
    return a.market_ == b.market_ && a.key() == b.key();
  }
  friend bool operator!=(const PreferenceProfile& a,
                         const PreferenceProfile& b) {
    return !(a == b);
  }
  friend bool operator<(const PreferenceProfile& a,
                        const PreferenceProfile& b) {
    return a.key() < b.key();
  }

 private:
  Market market_;
  std::vector<Ranking> rankings_;
};

// A side-preserving relabeling of agents: a permutation of the men and a
// permutation of the women, applied jointly to owners and outcomes.
struct AgentPermutation {
  std::vector<int> man_map;    // man i  ->  man man_map[i]
  std::vector<int> woman_map;  // woman j -> woman woman_map[j]

  static AgentPermutation identity(const Market& market) {
    AgentPermutation p;
    p.man_map.resize(market.num_men);
    p.woman_map.resize(market.num_women);
    for (int i = 0; i < market.num_men; ++i) p.man_map[i] = i;
    for (int j = 0; j < market.num_women; ++j) p.woman_map[j] = j;
    return p;
  }

  AgentId apply(const AgentId& a) const {
    const std::vector<int>& m = a.side == Side::Men ? man_map : woman_map;
    if (a.index < 0 || a.index >= static_cast<int>(m.size())) {
      throw std::invalid_argument("AgentPermutation: agent out of range");
    }
    return AgentId{a.side, m[a.index]};
  }

  // Composition: (this.after(inner))(a) == this(inner(a)).
  AgentPermutation after(const AgentPermutation& inner) const {
    AgentPermutation out;
    out.man_map.resize(inner.man_map.size());
    out.woman_map.resize(inner.woman_map.size());
    for (std::size_t i = 0; i < inner.man_map.size(); ++i) {
      out.man_map[i] = man_map.at(inner.man_map[i]);
    }
    for (std::size_t j = 0; j < inner.woman_map.size(); ++j) {
      out.woman_map[j] = woman_map.at(inner.woman_map[j]);
    }
    return out;
  }

  bool valid_for(const Market& market) const {
    auto is_perm = [](const std::vector<int>& v) {
      std::vector<bool> seen(v.size(), false);
      for (int x : v) {
        if (x < 0 || x >= static_cast<int>(v.size()) || seen[x]) return false;
        seen[x] = true;
      }
      return true;
    };
    return static_cast<int>(man_map.size()) == market.num_men &&
           static_cast<int>(woman_map.size()) == market.num_women &&
           is_perm(man_map) && is_perm(woman_map);
  }

  friend bool operator==(const AgentPermutation& a, const AgentPermutation& b) {
    return a.man_map == b.man_map && a.woman_map == b.woman_map;
  }
};

// Relabels a profile: the image profile ranks sigma(x) for sigma(a) exactly
// as the original ranks x for a.
inline PreferenceProfile permute_profile(const PreferenceProfile& profile,
                                         const AgentPermutation& sigma) {
  const Market& market = profile.market();
  if (!sigma.valid_for(market)) {
    throw std::invalid_argument("permute_profile: permutation does not fit market");
  }
  std::vector<std::vector<int>> ranks(market.total());
  for (int s = 0; s < market.total(); ++s) {
    ranks[s].resize(market.opposite_count(market.agent_at(s)) + 1);
  }
  for (AgentId a : market.agents()) {
    const Ranking& r = profile.ranking(a);
    AgentId ia = sigma.apply(a);
    std::vector<int>& image = ranks[market.slot(ia)];
    for (int o = 0; o < r.opposite_count(); ++o) {
      AgentId x{opposite(a.side), o};
      image[sigma.apply(x).index] = r.rank_of(x);
    }
    image.back() = r.self_rank();
  }
  std::vector<Ranking> out;
  out.reserve(market.total());
  for (int s = 0; s < market.total(); ++s) {
    out.emplace_back(market.agent_at(s), market, std::move(ranks[s]));
  }
  return PreferenceProfile(market, std::move(out));
}

// Finds the lexicographically least side-preserving permutation sigma (by
// man_map, then woman_map) with permute_profile(base, sigma) == candidate,
// or nullopt if the two profiles are not relabelings of each other.
inline std::optional<AgentPermutation> find_permutation(
    const PreferenceProfile& candidate, const PreferenceProfile& base) {
  const Market& market = base.market();
  if (candidate.market() != market) {
    throw std::invalid_argument("find_permutation: markets differ");
  }
  AgentPermutation sigma = AgentPermutation::identity(market);
  std::vector<int>& mm = sigma.man_map;
  std::vector<int>& wm = sigma.woman_map;
  auto matches = [&]() {
    for (AgentId a : market.agents()) {
      const Ranking& r = base.ranking(a);
      const Ranking& ir = candidate.ranking(sigma.apply(a));
      if (ir.self_rank() != r.self_rank()) return false;
      for (int o = 0; o < r.opposite_count(); ++o) {
        AgentId x{opposite(a.side), o};
        if (ir.rank_of(sigma.apply(x)) != r.rank_of(x)) return false;
      }
    }
    return true;
  };
  std::sort(mm.begin(), mm.end());
  do {
    std::sort(wm.begin(), wm.end());
    do {
      if (matches()) return sigma;
    } while (std::next_permutation(wm.begin(), wm.end()));
  } while (std::next_permutation(mm.begin(), mm.end()));
  return std::nullopt;
}

// All distinct relabelings of a profile, sorted canonically. The size divides
// num_men! * num_women!; it is smaller exactly when the profile has symmetry.
inline std::vector<PreferenceProfile> permutation_class(
    const PreferenceProfile& profile) {
  const Market& market = profile.market();
  AgentPermutation sigma = AgentPermutation::identity(market);
  std::vector<PreferenceProfile> out;
  std::vector<int>& mm = sigma.man_map;
  std::vector<int>& wm = sigma.woman_map;
  std::sort(mm.begin(), mm.end());
  do {
    std::sort(wm.begin(), wm.end());
    do {
      out.push_back(permute_profile(profile, sigma));
    } while (std::next_permutation(wm.begin(), wm.end()));
  } while (std::next_permutation(mm.begin(), mm.end()));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace matchaudit
