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

#include <stdexcept>
#include <string>
#include <vector>

#include "matchaudit/market.hpp"
#include "matchaudit/rational.hpp"

namespace matchaudit {

// The distribution of the rank an agent assigns to its realized outcome:
// mass[r-1] = Pr(outcome has rank r), r = 1..|S|, summing to exactly 1.
// Lower ranks are better.
struct RankDistribution {
  AgentId agent;
  std::vector<Rational> mass;

  int size() const { return static_cast<int>(mass.size()); }
  // Pr(rank <= n), n in 0..size.
  Rational cdf(int n) const {
    if (n < 0 || n > size()) {
      throw std::invalid_argument("RankDistribution: cdf threshold out of range");
    }
    Rational total;
    for (int r = 1; r <= n; ++r) total += mass[r - 1];
    return total;
  }
  Rational total_mass() const { return cdf(size()); }
};

// How one rank distribution relates to another under first-order stochastic
// dominance (with respect to preferring lower ranks).
enum class DominanceRelation {
  StrictlyDominates,  // weakly better at every threshold, strictly at one
  Equal,
  Incomparable,
  DominatedBy,
};

inline std::string relation_name(DominanceRelation r) {
  switch (r) {
    case DominanceRelation::StrictlyDominates: return "strictly-dominates";
    case DominanceRelation::Equal: return "equal";
    case DominanceRelation::Incomparable: return "incomparable";
    case DominanceRelation::DominatedBy: return "dominated-by";
  }
  throw std::logic_error("relation_name: bad enum");
}

struct DominanceVerdict {
  DominanceRelation relation = DominanceRelation::Equal;
  // For StrictlyDominates / DominatedBy: every threshold n at which the
  // dominant side's Pr(rank <= n) strictly exceeds the other's. Non-empty
  // exactly in those two cases.
  std::vector<int> strict_thresholds;

  friend bool operator==(const DominanceVerdict& a, const DominanceVerdict& b) {
    return a.relation == b.relation &&
           a.strict_thresholds == b.strict_thresholds;
  }
};

// Exact first-order stochastic dominance comparison of two rank distributions
// for the same agent. lhs strictly dominates rhs when Pr_lhs(rank <= n) >=
// Pr_rhs(rank <= n) for every threshold n, with strict inequality for at
// least one n.
inline DominanceVerdict fosd_compare(const RankDistribution& lhs,
                                     const RankDistribution& rhs) {
  if (lhs.agent != rhs.agent) {
    throw std::invalid_argument("fosd_compare: distributions for different agents");
  }
  if (lhs.size() != rhs.size()) {
    throw std::invalid_argument("fosd_compare: size mismatch");
  }
  if (lhs.total_mass() != Rational(1) || rhs.total_mass() != Rational(1)) {
    throw std::invalid_argument("fosd_compare: distributions must sum to 1");
  }
  std::vector<int> lhs_strict, rhs_strict;
  Rational lhs_cdf, rhs_cdf;
  for (int n = 1; n <= lhs.size(); ++n) {
    lhs_cdf += lhs.mass[n - 1];
    rhs_cdf += rhs.mass[n - 1];
    if (lhs_cdf > rhs_cdf) lhs_strict.push_back(n);
    if (rhs_cdf > lhs_cdf) rhs_strict.push_back(n);
  }
  if (lhs_strict.empty() && rhs_strict.empty()) {
    return {DominanceRelation::Equal, {}};
  }
  if (rhs_strict.empty()) {
    return {DominanceRelation::StrictlyDominates, std::move(lhs_strict)};
  }
  if (lhs_strict.empty()) {
    return {DominanceRelation::DominatedBy, std::move(rhs_strict)};
  }
  return {DominanceRelation::Incomparable, {}};
}

}  // namespace matchaudit
