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
#include <tuple>
#include <vector>

namespace matchaudit {

// The two sides of the market. Naming follows the classical marriage-market
// convention; nothing in the code depends on it beyond labeling.
enum class Side { Men, Women };

inline Side opposite(Side s) { return s == Side::Men ? Side::Women : Side::Men; }

// An agent is identified by its side and a 0-based index within that side.
// The canonical order places all men before all women, each side by index.
struct AgentId {
  Side side = Side::Men;
  int index = 0;

  friend bool operator==(const AgentId& a, const AgentId& b) {
    return a.side == b.side && a.index == b.index;
  }
  friend bool operator!=(const AgentId& a, const AgentId& b) { return !(a == b); }
  friend bool operator<(const AgentId& a, const AgentId& b) {
    return std::tuple(static_cast<int>(a.side), a.index) <
           std::tuple(static_cast<int>(b.side), b.index);
  }
};

inline AgentId man(int index) { return AgentId{Side::Men, index}; }
inline AgentId woman(int index) { return AgentId{Side::Women, index}; }

// External 1-based labels: "m1".."mN" and "w1".."wN". Used in every
// user-facing surface (JSON, CLI, error messages).
inline std::string agent_key(const AgentId& a) {
  return (a.side == Side::Men ? "m" : "w") + std::to_string(a.index + 1);
}

// A two-sided market described purely by the head counts of the two sides.
struct Market {
  int num_men = 0;
  int num_women = 0;

  Market() = default;
  Market(int men, int women) : num_men(men), num_women(women) {
    if (men < 1 || women < 1) {
      throw std::invalid_argument("Market: each side needs at least one agent");
    }
  }

  int side_count(Side s) const { return s == Side::Men ? num_men : num_women; }
  int opposite_count(const AgentId& a) const {
    return side_count(opposite(a.side));
  }
  int total() const { return num_men + num_women; }

  bool contains(const AgentId& a) const {
    return a.index >= 0 && a.index < side_count(a.side);
  }

  // Slot order: men 0..num_men-1, then women num_men..total-1.
  int slot(const AgentId& a) const {
    if (!contains(a)) {
      throw std::invalid_argument("Market: unknown agent " + agent_key(a));
    }
    return a.side == Side::Men ? a.index : num_men + a.index;
  }
  AgentId agent_at(int slot) const {
    if (slot < 0 || slot >= total()) {
      throw std::invalid_argument("Market: slot out of range");
    }
    return slot < num_men ? man(slot) : woman(slot - num_men);
  }

  // All agents in slot order.
  std::vector<AgentId> agents() const {
    std::vector<AgentId> out;
    out.reserve(total());
    for (int i = 0; i < total(); ++i) out.push_back(agent_at(i));
    return out;
  }
  std::vector<AgentId> side_agents(Side s) const {
    std::vector<AgentId> out;
    out.reserve(side_count(s));
    for (int i = 0; i < side_count(s); ++i) out.push_back(AgentId{s, i});
    return out;
  }

  friend bool operator==(const Market& a, const Market& b) {
    return a.num_men == b.num_men && a.num_women == b.num_women;
  }
  friend bool operator!=(const Market& a, const Market& b) { return !(a == b); }
};

// Parses "m3" / "w1" style labels, validated against the market.
inline AgentId parse_agent_key(const std::string& key, const Market& market) {
  if (key.size() < 2 || (key[0] != 'm' && key[0] != 'w')) {
    throw std::invalid_argument("agent key must look like 'm1' or 'w2', got '" +
                                key + "'");
  }
  int index = 0;
  for (std::size_t i = 1; i < key.size(); ++i) {
    if (key[i] < '0' || key[i] > '9') {
      throw std::invalid_argument("agent key must look like 'm1' or 'w2', got '" +
                                  key + "'");
    }
    index = index * 10 + (key[i] - '0');
  }
  AgentId a{key[0] == 'm' ? Side::Men : Side::Women, index - 1};
  if (!market.contains(a)) {
    throw std::invalid_argument("agent '" + key + "' is outside the market");
  }
  return a;
}

}  // namespace matchaudit
