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

#pragma once

// JSON serialization for every value the command-line tools read or emit:
// markets, rankings, profiles, matchings, lotteries, priors (explicit support
// or product form), mechanism descriptors, witnesses, reports. All rationals
// travel as exact "num/den" strings; no floating point anywhere. Parsers
// validate aggressively and throw std::invalid_argument with the offending
// context; file loading reports line/column on malformed JSON.
//
// Requires the vendored single-header nlohmann/json (json.hpp on the include
// path). Uses ordered_json throughout so output is byte-deterministic.

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "matchaudit/cases.hpp"
#include "matchaudit/stability.hpp"
#include "matchaudit/stability_search.hpp"

namespace matchaudit {

using Json = nlohmann::ordered_json;

// Thrown on malformed JSON text; the message carries file:line:column.
class JsonParseError : public std::runtime_error {
 public:
  explicit JsonParseError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Primitives

inline Json rational_to_json(const Rational& r) { return Json(r.str()); }

inline Rational rational_from_json(const Json& j, const std::string& where) {
  if (!j.is_string()) {
    throw std::invalid_argument(where +
                                ": rationals must be \"num/den\" strings");
  }
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(where + ": " + e.what());
  }
}

inline Json rational_list_to_json(const std::vector<Rational>& xs) {
  Json out = Json::array();
  for (const Rational& x : xs) out.push_back(rational_to_json(x));
  return out;
}

inline std::vector<Rational> rational_list_from_json(const Json& j,
                                                     const std::string& where) {
  if (!j.is_array()) {
    throw std::invalid_argument(where + ": expected an array of rationals");
  }
  std::vector<Rational> out;
  out.reserve(j.size());
  for (const Json& x : j) out.push_back(rational_from_json(x, where));
  return out;
}

inline Json market_to_json(const Market& market) {
  return Json{{"men", market.num_men}, {"women", market.num_women}};
}

inline Market market_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("men") || !j.contains("women") ||
      !j.at("men").is_number_integer() || !j.at("women").is_number_integer()) {
    throw std::invalid_argument(
        "market: expected {\"men\": <int>, \"women\": <int>}");
  }
  return Market(j.at("men").get<int>(), j.at("women").get<int>());
}

// ---------------------------------------------------------------------------
// Rankings and profiles. A ranking is an ordered best-to-worst array of agent
// keys with "self" marking the stay-single option, e.g. ["w1","self","w2"].

inline Json ranking_to_json(const Ranking& r) {
  Json out = Json::array();
  for (const AgentId& o : r.order()) {
    out.push_back(o == r.owner() ? std::string("self") : agent_key(o));
  }
  return out;
}

inline Ranking ranking_from_json(const Json& j, const AgentId& owner,
                                 const Market& market) {
  const std::string where = "ranking of " + agent_key(owner);
  if (!j.is_array()) {
    throw std::invalid_argument(where + ": expected an array of agent keys");
  }
  std::vector<AgentId> order;
  order.reserve(j.size());
  for (const Json& entry : j) {
    if (!entry.is_string()) {
      throw std::invalid_argument(where + ": entries must be strings");
    }
    const std::string key = entry.get<std::string>();
    if (key == "self") {
      order.push_back(owner);
    } else {
      try {
        order.push_back(parse_agent_key(key, market));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where + ": " + e.what());
      }
    }
  }
  try {
    return Ranking::from_order(owner, market, order);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(where + ": " + e.what());
  }
}

inline Json profile_to_json(const PreferenceProfile& profile,
                            bool with_market = true) {
  Json prefs = Json::object();
  for (const AgentId& a : profile.market().agents()) {
    prefs[agent_key(a)] = ranking_to_json(profile.ranking(a));
  }
  Json out = Json::object();
  if (with_market) out["market"] = market_to_json(profile.market());
  out["preferences"] = std::move(prefs);
  return out;
}

// Accepts {"market": ..., "preferences": {...}}; the market may be omitted
// when `fallback_market` supplies it (e.g. profiles nested in a prior file).
inline PreferenceProfile profile_from_json(
    const Json& j, const Market* fallback_market = nullptr) {
  if (!j.is_object() || !j.contains("preferences")) {
    throw std::invalid_argument(
        "profile: expected {\"market\"?: ..., \"preferences\": {...}}");
  }
  Market market(1, 1);
  if (j.contains("market")) {
    market = market_from_json(j.at("market"));
  } else if (fallback_market) {
    market = *fallback_market;
  } else {
    throw std::invalid_argument("profile: missing \"market\"");
  }
  const Json& prefs = j.at("preferences");
  if (!prefs.is_object()) {
    throw std::invalid_argument("profile: \"preferences\" must be an object");
  }
  if (prefs.size() != static_cast<std::size_t>(market.total())) {
    throw std::invalid_argument(
        "profile: expected exactly one ranking per agent (" +
        std::to_string(market.total()) + "), got " +
        std::to_string(prefs.size()));
  }
  std::vector<Ranking> by_slot;
  by_slot.reserve(static_cast<std::size_t>(market.total()));
  for (const AgentId& a : market.agents()) {
    const std::string key = agent_key(a);
    if (!prefs.contains(key)) {
      throw std::invalid_argument("profile: missing ranking for " + key);
    }
    by_slot.push_back(ranking_from_json(prefs.at(key), a, market));
  }
  return PreferenceProfile(market, std::move(by_slot));
}

// ---------------------------------------------------------------------------
// Matchings and lotteries

inline Json matching_to_json(const Matching& mu) {
  Json pairs = Json::array();
  Json single = Json::array();
  const Market& market = mu.market();
  for (int i = 0; i < market.num_men; ++i) {
    const AgentId m = man(i);
    if (mu.is_matched(m)) {
      pairs.push_back(Json::array({agent_key(m), agent_key(mu.partner_of(m))}));
    }
  }
  for (const AgentId& a : market.agents()) {
    if (!mu.is_matched(a)) single.push_back(agent_key(a));
  }
  return Json{{"pairs", std::move(pairs)}, {"single", std::move(single)}};
}

inline Matching matching_from_json(const Json& j, const Market& market) {
  if (!j.is_object() || !j.contains("pairs") || !j.at("pairs").is_array()) {
    throw std::invalid_argument(
        "matching: expected {\"pairs\": [[\"m1\",\"w2\"],...], \"single\": "
        "[...]}");
  }
  std::vector<std::pair<AgentId, AgentId>> pairs;
  std::vector<bool> seen(static_cast<std::size_t>(market.total()), false);
  auto mark = [&](const AgentId& a) {
    std::size_t s = static_cast<std::size_t>(market.slot(a));
    if (seen[s]) {
      throw std::invalid_argument("matching: agent " + agent_key(a) +
                                  " listed twice");
    }
    seen[s] = true;
  };
  for (const Json& pj : j.at("pairs")) {
    if (!pj.is_array() || pj.size() != 2 || !pj.at(0).is_string() ||
        !pj.at(1).is_string()) {
      throw std::invalid_argument(
          "matching: each pair must be a two-element array of agent keys");
    }
    AgentId a = parse_agent_key(pj.at(0).get<std::string>(), market);
    AgentId b = parse_agent_key(pj.at(1).get<std::string>(), market);
    mark(a);
    mark(b);
    pairs.push_back({a, b});
  }
  if (j.contains("single")) {
    if (!j.at("single").is_array()) {
      throw std::invalid_argument("matching: \"single\" must be an array");
    }
    for (const Json& sj : j.at("single")) {
      if (!sj.is_string()) {
        throw std::invalid_argument("matching: \"single\" entries must be keys");
      }
      mark(parse_agent_key(sj.get<std::string>(), market));
    }
    for (const AgentId& a : market.agents()) {
      if (!seen[static_cast<std::size_t>(market.slot(a))]) {
        throw std::invalid_argument("matching: agent " + agent_key(a) +
                                    " appears in neither \"pairs\" nor "
                                    "\"single\"");
      }
    }
  }
  return Matching::from_pairs(market, pairs);
}

inline Json lottery_to_json(const RandomMatching& lottery) {
  Json outcomes = Json::array();
  for (const auto& [mu, w] : lottery.outcomes()) {
    outcomes.push_back(Json{{"matching", matching_to_json(mu)},
                            {"weight", rational_to_json(w)}});
  }
  return Json{{"outcomes", std::move(outcomes)}};
}

inline RandomMatching lottery_from_json(const Json& j, const Market& market) {
  if (!j.is_object() || !j.contains("outcomes") ||
      !j.at("outcomes").is_array()) {
    throw std::invalid_argument(
        "lottery: expected {\"outcomes\": [{\"matching\":...,\"weight\":...}]}");
  }
  std::vector<std::pair<Matching, Rational>> outcomes;
  for (const Json& oj : j.at("outcomes")) {
    if (!oj.is_object() || !oj.contains("matching") || !oj.contains("weight")) {
      throw std::invalid_argument(
          "lottery: each outcome needs \"matching\" and \"weight\"");
    }
    outcomes.push_back({matching_from_json(oj.at("matching"), market),
                        rational_from_json(oj.at("weight"), "lottery weight")});
  }
  try {
    return RandomMatching(std::move(outcomes));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("lottery: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Priors: explicit support or product form.

inline Json prior_to_json(const Prior& prior) {
  Json support = Json::array();
  for (const WeightedProfile& wp : prior.support()) {
    support.push_back(
        Json{{"profile", profile_to_json(wp.profile, /*with_market=*/false)},
             {"weight", rational_to_json(wp.weight)}});
  }
  return Json{{"market", market_to_json(prior.market())},
              {"support", std::move(support)}};
}

inline Prior prior_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("market")) {
    throw std::invalid_argument(
        "prior: expected {\"market\": ..., \"support\": [...]} or "
        "{\"market\": ..., \"product\": {...}}");
  }
  const Market market = market_from_json(j.at("market"));
  const bool has_support = j.contains("support");
  const bool has_product = j.contains("product");
  if (has_support == has_product) {
    throw std::invalid_argument(
        "prior: need exactly one of \"support\" and \"product\"");
  }
  if (has_support) {
    if (!j.at("support").is_array()) {
      throw std::invalid_argument("prior: \"support\" must be an array");
    }
    std::vector<WeightedProfile> support;
    for (const Json& ej : j.at("support")) {
      if (!ej.is_object() || !ej.contains("profile") || !ej.contains("weight")) {
        throw std::invalid_argument(
            "prior: each support entry needs \"profile\" and \"weight\"");
      }
      support.push_back(
          {profile_from_json(ej.at("profile"), &market),
           rational_from_json(ej.at("weight"), "prior weight")});
    }
    try {
      return Prior(market, std::move(support));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("prior: ") + e.what());
    }
  }
  const Json& pj = j.at("product");
  if (!pj.is_object()) {
    throw std::invalid_argument("prior: \"product\" must be an object");
  }
  std::vector<AgentTypeDistribution> agents;
  for (const AgentId& a : market.agents()) {
    const std::string key = agent_key(a);
    if (!pj.contains(key)) {
      throw std::invalid_argument("prior: product form missing agent " + key);
    }
    const Json& tj = pj.at(key);
    if (!tj.is_array()) {
      throw std::invalid_argument("prior: product entry for " + key +
                                  " must be an array of types");
    }
    AgentTypeDistribution dist;
    dist.agent = a;
    for (const Json& t : tj) {
      if (!t.is_object() || !t.contains("ranking") || !t.contains("weight")) {
        throw std::invalid_argument("prior: each type for " + key +
                                    " needs \"ranking\" and \"weight\"");
      }
      dist.types.push_back(
          {ranking_from_json(t.at("ranking"), a, market),
           rational_from_json(t.at("weight"), "type weight of " + key)});
    }
    agents.push_back(std::move(dist));
  }
  if (pj.size() != static_cast<std::size_t>(market.total())) {
    throw std::invalid_argument(
        "prior: product form must list every agent exactly once");
  }
  try {
    return product_prior(market, agents);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("prior: ") + e.what());
  }
}

// Serializes a product-form prior file from per-agent type distributions
// (the inverse of the product branch above).
inline Json product_prior_to_json(
    const Market& market, const std::vector<AgentTypeDistribution>& agents) {
  Json product = Json::object();
  for (const AgentId& a : market.agents()) {
    for (const AgentTypeDistribution& d : agents) {
      if (!(d.agent == a)) continue;
      Json types = Json::array();
      for (const auto& [r, w] : d.types) {
        types.push_back(Json{{"ranking", ranking_to_json(r)},
                             {"weight", rational_to_json(w)}});
      }
      product[agent_key(a)] = std::move(types);
    }
  }
  return Json{{"market", market_to_json(market)},
              {"product", std::move(product)}};
}

// ---------------------------------------------------------------------------
// Mechanism descriptors

inline Json mechanism_to_json(const MechanismDescriptor& desc,
                              const Market& market);

inline Json mechanism_to_json(const Mechanism& mechanism) {
  return mechanism_to_json(mechanism.descriptor(), mechanism.market());
}

inline Json mechanism_to_json(const MechanismDescriptor& desc,
                              const Market& market) {
  Json out = Json::object();
  out["kind"] = kind_name(desc.kind);
  out["market"] = market_to_json(market);
  switch (desc.kind) {
    case MechanismDescriptor::Kind::DaMen:
    case MechanismDescriptor::Kind::DaWomen:
    case MechanismDescriptor::Kind::UniformRandom:
    case MechanismDescriptor::Kind::UniformRandomFull:
    case MechanismDescriptor::Kind::RandomStable:
      return out;
    case MechanismDescriptor::Kind::Table: {
      Json entries = Json::array();
      for (const auto& [profile, lottery] : desc.entries) {
        entries.push_back(
            Json{{"profile", profile_to_json(profile, /*with_market=*/false)},
                 {"lottery", lottery_to_json(lottery)}});
      }
      out["entries"] = std::move(entries);
      if (!desc.base) {
        throw std::invalid_argument("mechanism: table without a fallback");
      }
      out["fallback"] = mechanism_to_json(*desc.base, market);
      out["fallback"].erase("market");
      return out;
    }
    case MechanismDescriptor::Kind::PartnerSwap: {
      if (!desc.base || !desc.base_profile) {
        throw std::invalid_argument(
            "mechanism: partner-swap without base or base profile");
      }
      out["base"] = mechanism_to_json(*desc.base, market);
      out["base"].erase("market");
      out["profile"] = profile_to_json(*desc.base_profile,
                                       /*with_market=*/false);
      return out;
    }
    case MechanismDescriptor::Kind::Custom:
      throw std::invalid_argument(
          "mechanism: custom mechanism '" + desc.name +
          "' has no serializable description");
  }
  throw std::logic_error("mechanism_to_json: bad enum");
}

// Builds a mechanism from a descriptor. The market comes from the
// descriptor's own "market" field, else from `fallback_market` (e.g. the
// prior it will be audited against).
inline Mechanism mechanism_from_json(const Json& j,
                                     const Market* fallback_market = nullptr) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw std::invalid_argument("mechanism: expected {\"kind\": \"...\"}");
  }
  Market market(1, 1);
  if (j.contains("market")) {
    market = market_from_json(j.at("market"));
  } else if (fallback_market) {
    market = *fallback_market;
  } else {
    throw std::invalid_argument("mechanism: missing \"market\"");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "da-men") return da_mechanism(market, Side::Men);
  if (kind == "da-women") return da_mechanism(market, Side::Women);
  if (kind == "uniform-random") return uniform_random_mechanism(market);
  if (kind == "uniform-random-full") {
    return uniform_random_full_mechanism(market);
  }
  if (kind == "random-stable") return random_stable_mechanism(market);
  if (kind == "table") {
    if (!j.contains("entries") || !j.at("entries").is_array() ||
        !j.contains("fallback")) {
      throw std::invalid_argument(
          "mechanism: table needs \"entries\" and \"fallback\"");
    }
    std::vector<std::pair<PreferenceProfile, RandomMatching>> entries;
    for (const Json& ej : j.at("entries")) {
      if (!ej.is_object() || !ej.contains("profile") ||
          !ej.contains("lottery")) {
        throw std::invalid_argument(
            "mechanism: each table entry needs \"profile\" and \"lottery\"");
      }
      entries.push_back({profile_from_json(ej.at("profile"), &market),
                         lottery_from_json(ej.at("lottery"), market)});
    }
    Mechanism fallback = mechanism_from_json(j.at("fallback"), &market);
    try {
      return table_mechanism(market, std::move(entries), fallback);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("mechanism: ") + e.what());
    }
  }
  if (kind == "partner-swap") {
    if (!j.contains("base") || !j.contains("profile")) {
      throw std::invalid_argument(
          "mechanism: partner-swap needs \"base\" and \"profile\"");
    }
    Mechanism base = mechanism_from_json(j.at("base"), &market);
    return partner_swap_mechanism(base,
                                  profile_from_json(j.at("profile"), &market));
  }
  throw std::invalid_argument("mechanism: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Distributions, verdicts, witnesses

inline Json rank_distribution_to_json(const RankDistribution& d) {
  return Json{{"agent", agent_key(d.agent)},
              {"mass", rational_list_to_json(d.mass)}};
}

inline RankDistribution rank_distribution_from_json(const Json& j,
                                                    const Market& market) {
  if (!j.is_object() || !j.contains("agent") || !j.contains("mass")) {
    throw std::invalid_argument(
        "rank distribution: expected {\"agent\": ..., \"mass\": [...]}");
  }
  return RankDistribution{
      parse_agent_key(j.at("agent").get<std::string>(), market),
      rational_list_from_json(j.at("mass"), "rank distribution mass")};
}

inline DominanceRelation relation_from_name(const std::string& name) {
  if (name == "strictly-dominates") return DominanceRelation::StrictlyDominates;
  if (name == "equal") return DominanceRelation::Equal;
  if (name == "incomparable") return DominanceRelation::Incomparable;
  if (name == "dominated-by") return DominanceRelation::DominatedBy;
  throw std::invalid_argument("dominance verdict: unknown relation '" + name +
                              "'");
}

inline Json verdict_to_json(const DominanceVerdict& v) {
  return Json{{"relation", relation_name(v.relation)},
              {"strict_thresholds", v.strict_thresholds}};
}

inline DominanceVerdict verdict_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("relation")) {
    throw std::invalid_argument(
        "dominance verdict: expected {\"relation\": ...}");
  }
  DominanceVerdict v;
  v.relation = relation_from_name(j.at("relation").get<std::string>());
  if (j.contains("strict_thresholds")) {
    v.strict_thresholds =
        j.at("strict_thresholds").get<std::vector<int>>();
  }
  return v;
}

inline Json coalition_to_json(const Coalition& coalition) {
  Json out = Json::array();
  for (const AgentId& a : coalition.members()) out.push_back(agent_key(a));
  return out;
}

inline Coalition coalition_from_json(const Json& j, const Market& market) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument(
        "coalition: expected a non-empty array of agent keys");
  }
  std::vector<AgentId> members;
  for (const Json& k : j) {
    members.push_back(parse_agent_key(k.get<std::string>(), market));
  }
  return Coalition::of(std::move(members));
}

inline Json deviation_to_json(const DeviationPlan& plan) {
  Json entries = Json::array();
  for (const auto& [profile, lottery] : plan.entries()) {
    entries.push_back(
        Json{{"profile", profile_to_json(profile, /*with_market=*/false)},
             {"lottery", lottery_to_json(lottery)}});
  }
  return Json{{"fallback", fallback_name(plan.fallback())},
              {"entries", std::move(entries)}};
}

inline DeviationPlan deviation_from_json(const Json& j, const Market& market) {
  if (!j.is_object() || !j.contains("fallback") || !j.contains("entries")) {
    throw std::invalid_argument(
        "deviation: expected {\"fallback\": ..., \"entries\": [...]}");
  }
  const std::string fb = j.at("fallback").get<std::string>();
  DeviationFallback fallback;
  if (fb == "all-single") {
    fallback = DeviationFallback::AllSingle;
  } else if (fb == "mimic-base") {
    fallback = DeviationFallback::MimicBase;
  } else {
    throw std::invalid_argument("deviation: unknown fallback '" + fb + "'");
  }
  std::vector<std::pair<PreferenceProfile, RandomMatching>> entries;
  for (const Json& ej : j.at("entries")) {
    if (!ej.is_object() || !ej.contains("profile") || !ej.contains("lottery")) {
      throw std::invalid_argument(
          "deviation: each entry needs \"profile\" and \"lottery\"");
    }
    entries.push_back({profile_from_json(ej.at("profile"), &market),
                       lottery_from_json(ej.at("lottery"), market)});
  }
  return DeviationPlan(std::move(entries), fallback);
}

inline Json agent_comparison_to_json(const AgentComparison& ac) {
  return Json{{"agent", agent_key(ac.agent)},
              {"before", rank_distribution_to_json(ac.before)},
              {"after", rank_distribution_to_json(ac.after)},
              {"verdict", verdict_to_json(ac.verdict)}};
}

inline AgentComparison agent_comparison_from_json(const Json& j,
                                                  const Market& market) {
  if (!j.is_object() || !j.contains("agent") || !j.contains("before") ||
      !j.contains("after") || !j.contains("verdict")) {
    throw std::invalid_argument(
        "agent comparison: expected agent/before/after/verdict");
  }
  return AgentComparison{
      parse_agent_key(j.at("agent").get<std::string>(), market),
      rank_distribution_from_json(j.at("before"), market),
      rank_distribution_from_json(j.at("after"), market),
      verdict_from_json(j.at("verdict"))};
}

inline Json block_witness_to_json(const BlockWitness& w) {
  Json agents = Json::array();
  for (const AgentComparison& ac : w.agents) {
    agents.push_back(agent_comparison_to_json(ac));
  }
  Json out = Json::object();
  out["notion"] = notion_name(w.notion);
  out["coalition"] = coalition_to_json(w.coalition);
  out["profile"] =
      w.profile ? profile_to_json(*w.profile, /*with_market=*/false) : Json();
  out["deviation"] = deviation_to_json(w.deviation);
  out["agents"] = std::move(agents);
  return out;
}

inline BlockWitness block_witness_from_json(const Json& j,
                                            const Market& market) {
  if (!j.is_object() || !j.contains("notion") || !j.contains("coalition") ||
      !j.contains("deviation") || !j.contains("agents")) {
    throw std::invalid_argument(
        "witness: expected notion/coalition/deviation/agents");
  }
  BlockWitness w;
  const std::string notion = j.at("notion").get<std::string>();
  if (notion == "ex-post") {
    w.notion = BlockNotion::ExPost;
  } else if (notion == "ex-ante") {
    w.notion = BlockNotion::ExAnte;
  } else {
    throw std::invalid_argument("witness: unknown notion '" + notion + "'");
  }
  w.coalition = coalition_from_json(j.at("coalition"), market);
  if (j.contains("profile") && !j.at("profile").is_null()) {
    w.profile = profile_from_json(j.at("profile"), &market);
  }
  w.deviation = deviation_from_json(j.at("deviation"), market);
  for (const Json& aj : j.at("agents")) {
    w.agents.push_back(agent_comparison_from_json(aj, market));
  }
  return w;
}

inline Json interim_witness_to_json(const InterimWitness& w) {
  Json type_sets = Json::array();
  for (const auto& [agent, types] : w.type_sets) {
    Json list = Json::array();
    for (const Ranking& r : types) list.push_back(ranking_to_json(r));
    type_sets.push_back(
        Json{{"agent", agent_key(agent)}, {"types", std::move(list)}});
  }
  Json per_type = Json::array();
  for (const TypeComparison& tc : w.per_type) {
    per_type.push_back(Json{{"agent", agent_key(tc.agent)},
                            {"type", ranking_to_json(tc.type)},
                            {"event_mass", rational_to_json(tc.event_mass)},
                            {"before", rank_distribution_to_json(tc.before)},
                            {"after", rank_distribution_to_json(tc.after)},
                            {"verdict", verdict_to_json(tc.verdict)}});
  }
  return Json{{"coalition", coalition_to_json(w.coalition)},
              {"type_sets", std::move(type_sets)},
              {"deviation", deviation_to_json(w.deviation)},
              {"per_type", std::move(per_type)}};
}

inline InterimWitness interim_witness_from_json(const Json& j,
                                                const Market& market) {
  if (!j.is_object() || !j.contains("coalition") || !j.contains("type_sets") ||
      !j.contains("deviation") || !j.contains("per_type")) {
    throw std::invalid_argument(
        "interim witness: expected coalition/type_sets/deviation/per_type");
  }
  InterimWitness w;
  w.coalition = coalition_from_json(j.at("coalition"), market);
  for (const Json& tj : j.at("type_sets")) {
    if (!tj.is_object() || !tj.contains("agent") || !tj.contains("types")) {
      throw std::invalid_argument(
          "interim witness: each type set needs \"agent\" and \"types\"");
    }
    const AgentId agent =
        parse_agent_key(tj.at("agent").get<std::string>(), market);
    std::vector<Ranking> types;
    for (const Json& rj : tj.at("types")) {
      types.push_back(ranking_from_json(rj, agent, market));
    }
    w.type_sets.push_back({agent, std::move(types)});
  }
  w.deviation = deviation_from_json(j.at("deviation"), market);
  for (const Json& tj : j.at("per_type")) {
    if (!tj.is_object() || !tj.contains("agent") || !tj.contains("type") ||
        !tj.contains("event_mass") || !tj.contains("before") ||
        !tj.contains("after") || !tj.contains("verdict")) {
      throw std::invalid_argument(
          "interim witness: each per-type row needs "
          "agent/type/event_mass/before/after/verdict");
    }
    const AgentId agent =
        parse_agent_key(tj.at("agent").get<std::string>(), market);
    w.per_type.push_back(TypeComparison{
        agent, ranking_from_json(tj.at("type"), agent, market),
        rational_from_json(tj.at("event_mass"), "event mass"),
        rank_distribution_from_json(tj.at("before"), market),
        rank_distribution_from_json(tj.at("after"), market),
        verdict_from_json(tj.at("verdict"))});
  }
  return w;
}

// ---------------------------------------------------------------------------
// Reports

inline Json stats_to_json(const AuditStats& s) {
  return Json{{"coalitions_checked", s.coalitions_checked},
              {"families_examined", s.families_examined},
              {"lps_solved", s.lps_solved},
              {"lp_pivots", s.lp_pivots},
              {"expansions", s.expansions},
              {"seeds_accepted", s.seeds_accepted},
              {"budget_exhausted", s.budget_exhausted}};
}

inline Json check_result_to_json(const CheckResult& r) {
  return Json{{"ok", r.ok}, {"failures", r.failures}};
}

inline Json stability_report_to_json(const StabilityReport& r) {
  Json out = Json::object();
  out["notion"] = r.notion;
  out["stable"] = r.stable;
  out["exhaustive"] = r.exhaustive;
  out["witness"] = r.witness ? block_witness_to_json(*r.witness) : Json();
  out["interim_witness"] =
      r.interim_witness ? interim_witness_to_json(*r.interim_witness) : Json();
  out["stats"] = stats_to_json(r.stats);
  return out;
}

inline Json case_report_to_json(const CaseReport& r) {
  Json claims = Json::array();
  for (const CaseClaim& c : r.claims) {
    claims.push_back(Json{{"label", c.label},
                          {"expected", c.expected},
                          {"actual", c.actual},
                          {"holds", c.holds},
                          {"expected_to_hold", c.expected_to_hold},
                          {"as_expected", c.as_expected()}});
  }
  return Json{{"name", r.name},
              {"headline", r.headline},
              {"pass", r.pass},
              {"claims", std::move(claims)}};
}

inline Json eu_block_report_to_json(const EuBlockReport& r) {
  return Json{{"p", rational_to_json(r.p)},
              {"utilities", rational_list_to_json(r.utilities)},
              {"stable_ranks", rank_distribution_to_json(r.stable_ranks)},
              {"eu_mechanism", rational_to_json(r.eu_mechanism)},
              {"eu_pair", rational_to_json(r.eu_pair)},
              {"pair_preferred", r.pair_preferred},
              {"fosd", verdict_to_json(r.fosd)}};
}

inline Json correlated_schools_report_to_json(const CorrelatedSchoolsReport& r) {
  return Json{
      {"delta", rational_to_json(r.delta)},
      {"epsilon", rational_to_json(r.epsilon)},
      {"full_market",
       Json{{"school_a", rank_distribution_to_json(r.school_a_full)},
            {"school_b", rank_distribution_to_json(r.school_b_full)},
            {"student_1", rank_distribution_to_json(r.student1_full)},
            {"student_2", rank_distribution_to_json(r.student2_full)}}},
      {"sub_market",
       Json{{"school_a", rank_distribution_to_json(r.school_a_sub)},
            {"school_b", rank_distribution_to_json(r.school_b_sub)},
            {"student_1", rank_distribution_to_json(r.student1_sub)},
            {"student_2", rank_distribution_to_json(r.student2_sub)}}},
      {"closed_forms",
       Json{{"schools_full_stated", r.schools_full_form_holds},
            {"schools_full_corrected", r.schools_full_corrected_holds},
            {"schools_sub", r.schools_sub_form_holds},
            {"students_full", r.students_full_form_holds},
            {"students_sub", r.students_sub_form_holds}}},
      {"schools_prefer_sub", r.schools_prefer_sub},
      {"students_prefer_sub", r.students_prefer_sub},
      {"all_four_prefer_sub", r.all_four_prefer_sub},
      {"stated_inequality", r.stated_inequality},
      {"verdict_matches_inequality", r.verdict_matches_inequality}};
}

inline Json violation_to_json(const MutualFirstViolation& v) {
  return Json{{"profile", profile_to_json(v.profile)},
              {"man", agent_key(v.man)},
              {"woman", agent_key(v.woman)},
              {"probability", rational_to_json(v.probability)}};
}

inline Json instability_witness_to_json(const InstabilityWitness& w) {
  Json out = Json::object();
  out["kind"] = w.kind == InstabilityWitness::Kind::PairExPost
                    ? "pair-ex-post"
                    : "grand-coalition";
  out["violation"] = w.violation ? violation_to_json(*w.violation) : Json();
  out["pair_witness"] =
      w.pair_witness ? block_witness_to_json(*w.pair_witness) : Json();
  out["grand_witness"] =
      w.grand_witness ? interim_witness_to_json(*w.grand_witness) : Json();
  out["verification"] = check_result_to_json(w.verification);
  out["stats"] = stats_to_json(w.stats);
  return out;
}

// ---------------------------------------------------------------------------
// File loading with line/column diagnostics

inline Json parse_json_text(const std::string& text,
                            const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports a 1-based byte offset; convert to line:column.
    std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    if (byte > text.size()) byte = text.size();
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << origin << ":" << line << ":" << col << ": malformed JSON: "
        << e.what();
    throw JsonParseError(msg.str());
  }
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw JsonParseError(path + ": cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

}  // namespace matchaudit
