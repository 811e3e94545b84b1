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

// matchaudit command-line front door.
//
//   matchaudit audit      --mechanism m.json --prior p.json --notion ex-post
//   matchaudit find-block --mechanism m.json --prior p.json --notion ex-ante
//                         --coalition m1,w1
//   matchaudit reproduce  exante-pair --p 1/8
//   matchaudit rankdist   --mechanism m.json --prior p.json --agent m1
//   matchaudit stable-set --profile profile.json
//
// Exit codes: 0 = stable / all claims pass; 1 = block found / a claim failed;
// 2 = usage or input error; 3 = a resource budget was exhausted and the
// verdict is inconclusive. Output is byte-deterministic for fixed inputs.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "matchaudit.hpp"
#include "matchaudit/json_io.hpp"

namespace {

using namespace matchaudit;

constexpr int kExitStable = 0;
constexpr int kExitBlocked = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

// ---------------------------------------------------------------------------
// Text rendering

std::string ranking_text(const Ranking& r) {
  std::string out;
  for (const AgentId& o : r.order()) {
    if (!out.empty()) out += " > ";
    out += o == r.owner() ? "self" : agent_key(o);
  }
  return out;
}

std::string matching_text(const Matching& mu) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < mu.market().num_men; ++i) {
    const AgentId m = man(i);
    if (!first) out += ", ";
    first = false;
    out += agent_key(m);
    out += mu.is_matched(m) ? ":" + agent_key(mu.partner_of(m)) : ":single";
  }
  for (int j = 0; j < mu.market().num_women; ++j) {
    if (!mu.is_matched(woman(j))) out += ", " + agent_key(woman(j)) + ":single";
  }
  return out + "}";
}

std::string mass_text(const std::vector<Rational>& mass) {
  std::string out = "(";
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (i) out += ", ";
    out += mass[i].str();
  }
  return out + ")";
}

std::string thresholds_text(const std::vector<int>& ts) {
  std::string out = "{";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(ts[i]);
  }
  return out + "}";
}

void print_stats(std::ostream& os, const AuditStats& s) {
  os << "stats: coalitions=" << s.coalitions_checked
     << " families=" << s.families_examined << " lps=" << s.lps_solved
     << " pivots=" << s.lp_pivots << " expansions=" << s.expansions
     << (s.budget_exhausted ? " (budget exhausted)" : "") << "\n";
}

void print_block_witness(std::ostream& os, const BlockWitness& w) {
  os << "blocking coalition: " << w.coalition.describe() << " ("
     << notion_name(w.notion) << ")\n";
  if (w.profile) {
    os << "at profile:\n";
    for (const AgentId& a : w.profile->market().agents()) {
      os << "  " << agent_key(a) << ": " << ranking_text(w.profile->ranking(a))
         << "\n";
    }
  }
  os << "deviation: " << w.deviation.entries().size()
     << " profile entr" << (w.deviation.entries().size() == 1 ? "y" : "ies")
     << ", fallback " << fallback_name(w.deviation.fallback()) << "\n";
  for (const AgentComparison& ac : w.agents) {
    os << "  " << agent_key(ac.agent) << ": before " << mass_text(ac.before.mass)
       << "  after " << mass_text(ac.after.mass) << "  "
       << relation_name(ac.verdict.relation) << " at "
       << thresholds_text(ac.verdict.strict_thresholds) << "\n";
  }
}

void print_interim_witness(std::ostream& os, const InterimWitness& w) {
  os << "blocking coalition: " << w.coalition.describe() << " (interim)\n";
  os << "consenting type sets:\n";
  for (const auto& [agent, types] : w.type_sets) {
    os << "  " << agent_key(agent) << ": " << types.size() << " type"
       << (types.size() == 1 ? "" : "s") << "\n";
  }
  os << "deviation: " << w.deviation.entries().size()
     << " profile entr" << (w.deviation.entries().size() == 1 ? "y" : "ies")
     << ", fallback " << fallback_name(w.deviation.fallback()) << "\n";
  os << "per-type comparisons:\n";
  for (const TypeComparison& tc : w.per_type) {
    os << "  " << agent_key(tc.agent) << " [" << ranking_text(tc.type)
       << "] mass " << tc.event_mass.str() << ": before "
       << mass_text(tc.before.mass) << "  after " << mass_text(tc.after.mass)
       << "  " << relation_name(tc.verdict.relation) << " at "
       << thresholds_text(tc.verdict.strict_thresholds) << "\n";
  }
}

void print_case_report(std::ostream& os, const CaseReport& rep) {
  os << "case: " << rep.name << " -- " << (rep.pass ? "PASS" : "FAIL") << "\n";
  os << rep.headline << "\n";
  for (const CaseClaim& c : rep.claims) {
    os << "  [" << (c.as_expected() ? "ok" : "FAIL") << "] " << c.label;
    if (!c.expected_to_hold) os << " (recorded erratum)";
    os << "\n        expected: " << c.expected << "\n        actual:   "
       << c.actual << "\n";
  }
}

// ---------------------------------------------------------------------------
// Shared plumbing

struct OutputOptions {
  std::string format = "text";
  bool json_flag = false;

  bool json() const { return json_flag || format == "json"; }
};

void add_output_flags(CLI::App* cmd, OutputOptions* out) {
  cmd->add_option("--format", out->format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  cmd->add_flag("--json", out->json_flag, "Shorthand for --format json");
}

void emit_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

Rational parse_cli_rational(const std::string& text, const std::string& flag) {
  try {
    return Rational::parse(text);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(flag, e.what());
  }
}

// Re-parse the witness JSON we are about to print and re-verify it from
// scratch through the independent checker, so emitted certificates are
// guaranteed machine-checkable.
CheckResult reverify_block_witness(const Mechanism& mechanism,
                                   const Prior& prior, const BlockWitness& w) {
  const Json j = block_witness_to_json(w);
  const BlockWitness back = block_witness_from_json(j, mechanism.market());
  if (back.notion == BlockNotion::ExPost) {
    if (!back.profile) {
      CheckResult res;
      res.failures.push_back("ex-post witness lost its profile");
      return res;
    }
    return check_ex_post_witness(mechanism, *back.profile, back);
  }
  return check_ex_ante_witness(mechanism, prior, back);
}

CheckResult reverify_interim_witness(const Mechanism& mechanism,
                                     const Prior& prior,
                                     const InterimWitness& w) {
  const Json j = interim_witness_to_json(w);
  return check_interim_witness(mechanism, prior,
                               interim_witness_from_json(j, mechanism.market()));
}

int finish_stability(const Mechanism& mechanism, const Prior& prior,
                     const StabilityReport& report, const OutputOptions& out) {
  CheckResult verification = CheckResult::success();
  if (report.witness) {
    verification = reverify_block_witness(mechanism, prior, *report.witness);
  } else if (report.interim_witness) {
    verification =
        reverify_interim_witness(mechanism, prior, *report.interim_witness);
  }
  if (out.json()) {
    Json j = stability_report_to_json(report);
    j["verification"] = check_result_to_json(verification);
    emit_json(j);
  } else {
    std::cout << "notion: " << report.notion << "\n";
    if (!report.stable) {
      std::cout << "verdict: unstable\n";
    } else {
      std::cout << "verdict: "
                << (report.exhaustive ? "stable (exhaustive)"
                                      : "no block found (budget exhausted; "
                                        "inconclusive)")
                << "\n";
    }
    if (report.witness) print_block_witness(std::cout, *report.witness);
    if (report.interim_witness) {
      print_interim_witness(std::cout, *report.interim_witness);
    }
    if (!verification.ok) {
      for (const std::string& f : verification.failures) {
        std::cout << "verification failure: " << f << "\n";
      }
    }
    print_stats(std::cout, report.stats);
  }
  if (!verification.ok) {
    std::cerr << "internal error: emitted witness failed independent "
                 "re-verification\n";
    return kExitUsage;
  }
  if (!report.stable) return kExitBlocked;
  return report.exhaustive ? kExitStable : kExitBudget;
}

// ---------------------------------------------------------------------------
// audit

struct AuditArgs {
  std::string mechanism_file;
  std::string prior_file;
  std::string notion;
  std::string scope = "pairwise";
  int max_coalition = 0;
  std::size_t max_candidate_sets = 1024;
  int expansion_rounds = 8;
  std::size_t max_lp_cells = kDefaultLpCellCap;
  OutputOptions out;
};

void add_audit_flags(CLI::App* cmd, AuditArgs* a, bool with_scope) {
  cmd->add_option("--mechanism", a->mechanism_file,
                  "Mechanism descriptor JSON file")
      ->required();
  cmd->add_option("--prior", a->prior_file, "Prior JSON file")->required();
  cmd->add_option("--notion", a->notion, "Stability notion")
      ->check(CLI::IsMember({"ex-post", "interim", "ex-ante"}))
      ->required();
  if (with_scope) {
    cmd->add_option("--scope", a->scope,
                    "pairwise (pairs and singletons) or coalitions (all sizes)")
        ->check(CLI::IsMember({"pairwise", "coalitions"}))
        ->capture_default_str();
    cmd->add_option("--max-coalition", a->max_coalition,
                    "Largest coalition size for --scope coalitions (0 = all)")
        ->capture_default_str();
  }
  cmd->add_option("--max-candidate-sets", a->max_candidate_sets,
                  "Interim: candidate type-set families per coalition")
      ->capture_default_str();
  cmd->add_option("--expansion-rounds", a->expansion_rounds,
                  "Interim: only-if repair rounds per family")
      ->capture_default_str();
  cmd->add_option("--max-lp-cells", a->max_lp_cells,
                  "Largest LP size (rows x columns) a single solve may use")
      ->capture_default_str();
  add_output_flags(cmd, &a->out);
}

StabilityReport audit_ex_post(const Mechanism& mechanism, const Prior& prior,
                              const AuditArgs& a) {
  StabilityReport combined;
  combined.notion = "ex-post";
  for (const WeightedProfile& wp : prior.support()) {
    if (a.scope == "pairwise") {
      for (const Coalition& c : pairwise_coalitions(mechanism.market())) {
        ++combined.stats.coalitions_checked;
        auto w = ex_post_block(mechanism, wp.profile, c, &combined.stats,
                               a.max_lp_cells);
        if (w) {
          combined.stable = false;
          combined.witness = std::move(w);
          return combined;
        }
      }
    } else {
      StabilityReport r = ex_post_stable_at(mechanism, wp.profile,
                                            a.max_coalition, a.max_lp_cells);
      combined.stats.absorb(r.stats);
      if (!r.stable) {
        combined.stable = false;
        combined.witness = std::move(r.witness);
        return combined;
      }
    }
  }
  combined.exhaustive = !combined.stats.budget_exhausted;
  return combined;
}

int run_audit(const AuditArgs& a) {
  const Prior prior = prior_from_json(load_json_file(a.prior_file));
  const Market& market = prior.market();
  const Mechanism mechanism =
      mechanism_from_json(load_json_file(a.mechanism_file), &market);
  if (mechanism.market() != market) {
    throw std::invalid_argument(
        "audit: mechanism and prior use different markets");
  }

  StabilityReport report;
  if (a.notion == "ex-post") {
    report = audit_ex_post(mechanism, prior, a);
  } else if (a.notion == "ex-ante") {
    ExAnteOptions options;
    options.max_lp_cells = a.max_lp_cells;
    report = a.scope == "pairwise"
                 ? ex_ante_pairwise_stable(mechanism, prior, options)
                 : ex_ante_stable(mechanism, prior, a.max_coalition, options);
  } else {
    InterimOptions options;
    options.max_candidate_sets = a.max_candidate_sets;
    options.expansion_rounds = a.expansion_rounds;
    options.max_lp_cells = a.max_lp_cells;
    report = a.scope == "pairwise"
                 ? interim_pairwise_stable(mechanism, prior, options)
                 : interim_stable(mechanism, prior, a.max_coalition, options);
  }
  return finish_stability(mechanism, prior, report, a.out);
}

// ---------------------------------------------------------------------------
// find-block

int run_find_block(const AuditArgs& a, const std::string& coalition_arg) {
  const Prior prior = prior_from_json(load_json_file(a.prior_file));
  const Market& market = prior.market();
  const Mechanism mechanism =
      mechanism_from_json(load_json_file(a.mechanism_file), &market);
  if (mechanism.market() != market) {
    throw std::invalid_argument(
        "find-block: mechanism and prior use different markets");
  }

  std::vector<AgentId> members;
  std::stringstream ss(coalition_arg);
  std::string key;
  while (std::getline(ss, key, ',')) {
    if (!key.empty()) members.push_back(parse_agent_key(key, market));
  }
  if (members.empty()) {
    throw std::invalid_argument("find-block: empty coalition");
  }
  const Coalition coalition = Coalition::of(std::move(members));

  StabilityReport report;
  report.notion = a.notion;
  if (a.notion == "ex-post") {
    for (const WeightedProfile& wp : prior.support()) {
      ++report.stats.coalitions_checked;
      auto w = ex_post_block(mechanism, wp.profile, coalition, &report.stats,
                             a.max_lp_cells);
      if (w) {
        report.stable = false;
        report.witness = std::move(w);
        break;
      }
    }
  } else if (a.notion == "ex-ante") {
    ExAnteOptions options;
    options.max_lp_cells = a.max_lp_cells;
    ++report.stats.coalitions_checked;
    auto w = ex_ante_block(mechanism, prior, coalition, options, &report.stats);
    if (w) {
      report.stable = false;
      report.witness = std::move(w);
    }
  } else {
    InterimOptions options;
    options.max_candidate_sets = a.max_candidate_sets;
    options.expansion_rounds = a.expansion_rounds;
    options.max_lp_cells = a.max_lp_cells;
    ++report.stats.coalitions_checked;
    InterimBlockResult r = interim_block(mechanism, prior, coalition, options);
    report.stats.absorb(r.stats);
    if (r.witness) {
      report.stable = false;
      report.interim_witness = std::move(r.witness);
    } else {
      report.exhaustive = r.exhaustive;
    }
  }
  if (report.stable) report.exhaustive = !report.stats.budget_exhausted;
  return finish_stability(mechanism, prior, report, a.out);
}

// ---------------------------------------------------------------------------
// reproduce

struct ReproduceArgs {
  std::string case_arg;
  std::string p;
  std::string utilities;
  std::string delta;
  std::string epsilon;
  OutputOptions out;
};

CaseId build_case_id(const ReproduceArgs& r, CaseKind kind) {
  auto reject = [&](const char* flag, const std::string& value) {
    if (!value.empty()) {
      throw CLI::ValidationError(
          flag, std::string("not a parameter of case '") + case_name(kind) +
                    "'");
    }
  };
  switch (kind) {
    case CaseKind::UniqueStable:
    case CaseKind::InterimGrand:
      reject("--p", r.p);
      reject("--utilities", r.utilities);
      reject("--delta", r.delta);
      reject("--epsilon", r.epsilon);
      return kind == CaseKind::UniqueStable ? CaseId::unique_stable()
                                            : CaseId::interim_grand();
    case CaseKind::ExAntePair: {
      reject("--utilities", r.utilities);
      reject("--delta", r.delta);
      reject("--epsilon", r.epsilon);
      Rational p = r.p.empty() ? Rational(1, 8)
                               : parse_cli_rational(r.p, "--p");
      return CaseId::exante_pair(std::move(p));
    }
    case CaseKind::InsuranceEu: {
      reject("--delta", r.delta);
      reject("--epsilon", r.epsilon);
      Rational p = r.p.empty() ? Rational(1, 2)
                               : parse_cli_rational(r.p, "--p");
      std::vector<Rational> utilities;
      if (r.utilities.empty()) {
        utilities = {Rational(1), Rational(3, 4), Rational(0)};
      } else {
        std::stringstream ss(r.utilities);
        std::string item;
        while (std::getline(ss, item, ',')) {
          utilities.push_back(parse_cli_rational(item, "--utilities"));
        }
      }
      return CaseId::insurance_eu(std::move(p), std::move(utilities));
    }
    case CaseKind::CorrelatedSchools: {
      reject("--p", r.p);
      reject("--utilities", r.utilities);
      Rational delta = r.delta.empty() ? Rational(1, 5)
                                       : parse_cli_rational(r.delta, "--delta");
      Rational epsilon = r.epsilon.empty()
                             ? Rational(3, 20)
                             : parse_cli_rational(r.epsilon, "--epsilon");
      return CaseId::correlated_schools(std::move(delta), std::move(epsilon));
    }
  }
  throw std::logic_error("build_case_id: bad enum");
}

int run_reproduce(const ReproduceArgs& r) {
  std::vector<CaseReport> reports;
  if (r.case_arg == "all") {
    for (const std::string& name : case_names()) {
      reports.push_back(run_case(build_case_id(r, *parse_case_name(name))));
    }
  } else {
    auto kind = parse_case_name(r.case_arg);
    if (!kind) {
      std::string names;
      for (const std::string& n : case_names()) names += " " + n;
      throw CLI::ValidationError(
          "case", "unknown case '" + r.case_arg + "'; available:" + names +
                      " all");
    }
    reports.push_back(run_case(build_case_id(r, *kind)));
  }

  bool all_pass = true;
  for (const CaseReport& rep : reports) all_pass = all_pass && rep.pass;

  if (r.out.json()) {
    if (reports.size() == 1) {
      emit_json(case_report_to_json(reports[0]));
    } else {
      Json arr = Json::array();
      for (const CaseReport& rep : reports) {
        arr.push_back(case_report_to_json(rep));
      }
      emit_json(arr);
    }
  } else {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (i) std::cout << "\n";
      print_case_report(std::cout, reports[i]);
    }
  }
  return all_pass ? kExitStable : kExitBlocked;
}

// ---------------------------------------------------------------------------
// rankdist

int run_rankdist(const std::string& mechanism_file,
                 const std::string& prior_file, const std::string& agent_arg,
                 const OutputOptions& out) {
  const Prior prior = prior_from_json(load_json_file(prior_file));
  const Market& market = prior.market();
  const Mechanism mechanism =
      mechanism_from_json(load_json_file(mechanism_file), &market);
  if (mechanism.market() != market) {
    throw std::invalid_argument(
        "rankdist: mechanism and prior use different markets");
  }
  const AgentId agent = parse_agent_key(agent_arg, market);
  const RankDistribution dist = rank_distribution(mechanism, prior, agent);
  if (out.json()) {
    Json j = rank_distribution_to_json(dist);
    Json cdf = Json::array();
    for (int n = 1; n <= dist.size(); ++n) {
      cdf.push_back(rational_to_json(dist.cdf(n)));
    }
    j["cdf"] = std::move(cdf);
    j["mechanism"] = mechanism.name();
    emit_json(j);
  } else {
    std::cout << "agent: " << agent_key(agent) << "\n";
    std::cout << "mechanism: " << mechanism.name() << "\n";
    std::cout << "rank distribution: " << mass_text(dist.mass) << "\n";
    std::cout << "(rank 1 is the agent's first choice; the last slot is the "
                 "rank of staying single)\n";
  }
  return kExitStable;
}

// ---------------------------------------------------------------------------
// stable-set

int run_stable_set(const std::string& profile_file, const OutputOptions& out) {
  const PreferenceProfile profile =
      profile_from_json(load_json_file(profile_file));
  const std::vector<Matching> sset = stable_set(profile);
  if (out.json()) {
    Json arr = Json::array();
    for (const Matching& mu : sset) arr.push_back(matching_to_json(mu));
    emit_json(Json{{"profile", profile_to_json(profile)},
                   {"stable_set", std::move(arr)}});
  } else {
    std::cout << "stable matchings: " << sset.size() << "\n";
    for (const Matching& mu : sset) {
      std::cout << "  " << matching_text(mu) << "\n";
    }
  }
  return kExitStable;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "matchaudit: exact stability auditor for randomized two-sided matching "
      "mechanisms"};
  app.require_subcommand(1);

  AuditArgs audit_args;
  CLI::App* audit_cmd = app.add_subcommand(
      "audit", "Audit a mechanism's stability under a prior");
  add_audit_flags(audit_cmd, &audit_args, /*with_scope=*/true);

  AuditArgs fb_args;
  std::string fb_coalition;
  CLI::App* fb_cmd = app.add_subcommand(
      "find-block", "Search one explicit coalition for a blocking deviation");
  add_audit_flags(fb_cmd, &fb_args, /*with_scope=*/false);
  fb_cmd->add_option("--coalition", fb_coalition,
                     "Comma-separated member keys, e.g. m1,w1")
      ->required();

  ReproduceArgs rep_args;
  CLI::App* rep_cmd = app.add_subcommand(
      "reproduce", "Run a bundled audit case and check its cataloged claims");
  rep_cmd->add_option("case", rep_args.case_arg,
                      "unique-stable | interim-grand | exante-pair | "
                      "insurance-eu | correlated-schools | all")
      ->required();
  rep_cmd->add_option("--p", rep_args.p, "Type-twist probability (rational)");
  rep_cmd->add_option("--utilities", rep_args.utilities,
                      "insurance-eu rank utilities u1,u2,u3 (rationals)");
  rep_cmd->add_option("--delta", rep_args.delta,
                      "correlated-schools student-twist weight (rational)");
  rep_cmd->add_option("--epsilon", rep_args.epsilon,
                      "correlated-schools test-twist weight (rational)");
  add_output_flags(rep_cmd, &rep_args.out);

  std::string rd_mechanism, rd_prior, rd_agent;
  OutputOptions rd_out;
  CLI::App* rd_cmd = app.add_subcommand(
      "rankdist", "Print an agent's exact rank distribution under a prior");
  rd_cmd->add_option("--mechanism", rd_mechanism, "Mechanism descriptor JSON")
      ->required();
  rd_cmd->add_option("--prior", rd_prior, "Prior JSON file")->required();
  rd_cmd->add_option("--agent", rd_agent, "Agent key, e.g. m1")->required();
  add_output_flags(rd_cmd, &rd_out);

  std::string ss_profile;
  OutputOptions ss_out;
  CLI::App* ss_cmd = app.add_subcommand(
      "stable-set", "Enumerate all stable matchings of a profile");
  ss_cmd->add_option("--profile", ss_profile, "Profile JSON file")->required();
  add_output_flags(ss_cmd, &ss_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*audit_cmd) return run_audit(audit_args);
    if (*fb_cmd) return run_find_block(fb_args, fb_coalition);
    if (*rep_cmd) return run_reproduce(rep_args);
    if (*rd_cmd) return run_rankdist(rd_mechanism, rd_prior, rd_agent, rd_out);
    if (*ss_cmd) return run_stable_set(ss_profile, ss_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const JsonParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
