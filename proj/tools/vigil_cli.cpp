#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vigil/baselines.hpp"
#include "vigil/errors.hpp"
#include "vigil/io.hpp"
#include "vigil/ver.hpp"
#include "vigil/verify.hpp"

using namespace vigil;
using io::json;

namespace {

constexpr int kFail = 1;
constexpr int kInputError = 2;
constexpr int kEmptySet = 3;
constexpr int kBudget = 4;

struct SolveArgs {
  std::string instance;
  std::string rule = "ver";
  std::string order;
  std::string rates;
  std::string trace;
};

struct VerifyArgs {
  std::string instance;
  std::string allocation;
  std::string property;
};

struct DecomposeArgs {
  std::string instance;
  std::string allocation;
  bool stable_only = false;
  std::string restrict_file;
};

json pair_json(const Instance& inst, int agent, int other, int object) {
  json w = json::object();
  if (agent >= 0) w["agent"] = inst.agent_ids[agent];
  if (other >= 0) w["other"] = inst.agent_ids[other];
  if (object >= 0) w["object"] = inst.object_ids[object];
  return w;
}

int run_solve(const SolveArgs& args) {
  const auto file = io::load_instance(args.instance);
  const Instance& inst = file.instance;
  const std::vector<int> order = args.order.empty() ? std::vector<int>{} : io::parse_order(args.order, inst);
  Allocation p;
  std::optional<VerResult> traced;
  if (args.rule == "ver") {
    const FeasibleSet x = build(file.constraints, inst);
    traced = args.rates.empty() ? ver(inst, x, order)
                                : ver_with_rates(inst, x, io::parse_rates(json::parse(io::read_file(args.rates)), inst), order);
    p = traced->allocation;
  } else if (args.rule == "vp") {
    p = vigilant_priority(inst, build(file.constraints, inst), order);
  } else if (args.rule == "ps") {
    p = probabilistic_serial(inst);
  } else if (args.rule == "da-lex") {
    p = deferred_acceptance(inst, order);
  } else if (args.rule == "da-uniform") {
    p = deferred_acceptance_uniform(inst);
  } else if (args.rule == "rp") {
    p = random_priority(inst);
  } else {
    throw InputError("unknown rule '" + args.rule + "'");
  }
  if (!args.trace.empty()) {
    if (!traced) throw InputError("--trace is only available for --rule ver");
    std::ofstream out(args.trace);
    if (!out) throw InputError("cannot write " + args.trace);
    out << io::trace_json(*traced, inst).dump(2) << '\n';
  }
  std::cout << io::format_allocation(p, inst);
  return 0;
}

int run_verify(const VerifyArgs& args) {
  const auto file = io::load_instance(args.instance);
  const Instance& inst = file.instance;
  const Allocation p = io::load_allocation(args.allocation, inst);
  const std::string& prop = args.property;
  bool pass = true;
  json witness = json::object();

  auto dominance = [&](const DominanceCheck& d) {
    pass = d.efficient;
    witness["lp_solves"] = d.lp_solves;
    if (d.dominated_by) witness["dominated_by"] = io::allocation_json(*d.dominated_by);
  };

  if (prop == "sd-eff" || prop == "dl-eff") {
    const FeasibleSet x = build(file.constraints, inst);
    if (!x.contains(p)) throw InputError("allocation is not in the feasible set");
    dominance(prop == "sd-eff" ? is_constrained_sd_efficient(p, x, inst) : is_constrained_dl_efficient(p, x, inst));
  } else if (prop == "two-sided") {
    dominance(check_two_sided_sd_efficiency(p, inst));
  } else if (prop.rfind("stability:", 0) == 0) {
    const auto notion = parse_notion(prop.substr(10));
    const auto s = check_stability(p, inst, notion);
    pass = s.stable;
    if (!pass) witness = pair_json(inst, s.agent, s.other, s.object);
    witness["notion"] = notion_name(notion);
  } else if (prop == "ete") {
    const auto r = check_equal_treatment(p, inst, TreatmentMode::Full);
    pass = r.ok;
    if (!pass) witness = {{"agents", {inst.agent_ids[r.first], inst.agent_ids[r.second]}}};
  } else if (prop == "envy") {
    const auto r = check_weak_sd_envy(p, inst);
    pass = r.ok;
    if (!pass) witness = {{"envious", inst.agent_ids[r.first]}, {"envied", inst.agent_ids[r.second]}};
  } else if (prop == "oe") {
    const FeasibleSet x = build(file.constraints, inst);
    if (!x.is_convex()) throw InputError("oe needs a convex feasible set");
    if (!x.contains(p)) throw InputError("allocation is not in the feasible set");
    const auto best = leximin_signature(x, inst);
    const auto mine = signature(p, inst);
    pass = compare_leximin(mine.sorted_values, best.sorted_values) >= 0;
    json a = json::array(), b = json::array();
    for (const auto& v : mine.sorted_values) a.push_back(v.str());
    for (const auto& v : best.sorted_values) b.push_back(v.str());
    witness = {{"signature", a}, {"leximin", b}};
  } else {
    throw InputError("unknown property '" + prop + "'");
  }
  std::cout << (pass ? "PASS" : "FAIL") << '\n' << witness.dump() << '\n';
  return pass ? 0 : kFail;
}

int run_stable_set(const std::string& path) {
  const auto file = io::load_instance(path);
  const auto all = enumerate_deterministic_stable(file.instance);
  json out = json::array();
  for (const auto& p : all) out.push_back(io::allocation_json(p));
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_decompose(const DecomposeArgs& args) {
  const auto file = io::load_instance(args.instance);
  const Instance& inst = file.instance;
  const Allocation p = io::load_allocation(args.allocation, inst);
  std::optional<std::vector<Allocation>> pool;
  if (!args.restrict_file.empty()) {
    pool = io::parse_allocation_list(json::parse(io::read_file(args.restrict_file)), inst);
  } else if (args.stable_only) {
    pool = enumerate_deterministic_stable(inst);
  }
  if (pool && args.stable_only) {
    for (const auto& q : *pool) {
      if (!is_deterministic_stable(q, inst)) throw InputError("--restrict lists an allocation that is not stable");
    }
  }
  std::cout << io::lottery_json(bvn_decompose(p, inst, pool), inst).dump(2) << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained probabilistic allocation by vigilant eating"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* cmd_solve = app.add_subcommand("solve", "Compute an allocation");
  cmd_solve->add_option("instance", solve.instance, "Instance JSON")->required();
  cmd_solve->add_option("--rule", solve.rule, "ver, vp, ps, da-lex, da-uniform or rp")
      ->check(CLI::IsMember({"ver", "vp", "ps", "da-lex", "da-uniform", "rp"}));
  cmd_solve->add_option("--order", solve.order, "Comma-separated agent ids");
  cmd_solve->add_option("--rates", solve.rates, "Eating-rate JSON");
  cmd_solve->add_option("--trace", solve.trace, "Write the round trace as JSON");

  VerifyArgs verify;
  auto* cmd_verify = app.add_subcommand("verify", "Check a property of an allocation");
  cmd_verify->add_option("instance", verify.instance, "Instance JSON")->required();
  cmd_verify->add_option("allocation", verify.allocation, "Allocation matrix file")->required();
  cmd_verify->add_option("--property", verify.property,
                         "sd-eff, dl-eff, stability:<exante|expost|fractional|claimwise>, ete, envy, two-sided, oe")
      ->required();

  std::string stable_path;
  auto* cmd_stable = app.add_subcommand("stable-set", "List deterministic stable allocations");
  cmd_stable->add_option("instance", stable_path, "Instance JSON")->required();

  DecomposeArgs decompose;
  auto* cmd_decompose = app.add_subcommand("decompose", "Write an allocation as a lottery");
  cmd_decompose->add_option("instance", decompose.instance, "Instance JSON")->required();
  cmd_decompose->add_option("allocation", decompose.allocation, "Allocation matrix file")->required();
  cmd_decompose->add_flag("--stable-only", decompose.stable_only, "Use deterministic stable allocations only");
  cmd_decompose->add_option("--restrict", decompose.restrict_file, "JSON list of allowed deterministic allocations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*cmd_solve) return run_solve(solve);
    if (*cmd_verify) return run_verify(verify);
    if (*cmd_stable) return run_stable_set(stable_path);
    if (*cmd_decompose) return run_decompose(decompose);
  } catch (const EmptyFeasibleSet& e) {
    std::cerr << "empty feasible set: " << e.what() << '\n';
    return kEmptySet;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const NotDecomposable& e) {
    std::cerr << "not decomposable: " << e.what() << '\n';
    return kInputError;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
