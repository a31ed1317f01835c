#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "swarm/swarm.hpp"

namespace swarmctl {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeFailure = 3 };

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());

  // subcommand-specific
  std::optional<std::string> policy;
  std::string dump_path;
  std::size_t run_index = 0;
  std::optional<std::string> axis;
  std::optional<std::string> values;
  std::size_t trials = 1000;
  bool flip_repulsion = false;
  bool print_config = false;
};

namespace detail {

inline swarm::Scenario resolve(const Invocation& inv) {
  swarm::ConfigBuilder b;
  if (!inv.config_path.empty()) b.add_file(inv.config_path);
  for (const auto& kv : inv.overrides) b.add_override(kv);
  if (inv.seed) b.add_override("seed=" + std::to_string(*inv.seed));
  if (inv.policy) b.add_override("policy=" + *inv.policy);
  if (inv.axis) b.add_override("sweep.axis=" + *inv.axis);
  if (inv.values) b.add_override("sweep.values=" + *inv.values);
  return b.build();
}

inline std::ofstream open_out(const Invocation& inv, const std::string& name) {
  std::filesystem::create_directories(inv.out_dir);
  const auto path = std::filesystem::path(inv.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

inline void print_estimate(std::ostream& out, const std::string& label, const swarm::ChanceEstimate& e) {
  out << label << ": P(tube) = " << swarm::io::fixed4(e.tube.p_hat) << " (" << e.tube.k << "/" << e.M
      << "), 95% Wilson CI [" << swarm::io::fixed4(e.tube.lo) << ", " << swarm::io::fixed4(e.tube.hi) << "]"
      << "  vel " << swarm::io::fixed4(e.frac_vel) << "  form " << swarm::io::fixed4(e.frac_form) << "  safe "
      << swarm::io::fixed4(e.frac_safe) << "  mean l1 " << swarm::io::fixed4(e.mean_l1_cost) << "  duty "
      << swarm::io::fixed4(e.mean_duty) << "  collisions " << e.collisions << "\n";
}

inline bool all_failed(const swarm::ChanceEstimate& e) { return e.collisions + e.init_failures == e.M; }

}  // namespace detail

inline int cmd_validate(const Invocation& inv, const swarm::Scenario& sc, std::ostream& out) {
  if (inv.print_config) out << swarm::to_config_text(sc);
  out << "config_hash=" << swarm::config_hash(sc) << "\nvalid\n";
  return kOk;
}

inline int cmd_run(const Invocation& inv, const swarm::Scenario& sc, std::ostream& out) {
  const auto setup = swarm::make_setup(sc, sc.resolved_policy());
  swarm::RunRecord rec;
  if (!inv.dump_path.empty()) {
    std::filesystem::path p(inv.dump_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + inv.dump_path);
    swarm::io::TrajectoryWriter writer(f, sc.params.d);
    rec = swarm::run(setup, inv.run_index, std::ref(writer));
  } else {
    rec = swarm::run(setup, inv.run_index);
  }
  out << swarm::io::to_json(rec) << "\n";
  return rec.init_failed || rec.collided ? kRuntimeFailure : kOk;
}

inline int cmd_mc(const Invocation& inv, const swarm::Scenario& sc, std::ostream& out) {
  const auto policy = sc.resolved_policy();
  const auto res = swarm::estimate_chance(swarm::make_setup(sc, policy), sc.M, inv.workers);
  const auto c = swarm::cost(res.records, sc.weights, sc.params.T);
  {
    auto f = detail::open_out(inv, "records.jsonl");
    swarm::io::write_jsonl(f, res.records);
  }
  {
    auto f = detail::open_out(inv, "summary.csv");
    swarm::io::write_summary_csv(f, sc, sc.policy, res.estimate, c);
  }
  detail::print_estimate(out, sc.policy, res.estimate);
  out << "mean total cost " << swarm::io::fixed4(c.total) << "\n";
  return detail::all_failed(res.estimate) ? kRuntimeFailure : kOk;
}

inline int cmd_compare(const Invocation& inv, const swarm::Scenario& sc, std::ostream& out) {
  const auto base = swarm::estimate_chance(swarm::make_setup(sc, swarm::Policy::baseline()), sc.M, inv.workers);
  const auto sparse = swarm::estimate_chance(
      swarm::make_setup(sc, swarm::Policy::sparse(sc.params.leaders.threshold())), sc.M, inv.workers);
  const auto cb = swarm::cost(base.records, sc.weights, sc.params.T);
  const auto cs = swarm::cost(sparse.records, sc.weights, sc.params.T);
  {
    auto f = detail::open_out(inv, "baseline.jsonl");
    swarm::io::write_jsonl(f, base.records);
  }
  {
    auto f = detail::open_out(inv, "sparse.jsonl");
    swarm::io::write_jsonl(f, sparse.records);
  }
  {
    auto f = detail::open_out(inv, "compare.csv");
    swarm::io::write_compare_csv(f, sc, base.estimate, cb, sparse.estimate, cs);
  }
  detail::print_estimate(out, "baseline", base.estimate);
  detail::print_estimate(out, "sparse", sparse.estimate);
  out << "mean total cost baseline " << swarm::io::fixed4(cb.total) << "  sparse " << swarm::io::fixed4(cs.total)
      << "\n";
  return detail::all_failed(base.estimate) && detail::all_failed(sparse.estimate) ? kRuntimeFailure : kOk;
}

inline int cmd_sweep(const Invocation& inv, const swarm::Scenario& sc, std::ostream& out) {
  const auto axis = swarm::parse_sweep_axis(sc.sweep_axis);
  // reject bad axis values before any simulation starts
  for (double v : sc.sweep_values) swarm::apply_axis(sc.params, axis, v);
  const auto sw = swarm::sweep(axis, sc.sweep_values, swarm::make_setup(sc, sc.resolved_policy()), sc.M, inv.workers);
  {
    auto f = detail::open_out(inv, "sweep.csv");
    swarm::io::write_sweep_csv(f, sc, sw);
  }
  for (const auto& pt : sw.points)
    detail::print_estimate(out, sc.sweep_axis + "=" + swarm::io::fixed4(pt.value), pt.result.estimate);
  return kOk;
}

inline int cmd_diagnose(const Invocation& inv, const swarm::Scenario& sc, std::ostream& out) {
  auto fp = swarm::ForceParams::from(sc.params);
  if (fp.rep_strength == 0.0) fp.rep_strength = 1.0;
  if (inv.flip_repulsion) fp.rep_strength = -fp.rep_strength;
  bool ok = true;
  auto line = [&](const char* name, bool pass, const std::string& detail) {
    ok = ok && pass;
    out << (pass ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
  };
  using swarm::io::json_number;

  const auto cancel = swarm::diag::cancellation_check(inv.trials, {2, 10, 50}, fp, sc.seed);
  line("cancellation", cancel.pass, "max residual " + json_number(cancel.value) + " over " +
                                        std::to_string(cancel.samples) + " states (tol 1e-9)");

  const auto coer = swarm::diag::coercivity_check(inv.trials, fp, sc.seed + 1);
  line("coercivity", coer.pass, "min H - moments " + json_number(coer.value));

  swarm::SimParams ap = sc.params;
  ap.N = std::min<std::size_t>(ap.N, 20);
  ap.K = std::min(ap.K, ap.N - 1);
  const auto contraction = swarm::diag::alignment_contraction_check(ap, 500, sc.seed + 2);
  line("alignment_contraction", contraction.pass, "max bound increase " + json_number(contraction.value));

  const auto traj = swarm::diag::drift_trajectory(swarm::make_setup(sc, sc.resolved_policy()), 0);
  const double C = swarm::diag::fitted_drift_constant(traj);
  out << "INFO drift_bound  fitted C = max Gamma/(1+H) = " << json_number(C) << " over " << traj.size()
      << " steps (diagnostic only)\n";
  {
    auto f = detail::open_out(inv, "drift_scatter.csv");
    f << "t,h_tilde,gamma_tilde\n";
    for (const auto& s : traj) f << json_number(s.t) << ',' << json_number(s.h) << ',' << json_number(s.gamma) << '\n';
  }
  return ok ? kOk : kRuntimeFailure;
}

/// Parses argv and dispatches; all output goes to `out`/`err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Invocation inv;
  CLI::App app{"Delayed stochastic leader-follower swarm simulator"};
  app.require_subcommand(1);
  app.add_option("-c,--config", inv.config_path, "key = value configuration file");
  app.add_option("-s,--set", inv.overrides, "override a config key (key=value), repeatable");
  app.add_option("-o,--out", inv.out_dir, "output directory");
  app.add_option("--seed", inv.seed, "base seed (overrides config)");
  app.add_option("-j,--workers", inv.workers, "worker threads for Monte Carlo")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "single realization, prints its record as JSON");
  run->add_option("--dump", inv.dump_path, "write trajectory CSV to this path");
  run->add_option("--run-index", inv.run_index, "realization index");
  run->add_option("--policy", inv.policy, "baseline | sparse");
  auto* mc = app.add_subcommand("mc", "Monte Carlo chance-constraint estimate");
  mc->add_option("--policy", inv.policy, "baseline | sparse");
  app.add_subcommand("compare", "baseline vs sparse on identical seeds");
  auto* sw = app.add_subcommand("sweep", "one-dimensional parameter sweep");
  sw->add_option("--axis", inv.axis, "T | leaders | tau_max");
  sw->add_option("--values", inv.values, "comma-separated axis values");
  sw->add_option("--policy", inv.policy, "baseline | sparse");
  auto* dg = app.add_subcommand("diagnose", "structural property checks");
  dg->add_option("--trials", inv.trials, "random states per check");
  dg->add_flag("--flip-repulsion-sign", inv.flip_repulsion, "negate U_rep (negative control)");
  auto* va = app.add_subcommand("validate", "validate configuration");
  va->add_flag("--print", inv.print_config, "print the resolved configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();

  swarm::Scenario sc;
  try {
    sc = detail::resolve(inv);
  } catch (const swarm::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  const auto report = swarm::validate_scenario(sc);
  if (!report.empty()) {
    err << "invalid configuration:\n";
    for (const auto& m : report) err << "  - " << m << "\n";
    return kConfigError;
  }

  try {
    if (inv.subcommand == "validate") return cmd_validate(inv, sc, out);
    if (inv.subcommand == "run") return cmd_run(inv, sc, out);
    if (inv.subcommand == "mc") return cmd_mc(inv, sc, out);
    if (inv.subcommand == "compare") return cmd_compare(inv, sc, out);
    if (inv.subcommand == "sweep") return cmd_sweep(inv, sc, out);
    if (inv.subcommand == "diagnose") return cmd_diagnose(inv, sc, out);
  } catch (const swarm::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kConfigError;
}

}  // namespace swarmctl
