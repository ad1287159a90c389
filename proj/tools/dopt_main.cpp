// dopt: command-line driver for instance generation, local search, column
// generation, suites and the brute-force oracle.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dopt/bench.hpp"
#include "dopt/errors.hpp"
#include "dopt/io.hpp"
#include "dopt/rng.hpp"

namespace {

using dopt::io::json;

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kUsage = 1, kDegenerate = 2, kSoftFailure = 3 };

struct Config {
  std::string variant = "knapsack";
  int d = 0;
  std::optional<int> k;
  int levels = 2;
  std::uint64_t seed = 0;
  std::string instance_path;
  std::string warm_start_path;
  std::string out_path;
  std::string trace_path;
  std::string csv_path;
  std::string exact = "bb";
  double delta = 0.05, epsilon = 1e-4, gamma = 1e-6;
  double tol_master = 1e-9, tol_improve = 1e-9;
  std::int64_t bb_nodes = 1'000'000;
  std::uint64_t enum_cap = std::uint64_t{1} << 24;
  std::int64_t master_iters = 100'000;
  std::int64_t cg_iters = 10'000;
  std::uint64_t brute_cap = 10'000'000;
  std::vector<int> d_values;
  std::vector<std::uint64_t> seeds{1};
  int k_factor = 2;
  int threads = 1;
  bool dual_mode = false;
};

void emit(const Config& cfg, const std::string& text) {
  if (cfg.out_path.empty())
    std::cout << text << '\n';
  else
    dopt::io::write_text_file(cfg.out_path, text + "\n");
}

void write_manifest(const Config& cfg, const std::string& command,
                    const std::optional<dopt::Instance>& inst) {
  json m = {{"tool", "dopt"},
            {"version", kVersion},
            {"command", command},
            {"seed", cfg.seed},
            {"rng", dopt::Rng::kAlgorithm},
            {"tolerances",
             {{"delta", cfg.delta},
              {"epsilon", cfg.epsilon},
              {"gamma", cfg.gamma},
              {"tol_master", cfg.tol_master},
              {"tol_improve", cfg.tol_improve}}},
            {"caps",
             {{"bb_nodes", cfg.bb_nodes},
              {"enum_cap", cfg.enum_cap},
              {"master_iters", cfg.master_iters},
              {"cg_iters", cfg.cg_iters},
              {"brute_cap", cfg.brute_cap}}},
            {"exact", cfg.exact},
            {"threads", cfg.threads}};
  if (inst) m["instance_hash"] = dopt::io::instance_hash(*inst);
  if (!cfg.instance_path.empty()) m["instance_path"] = cfg.instance_path;
  if (cfg.out_path.empty())
    std::cerr << json{{"manifest", m}}.dump() << '\n';
  else
    dopt::io::write_text_file(cfg.out_path + ".manifest.json", m.dump(2) + "\n");
}

dopt::PricingOptions pricing_options(const Config& cfg) {
  dopt::PricingOptions po;
  if (cfg.exact == "enum")
    po.exact = dopt::ExactMethod::enumeration;
  else if (cfg.exact == "bb")
    po.exact = dopt::ExactMethod::branch_and_bound;
  else
    throw std::invalid_argument("--exact must be bb or enum");
  po.bb.node_limit = cfg.bb_nodes;
  po.enum_cap = cfg.enum_cap;
  return po;
}

dopt::LocalSearchOptions ls_options(const Config& cfg) {
  dopt::LocalSearchOptions o;
  o.tol_improve = cfg.tol_improve;
  o.pricing = pricing_options(cfg);
  return o;
}

dopt::ColumnGenerationParams cg_params(const Config& cfg) {
  dopt::ColumnGenerationParams p;
  p.delta = cfg.delta;
  p.epsilon = cfg.epsilon;
  p.gamma = cfg.gamma;
  p.seed = cfg.seed;
  p.max_iterations = cfg.cg_iters;
  p.master.tol = cfg.tol_master;
  p.master.max_iterations = cfg.master_iters;
  p.start_in_dual_mode = cfg.dual_mode;
  return p;
}

void check_config(const Config& cfg) {
  for (double t : {cfg.delta, cfg.epsilon, cfg.gamma, cfg.tol_master, cfg.tol_improve})
    if (!(t > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (cfg.bb_nodes <= 0 || cfg.enum_cap == 0 || cfg.master_iters <= 0 || cfg.cg_iters <= 0 ||
      cfg.brute_cap == 0 || cfg.threads <= 0)
    throw std::invalid_argument("caps must be positive");
}

dopt::Instance load_instance(const Config& cfg) {
  if (cfg.instance_path.empty()) throw std::invalid_argument("--instance is required");
  return dopt::io::instance_from_json(dopt::io::read_json_file(cfg.instance_path));
}

int cmd_gen(const Config& cfg) {
  const auto variant = dopt::parse_variant(cfg.variant);
  if (cfg.d <= 0) throw std::invalid_argument("--d is required");
  const dopt::Instance inst = variant == dopt::Variant::unconstrained
                                  ? dopt::generate_unconstrained_instance(cfg.d, cfg.k, cfg.levels)
                                  : dopt::make_instance(variant, cfg.d, cfg.k, cfg.seed);
  emit(cfg, dopt::io::to_json(inst).dump(2));
  write_manifest(cfg, "gen", inst);
  return kOk;
}

// Accepts a bare design or the output of `ls`.
dopt::Design warm_design(const json& j, const dopt::MonomialModel& model) {
  return dopt::io::design_from_json(j.contains("design") ? j.at("design") : j, model);
}

int cmd_ls(const Config& cfg) {
  const dopt::Instance inst = load_instance(cfg);
  const auto opts = ls_options(cfg);
  auto [design, report] =
      cfg.warm_start_path.empty()
          ? dopt::run_local_search(inst, cfg.seed, opts)
          : dopt::run_local_search(
                inst,
                warm_design(dopt::io::read_json_file(cfg.warm_start_path), inst.model),
                opts);
  emit(cfg, json{{"design", dopt::io::to_json(design)}, {"report", dopt::io::to_json(report)}}
                .dump(2));
  write_manifest(cfg, "ls", inst);
  return report.inconclusive || report.move_limit_hit ? kSoftFailure : kOk;
}

int cmd_relax(const Config& cfg) {
  const dopt::Instance inst = load_instance(cfg);
  const dopt::Pricer pricer(inst.space, inst.model, pricing_options(cfg));
  const auto res = dopt::column_generation(inst, pricer, cg_params(cfg));
  if (!cfg.trace_path.empty()) {
    std::string lines;
    for (const auto& e : res.trace) lines += dopt::io::to_json(e).dump() + "\n";
    dopt::io::write_text_file(cfg.trace_path, lines);
  }
  emit(cfg, dopt::io::to_json(res).dump(2));
  write_manifest(cfg, "relax", inst);
  return res.status == dopt::CgStatus::converged ? kOk : kSoftFailure;
}

int cmd_suite(const Config& cfg) {
  const auto variant = dopt::parse_variant(cfg.variant);
  if (cfg.d_values.empty()) throw std::invalid_argument("--d is required");
  dopt::SuiteOptions so;
  const int factor = cfg.k_factor;
  so.k_rule = [factor](int p) { return factor * p; };
  so.local_search = ls_options(cfg);
  so.column_generation = cg_params(cfg);
  so.threads = cfg.threads;
  const auto report = dopt::run_suite(variant, cfg.d_values, cfg.seeds, so);
  if (!cfg.csv_path.empty()) dopt::io::write_text_file(cfg.csv_path, dopt::io::to_csv(report));
  emit(cfg, dopt::io::to_json(report).dump(2));
  write_manifest(cfg, "suite", std::nullopt);
  for (const auto& r : report.rows)
    if (r.status != "ok") return kSoftFailure;
  return kOk;
}

int cmd_brute(const Config& cfg) {
  const dopt::Instance inst = load_instance(cfg);
  const auto res = dopt::brute_force_dopt(inst, cfg.brute_cap);
  emit(cfg, dopt::io::to_json(res).dump(2));
  write_manifest(cfg, "brute", inst);
  return kOk;
}

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"D-optimal experimental design by pricing-based local search and column generation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto add_pricing = [&](CLI::App* sub) {
    sub->add_option("--exact", cfg.exact, "Exact pricing method: bb or enum");
    sub->add_option("--bb-nodes", cfg.bb_nodes, "Branch-and-bound node limit");
    sub->add_option("--enum-cap", cfg.enum_cap, "Enumeration cap on L^d");
    sub->add_option("--threads", cfg.threads, "Worker threads");
  };
  auto add_cg = [&](CLI::App* sub) {
    sub->add_option("--delta", cfg.delta);
    sub->add_option("--epsilon", cfg.epsilon);
    sub->add_option("--gamma", cfg.gamma);
    sub->add_option("--tol-master", cfg.tol_master);
    sub->add_option("--master-iters", cfg.master_iters);
    sub->add_option("--cg-iters", cfg.cg_iters);
    sub->add_flag("--dual-mode", cfg.dual_mode, "Run column generation in dual-only mode");
  };

  auto* gen = app.add_subcommand("gen", "Write an instance JSON");
  gen->add_option("--variant", cfg.variant, "cardinality | knapsack | second_order | unconstrained");
  gen->add_option("--d", cfg.d)->required();
  gen->add_option("--k", cfg.k, "Budget (default 2p)");
  gen->add_option("--levels", cfg.levels, "Levels (unconstrained only)");
  gen->add_option("--seed", cfg.seed);
  gen->add_option("--out", cfg.out_path);

  auto* ls = app.add_subcommand("ls", "Local search; writes design and report");
  ls->add_option("--instance", cfg.instance_path)->required();
  ls->add_option("--seed", cfg.seed);
  ls->add_option("--warm-start", cfg.warm_start_path, "Design JSON to start from");
  ls->add_option("--tol-improve", cfg.tol_improve);
  ls->add_option("--out", cfg.out_path);
  add_pricing(ls);

  auto* relax = app.add_subcommand("relax", "Column generation for the continuous relaxation");
  relax->add_option("--instance", cfg.instance_path)->required();
  relax->add_option("--seed", cfg.seed);
  relax->add_option("--trace", cfg.trace_path, "Write the trace as JSON lines");
  relax->add_option("--out", cfg.out_path);
  add_pricing(relax);
  add_cg(relax);

  auto* suite = app.add_subcommand("suite", "Local search and relaxation over generated instances");
  suite->add_option("--variant", cfg.variant);
  suite->add_option("--d", cfg.d_values, "Values of d")->required();
  suite->add_option("--seeds", cfg.seeds);
  suite->add_option("--k-factor", cfg.k_factor, "k = factor * p");
  suite->add_option("--tol-improve", cfg.tol_improve);
  suite->add_option("--csv", cfg.csv_path);
  suite->add_option("--out", cfg.out_path);
  add_pricing(suite);
  add_cg(suite);

  auto* brute = app.add_subcommand("brute", "Exhaustive integer optimum (small instances)");
  brute->add_option("--instance", cfg.instance_path)->required();
  brute->add_option("--cap", cfg.brute_cap, "Maximum number of multisets");
  brute->add_option("--out", cfg.out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(kUsage, "usage", e.what());
  }

  try {
    check_config(cfg);
    if (*gen) return cmd_gen(cfg);
    if (*ls) return cmd_ls(cfg);
    if (*relax) return cmd_relax(cfg);
    if (*suite) return cmd_suite(cfg);
    if (*brute) return cmd_brute(cfg);
    return fail(kUsage, "usage", "no subcommand");
  } catch (const dopt::DegenerateInstance& e) {
    return fail(kDegenerate, "degenerate_instance", e.what());
  } catch (const dopt::SolverLimit& e) {
    return fail(kSoftFailure, "solver_limit", e.what());
  } catch (const dopt::NumericalError& e) {
    return fail(kSoftFailure, "numerical", e.what());
  } catch (const json::exception& e) {
    return fail(kUsage, "bad_json", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kUsage, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    return fail(kUsage, "error", e.what());
  }
}
