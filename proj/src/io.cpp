#include "dopt/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "dopt/rng.hpp"

namespace dopt::io {

namespace {

json rational(const Rational& r) { return json::array({r.num, r.den}); }

Rational rational_from(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("rational must be [num, den]");
  return Rational(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
}

json matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const Instance& inst) {
  json cons = json::array();
  for (const auto& c : inst.space.constraints()) {
    json row = json::array();
    for (const auto& a : c.row) row.push_back(rational(a));
    cons.push_back({{"row", row}, {"rhs", rational(c.rhs)}});
  }
  return {{"d", inst.space.dim()},
          {"levels", inst.space.levels()},
          {"fixed_first", inst.space.fixed_first()},
          {"constraints", cons},
          {"model", {{"exponents", inst.model.exponents()}}},
          {"k", inst.k},
          {"seed", inst.seed ? json(*inst.seed) : json(nullptr)},
          {"generator", inst.generator},
          {"rng", Rng::kAlgorithm}};
}

Instance instance_from_json(const json& j) {
  const int d = j.at("d").get<int>();
  std::vector<LinearConstraint> cons;
  for (const auto& c : j.value("constraints", json::array())) {
    LinearConstraint lc;
    for (const auto& a : c.at("row")) lc.row.push_back(rational_from(a));
    lc.rhs = rational_from(c.at("rhs"));
    cons.push_back(std::move(lc));
  }
  ExperimentSpace space(d, j.value("levels", 2), std::move(cons), j.value("fixed_first", false));
  MonomialModel model(d, j.at("model").at("exponents").get<std::vector<std::vector<int>>>());
  std::optional<std::uint64_t> seed;
  if (j.contains("seed") && !j["seed"].is_null()) seed = j["seed"].get<std::uint64_t>();
  return Instance(std::move(space), std::move(model), j.at("k").get<int>(), seed,
                  j.value("generator", std::string("custom")));
}

json to_json(const Design& design) {
  json pts = json::array();
  for (const auto& [x, m] : design.support()) pts.push_back({{"x", x}, {"lambda", m}});
  return {{"points", pts}, {"k", design.k()}, {"logdet", design.logdet()}};
}

Design design_from_json(const json& j, const MonomialModel& model) {
  std::map<Experiment, int> support;
  for (const auto& pt : j.at("points")) {
    const auto x = pt.at("x").get<Experiment>();
    support[x] += pt.value("lambda", 1);
  }
  return Design(model, j.at("k").get<int>(), std::move(support));
}

json to_json(const LocalSearchReport& r) {
  json trace = json::array();
  for (const auto& e : r.trace)
    trace.push_back({{"iteration", e.iteration}, {"logdet", e.logdet}, {"move", to_string(e.kind)}});
  return {{"iterations", r.iterations},
          {"heuristic_moves", r.heuristic_moves},
          {"ip_calls", r.ip_calls},
          {"scans", r.scans},
          {"initial_logdet", r.initial_logdet},
          {"final_logdet", r.final_logdet},
          {"proved_local_optimum", r.proved_local_optimum},
          {"inconclusive", r.inconclusive},
          {"move_limit_hit", r.move_limit_hit},
          {"trace", trace}};
}

json to_json(const ContinuousDesign& cd) {
  json pts = json::array();
  for (std::size_t i = 0; i < cd.points.size(); ++i) {
    json e = {{"v", std::vector<double>(cd.points[i].data(), cd.points[i].data() + cd.points[i].size())},
              {"lambda", cd.weights[static_cast<Eigen::Index>(i)]}};
    if (!cd.experiments.empty()) e["x"] = cd.experiments[i];
    pts.push_back(std::move(e));
  }
  return {{"points", pts}, {"k", cd.k}, {"objective", cd.objective()}};
}

json to_json(const DualCertificate& c) {
  return {{"Lambda", matrix(c.lambda)},
          {"nu", c.nu},
          {"k", c.k},
          {"objective", c.objective},
          {"feasible_for", to_string(c.scope)}};
}

json to_json(const CgTraceEntry& e) {
  return {{"iter", e.iter},
          {"master_obj", e.master_obj},
          {"nu", e.nu},
          {"heuristic_value", e.heuristic_value},
          {"alpha", opt(e.alpha)},
          {"upper_bound", opt(e.upper_bound)},
          {"mode", to_string(e.mode)},
          {"n_points", e.n_points},
          {"candidates", e.candidates},
          {"sparsified", e.sparsified},
          {"ip_solved", e.ip_solved}};
}

json to_json(const ColumnGenerationResult& res) {
  json trace = json::array();
  for (const auto& e : res.trace) trace.push_back(to_json(e));
  return {{"status", to_string(res.status)},
          {"design", to_json(res.design)},
          {"certificate", to_json(res.certificate)},
          {"best_upper_bound", opt(res.best_upper_bound)},
          {"ip_calls", res.ip_calls},
          {"master_iterations", res.master_iterations},
          {"trace", trace}};
}

json to_json(const BruteForceResult& res) {
  return {{"optimum_logdet", res.optimum_logdet},
          {"design", to_json(res.optimal_design)},
          {"multisets_examined", res.multisets_examined}};
}

json to_json(const SuiteRow& r) {
  return {{"variant", to_string(r.variant)}, {"d", r.d},
          {"p", r.p},
          {"k", r.k},
          {"seed", r.seed},
          {"ls_value", r.ls_value},
          {"relax_value", r.relax_value},
          {"gap", r.gap},
          {"ls_time", r.ls_time},
          {"cg_time", r.cg_time},
          {"ip_calls", r.ip_calls},
          {"iterations", r.iterations},
          {"cg_iterations", r.cg_iterations},
          {"cg_ip_calls", r.cg_ip_calls},
          {"status", r.status}};
}

json to_json(const SuiteReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back(to_json(r));
  return {{"rows", rows}};
}

std::string to_csv(const SuiteReport& report) {
  std::ostringstream out;
  out << "d,k,seed,ls_value,relax_value,gap,ls_time,cg_time,ip_calls,iterations,"
         "variant,p,cg_iterations,cg_ip_calls,status\n";
  out << std::setprecision(10);
  for (const auto& r : report.rows) {
    std::string status = r.status;
    for (auto& ch : status)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
    out << r.d << ',' << r.k << ',' << r.seed << ',' << r.ls_value << ',' << r.relax_value << ','
        << r.gap << ',' << r.ls_time << ',' << r.cg_time << ',' << r.ip_calls << ','
        << r.iterations << ',' << to_string(r.variant) << ',' << r.p << ',' << r.cg_iterations
        << ',' << r.cg_ip_calls << ',' << status << '\n';
  }
  return out.str();
}

std::string instance_hash(const Instance& inst) {
  const std::string s = to_json(inst).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return json::parse(in);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace dopt::io
