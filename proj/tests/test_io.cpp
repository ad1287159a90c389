#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "dopt/io.hpp"

using namespace dopt;
using dopt::io::json;

TEST_CASE("instances round-trip through JSON") {
  for (const auto& inst : {generate_second_order_knapsack_instance(16, std::nullopt, 3),
                           generate_cardinality_instance(11), generate_unconstrained_instance(4, 9, 3)}) {
    const json j = io::to_json(inst);
    const Instance back = io::instance_from_json(json::parse(j.dump()));
    CHECK(back == inst);
    CHECK(io::to_json(back).dump() == j.dump());
    CHECK(io::instance_hash(back) == io::instance_hash(inst));
  }
  const auto a = generate_knapsack_instance(11, std::nullopt, 7);
  const auto b = generate_knapsack_instance(11, std::nullopt, 8);
  CHECK(io::instance_hash(a) != io::instance_hash(b));
  CHECK(io::instance_hash(a).size() == 16);
}

TEST_CASE("rationals are written as pairs and accepted as integers") {
  ExperimentSpace s(2, 2, {{{Rational(1, 3), Rational(2)}, Rational(5, 2)}});
  const Instance inst(s, build_full_first_order(2), 3);
  json j = io::to_json(inst);
  CHECK(j["constraints"][0]["row"][0] == json::array({1, 3}));
  CHECK(j["constraints"][0]["rhs"] == json::array({5, 2}));
  j["constraints"][0]["row"][1] = 2;
  CHECK(io::instance_from_json(j) == inst);
  j["constraints"][0]["rhs"] = json::array({1, 2, 3});
  CHECK_THROWS_AS(io::instance_from_json(j), std::invalid_argument);
}

TEST_CASE("designs round-trip and repeated points accumulate") {
  const auto m = build_full_first_order(2);
  const Design d(m, 4, {{{0, 0}, 1}, {{0, 1}, 1}, {{1, 0}, 2}});
  const json j = io::to_json(d);
  CHECK(j["k"] == 4);
  CHECK(j["points"].size() == 3);
  CHECK(io::design_from_json(j, m).support() == d.support());
  const json loose = json::parse(R"({"k": 4, "points": [{"x": [1, 0]}, {"x": [0, 0]}, {"x": [1, 0]}, {"x": [0, 1]}]})");
  CHECK(io::design_from_json(loose, m).support() == d.support());
  const json bad = json::parse(R"({"k": 5, "points": [{"x": [1, 0], "lambda": 2}]})");
  CHECK_THROWS_AS(io::design_from_json(bad, m), std::invalid_argument);
}

TEST_CASE("CSV puts the documented columns first") {
  SuiteReport rep;
  SuiteRow r;
  r.d = 9;
  r.p = 9;
  r.k = 18;
  r.seed = 135;
  r.ls_value = 1.5;
  r.relax_value = std::nan("");
  r.status = "degenerate: rank, 5";
  rep.rows.push_back(r);
  std::istringstream csv(io::to_csv(rep));
  std::string header, line;
  std::getline(csv, header);
  std::getline(csv, line);
  CHECK(header.rfind("d,k,seed,ls_value,relax_value,gap,ls_time,cg_time,ip_calls,iterations", 0) == 0);
  CHECK(line.rfind("9,18,135,1.5,nan,", 0) == 0);
  CHECK(std::count(line.begin(), line.end(), ',') == std::count(header.begin(), header.end(), ','));
}

TEST_CASE("files") {
  const auto path = std::filesystem::temp_directory_path() / "dopt_io_test.json";
  io::write_text_file(path.string(), R"({"a": 1})");
  CHECK(io::read_json_file(path.string())["a"] == 1);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(io::read_json_file((path.string() + ".missing")), std::invalid_argument);
}
