#ifndef DOPT_IO_HPP
#define DOPT_IO_HPP

#include <string>

#include "json.hpp"

#include "dopt/bench.hpp"
#include "dopt/local_search.hpp"
#include "dopt/model.hpp"
#include "dopt/relaxation.hpp"

namespace dopt::io {

using nlohmann::json;

// Rationals are written as [num, den].
json to_json(const Instance& inst);
Instance instance_from_json(const json& j);

/// {"points": [{"x": [...], "lambda": n}], "k": k}
json to_json(const Design& design);
Design design_from_json(const json& j, const MonomialModel& model);

json to_json(const LocalSearchReport& report);
json to_json(const ContinuousDesign& cd);
json to_json(const DualCertificate& cert);
json to_json(const CgTraceEntry& e);
json to_json(const ColumnGenerationResult& res);
json to_json(const BruteForceResult& res);
json to_json(const SuiteRow& row);
json to_json(const SuiteReport& report);
std::string to_csv(const SuiteReport& report);

/// FNV-1a 64 of the instance's compact JSON dump, as 16 hex digits.
std::string instance_hash(const Instance& inst);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dopt::io

#endif  // DOPT_IO_HPP
