#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vigil/feasible.hpp"
#include "vigil/model.hpp"
#include "vigil/ver.hpp"
#include "vigil/verify.hpp"

namespace vigil::io {

using nlohmann::json;

// Accepts "n", "n/d" strings and JSON integers. Floats are rejected.
Rational parse_rational(const json& value);
json to_json(const Rational& value);

struct InstanceFile {
  Instance instance;
  ConstraintSpec constraints;
};

InstanceFile parse_instance(const json& doc);
InstanceFile load_instance(const std::string& path);
json instance_to_json(const InstanceFile& file);
json spec_to_json(const ConstraintSpec& spec, const Instance& inst);
ConstraintSpec parse_spec(const json& doc, const Instance& inst);

// Whitespace-separated fractions, one row per agent, with an optional
// "# <object ids>" header line. Blank lines are ignored.
Allocation parse_allocation(const std::string& text, const Instance& inst);
Allocation load_allocation(const std::string& path, const Instance& inst);
std::string format_allocation(const Allocation& p, const Instance& inst);
json allocation_json(const Allocation& p);
Allocation allocation_from_json(const json& value, const Instance& inst);

// Either a matrix or, for unit demand, a map/list from agents to object ids.
std::vector<Allocation> parse_allocation_list(const json& doc, const Instance& inst);

// {"<agent id>": [["0", "1"], ["1/2", "0"]], ...}: segments of [start, rate].
EatingRates parse_rates(const json& doc, const Instance& inst);

std::vector<int> parse_order(const std::string& text, const Instance& inst);

json trace_json(const VerResult& result, const Instance& inst);
json lottery_json(const std::vector<LotteryTerm>& terms, const Instance& inst);

std::string read_file(const std::string& path);

} // namespace vigil::io
