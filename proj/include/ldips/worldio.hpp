#pragma once

#include <string>
#include <vector>

#include "ldips/ast.hpp"
#include "ldips/domain.hpp"
#include "ldips/interp.hpp"

namespace ldips {

// Domain files are JSON objects:
//   {"name": ..., "actions": [...], "default_action": ...,
//    "inputs": [{"name": ..., "kind": "scalar"|"vector", "dim": [l,t,m]}],
//    "operators": [...], "constants": [{"value": x, "dim": [l,t,m]}]}
DomainDef parse_domain(const std::string& json_text, const OpRegistry& registry = builtin_registry());
DomainDef load_domain(const std::string& path, const OpRegistry& registry = builtin_registry());
std::string domain_to_json(const DomainDef& d);

// One JSON object per line:
//   {"start": A, "next": B, "world": {"p_r": [x, y], "speed": s, ...}}
// A binding may also be {"value": ..., "dim": [l,t,m]}; the dim must match.
Demonstration parse_demo(const std::string& line, const DomainDef& domain, std::size_t line_no = 1);
std::vector<Demonstration> parse_demos(const std::string& text, const DomainDef& domain);
std::vector<Demonstration> load_demos(const std::string& path, const DomainDef& domain);
std::string demo_to_json(const Demonstration& d, const DomainDef& domain);
void save_demos(const std::vector<Demonstration>& demos, const DomainDef& domain, const std::string& path);

// Policy files hold exactly the printer's output.
void save_policy(const Policy& p, const std::string& path, const OpRegistry& ops = builtin_registry());
// Parses and type-checks.
Policy load_policy(const std::string& path, const DomainDef& domain);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace ldips
