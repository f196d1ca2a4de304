#include "ldips/worldio.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ldips/errors.hpp"
#include "ldips/parser.hpp"
#include "ldips/printer.hpp"
#include "ldips/typecheck.hpp"

namespace ldips {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& msg) {
    throw SchemaError(SchemaError::Kind::Schema, where, where + ": " + msg);
}

Dimension parse_dim(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) schema(where, "dimension must be an array of 3 integers");
    std::array<int, 3> e{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!j[i].is_number_integer()) schema(where, "dimension exponents must be integers");
        e[i] = j[i].get<int>();
    }
    return {e[0], e[1], e[2]};
}

json dim_json(Dimension d) { return json::array({d.length(), d.time(), d.mass()}); }

const std::string& get_string(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) schema(where + "." + key, "expected a string");
    return it->get_ref<const std::string&>();
}

bool is_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

}  // namespace

DomainDef parse_domain(const std::string& text, const OpRegistry& registry) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        schema("domain", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) schema("domain", "expected an object");
    DomainDef d;
    d.name = j.contains("name") ? get_string(j, "name", "domain") : std::string("domain");

    if (!j.contains("actions") || !j["actions"].is_array() || j["actions"].empty())
        schema("domain.actions", "expected a nonempty array of action names");
    std::set<std::string> seen;
    for (const json& a : j["actions"]) {
        if (!a.is_string() || !is_identifier(a.get<std::string>())) schema("domain.actions", "action names must be identifiers");
        const std::string n = a.get<std::string>();
        if (n == kStartActionName) schema("domain.actions", "'a_s' is reserved");
        if (!seen.insert(n).second) schema("domain.actions", "duplicate action '" + n + "'");
        d.actions.push_back(n);
    }
    d.default_action = get_string(j, "default_action", "domain");
    if (!d.has_action(d.default_action))
        schema("domain.default_action", "'" + d.default_action + "' is not one of the actions");

    if (!j.contains("inputs") || !j["inputs"].is_array()) schema("domain.inputs", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < j["inputs"].size(); ++i) {
        const json& in = j["inputs"][i];
        const std::string where = "domain.inputs[" + std::to_string(i) + "]";
        if (!in.is_object()) schema(where, "expected an object");
        const std::string& name = get_string(in, "name", where);
        if (!is_identifier(name) || name == kStartActionName) schema(where + ".name", "invalid input name '" + name + "'");
        if (!names.insert(name).second) schema(where + ".name", "duplicate input '" + name + "'");
        const std::string& kind = get_string(in, "kind", where);
        if (!in.contains("dim")) schema(where + ".dim", "missing");
        const Dimension dim = parse_dim(in["dim"], where + ".dim");
        if (kind == "scalar")
            d.inputs.push_back({name, ValueType::scalar(dim)});
        else if (kind == "vector")
            d.inputs.push_back({name, ValueType::vector(dim)});
        else
            schema(where + ".kind", "expected \"scalar\" or \"vector\"");
    }

    if (j.contains("operators")) {
        if (!j["operators"].is_array()) schema("domain.operators", "expected an array");
        for (const json& o : j["operators"]) {
            if (!o.is_string()) schema("domain.operators", "operator names must be strings");
            const std::string n = o.get<std::string>();
            if (!registry.find(n))
                throw SchemaError(SchemaError::Kind::UnknownOperator, "domain.operators",
                                  "domain.operators: unknown operator '" + n + "'");
            if (std::find(d.operators.begin(), d.operators.end(), n) == d.operators.end()) d.operators.push_back(n);
        }
    } else {
        for (const OpSignature& op : registry.ops()) d.operators.push_back(op.name);
    }

    if (j.contains("constants")) {
        if (!j["constants"].is_array()) schema("domain.constants", "expected an array");
        for (std::size_t i = 0; i < j["constants"].size(); ++i) {
            const json& c = j["constants"][i];
            const std::string where = "domain.constants[" + std::to_string(i) + "]";
            if (!c.is_object() || !c.contains("value") || !c["value"].is_number()) schema(where, "expected {value, dim}");
            Dimension dim;
            if (c.contains("dim")) dim = parse_dim(c["dim"], where + ".dim");
            d.constants.push_back({c["value"].get<double>(), dim});
        }
    }
    return d;
}

DomainDef load_domain(const std::string& path, const OpRegistry& registry) {
    return parse_domain(read_file(path), registry);
}

std::string domain_to_json(const DomainDef& d) {
    json j;
    j["name"] = d.name;
    j["actions"] = d.actions;
    j["default_action"] = d.default_action;
    j["inputs"] = json::array();
    for (const InputDecl& in : d.inputs)
        j["inputs"].push_back({{"name", in.name}, {"kind", in.type.is_vector() ? "vector" : "scalar"}, {"dim", dim_json(in.type.dim)}});
    j["operators"] = d.operators;
    if (!d.constants.empty()) {
        j["constants"] = json::array();
        for (const ConstantDecl& c : d.constants) j["constants"].push_back({{"value", c.value}, {"dim", dim_json(c.dim)}});
    }
    return j.dump(2) + "\n";
}

Demonstration parse_demo(const std::string& line, const DomainDef& domain, std::size_t line_no) {
    const std::string where = "line " + std::to_string(line_no);
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        schema(where, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) schema(where, "expected an object");
    Demonstration d;
    d.start_action = get_string(j, "start", where);
    d.next_action = get_string(j, "next", where);
    if (!domain.has_action(d.start_action)) schema(where + ".start", "unknown action '" + d.start_action + "'");
    if (!domain.has_action(d.next_action)) schema(where + ".next", "unknown action '" + d.next_action + "'");
    if (!j.contains("world") || !j["world"].is_object()) schema(where + ".world", "expected an object");
    const json& w = j["world"];
    d.world.start_action = d.start_action;
    for (auto it = w.begin(); it != w.end(); ++it)
        if (!domain.find_input(it.key())) schema(where + ".world", "unknown input '" + it.key() + "'");
    for (const InputDecl& in : domain.inputs) {
        const std::string at = where + ".world." + in.name;
        if (!w.contains(in.name)) schema(at, "missing");
        const json* v = &w[in.name];
        if (v->is_object()) {
            if (v->contains("dim")) {
                const Dimension dim = parse_dim((*v)["dim"], at + ".dim");
                if (dim != in.type.dim)
                    throw SchemaError(SchemaError::Kind::DimensionMismatch, at,
                                      at + ": dimension " + to_string(dim) + " does not match declared " +
                                          to_string(in.type.dim));
            }
            if (!v->contains("value")) schema(at, "expected a value");
            v = &(*v)["value"];
        }
        if (in.type.is_vector()) {
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
                schema(at, "expected a 2-vector");
            d.world.bindings[in.name] = Value::vec((*v)[0].get<double>(), (*v)[1].get<double>());
        } else {
            if (!v->is_number()) schema(at, "expected a scalar");
            d.world.bindings[in.name] = Value::scalar(v->get<double>());
        }
    }
    return d;
}

std::vector<Demonstration> parse_demos(const std::string& text, const DomainDef& domain) {
    std::vector<Demonstration> out;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(parse_demo(line, domain, n));
    }
    return out;
}

std::vector<Demonstration> load_demos(const std::string& path, const DomainDef& domain) {
    return parse_demos(read_file(path), domain);
}

std::string demo_to_json(const Demonstration& d, const DomainDef& domain) {
    json j;
    j["start"] = d.start_action;
    j["next"] = d.next_action;
    json w = json::object();
    for (const InputDecl& in : domain.inputs) {
        auto it = d.world.bindings.find(in.name);
        if (it == d.world.bindings.end()) continue;
        if (in.type.is_vector())
            w[in.name] = json::array({it->second.x, it->second.y});
        else
            w[in.name] = it->second.x;
    }
    j["world"] = w;
    return j.dump();
}

void save_demos(const std::vector<Demonstration>& demos, const DomainDef& domain, const std::string& path) {
    std::string text;
    for (const Demonstration& d : demos) text += demo_to_json(d, domain) + "\n";
    write_file(path, text);
}

void save_policy(const Policy& p, const std::string& path, const OpRegistry& ops) {
    write_file(path, print_policy(p, ops));
}

Policy load_policy(const std::string& path, const DomainDef& domain) {
    const TypeEnv env = make_env(domain);
    Policy p = parse_policy(read_file(path), env);
    check_policy(p, env);
    return p;
}

}  // namespace ldips
