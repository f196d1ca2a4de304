#pragma once

#include <random>
#include <string>

#include "ldips/domain.hpp"
#include "ldips/interp.hpp"
#include "ldips/parser.hpp"
#include "ldips/worldio.hpp"

namespace testing_support {

inline std::string data(const std::string& name) { return std::string(LDIPS_DATA_DIR) + "/" + name; }

inline const ldips::DomainDef& soccer() {
    static const ldips::DomainDef d = ldips::load_domain(data("soccer.domain.json"));
    return d;
}

inline const ldips::TypeEnv& soccer_env() {
    static const ldips::TypeEnv env = ldips::make_env(soccer());
    return env;
}

inline ldips::WorldState world(const std::string& start, ldips::Value pr, ldips::Value vr, ldips::Value pb,
                               ldips::Value vb) {
    ldips::WorldState w;
    w.start_action = start;
    w.bindings["p_r"] = pr;
    w.bindings["v_r"] = vr;
    w.bindings["p_b"] = pb;
    w.bindings["v_b"] = vb;
    return w;
}

inline ldips::WorldState random_world(std::mt19937_64& rng, const std::string& start = "Goto") {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto v = [&] { return ldips::Value::vec(u(rng), u(rng)); };
    return world(start, v(), v(), v(), v());
}

}  // namespace testing_support
