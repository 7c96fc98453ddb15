#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "wsnkm/simnet.hpp"

// Scenario files: the simulation inputs plus an ordered event script.
// Integers that can exceed 64 bits (p, q, dh_q) may be decimal strings.

namespace wsnkm::simnet {

struct ScenarioEvent {
    std::string op; // add | revoke | compromise | rekey
    Bytes id;
    double x = 0, y = 0;
    uint32_t subnet = 0;
    bool has_subnet = false;
    bool provisioned = true;
};

struct Scenario {
    Config config;
    std::vector<ScenarioEvent> events;
};

namespace detail {

inline mpz_class json_mpz(const nlohmann::json& v, const char* field) {
    if (v.is_string()) return mpz_class(v.get<std::string>());
    if (v.is_number_unsigned()) return mpz_class(v.get<uint64_t>());
    if (v.is_number_integer()) {
        int64_t s = v.get<int64_t>();
        if (s < 0) throw ConfigError(std::string("scenario: ") + field + " must be >= 0");
        return mpz_class(static_cast<uint64_t>(s));
    }
    throw ConfigError(std::string("scenario: ") + field + " must be an integer or string");
}

} // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
    Scenario sc;
    try {
        if (j.contains("seed")) sc.config.seed = j.at("seed").get<uint64_t>();
        if (j.contains("p")) sc.config.p = detail::json_mpz(j.at("p"), "p");
        if (j.contains("q")) sc.config.q = detail::json_mpz(j.at("q"), "q");
        if (j.contains("n")) sc.config.n_bits = j.at("n").get<uint32_t>();
        sc.config.dh_q = j.contains("dh_q") ? detail::json_mpz(j.at("dh_q"), "dh_q")
                                            : sc.config.q; // the literal reading: DH mod q
        if (j.contains("node_count")) sc.config.node_count = j.at("node_count").get<uint32_t>();
        if (j.contains("subnet_count"))
            sc.config.subnet_count = j.at("subnet_count").get<uint32_t>();
        if (j.contains("range")) sc.config.range = j.at("range").get<double>();

        for (const auto& e : j.value("events", nlohmann::json::array())) {
            ScenarioEvent ev;
            ev.op = e.at("op").get<std::string>();
            if (e.contains("id")) ev.id = to_bytes(e.at("id").get<std::string>());
            if (e.contains("x")) ev.x = e.at("x").get<double>();
            if (e.contains("y")) ev.y = e.at("y").get<double>();
            if (e.contains("subnet")) {
                ev.subnet = e.at("subnet").get<uint32_t>();
                ev.has_subnet = true;
            }
            ev.provisioned = e.value("provisioned", true);
            if (ev.op != "add" && ev.op != "revoke" && ev.op != "compromise" &&
                ev.op != "rekey")
                throw ConfigError("scenario: unknown op '" + ev.op + "'");
            sc.events.push_back(std::move(ev));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: parse error: ") + e.what());
    }
    return parse_scenario(j);
}

inline void apply_event(NetworkState& net, const ScenarioEvent& ev) {
    if (ev.op == "add") {
        if (!ev.has_subnet) throw ConfigError("scenario: add event needs a subnet");
        add_node(net, ev.id, ev.x, ev.y, ev.subnet, ev.provisioned);
    } else if (ev.op == "revoke") {
        revoke_node(net, ev.id);
    } else if (ev.op == "compromise") {
        // either an explicit head id or "the current head of subnet k"
        Bytes target = ev.id;
        if (target.empty()) {
            if (!ev.has_subnet)
                throw ConfigError("scenario: compromise event needs an id or a subnet");
            target = net.subnets().at(ev.subnet).head;
        }
        compromise_and_recover(net, target);
    } else if (ev.op == "rekey") {
        if (!ev.has_subnet) throw ConfigError("scenario: rekey event needs a subnet");
        periodic_rekey(net, ev.subnet);
    }
}

// Full lifecycle: init, elect, bootstrap, then the scripted events.
inline NetworkState run_scenario(const Scenario& sc) {
    NetworkState net = init_network(sc.config);
    elect_cluster_heads(net);
    run_initialization(net);
    for (const ScenarioEvent& ev : sc.events) apply_event(net, ev);
    return net;
}

} // namespace wsnkm::simnet
