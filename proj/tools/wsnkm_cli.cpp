// Command-line front end: IBE and negotiation demos, scenario-driven
// simulation, and the overhead-comparison CSV generator.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wsnkm/metrics.hpp"
#include "wsnkm/scenario.hpp"

using namespace wsnkm;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCrypto = 3;
constexpr int kExitSim = 4;
constexpr int kExitIo = 5;

void echo_seed(uint64_t seed) { std::cerr << "seed=" << seed << "\n"; }

std::string point_str(const CurvePoint& p) {
    if (p.is_infinity()) return "inf";
    return "(" + p.x().value().get_str() + "," + p.y().value().get_str() + ")";
}

int run_ibe_demo(const std::string& p_str, const std::string& q_str, uint32_t n,
                 uint64_t seed, const std::string& id_str) {
    echo_seed(seed);
    auto [params, msk] = ibe::setup(mpz_class(p_str), mpz_class(q_str), n, seed);
    std::cout << "params p=" << params.curve.p << " q=" << params.curve.q
              << " n=" << params.n_bits << " hash=" << params.hash_name << "\n";
    std::cout << "generator P=" << point_str(params.curve.generator) << "\n";
    std::cout << "master s=" << msk.s << "\n";
    std::cout << "P_pub=" << point_str(params.p_pub) << "\n";

    Bytes id = to_bytes(id_str);
    ibe::PrivateKey sk = ibe::extract(msk, id, params);
    std::cout << "id=" << id_str << "\n";
    std::cout << "Q_id=" << point_str(ibe::h1_map_to_point(id, params.curve)) << "\n";
    std::cout << "K_id=" << point_str(sk.point) << "\n";

    Drbg rng = Drbg(seed).derive("demo");
    Bytes message = rng.next_bytes(params.n_bytes());
    std::cout << "message=" << to_hex(message) << "\n";
    ibe::Ciphertext ct = ibe::encrypt(params, id, message, rng);
    std::cout << "U=" << point_str(ct.u) << "\n";
    std::cout << "V=" << to_hex(ct.v) << "\n";
    std::cout << "ciphertext=" << to_hex(ct.serialize()) << "\n";
    Bytes plain = ibe::decrypt(sk, ct, params);
    std::cout << "decrypted=" << to_hex(plain) << "\n";
    std::cout << "roundtrip=" << (plain == message ? "ok" : "MISMATCH") << "\n";
    return plain == message ? 0 : kExitCrypto;
}

int run_negotiate_demo(uint64_t seed) {
    echo_seed(seed);
    auto [params, msk] = ibe::setup(1019, 17, 256, seed);
    keyex::DhGroup group = keyex::make_group(2147483659);
    std::cout << "dh q=" << group.q << " eta=" << group.generator << "\n";

    Bytes head_id = to_bytes("H1"), node_id = to_bytes("N7");
    ibe::PrivateKey head_key = ibe::extract(msk, head_id, params);
    ibe::PrivateKey node_key = ibe::extract(msk, node_id, params);

    Drbg head_rng = Drbg(seed).derive("head");
    Drbg node_rng = Drbg(seed).derive("node");
    protocol::NegotiationState head(protocol::Role::Head, head_id);
    protocol::NegotiationState node(protocol::Role::Node, node_id);

    auto broadcast = protocol::head_broadcast(head, 1);
    std::cout << "broadcast=" << to_hex(broadcast.serialize()) << "\n";
    auto response = protocol::respond_to_broadcast(node, broadcast, params, group, node_rng);
    std::cout << "response=" << to_hex(response.serialize()) << "\n";
    auto [reply, head_session] =
        protocol::head_handle_response(head, response, head_key, params, group, head_rng);
    std::cout << "reply=" << to_hex(reply.serialize()) << "\n";
    keyex::SessionKey node_session =
        protocol::finalize_session(node, reply, node_key, params, group);

    std::cout << "head_key="
              << to_hex(Bytes(head_session.derived.begin(), head_session.derived.end()))
              << "\n";
    std::cout << "node_key="
              << to_hex(Bytes(node_session.derived.begin(), node_session.derived.end()))
              << "\n";
    std::cout << "agreed=" << (head_session.same_key(node_session) ? "ok" : "MISMATCH")
              << "\n";
    return head_session.same_key(node_session) ? 0 : kExitCrypto;
}

int run_simulate(const std::string& scenario_path, std::optional<uint64_t> seed_override,
                 const std::string& out_path) {
    simnet::Scenario sc = simnet::load_scenario(scenario_path);
    if (seed_override) sc.config.seed = *seed_override;
    echo_seed(sc.config.seed);
    simnet::NetworkState net = simnet::run_scenario(sc);

    std::ostringstream body;
    for (const auto& line : net.event_log()) body << line << "\n";
    if (out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error("cannot open output file: " + out_path);
        out << body.str();
        if (!out) throw Error("write failed: " + out_path);
    }
    return 0;
}

// "a..b" or a single integer
std::pair<uint64_t, uint64_t> parse_range(const std::string& s) {
    auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            uint64_t v = std::stoull(s);
            return {v, v};
        }
        uint64_t lo = std::stoull(s.substr(0, dots));
        uint64_t hi = std::stoull(s.substr(dots + 2));
        if (lo == 0 || hi < lo) throw ConfigError("bad range: " + s);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw ConfigError("bad range: " + s);
    }
}

int run_metrics(const std::string& m_range, const std::string& n_range,
                const std::string& out_path, const std::string& cross_check_path) {
    auto [mlo, mhi] = parse_range(m_range);
    auto [nlo, nhi] = parse_range(n_range);
    std::vector<uint64_t> ms, ns;
    for (uint64_t m = mlo; m <= mhi; ++m) ms.push_back(m);
    for (uint64_t n = nlo; n <= nhi; ++n) ns.push_back(n);

    std::optional<metrics::SimCrossCheck> sim;
    uint64_t seed = 0;
    if (!cross_check_path.empty()) {
        simnet::Scenario sc = simnet::load_scenario(cross_check_path);
        seed = sc.config.seed;
        simnet::NetworkState net = simnet::run_scenario(sc);
        metrics::SimCrossCheck cc;
        for (const auto& sn : net.subnets())
            cc.members_per_subnet.push_back(sn.members.size());
        cc.counted_negotiations = simnet::count_negotiation_events(net.event_log());
        sim = cc;
    }
    echo_seed(seed);

    std::ostringstream body;
    metrics::emit_report(ms, ns, metrics::all_schemes(), body, metrics::CostModel{}, sim);
    if (out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error("cannot open output file: " + out_path);
        out << body.str();
        if (!out) throw Error("write failed: " + out_path);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"identity-based key management for hierarchical sensor networks"};
    app.require_subcommand(1);

    auto* ibe_demo = app.add_subcommand("ibe-demo", "setup/extract/encrypt/decrypt transcript");
    std::string p = "11", q = "3", id = "alice";
    uint32_t n = 16;
    uint64_t seed = 42;
    ibe_demo->add_option("--p", p, "field prime (p = 2 mod 3)");
    ibe_demo->add_option("--q", q, "subgroup order (prime divisor of p+1)");
    ibe_demo->add_option("--n", n, "plaintext bits (multiple of 8)");
    ibe_demo->add_option("--seed", seed, "random seed");
    ibe_demo->add_option("--id", id, "identity string");

    auto* nego = app.add_subcommand("negotiate-demo", "one full key negotiation");
    uint64_t nego_seed = 0;
    nego->add_option("--seed", nego_seed, "random seed");

    auto* sim = app.add_subcommand("simulate", "run a scenario file, print the event log");
    std::string scenario, sim_out;
    std::optional<uint64_t> sim_seed;
    sim->add_option("--scenario", scenario, "scenario JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    sim->add_option("--seed", sim_seed, "override the scenario seed");
    sim->add_option("--out", sim_out, "write the event log here instead of stdout");

    auto* met = app.add_subcommand("metrics", "overhead comparison CSV");
    std::string m_range = "1..50", n_range = "1", met_out, cross_check;
    met->add_option("--m", m_range, "sub-network size or range, e.g. 10 or 1..50");
    met->add_option("--subnets", n_range, "sub-network count or range");
    met->add_option("--out", met_out, "write the CSV here instead of stdout");
    met->add_option("--cross-check", cross_check,
                    "scenario whose counted negotiations are added as a column")
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
        if (*ibe_demo) return run_ibe_demo(p, q, n, seed, id);
        if (*nego) return run_negotiate_demo(nego_seed);
        if (*sim) return run_simulate(scenario, sim_seed, sim_out);
        if (*met) return run_metrics(m_range, n_range, met_out, cross_check);
        return kExitUsage;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CryptoError& e) {
        std::cerr << "crypto error: " << e.what() << "\n";
        return kExitCrypto;
    } catch (const SimError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitSim;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
