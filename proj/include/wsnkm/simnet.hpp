#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wsnkm/protocol.hpp"

// Deterministic single-threaded simulation of the hierarchical network
// lifecycle: placement, cluster-head election, per-subnet key distribution,
// node addition/revocation, head-compromise recovery and periodic re-keying.
// Every random draw comes from a stream derived from (seed, subnet, epoch)
// or (seed, subnet, event counter), so subnet histories are independent and
// a run replays byte-for-byte from its inputs.

namespace wsnkm::simnet {

enum class NodeRole { BaseStation, ClusterHead, Sensor };

struct Config {
    uint64_t seed = 0;
    mpz_class p = 1019;
    mpz_class q = 17;
    uint32_t n_bits = 256;
    mpz_class dh_q = 2147483659; // DH modulus; may differ from q on toy curves
    uint32_t node_count = 100;
    uint32_t subnet_count = 5;
    double range = 0.75; // unit-square distance a head can cover
};

struct NodeRecord {
    Bytes id;
    double x = 0, y = 0;
    NodeRole role = NodeRole::Sensor;
    int subnet = -1;
    ibe::PrivateKey embedded_key;              // under the global params (ROM)
    std::optional<ibe::PrivateKey> subnet_key; // current-epoch subnet credential
    std::optional<CurvePoint> subnet_p_pub;
    std::map<Bytes, keyex::SessionKey> sessions;
    bool compromised = false;
    bool revoked = false;

    // Deterministic dump used for isolation and confinement checks.
    std::string debug_string() const;
};

struct SubnetState {
    Bytes head;
    std::set<Bytes> members; // excludes the head
    ibe::MasterKey master;   // s_i, held by the head in its PKG role
    CurvePoint p_pub;        // s_i * P
    uint32_t epoch = 0;

    std::string debug_string() const;
};

inline const Bytes kBaseStationId = to_bytes("BS");

namespace detail {

inline std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline double dist(double ax, double ay, double bx, double by) {
    return std::hypot(ax - bx, ay - by);
}

// Grid of exactly n cells: the factor pair r x c = n with r <= c and r as
// close to sqrt(n) as possible (a 1 x n strip when n is prime).
inline std::pair<uint32_t, uint32_t> grid_dims(uint32_t n) {
    uint32_t best = 1;
    for (uint32_t r = 1; r * r <= n; ++r)
        if (n % r == 0) best = r;
    return {best, n / best};
}

inline double cell_diagonal(uint32_t n) {
    auto [rows, cols] = grid_dims(n);
    return std::hypot(1.0 / rows, 1.0 / cols);
}

inline std::string id_str(const Bytes& id) { return to_string(id); }

} // namespace detail

inline std::string NodeRecord::debug_string() const {
    std::ostringstream os;
    os << "node id=" << detail::id_str(id) << " pos=(" << detail::fmt6(x) << ','
       << detail::fmt6(y) << ")" << " role="
       << (role == NodeRole::BaseStation ? "bs"
                                         : role == NodeRole::ClusterHead ? "head" : "sensor")
       << " subnet=" << subnet << " compromised=" << compromised << " revoked=" << revoked;
    os << " embedded=" << to_hex(embedded_key.point.serialize());
    os << " subnet_key=" << (subnet_key ? to_hex(subnet_key->point.serialize()) : "-");
    os << " subnet_ppub=" << (subnet_p_pub ? to_hex(subnet_p_pub->serialize()) : "-");
    os << " sessions=[";
    for (const auto& [peer, key] : sessions)
        os << detail::id_str(peer) << ":e" << key.epoch << ':'
           << to_hex(Bytes(key.derived.begin(), key.derived.end())) << ';';
    os << "]";
    return os.str();
}

inline std::string SubnetState::debug_string() const {
    std::ostringstream os;
    os << "subnet head=" << detail::id_str(head) << " epoch=" << epoch << " s_i=" << master.s
       << " p_pub=" << to_hex(p_pub.serialize()) << " members=[";
    for (const auto& m : members) os << detail::id_str(m) << ';';
    os << "]";
    return os.str();
}

class NetworkState {
public:
    NetworkState(Config config, ibe::PublicParams params, ibe::MasterKey msk)
        : cfg_(std::move(config)), params_(std::move(params)), msk_(std::move(msk)),
          group_(keyex::make_group(cfg_.dh_q)) {}

    const Config& config() const { return cfg_; }
    const ibe::PublicParams& global_params() const { return params_; }
    const keyex::DhGroup& dh_group() const { return group_; }
    const std::vector<std::string>& event_log() const { return log_; }
    const std::vector<Bytes>& revocation_list() const { return revoked_; }

    const std::map<Bytes, NodeRecord>& nodes() const { return nodes_; }
    const std::vector<SubnetState>& subnets() const { return subnets_; }
    const NodeRecord& node(const Bytes& id) const;
    uint64_t negotiations_completed() const { return negotiations_; }

    friend NetworkState init_network(const Config& cfg);
    friend void elect_cluster_heads(NetworkState& net);
    friend void run_initialization(NetworkState& net);
    friend bool add_node(NetworkState& net, const Bytes& id, double x, double y,
                         uint32_t subnet, bool provisioned);
    friend void revoke_node(NetworkState& net, const Bytes& id);
    friend void compromise_and_recover(NetworkState& net, const Bytes& head_id);
    friend void periodic_rekey(NetworkState& net, uint32_t subnet);

private:
    NodeRecord& node_mut(const Bytes& id);
    Drbg subnet_stream(uint32_t subnet, uint32_t epoch) const;
    Drbg event_stream(uint32_t subnet, const std::string& kind);
    void log_line(const std::string& line) { log_.push_back(line); }

    keyex::SessionKey run_exchange(protocol::NegotiationState& head_state,
                                   const protocol::NegotiationMessage& broadcast,
                                   NodeRecord& head, NodeRecord& peer,
                                   const ibe::PrivateKey& head_key,
                                   const ibe::PrivateKey& peer_key,
                                   const ibe::PublicParams& params, Drbg& rng);
    void distribute_subnet_keys(uint32_t subnet, Drbg& rng);
    void negotiate_subnet(uint32_t subnet, const ibe::PublicParams& params,
                          bool use_embedded_keys, Drbg& rng);

    ibe::PublicParams subnet_params(const SubnetState& sn) const {
        return ibe::PublicParams{params_.curve, sn.p_pub, params_.n_bits, params_.hash_name};
    }

    Config cfg_;
    ibe::PublicParams params_; // global, embedded in every node's ROM
    ibe::MasterKey msk_;       // global master key, base-station side only
    keyex::DhGroup group_;
    std::map<Bytes, NodeRecord> nodes_;
    std::vector<SubnetState> subnets_;
    std::vector<Bytes> revoked_;
    std::vector<std::string> log_;
    std::map<uint32_t, std::map<std::string, uint32_t>> event_counters_;
    uint64_t negotiations_ = 0;
};

inline const NodeRecord& NetworkState::node(const Bytes& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw SimError("unknown node id: " + detail::id_str(id));
    return it->second;
}

inline NodeRecord& NetworkState::node_mut(const Bytes& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw SimError("unknown node id: " + detail::id_str(id));
    return it->second;
}

inline Drbg NetworkState::subnet_stream(uint32_t subnet, uint32_t epoch) const {
    std::ostringstream label;
    label << "subnet-" << subnet << "-epoch-" << epoch;
    return Drbg(cfg_.seed).derive(label.str());
}

inline Drbg NetworkState::event_stream(uint32_t subnet, const std::string& kind) {
    uint32_t counter = event_counters_[subnet][kind]++;
    std::ostringstream label;
    label << "subnet-" << subnet << "-" << kind << "-" << counter;
    return Drbg(cfg_.seed).derive(label.str());
}

// Place the nodes, extract everyone's ROM credential, put the base station
// in the center.  No subnets exist yet.
inline NetworkState init_network(const Config& cfg) {
    if (cfg.node_count < 2) throw ConfigError("init_network: need at least 2 nodes");
    if (cfg.subnet_count < 1 || cfg.subnet_count >= cfg.node_count)
        throw ConfigError("init_network: subnet count must be in [1, node_count)");
    if (!(cfg.range > 0)) throw ConfigError("init_network: range must be positive");
    // simulation profiles need a non-trivial DH group; toy curve orders must
    // come with a separately configured DH prime
    if (cfg.dh_q < mpz_class(1) << 31)
        throw ConfigError("init_network: dh_q must be >= 2^31 (set dh_q when q is small)");

    auto [params, msk] = ibe::setup(cfg.p, cfg.q, cfg.n_bits, cfg.seed);
    NetworkState net(cfg, params, msk);

    Drbg placement = Drbg(cfg.seed).derive("placement");
    auto make_node = [&](const Bytes& id, double x, double y, NodeRole role) {
        NodeRecord rec;
        rec.id = id;
        rec.x = x;
        rec.y = y;
        rec.role = role;
        rec.embedded_key = ibe::extract(net.msk_, id, net.params_);
        net.nodes_.emplace(id, std::move(rec));
    };

    make_node(kBaseStationId, 0.5, 0.5, NodeRole::BaseStation);
    for (uint32_t i = 0; i < cfg.node_count; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "N%03u", i);
        double px = placement.unit_double();
        double py = placement.unit_double();
        make_node(to_bytes(buf), px, py, NodeRole::Sensor);
    }

    std::ostringstream line;
    line << "init seed=" << cfg.seed << " p=" << cfg.p << " q=" << cfg.q << " n=" << cfg.n_bits
         << " dh_q=" << cfg.dh_q << " nodes=" << cfg.node_count
         << " subnets=" << cfg.subnet_count << " range=" << detail::fmt6(cfg.range);
    net.log_line(line.str());
    return net;
}

// Partition the unit square into a grid, make the node nearest each cell
// center a head, then assign every sensor to its nearest head.  An empty
// cell forces a re-partition with fewer cells, which is reported.
inline void elect_cluster_heads(NetworkState& net) {
    if (!net.subnets_.empty()) throw SimError("elect_cluster_heads: already elected");

    std::vector<const NodeRecord*> sensors;
    for (const auto& [id, rec] : net.nodes_)
        if (rec.role == NodeRole::Sensor) sensors.push_back(&rec);
    if (sensors.empty()) throw SimError("elect_cluster_heads: no sensors");

    uint32_t want = net.cfg_.subnet_count;
    std::vector<Bytes> heads;
    for (uint32_t cells = want;; --cells) {
        heads.clear();
        auto [rows, cols] = detail::grid_dims(cells);
        bool ok = true;
        for (uint32_t r = 0; r < rows && ok; ++r) {
            for (uint32_t c = 0; c < cols && ok; ++c) {
                double cx = (c + 0.5) / cols;
                double cy = (r + 0.5) / rows;
                const NodeRecord* best = nullptr;
                double best_d = 0;
                for (const NodeRecord* s : sensors) {
                    bool inside = s->x * cols >= c && s->x * cols < c + 1 &&
                                  s->y * rows >= r && s->y * rows < r + 1;
                    if (!inside) continue;
                    double d = detail::dist(s->x, s->y, cx, cy);
                    if (!best || d < best_d || (d == best_d && s->id < best->id)) {
                        best = s;
                        best_d = d;
                    }
                }
                if (!best) ok = false;
                else heads.push_back(best->id);
            }
        }
        if (ok) {
            if (cells != want) {
                std::ostringstream line;
                line << "elect-repartition requested=" << want << " actual=" << cells;
                net.log_line(line.str());
            }
            break;
        }
        if (cells == 1) throw SimError("elect_cluster_heads: empty partition cell");
    }

    std::sort(heads.begin(), heads.end());
    net.subnets_.resize(heads.size());
    for (uint32_t i = 0; i < heads.size(); ++i) {
        net.subnets_[i].head = heads[i];
        NodeRecord& rec = net.node_mut(heads[i]);
        rec.role = NodeRole::ClusterHead;
        rec.subnet = static_cast<int>(i);
    }

    // Every remaining sensor joins the nearest head's territory.
    for (auto& [id, rec] : net.nodes_) {
        if (rec.role != NodeRole::Sensor) continue;
        int best = -1;
        double best_d = 0;
        for (uint32_t i = 0; i < net.subnets_.size(); ++i) {
            const NodeRecord& head = net.node(net.subnets_[i].head);
            double d = detail::dist(rec.x, rec.y, head.x, head.y);
            if (best < 0 || d < best_d) {
                best = static_cast<int>(i);
                best_d = d;
            }
        }
        rec.subnet = best;
        net.subnets_[static_cast<uint32_t>(best)].members.insert(id);
    }

    for (uint32_t i = 0; i < net.subnets_.size(); ++i) {
        std::ostringstream line;
        line << "elect subnet=" << i << " head=" << detail::id_str(net.subnets_[i].head)
             << " members=" << net.subnets_[i].members.size();
        net.log_line(line.str());
    }
}

inline keyex::SessionKey NetworkState::run_exchange(
    protocol::NegotiationState& head_state, const protocol::NegotiationMessage& broadcast,
    NodeRecord& head, NodeRecord& peer, const ibe::PrivateKey& head_key,
    const ibe::PrivateKey& peer_key, const ibe::PublicParams& params, Drbg& rng) {
    protocol::NegotiationState peer_state(peer.role == NodeRole::BaseStation
                                              ? protocol::Role::BaseStation
                                              : protocol::Role::Node,
                                          peer.id);
    auto response = protocol::respond_to_broadcast(peer_state, broadcast, params, group_, rng);
    auto [reply, head_session] =
        protocol::head_handle_response(head_state, response, head_key, params, group_, rng);
    keyex::SessionKey peer_session =
        protocol::finalize_session(peer_state, reply, peer_key, params, group_);
    if (!head_session.same_key(peer_session))
        throw SimError("negotiation endpoints derived different keys");
    head.sessions.insert_or_assign(peer.id, head_session);
    peer.sessions.insert_or_assign(head.id, peer_session);
    ++negotiations_;
    return head_session;
}

// Head negotiates with the base station and then with every member, in id
// order: M + 1 exchanges for a territory of M members.
inline void NetworkState::negotiate_subnet(uint32_t subnet, const ibe::PublicParams& params,
                                           bool use_embedded_keys, Drbg& rng) {
    SubnetState& sn = subnets_.at(subnet);
    NodeRecord& head = node_mut(sn.head);
    const ibe::PrivateKey& head_key =
        use_embedded_keys ? head.embedded_key : head.subnet_key.value();

    protocol::NegotiationState head_state(protocol::Role::Head, head.id);
    auto broadcast = protocol::head_broadcast(head_state, sn.epoch);

    std::vector<Bytes> peers;
    peers.push_back(kBaseStationId);
    peers.insert(peers.end(), sn.members.begin(), sn.members.end());
    for (const Bytes& peer_id : peers) {
        NodeRecord& peer = node_mut(peer_id);
        // The base station holds only its ROM credential, so its exchange
        // always runs under the global PKG, both directions.
        bool bs = peer.role == NodeRole::BaseStation;
        const ibe::PublicParams& xparams = bs ? params_ : params;
        const ibe::PrivateKey& xhead_key = bs ? head.embedded_key : head_key;
        const ibe::PrivateKey& peer_key =
            (bs || use_embedded_keys) ? peer.embedded_key : peer.subnet_key.value();
        run_exchange(head_state, broadcast, head, peer, xhead_key, peer_key, xparams, rng);
        std::ostringstream line;
        line << "negotiate subnet=" << subnet << " epoch=" << sn.epoch
             << " head=" << detail::id_str(head.id) << " peer=" << detail::id_str(peer_id)
             << " status=ok";
        log_line(line.str());
    }
}

// P_pub_i || K_id, length-prefixed, sealed under each member's session key.
inline void NetworkState::distribute_subnet_keys(uint32_t subnet, Drbg& rng) {
    SubnetState& sn = subnets_.at(subnet);
    NodeRecord& head = node_mut(sn.head);

    sn.master.s = rng.range(1, params_.curve.q - 1);
    sn.p_pub = scalar_mul(sn.master.s, params_.curve.generator);
    ibe::PublicParams sparams = subnet_params(sn);

    head.subnet_key = ibe::extract(sn.master, head.id, sparams);
    head.subnet_p_pub = sn.p_pub;

    for (const Bytes& member_id : sn.members) {
        NodeRecord& member = node_mut(member_id);
        ibe::PrivateKey key = ibe::extract(sn.master, member_id, sparams);

        Bytes payload;
        append_length_prefixed(payload, sn.p_pub.serialize());
        append_length_prefixed(payload, key.point.serialize());
        Bytes nonce = rng.next_bytes(12);
        Bytes frame = keyex::seal_frame(head.sessions.at(member_id), nonce, payload);

        // member side: open, parse, verify, install
        Bytes opened = keyex::open_frame(member.sessions.at(head.id), frame);
        ByteReader r(opened);
        CurvePoint p_pub = deserialize_point(r.length_prefixed(), params_.curve.p);
        CurvePoint key_point = deserialize_point(r.length_prefixed(), params_.curve.p);
        if (!r.done()) throw SimError("key distribution payload: trailing bytes");
        ibe::PrivateKey installed{key_point, member_id};
        ibe::PublicParams check{params_.curve, p_pub, params_.n_bits, params_.hash_name};
        if (!ibe::key_matches(installed, check))
            throw SimError("delivered subnet key failed verification");
        member.subnet_key = installed;
        member.subnet_p_pub = p_pub;

        std::ostringstream line;
        line << "distribute subnet=" << subnet << " epoch=" << sn.epoch
             << " member=" << detail::id_str(member_id);
        log_line(line.str());
    }
}

// Bootstrap every subnet: negotiate under ROM credentials, then hand out
// the first generation of subnet keys.
inline void run_initialization(NetworkState& net) {
    if (net.subnets_.empty()) throw SimError("run_initialization: no heads elected");
    for (uint32_t i = 0; i < net.subnets_.size(); ++i) {
        SubnetState& sn = net.subnets_[i];
        if (sn.epoch != 0) throw SimError("run_initialization: subnet already initialized");
        sn.epoch = 1;
        Drbg rng = net.subnet_stream(i, 1);
        net.negotiate_subnet(i, net.params_, /*use_embedded_keys=*/true, rng);
        net.distribute_subnet_keys(i, rng);
    }
}

// A newcomer registers with a head; the base station vets the id against
// the revocation list and its provisioning record.  On success the head
// delivers subnet credentials IBE-encrypted to the newcomer's ROM identity
// and the pair negotiates a session.  Only the newcomer, the head and the
// base station are involved.
inline bool add_node(NetworkState& net, const Bytes& id, double x, double y, uint32_t subnet,
                     bool provisioned = true) {
    if (subnet >= net.subnets_.size()) throw SimError("add_node: no such subnet");
    if (net.subnets_[subnet].epoch == 0) throw SimError("add_node: subnet not initialized");
    auto reject = [&](const char* why) {
        std::ostringstream line;
        line << "add id=" << detail::id_str(id) << " subnet=" << subnet << " status=" << why;
        net.log_line(line.str());
        return false;
    };
    for (const Bytes& r : net.revoked_)
        if (r == id) return reject("rejected-revoked");
    if (!provisioned) return reject("rejected-unknown");
    if (net.nodes_.count(id)) return reject("rejected-duplicate");

    SubnetState& sn = net.subnets_[subnet];
    NodeRecord& head = net.node_mut(sn.head);
    Drbg rng = net.event_stream(subnet, "add");

    NodeRecord rec;
    rec.id = id;
    rec.x = x;
    rec.y = y;
    rec.role = NodeRole::Sensor;
    rec.subnet = static_cast<int>(subnet);
    rec.embedded_key = ibe::extract(net.msk_, id, net.params_); // manufacture-time
    NodeRecord& newcomer = net.nodes_.emplace(id, std::move(rec)).first->second;

    // Subnet credentials travel in n-bit IBE blocks addressed to the ROM id.
    ibe::PrivateKey subnet_key = ibe::extract(sn.master, id, net.subnet_params(sn));
    Bytes payload;
    append_length_prefixed(payload, sn.p_pub.serialize());
    append_length_prefixed(payload, subnet_key.point.serialize());
    size_t block = net.params_.n_bytes();
    Bytes framed;
    append_be32(framed, static_cast<uint32_t>(payload.size()));
    append(framed, payload);
    framed.resize(((framed.size() + block - 1) / block) * block, 0);
    Bytes received;
    for (size_t off = 0; off < framed.size(); off += block) {
        Bytes chunk(framed.begin() + static_cast<long>(off),
                    framed.begin() + static_cast<long>(off + block));
        ibe::Ciphertext ct = ibe::encrypt(net.params_, id, chunk, rng);
        append(received, ibe::decrypt(newcomer.embedded_key, ct, net.params_));
    }
    ByteReader body(received);
    uint32_t total = body.be32();
    Bytes inner_payload = body.take(total);
    ByteReader ri(inner_payload);
    CurvePoint p_pub = deserialize_point(ri.length_prefixed(), net.params_.curve.p);
    CurvePoint key_point = deserialize_point(ri.length_prefixed(), net.params_.curve.p);
    if (!ri.done()) throw SimError("add_node: malformed credential payload");
    newcomer.subnet_key = ibe::PrivateKey{key_point, id};
    newcomer.subnet_p_pub = p_pub;

    // Fresh session under the subnet PKG both sides now share.
    protocol::NegotiationState head_state(protocol::Role::Head, head.id);
    auto broadcast = protocol::head_broadcast(head_state, sn.epoch);
    ibe::PublicParams sparams = net.subnet_params(sn);
    net.run_exchange(head_state, broadcast, head, newcomer, head.subnet_key.value(),
                     newcomer.subnet_key.value(), sparams, rng);
    sn.members.insert(id);

    std::ostringstream nline;
    nline << "negotiate subnet=" << subnet << " epoch=" << sn.epoch
          << " head=" << detail::id_str(head.id) << " peer=" << detail::id_str(id)
          << " status=ok";
    net.log_line(nline.str());
    std::ostringstream line;
    line << "add id=" << detail::id_str(id) << " subnet=" << subnet << " status=ok";
    net.log_line(line.str());
    return true;
}

// The head discards the communication key and the base station records the
// identity; the node keeps whatever stale state it already holds.
inline void revoke_node(NetworkState& net, const Bytes& id) {
    NodeRecord& rec = net.node_mut(id);
    if (rec.role != NodeRole::Sensor || rec.subnet < 0)
        throw SimError("revoke_node: id is not a subnet member");
    if (rec.revoked) throw SimError("revoke_node: already revoked");
    uint32_t subnet = static_cast<uint32_t>(rec.subnet);
    SubnetState& sn = net.subnets_[subnet];

    NodeRecord& head = net.node_mut(sn.head);
    head.sessions.erase(id);
    sn.members.erase(id);
    rec.revoked = true;
    rec.subnet = -1;
    net.revoked_.push_back(id);

    std::ostringstream line;
    line << "revoke id=" << detail::id_str(id) << " subnet=" << subnet << " status=ok";
    net.log_line(line.str());
}

// Head compromise: detection is an injected event.  The base station
// promotes the nearest clean member, which draws a fresh s_i and rebuilds
// its territory from ROM credentials; the old head keeps only stale keys.
inline void compromise_and_recover(NetworkState& net, const Bytes& head_id) {
    NodeRecord& old_head = net.node_mut(head_id);
    if (old_head.role != NodeRole::ClusterHead)
        throw SimError("compromise_and_recover: not a cluster head");
    uint32_t subnet = static_cast<uint32_t>(old_head.subnet);
    SubnetState& sn = net.subnets_[subnet];

    old_head.compromised = true;

    const NodeRecord* replacement = nullptr;
    double best_d = 0;
    for (const Bytes& member_id : sn.members) {
        const NodeRecord& cand = net.node(member_id);
        if (cand.compromised) continue;
        double d = detail::dist(cand.x, cand.y, old_head.x, old_head.y);
        if (!replacement || d < best_d || (d == best_d && cand.id < replacement->id)) {
            replacement = &cand;
            best_d = d;
        }
    }
    if (!replacement) throw SimError("compromise_and_recover: no eligible replacement head");
    Bytes new_head_id = replacement->id;

    // The compromised node is expelled; everyone else drops its sessions.
    sn.members.erase(new_head_id);
    old_head.role = NodeRole::Sensor;
    old_head.subnet = -1;
    NodeRecord& new_head = net.node_mut(new_head_id);
    new_head.role = NodeRole::ClusterHead;
    sn.head = new_head_id;
    for (auto& [id, rec] : net.nodes_)
        if (id != head_id) rec.sessions.erase(head_id);

    sn.epoch += 1;
    Drbg rng = net.subnet_stream(subnet, sn.epoch);
    // ROM credentials carry the re-bootstrap: the old head cannot read
    // traffic addressed to other identities under the global PKG.
    net.negotiate_subnet(subnet, net.params_, /*use_embedded_keys=*/true, rng);
    net.distribute_subnet_keys(subnet, rng);

    std::ostringstream line;
    line << "compromise subnet=" << subnet << " old_head=" << detail::id_str(head_id)
         << " new_head=" << detail::id_str(new_head_id) << " epoch=" << sn.epoch
         << " status=ok";
    net.log_line(line.str());
}

// Periodic re-key: fresh s_i delivered under the current session keys,
// then negotiations re-run with the updated subnet credentials.
inline void periodic_rekey(NetworkState& net, uint32_t subnet) {
    if (subnet >= net.subnets_.size()) throw SimError("periodic_rekey: no such subnet");
    SubnetState& sn = net.subnets_[subnet];
    if (sn.epoch == 0) throw SimError("periodic_rekey: subnet not initialized");

    sn.epoch += 1;
    Drbg rng = net.subnet_stream(subnet, sn.epoch);
    net.distribute_subnet_keys(subnet, rng);
    net.negotiate_subnet(subnet, net.subnet_params(sn), /*use_embedded_keys=*/false, rng);

    std::ostringstream line;
    line << "rekey subnet=" << subnet << " epoch=" << sn.epoch << " status=ok";
    net.log_line(line.str());
}

// Number of completed "negotiate" events in a log, as the metrics
// cross-check counts them.
inline uint64_t count_negotiation_events(const std::vector<std::string>& log) {
    uint64_t n = 0;
    for (const std::string& line : log)
        if (line.rfind("negotiate ", 0) == 0 && line.find("status=ok") != std::string::npos)
            ++n;
    return n;
}

} // namespace wsnkm::simnet
