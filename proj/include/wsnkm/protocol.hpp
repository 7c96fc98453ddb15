#pragma once

#include <map>
#include <optional>

#include "wsnkm/ibe.hpp"
#include "wsnkm/keyex.hpp"

// The three-step key negotiation: broadcast, parameter calculation,
// parameter exchange.  Pure message-in/message-out transitions; the caller
// owns each NegotiationState and the wire bytes.

namespace wsnkm::protocol {

enum class Role { Head, Node, BaseStation };
enum class Phase { Idle, AwaitingResponse, AwaitingReply, Established };

enum class MessageKind : uint8_t { Broadcast = 0, EncryptedResponse = 1, EncryptedReply = 2 };

struct NegotiationMessage {
    MessageKind kind;
    uint32_t epoch = 0;
    Bytes sender;
    Bytes payload; // plain id for Broadcast, serialized IBE ciphertext otherwise

    // 1-byte kind || 4-byte epoch || len-prefixed sender || len-prefixed payload.
    Bytes serialize() const {
        Bytes out;
        append_u8(out, static_cast<uint8_t>(kind));
        append_be32(out, epoch);
        append_length_prefixed(out, sender);
        append_length_prefixed(out, payload);
        return out;
    }

    static NegotiationMessage deserialize(const Bytes& buf) {
        ByteReader r(buf);
        uint8_t kind = r.u8();
        if (kind > 2) throw CryptoError("NegotiationMessage: bad kind");
        NegotiationMessage msg;
        msg.kind = static_cast<MessageKind>(kind);
        msg.epoch = r.be32();
        msg.sender = r.length_prefixed();
        msg.payload = r.length_prefixed();
        if (!r.done()) throw CryptoError("NegotiationMessage: trailing bytes");
        return msg;
    }
};

namespace detail {

// Pre-encryption payloads are zero-padded to the IBE plaintext size; a
// parse that leaves nonzero padding (or an out-of-range Y) is the protocol's
// only forgery signal, so it is checked strictly.

inline Bytes pad_block(const Bytes& payload, size_t block) {
    if (payload.size() > block)
        throw ConfigError("negotiation payload does not fit the IBE plaintext size");
    Bytes out = payload;
    out.resize(block, 0);
    return out;
}

inline void check_zero_tail(ByteReader& r) {
    while (!r.done())
        if (r.u8() != 0) throw CryptoError("negotiation payload: nonzero padding");
}

inline Bytes encode_response(const mpz_class& y, const Bytes& id) {
    Bytes out;
    append_length_prefixed(out, mpz_to_bytes(y));
    append_length_prefixed(out, id);
    return out;
}

inline std::pair<mpz_class, Bytes> decode_response(const Bytes& block,
                                                   const keyex::DhGroup& group) {
    ByteReader r(block);
    mpz_class y = mpz_from_bytes(r.length_prefixed());
    Bytes id = r.length_prefixed();
    check_zero_tail(r);
    if (keyex::degenerate_parameter(y, group))
        throw CryptoError("negotiation payload: degenerate DH parameter");
    if (id.empty()) throw CryptoError("negotiation payload: empty responder id");
    return {y, id};
}

inline Bytes encode_reply(const mpz_class& y) {
    Bytes out;
    append_length_prefixed(out, mpz_to_bytes(y));
    return out;
}

inline mpz_class decode_reply(const Bytes& block, const keyex::DhGroup& group) {
    ByteReader r(block);
    mpz_class y = mpz_from_bytes(r.length_prefixed());
    check_zero_tail(r);
    if (keyex::degenerate_parameter(y, group))
        throw CryptoError("negotiation payload: degenerate DH parameter");
    return y;
}

} // namespace detail

class NegotiationState {
public:
    NegotiationState(Role role, Bytes self_id) : role_(role), self_id_(std::move(self_id)) {}

    Role role() const { return role_; }
    Phase phase() const { return phase_; }
    const Bytes& self_id() const { return self_id_; }
    uint32_t epoch() const { return epoch_; }

    const std::map<Bytes, keyex::SessionKey>& peers() const { return peers_; }
    bool established_with(const Bytes& peer) const { return peers_.count(peer) != 0; }
    const keyex::SessionKey& session(const Bytes& peer) const {
        auto it = peers_.find(peer);
        if (it == peers_.end()) throw CryptoError("no established session with peer");
        return it->second;
    }

    friend NegotiationMessage head_broadcast(NegotiationState& head, uint32_t epoch);
    friend NegotiationMessage respond_to_broadcast(NegotiationState& node,
                                                   const NegotiationMessage& msg,
                                                   const ibe::PublicParams& params,
                                                   const keyex::DhGroup& group, Drbg& rng);
    friend std::pair<NegotiationMessage, keyex::SessionKey> head_handle_response(
        NegotiationState& head, const NegotiationMessage& msg, const ibe::PrivateKey& head_key,
        const ibe::PublicParams& params, const keyex::DhGroup& group, Drbg& rng);
    friend keyex::SessionKey finalize_session(NegotiationState& node,
                                              const NegotiationMessage& msg,
                                              const ibe::PrivateKey& node_key,
                                              const ibe::PublicParams& params,
                                              const keyex::DhGroup& group);

private:
    Role role_;
    Phase phase_ = Phase::Idle;
    Bytes self_id_;
    uint32_t epoch_ = 0;
    std::optional<keyex::DhKeyPair> pending_;
    Bytes pending_head_;
    std::map<Bytes, keyex::SessionKey> peers_;
};

// Step 1: the head announces its identity.  One logical message serves
// every node in range.
inline NegotiationMessage head_broadcast(NegotiationState& head, uint32_t epoch) {
    if (head.role_ != Role::Head) throw CryptoError("head_broadcast: caller is not a head");
    head.phase_ = Phase::AwaitingResponse;
    head.epoch_ = epoch;
    return NegotiationMessage{MessageKind::Broadcast, epoch, head.self_id_, head.self_id_};
}

// Steps 2+3a, responder side: draw a DH keypair and send (Y, own id)
// IBE-encrypted to the broadcast identity.
inline NegotiationMessage respond_to_broadcast(NegotiationState& node,
                                               const NegotiationMessage& msg,
                                               const ibe::PublicParams& params,
                                               const keyex::DhGroup& group, Drbg& rng) {
    if (node.phase_ != Phase::Idle)
        throw CryptoError("respond_to_broadcast: node is not idle");
    if (msg.kind != MessageKind::Broadcast)
        throw CryptoError("respond_to_broadcast: not a broadcast");
    if (msg.sender.empty() || msg.payload != msg.sender)
        throw CryptoError("respond_to_broadcast: malformed broadcast");

    keyex::DhKeyPair kp = keyex::dh_generate(group, rng);
    Bytes plaintext = detail::pad_block(detail::encode_response(kp.y, node.self_id_),
                                        params.n_bytes());
    ibe::Ciphertext ct = ibe::encrypt(params, msg.sender, plaintext, rng);

    node.pending_ = kp;
    node.pending_head_ = msg.sender;
    node.epoch_ = msg.epoch;
    node.phase_ = Phase::AwaitingReply;
    return NegotiationMessage{MessageKind::EncryptedResponse, msg.epoch, node.self_id_,
                              ct.serialize()};
}

// Steps 3b-3d, head side: decrypt (Y_B, Id_B), answer with its own Y
// encrypted to Id_B, and store the session key.
inline std::pair<NegotiationMessage, keyex::SessionKey> head_handle_response(
    NegotiationState& head, const NegotiationMessage& msg, const ibe::PrivateKey& head_key,
    const ibe::PublicParams& params, const keyex::DhGroup& group, Drbg& rng) {
    if (head.phase_ != Phase::AwaitingResponse)
        throw CryptoError("head_handle_response: head is not awaiting responses");
    if (msg.kind != MessageKind::EncryptedResponse)
        throw CryptoError("head_handle_response: not a response");
    if (msg.epoch != head.epoch_)
        throw CryptoError("head_handle_response: stale epoch");

    ibe::Ciphertext ct = ibe::Ciphertext::deserialize(msg.payload, params);
    auto [peer_y, peer_id] =
        detail::decode_response(ibe::decrypt(head_key, ct, params), group);
    if (head.peers_.count(peer_id))
        throw CryptoError("head_handle_response: session already established with peer");

    keyex::DhKeyPair kp = keyex::dh_generate(group, rng);
    keyex::SessionKey key =
        keyex::dh_shared(kp, peer_y, group, head.self_id_, peer_id, head.epoch_);
    head.peers_.emplace(peer_id, key);

    Bytes plaintext = detail::pad_block(detail::encode_reply(kp.y), params.n_bytes());
    ibe::Ciphertext reply = ibe::encrypt(params, peer_id, plaintext, rng);
    return {NegotiationMessage{MessageKind::EncryptedReply, head.epoch_, head.self_id_,
                               reply.serialize()},
            key};
}

// Step 3d, responder side: decrypt Y_A and derive the same key.
inline keyex::SessionKey finalize_session(NegotiationState& node,
                                          const NegotiationMessage& msg,
                                          const ibe::PrivateKey& node_key,
                                          const ibe::PublicParams& params,
                                          const keyex::DhGroup& group) {
    if (node.phase_ != Phase::AwaitingReply)
        throw CryptoError("finalize_session: no exchange in flight");
    if (msg.kind != MessageKind::EncryptedReply)
        throw CryptoError("finalize_session: not a reply");
    if (msg.epoch != node.epoch_ || msg.sender != node.pending_head_)
        throw CryptoError("finalize_session: reply for an unknown exchange");

    ibe::Ciphertext ct = ibe::Ciphertext::deserialize(msg.payload, params);
    mpz_class head_y = detail::decode_reply(ibe::decrypt(node_key, ct, params), group);
    keyex::SessionKey key = keyex::dh_shared(*node.pending_, head_y, group, node.self_id_,
                                             node.pending_head_, node.epoch_);
    node.peers_.insert_or_assign(node.pending_head_, key);
    node.pending_.reset();
    node.phase_ = Phase::Established;
    return key;
}

} // namespace wsnkm::protocol
