#include "oapsim/protocols.hpp"

#include <stdexcept>

namespace oapsim {

std::string protocol_name(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::Flood: return "flood";
        case ProtocolKind::Deluge: return "deluge";
        case ProtocolKind::RatelessDeluge: return "rateless_deluge";
        case ProtocolKind::Synapse: return "synapse";
        case ProtocolKind::Coop: return "coop";
    }
    throw std::logic_error("bad protocol kind");
}

ProtocolKind parse_protocol(const std::string& name) {
    if (name == "flood") return ProtocolKind::Flood;
    if (name == "deluge") return ProtocolKind::Deluge;
    if (name == "rateless_deluge") return ProtocolKind::RatelessDeluge;
    if (name == "synapse") return ProtocolKind::Synapse;
    if (name == "coop") return ProtocolKind::Coop;
    throw std::invalid_argument("unknown protocol: " + name);
}

ProtocolConfig ProtocolConfig::defaults_for(ProtocolKind kind, std::uint32_t k,
                                            std::uint32_t L) {
    ProtocolConfig c;
    c.kind = kind;
    c.k = k;
    c.L = L;
    switch (kind) {
        case ProtocolKind::Flood:
        case ProtocolKind::Deluge:
            c.field = FieldSpec::gf2(); // unused, uncoded transfer
            break;
        case ProtocolKind::RatelessDeluge:
            c.field = FieldSpec::gf256();
            c.dist = DegreeDistribution::uniform_rlc();
            break;
        case ProtocolKind::Synapse:
            c.field = FieldSpec::gf2();
            c.dist = DegreeDistribution::sparse_lt();
            break;
        case ProtocolKind::Coop:
            c.field = FieldSpec::gf2();
            c.dist = DegreeDistribution::uniform_rlc();
            break;
    }
    return c;
}

std::uint64_t compute_tau(std::uint32_t k, const ProtocolConfig& cfg) {
    ProtocolConfig c = cfg;
    c.k = k;
    return 3 * c.rounds_budget() + c.decode_estimate();
}

namespace {

std::string hex_bytes(const std::vector<std::uint8_t>& bytes) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0xF]);
    }
    return out;
}

std::string bitmap_string(const std::vector<std::uint8_t>& bm, std::uint32_t k) {
    std::string out;
    out.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i)
        out.push_back((bm[i / 8] >> (i % 8)) & 1 ? '1' : '0');
    return out;
}

} // namespace

std::string format_message(const Topology& topo, std::uint64_t slot, NodeId from,
                           const Message& msg, std::uint32_t k) {
    std::string line = "slot=" + std::to_string(slot) + " from=" + topo.name(from);
    switch (msg.kind) {
        case Message::Kind::Adv:
            line += " ADV page=" + std::to_string(msg.page_id) +
                    " have=" + std::to_string(msg.have);
            break;
        case Message::Kind::Nack:
            line += " NACK page=" + std::to_string(msg.page_id);
            line += " target=";
            line += msg.nack_target == kNoNode ? "*" : topo.name(msg.nack_target);
            if (msg.count_based)
                line += " count=" + std::to_string(msg.missing_count);
            else
                line += " bitmap=" + bitmap_string(msg.missing_bitmap, k);
            break;
        case Message::Kind::Data:
            line += " DATA page=" + std::to_string(msg.page_id);
            if (msg.codeword) {
                line += " coeffs=" + msg.codeword->coeffs.to_string();
                line += " payload=" + hex_bytes(msg.codeword->payload);
            } else {
                line += " idx=" + std::to_string(*msg.packet_index);
                line += " payload=" + hex_bytes(msg.payload);
            }
            break;
    }
    return line;
}

} // namespace oapsim
