#ifndef OAPSIM_PROTOCOLS_HPP
#define OAPSIM_PROTOCOLS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oapsim/codec.hpp"
#include "oapsim/netmodel.hpp"

namespace oapsim {

enum class ProtocolKind { Flood, Deluge, RatelessDeluge, Synapse, Coop };

std::string protocol_name(ProtocolKind k);
ProtocolKind parse_protocol(const std::string& name);

// Per-run protocol parameters. Defaults are the artifact's stated
// constants; completion-time comparisons are reported against them.
struct ProtocolConfig {
    ProtocolKind kind = ProtocolKind::Coop;
    std::uint32_t k = 4;
    std::uint32_t L = 20;
    FieldSpec field = FieldSpec::gf2();
    DegreeDistribution dist = DegreeDistribution::uniform_rlc();

    std::uint32_t slots_per_codeword = 1;
    // Decode-time model: decode_estimate() slots charged once a decoder
    // reaches full rank. Explicit override wins over k/divisor.
    std::uint32_t decode_estimate_divisor = 8;
    std::optional<std::uint32_t> decode_estimate_slots;

    std::uint32_t nack_batch = 0; // max codewords granted per NACK; 0 = uncapped
    std::uint32_t max_nack_retries = 25;
    std::uint32_t adv_period = 2;      // Deluge family ADV spacing
    std::uint32_t req_backoff_max = 1; // request jitter, slots
    std::uint32_t coop_budget_margin = 1;

    static ProtocolConfig defaults_for(ProtocolKind kind, std::uint32_t k, std::uint32_t L);

    std::uint32_t decode_estimate() const {
        if (decode_estimate_slots) return *decode_estimate_slots;
        std::uint32_t d = k / decode_estimate_divisor;
        return d > 0 ? d : 1;
    }
    std::uint64_t rounds_budget() const {
        return static_cast<std::uint64_t>(k) * slots_per_codeword;
    }
};

// Request timer: three transmission rounds' worth of codeword slots plus
// the decode-time estimate.
std::uint64_t compute_tau(std::uint32_t k, const ProtocolConfig& cfg);

// Abstract wire messages, also the trace-log schema.
struct Message {
    enum class Kind { Adv, Nack, Data };
    Kind kind = Kind::Data;
    std::uint32_t page_id = 0;
    // Adv
    std::uint32_t have = 0;
    // Nack
    NodeId nack_target = kNoNode;            // kNoNode = previous-hop broadcast
    std::vector<std::uint8_t> missing_bitmap; // bit i set = packet i missing
    std::uint32_t missing_count = 0;
    bool count_based = false;
    // Data
    std::optional<std::uint32_t> packet_index;
    std::vector<std::uint8_t> payload;
    std::optional<Codeword> codeword;
};

// One line per message, stable formatting; golden traces diff these bytes.
std::string format_message(const Topology& topo, std::uint64_t slot, NodeId from,
                           const Message& msg, std::uint32_t k);

struct NodeStats {
    std::uint64_t tx = 0;
    std::uint64_t rx = 0;
    std::uint64_t redundant_rx = 0;
    std::uint64_t nacks_sent = 0;
    std::uint64_t row_ops = 0;
    std::uint64_t header_bits = 0;
    bool complete = false;
    std::uint32_t rank_or_have = 0;
};

struct SimResult {
    std::uint64_t completion_slots = 0;
    bool timed_out = false;
    std::vector<NodeStats> nodes;
    std::uint64_t tx_total = 0;
    std::uint64_t rx_total = 0;
    std::uint64_t redundant_total = 0;
    std::uint64_t nacks_total = 0;
    std::uint64_t row_ops_total = 0;
    std::uint64_t header_bits_total = 0;
};

struct SimConfig {
    const Topology* topo = nullptr;
    ChannelConfig channel;
    ProtocolConfig proto;
    std::uint64_t max_slots = 20000;
    std::uint64_t root_seed = 1;
    std::uint64_t replicate = 0;
    std::vector<ScriptedDrop> script;
    // Extra component mixed into every derived stream label so sweep cells
    // (protocol, k, erasure) draw independently.
    std::string stream_tag;
};

using TraceSink = std::function<void(const std::string&)>;

// Runs one replicate to completion or max_slots. Deterministic in
// (config, topology, root_seed, replicate).
SimResult simulate(const SimConfig& cfg, const TraceSink& trace = nullptr);

} // namespace oapsim

#endif
