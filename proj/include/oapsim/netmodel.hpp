#ifndef OAPSIM_NETMODEL_HPP
#define OAPSIM_NETMODEL_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "oapsim/rng.hpp"

namespace oapsim {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// Directed neighbor graph with per-link erasure overrides and BFS hop
// labels from the designated source.
class Topology {
public:
    struct OutLink {
        NodeId to;
        std::optional<double> erasure; // unset -> channel default applies
    };

    static Topology fig1();
    static Topology line(std::uint32_t n);
    static Topology grid(std::uint32_t rows, std::uint32_t cols);

    // Plain-text document: `node <id>`, `source <id>`,
    // `link <u> <v> [erasure=<float>]`, `default_erasure <float>`.
    // `link` is symmetric. Throws std::runtime_error on malformed input or
    // nodes unreachable from the source.
    static Topology parse(const std::string& text);

    // Builtin generator names ("fig1", "line(8)", "grid(10x10)") or a file
    // path to a topology document.
    static Topology from_name_or_file(const std::string& ref);

    std::uint32_t size() const { return static_cast<std::uint32_t>(names_.size()); }
    NodeId source() const { return source_; }
    std::uint32_t hop(NodeId n) const { return hops_[n]; }
    std::uint32_t max_hop() const { return max_hop_; }
    const std::string& name(NodeId n) const { return names_[n]; }
    NodeId id_of(const std::string& name) const;
    const std::vector<OutLink>& out(NodeId n) const { return out_[n]; }
    std::optional<double> document_default_erasure() const { return doc_default_; }

    // Undirected hop distance, for the three-hop spatial-reuse rule.
    std::uint32_t distance(NodeId a, NodeId b) const { return dist_[a][b]; }

    std::vector<NodeId> nodes_at_hop(std::uint32_t h) const;

private:
    NodeId add_node(const std::string& name);
    void add_link(NodeId u, NodeId v, std::optional<double> eps, bool symmetric);
    void finalize(); // BFS hops + all-pairs distances; validates reachability

    std::vector<std::string> names_;
    NodeId source_ = kNoNode;
    std::vector<std::vector<OutLink>> out_;
    std::vector<std::uint32_t> hops_;
    std::uint32_t max_hop_ = 0;
    std::vector<std::vector<std::uint32_t>> dist_;
    std::optional<double> doc_default_;
};

struct CollisionModel {
    enum class Kind { None, Bernoulli };
    Kind kind = Kind::None;
    double p = 0.0;
};

struct ChannelConfig {
    double default_erasure = 0.0;
    CollisionModel collision;
    std::uint32_t slot_duration = 1;
};

// Forced drop of a specific transmission at a specific receiver, keyed by
// the sender's 1-based transmission ordinal. Used by scripted scenarios.
struct ScriptedDrop {
    NodeId sender;
    std::uint32_t tx_ordinal;
    NodeId receiver;
    bool operator==(const ScriptedDrop&) const = default;
};

struct Transmission {
    NodeId sender;
    std::uint64_t slot;
    std::uint32_t sender_tx_ordinal = 0; // 1-based count of this sender's transmissions
};

// Delivers all transmissions of one slot together so the collision model
// sees concurrency. Same-slot transmitters never receive (half-duplex).
// Returns one receiver set per transmission, in input order.
std::vector<std::vector<NodeId>> deliver_slot(const Topology& topo,
                                              const ChannelConfig& cfg,
                                              const std::vector<Transmission>& txs,
                                              const std::vector<ScriptedDrop>& script,
                                              Rng& rng);

// Single-transmission convenience wrapper.
std::vector<NodeId> broadcast(const Topology& topo, const ChannelConfig& cfg,
                              const Transmission& tx, Rng& rng);

// Erasure rate above which k offered codewords per round over `rounds`
// rounds yield fewer than k expected receptions: 1 - 1/rounds.
double erasure_failure_threshold(std::uint32_t rounds);

} // namespace oapsim

#endif
