#include <algorithm>
#include <deque>
#include <memory>
#include <set>
#include <stdexcept>

#include "oapsim/engine.hpp"
#include "oapsim/protocols.hpp"

namespace oapsim {

namespace {

// Grants DATA bursts only to nodes pairwise >= 3 hops apart (Deluge's
// spatial-reuse rule).
class SpatialArbiter {
public:
    explicit SpatialArbiter(const Topology& topo) : topo_(&topo) {}

    bool acquire(NodeId n) {
        for (NodeId a : active_)
            if (a != n && topo_->distance(a, n) < 3) return false;
        active_.insert(n);
        return true;
    }
    void release(NodeId n) { active_.erase(n); }

private:
    const Topology* topo_;
    std::set<NodeId> active_;
};

// Static transmission wave for the cooperative protocol: one phase per hop,
// same-hop transmitters interleaved slot-by-slot in a seeded order so they
// overhear one another (half-duplex).
struct CoopSchedule {
    struct Phase {
        std::uint32_t hop;
        std::uint64_t start;
        std::uint64_t length;
        std::vector<NodeId> order;
        std::uint32_t per_node_budget;
    };
    std::vector<Phase> phases;
    std::uint64_t wave_end = 0;

    static CoopSchedule build(const Topology& topo, const ProtocolConfig& cfg,
                              std::uint64_t root_seed, std::uint64_t replicate,
                              const std::string& tag) {
        CoopSchedule s;
        std::uint64_t t = 0;
        for (std::uint32_t h = 0; h <= topo.max_hop(); ++h) {
            auto nodes = topo.nodes_at_hop(h);
            if (nodes.empty()) continue;
            std::uint32_t n = static_cast<std::uint32_t>(nodes.size());
            std::uint32_t budget =
                h == 0 ? cfg.k : (cfg.k + n - 1) / n + cfg.coop_budget_margin;
            Rng rng = Rng::derive(root_seed, replicate,
                                  tag + "/coop/phase/" + std::to_string(h));
            for (std::uint32_t i = n; i > 1; --i)
                std::swap(nodes[i - 1], nodes[rng.uniform(i)]);
            std::uint64_t len = static_cast<std::uint64_t>(budget) * n;
            s.phases.push_back({h, t, len, nodes, budget});
            t += len;
        }
        s.wave_end = t;
        return s;
    }

    // Transmitter assigned to this slot, or kNoNode outside the wave.
    NodeId transmitter_at(std::uint64_t slot) const {
        for (const auto& p : phases) {
            if (slot >= p.start && slot < p.start + p.length)
                return p.order[(slot - p.start) % p.order.size()];
        }
        return kNoNode;
    }

    const Phase* phase_at(std::uint64_t slot) const {
        for (const auto& p : phases)
            if (slot >= p.start && slot < p.start + p.length) return &p;
        return nullptr;
    }
};

struct Shared {
    const Topology* topo;
    const ProtocolConfig* cfg;
    const Field* field;
    const Page* page;
    SpatialArbiter* arbiter;
    const CoopSchedule* coop;
};

class NodeBase {
public:
    NodeBase(const Shared& sh, NodeId id, Rng rng)
        : sh_(sh), id_(id), rng_(std::move(rng)) {}
    virtual ~NodeBase() = default;

    virtual std::optional<Message> poll(std::uint64_t slot) = 0;
    virtual void deliver(NodeId from, const Message& msg, std::uint64_t slot) = 0;
    virtual bool complete() const = 0;
    virtual std::uint32_t rank_or_have() const = 0;
    virtual std::uint64_t row_ops() const { return 0; }

    NodeStats stats;

protected:
    bool is_source() const { return id_ == sh_.topo->source(); }
    std::uint32_t hop() const { return sh_.topo->hop(id_); }

    void verify_page(const Page& got) const {
        if (!(got == *sh_.page))
            throw std::logic_error("decoded page differs from source page at node " +
                                   sh_.topo->name(id_));
    }

    Shared sh_;
    NodeId id_;
    Rng rng_;
};

// ------------------------------------------------------------- flooding

class FloodNode : public NodeBase {
public:
    FloodNode(const Shared& sh, NodeId id, Rng rng) : NodeBase(sh, id, std::move(rng)) {
        have_.assign(sh_.cfg->k, false);
        store_.assign(sh_.cfg->k, {});
        if (is_source()) {
            for (std::uint32_t i = 0; i < sh_.cfg->k; ++i) {
                have_[i] = true;
                store_[i] = sh_.page->packets[i];
                pending_.push_back({i, i}); // due immediately, one per slot
            }
            count_ = sh_.cfg->k;
        }
    }

    std::optional<Message> poll(std::uint64_t slot) override {
        for (auto it = pending_.begin(); it != pending_.end(); ++it) {
            if (it->due > slot) continue;
            std::uint32_t idx = it->idx;
            pending_.erase(it);
            Message m;
            m.kind = Message::Kind::Data;
            m.page_id = sh_.page->page_id;
            m.packet_index = idx;
            m.payload = store_[idx];
            return m;
        }
        return std::nullopt;
    }

    void deliver(NodeId, const Message& msg, std::uint64_t slot) override {
        if (msg.kind != Message::Kind::Data) return;
        std::uint32_t idx = *msg.packet_index;
        if (have_[idx]) {
            ++stats.redundant_rx;
            return;
        }
        have_[idx] = true;
        store_[idx] = msg.payload;
        ++count_;
        // Rebroadcast each new packet exactly once, after a small random
        // backoff so neighbouring rebroadcasts desynchronize.
        pending_.push_back({idx, slot + 1 + rng_.uniform(3)});
        // Carrier sense: the channel is busy this slot, so hold every
        // pending rebroadcast for at least one quiet slot. Transmitting
        // while upstream is still sending would deafen us to the rest of
        // the burst (half-duplex).
        for (auto& p : pending_) p.due = std::max(p.due, slot + 2);
    }

    // The flood is over once the packets are in and the storm has drained.
    bool complete() const override {
        return count_ == sh_.cfg->k && pending_.empty();
    }
    std::uint32_t rank_or_have() const override { return count_; }

private:
    struct PendingTx {
        std::uint32_t idx;
        std::uint64_t due;
    };
    std::vector<bool> have_;
    std::vector<std::vector<std::uint8_t>> store_;
    std::deque<PendingTx> pending_;
    std::uint32_t count_ = 0;
};

// -------------------------------------------------------- Deluge family
//
// Shared ADV / NACK / DATA state machine. Uncoded mode requests a bitmap
// of missing indices; coded modes (dense GF(256) or sparse GF(2) LT)
// request a count of additional codewords. A node serves DATA only once
// it holds the complete page (hop-by-hop transfer).

class DelugeNode : public NodeBase {
public:
    DelugeNode(const Shared& sh, NodeId id, Rng rng, bool coded)
        : NodeBase(sh, id, std::move(rng)), coded_(coded) {
        if (coded_)
            decoder_.emplace(*sh_.field, sh_.page->page_id, sh_.cfg->k, sh_.cfg->L);
        else {
            uhave_.assign(sh_.cfg->k, false);
            ustore_.assign(sh_.cfg->k, {});
        }
        if (is_source()) {
            complete_ = true;
            adv_cd = 0;
        }
    }

    ~DelugeNode() override {
        if (granted_) sh_.arbiter->release(id_);
    }

    std::optional<Message> poll(std::uint64_t) override {
        if (decode_cd > 0) {
            if (--decode_cd == 0) finish_decode();
            return std::nullopt;
        }

        if (complete_) {
            if (has_pending()) {
                if (!granted_) granted_ = sh_.arbiter->acquire(id_);
                if (!granted_) return std::nullopt;
                Message m = next_data();
                if (!has_pending()) {
                    sh_.arbiter->release(id_);
                    granted_ = false;
                }
                return m;
            }
            if (adv_cd <= 0) {
                adv_cd = static_cast<std::int64_t>(sh_.cfg->adv_period);
                Message m;
                m.kind = Message::Kind::Adv;
                m.page_id = sh_.page->page_id;
                m.have = sh_.cfg->k;
                return m;
            }
            --adv_cd;
            return std::nullopt;
        }

        if (backoff_cd > 0) {
            --backoff_cd;
            return std::nullopt;
        }
        if (backoff_cd == 0) {
            backoff_cd = -1;
            return send_nack();
        }
        if (req_timer > 0) {
            --req_timer;
            return std::nullopt;
        }
        if (req_timer == 0) {
            req_timer = -1;
            if (last_adv_ != kNoNode && retries_ < sh_.cfg->max_nack_retries)
                backoff_cd = static_cast<std::int64_t>(
                    rng_.uniform(sh_.cfg->req_backoff_max + 1));
        }
        return std::nullopt;
    }

    void deliver(NodeId from, const Message& msg, std::uint64_t) override {
        switch (msg.kind) {
            case Message::Kind::Adv:
                if (!complete_ && decode_cd <= 0 && msg.have > rank_or_have() &&
                    backoff_cd < 0 && req_timer < 0) {
                    // A fresh advertisement of newer data opens a new request
                    // round; an exhausted retry budget only ends the old one.
                    if (retries_ >= sh_.cfg->max_nack_retries) retries_ = 0;
                    last_adv_ = from;
                    backoff_cd = static_cast<std::int64_t>(
                        rng_.uniform(sh_.cfg->req_backoff_max + 1));
                }
                break;
            case Message::Kind::Nack:
                if (complete_ && msg.nack_target == id_) accept_request(msg);
                break;
            case Message::Kind::Data:
                if (!complete_) accept_data(msg);
                break;
        }
    }

    bool complete() const override { return complete_; }

    std::uint32_t rank_or_have() const override {
        if (coded_) return complete_ ? sh_.cfg->k : decoder_->rank();
        std::uint32_t n = 0;
        for (bool b : uhave_) n += b;
        return n;
    }

    std::uint64_t row_ops() const override {
        return coded_ ? decoder_->row_ops().total() : 0;
    }

private:
    bool has_pending() const {
        return coded_ ? pending_count_ > 0 : !pending_idx_.empty();
    }

    Message next_data() {
        Message m;
        m.kind = Message::Kind::Data;
        m.page_id = sh_.page->page_id;
        if (coded_) {
            --pending_count_;
            m.codeword = encode(*sh_.page, rng_, sh_.cfg->dist, *sh_.field);
        } else {
            std::uint32_t idx = *pending_idx_.begin();
            pending_idx_.erase(pending_idx_.begin());
            m.packet_index = idx;
            m.payload = sh_.page->packets[idx];
        }
        return m;
    }

    Message send_nack() {
        Message m;
        m.kind = Message::Kind::Nack;
        m.page_id = sh_.page->page_id;
        m.nack_target = last_adv_;
        std::uint32_t missing;
        if (coded_) {
            m.count_based = true;
            missing = sh_.cfg->k - decoder_->rank();
            m.missing_count = missing;
        } else {
            missing = 0;
            m.missing_bitmap.assign((sh_.cfg->k + 7) / 8, 0);
            for (std::uint32_t i = 0; i < sh_.cfg->k; ++i)
                if (!uhave_[i]) {
                    m.missing_bitmap[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
                    ++missing;
                }
        }
        ++stats.nacks_sent;
        ++retries_;
        req_timer = static_cast<std::int64_t>(missing) * sh_.cfg->slots_per_codeword +
                    sh_.cfg->adv_period + 4;
        return m;
    }

    void accept_request(const Message& msg) {
        if (coded_) {
            std::uint32_t grant = msg.missing_count;
            if (sh_.cfg->nack_batch > 0) grant = std::min(grant, sh_.cfg->nack_batch);
            pending_count_ = std::max(pending_count_, grant);
        } else {
            for (std::uint32_t i = 0; i < sh_.cfg->k; ++i)
                if ((msg.missing_bitmap[i / 8] >> (i % 8)) & 1) pending_idx_.insert(i);
        }
    }

    void accept_data(const Message& msg) {
        bool innovative = false;
        if (coded_) {
            if (!msg.codeword) return; // uncoded data for another variant
            if (decoder_->absorb(*msg.codeword) == AbsorbResult::Innovative)
                innovative = true;
            else
                ++stats.redundant_rx;
            if (decoder_->full_rank() && decode_cd <= 0) {
                decode_cd = static_cast<std::int64_t>(sh_.cfg->decode_estimate());
                backoff_cd = -1;
                req_timer = -1;
            }
        } else {
            if (!msg.packet_index) return;
            std::uint32_t idx = *msg.packet_index;
            if (uhave_[idx]) {
                ++stats.redundant_rx;
            } else {
                uhave_[idx] = true;
                ustore_[idx] = msg.payload;
                innovative = true;
                if (rank_or_have() == sh_.cfg->k) finish_uncoded();
            }
        }
        if (innovative && !complete_) {
            retries_ = 0;
            if (req_timer >= 0) req_timer = std::max<std::int64_t>(req_timer, 2);
        }
    }

    void finish_decode() {
        Page got = decoder_->decode();
        verify_page(got);
        complete_ = true;
        adv_cd = 0;
    }

    void finish_uncoded() {
        Page got;
        got.page_id = sh_.page->page_id;
        got.k = sh_.cfg->k;
        got.L = sh_.cfg->L;
        got.packets = ustore_;
        verify_page(got);
        complete_ = true;
        adv_cd = 0;
        backoff_cd = -1;
        req_timer = -1;
    }

    bool coded_;
    bool complete_ = false;
    std::optional<DecoderState> decoder_;
    std::vector<bool> uhave_;
    std::vector<std::vector<std::uint8_t>> ustore_;

    std::set<std::uint32_t> pending_idx_;
    std::uint32_t pending_count_ = 0;
    bool granted_ = false;

    std::int64_t adv_cd = -1;
    std::int64_t backoff_cd = -1;
    std::int64_t req_timer = -1;
    std::int64_t decode_cd = -1;
    std::uint32_t retries_ = 0;
    NodeId last_adv_ = kNoNode;
};

// ----------------------------------------------------------- cooperative
//
// Wave of per-hop rounds: every node broadcasts recoded codewords in its
// hop's phase regardless of rank, relying on triangularized state only.
// Nodes still short after the wave plus the decode estimate NACK their
// previous hop for additional recoded codewords.

class CoopNode : public NodeBase {
public:
    CoopNode(const Shared& sh, NodeId id, Rng rng)
        : NodeBase(sh, id, std::move(rng)),
          decoder_(*sh.field, sh.page->page_id, sh.cfg->k, sh.cfg->L),
          round_sent_(*sh.field, sh.page->page_id, sh.cfg->k, sh.cfg->L) {
        if (is_source()) {
            decoder_.seed_from_page(*sh_.page);
            complete_ = true;
        }
    }

    std::optional<Message> poll(std::uint64_t slot) override {
        if (decode_cd > 0 && --decode_cd == 0) finish_decode();

        // Arm the request timer when the wave ends.
        if (slot == sh_.coop->wave_end && !complete_ && !decoder_.full_rank())
            nack_cd = static_cast<std::int64_t>(sh_.cfg->decode_estimate() +
                                                rng_.uniform(3));

        // The request timer runs regardless of what the radio is doing.
        if (!complete_ && !decoder_.full_rank()) {
            if (nack_cd > 0) {
                --nack_cd;
            } else if (nack_cd == 0) {
                nack_cd = -1;
                if (retries_ < sh_.cfg->max_nack_retries) nack_pending_ = true;
            }
        } else {
            nack_pending_ = false;
        }

        if (slot < sh_.coop->wave_end) {
            const auto* phase = sh_.coop->phase_at(slot);
            if (phase != current_phase_) {
                current_phase_ = phase;
                reset_round_sent();
            }
            if (sh_.coop->transmitter_at(slot) == id_) return phase_transmit();
            return std::nullopt;
        }

        if (nack_pending_) {
            nack_pending_ = false;
            return send_nack();
        }

        // Serve next-hop repair requests only once our own rank is full;
        // transmitting while short would deafen us (half-duplex) to the
        // repair codewords we are waiting for from the previous hop.
        if (repair_queue_ > 0 && decoder_.full_rank()) {
            --repair_queue_;
            if (!repair_burst_) {
                repair_burst_ = true;
                reset_round_sent();
            }
            if (repair_queue_ == 0) repair_burst_ = false;
            return make_recode();
        }
        return std::nullopt;
    }

    void deliver(NodeId from, const Message& msg, std::uint64_t slot) override {
        switch (msg.kind) {
            case Message::Kind::Data: {
                if (!msg.codeword || decoder_.full_rank()) {
                    if (msg.codeword && decoder_.full_rank()) ++stats.redundant_rx;
                    return;
                }
                if (decoder_.absorb(*msg.codeword) == AbsorbResult::Redundant)
                    ++stats.redundant_rx;
                // Any codeword reception proves a live server, so the
                // request budget re-opens; it only caps consecutive
                // unanswered rounds.
                retries_ = 0;
                if (decoder_.full_rank()) {
                    nack_cd = -1;
                    if (!complete_ && decode_cd <= 0)
                        decode_cd = static_cast<std::int64_t>(sh_.cfg->decode_estimate());
                } else if (slot >= sh_.coop->wave_end && nack_cd < 0) {
                    // A previously exhausted requester hears fresh repairs:
                    // re-arm the timer so it can ask for the remainder once
                    // the burst passes.
                    nack_cd = static_cast<std::int64_t>(sh_.cfg->k - decoder_.rank()) *
                                  sh_.cfg->slots_per_codeword +
                              4;
                }
                break;
            }
            case Message::Kind::Nack:
                // Serve NACKs from the next hop with recoded codewords.
                if (sh_.topo->hop(from) == hop() + 1 && decoder_.rank() > 0) {
                    std::uint32_t grant = msg.missing_count;
                    if (sh_.cfg->nack_batch > 0)
                        grant = std::min(grant, sh_.cfg->nack_batch);
                    // Every recoded codeword is broadcast, so concurrent
                    // requesters share one burst sized for the largest ask.
                    repair_queue_ = std::max<std::uint64_t>(repair_queue_, grant);
                }
                break;
            case Message::Kind::Adv:
                break;
        }
    }

    bool complete() const override { return complete_; }
    std::uint32_t rank_or_have() const override { return decoder_.rank(); }
    std::uint64_t row_ops() const override { return decoder_.row_ops().total(); }

private:
    void reset_round_sent() {
        round_sent_ = DecoderState(*sh_.field, sh_.page->page_id, sh_.cfg->k, sh_.cfg->L);
    }

    std::optional<Message> phase_transmit() {
        if (is_source() && systematic_sent_ < sh_.cfg->k) {
            // The source offers the page systematically first.
            std::uint32_t idx = systematic_sent_++;
            Message m;
            m.kind = Message::Kind::Data;
            m.page_id = sh_.page->page_id;
            Codeword cw;
            cw.page_id = sh_.page->page_id;
            cw.coeffs = CoefficientVector(sh_.field->spec(), sh_.cfg->k);
            cw.coeffs.set(idx, 1);
            cw.payload = sh_.page->packets[idx];
            m.codeword = std::move(cw);
            return m;
        }
        return make_recode();
    }

    // Recoded codeword independent of everything already sent this round;
    // skips the turn when the round budget already spans our whole rank.
    std::optional<Message> make_recode() {
        if (decoder_.rank() == 0) return std::nullopt;
        if (round_sent_.rank() >= decoder_.rank()) return std::nullopt;
        for (int tries = 0; tries < 64; ++tries) {
            Codeword cw = decoder_.recode(rng_);
            if (round_sent_.absorb(cw) == AbsorbResult::Innovative) {
                Message m;
                m.kind = Message::Kind::Data;
                m.page_id = sh_.page->page_id;
                m.codeword = std::move(cw);
                return m;
            }
        }
        return std::nullopt;
    }

    Message send_nack() {
        Message m;
        m.kind = Message::Kind::Nack;
        m.page_id = sh_.page->page_id;
        m.nack_target = kNoNode; // all previous-hop neighbours
        m.count_based = true;
        m.missing_count = sh_.cfg->k - decoder_.rank();
        ++stats.nacks_sent;
        ++retries_;
        nack_cd = static_cast<std::int64_t>(m.missing_count) *
                      sh_.cfg->slots_per_codeword +
                  4;
        return m;
    }

    void finish_decode() {
        Page got = decoder_.decode();
        verify_page(got);
        complete_ = true;
    }

    DecoderState decoder_;
    DecoderState round_sent_;
    const CoopSchedule::Phase* current_phase_ = nullptr;
    bool complete_ = false;
    std::uint32_t systematic_sent_ = 0;
    std::uint64_t repair_queue_ = 0;
    bool repair_burst_ = false;
    std::int64_t nack_cd = -1;
    std::int64_t decode_cd = -1;
    bool nack_pending_ = false;
    std::uint32_t retries_ = 0;
};

} // namespace

SimResult simulate(const SimConfig& cfg, const TraceSink& trace) {
    if (!cfg.topo) throw std::invalid_argument("simulate: topology required");
    const Topology& topo = *cfg.topo;
    const ProtocolConfig& proto = cfg.proto;

    Field field(proto.field);

    Rng page_rng = Rng::derive(cfg.root_seed, cfg.replicate, cfg.stream_tag + "/page");
    Page page = Page::random(0, proto.k, proto.L, page_rng);

    Rng channel_rng = Rng::derive(cfg.root_seed, cfg.replicate, cfg.stream_tag + "/channel");

    SpatialArbiter arbiter(topo);
    CoopSchedule coop;
    if (proto.kind == ProtocolKind::Coop)
        coop = CoopSchedule::build(topo, proto, cfg.root_seed, cfg.replicate,
                                   cfg.stream_tag);

    Shared sh{&topo, &proto, &field, &page, &arbiter,
              proto.kind == ProtocolKind::Coop ? &coop : nullptr};

    std::vector<std::unique_ptr<NodeBase>> nodes;
    for (NodeId i = 0; i < topo.size(); ++i) {
        Rng nrng = Rng::derive(cfg.root_seed, cfg.replicate,
                               cfg.stream_tag + "/node/" + topo.name(i));
        switch (proto.kind) {
            case ProtocolKind::Flood:
                nodes.push_back(std::make_unique<FloodNode>(sh, i, std::move(nrng)));
                break;
            case ProtocolKind::Deluge:
                nodes.push_back(std::make_unique<DelugeNode>(sh, i, std::move(nrng), false));
                break;
            case ProtocolKind::RatelessDeluge:
            case ProtocolKind::Synapse:
                nodes.push_back(std::make_unique<DelugeNode>(sh, i, std::move(nrng), true));
                break;
            case ProtocolKind::Coop:
                nodes.push_back(std::make_unique<CoopNode>(sh, i, std::move(nrng)));
                break;
        }
    }

    std::vector<std::uint32_t> tx_ordinals(topo.size(), 0);

    struct Delivery {
        NodeId from, to;
        const Message* msg;
    };
    std::vector<Message> slot_msgs;
    std::vector<Delivery> slot_deliveries;

    Engine engine;
    engine.schedule(0, kNoNode, EventKind::SlotBoundary);

    auto all_complete = [&] {
        for (const auto& n : nodes)
            if (!n->complete()) return false;
        return true;
    };

    auto handler = [&](const Event& ev) {
        if (ev.kind == EventKind::SlotBoundary) {
            std::uint64_t slot = ev.fire_time;
            slot_msgs.clear();
            slot_deliveries.clear();

            std::vector<Transmission> txs;
            std::vector<NodeId> senders;
            for (NodeId i = 0; i < topo.size(); ++i) {
                auto m = nodes[i]->poll(slot);
                if (!m) continue;
                ++nodes[i]->stats.tx;
                if (m->kind == Message::Kind::Data && m->codeword)
                    nodes[i]->stats.header_bits +=
                        static_cast<std::uint64_t>(proto.k) *
                        field.spec().bits_per_symbol();
                slot_msgs.push_back(std::move(*m));
                txs.push_back({i, slot, ++tx_ordinals[i]});
                senders.push_back(i);
                if (trace)
                    trace(format_message(topo, slot, i, slot_msgs.back(), proto.k));
            }

            if (!txs.empty()) {
                auto receivers = deliver_slot(topo, cfg.channel, txs, cfg.script,
                                              channel_rng);
                for (std::size_t t = 0; t < txs.size(); ++t)
                    for (NodeId r : receivers[t])
                        slot_deliveries.push_back({senders[t], r, &slot_msgs[t]});
                for (std::size_t d = 0; d < slot_deliveries.size(); ++d)
                    engine.schedule(slot, slot_deliveries[d].to,
                                    EventKind::PacketDelivery, d);
            }
            engine.schedule(slot + 1, kNoNode, EventKind::SlotBoundary);
        } else if (ev.kind == EventKind::PacketDelivery) {
            const Delivery& d = slot_deliveries[ev.payload_index];
            ++nodes[d.to]->stats.rx;
            nodes[d.to]->deliver(d.from, *d.msg, ev.fire_time);
        }
    };

    SimOutcome outcome = engine.run_until(all_complete, cfg.max_slots, handler);

    SimResult res;
    res.completion_slots = outcome.completion_time;
    res.timed_out = outcome.timed_out;
    for (auto& n : nodes) {
        NodeStats s = n->stats;
        s.complete = n->complete();
        s.rank_or_have = n->rank_or_have();
        s.row_ops = n->row_ops();
        res.tx_total += s.tx;
        res.rx_total += s.rx;
        res.redundant_total += s.redundant_rx;
        res.nacks_total += s.nacks_sent;
        res.row_ops_total += s.row_ops;
        res.header_bits_total += s.header_bits;
        res.nodes.push_back(std::move(s));
    }
    return res;
}

} // namespace oapsim
