#include "oapsim/netmodel.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace oapsim {

NodeId Topology::add_node(const std::string& name) {
    for (NodeId i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    names_.push_back(name);
    out_.emplace_back();
    return static_cast<NodeId>(names_.size() - 1);
}

void Topology::add_link(NodeId u, NodeId v, std::optional<double> eps, bool symmetric) {
    if (u == v) throw std::runtime_error("self-link on node " + names_[u]);
    if (eps && (*eps < 0.0 || *eps > 1.0))
        throw std::runtime_error("erasure probability out of [0,1]");
    out_[u].push_back({v, eps});
    if (symmetric) out_[v].push_back({u, eps});
}

void Topology::finalize() {
    if (source_ == kNoNode) throw std::runtime_error("topology has no source");
    const std::uint32_t n = size();
    const std::uint32_t inf = std::numeric_limits<std::uint32_t>::max();

    // Directed BFS from the source for hop labels.
    hops_.assign(n, inf);
    hops_[source_] = 0;
    std::deque<NodeId> q{source_};
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop_front();
        for (const auto& l : out_[u]) {
            if (hops_[l.to] == inf) {
                hops_[l.to] = hops_[u] + 1;
                q.push_back(l.to);
            }
        }
    }
    for (NodeId i = 0; i < n; ++i)
        if (hops_[i] == inf)
            throw std::runtime_error("node " + names_[i] + " unreachable from source");
    max_hop_ = *std::max_element(hops_.begin(), hops_.end());

    // All-pairs undirected BFS distances (graphs are desk-scale).
    std::vector<std::vector<NodeId>> und(n);
    for (NodeId u = 0; u < n; ++u)
        for (const auto& l : out_[u]) {
            und[u].push_back(l.to);
            und[l.to].push_back(u);
        }
    dist_.assign(n, std::vector<std::uint32_t>(n, inf));
    for (NodeId s = 0; s < n; ++s) {
        dist_[s][s] = 0;
        std::deque<NodeId> bq{s};
        while (!bq.empty()) {
            NodeId u = bq.front();
            bq.pop_front();
            for (NodeId v : und[u]) {
                if (dist_[s][v] == inf) {
                    dist_[s][v] = dist_[s][u] + 1;
                    bq.push_back(v);
                }
            }
        }
    }
}

NodeId Topology::id_of(const std::string& name) const {
    for (NodeId i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw std::runtime_error("unknown node " + name);
}

std::vector<NodeId> Topology::nodes_at_hop(std::uint32_t h) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < size(); ++i)
        if (hops_[i] == h) out.push_back(i);
    return out;
}

Topology Topology::fig1() {
    // Five nodes, two hops: N1 -> {N2,N3} -> {N4,N5}, with N2-N3 and N4-N5
    // overhearing each other. All links symmetric.
    Topology t;
    NodeId n1 = t.add_node("N1"), n2 = t.add_node("N2"), n3 = t.add_node("N3");
    NodeId n4 = t.add_node("N4"), n5 = t.add_node("N5");
    t.source_ = n1;
    t.add_link(n1, n2, {}, true);
    t.add_link(n1, n3, {}, true);
    t.add_link(n2, n3, {}, true);
    t.add_link(n2, n4, {}, true);
    t.add_link(n2, n5, {}, true);
    t.add_link(n3, n4, {}, true);
    t.add_link(n3, n5, {}, true);
    t.add_link(n4, n5, {}, true);
    t.finalize();
    return t;
}

Topology Topology::line(std::uint32_t n) {
    if (n < 1) throw std::runtime_error("line topology needs n >= 1");
    Topology t;
    for (std::uint32_t i = 0; i < n; ++i)
        t.add_node("N" + std::to_string(i + 1));
    t.source_ = 0;
    for (std::uint32_t i = 0; i + 1 < n; ++i)
        t.add_link(i, i + 1, {}, true);
    t.finalize();
    return t;
}

Topology Topology::grid(std::uint32_t rows, std::uint32_t cols) {
    if (rows < 1 || cols < 1) throw std::runtime_error("grid needs positive dimensions");
    Topology t;
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c)
            t.add_node("G" + std::to_string(r) + "_" + std::to_string(c));
    t.source_ = 0;
    auto id = [cols](std::uint32_t r, std::uint32_t c) { return r * cols + c; };
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) t.add_link(id(r, c), id(r, c + 1), {}, true);
            if (r + 1 < rows) t.add_link(id(r, c), id(r + 1, c), {}, true);
        }
    t.finalize();
    return t;
}

Topology Topology::parse(const std::string& text) {
    Topology t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::string source_name;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto fail = [&](const std::string& msg) {
            throw std::runtime_error("topology line " + std::to_string(lineno) + ": " + msg);
        };
        if (kw == "node") {
            std::string id;
            if (!(ls >> id)) fail("node needs an id");
            t.add_node(id);
        } else if (kw == "source") {
            if (!(ls >> source_name)) fail("source needs an id");
        } else if (kw == "default_erasure") {
            double e;
            if (!(ls >> e) || e < 0.0 || e > 1.0) fail("default_erasure needs a value in [0,1]");
            t.doc_default_ = e;
        } else if (kw == "link") {
            std::string u, v, extra;
            if (!(ls >> u >> v)) fail("link needs two node ids");
            std::optional<double> eps;
            if (ls >> extra) {
                if (extra.rfind("erasure=", 0) != 0) fail("unknown link attribute: " + extra);
                try {
                    eps = std::stod(extra.substr(8));
                } catch (const std::exception&) {
                    fail("bad erasure value");
                }
            }
            try {
                t.add_link(t.id_of(u), t.id_of(v), eps, true);
            } catch (const std::runtime_error& e) {
                fail(e.what());
            }
        } else {
            fail("unknown keyword: " + kw);
        }
    }
    if (source_name.empty()) throw std::runtime_error("topology document has no source line");
    t.source_ = t.id_of(source_name);
    t.finalize();
    return t;
}

Topology Topology::from_name_or_file(const std::string& ref) {
    if (ref == "fig1") return fig1();
    unsigned a = 0, b = 0;
    if (std::sscanf(ref.c_str(), "line(%u)", &a) == 1) return line(a);
    if (std::sscanf(ref.c_str(), "grid(%ux%u)", &a, &b) == 2) return grid(a, b);
    std::ifstream f(ref);
    if (!f) throw std::runtime_error("cannot open topology: " + ref);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::vector<std::vector<NodeId>> deliver_slot(const Topology& topo,
                                              const ChannelConfig& cfg,
                                              const std::vector<Transmission>& txs,
                                              const std::vector<ScriptedDrop>& script,
                                              Rng& rng) {
    std::unordered_set<NodeId> senders;
    for (const auto& tx : txs) {
        if (!senders.insert(tx.sender).second)
            throw std::invalid_argument("two transmissions from one sender in one slot");
    }

    std::vector<std::vector<NodeId>> out(txs.size());
    for (std::size_t i = 0; i < txs.size(); ++i) {
        const auto& tx = txs[i];
        for (const auto& link : topo.out(tx.sender)) {
            NodeId v = link.to;
            if (senders.count(v)) continue; // half-duplex

            bool dropped = false;
            for (const auto& d : script) {
                if (d.sender == tx.sender && d.receiver == v &&
                    d.tx_ordinal == tx.sender_tx_ordinal) {
                    dropped = true;
                    break;
                }
            }
            if (dropped) continue;

            double eps = link.erasure
                             ? *link.erasure
                             : topo.document_default_erasure().value_or(cfg.default_erasure);
            if (rng.bernoulli(eps)) continue;

            if (cfg.collision.kind == CollisionModel::Kind::Bernoulli) {
                // One extra erasure chance per concurrent transmitter that
                // is also audible at v.
                bool collided = false;
                for (const auto& other : txs) {
                    if (other.sender == tx.sender) continue;
                    bool audible = false;
                    for (const auto& ol : topo.out(other.sender))
                        if (ol.to == v) { audible = true; break; }
                    if (audible && rng.bernoulli(cfg.collision.p)) {
                        collided = true;
                        break;
                    }
                }
                if (collided) continue;
            }
            out[i].push_back(v);
        }
    }
    return out;
}

std::vector<NodeId> broadcast(const Topology& topo, const ChannelConfig& cfg,
                              const Transmission& tx, Rng& rng) {
    return deliver_slot(topo, cfg, {tx}, {}, rng)[0];
}

double erasure_failure_threshold(std::uint32_t rounds) {
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    return 1.0 - 1.0 / rounds;
}

} // namespace oapsim
