#include "oapsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace oapsim {

// ------------------------------------------------------------- Scenario

Scenario Scenario::parse(const std::string& text) {
    Scenario s;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto fail = [&](const std::string& msg) {
            throw std::runtime_error("scenario line " + std::to_string(lineno) + ": " + msg);
        };
        if (kw == "name") {
            if (!(ls >> s.name)) fail("name needs a value");
        } else if (kw == "topology") {
            if (!(ls >> s.topology)) fail("topology needs a value");
        } else if (kw == "erasure") {
            s.erasures.clear();
            double e;
            while (ls >> e) {
                if (e < 0.0 || e > 1.0) fail("erasure out of [0,1]");
                s.erasures.push_back(e);
            }
            if (s.erasures.empty()) fail("erasure needs at least one value");
        } else if (kw == "protocols") {
            s.protocols.clear();
            std::string p;
            while (ls >> p) s.protocols.push_back(parse_protocol(p));
            if (s.protocols.empty()) fail("protocols needs at least one entry");
        } else if (kw == "k") {
            s.ks.clear();
            std::uint32_t k;
            while (ls >> k) {
                if (k < 1) fail("k must be >= 1");
                s.ks.push_back(k);
            }
            if (s.ks.empty()) fail("k needs at least one value");
        } else if (kw == "L") {
            if (!(ls >> s.L) || s.L < 1) fail("L must be >= 1");
        } else if (kw == "replicates") {
            if (!(ls >> s.replicates) || s.replicates < 1) fail("replicates must be >= 1");
        } else if (kw == "root_seed") {
            if (!(ls >> s.root_seed)) fail("root_seed needs a value");
        } else if (kw == "max_slots") {
            if (!(ls >> s.max_slots) || s.max_slots < 1) fail("max_slots must be >= 1");
        } else if (kw == "collision") {
            std::string mode;
            if (!(ls >> mode)) fail("collision needs a mode");
            if (mode == "none") {
                s.collision = {};
            } else if (mode == "bernoulli") {
                double p;
                if (!(ls >> p) || p < 0.0 || p > 1.0)
                    fail("collision bernoulli needs p in [0,1]");
                s.collision = {CollisionModel::Kind::Bernoulli, p};
            } else {
                fail("unknown collision mode: " + mode);
            }
        } else if (kw == "scripted_drop") {
            DropSpec d;
            if (!(ls >> d.sender >> d.ordinal >> d.receiver) || d.ordinal < 1)
                fail("scripted_drop needs <sender> <ordinal> <receiver>");
            s.script.push_back(d);
        } else if (kw == "lt_params") {
            if (!(ls >> s.lt_c >> s.lt_delta)) fail("lt_params needs <c> <delta>");
        } else {
            fail("unknown keyword: " + kw);
        }
    }
    if (s.protocols.empty()) throw std::runtime_error("scenario lists no protocols");
    return s;
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

std::string Scenario::serialize() const {
    std::ostringstream out;
    out << "name " << name << "\n";
    out << "topology " << topology << "\n";
    out << "erasure";
    for (double e : erasures) out << " " << fmt_double(e);
    out << "\nprotocols";
    for (auto p : protocols) out << " " << protocol_name(p);
    out << "\nk";
    for (auto k : ks) out << " " << k;
    out << "\nL " << L << "\n";
    out << "replicates " << replicates << "\n";
    out << "root_seed " << root_seed << "\n";
    out << "max_slots " << max_slots << "\n";
    if (collision.kind == CollisionModel::Kind::Bernoulli)
        out << "collision bernoulli " << fmt_double(collision.p) << "\n";
    else
        out << "collision none\n";
    if (lt_c != 0.1 || lt_delta != 0.5)
        out << "lt_params " << fmt_double(lt_c) << " " << fmt_double(lt_delta) << "\n";
    for (const auto& d : script)
        out << "scripted_drop " << d.sender << " " << d.ordinal << " " << d.receiver << "\n";
    return out.str();
}

Scenario Scenario::builtin_fig1_scripted() {
    Scenario s;
    s.name = "fig1_scripted";
    s.topology = "fig1";
    s.erasures = {0.0};
    s.protocols = {ProtocolKind::Coop};
    s.ks = {4};
    s.L = 20;
    s.replicates = 1;
    s.root_seed = 7;
    s.max_slots = 500;
    // The source's first four transmissions are the four packets in order:
    // packet 2 is lost at N2, packets 1 and 4 are lost at N3.
    s.script = {{"N1", 2, "N2"}, {"N1", 1, "N3"}, {"N1", 4, "N3"}};
    return s;
}

Scenario Scenario::builtin_fig2() {
    Scenario s;
    s.name = "fig2";
    s.topology = "fig1";
    s.erasures = {0.1, 0.2, 0.3, 0.5};
    s.protocols = {ProtocolKind::Coop, ProtocolKind::Synapse,
                   ProtocolKind::RatelessDeluge, ProtocolKind::Deluge,
                   ProtocolKind::Flood};
    s.ks = {4, 8, 16, 24, 32, 40, 48};
    s.L = 20;
    s.replicates = 100;
    s.root_seed = 1;
    s.max_slots = 20000;
    return s;
}

Scenario Scenario::builtin_grid100() {
    Scenario s;
    s.name = "grid100";
    s.topology = "grid(10x10)";
    s.erasures = {0.2};
    s.protocols = {ProtocolKind::Coop, ProtocolKind::Synapse,
                   ProtocolKind::RatelessDeluge, ProtocolKind::Deluge};
    s.ks = {48};
    s.L = 20;
    s.replicates = 5;
    s.root_seed = 1;
    s.max_slots = 200000;
    return s;
}

Scenario Scenario::load(const std::string& ref) {
    if (ref == "fig1.scripted") return builtin_fig1_scripted();
    if (ref == "fig2.scenario") return builtin_fig2();
    if (ref == "grid100.scenario") return builtin_grid100();
    std::ifstream f(ref);
    if (!f) throw std::runtime_error("cannot open scenario: " + ref);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

// ---------------------------------------------------------- run_scenario

const char* const kResultCsvHeader =
    "scenario,protocol,k,erasure,seed,completion_slots,timed_out,tx_total,"
    "rx_total,redundant_rx,nacks,decoder_row_ops,header_bits";

std::vector<ResultRow> run_scenario(const Scenario& s, unsigned jobs) {
    Topology topo = Topology::from_name_or_file(s.topology);

    std::vector<ScriptedDrop> script;
    for (const auto& d : s.script)
        script.push_back({topo.id_of(d.sender), d.ordinal, topo.id_of(d.receiver)});

    struct Cell {
        ProtocolKind proto;
        double erasure;
        std::uint32_t k;
        std::uint64_t replicate;
    };
    std::vector<Cell> cells;
    for (auto p : s.protocols)
        for (double e : s.erasures)
            for (auto k : s.ks)
                for (std::uint64_t r = 0; r < s.replicates; ++r)
                    cells.push_back({p, e, k, r});

    std::vector<ResultRow> rows(cells.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];

            SimConfig cfg;
            cfg.topo = &topo;
            cfg.channel.default_erasure = c.erasure;
            cfg.channel.collision = s.collision;
            cfg.proto = ProtocolConfig::defaults_for(c.proto, c.k, s.L);
            if (c.proto == ProtocolKind::Synapse)
                cfg.proto.dist = DegreeDistribution::sparse_lt(s.lt_c, s.lt_delta);
            cfg.max_slots = s.max_slots;
            cfg.root_seed = s.root_seed;
            cfg.replicate = c.replicate;
            cfg.script = script;
            cfg.stream_tag = protocol_name(c.proto) + "/k" + std::to_string(c.k) +
                             "/e" + fmt_double(c.erasure);

            SimResult r = simulate(cfg);

            ResultRow& row = rows[i];
            row.scenario = s.name;
            row.protocol = protocol_name(c.proto);
            row.k = c.k;
            row.erasure = c.erasure;
            row.seed = c.replicate;
            row.completion_slots = r.timed_out ? 0 : r.completion_slots;
            row.timed_out = r.timed_out;
            row.tx_total = r.tx_total;
            row.rx_total = r.rx_total;
            row.redundant_rx = r.redundant_total;
            row.nacks = r.nacks_total;
            row.decoder_row_ops = r.row_ops_total;
            row.header_bits = r.header_bits_total;
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.protocol != b.protocol) return a.protocol < b.protocol;
        if (a.k != b.k) return a.k < b.k;
        if (a.erasure != b.erasure) return a.erasure < b.erasure;
        return a.seed < b.seed;
    });
    return rows;
}

// ------------------------------------------------------------- summarize

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("summarize: no rows");

    struct Key {
        std::string protocol;
        std::uint32_t k;
        double erasure;
        bool operator<(const Key& o) const {
            if (protocol != o.protocol) return protocol < o.protocol;
            if (k != o.k) return k < o.k;
            return erasure < o.erasure;
        }
    };
    std::map<Key, std::vector<const ResultRow*>> groups;
    for (const auto& r : rows) groups[{r.protocol, r.k, r.erasure}].push_back(&r);

    std::vector<SummaryRow> out;
    for (const auto& [key, grp] : groups) {
        SummaryRow s;
        s.scenario = grp.front()->scenario;
        s.protocol = key.protocol;
        s.k = key.k;
        s.erasure = key.erasure;
        s.replicates = static_cast<std::uint32_t>(grp.size());
        std::vector<std::uint64_t> vals;
        for (const auto* r : grp) {
            if (r->timed_out)
                ++s.timeouts;
            else
                vals.push_back(r->completion_slots);
        }
        if (!vals.empty()) {
            s.available = true;
            double sum = 0;
            s.min = vals.front();
            s.max = vals.front();
            for (auto v : vals) {
                sum += static_cast<double>(v);
                s.min = std::min(s.min, v);
                s.max = std::max(s.max, v);
            }
            s.mean = sum / static_cast<double>(vals.size());
            double var = 0;
            for (auto v : vals) {
                double d = static_cast<double>(v) - s.mean;
                var += d * d;
            }
            s.sd = vals.size() > 1 ? std::sqrt(var / (vals.size() - 1)) : 0.0;
        }
        out.push_back(std::move(s));
    }

    // Coop's relative reduction against the fastest baseline per (k, erasure).
    for (auto& s : out) {
        if (s.protocol != "coop" || !s.available) continue;
        double best = -1;
        for (const auto& o : out) {
            if (o.protocol == "coop" || o.k != s.k || o.erasure != s.erasure ||
                !o.available)
                continue;
            if (best < 0 || o.mean < best) best = o.mean;
        }
        if (best > 0) {
            s.coop_reduction_pct = 100.0 * (best - s.mean) / best;
            s.has_reduction = true;
        }
    }
    return out;
}

// ------------------------------------------------------------------ emit

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << kResultCsvHeader << "\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << r.protocol << ',' << r.k << ','
            << fmt_double(r.erasure) << ',' << r.seed << ',' << r.completion_slots
            << ',' << (r.timed_out ? 1 : 0) << ',' << r.tx_total << ',' << r.rx_total
            << ',' << r.redundant_rx << ',' << r.nacks << ',' << r.decoder_row_ops
            << ',' << r.header_bits << "\n";
    }
    return out.str();
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    write_file(path, rows_to_csv(rows));
}

void emit_summary(const std::vector<SummaryRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << "scenario,protocol,k,erasure,replicates,timeouts,mean,sd,min,max,"
           "coop_reduction_pct\n";
    for (const auto& s : rows) {
        out << s.scenario << ',' << s.protocol << ',' << s.k << ','
            << fmt_double(s.erasure) << ',' << s.replicates << ',' << s.timeouts << ',';
        if (s.available)
            out << fmt_double(s.mean) << ',' << fmt_double(s.sd) << ',' << s.min << ','
                << s.max;
        else
            out << "unavailable,,,";
        out << ',';
        if (s.has_reduction) out << fmt_double(s.coop_reduction_pct);
        out << "\n";
    }
    write_file(path, out.str());
}

std::vector<std::string> emit_plot(const std::vector<ResultRow>& rows,
                                   const std::string& out_dir,
                                   const std::string& basename) {
    auto summary = summarize(rows);

    std::vector<double> erasures;
    for (const auto& s : summary)
        if (std::find(erasures.begin(), erasures.end(), s.erasure) == erasures.end())
            erasures.push_back(s.erasure);
    std::sort(erasures.begin(), erasures.end());

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
    std::vector<std::string> written;

    for (double eps : erasures) {
        std::vector<std::string> protos;
        std::vector<std::uint32_t> ks;
        double ymax = 1;
        for (const auto& s : summary) {
            if (s.erasure != eps || !s.available) continue;
            if (std::find(protos.begin(), protos.end(), s.protocol) == protos.end())
                protos.push_back(s.protocol);
            if (std::find(ks.begin(), ks.end(), s.k) == ks.end()) ks.push_back(s.k);
            ymax = std::max(ymax, s.mean);
        }
        std::sort(ks.begin(), ks.end());
        if (protos.empty()) continue;

        const double W = 640, H = 420, ml = 70, mr = 150, mt = 30, mb = 50;
        const double pw = W - ml - mr, ph = H - mt - mb;
        double kmin = ks.front(), kmax = ks.back();
        if (kmax == kmin) kmax = kmin + 1;
        auto X = [&](double k) { return ml + (k - kmin) / (kmax - kmin) * pw; };
        auto Y = [&](double v) { return mt + ph - v / ymax * ph; };

        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
            << "\" height=\"" << H << "\">\n";
        svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
            << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
            << mt + ph << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 10
            << "\" text-anchor=\"middle\" font-size=\"13\">packets per page k</text>\n";
        svg << "<text x=\"18\" y=\"" << mt + ph / 2
            << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
            << mt + ph / 2 << ")\">mean completion time (slots)</text>\n";
        svg << "<text x=\"" << ml + pw / 2 << "\" y=\"18\" text-anchor=\"middle\" "
            << "font-size=\"13\">erasure " << fmt_double(eps) << "</text>\n";
        for (auto k : ks)
            svg << "<text x=\"" << X(k) << "\" y=\"" << mt + ph + 18
                << "\" text-anchor=\"middle\" font-size=\"11\">" << k << "</text>\n";
        for (int t = 0; t <= 4; ++t) {
            double v = ymax * t / 4;
            svg << "<text x=\"" << ml - 8 << "\" y=\"" << Y(v) + 4
                << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_double(v)
                << "</text>\n";
        }

        for (std::size_t p = 0; p < protos.size(); ++p) {
            std::ostringstream pts;
            for (auto k : ks)
                for (const auto& s : summary)
                    if (s.erasure == eps && s.protocol == protos[p] && s.k == k &&
                        s.available)
                        pts << X(k) << ',' << Y(s.mean) << ' ';
            const char* color = colors[p % 6];
            svg << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"2\" points=\"" << pts.str() << "\"/>\n";
            double ly = mt + 16 + 18 * static_cast<double>(p);
            svg << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << ly << "\" x2=\""
                << ml + pw + 36 << "\" y2=\"" << ly << "\" stroke=\"" << color
                << "\" stroke-width=\"2\"/>\n";
            svg << "<text x=\"" << ml + pw + 42 << "\" y=\"" << ly + 4
                << "\" font-size=\"12\">" << protos[p] << "</text>\n";
        }
        svg << "</svg>\n";

        std::string path =
            out_dir + "/" + basename + "_e" + fmt_double(eps) + ".svg";
        write_file(path, svg.str());
        written.push_back(path);
    }
    return written;
}

} // namespace oapsim
