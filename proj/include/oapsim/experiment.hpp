#ifndef OAPSIM_EXPERIMENT_HPP
#define OAPSIM_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "oapsim/protocols.hpp"

namespace oapsim {

// One experiment description: which protocols to compare, over which
// topology, erasure rates, and packet counts, with how many replicates.
struct Scenario {
    std::string name;
    std::string topology = "fig1";
    std::vector<double> erasures = {0.3};
    std::vector<ProtocolKind> protocols;
    std::vector<std::uint32_t> ks = {4};
    std::uint32_t L = 20;
    std::uint32_t replicates = 100;
    std::uint64_t root_seed = 1;
    std::uint64_t max_slots = 20000;
    CollisionModel collision;

    // Scripted drops by node name; resolved against the topology at run time.
    struct DropSpec {
        std::string sender;
        std::uint32_t ordinal = 0;
        std::string receiver;
        bool operator==(const DropSpec&) const = default;
    };
    std::vector<DropSpec> script;
    // Robust soliton parameters for the sparse LT baseline.
    double lt_c = 0.1;
    double lt_delta = 0.5;

    static Scenario parse(const std::string& text);
    std::string serialize() const;

    // Builtin names (fig1.scripted, fig2.scenario, grid100.scenario) or a
    // scenario file path.
    static Scenario load(const std::string& ref);

    static Scenario builtin_fig1_scripted();
    static Scenario builtin_fig2();
    static Scenario builtin_grid100();
};

struct ResultRow {
    std::string scenario;
    std::string protocol;
    std::uint32_t k = 0;
    double erasure = 0.0;
    std::uint64_t seed = 0; // replicate index under the scenario root seed
    std::uint64_t completion_slots = 0;
    bool timed_out = false;
    std::uint64_t tx_total = 0;
    std::uint64_t rx_total = 0;
    std::uint64_t redundant_rx = 0;
    std::uint64_t nacks = 0;
    std::uint64_t decoder_row_ops = 0;
    std::uint64_t header_bits = 0;
};

// Column order is the CSV schema; keep in sync with emit_csv.
extern const char* const kResultCsvHeader;

// Runs every (protocol, erasure, k, replicate) cell. Replicates may run on
// `jobs` threads; rows are sorted by (protocol, k, erasure, seed) before
// returning so output is order-deterministic.
std::vector<ResultRow> run_scenario(const Scenario& s, unsigned jobs = 1);

struct SummaryRow {
    std::string scenario;
    std::string protocol;
    std::uint32_t k = 0;
    double erasure = 0.0;
    std::uint32_t replicates = 0;
    std::uint32_t timeouts = 0;
    bool available = false; // false when every replicate timed out
    double mean = 0.0, sd = 0.0;
    std::uint64_t min = 0, max = 0;
    // Completion-time reduction of coop relative to the best (fastest)
    // baseline in the same (k, erasure) group; only set on coop rows.
    double coop_reduction_pct = 0.0;
    bool has_reduction = false;
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::string rows_to_csv(const std::vector<ResultRow>& rows);
void emit_summary(const std::vector<SummaryRow>& rows, const std::string& path);
// One SVG per erasure value: mean completion time vs k, one series per
// protocol. Returns the files written.
std::vector<std::string> emit_plot(const std::vector<ResultRow>& rows,
                                   const std::string& out_dir,
                                   const std::string& basename);

} // namespace oapsim

#endif
