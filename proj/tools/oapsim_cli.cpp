#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oapsim/experiment.hpp"

using namespace oapsim;

namespace {

int cmd_run(const std::string& scenario_ref, std::uint64_t root_seed,
            bool seed_given, const std::string& out_dir, const std::string& format,
            const std::vector<std::string>& protocols, unsigned jobs) {
    Scenario s = Scenario::load(scenario_ref);
    if (seed_given) s.root_seed = root_seed;
    if (!protocols.empty()) {
        s.protocols.clear();
        for (const auto& p : protocols) s.protocols.push_back(parse_protocol(p));
    }

    std::filesystem::create_directories(out_dir);
    auto rows = run_scenario(s, jobs);
    auto summary = summarize(rows);

    if (format == "csv" || format == "both") {
        emit_csv(rows, out_dir + "/results.csv");
        emit_summary(summary, out_dir + "/summary.csv");
        std::cout << "wrote " << out_dir << "/results.csv (" << rows.size()
                  << " rows)\n";
        std::cout << "wrote " << out_dir << "/summary.csv\n";
    }
    if (format == "plot" || format == "both") {
        for (const auto& f : emit_plot(rows, out_dir, s.name))
            std::cout << "wrote " << f << "\n";
    }

    for (const auto& g : summary) {
        std::cout << g.protocol << " k=" << g.k << " e=" << g.erasure << ": ";
        if (g.available) {
            std::cout << "mean=" << g.mean << " sd=" << g.sd << " min=" << g.min
                      << " max=" << g.max;
            if (g.timeouts) std::cout << " timeouts=" << g.timeouts;
            if (g.has_reduction)
                std::cout << " reduction_vs_best_baseline=" << g.coop_reduction_pct
                          << "%";
        } else {
            std::cout << "all " << g.timeouts << " replicates timed out";
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_trace(const std::string& scenario_ref, const std::string& protocol,
              const std::string& out_file) {
    Scenario s = Scenario::load(scenario_ref);
    Topology topo = Topology::from_name_or_file(s.topology);

    std::vector<ScriptedDrop> script;
    for (const auto& d : s.script)
        script.push_back({topo.id_of(d.sender), d.ordinal, topo.id_of(d.receiver)});

    ProtocolKind kind = protocol.empty() ? s.protocols.front() : parse_protocol(protocol);

    SimConfig cfg;
    cfg.topo = &topo;
    cfg.channel.default_erasure = s.erasures.front();
    cfg.channel.collision = s.collision;
    cfg.proto = ProtocolConfig::defaults_for(kind, s.ks.front(), s.L);
    if (kind == ProtocolKind::Synapse)
        cfg.proto.dist = DegreeDistribution::sparse_lt(s.lt_c, s.lt_delta);
    cfg.max_slots = s.max_slots;
    cfg.root_seed = s.root_seed;
    cfg.replicate = 0;
    cfg.script = script;
    // Match run_scenario's tag formatting so traces replay the same run.
    char eps_buf[32];
    std::snprintf(eps_buf, sizeof eps_buf, "%g", s.erasures.front());
    cfg.stream_tag = protocol_name(kind) + "/k" + std::to_string(s.ks.front()) +
                     "/e" + eps_buf;

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_file.empty()) {
        file.open(out_file, std::ios::binary);
        if (!file) {
            std::cerr << "cannot open " << out_file << "\n";
            return 1;
        }
        out = &file;
    }

    SimResult res = simulate(cfg, [&](const std::string& line) { *out << line << "\n"; });
    std::cerr << "completion_slots=" << res.completion_slots
              << " timed_out=" << (res.timed_out ? 1 : 0) << " tx=" << res.tx_total
              << " nacks=" << res.nacks_total << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative coded OAP dissemination simulator"};
    app.require_subcommand(1);

    std::string scenario_ref, out_dir = "out", format = "csv", protocol, out_file;
    std::vector<std::string> protocols;
    std::uint64_t root_seed = 0;
    unsigned jobs = 1;

    auto* run = app.add_subcommand("run", "Run a scenario sweep");
    run->add_option("--scenario", scenario_ref,
                    "Scenario file or builtin (fig1.scripted, fig2.scenario, "
                    "grid100.scenario)")
        ->required();
    auto* seed_opt = run->add_option("--root-seed", root_seed, "Override the scenario root seed");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--format", format, "csv|plot|both")
        ->check(CLI::IsMember({"csv", "plot", "both"}));
    run->add_option("--protocols", protocols, "Restrict to these protocols");
    run->add_option("--jobs", jobs, "Worker threads for replicates");

    auto* trace = app.add_subcommand("trace", "Dump the per-slot message trace of one run");
    trace->add_option("--scenario", scenario_ref, "Scenario file or builtin")->required();
    trace->add_option("--protocol", protocol, "Protocol to trace");
    trace->add_option("--out", out_file, "Write trace to file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(scenario_ref, root_seed, seed_opt->count() > 0, out_dir,
                           format, protocols, jobs);
        return cmd_trace(scenario_ref, protocol, out_file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
