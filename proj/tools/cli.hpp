#pragma once

// leaksim command-line front end. Verbs: run, plot, plan, dump-circuit.
// Exit codes: 0 success, 1 failed validation / internal error,
// 2 usage or configuration error, 3 I/O error.

#include "leaksim/leaksim.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef LEAKSIM_VERSION
#define LEAKSIM_VERSION "dev"
#endif

namespace leaksim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error("invalid " + field + ": " + what) {}
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "0.01" or "0.005:0.02".
inline AmplitudeSpec parse_amplitude(const std::string& field, const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (s.empty() || used != s.size() || !std::isfinite(v)) throw ConfigError(field, "'" + text + "' is not a number");
        if (v < 0) throw ConfigError(field, "amplitudes must be non-negative");
        return v;
    };
    const auto colon = text.find(':');
    if (colon == std::string::npos) return AmplitudeSpec::fixed(number(text));
    const double lo = number(text.substr(0, colon)), hi = number(text.substr(colon + 1));
    if (lo > hi) throw ConfigError(field, "range lower bound exceeds upper bound");
    return AmplitudeSpec::range(lo, hi);
}

struct ExperimentConfig {
    std::string scheme = "standard";
    long long cycles = 200;
    long long trajectories = 1;
    std::uint64_t seed = 0;
    int bell = 0;
    bool ideal = false;
    std::string chi = "0.01";
    std::string zeta = "0.01";
    bool resample_per_gate = false;
    std::vector<std::string> inject;
    std::string out = "leaksim-out";

    /// Checked translation into a trajectory config.
    TrajectoryConfig trajectory_config() const {
        TrajectoryConfig t;
        if (scheme != "standard" && scheme != "swap") throw ConfigError("scheme", "must be 'standard' or 'swap'");
        t.scheme = parse_scheme(scheme);
        if (cycles < 1) throw ConfigError("cycles", "must be >= 1");
        if (trajectories < 1) throw ConfigError("trajectories", "must be >= 1");
        if (bell < 0 || bell > 3) throw ConfigError("bell", "must be 0, 1, 2 or 3");
        t.cycles = static_cast<std::size_t>(cycles);
        t.seed = seed;
        t.bell_index = bell;
        if (ideal) {
            t.noise = NoisePolicy::ideal();
        } else {
            t.noise.chi = parse_amplitude("chi", chi);
            t.noise.zeta = parse_amplitude("zeta", zeta);
        }
        t.noise.resample_per_gate = resample_per_gate;
        for (const auto& s : inject) {
            try {
                t.injections.push_back(Injection::parse(s));
            } catch (const std::invalid_argument& e) {
                throw ConfigError("inject", e.what());
            }
        }
        return t;
    }

    nlohmann::json to_json() const {
        return {{"scheme", scheme},       {"cycles", cycles},
                {"trajectories", trajectories},
                {"seed", seed},           {"bell", bell},
                {"ideal", ideal},         {"chi", chi},
                {"zeta", zeta},           {"resample_per_gate", resample_per_gate},
                {"inject", inject},       {"out", out}};
    }

    /// Apply the keys present in a JSON config object.
    void merge(const nlohmann::json& j) {
        if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");
        static const std::set<std::string> known = {"scheme", "cycles", "trajectories", "seed", "bell", "ideal",
                                                    "chi", "zeta", "resample_per_gate", "inject", "out"};
        for (const auto& [key, value] : j.items())
            if (!known.contains(key)) throw ConfigError(key, "unknown config key");
        auto get = [&](const char* key, auto& dst) {
            if (!j.contains(key)) return;
            try {
                j.at(key).get_to(dst);
            } catch (const nlohmann::json::exception&) {
                throw ConfigError(key, "wrong type in config file");
            }
        };
        auto get_amp = [&](const char* key, std::string& dst) {
            if (!j.contains(key)) return;
            const auto& v = j.at(key);
            if (v.is_number()) {
                std::ostringstream s;
                s << v.get<double>();
                dst = s.str();
            } else if (v.is_string()) {
                dst = v.get<std::string>();
            } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
                std::ostringstream s;
                s << v[0].get<double>() << ":" << v[1].get<double>();
                dst = s.str();
            } else {
                throw ConfigError(key, "expected a number, \"lo:hi\" or [lo, hi]");
            }
        };
        get("scheme", scheme);
        get("cycles", cycles);
        get("trajectories", trajectories);
        get("seed", seed);
        get("bell", bell);
        get("ideal", ideal);
        get_amp("chi", chi);
        get_amp("zeta", zeta);
        get("resample_per_gate", resample_per_gate);
        get("inject", inject);
        get("out", out);
    }
};

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", path + ": " + e.what());
    }
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string trajectory_file_name(std::size_t index) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "trajectory_%04zu.csv", index);
    return buf;
}

//============================================================================
// Verbs
//============================================================================

inline int cmd_run(const ExperimentConfig& cfg, std::ostream& out) {
    const TrajectoryConfig base = cfg.trajectory_config();
    const auto count = static_cast<std::size_t>(cfg.trajectories);
    const auto logs = run_batch(base, count);

    const std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t i = 0; i < logs.size(); ++i) {
        std::ostringstream csv;
        write_csv(csv, logs[i].records);
        const std::string name = trajectory_file_name(i);
        write_file(dir / name, csv.str());
        runs.push_back({{"index", i},
                        {"seed", logs[i].seed},
                        {"file", name},
                        {"noise", logs[i].noise.empty() ? nlohmann::json("resampled per gate") : to_json(logs[i].noise)}});
    }

    const nlohmann::json manifest = {{"tool", "leaksim"},
                                     {"version", LEAKSIM_VERSION},
                                     {"config", cfg.to_json()},
                                     {"trajectories", runs},
                                     {"generated_at", utc_timestamp()}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << logs.size() << " trajectory trace(s) and manifest.json to " << dir.string() << "\n";
    return kExitOk;
}

inline int cmd_plot(const std::string& trace, const std::string& image, std::ostream& out) {
    std::ifstream in(trace);
    if (!in) throw IoError("cannot open " + trace);
    std::vector<CycleRecord> records;
    try {
        records = read_csv(in);
    } catch (const TraceFormatError& e) {
        throw ConfigError("trace", trace + ": " + e.what());
    }
    write_file(image, render_svg(records, std::filesystem::path(trace).filename().string()));
    out << "wrote " << image << " (" << records.size() << " cycles)\n";
    return kExitOk;
}

inline int cmd_plan(int distance, const std::string& path, std::ostream& out) {
    if (distance < 2) throw ConfigError("distance", "distance must be ≥ 2");
    const auto layout = surface::build_layout(distance);
    const auto schedule = surface::build_schedule(layout);
    const auto report = surface::validate(layout, schedule);
    if (!path.empty()) write_file(path, surface::to_json(layout, schedule).dump(2) + "\n");
    surface::print_report(out, report);
    return report.ok() ? kExitOk : kExitFailed;
}

inline int cmd_dump_circuit(const ExperimentConfig& cfg, const std::string& path, std::ostream& out) {
    TrajectoryConfig t = cfg.trajectory_config();
    t.noise.resample_per_gate = false;
    Rng noise_rng(derive_seed(t.seed, kNoiseStream));
    const NoiseTable table = NoiseTable::sample(noise_rng, t.noise);

    nlohmann::json cycles = nlohmann::json::array();
    RegisterRoles roles = RegisterRoles::initial();
    if (t.scheme == Scheme::standard) {
        cycles.push_back({{"roles", to_json(roles)}, {"circuit", to_json(standard_cycle(roles, table))}});
    } else {
        for (const char* parity : {"odd", "even"}) {
            const SwapCycle sc = swap_cycle(roles, table);
            cycles.push_back({{"parity", parity}, {"roles", to_json(roles)}, {"circuit", to_json(sc.circuit)}});
            roles = sc.roles_after;
        }
    }
    const nlohmann::json dump = {{"scheme", to_string(t.scheme)}, {"seed", t.seed}, {"noise", to_json(table)}, {"cycles", cycles}};
    if (path.empty()) out << dump.dump(2) << "\n";
    else write_file(path, dump.dump(2) + "\n");
    return kExitOk;
}

//============================================================================
// Argument parsing
//============================================================================

/// Options shared by run and dump-circuit; each records whether it was given.
struct ExperimentFlags {
    std::string scheme, chi, zeta, out, config;
    long long cycles = 0, trajectories = 0;
    std::uint64_t seed = 0;
    int bell = 0;
    bool ideal = false, resample = false;
    std::vector<std::string> inject;
    std::map<std::string, CLI::Option*> opts;

    void add_to(CLI::App& app, bool full) {
        opts["scheme"] = app.add_option("--scheme", scheme, "standard or swap");
        opts["seed"] = app.add_option("--seed", seed, "base random seed");
        opts["ideal"] = app.add_flag("--ideal", ideal, "ideal gates (no CZ noise, zero dynamical phases)");
        opts["chi"] = app.add_option("--chi", chi, "exchange amplitude: value or lo:hi range");
        opts["zeta"] = app.add_option("--zeta", zeta, "diagonal error amplitude: value or lo:hi range");
        opts["config"] = app.add_option("--config", config, "JSON config file; flags override it");
        if (!full) return;
        opts["cycles"] = app.add_option("--cycles", cycles, "cycles per trajectory");
        opts["trajectories"] = app.add_option("--trajectories", trajectories, "number of trajectories");
        opts["bell"] = app.add_option("--bell", bell, "initial Bell state 0..3 (Phi+, Phi-, Psi+, Psi-)");
        opts["resample_per_gate"] = app.add_flag("--resample-per-gate", resample, "draw fresh CZ noise at every application");
        opts["inject"] = app.add_option("--inject", inject, "leak event CYCLE:SITE (SITE = data0|data1|zz|xx|0-3); repeatable");
        opts["out"] = app.add_option("--out", out, "output directory");
    }

    bool given(const std::string& name) const {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (given("config")) cfg.merge(read_json_file(config));
        if (given("scheme")) cfg.scheme = scheme;
        if (given("seed")) cfg.seed = seed;
        if (given("ideal")) cfg.ideal = ideal;
        if (given("chi")) cfg.chi = chi;
        if (given("zeta")) cfg.zeta = zeta;
        if (given("cycles")) cfg.cycles = cycles;
        if (given("trajectories")) cfg.trajectories = trajectories;
        if (given("bell")) cfg.bell = bell;
        if (given("resample_per_gate")) cfg.resample_per_gate = resample;
        if (given("inject")) cfg.inject = inject;
        if (given("out")) cfg.out = out;
        return cfg;
    }
};

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"leaksim: qutrit leakage simulator for repetitive stabilizer measurement"};
    app.require_subcommand(1);

    ExperimentFlags run_flags;
    auto* run = app.add_subcommand("run", "simulate trajectories and write CSV traces plus a JSON manifest");
    run_flags.add_to(*run, true);

    std::string trace, image;
    auto* plot = app.add_subcommand("plot", "render a trace CSV as a two-panel SVG");
    plot->add_option("trace", trace, "trace CSV written by 'run'")->required();
    plot->add_option("--out", image, "output SVG path")->required();

    int distance = 0;
    std::string plan_out;
    auto* plan = app.add_subcommand("plan", "build and validate the surface-code SWAP schedule");
    plan->add_option("--distance", distance, "code distance d >= 2")->required();
    plan->add_option("--out", plan_out, "layout/schedule JSON path");

    ExperimentFlags dump_flags;
    std::string dump_out;
    auto* dump = app.add_subcommand("dump-circuit", "print the cycle circuits with their gate matrices as JSON");
    dump_flags.add_to(*dump, false);
    dump->add_option("--out", dump_out, "output JSON path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*run) return cmd_run(run_flags.resolve(), out);
        if (*plot) return cmd_plot(trace, image, out);
        if (*plan) return cmd_plan(distance, plan_out, out);
        if (*dump) return cmd_dump_circuit(dump_flags.resolve(), dump_out, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitFailed;
    }
    return kExitUsage;
}

} // namespace leaksim::cli
