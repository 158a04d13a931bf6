#pragma once

#include "leaksim/protocol.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace leaksim {

inline const char* const kCsvHeader =
    "cycle,raw_zz,raw_xx,bit_zz,bit_xx,p_leak,bell_prediction,prediction_overlap,data_site_0,data_site_1";

/// Probabilities are printed with 12 significant digits, so round-off below
/// that never reaches a trace file.
inline std::string format_probability(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", p);
    return buf;
}

/// One CSV row per cycle. The data_site columns hold the data register
/// after the cycle's handoff.
inline void write_csv(std::ostream& out, const std::vector<CycleRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.cycle << ',' << int(r.raw_zz) << ',' << int(r.raw_xx) << ',' << r.bit_zz << ',' << r.bit_xx << ','
            << format_probability(r.p_leak) << ',' << r.bell_prediction << ','
            << format_probability(r.prediction_overlap) << ',' << r.roles_after.data[0] << ','
            << r.roles_after.data[1] << '\n';
    }
}

class TraceFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse a trace written by write_csv. Only the columns needed for plotting
/// and validation are restored; roles_after keeps just the data sites.
inline std::vector<CycleRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw TraceFormatError("trace is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw TraceFormatError("unexpected trace header: '" + line + "'");

    std::vector<CycleRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() != 10)
            throw TraceFormatError("line " + std::to_string(lineno) + ": expected 10 fields, got " +
                                   std::to_string(fields.size()));

        auto as_int = [&](std::size_t i, long lo, long hi) {
            std::size_t used = 0;
            long v = 0;
            try {
                v = std::stol(fields[i], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != fields[i].size() || fields[i].empty() || v < lo || v > hi)
                throw TraceFormatError("line " + std::to_string(lineno) + ": bad integer field " + std::to_string(i + 1));
            return v;
        };
        auto as_prob = [&](std::size_t i) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(fields[i], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != fields[i].size() || fields[i].empty() || !(v >= 0.0 && v <= 1.0))
                throw TraceFormatError("line " + std::to_string(lineno) + ": bad probability field " +
                                       std::to_string(i + 1));
            return v;
        };

        CycleRecord r;
        r.cycle = static_cast<std::size_t>(as_int(0, 1, 1L << 40));
        r.raw_zz = static_cast<Trit>(as_int(1, 0, 2));
        r.raw_xx = static_cast<Trit>(as_int(2, 0, 2));
        r.bit_zz = static_cast<int>(as_int(3, 0, 1));
        r.bit_xx = static_cast<int>(as_int(4, 0, 1));
        r.p_leak = as_prob(5);
        r.bell_prediction = static_cast<int>(as_int(6, 0, 3));
        r.prediction_overlap = as_prob(7);
        r.roles_after.data = {static_cast<Site>(as_int(8, 0, 3)), static_cast<Site>(as_int(9, 0, 3))};
        if (r.bit_zz != map_trit(r.raw_zz) || r.bit_xx != map_trit(r.raw_xx))
            throw TraceFormatError("line " + std::to_string(lineno) + ": mapped bits disagree with raw outcomes");
        records.push_back(r);
    }
    return records;
}

inline nlohmann::json to_json(const CZNoiseParams& p) {
    return {{"xi", p.xi}, {"chi", p.chi}, {"zeta", p.zeta}, {"phi", p.phi}};
}

inline nlohmann::json to_json(const NoiseTable& t) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [pair, params] : t.entries())
        out[std::to_string(pair.first) + "-" + std::to_string(pair.second)] = to_json(params);
    return out;
}

inline nlohmann::json to_json(const RegisterRoles& r) {
    return {{"data", r.data}, {"zz", r.zz}, {"xx", r.xx}};
}

inline nlohmann::json to_json(const TrajectoryLog& log) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : log.records) {
        records.push_back({{"cycle", r.cycle},
                           {"raw_zz", r.raw_zz},
                           {"raw_xx", r.raw_xx},
                           {"bit_zz", r.bit_zz},
                           {"bit_xx", r.bit_xx},
                           {"p_leak", r.p_leak},
                           {"bell_prediction", r.bell_prediction},
                           {"prediction_overlap", r.prediction_overlap},
                           {"roles_after", to_json(r.roles_after)}});
    }
    return {{"scheme", to_string(log.scheme)},
            {"seed", log.seed},
            {"noise", log.noise.empty() ? nlohmann::json("resampled per gate") : to_json(log.noise)},
            {"records", records}};
}

} // namespace leaksim
