#pragma once

// Repetitive XX/ZZ stabilizer measurement on a two-qubit data register with
// two ancillas, in the standard scheme and in the SWAP-based scheme where data
// and ancilla registers trade places after every cycle.

#include "leaksim/circuit.hpp"
#include "leaksim/gates.hpp"
#include "leaksim/rng.hpp"
#include "leaksim/tensor.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace leaksim {

inline constexpr std::size_t kProtocolSites = 4;

/// Which physical sites currently hold the data register and the ancillas.
struct RegisterRoles {
    std::array<Site, 2> data{0, 1};
    Site zz = 2;
    Site xx = 3;

    /// Roles before the first cycle.
    static RegisterRoles initial() { return {}; }

    void validate() const {
        std::array<bool, kProtocolSites> seen{};
        for (Site s : {data[0], data[1], zz, xx}) {
            if (s >= kProtocolSites || seen[s]) throw std::invalid_argument("RegisterRoles: not a permutation of 0..3");
            seen[s] = true;
        }
    }

    /// Roles after the data <-> ancilla handoff (d1 <-> zz, d2 <-> xx).
    RegisterRoles swapped() const { return {{zz, xx}, data[0], data[1]}; }

    friend bool operator==(const RegisterRoles&, const RegisterRoles&) = default;
};

enum class Scheme { standard, swap };

inline std::string to_string(Scheme s) { return s == Scheme::standard ? "standard" : "swap"; }

inline Scheme parse_scheme(const std::string& s) {
    if (s == "standard") return Scheme::standard;
    if (s == "swap") return Scheme::swap;
    throw std::invalid_argument("scheme must be 'standard' or 'swap', got '" + s + "'");
}

enum class StabilizerOrder { xx_first, zz_first };

//============================================================================
// Noise table
//============================================================================

using SitePair = std::pair<Site, Site>;

inline SitePair unordered_pair(Site a, Site b) { return a < b ? SitePair{a, b} : SitePair{b, a}; }

/// The four couplings of the square architecture: every data site couples to
/// both ancillas, and the mirrored roles reuse the same couplings.
inline std::vector<SitePair> coupled_pairs() { return {{0, 2}, {0, 3}, {1, 2}, {1, 3}}; }

/// Fixed CZ parameters per coupled pair.
class NoiseTable {
public:
    NoiseTable() = default;

    static NoiseTable sample(Rng& rng, const NoisePolicy& policy) {
        NoiseTable t;
        for (const auto& p : coupled_pairs()) t.set(p.first, p.second, sample_params(rng, policy));
        return t;
    }

    static NoiseTable ideal() {
        NoiseTable t;
        for (const auto& p : coupled_pairs()) t.set(p.first, p.second, CZNoiseParams{});
        return t;
    }

    void set(Site a, Site b, const CZNoiseParams& p) {
        params_[unordered_pair(a, b)] = p;
        gates_.insert_or_assign(unordered_pair(a, b), noisy_cz(p));
    }

    const CZNoiseParams& params(Site a, Site b) const {
        auto it = params_.find(unordered_pair(a, b));
        if (it == params_.end())
            throw std::out_of_range("NoiseTable: missing entry for pair (" + std::to_string(a) + "," +
                                    std::to_string(b) + ")");
        return it->second;
    }

    const GateMatrix& gate(Site a, Site b) const {
        params(a, b);
        return gates_.at(unordered_pair(a, b));
    }

    const std::map<SitePair, CZNoiseParams>& entries() const { return params_; }
    bool empty() const { return params_.empty(); }

private:
    std::map<SitePair, CZNoiseParams> params_;
    std::map<SitePair, GateMatrix> gates_;
};

/// Supplies the CZ matrix for each application on a pair of sites.
using CzSource = std::function<GateMatrix(Site, Site)>;

inline CzSource table_source(const NoiseTable& table) {
    return [&table](Site a, Site b) { return table.gate(a, b); };
}

/// Fresh parameters for every application.
inline CzSource resampling_source(Rng& rng, const NoisePolicy& policy) {
    return [&rng, policy](Site, Site) { return noisy_cz(sample_params(rng, policy)); };
}

//============================================================================
// Cycle circuits
//============================================================================

inline constexpr std::size_t kZzSlot = 0;
inline constexpr std::size_t kXxSlot = 1;

namespace detail {

inline std::string cz_name(Site a, Site b) {
    const auto p = unordered_pair(a, b);
    return "CZ" + std::to_string(p.first) + std::to_string(p.second);
}

inline void apply_cz(Circuit& c, const CzSource& source, Site a, Site b) {
    c.gate(c.add_gate(cz_name(a, b), source(a, b)), {a, b});
}

inline void xx_block(Circuit& c, const RegisterRoles& r, const CzSource& source) {
    const std::string h = c.add_gate(kHadamardId, hadamard());
    for (Site s : {r.data[0], r.data[1], r.xx}) c.gate(h, {s});
    apply_cz(c, source, r.xx, r.data[0]);
    apply_cz(c, source, r.xx, r.data[1]);
    for (Site s : {r.data[0], r.data[1], r.xx}) c.gate(h, {s});
}

inline void zz_block(Circuit& c, const RegisterRoles& r, const CzSource& source) {
    const std::string h = c.add_gate(kHadamardId, hadamard());
    c.gate(h, {r.zz});
    apply_cz(c, source, r.zz, r.data[0]);
    apply_cz(c, source, r.zz, r.data[1]);
    c.gate(h, {r.zz});
}

} // namespace detail

/// One cycle of the standard scheme: XX and ZZ stabilizer blocks, then
/// measure and reset both ancillas. Slot 0 holds the ZZ outcome, slot 1 the
/// XX outcome.
inline Circuit standard_cycle(const RegisterRoles& roles, const CzSource& source,
                              StabilizerOrder order = StabilizerOrder::xx_first) {
    roles.validate();
    Circuit c(kProtocolSites);
    if (order == StabilizerOrder::xx_first) {
        detail::xx_block(c, roles, source);
        detail::zz_block(c, roles, source);
    } else {
        detail::zz_block(c, roles, source);
        detail::xx_block(c, roles, source);
    }
    c.measure(roles.zz, kZzSlot);
    c.measure(roles.xx, kXxSlot);
    c.reset(roles.zz, kZzSlot);
    c.reset(roles.xx, kXxSlot);
    return c;
}

inline Circuit standard_cycle(const RegisterRoles& roles, const NoiseTable& table,
                              StabilizerOrder order = StabilizerOrder::xx_first) {
    return standard_cycle(roles, table_source(table), order);
}

struct SwapCycle {
    Circuit circuit;
    RegisterRoles roles_after;
};

/// One cycle of the SWAP-based scheme: the standard cycle followed by the
/// CZ+H SWAP fragments d1 <-> zz and d2 <-> xx onto the freshly reset
/// ancillas.
inline SwapCycle swap_cycle(const RegisterRoles& roles, const CzSource& source,
                            StabilizerOrder order = StabilizerOrder::xx_first) {
    Circuit c = standard_cycle(roles, source, order);
    const std::pair<Site, Site> handoff[] = {{roles.data[0], roles.zz}, {roles.data[1], roles.xx}};
    for (const auto& [d, a] : handoff) append_swap_pair(c, d, a, c.add_gate(detail::cz_name(d, a), source(d, a)));
    return {simplify(c), roles.swapped()};
}

inline SwapCycle swap_cycle(const RegisterRoles& roles, const NoiseTable& table,
                            StabilizerOrder order = StabilizerOrder::xx_first) {
    return swap_cycle(roles, table_source(table), order);
}

/// Index just past the last reset of a cycle circuit: the point where the
/// end-of-cycle metrics are taken.
inline std::size_t checkpoint_index(const Circuit& c) {
    const auto& ops = c.instructions();
    for (std::size_t i = ops.size(); i-- > 0;)
        if (std::holds_alternative<ResetOp>(ops[i])) return i + 1;
    return ops.size();
}

//============================================================================
// Bell states and readout interpretation
//============================================================================

/// Two-site Bell state in the order Phi+, Phi-, Psi+, Psi-.
inline QutritState bell_state(int index) {
    if (index < 0 || index > 3) throw std::invalid_argument("bell index must be 0..3, got " + std::to_string(index));
    const double h = 1.0 / std::numbers::sqrt2;
    std::vector<cplx> a(9);
    using namespace basis2;
    switch (index) {
        case 0: a[k00] = h; a[k11] = h; break;
        case 1: a[k00] = h; a[k11] = -h; break;
        case 2: a[k01] = h; a[k10] = h; break;
        default: a[k01] = h; a[k10] = -h; break;
    }
    return QutritState(2, std::move(a));
}

/// Bell state `index` on `data_sites` of a four-site register, |0> elsewhere.
inline QutritState prepare_bell(int index, std::array<Site, 2> data_sites = {0, 1}) {
    const QutritState bell = bell_state(index);
    if (data_sites[0] == data_sites[1] || data_sites[0] >= kProtocolSites || data_sites[1] >= kProtocolSites)
        throw std::invalid_argument("prepare_bell: invalid data sites");
    std::vector<cplx> amps(pow3(kProtocolSites));
    const std::size_t s0 = pow3(kProtocolSites - 1 - data_sites[0]);
    const std::size_t s1 = pow3(kProtocolSites - 1 - data_sites[1]);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) amps[a * s0 + b * s1] = bell[a * 3 + b];
    return QutritState(kProtocolSites, std::move(amps));
}

/// Readout rule |2> -> |1>.
constexpr int map_trit(Trit raw) { return raw == 0 ? 0 : 1; }

/// Bell index predicted from the (zz, xx) ancilla bits.
constexpr int predict_bell(int bit_zz, int bit_xx) { return 2 * bit_zz + bit_xx; }

/// Unitary |1> <-> |2> permutation on one site.
inline QutritState inject_leak(QutritState state, Site site) {
    apply_gate(state, level_swap_12(), std::span<const Site>(&site, 1));
    return state;
}

/// Measure `site` and move whatever level it collapsed to into |2>, leaving
/// the site fully leaked and unentangled from the rest of the register.
inline void force_leak(QutritState& state, Site site, Rng& rng) {
    const Trit outcome = measure(state, site, rng);
    if (outcome == 2) return;
    // Relabel |outcome> -> |2> by swapping the two levels.
    Matrix m = Matrix::identity(3);
    m(outcome, outcome) = 0.0;
    m(2, 2) = 0.0;
    m(outcome, 2) = 1.0;
    m(2, outcome) = 1.0;
    apply_gate(state, GateMatrix(1, std::move(m)), std::span<const Site>(&site, 1));
}

//============================================================================
// Trajectories
//============================================================================

/// A leakage event applied before a given cycle runs.
struct Injection {
    enum class Target { data0, data1, zz, xx, physical };
    enum class Mode { force, unitary };

    std::size_t cycle = 1;
    Target target = Target::data0;
    Site site = 0; // used when target == physical
    Mode mode = Mode::force;

    Site resolve(const RegisterRoles& r) const {
        switch (target) {
            case Target::data0: return r.data[0];
            case Target::data1: return r.data[1];
            case Target::zz: return r.zz;
            case Target::xx: return r.xx;
            case Target::physical: break;
        }
        if (site >= kProtocolSites) throw std::invalid_argument("Injection: site out of range");
        return site;
    }

    /// Parse "CYCLE:SITE" where SITE is data0, data1, zz, xx or 0..3.
    static Injection parse(const std::string& text) {
        const auto colon = text.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("inject: expected CYCLE:SITE, got '" + text + "'");
        Injection inj;
        const std::string cycle = text.substr(0, colon), where = text.substr(colon + 1);
        std::size_t used = 0;
        long long c = 0;
        try {
            c = std::stoll(cycle, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != cycle.size() || cycle.empty() || c < 1)
            throw std::invalid_argument("inject: cycle must be a positive integer in '" + text + "'");
        inj.cycle = static_cast<std::size_t>(c);
        if (where == "data0") inj.target = Target::data0;
        else if (where == "data1") inj.target = Target::data1;
        else if (where == "zz") inj.target = Target::zz;
        else if (where == "xx") inj.target = Target::xx;
        else if (where.size() == 1 && where[0] >= '0' && where[0] <= '3') {
            inj.target = Target::physical;
            inj.site = static_cast<Site>(where[0] - '0');
        } else {
            throw std::invalid_argument("inject: site must be data0, data1, zz, xx or 0-3 in '" + text + "'");
        }
        return inj;
    }

    std::string to_string() const {
        static const char* names[] = {"data0", "data1", "zz", "xx"};
        return std::to_string(cycle) + ":" +
               (target == Target::physical ? std::to_string(site) : std::string(names[static_cast<int>(target)]));
    }
};

struct TrajectoryConfig {
    Scheme scheme = Scheme::standard;
    std::size_t cycles = 1;
    std::uint64_t seed = 0;
    int bell_index = 0;
    NoisePolicy noise = NoisePolicy::default_noise();
    std::vector<Injection> injections;
    StabilizerOrder order = StabilizerOrder::xx_first;

    void validate() const {
        if (cycles < 1) throw std::invalid_argument("cycles must be >= 1");
        if (bell_index < 0 || bell_index > 3) throw std::invalid_argument("bell index must be 0..3");
        for (const auto& inj : injections)
            if (inj.cycle < 1) throw std::invalid_argument("injection cycle must be >= 1");
    }
};

struct CycleRecord {
    std::size_t cycle = 0;
    Trit raw_zz = 0;
    Trit raw_xx = 0;
    int bit_zz = 0;
    int bit_xx = 0;
    double p_leak = 0.0;
    int bell_prediction = 0;
    double prediction_overlap = 0.0;
    RegisterRoles roles_after;
};

struct TrajectoryLog {
    Scheme scheme = Scheme::standard;
    std::uint64_t seed = 0;
    NoiseTable noise; // empty when parameters were resampled per gate
    std::vector<CycleRecord> records;
};

inline constexpr std::uint64_t kNoiseStream = 1;
inline constexpr std::uint64_t kMeasurementStream = 2;

/// Simulate one trajectory. Metrics are taken after the ancillas are measured
/// and reset, on the data sites that were stabilized in that cycle.
inline TrajectoryLog run_trajectory(const TrajectoryConfig& config) {
    config.validate();

    Rng noise_rng(derive_seed(config.seed, kNoiseStream));
    Rng rng(derive_seed(config.seed, kMeasurementStream));

    TrajectoryLog log;
    log.scheme = config.scheme;
    log.seed = config.seed;

    const bool resample = config.noise.resample_per_gate;
    if (!resample) log.noise = NoiseTable::sample(noise_rng, config.noise);
    const CzSource source = resample ? resampling_source(noise_rng, config.noise) : table_source(log.noise);

    RegisterRoles roles = RegisterRoles::initial();
    // Fixed noise makes the circuits depend only on the roles, of which
    // there are at most two.
    std::map<Site, SwapCycle> cache;
    auto build = [&](const RegisterRoles& r) -> SwapCycle {
        if (config.scheme == Scheme::standard) return {standard_cycle(r, source, config.order), r};
        return swap_cycle(r, source, config.order);
    };
    auto plan_for = [&](const RegisterRoles& r) -> SwapCycle {
        if (resample) return build(r);
        auto it = cache.find(r.zz);
        if (it == cache.end()) it = cache.emplace(r.zz, build(r)).first;
        return it->second;
    };

    QutritState state = prepare_bell(config.bell_index, roles.data);
    std::vector<Trit> slots(2, 0);
    log.records.reserve(config.cycles);

    for (std::size_t cycle = 1; cycle <= config.cycles; ++cycle) {
        for (const auto& inj : config.injections) {
            if (inj.cycle != cycle) continue;
            const Site s = inj.resolve(roles);
            if (inj.mode == Injection::Mode::force) force_leak(state, s, rng);
            else state = inject_leak(std::move(state), s);
        }

        const SwapCycle plan = plan_for(roles);
        const std::size_t checkpoint = checkpoint_index(plan.circuit);
        execute(state, plan.circuit, rng, slots, 0, checkpoint);

        CycleRecord rec;
        rec.cycle = cycle;
        rec.raw_zz = slots[kZzSlot];
        rec.raw_xx = slots[kXxSlot];
        rec.bit_zz = map_trit(rec.raw_zz);
        rec.bit_xx = map_trit(rec.raw_xx);
        rec.p_leak = leak_probability(state, roles.data);
        rec.bell_prediction = predict_bell(rec.bit_zz, rec.bit_xx);
        rec.prediction_overlap = overlap(state, bell_state(rec.bell_prediction), roles.data);

        execute(state, plan.circuit, rng, slots, checkpoint);
        roles = plan.roles_after;
        rec.roles_after = roles;
        log.records.push_back(rec);
    }
    return log;
}

} // namespace leaksim
