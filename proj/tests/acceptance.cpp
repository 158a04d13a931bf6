// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include "leaksim/leaksim.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace leaksim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        detail += (detail.empty() ? "" : "; ") + what;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<cplx> amplitudes(const QutritState& s) { return {s.amplitudes().begin(), s.amplitudes().end()}; }

Circuit gates_only(const Circuit& c) {
    std::vector<bool> keep(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) keep[i] = std::holds_alternative<GateOp>(c.instructions()[i]);
    return c.filtered(keep);
}

std::size_t longest_run_above(const std::vector<CycleRecord>& records, double threshold) {
    std::size_t run = 0, longest = 0;
    for (const auto& r : records) {
        run = r.p_leak > threshold ? run + 1 : 0;
        longest = std::max(longest, run);
    }
    return longest;
}

TrajectoryConfig forced_leak(Scheme scheme) {
    TrajectoryConfig cfg;
    cfg.scheme = scheme;
    cfg.cycles = 200;
    cfg.seed = 1;
    cfg.noise = NoisePolicy::ideal();
    cfg.injections.push_back(Injection{100, Injection::Target::data0});
    return cfg;
}

// ---------------------------------------------------------------------------

Outcome bell_table() {
    Outcome o;
    // Ancilla pair (zz, xx) per Bell input: Phi+, Phi-, Psi+, Psi-.
    const int pairs[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    const Circuit cycle = standard_cycle(RegisterRoles::initial(), NoiseTable::ideal());
    const Matrix u = circuit_unitary(gates_only(cycle));
    for (int bell = 0; bell < 4; ++bell) {
        const auto dist = testing::enumerate_outcomes(cycle, amplitudes(prepare_bell(bell)));
        const auto it = dist.find({pairs[bell][0], pairs[bell][1]});
        const double p = it == dist.end() ? 0.0 : it->second;
        o.require(std::abs(p - 1.0) < 1e-10, "bell " + std::to_string(bell) + " P(expected pair) = " + fmt("%.3g", p));

        // The data register is untouched and the ancillas hold the pair.
        const auto out = testing::mat_vec(u, amplitudes(prepare_bell(bell)));
        const QutritState input = prepare_bell(bell);
        const auto expected = input.amplitudes();
        const std::size_t shift = pairs[bell][0] * 3 + pairs[bell][1];
        double err = 0.0;
        for (std::size_t i = 0; i < 81; i += 9)
            for (std::size_t k = 0; k < 9; ++k) {
                const cplx want = k == shift ? expected[i] : cplx{};
                err = std::max(err, std::abs(out[i + k] - want));
            }
        o.require(err < 1e-10, "bell " + std::to_string(bell) + " final state error " + fmt("%.3g", err));
    }
    if (o.pass) o.detail = "4/4 inputs give their ancilla pair with probability 1";
    return o;
}

Outcome scheme_equivalence() {
    Outcome o;
    double worst = 0.0;
    for (const auto& roles : {RegisterRoles::initial(), RegisterRoles::initial().swapped()}) {
        const Circuit standard = standard_cycle(roles, NoiseTable::ideal());
        const Circuit swap = swap_cycle(roles, NoiseTable::ideal()).circuit;
        for (int bell = 0; bell < 4; ++bell) {
            const auto psi = amplitudes(prepare_bell(bell, roles.data));
            const auto a = testing::enumerate_outcomes(standard, psi);
            const auto b = testing::enumerate_outcomes(swap, psi);
            for (const auto* m : {&a, &b})
                for (const auto& [k, p] : *m) {
                    const double pa = a.contains(k) ? a.at(k) : 0.0;
                    const double pb = b.contains(k) ? b.at(k) : 0.0;
                    worst = std::max(worst, std::abs(pa - pb));
                }
        }
    }
    o.require(worst < 1e-10, "max distribution difference " + fmt("%.3g", worst));
    if (o.pass) o.detail = "8 cases (2 role sets x 4 Bell inputs), max difference " + fmt("%.1e", worst);
    return o;
}

Outcome noisy_cz_correctness() {
    Outcome o;
    Rng rng(3);
    double unit = 0.0, oracle = 0.0;
    for (int t = 0; t < 200; ++t) {
        NoisePolicy policy;
        policy.chi = AmplitudeSpec::range(0.0, 0.02);
        policy.zeta = AmplitudeSpec::range(0.0, 0.02);
        const auto p = sample_params(rng, policy);
        const Matrix u = noisy_cz(p).matrix();
        unit = std::max(unit, unitarity_error(u));
        oracle = std::max(oracle, max_abs_diff(u, testing::taylor_expm_i(generator_s(p.xi) +
                                                                         generator_sprime(p.chi, p.zeta, p.phi))));
    }
    o.require(unit < 1e-12, "unitarity error " + fmt("%.3g", unit));
    o.require(oracle < 1e-10, "Taylor oracle difference " + fmt("%.3g", oracle));

    double single = 0.0;
    for (double chi : {0.001, 0.005, 0.01, 0.02}) {
        CZNoiseParams p;
        p.chi[0] = chi;
        single = std::max(single, std::abs(std::norm(noisy_cz(p)(basis2::k10, basis2::k01)) - std::pow(std::sin(chi), 2)));
    }
    o.require(single < 1e-8, "single-excitation transfer error " + fmt("%.3g", single));

    CZNoiseParams at01;
    at01.chi[0] = 0.01;
    const double transfer = std::norm(noisy_cz(at01)(basis2::k10, basis2::k01));
    o.require(std::abs(transfer - 1.0e-4) < 0.01e-4, "transfer at chi=0.01 is " + fmt("%.4g", transfer));

    // Doubling each chi_i on top of the default noise draw.
    const std::pair<std::size_t, std::size_t> channel[4] = {
        {basis2::k10, basis2::k01}, {basis2::k02, basis2::k11}, {basis2::k20, basis2::k11}, {basis2::k21, basis2::k12}};
    double ratio_lo = 1e9, ratio_hi = 0.0;
    Rng prng(4);
    for (int t = 0; t < 100; ++t) {
        const auto base = sample_params(prng, NoisePolicy::default_noise());
        for (int i = 0; i < 4; ++i)
            for (double chi : {0.005, 0.01}) {
                CZNoiseParams p = base, q = base;
                p.chi[i] = chi;
                q.chi[i] = 2 * chi;
                const auto [to, from] = channel[i];
                const double r = std::norm(noisy_cz(q)(to, from)) / std::norm(noisy_cz(p)(to, from));
                ratio_lo = std::min(ratio_lo, r);
                ratio_hi = std::max(ratio_hi, r);
            }
    }
    o.require(ratio_lo >= 3.8 && ratio_hi <= 4.2, "ratio range [" + fmt("%.4f", ratio_lo) + ", " + fmt("%.4f", ratio_hi) + "]");
    if (o.pass)
        o.detail = "unitarity " + fmt("%.1e", unit) + ", oracle " + fmt("%.1e", oracle) + ", transfer(0.01) " +
                   fmt("%.6g", transfer) + ", ratio in [" + fmt("%.4f", ratio_lo) + ", " + fmt("%.4f", ratio_hi) + "]";
    return o;
}

Outcome leakage_persistence() {
    Outcome o;
    const auto log = run_trajectory(forced_leak(Scheme::standard));
    double worst = 0.0, overlap_sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : log.records) {
        if (r.cycle < 100) continue;
        worst = std::max(worst, std::abs(r.p_leak - 1.0));
        overlap_sum += r.prediction_overlap;
        ++n;
    }
    const double mean = overlap_sum / static_cast<double>(n);
    o.require(worst < 1e-12, "p_leak deviates from 1 by " + fmt("%.3g", worst));
    o.require(mean <= 0.6, "mean overlap " + fmt("%.3f", mean));
    if (o.pass) o.detail = "p_leak = 1 for cycles 100-200, mean overlap " + fmt("%.3f", mean);
    return o;
}

Outcome leakage_resilience() {
    Outcome o;
    const auto log = run_trajectory(forced_leak(Scheme::swap));
    const std::size_t forced_run = longest_run_above(log.records, 0.5);
    std::size_t last_high = 0;
    for (const auto& r : log.records)
        if (r.p_leak > 0.5) last_high = r.cycle;
    double tail = 0.0;
    for (const auto& r : log.records)
        if (r.cycle > last_high) tail = std::max(tail, r.p_leak);
    o.require(forced_run >= 1 && forced_run <= 2, "forced leak run length " + std::to_string(forced_run));
    o.require(tail < 1e-9, "p_leak after the spike reaches " + fmt("%.3g", tail));

    std::size_t longest[2] = {0, 0}, events[2] = {0, 0};
    for (auto scheme : {Scheme::standard, Scheme::swap}) {
        TrajectoryConfig base;
        base.scheme = scheme;
        base.cycles = 1000;
        base.seed = 2024;
        base.noise.chi = AmplitudeSpec::fixed(0.01);
        base.noise.zeta = AmplitudeSpec::fixed(0.01);
        for (const auto& l : run_batch(base, 100)) {
            const auto run = longest_run_above(l.records, 0.5);
            longest[int(scheme)] = std::max(longest[int(scheme)], run);
            events[int(scheme)] += run > 0;
        }
    }
    o.require(longest[1] <= 3, "swap scheme longest run " + std::to_string(longest[1]));
    o.require(events[0] > 0, "no leak event in the standard-scheme runs");
    o.require(events[0] == 0 || longest[0] >= 20, "standard scheme longest run " + std::to_string(longest[0]));
    if (o.pass)
        o.detail = "forced run " + std::to_string(forced_run) + ", tail " + fmt("%.1e", tail) + "; noisy longest run swap " +
                   std::to_string(longest[1]) + " vs standard " + std::to_string(longest[0]) + " (" +
                   std::to_string(events[0]) + " standard seeds with events)";
    return o;
}

Outcome swap_identity() {
    Outcome o;
    const Matrix u = circuit_unitary(swap_pair_circuit(2, 0, 1, ideal_cz()));

    // SWAP on every two-qubit computational basis state |ab> -> |ba>.
    std::string mismatched;
    double zero_input_err = 0.0;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            double err = 0.0;
            for (std::size_t r = 0; r < 9; ++r)
                err = std::max(err, std::abs(u(r, a * 3 + b) - (r == b * 3 + a ? 1.0 : 0.0)));
            if (err >= 1e-12) mismatched += (mismatched.empty() ? "|" : ", |") + std::to_string(a) + std::to_string(b) + ">";
            if (b == 0) zero_input_err = std::max(zero_input_err, err);
        }
    o.require(mismatched.empty(), "not SWAP on " + mismatched + " (|a0> inputs swap to within " +
                                      fmt("%.1e", zero_input_err) + ")");

    // Brute-force composition of the six 9x9 factors.
    const Matrix h = hadamard().matrix(), id = Matrix::identity(3);
    auto kron = [](const Matrix& x, const Matrix& y) {
        Matrix m(9);
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j < 9; ++j) m(i, j) = x(i / 3, j / 3) * y(i % 3, j % 3);
        return m;
    };
    const Matrix ha = kron(h, id), hb = kron(id, h), cz = ideal_cz().matrix();
    const Matrix brute = ha * cz * hb * ha * cz * hb;
    double leak_err = 0.0;
    for (std::size_t r = 0; r < 9; ++r) {
        leak_err = std::max(leak_err, std::abs(u(r, basis2::k20) - brute(r, basis2::k20)));
        leak_err = std::max(leak_err, std::abs(u(r, basis2::k20) - (r == basis2::k21 ? -1.0 : 0.0)));
    }
    o.require(leak_err < 1e-12, "|20> column error " + fmt("%.3g", leak_err));
    if (o.pass) o.detail = "SWAP on 4 basis states, |20> -> -|21> within " + fmt("%.1e", leak_err);
    return o;
}

Outcome simplifier_safety() {
    Outcome o;
    std::mt19937_64 gen(500);
    std::size_t grew = 0, removed = 0;
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        Circuit c(3);
        const std::string ids[] = {c.add_gate("H", hadamard()), c.add_gate("CZ", ideal_cz()),
                                   c.add_gate("X12", level_swap_12()),
                                   c.add_gate("NCZ", noisy_cz(CZNoiseParams{{0.4, 1.2, 2.2, 5.0}, {0.02, 0.01, 0.02, 0.01},
                                                                           {0.01, 0.01, 0.01, 0.01}, {0.3, 1.3, 2.3, 3.3}})),
                                   c.add_gate("U", GateMatrix(1, testing::random_unitary(3, gen)))};
        const std::size_t length = 1 + gen() % 30;
        for (std::size_t i = 0; i < length; ++i) {
            const std::size_t k = gen() % 5;
            const Site a = gen() % 3;
            const Site b = (a + 1 + gen() % 2) % 3;
            if (c.gate_matrix(ids[k]).arity() == 1) c.gate(ids[k], {a});
            else c.gate(ids[k], {a, b});
        }
        const Circuit s = simplify(c);
        grew += s.size() > c.size();
        removed += c.size() - std::min(c.size(), s.size());
        worst = std::max(worst, max_abs_diff(circuit_unitary(s), circuit_unitary(c)));
    }
    o.require(worst < 1e-10, "unitary difference " + fmt("%.3g", worst));
    o.require(grew == 0, std::to_string(grew) + " circuits grew");
    if (o.pass)
        o.detail = "500 circuits, " + std::to_string(removed) + " instructions removed, max difference " + fmt("%.1e", worst);
    return o;
}

Outcome planner() {
    Outcome o;
    for (int d : {2, 3, 5, 7, 11, 15}) {
        const auto layout = surface::build_layout(d);
        const auto report = surface::validate(layout, surface::build_schedule(layout));
        const std::string tag = "d=" + std::to_string(d) + ": ";
        for (auto e : {surface::Epoch::odd, surface::Epoch::even})
            o.require(layout.count(surface::Role::supplementary, e) == static_cast<std::size_t>(2 * d - 1),
                      tag + "supplementary count");
        o.require(layout.num_cells() == static_cast<std::size_t>(2 * d * (2 * d - 1)), tag + "total cells");
        for (const auto& c : report.checks) o.require(c.passed, tag + c.name);
        o.require(report.layers[0] == 1 && report.layers[1] == 1, tag + "layer count");
        o.require(report.check("measured-within-2-cycles").passed, tag + "unmeasured cell");
    }
    if (o.pass) o.detail = "d in {2,3,5,7,11,15}: counts, 7 validator checks, 1 SWAP layer per cycle";
    return o;
}

Outcome determinism(const char* tool) {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "leaksim_acceptance_determinism";
    fs::remove_all(dir);
    const std::string args = " run --scheme swap --cycles 300 --trajectories 4 --seed 31337 --chi 0.01:0.05"
                             " --zeta 0.01 --inject 50:data1 --inject 120:zz --out ";
    const char* threads[] = {"1", "4"};
    for (int i = 0; i < 2; ++i) {
        const std::string cmd = std::string("LEAKSIM_THREADS=") + threads[i] + " " + tool + args +
                                (dir / std::to_string(i)).string() + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "invocation " + std::to_string(i) + " failed");
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    for (int k = 0; k < 4 && o.pass; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "trajectory_%04d.csv", k);
        const std::string a = slurp(dir / "0" / name), b = slurp(dir / "1" / name);
        o.require(!a.empty() && a == b, std::string(name) + " differs");
    }
    fs::remove_all(dir);
    if (o.pass) o.detail = "4 traces byte-identical across two invocations (1 and 4 worker threads)";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s; // 0 means no runtime bound
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, "Bell readout table", 1.0, bell_table},
        {2, "noiseless scheme equivalence", 0.0, scheme_equivalence},
        {3, "noisy CZ correctness", 0.0, noisy_cz_correctness},
        {4, "leakage persistence (standard)", 5.0, leakage_persistence},
        {5, "leakage resilience (swap)", 120.0, leakage_resilience},
        {6, "SWAP fragment identity", 0.0, swap_identity},
        {7, "simplifier safety", 0.0, simplifier_safety},
        {8, "surface planner", 1.0, planner},
        {9, "determinism", 0.0, [] { return determinism(LEAKSIM_TOOL_PATH); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs >= c.budget_s) o.require(false, "runtime " + fmt("%.2f", secs) + " s over budget");
        failed += !o.pass;
        std::printf("[%s] %d %-32s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
