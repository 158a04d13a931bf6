#pragma once

// Qutrit gate set: ideal Hadamard, the CZ generators S and S', and the
// noisy CZ obtained by exponentiating their sum.
//
// Two-site matrices use the basis order
//   |00>, |01>, |02>, |10>, |11>, |12>, |20>, |21>, |22>
// with the first target as the most significant digit.

#include "leaksim/rng.hpp"
#include "leaksim/tensor.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace leaksim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace basis2 {
inline constexpr std::size_t k00 = 0, k01 = 1, k02 = 2, k10 = 3, k11 = 4, k12 = 5, k20 = 6, k21 = 7, k22 = 8;
}

/// Qutrit Hadamard: the qubit Hadamard on {|0>,|1>} and identity on |2>.
inline GateMatrix hadamard() {
    const double h = 1.0 / std::numbers::sqrt2;
    Matrix m(3);
    m(0, 0) = h;
    m(0, 1) = h;
    m(1, 0) = h;
    m(1, 1) = -h;
    m(2, 2) = 1.0;
    return GateMatrix(1, std::move(m));
}

/// The |1> <-> |2> level permutation.
inline GateMatrix level_swap_12() {
    Matrix m(3);
    m(0, 0) = 1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    return GateMatrix(1, std::move(m));
}

/// Parameters of one non-ideal CZ.
struct CZNoiseParams {
    std::array<double, 4> xi{};   // dynamical phases on |02>,|12>,|21>,|22> (radians)
    std::array<double, 4> chi{};  // population-exchange amplitudes
    std::array<double, 4> zeta{}; // residual diagonal phases on |01>,|10>,|11>,|20>
    std::array<double, 4> phi{};  // phases of the exchange terms (radians)

    friend bool operator==(const CZNoiseParams&, const CZNoiseParams&) = default;
};

/// Ideal part of the CZ generator: diag(0,0,xi1,0,pi,xi2,pi,xi3,xi4).
inline Matrix generator_s(const std::array<double, 4>& xi) {
    using namespace basis2;
    Matrix s(9);
    s(k02, k02) = xi[0];
    s(k11, k11) = std::numbers::pi;
    s(k12, k12) = xi[1];
    s(k20, k20) = std::numbers::pi;
    s(k21, k21) = xi[2];
    s(k22, k22) = xi[3];
    return s;
}

/// First-order error generator, block diagonal over the single-, double- and
/// triple-excitation subspaces.
inline Matrix generator_sprime(const std::array<double, 4>& chi, const std::array<double, 4>& zeta,
                               const std::array<double, 4>& phi) {
    using namespace basis2;
    const cplx i{0.0, 1.0};
    Matrix s(9);
    auto couple = [&](std::size_t row, std::size_t col, double amplitude, double angle) {
        const cplx upper = i * amplitude * std::exp(i * angle);
        s(row, col) = upper;
        s(col, row) = std::conj(upper);
    };

    // {|01>, |10>}
    s(k01, k01) = zeta[0];
    s(k10, k10) = zeta[1];
    couple(k01, k10, chi[0], phi[0]);

    // {|02>, |11>, |20>}
    couple(k02, k11, chi[1], phi[1]);
    s(k11, k11) = zeta[2];
    couple(k11, k20, chi[2], phi[2]);
    s(k20, k20) = zeta[3];

    // {|12>, |21>}
    couple(k12, k21, chi[3], phi[3]);
    return s;
}

/// U = exp(i (S + S')).
inline GateMatrix noisy_cz(const CZNoiseParams& p) {
    return GateMatrix(2, expm_hermitian(generator_s(p.xi) + generator_sprime(p.chi, p.zeta, p.phi)));
}

/// Reference CZ: noisy_cz with every parameter zero, diag(1,1,1,1,-1,1,-1,1,1).
inline GateMatrix ideal_cz() {
    std::array<cplx, 9> d{1, 1, 1, 1, -1, 1, -1, 1, 1};
    return GateMatrix(2, Matrix::diagonal(d));
}

/// Fixed value or uniform range for a small noise amplitude.
struct AmplitudeSpec {
    double lo = 0.01;
    double hi = 0.01;

    static AmplitudeSpec fixed(double v) { return {v, v}; }
    static AmplitudeSpec range(double lo, double hi) {
        if (!(lo <= hi)) throw std::invalid_argument("AmplitudeSpec: range lower bound exceeds upper bound");
        return {lo, hi};
    }

    bool is_fixed() const { return lo == hi; }

    // Fixed specs still consume one draw so that switching between fixed and
    // ranged amplitudes leaves the phase draws unchanged.
    double draw(Rng& rng) const {
        const double u = rng.uniform();
        return is_fixed() ? lo : lo + (hi - lo) * u;
    }

    friend bool operator==(const AmplitudeSpec&, const AmplitudeSpec&) = default;
};

/// How CZ noise parameters are drawn.
struct NoisePolicy {
    AmplitudeSpec chi = AmplitudeSpec::fixed(0.01);
    AmplitudeSpec zeta = AmplitudeSpec::fixed(0.01);
    bool zero_phases = false;       // force xi = 0 (with zero amplitudes: the ideal CZ)
    bool resample_per_gate = false; // fresh draw at every CZ application

    static NoisePolicy default_noise() { return {}; }
    static NoisePolicy zero_noise() {
        NoisePolicy p;
        p.chi = p.zeta = AmplitudeSpec::fixed(0.0);
        return p;
    }
    static NoisePolicy ideal() {
        NoisePolicy p = zero_noise();
        p.zero_phases = true;
        return p;
    }

    bool is_ideal() const {
        return zero_phases && chi == AmplitudeSpec::fixed(0.0) && zeta == AmplitudeSpec::fixed(0.0);
    }
};

/// Draw one parameter set. xi and phi are uniform on [0, 2pi); chi and zeta
/// follow the policy. Draw order is xi, phi, chi, zeta regardless of policy.
inline CZNoiseParams sample_params(Rng& rng, const NoisePolicy& policy) {
    CZNoiseParams p;
    for (auto& x : p.xi) x = rng.uniform(0.0, kTwoPi);
    for (auto& x : p.phi) x = rng.uniform(0.0, kTwoPi);
    for (auto& x : p.chi) x = policy.chi.draw(rng);
    for (auto& x : p.zeta) x = policy.zeta.draw(rng);
    if (policy.zero_phases) p.xi.fill(0.0);
    return p;
}

} // namespace leaksim
