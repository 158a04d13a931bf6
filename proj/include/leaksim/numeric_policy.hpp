#pragma once

namespace leaksim {

/// Numeric tolerances shared by every module.
struct NumericPolicy {
    double unitarity = 1e-12;   // max |U^dag U - I| accepted for a gate
    double hermiticity = 1e-12; // max |H - H^dag| accepted for a generator
    double norm = 1e-10;        // |<psi|psi> - 1| accepted for a state
    double oracle = 1e-10;      // comparison against brute-force oracles
    double jacobi = 1e-13;      // off-diagonal decay target of the eigensolver
};

inline constexpr NumericPolicy kTolerance{};

} // namespace leaksim
