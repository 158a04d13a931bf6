#pragma once

// Dense complex linear algebra over registers of three-level sites.
//
// Basis convention: site 0 is the most significant ternary digit, so for n
// sites the basis index of |d_0 d_1 ... d_{n-1}> is sum_k d_k * 3^(n-1-k).

#include "leaksim/numeric_policy.hpp"
#include "leaksim/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace leaksim {

using cplx = std::complex<double>;
using Site = std::size_t;
using Trit = std::uint8_t;

inline constexpr std::size_t kLevels = 3;

constexpr std::size_t pow3(std::size_t k) {
    std::size_t r = 1;
    while (k-- > 0) r *= kLevels;
    return r;
}

//============================================================================
// Matrix
//============================================================================

/// Square, row-major complex matrix.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
    Matrix(std::size_t dim, std::vector<cplx> entries) : dim_(dim), data_(std::move(entries)) {
        if (data_.size() != dim * dim) throw std::invalid_argument("Matrix: entry count does not match dimension");
    }

    static Matrix identity(std::size_t dim) {
        Matrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(std::span<const cplx> diag) {
        Matrix m(diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
        return m;
    }

    std::size_t dim() const { return dim_; }
    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
    std::span<const cplx> entries() const { return data_; }

    Matrix adjoint() const {
        Matrix m(dim_);
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.dim_ != b.dim_) throw std::invalid_argument("Matrix product: dimension mismatch");
        Matrix m(a.dim_);
        for (std::size_t r = 0; r < a.dim_; ++r)
            for (std::size_t k = 0; k < a.dim_; ++k) {
                const cplx ark = a(r, k);
                if (ark == cplx{}) continue;
                for (std::size_t c = 0; c < a.dim_; ++c) m(r, c) += ark * b(k, c);
            }
        return m;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) {
        if (a.dim_ != b.dim_) throw std::invalid_argument("Matrix sum: dimension mismatch");
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
        return a;
    }

    friend Matrix operator*(cplx s, Matrix a) {
        for (auto& x : a.data_) x *= s;
        return a;
    }

private:
    std::size_t dim_ = 0;
    std::vector<cplx> data_;
};

/// Largest entrywise modulus of a - b.
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
    return worst;
}

inline double unitarity_error(const Matrix& u) {
    return max_abs_diff(u.adjoint() * u, Matrix::identity(u.dim()));
}

inline double hermiticity_error(const Matrix& h) {
    double worst = 0.0;
    for (std::size_t r = 0; r < h.dim(); ++r)
        for (std::size_t c = r; c < h.dim(); ++c) worst = std::max(worst, std::abs(h(r, c) - std::conj(h(c, r))));
    return worst;
}

//============================================================================
// GateMatrix
//============================================================================

/// Unitary acting on one or two sites. Unitarity is enforced on construction.
class GateMatrix {
public:
    GateMatrix(std::size_t arity, Matrix m) : arity_(arity), matrix_(std::move(m)) {
        if (arity_ < 1 || arity_ > 2) throw std::invalid_argument("GateMatrix: arity must be 1 or 2");
        if (matrix_.dim() != pow3(arity_))
            throw std::invalid_argument("GateMatrix: dimension must be 3^arity");
        const double err = unitarity_error(matrix_);
        if (!(err < kTolerance.unitarity))
            throw std::invalid_argument("GateMatrix: matrix is not unitary (error " + std::to_string(err) + ")");
    }

    std::size_t arity() const { return arity_; }
    std::size_t dim() const { return matrix_.dim(); }
    const Matrix& matrix() const { return matrix_; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return matrix_(r, c); }

    friend bool operator==(const GateMatrix& a, const GateMatrix& b) {
        return a.arity_ == b.arity_ && std::ranges::equal(a.matrix_.entries(), b.matrix_.entries());
    }

private:
    std::size_t arity_;
    Matrix matrix_;
};

//============================================================================
// Hermitian matrix exponential
//============================================================================

namespace detail {

/// Cyclic Jacobi eigensolver for a real symmetric matrix stored row-major.
/// On return `a` holds the eigenvalues on its diagonal and `v` the
/// eigenvectors as columns.
inline void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, std::size_t n, double tol) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    double scale = 0.0;
    for (double x : a) scale += x * x;
    scale = std::max(1.0, std::sqrt(scale));

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a[p * n + q] * a[p * n + q];
        return std::sqrt(s);
    };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps && off_norm() > tol * scale; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if (off_norm() > tol * scale) throw std::runtime_error("jacobi_eigen: failed to converge");
}

} // namespace detail

/// exp(i * generator) for a Hermitian generator.
///
/// The n x n Hermitian H = A + iB is embedded as the real symmetric
/// M = [[A, -B], [B, A]] and diagonalized with cyclic Jacobi. Since the
/// embedding is an algebra homomorphism, cos(M) and sin(M) embed cos(H) and
/// sin(H), and exp(iH) = cos(H) + i sin(H).
inline Matrix expm_hermitian(const Matrix& generator, const NumericPolicy& policy = kTolerance) {
    const double herr = hermiticity_error(generator);
    if (!(herr <= policy.hermiticity))
        throw std::invalid_argument("expm_hermitian: generator is not Hermitian (error " + std::to_string(herr) + ")");

    const std::size_t n = generator.dim();
    const std::size_t m = 2 * n;
    std::vector<double> a(m * m);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double re = 0.5 * (generator(r, c).real() + generator(c, r).real());
            const double im = 0.5 * (generator(r, c).imag() - generator(c, r).imag());
            a[r * m + c] = re;
            a[(r + n) * m + (c + n)] = re;
            a[r * m + (c + n)] = -im;
            a[(r + n) * m + c] = im;
        }
    }

    std::vector<double> v;
    detail::jacobi_eigen(a, v, m, policy.jacobi);

    std::vector<double> cos_l(m), sin_l(m);
    for (std::size_t k = 0; k < m; ++k) {
        cos_l[k] = std::cos(a[k * m + k]);
        sin_l[k] = std::sin(a[k * m + k]);
    }

    // Only the left column blocks of cos(M) and sin(M) are needed.
    Matrix u(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            double cos_re = 0.0, cos_im = 0.0, sin_re = 0.0, sin_im = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double top = v[r * m + k] * v[c * m + k];
                const double bottom = v[(r + n) * m + k] * v[c * m + k];
                cos_re += top * cos_l[k];
                cos_im += bottom * cos_l[k];
                sin_re += top * sin_l[k];
                sin_im += bottom * sin_l[k];
            }
            u(r, c) = cplx{cos_re - sin_im, cos_im + sin_re};
        }
    }
    return u;
}

//============================================================================
// QutritState
//============================================================================

/// Normalized pure state of `num_sites` three-level sites.
class QutritState {
public:
    /// |0...0> on `num_sites` sites.
    explicit QutritState(std::size_t num_sites) : QutritState(basis(std::vector<Trit>(num_sites, 0))) {}

    /// Product basis state |digits[0] digits[1] ...>.
    static QutritState basis(std::span<const Trit> digits) {
        if (digits.empty()) throw std::invalid_argument("QutritState: need at least one site");
        std::size_t index = 0;
        for (Trit d : digits) {
            if (d >= kLevels) throw std::invalid_argument("QutritState: basis digit out of range");
            index = index * kLevels + d;
        }
        std::vector<cplx> amps(pow3(digits.size()));
        amps[index] = 1.0;
        return QutritState(digits.size(), std::move(amps));
    }

    static QutritState basis(std::initializer_list<Trit> digits) {
        return basis(std::span<const Trit>(digits.begin(), digits.size()));
    }

    /// Wrap an amplitude vector. The vector must already be normalized.
    QutritState(std::size_t num_sites, std::vector<cplx> amplitudes)
        : num_sites_(num_sites), amps_(std::move(amplitudes)) {
        if (num_sites_ == 0) throw std::invalid_argument("QutritState: need at least one site");
        if (amps_.size() != pow3(num_sites_))
            throw std::invalid_argument("QutritState: amplitude count must be 3^num_sites");
        if (std::abs(norm_squared() - 1.0) > kTolerance.norm)
            throw std::invalid_argument("QutritState: amplitudes are not normalized");
    }

    /// Normalize an arbitrary nonzero amplitude vector.
    static QutritState normalized(std::size_t num_sites, std::vector<cplx> amplitudes) {
        double n2 = 0.0;
        for (const auto& a : amplitudes) n2 += std::norm(a);
        if (!(n2 > 0.0)) throw std::invalid_argument("QutritState: cannot normalize a zero vector");
        const double s = 1.0 / std::sqrt(n2);
        for (auto& a : amplitudes) a *= s;
        return QutritState(num_sites, std::move(amplitudes));
    }

    std::size_t num_sites() const { return num_sites_; }
    std::size_t dimension() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }

    /// Index stride of a site's ternary digit.
    std::size_t stride(Site site) const {
        check_site(site);
        return pow3(num_sites_ - 1 - site);
    }

    Trit digit(std::size_t index, Site site) const { return static_cast<Trit>((index / stride(site)) % kLevels); }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    void check_site(Site site) const {
        if (site >= num_sites_)
            throw std::out_of_range("site " + std::to_string(site) + " out of range for " +
                                    std::to_string(num_sites_) + " sites");
    }

    /// Mutable access for the in-place kernels below.
    std::span<cplx> mutable_amplitudes() { return amps_; }

private:
    std::size_t num_sites_;
    std::vector<cplx> amps_;
};

//============================================================================
// Kernels
//============================================================================

namespace detail {

inline void check_distinct_sites(const QutritState& state, std::span<const Site> sites) {
    for (std::size_t i = 0; i < sites.size(); ++i) {
        state.check_site(sites[i]);
        for (std::size_t j = 0; j < i; ++j)
            if (sites[i] == sites[j]) throw std::invalid_argument("duplicate site " + std::to_string(sites[i]));
    }
}

/// Offsets of every local basis state of `sites` (first site most significant).
inline std::vector<std::size_t> local_offsets(const QutritState& state, std::span<const Site> sites) {
    std::vector<std::size_t> offsets(pow3(sites.size()));
    for (std::size_t local = 0; local < offsets.size(); ++local) {
        std::size_t rest = local, off = 0;
        for (std::size_t j = sites.size(); j-- > 0;) {
            off += (rest % kLevels) * state.stride(sites[j]);
            rest /= kLevels;
        }
        offsets[local] = off;
    }
    return offsets;
}

inline bool digits_zero(const QutritState& state, std::size_t index, std::span<const Site> sites) {
    for (Site s : sites)
        if (state.digit(index, s) != 0) return false;
    return true;
}

} // namespace detail

/// Apply `gate` to `targets` in place. targets[0] is the most significant
/// digit of the gate's local basis.
inline void apply_gate(QutritState& state, const GateMatrix& gate, std::span<const Site> targets) {
    if (targets.size() != gate.arity())
        throw std::invalid_argument("apply_gate: gate arity " + std::to_string(gate.arity()) + " but " +
                                    std::to_string(targets.size()) + " targets");
    detail::check_distinct_sites(state, targets);

    const auto offsets = detail::local_offsets(state, targets);
    const std::size_t k = offsets.size();
    std::vector<cplx> in(k), out(k);
    auto amps = state.mutable_amplitudes();
    for (std::size_t base = 0; base < amps.size(); ++base) {
        if (!detail::digits_zero(state, base, targets)) continue;
        for (std::size_t j = 0; j < k; ++j) in[j] = amps[base + offsets[j]];
        for (std::size_t r = 0; r < k; ++r) {
            cplx acc{};
            for (std::size_t c = 0; c < k; ++c) acc += gate(r, c) * in[c];
            out[r] = acc;
        }
        for (std::size_t j = 0; j < k; ++j) amps[base + offsets[j]] = out[j];
    }
}

inline QutritState embed_apply(QutritState state, const GateMatrix& gate, std::span<const Site> targets) {
    apply_gate(state, gate, targets);
    return state;
}

inline QutritState embed_apply(QutritState state, const GateMatrix& gate, std::initializer_list<Site> targets) {
    apply_gate(state, gate, std::span<const Site>(targets.begin(), targets.size()));
    return state;
}

/// Born probabilities of the three outcomes on `site`.
inline std::array<double, 3> site_probabilities(const QutritState& state, Site site) {
    state.check_site(site);
    std::array<double, 3> p{};
    for (std::size_t i = 0; i < state.dimension(); ++i) p[state.digit(i, site)] += std::norm(state[i]);
    return p;
}

/// Projective measurement of one site in place; returns the outcome.
inline Trit measure(QutritState& state, Site site, Rng& rng) {
    const auto p = site_probabilities(state, site);
    const double total = p[0] + p[1] + p[2];
    if (!(total > 0.0)) throw std::runtime_error("measure: state has zero norm");

    const double u = rng.uniform() * total;
    Trit outcome = 2;
    if (u < p[0]) outcome = 0;
    else if (u < p[0] + p[1]) outcome = 1;
    if (!(p[outcome] > 0.0)) throw std::runtime_error("measure: degenerate zero-probability projection");

    const double scale = 1.0 / std::sqrt(p[outcome]);
    auto amps = state.mutable_amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (state.digit(i, site) == outcome) amps[i] *= scale;
        else amps[i] = 0.0;
    }
    return outcome;
}

struct MeasureResult {
    Trit outcome;
    QutritState collapsed;
};

inline MeasureResult measure_site(QutritState state, Site site, Rng& rng) {
    const Trit outcome = measure(state, site, rng);
    return {outcome, std::move(state)};
}

/// Relabel a site known to be in |known_outcome> to |0> in place.
inline void reset(QutritState& state, Site site, Trit known_outcome) {
    state.check_site(site);
    if (known_outcome >= kLevels) throw std::invalid_argument("reset: outcome must be 0, 1 or 2");
    const auto p = site_probabilities(state, site);
    if (p[known_outcome] < 1.0 - kTolerance.norm)
        throw std::logic_error("reset: site " + std::to_string(site) + " is not in the definite state |" +
                               std::to_string(known_outcome) + ">");
    if (known_outcome == 0) return;

    const std::size_t shift = known_outcome * state.stride(site);
    auto amps = state.mutable_amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (state.digit(i, site) != 0) continue;
        amps[i] = amps[i + shift];
    }
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (state.digit(i, site) != 0) amps[i] = 0.0;
}

inline QutritState reset_site(QutritState state, Site site, Trit known_outcome) {
    reset(state, site, known_outcome);
    return state;
}

/// Probability that at least one of `sites` would be found in |2>.
inline double leak_probability(const QutritState& state, std::span<const Site> sites) {
    detail::check_distinct_sites(state, sites);
    double p = 0.0;
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        for (Site s : sites) {
            if (state.digit(i, s) == 2) {
                p += std::norm(state[i]);
                break;
            }
        }
    }
    return std::clamp(p, 0.0, 1.0);
}

inline double leak_probability(const QutritState& state, std::initializer_list<Site> sites) {
    return leak_probability(state, std::span<const Site>(sites.begin(), sites.size()));
}

/// |<reference|psi_sites>|^2 where psi_sites is the pure state of `sites`.
///
/// Requires every other site to be in a definite basis state, so that the
/// reduced state of `sites` is pure.
inline double overlap(const QutritState& state, const QutritState& reference, std::span<const Site> sites) {
    detail::check_distinct_sites(state, sites);
    if (reference.num_sites() != sites.size())
        throw std::invalid_argument("overlap: reference has " + std::to_string(reference.num_sites()) +
                                    " sites but " + std::to_string(sites.size()) + " were listed");

    std::size_t anchor = 0;
    for (Site s = 0; s < state.num_sites(); ++s) {
        if (std::find(sites.begin(), sites.end(), s) != sites.end()) continue;
        const auto p = site_probabilities(state, s);
        const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
        if (p[best] < 1.0 - kTolerance.norm)
            throw std::logic_error("overlap: site " + std::to_string(s) +
                                   " is not in a definite basis state; reduced state is not pure");
        anchor += best * state.stride(s);
    }

    const auto offsets = detail::local_offsets(state, sites);
    cplx inner{};
    for (std::size_t j = 0; j < offsets.size(); ++j) inner += std::conj(reference[j]) * state[anchor + offsets[j]];
    return std::clamp(std::norm(inner), 0.0, 1.0);
}

inline double overlap(const QutritState& state, const QutritState& reference, std::initializer_list<Site> sites) {
    return overlap(state, reference, std::span<const Site>(sites.begin(), sites.size()));
}

} // namespace leaksim
