/*
 * lattice.hpp — the three discrete 2×2 linear systems and their Jost solutions.
 *
 * Each system is a first-order recursion Ψ_n = X_n(z) Ψ_{n+1} with
 *
 *   kind = qr : X_n = [[z, (z−1/z) q_n], [z r_n, 1/z + (z−1/z) q_n r_n]],  det = 1
 *   kind = uv : X_n = [[z, z u_n], [v_n/z, 1/z]],                          det = 1 − u_n v_n
 *   kind = ps : X_n = [[z, z p_n], [s_n/z, 1/z]],                          det = 1 − p_n s_n
 *
 * With compactly supported potentials, X_n = diag(z, 1/z) outside the window
 * and all asymptotic normalizations are attained exactly at finite sites.
 *
 * Jost solutions (z on the unit circle; analytic extensions as noted):
 *   ψ_n  → [o(1);        z^n (1+o(1))]  as n → +∞   (z^{−n}ψ_n analytic |z|<1)
 *   ψ̄_n  → [z^{−n}(1+o(1)); o(1)]       as n → +∞   (z^n ψ̄_n analytic |z|>1)
 *   φ_n  → [z^{−n}(1+o(1)); o(1)]       as n → −∞   (z^n φ_n analytic |z|<1)
 *   φ̄_n  → [o(1);        z^n (1+o(1))]  as n → −∞   (z^{−n}φ̄_n analytic |z|>1)
 *
 * ψ and ψ̄ are seeded at n_max + pad and recursed backward; φ and φ̄ are seeded
 * at n_min − pad and recursed forward with X_n^{−1}.  Each direction is the
 * numerically stable one inside the member's analyticity region.
 *
 * Cumulative data (exact finite products/sums under compact support):
 *   D_n = ∏_{j≤n}(1 − a_j b_j)                            (all kinds)
 *   E_n = ∏_{j≤n}(1 + q_j r_{j+1})                        (qr only)
 *   S_n = Σ_{k≤n} r_k (q_k − q_{k+1} − q_k q_{k+1} r_{k+1})
 *                 / [(1 − q_k r_k)(1 − q_{k+1} r_{k+1})]  (qr only)
 *   Q_n = Σ_{k≤n} r_{k+2}(q_k − q_{k+1} − q_k q_{k+1} r_{k+1})
 *                 / [(1 + q_k r_{k+1})(1 + q_{k+1} r_{k+2})]  (qr only)
 *
 * Series coefficients (spectral projections on the shifted circle grid):
 *   K_{nl}  = (1/M) Σ_m ψ_n(z_m)  z_m^{−l}        (ψ_n = Σ_{l≥n} K_{nl} z^l)
 *   K̄_{nl}  = (1/M) Σ_m ψ̄_n(z_m) z_m^{+l}        (ψ̄_n = Σ_{l≥n} K̄_{nl} z^{−l})
 * Entries with n+l odd vanish identically and are floored to exact zero.
 */

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dnls/types.hpp"

namespace dnls {

using Eigen::Matrix2cd;
using Eigen::Vector2cd;

// ── Transfer matrices ─────────────────────────────────────────────────────────

inline Matrix2cd free_transfer(cd z) {
    if (z == cd{0.0, 0.0}) fail_input("ZeroSpectralParameter", "z must be nonzero");
    Matrix2cd X;
    X << z, cd{0.0, 0.0}, cd{0.0, 0.0}, 1.0 / z;
    return X;
}

// Matrix mapping the (n+1)-value of a solution to its n-value.
inline Matrix2cd transfer_matrix(const PotentialPair& pair, int n, cd z) {
    if (z == cd{0.0, 0.0}) fail_input("ZeroSpectralParameter", "z must be nonzero");
    Matrix2cd X;
    const cd a = pair.a(n), b = pair.b(n);
    if (pair.kind == Kind::qr) {
        const cd w = z - 1.0 / z;
        X << z, w * a, z * b, 1.0 / z + w * a * b;
    } else {
        X << z, z * a, b / z, 1.0 / z;
    }
    return X;
}

inline cd transfer_determinant(const PotentialPair& pair, int n) {
    return pair.kind == Kind::qr ? cd{1.0, 0.0} : 1.0 - pair.a(n) * pair.b(n);
}

// ── Jost solutions ────────────────────────────────────────────────────────────

struct JostFamily {
    cd z;
    int n_lo = 0, n_hi = 0;  // inclusive evaluation range
    bool has_inside = false;   // psi, phi available  (|z| <= 1)
    bool has_outside = false;  // psibar, phibar available (|z| >= 1)
    std::vector<Vector2cd> psi_v, phi_v, psibar_v, phibar_v;

    int index(int n) const {
        if (n < n_lo || n > n_hi) fail_input("BadSite", "site outside evaluation range");
        return n - n_lo;
    }
    const Vector2cd& psi(int n) const {
        if (!has_inside)
            throw std::domain_error("psi not analytic at |z| > 1; request |z| <= 1");
        return psi_v[static_cast<size_t>(index(n))];
    }
    const Vector2cd& phi(int n) const {
        if (!has_inside)
            throw std::domain_error("phi not analytic at |z| > 1; request |z| <= 1");
        return phi_v[static_cast<size_t>(index(n))];
    }
    const Vector2cd& psibar(int n) const {
        if (!has_outside)
            throw std::domain_error("psibar not analytic at |z| < 1; request |z| >= 1");
        return psibar_v[static_cast<size_t>(index(n))];
    }
    const Vector2cd& phibar(int n) const {
        if (!has_outside)
            throw std::domain_error("phibar not analytic at |z| < 1; request |z| >= 1");
        return phibar_v[static_cast<size_t>(index(n))];
    }
};

namespace detail {

inline cd pow_int(cd z, int k) {
    if (k == 0) return cd{1.0, 0.0};
    cd base = k > 0 ? z : 1.0 / z;
    int e = k > 0 ? k : -k;
    cd acc{1.0, 0.0};
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

}  // namespace detail

// Computes the Jost family on [n_min − pad, n_max + pad].  On the unit circle
// (to 1e−12) all four members are produced; strictly inside only ψ, φ;
// strictly outside only ψ̄, φ̄.
inline JostFamily jost_solutions(const PotentialPair& pair, cd z, int pad = 4) {
    if (z == cd{0.0, 0.0}) fail_input("ZeroSpectralParameter", "z must be nonzero");
    if (pad < 2) fail_input("BadWindow", "pad must be >= 2");
    const double az = std::abs(z);
    JostFamily f;
    f.z = z;
    f.n_lo = pair.n_min - pad;
    f.n_hi = pair.n_max() + pad;
    f.has_inside = az <= 1.0 + 1e-12;
    f.has_outside = az >= 1.0 - 1e-12;
    const size_t len = static_cast<size_t>(f.n_hi - f.n_lo + 1);

    // backward recursion from n_hi: Ψ_n = X_n Ψ_{n+1}
    auto backward = [&](const Vector2cd& seed) {
        std::vector<Vector2cd> out(len);
        out[len - 1] = seed;
        for (int n = f.n_hi - 1; n >= f.n_lo; --n)
            out[static_cast<size_t>(n - f.n_lo)] =
                transfer_matrix(pair, n, z) * out[static_cast<size_t>(n + 1 - f.n_lo)];
        return out;
    };
    // forward recursion from n_lo: Ψ_{n+1} = X_n^{−1} Ψ_n
    auto forward = [&](const Vector2cd& seed) {
        std::vector<Vector2cd> out(len);
        out[0] = seed;
        for (int n = f.n_lo; n < f.n_hi; ++n) {
            const Matrix2cd X = transfer_matrix(pair, n, z);
            const cd det = X(0, 0) * X(1, 1) - X(0, 1) * X(1, 0);
            if (std::abs(det) < 1e-13)
                fail_numeric("SingularTransferMatrix",
                             "det X_n vanishes at n = " + std::to_string(n));
            Matrix2cd Xi;
            Xi << X(1, 1), -X(0, 1), -X(1, 0), X(0, 0);
            Xi /= det;
            out[static_cast<size_t>(n + 1 - f.n_lo)] = Xi * out[static_cast<size_t>(n - f.n_lo)];
        }
        return out;
    };

    const cd z_hi = detail::pow_int(z, f.n_hi);
    const cd z_lo = detail::pow_int(z, f.n_lo);
    if (f.has_inside) {
        f.psi_v = backward(Vector2cd(cd{0.0, 0.0}, z_hi));
        f.phi_v = forward(Vector2cd(1.0 / z_lo, cd{0.0, 0.0}));
    }
    if (f.has_outside) {
        f.psibar_v = backward(Vector2cd(1.0 / z_hi, cd{0.0, 0.0}));
        f.phibar_v = forward(Vector2cd(cd{0.0, 0.0}, z_lo));
    }
    return f;
}

// ── Cumulative products and sums ─────────────────────────────────────────────

struct CumulativeData {
    Kind kind = Kind::qr;
    int n_min = 0, n_max = 0;  // stored range (the support window)
    std::vector<cd> D, E, S, Q;
    cd D_inf{1.0, 0.0}, E_inf{1.0, 0.0}, S_inf{0.0, 0.0}, Q_inf{0.0, 0.0};

    cd D_at(int n) const {
        if (n < n_min) return cd{1.0, 0.0};
        if (n > n_max) return D_inf;
        return D[static_cast<size_t>(n - n_min)];
    }
    cd E_at(int n) const {
        if (n < n_min) return cd{1.0, 0.0};
        if (n > n_max) return E_inf;
        return E[static_cast<size_t>(n - n_min)];
    }
    cd S_at(int n) const {
        if (n < n_min) return cd{0.0, 0.0};
        if (n > n_max) return S_inf;
        return S[static_cast<size_t>(n - n_min)];
    }
    cd Q_at(int n) const {
        if (n < n_min) return cd{0.0, 0.0};
        if (n > n_max) return Q_inf;
        return Q[static_cast<size_t>(n - n_min)];
    }
};

inline CumulativeData cumulative_data(const PotentialPair& pair) {
    CumulativeData c;
    c.kind = pair.kind;
    // E_n involves r_{n+1}, S_n/Q_n look two sites ahead; extend the stored
    // range one site left and two sites right of the support so every factor
    // with a nonzero term is included.
    c.n_min = pair.n_min - 1;
    c.n_max = pair.n_max() + 2;
    cd D{1.0, 0.0}, E{1.0, 0.0}, S{0.0, 0.0}, Q{0.0, 0.0};
    for (int n = c.n_min; n <= c.n_max; ++n) {
        const cd q = pair.a(n), r = pair.b(n);
        const cd dfac = 1.0 - q * r;
        if (std::abs(dfac) < 1e-13)
            fail_input("AdmissibilityViolation", "1 - a_n b_n vanishes at n = " + std::to_string(n));
        D *= dfac;
        c.D.push_back(D);
        if (pair.kind == Kind::qr) {
            const cd q1 = pair.a(n + 1), r1 = pair.b(n + 1), r2 = pair.b(n + 2);
            const cd efac = 1.0 + q * r1;
            if (std::abs(efac) < 1e-13)
                fail_input("AdmissibilityViolation",
                           "1 + q_n r_{n+1} vanishes at n = " + std::to_string(n));
            E *= efac;
            const cd num = q - q1 - q * q1 * r1;
            S += r * num / ((1.0 - q * r) * (1.0 - q1 * r1));
            Q += r2 * num / ((1.0 + q * r1) * (1.0 + q1 * r2));
            c.E.push_back(E);
            c.S.push_back(S);
            c.Q.push_back(Q);
        }
    }
    c.D_inf = D;
    if (pair.kind == Kind::qr) {
        c.E_inf = E;
        c.S_inf = S;
        c.Q_inf = Q;
    }
    return c;
}

// ── Series coefficients ───────────────────────────────────────────────────────

struct SeriesTables {
    int n_lo = 0, n_hi = 0, l_lo = 0, l_hi = 0;
    std::vector<std::vector<Vector2cd>> K_t, Kbar_t;  // [n − n_lo][l − l_lo]

    const Vector2cd& K(int n, int l) const {
        return K_t[static_cast<size_t>(n - n_lo)][static_cast<size_t>(l - l_lo)];
    }
    const Vector2cd& Kbar(int n, int l) const {
        return Kbar_t[static_cast<size_t>(n - n_lo)][static_cast<size_t>(l - l_lo)];
    }
};

inline SeriesTables series_coefficients(const PotentialPair& pair, const SpectralGrid& grid,
                                        int n_lo, int n_hi, int l_lo, int l_hi) {
    if (n_lo > n_hi || l_lo > l_hi) fail_input("BadWindow", "empty range");
    if (grid.M < 2 * (l_hi - l_lo + 1))
        fail_input("GridTooCoarse", "grid must have M >= 2 * span(l_range)");
    SeriesTables t;
    t.n_lo = n_lo;
    t.n_hi = n_hi;
    t.l_lo = l_lo;
    t.l_hi = l_hi;
    const int N = n_hi - n_lo + 1, L = l_hi - l_lo + 1;
    t.K_t.assign(static_cast<size_t>(N), std::vector<Vector2cd>(static_cast<size_t>(L),
                                                                Vector2cd::Zero()));
    t.Kbar_t = t.K_t;
    for (int m = 0; m < grid.M; ++m) {
        const cd z = grid.z(m);
        const JostFamily f = jost_solutions(pair, z);
        for (int n = n_lo; n <= n_hi; ++n) {
            const Vector2cd psi = n < f.n_lo   ? Vector2cd(cd{0, 0}, detail::pow_int(z, n))
                                  : n > f.n_hi ? Vector2cd(cd{0, 0}, detail::pow_int(z, n))
                                               : f.psi(n);
            const Vector2cd psb = n < f.n_lo   ? Vector2cd(detail::pow_int(z, -n), cd{0, 0})
                                  : n > f.n_hi ? Vector2cd(detail::pow_int(z, -n), cd{0, 0})
                                               : f.psibar(n);
            for (int l = l_lo; l <= l_hi; ++l) {
                t.K_t[static_cast<size_t>(n - n_lo)][static_cast<size_t>(l - l_lo)] +=
                    psi * detail::pow_int(z, -l);
                t.Kbar_t[static_cast<size_t>(n - n_lo)][static_cast<size_t>(l - l_lo)] +=
                    psb * detail::pow_int(z, l);
            }
        }
    }
    const double inv_m = 1.0 / grid.M;
    for (auto* tab : {&t.K_t, &t.Kbar_t}) {
        for (int n = n_lo; n <= n_hi; ++n)
            for (int l = l_lo; l <= l_hi; ++l) {
                Vector2cd& v =
                    (*tab)[static_cast<size_t>(n - n_lo)][static_cast<size_t>(l - l_lo)];
                v *= inv_m;
                if (((n + l) % 2 + 2) % 2 == 1) {
                    if (v.cwiseAbs().maxCoeff() > 1e-10)
                        fail_numeric("GridTooCoarse",
                                     "odd-parity series entry above tolerance (aliasing)");
                    v.setZero();
                } else {
                    // flooring keeps downstream kernels structurally sparse
                    for (int i = 0; i < 2; ++i)
                        if (std::abs(v(i)) < 1e-13) v(i) = cd{0.0, 0.0};
                }
            }
    }
    // aliasing check: when the l-range extends well beyond the finite support,
    // the coefficients at its boundary must have decayed to zero
    const int span = pair.n_max() - pair.n_min + 1;
    for (int n = n_lo; n <= n_hi; ++n)
        for (int l = l_hi - 1; l <= l_hi; ++l) {
            if (l < l_lo || l - n <= 2 * span + 4) continue;
            if (t.K(n, l).cwiseAbs().maxCoeff() > 1e-10 ||
                t.Kbar(n, l).cwiseAbs().maxCoeff() > 1e-10)
                fail_numeric("GridTooCoarse", "nonzero series tail at l_range boundary");
        }
    return t;
}

}  // namespace dnls
