/*
 * marchenko.hpp — Marchenko kernels, the truncated dense solves of the three
 * Marchenko formulations, and potential recovery for all three systems.
 *
 * Kernels (even k only; identically zero at odd k):
 *   Ω_k  = R̂_k + C A^{k−1} B          R̂_k  = (1/M) Σ_m R(z_m) z_m^{+k}
 *   Ω̄_k  = R̄̂_k + C̄ Ā^{−k−1} B̄        R̄̂_k  = (1/M) Σ_m R̄(z_m) z_m^{−k}
 * Kernel transport from the qr kernel (D := D_∞, E := E_∞ of the qr system):
 *   Ω^(ps)_k = (D/E) Ω^(qr)_k         Ω̄^(ps)_k = (E/D) Ω̄^(qr)_k
 *   Ω^(uv)_k = (D/E)(Ω^(qr)_k − Ω^(qr)_{k−2})
 *   Ω̄^(uv)_k = (E/D) Σ_{l≥0} Ω̄^(qr)_{k+2l}
 *
 * Standard system (for uv/ps the tables are the series coefficients K; for qr
 * they are the M-tables normalized by [M̄_nn M_nn] = I), m > n:
 *   [K̄_nm K_nm] + [[0, Ω̄_{n+m}], [Ω_{n+m}, 0]]
 *                + Σ_{l≥n+1} [K̄_nl K_nl][[0, Ω̄_{l+m}], [Ω_{l+m}, 0]] = 0
 * solved in uncoupled form for the scalar unknowns x_m = [K_nm]_1 and
 * y_m = [K̄_nm]_2 at even-parity indices m = n+2, n+4, …:
 *   x_m − Σ_j x_j W_{jm}  = −Ω̄_{n+m}     W_{jm}  = Σ_l Ω_{j+l} Ω̄_{l+m}
 *   y_m − Σ_j y_j W̄_{jm} = −Ω_{n+m}      W̄_{jm} = Σ_l Ω̄_{j+l} Ω_{l+m}
 * with back-substitution [K̄_nm]_1 = −Σ_l x_l Ω_{l+m},
 * [K_nm]_2 = −Σ_l y_l Ω̄_{l+m}, and diagonals K_nn = [0;1], K̄_nn = [1;0].
 *
 * Recovery:
 *   uv/ps: a_n = [K_{n(n+2)}]_1, b_n = [K̄_{n(n+2)}]_2
 *   qr:    q_n = (Σ_l [M_nl]_1 Σ_l [M_nl]_2)
 *                / (Σ_l [M̄_nl]_1 Σ_l [M_nl]_2 − Σ_l [M_nl]_1 Σ_l [M̄_nl]_2)
 *          r_n = Σ_{l≥n−1}[M̄_{(n−1)l}]_2/Σ[M_{(n−1)l}]_2 − Σ_{l≥n}[M̄_nl]_2/Σ[M_nl]_2
 *
 * Alternate (summed) system with G_n = Σ_{j≥n} Ω_j, Ḡ_n = Σ_{j≥n} Ω̄_j,
 * unknowns 𝒦_nm at all parities for m > n, diagonal 𝒦_nn = 𝒦_{n(n+1)}:
 *   𝒦_nm + Ḡ_{n+m} + Σ_{l≥n+1} Σ_{j≥n+1} (𝒦_{n(j+1)} − 𝒦_nj)
 *                                G_{j+l} (Ḡ_{l+m} − Ḡ_{l+m−1}) = 0   (uv data)
 * and the mirrored equation with G/Ḡ swapped on the ps data; recovery
 *   q_n = (D/E)(𝒦_nn − 𝒦_{(n+1)(n+1)}),  r_n = (E/D)(𝒦̄_{(n−1)(n−1)} − 𝒦̄_nn).
 *
 * Five inversion methods sharing one qr kernel builder:
 *   a) qr M-tables + row-sum quotient recovery
 *   b) alternate system on uv/ps kernels + diagonal differences
 *   c) uv standard solve, row sums = z = 1 Jost values, z = 1 recovery
 *   d) ps standard solve, likewise
 *   e) u from the uv first-component equation, s from the ps second-component
 *      equation, then the (u, s) product map
 */

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dnls/boundstates.hpp"
#include "dnls/scattering.hpp"
#include "dnls/transforms.hpp"
#include "dnls/types.hpp"

namespace dnls {

// ── Kernels ───────────────────────────────────────────────────────────────────

struct MarchenkoKernel {
    Kind kind = Kind::qr;
    int k_lo = 0, k_hi = 0;
    std::vector<cd> om, omb;  // values at k ∈ [k_lo, k_hi]
    double tail = 0.0;        // boundary magnitude at k_hi

    cd omega(int k) const {
        if (((k % 2) + 2) % 2 == 1) return cd{0.0, 0.0};
        if (k < k_lo || k > k_hi) return cd{0.0, 0.0};
        return om[static_cast<size_t>(k - k_lo)];
    }
    cd omegabar(int k) const {
        if (((k % 2) + 2) % 2 == 1) return cd{0.0, 0.0};
        if (k < k_lo || k > k_hi) return cd{0.0, 0.0};
        return omb[static_cast<size_t>(k - k_lo)];
    }
};

inline MarchenkoKernel build_kernels(const ScatteringData& data, int k_lo, int k_hi) {
    if (k_lo > k_hi) fail_input("BadWindow", "empty kernel range");
    const SpectralGrid grid = data.grid();
    // R̂_k pairs with z^{+k}, R̄̂_k with z^{−k}
    const FourierCoefficients rk =
        fourier_coefficients(data.R, grid, k_lo, k_hi, /*barred=*/true, /*check=*/false);
    const FourierCoefficients rbk =
        fourier_coefficients(data.Rbar, grid, k_lo, k_hi, /*barred=*/false, /*check=*/false);
    MarchenkoKernel ker;
    ker.kind = data.kind;
    ker.k_lo = k_lo;
    ker.k_hi = k_hi;
    for (int k = k_lo; k <= k_hi; ++k) {
        if (((k % 2) + 2) % 2 == 1) {
            ker.om.push_back(cd{0.0, 0.0});
            ker.omb.push_back(cd{0.0, 0.0});
            continue;
        }
        ker.om.push_back(rk.at(k) + kernel_contribution(data.inside, k));
        ker.omb.push_back(rbk.at(k) + kernel_contribution(data.outside, k));
    }
    for (int k = std::max(k_lo, k_hi - 1); k <= k_hi; ++k)
        ker.tail = std::max(ker.tail, std::max(std::abs(ker.omega(k)),
                                               std::abs(ker.omegabar(k))));
    return ker;
}

inline std::pair<MarchenkoKernel, MarchenkoKernel> kernels_for_uv_and_ps(
    const MarchenkoKernel& kqr, cd D_inf, cd E_inf) {
    if (kqr.kind != Kind::qr) fail_input("BadPotentialPair", "expected a qr kernel");
    const cd rho = D_inf / E_inf;

    MarchenkoKernel ps = kqr;
    ps.kind = Kind::ps;
    for (auto& v : ps.om) v *= rho;
    for (auto& v : ps.omb) v /= rho;

    MarchenkoKernel uv;
    uv.kind = Kind::uv;
    uv.k_lo = kqr.k_lo + 2;
    uv.k_hi = kqr.k_hi;
    if (std::abs(kqr.omegabar(kqr.k_hi)) > 1e-12 ||
        std::abs(kqr.omegabar(kqr.k_hi - 1)) > 1e-12)
        fail_numeric("InsufficientTail", "barred kernel tail sum has not converged in range");
    for (int k = uv.k_lo; k <= uv.k_hi; ++k)
        uv.om.push_back(rho * (kqr.omega(k) - kqr.omega(k - 2)));
    for (int k = uv.k_lo; k <= uv.k_hi; ++k) {
        cd sum{0.0, 0.0};
        for (int kk = k; kk <= kqr.k_hi; kk += 2) sum += kqr.omegabar(kk);
        uv.omb.push_back(sum / rho);
    }
    uv.tail = kqr.tail * std::max(std::abs(rho), std::abs(1.0 / rho)) * 2.0;
    return {uv, ps};
}

// ── Standard solve ────────────────────────────────────────────────────────────

struct SiteTables {
    int n = 0, m_max = 0;
    std::vector<Vector2cd> Kbar, K;  // index m − n, m ∈ [n, m_max]

    const Vector2cd& Kbar_at(int m) const { return Kbar[static_cast<size_t>(m - n)]; }
    const Vector2cd& K_at(int m) const { return K[static_cast<size_t>(m - n)]; }

    Vector2cd row_sum_Kbar() const {
        Vector2cd s = Vector2cd::Zero();
        for (const auto& v : Kbar) s += v;
        return s;
    }
    Vector2cd row_sum_K() const {
        Vector2cd s = Vector2cd::Zero();
        for (const auto& v : K) s += v;
        return s;
    }
};

inline SiteTables solve_standard(const MarchenkoKernel& ker, int n, int m_max) {
    if (m_max < n) fail_input("BadWindow", "m_max below the site index");
    // unknowns live at m = n+2, n+4, …; cap the dense system size
    int J = (m_max - n) / 2;
    if (J > 512) {
        J = 512;
        m_max = n + 2 * J;
    }
    SiteTables t;
    t.n = n;
    t.m_max = m_max;
    t.Kbar.assign(static_cast<size_t>(m_max - n + 1), Vector2cd::Zero());
    t.K.assign(static_cast<size_t>(m_max - n + 1), Vector2cd::Zero());
    t.Kbar[0] = Vector2cd(cd{1.0, 0.0}, cd{0.0, 0.0});
    t.K[0] = Vector2cd(cd{0.0, 0.0}, cd{1.0, 0.0});
    if (J == 0) return t;

    // Bound-state kernels grow like |z|^{k} (inside) and |z̄|^{-k} (outside) as
    // k decreases; a huge kernel value at this site means the site lies deep in
    // the exponential tail left of every soliton, where the off-diagonal
    // solution is below roundoff.  Return the trivial table there instead of
    // feeding an overflow-scale matrix to the dense solver.
    const double site_scale =
        std::max({std::abs(ker.omega(2 * n + 2)), std::abs(ker.omega(2 * n + 4)),
                  std::abs(ker.omegabar(2 * n + 2)), std::abs(ker.omegabar(2 * n + 4))});
    if (site_scale > 1e8) return t;

    auto midx = [&](int i) { return n + 2 * (i + 1); };  // unknown index → m
    Eigen::MatrixXcd Ax = Eigen::MatrixXcd::Zero(J, J), Ay = Eigen::MatrixXcd::Zero(J, J);
    Eigen::VectorXcd bx(J), by(J);
    for (int im = 0; im < J; ++im) {
        const int m = midx(im);
        bx(im) = -ker.omegabar(n + m);
        by(im) = -ker.omega(n + m);
        for (int ij = 0; ij < J; ++ij) {
            const int j = midx(ij);
            cd w{0.0, 0.0}, wb{0.0, 0.0};
            for (int l = n + 2; l <= m_max; l += 2) {
                w += ker.omega(j + l) * ker.omegabar(l + m);
                wb += ker.omegabar(j + l) * ker.omega(l + m);
            }
            Ax(im, ij) = (im == ij ? cd{1.0, 0.0} : cd{0.0, 0.0}) - w;
            Ay(im, ij) = (im == ij ? cd{1.0, 0.0} : cd{0.0, 0.0}) - wb;
        }
    }
    const Eigen::FullPivLU<Eigen::MatrixXcd> lux(Ax), luy(Ay);
    if (!lux.isInvertible() || !luy.isInvertible())
        fail_numeric("SingularMarchenkoOperator",
                     "truncated Marchenko operator is singular at n = " + std::to_string(n));
    const Eigen::VectorXcd x = lux.solve(bx), y = luy.solve(by);
    for (int i = 0; i < J; ++i) {
        t.K[static_cast<size_t>(midx(i) - n)](0) = x(i);
        t.Kbar[static_cast<size_t>(midx(i) - n)](1) = y(i);
    }
    // back-substitution of the cross components
    for (int im = 0; im < J; ++im) {
        const int m = midx(im);
        cd kb1{0.0, 0.0}, k2{0.0, 0.0};
        for (int i = 0; i < J; ++i) {
            const int l = midx(i);
            kb1 -= x(i) * ker.omega(l + m);
            k2 -= y(i) * ker.omegabar(l + m);
        }
        t.Kbar[static_cast<size_t>(m - n)](0) = kb1;
        t.K[static_cast<size_t>(m - n)](1) = k2;
    }
    return t;
}

// Residual of the coupled system over the solved range (diagnostic).
inline double standard_residual(const MarchenkoKernel& ker, const SiteTables& t) {
    double res = 0.0;
    for (int m = t.n + 1; m <= t.m_max; ++m) {
        Vector2cd col1 = (m - t.n) % 2 == 0 ? t.Kbar_at(m) : Vector2cd::Zero();
        Vector2cd col2 = (m - t.n) % 2 == 0 ? t.K_at(m) : Vector2cd::Zero();
        col1 += Vector2cd(cd{0.0, 0.0}, ker.omega(t.n + m));
        col2 += Vector2cd(ker.omegabar(t.n + m), cd{0.0, 0.0});
        for (int l = t.n + 2; l <= t.m_max; l += 2) {
            col1 += t.K_at(l) * ker.omega(l + m);
            col2 += t.Kbar_at(l) * ker.omegabar(l + m);
        }
        res = std::max(res, col1.cwiseAbs().maxCoeff());
        res = std::max(res, col2.cwiseAbs().maxCoeff());
    }
    return res;
}

// ── Recovery from standard tables ─────────────────────────────────────────────

struct SolvedWindow {
    Kind kind = Kind::qr;
    int n_lo = 0, n_hi = 0;
    std::vector<SiteTables> site;  // index n − n_lo

    const SiteTables& at(int n) const { return site[static_cast<size_t>(n - n_lo)]; }
};

inline SolvedWindow solve_window(const MarchenkoKernel& ker, int n_lo, int n_hi, int m_tail) {
    // The solution at site n stays significant while the kernel at the
    // absolute index n + m is, so the truncation point must clear the kernel's
    // decay index k_dec, not just trail the site by a fixed amount.  Otherwise
    // sites far left of the support would drop O(1) right-hand-side terms.
    int k_dec = ker.k_lo;
    for (int k = ker.k_hi; k >= ker.k_lo; --k) {
        if (std::abs(ker.omega(k)) > 1e-13 || std::abs(ker.omegabar(k)) > 1e-13) {
            k_dec = k + 1;
            break;
        }
    }
    SolvedWindow w;
    w.kind = ker.kind;
    w.n_lo = n_lo;
    w.n_hi = n_hi;
    for (int n = n_lo; n <= n_hi; ++n) {
        const int m_max = std::max(n + m_tail, k_dec - n);
        w.site.push_back(solve_standard(ker, n, m_max));
    }
    return w;
}

inline PotentialPair recover(const SolvedWindow& w, cd D_inf, cd E_inf) {
    std::vector<cd> a, b;
    if (w.kind != Kind::qr) {
        for (int n = w.n_lo; n <= w.n_hi; ++n) {
            const SiteTables& t = w.at(n);
            if (t.m_max < n + 2) fail_input("BadWindow", "tables too short for recovery");
            a.push_back(t.K_at(n + 2)(0));
            b.push_back(t.Kbar_at(n + 2)(1));
        }
        return PotentialPair(w.kind, w.n_lo, std::move(a), std::move(b)).trimmed();
    }
    (void)D_inf;
    (void)E_inf;
    // qr row-sum quotients; r_n needs the site n−1, so start one site later
    for (int n = w.n_lo + 1; n <= w.n_hi; ++n) {
        const Vector2cd sb = w.at(n).row_sum_Kbar(), s = w.at(n).row_sum_K();
        const Vector2cd pb = w.at(n - 1).row_sum_Kbar(), p = w.at(n - 1).row_sum_K();
        const cd den = sb(0) * s(1) - s(0) * sb(1);
        if (std::abs(den) < 1e-13 || std::abs(s(1)) < 1e-13 || std::abs(p(1)) < 1e-13)
            fail_numeric("DegenerateDenominator", "row-sum recovery denominator vanishes");
        a.push_back(s(0) * s(1) / den);
        b.push_back(pb(1) / p(1) - sb(1) / s(1));
    }
    return PotentialPair(Kind::qr, w.n_lo + 1, std::move(a), std::move(b)).trimmed();
}

// ── Alternate (summed) system ─────────────────────────────────────────────────

struct SummedKernel {
    int k_lo = 0, k_hi = 0;
    std::vector<cd> G_v, Gbar_v;  // G_n = Σ_{j≥n} Ω_j on n ∈ [k_lo, k_hi + 1]

    cd G(int nn) const {
        if (nn > k_hi) return cd{0.0, 0.0};
        if (nn < k_lo) nn = k_lo;
        return G_v[static_cast<size_t>(nn - k_lo)];
    }
    cd Gbar(int nn) const {
        if (nn > k_hi) return cd{0.0, 0.0};
        if (nn < k_lo) nn = k_lo;
        return Gbar_v[static_cast<size_t>(nn - k_lo)];
    }
};

inline SummedKernel summed_kernel(const MarchenkoKernel& ker) {
    SummedKernel s;
    s.k_lo = ker.k_lo;
    s.k_hi = ker.k_hi;
    s.G_v.assign(static_cast<size_t>(ker.k_hi - ker.k_lo + 1), cd{0.0, 0.0});
    s.Gbar_v = s.G_v;
    cd g{0.0, 0.0}, gb{0.0, 0.0};
    for (int k = ker.k_hi; k >= ker.k_lo; --k) {
        g += ker.omega(k);
        gb += ker.omegabar(k);
        s.G_v[static_cast<size_t>(k - ker.k_lo)] = g;
        s.Gbar_v[static_cast<size_t>(k - ker.k_lo)] = gb;
    }
    return s;
}

// Solves one site of the alternate system; returns the diagonal value
// 𝒦_nn = 𝒦_{n(n+1)}.  `swapped` exchanges the roles of G and Ḡ (the barred
// equation solved on the ps kernel).
inline cd solve_alternate_site(const SummedKernel& s, int n, int J, bool swapped) {
    auto G = [&](int k) { return swapped ? s.Gbar(k) : s.G(k); };
    auto Gb = [&](int k) { return swapped ? s.G(k) : s.Gbar(k); };
    const int L = 2 * J;  // truncation of the internal l sum
    auto w = [&](int j, int m) {
        cd acc{0.0, 0.0};
        for (int l = n + 1; l <= n + L; ++l)
            acc += G(j + l) * (Gb(l + m) - Gb(l + m - 1));
        return acc;
    };
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(J, J);
    Eigen::VectorXcd rhs(J);
    for (int im = 0; im < J; ++im) {
        const int m = n + 1 + im;
        rhs(im) = -Gb(n + m);
        for (int ij = 0; ij < J; ++ij) {
            const int j = n + 1 + ij;
            cd coef = (im == ij) ? cd{1.0, 0.0} : cd{0.0, 0.0};
            if (j >= n + 2) coef += w(j - 1, m);
            coef -= w(j, m);
            A(im, ij) = coef;
        }
    }
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible())
        fail_numeric("SingularMarchenkoOperator",
                     "alternate Marchenko operator is singular at n = " + std::to_string(n));
    const Eigen::VectorXcd x = lu.solve(rhs);
    return x(0);  // 𝒦_{n(n+1)} = 𝒦_nn
}

struct AlternateDiagonals {
    int n_lo = 0, n_hi = 0;
    std::vector<cd> Kdiag, Kbardiag;  // 𝒦_nn (uv), 𝒦̄_nn (ps)

    cd K(int n) const { return Kdiag[static_cast<size_t>(n - n_lo)]; }
    cd Kbar(int n) const { return Kbardiag[static_cast<size_t>(n - n_lo)]; }
};

inline AlternateDiagonals solve_alternate(const MarchenkoKernel& kuv,
                                          const MarchenkoKernel& kps, int n_lo, int n_hi,
                                          int J) {
    const SummedKernel suv = summed_kernel(kuv), sps = summed_kernel(kps);
    AlternateDiagonals d;
    d.n_lo = n_lo;
    d.n_hi = n_hi;
    for (int n = n_lo; n <= n_hi; ++n) {
        d.Kdiag.push_back(solve_alternate_site(suv, n, J, false));
        d.Kbardiag.push_back(solve_alternate_site(sps, n, J, true));
    }
    return d;
}

inline PotentialPair recover_alternate(const AlternateDiagonals& d, cd D_inf, cd E_inf) {
    const cd rho = D_inf / E_inf;
    std::vector<cd> q, r;
    for (int n = d.n_lo + 1; n <= d.n_hi - 1; ++n) {
        q.push_back(rho * (d.K(n) - d.K(n + 1)));
        r.push_back((d.Kbar(n - 1) - d.Kbar(n)) / rho);
    }
    return PotentialPair(Kind::qr, d.n_lo + 1, std::move(q), std::move(r)).trimmed();
}

// ── Full inversion ────────────────────────────────────────────────────────────

enum class InversionMethod { a, b, c, d, e };

inline InversionMethod inversion_method_from_name(const std::string& s) {
    if (s == "a") return InversionMethod::a;
    if (s == "b") return InversionMethod::b;
    if (s == "c") return InversionMethod::c;
    if (s == "d") return InversionMethod::d;
    if (s == "e") return InversionMethod::e;
    fail_input("UnknownMethod", "expected one of a|b|c|d|e, got '" + s + "'");
}

inline PotentialPair invert(const ScatteringData& data, InversionMethod method, int n_lo,
                            int n_hi, int m_tail = 64) {
    if (data.kind != Kind::qr) fail_input("BadPotentialPair", "inversion expects qr data");
    if (n_lo > n_hi) fail_input("BadWindow", "empty inversion window");
    const cd D = data.D_inf, E = data.E_inf;
    // grid quadrature only resolves Fourier indices |k| <= M/2; clamp the
    // truncation tail so the kernel range stays alias-free
    if (data.M > 0) {
        const int tail_cap = (data.M / 2 - 4) / 2 - n_hi;
        if (tail_cap < 8 || 4 - 2 * n_lo > data.M / 2)
            fail_input("BadWindow", "grid too small to resolve kernels on this window");
        m_tail = std::min(m_tail, tail_cap);
    }
    const int k_lo = 2 * n_lo - 4;
    const int k_hi = 2 * (n_hi + m_tail) + 4;
    const MarchenkoKernel kqr = build_kernels(data, k_lo, k_hi);

    switch (method) {
        case InversionMethod::a: {
            const SolvedWindow w = solve_window(kqr, n_lo - 1, n_hi, m_tail);
            return recover(w, D, E);
        }
        case InversionMethod::b: {
            const auto [kuv, kps] = kernels_for_uv_and_ps(kqr, D, E);
            const AlternateDiagonals d =
                solve_alternate(kuv, kps, n_lo - 1, n_hi + 1, m_tail);
            return recover_alternate(d, D, E);
        }
        case InversionMethod::c:
        case InversionMethod::d: {
            const auto [kuv, kps] = kernels_for_uv_and_ps(kqr, D, E);
            const bool use_uv = method == InversionMethod::c;
            const Kind kind = use_uv ? Kind::uv : Kind::ps;
            const SolvedWindow w =
                solve_window(use_uv ? kuv : kps, n_lo - 2, n_hi + 2, m_tail);
            JostAtOne j1;
            j1.kind = kind;
            j1.n_lo = w.n_lo;
            j1.n_hi = w.n_hi;
            for (int n = w.n_lo; n <= w.n_hi; ++n) {
                Matrix2cd M;
                M.col(0) = w.at(n).row_sum_Kbar();
                M.col(1) = w.at(n).row_sum_K();
                j1.value.push_back(M);
            }
            return recover_qr_at_one(kind, j1, D, E);
        }
        case InversionMethod::e: {
            const auto [kuv, kps] = kernels_for_uv_and_ps(kqr, D, E);
            std::vector<cd> u, s;
            for (int n = n_lo; n <= n_hi; ++n) {
                u.push_back(solve_standard(kuv, n, n + m_tail).K_at(n + 2)(0));
                s.push_back(solve_standard(kps, n, n + m_tail).Kbar_at(n + 2)(1));
            }
            return us_to_qr(n_lo, u, s);
        }
    }
    fail_input("UnknownMethod", "unreachable");
}

}  // namespace dnls
