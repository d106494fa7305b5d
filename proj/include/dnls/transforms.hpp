/*
 * transforms.hpp — maps among the (q,r), (u,v), (p,s) potential pairs and the
 * induced relations on Jost solutions and scattering coefficients.
 *
 * Potential maps (D_n, E_n are the qr cumulative products):
 *   u_n = q_n E_{n−1}/D_n
 *   v_n = (−r_n + r_{n+1} − q_n r_n r_{n+1}) D_{n−1}/E_n
 *   p_n = (q_n − q_{n+1} − q_n q_{n+1} r_{n+1}) E_{n−1}/D_{n+1}
 *   s_n = r_{n+1} D_n/E_n
 * Inverse from (u, s):
 *   q_n = u_n ∏_{k≤n−1} (1 − u_k s_k)/(1 + u_{k+1} s_k)
 *   r_n = s_{n−1} ∏_{k≤n−1} (1 + u_k s_{k−1})/(1 − u_k s_k)
 * Consistency products:
 *   (1 − u_n v_n)(1 − q_n r_n)(1 + q_n r_{n+1}) = 1
 *   (1 − p_n s_n)(1 − q_{n+1} r_{n+1})(1 + q_n r_{n+1}) = 1
 *   D_∞^(uv) D_∞ E_∞ = 1,   D_n^(ps) = 1/(D_{n+1} E_n)
 *
 * Jost relations, with σ(z) = 1/(1 − 1/z²),
 *   Λ_n = [[1/E_{n−1}, −q_n/D_n], [r_n/E_{n−1}, 1/D_{n−1}]]  (det = 1/(E_{n−1}D_n))
 *   Γ_n = [[(1−1/z²)/E_{n−1}, 0], [r_n/E_{n−1}, 1/D_{n−1}]]
 *   ψ^(qr) = D_∞ Γ_n ψ^(uv) = D_∞ Λ_n ψ^(ps)
 *   φ^(qr) = σ(z) Γ_n φ^(uv) = Λ_n φ^(ps)
 *   ψ̄^(qr) = E_∞ σ(z) Γ_n ψ̄^(uv) = E_∞ Λ_n ψ̄^(ps)
 *   φ̄^(qr) = Γ_n φ̄^(uv) = Λ_n φ̄^(ps)
 *
 * Scattering relations (T := T^(qr), T̄ := T̄^(qr)):
 *   T_l^(uv) = T_l^(ps) = D_∞ T        T_r^(uv) = T_r^(ps) = T/E_∞
 *   T̄_l^(uv) = T̄_l^(ps) = E_∞ T̄       T̄_r^(uv) = T̄_r^(ps) = T̄/D_∞
 *   R^(uv) = (1−1/z²)(D_∞/E_∞) R      R^(ps) = (D_∞/E_∞) R
 *   R̄^(uv) = σ(z)(E_∞/D_∞) R̄          R̄^(ps) = (E_∞/D_∞) R̄
 *   L^(uv) = σ(z) L                    L^(ps) = L
 *   L̄^(uv) = (1−1/z²) L̄               L̄^(ps) = L̄
 *
 * z = 1 closed forms, as the 2×2 matrix [ψ̄_n(1) ψ_n(1)] of the uv/ps systems
 * derived from a qr pair, and the inverse recovery formulas — see jost_at_one
 * and recover_qr_at_one below.
 */

#pragma once

#include <utility>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/scattering.hpp"
#include "dnls/types.hpp"

namespace dnls {

// ── Potential maps ────────────────────────────────────────────────────────────

// The v potential gains one site on the left (v_{n_min−1} = r_{n_min}); the
// output window is [n_min − 1, n_max].
inline PotentialPair qr_to_uv(const PotentialPair& pair) {
    if (pair.kind != Kind::qr) fail_input("BadPotentialPair", "qr_to_uv expects a qr pair");
    check_admissible(pair);
    const CumulativeData c = cumulative_data(pair);
    const int lo = pair.n_min - 1, hi = pair.n_max();
    std::vector<cd> u, v;
    for (int n = lo; n <= hi; ++n) {
        const cd q = pair.a(n), r = pair.b(n), r1 = pair.b(n + 1);
        u.push_back(q * c.E_at(n - 1) / c.D_at(n));
        v.push_back((-r + r1 - q * r * r1) * c.D_at(n - 1) / c.E_at(n));
    }
    return PotentialPair(Kind::uv, lo, std::move(u), std::move(v));
}

// The p potential gains one site on the left (p_{n_min−1} = −q_{n_min}).
inline PotentialPair qr_to_ps(const PotentialPair& pair) {
    if (pair.kind != Kind::qr) fail_input("BadPotentialPair", "qr_to_ps expects a qr pair");
    check_admissible(pair);
    const CumulativeData c = cumulative_data(pair);
    const int lo = pair.n_min - 1, hi = pair.n_max();
    std::vector<cd> p, s;
    for (int n = lo; n <= hi; ++n) {
        const cd q = pair.a(n), q1 = pair.a(n + 1), r1 = pair.b(n + 1);
        p.push_back((q - q1 - q * q1 * r1) * c.E_at(n - 1) / c.D_at(n + 1));
        s.push_back(r1 * c.D_at(n) / c.E_at(n));
    }
    return PotentialPair(Kind::ps, lo, std::move(p), std::move(s));
}

// Inverse map from the u and s sequences (sharing the window [n_min, …]).
inline PotentialPair us_to_qr(int n_min, const std::vector<cd>& u, const std::vector<cd>& s) {
    if (u.size() != s.size() || u.empty())
        fail_input("BadPotentialPair", "u/s sequences must share a nonempty window");
    const int n_max = n_min + static_cast<int>(u.size()) - 1;
    auto at = [&](const std::vector<cd>& w, int n) {
        return (n >= n_min && n <= n_max) ? w[static_cast<size_t>(n - n_min)] : cd{0.0, 0.0};
    };
    // running products over k ≤ n−1
    std::vector<cd> q, r;
    cd prod_q{1.0, 0.0}, prod_r{1.0, 0.0};
    for (int n = n_min; n <= n_max + 1; ++n) {
        q.push_back(at(u, n) * prod_q);
        r.push_back(at(s, n - 1) * prod_r);
        const cd f1 = 1.0 - at(u, n) * at(s, n);
        const cd f2 = 1.0 + at(u, n + 1) * at(s, n);
        const cd f3 = 1.0 + at(u, n) * at(s, n - 1);
        if (std::abs(f1) < 1e-13 || std::abs(f2) < 1e-13)
            fail_numeric("DivisionByZeroFactor",
                         "vanishing factor in the (u,s) product at n = " + std::to_string(n));
        prod_q *= f1 / f2;
        prod_r *= f3 / f1;
    }
    return PotentialPair(Kind::qr, n_min, std::move(q), std::move(r)).trimmed();
}

// ── Jost relations ────────────────────────────────────────────────────────────

struct TransformFactors {
    PotentialPair pair;   // the qr pair
    CumulativeData cum;   // its cumulative products

    static cd sigma(cd z) {
        const cd denom = 1.0 - 1.0 / (z * z);
        if (std::abs(denom) < 1e-13)
            fail_numeric("SingularFactor", "1/(1 - 1/z^2) singular at z = +/-1");
        return 1.0 / denom;
    }

    Matrix2cd Lambda(int n) const {
        Matrix2cd L;
        L << 1.0 / cum.E_at(n - 1), -pair.a(n) / cum.D_at(n),
             pair.b(n) / cum.E_at(n - 1), 1.0 / cum.D_at(n - 1);
        return L;
    }

    Matrix2cd Gamma(int n, cd z) const {
        Matrix2cd G;
        G << (1.0 - 1.0 / (z * z)) / cum.E_at(n - 1), cd{0.0, 0.0},
             pair.b(n) / cum.E_at(n - 1), 1.0 / cum.D_at(n - 1);
        return G;
    }
};

inline TransformFactors transform_factors(const PotentialPair& qr_pair) {
    if (qr_pair.kind != Kind::qr) fail_input("BadPotentialPair", "factors require a qr pair");
    return TransformFactors{qr_pair, cumulative_data(qr_pair)};
}

enum class RelateDirection { qr_from_uv, qr_from_ps, uv_from_qr, ps_from_qr };

// Produces the partner system's Jost family via the 2×2 multipliers.  `f` is
// the input family (uv/ps for qr_from_*, qr for *_from_qr); `qr_pair` is the
// underlying qr pair in every case.
inline JostFamily relate_jost(RelateDirection dir, const JostFamily& f,
                              const CumulativeData& cum, const PotentialPair& qr_pair) {
    if (qr_pair.kind != Kind::qr || cum.kind != Kind::qr)
        fail_input("BadPotentialPair", "relate_jost requires the underlying qr data");
    const cd z = f.z;
    const cd w = 1.0 - 1.0 / (z * z);
    const bool uses_gamma = dir == RelateDirection::qr_from_uv || dir == RelateDirection::uv_from_qr;
    if (uses_gamma && std::abs(w) < 1e-13)
        fail_numeric("SingularFactor", "Jost relation singular at z = +/-1");
    const bool forward = dir == RelateDirection::qr_from_uv || dir == RelateDirection::qr_from_ps;
    const TransformFactors tf{qr_pair, cum};

    JostFamily out = f;
    for (int n = f.n_lo; n <= f.n_hi; ++n) {
        const size_t i = static_cast<size_t>(n - f.n_lo);
        Matrix2cd M = uses_gamma ? tf.Gamma(n, z) : tf.Lambda(n);
        if (!forward) {
            const cd det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
            if (std::abs(det) < 1e-14)
                fail_numeric("SingularFactor", "multiplier not invertible at n = " + std::to_string(n));
            Matrix2cd Mi;
            Mi << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
            M = Mi / det;
        }
        // member prefactors in the qr-from-partner direction
        const cd sig = uses_gamma ? 1.0 / w : cd{1.0, 0.0};
        cd c_psi = cum.D_inf;
        cd c_phi = uses_gamma ? sig : cd{1.0, 0.0};
        cd c_psibar = uses_gamma ? cum.E_inf * sig : cum.E_inf;
        cd c_phibar{1.0, 0.0};
        if (!forward) {
            c_psi = 1.0 / c_psi;
            c_phi = 1.0 / c_phi;
            c_psibar = 1.0 / c_psibar;
            c_phibar = 1.0 / c_phibar;
        }
        if (f.has_inside) {
            out.psi_v[i] = c_psi * (M * f.psi_v[i]);
            out.phi_v[i] = c_phi * (M * f.phi_v[i]);
        }
        if (f.has_outside) {
            out.psibar_v[i] = c_psibar * (M * f.psibar_v[i]);
            out.phibar_v[i] = c_phibar * (M * f.phibar_v[i]);
        }
    }
    return out;
}

// ── Scattering relations ──────────────────────────────────────────────────────

// Predicts the uv and ps scattering data from qr scattering data.
inline std::pair<ScatteringData, ScatteringData> relate_scattering(const ScatteringData& s) {
    if (s.kind != Kind::qr) fail_input("BadPotentialPair", "relate_scattering expects qr data");
    const SpectralGrid grid = s.grid();
    const cd D = s.D_inf, E = s.E_inf;
    ScatteringData uv, ps;
    uv.kind = Kind::uv;
    ps.kind = Kind::ps;
    uv.M = ps.M = s.M;
    for (auto* d : {&uv, &ps})
        for (auto* v : {&d->T_l, &d->T_r, &d->Tbar_l, &d->Tbar_r, &d->R, &d->Rbar, &d->L,
                        &d->Lbar})
            v->resize(static_cast<size_t>(s.M));
    for (int m = 0; m < s.M; ++m) {
        const size_t i = static_cast<size_t>(m);
        const cd z = grid.z(m);
        const cd w = 1.0 - 1.0 / (z * z);  // nonzero on the shifted grid
        const cd T = s.T_l[i], Tb = s.Tbar_l[i];
        uv.T_l[i] = ps.T_l[i] = D * T;
        uv.T_r[i] = ps.T_r[i] = T / E;
        uv.Tbar_l[i] = ps.Tbar_l[i] = E * Tb;
        uv.Tbar_r[i] = ps.Tbar_r[i] = Tb / D;
        ps.R[i] = (D / E) * s.R[i];
        uv.R[i] = w * ps.R[i];
        ps.Rbar[i] = (E / D) * s.Rbar[i];
        uv.Rbar[i] = ps.Rbar[i] / w;
        ps.L[i] = s.L[i];
        uv.L[i] = s.L[i] / w;
        ps.Lbar[i] = s.Lbar[i];
        uv.Lbar[i] = w * s.Lbar[i];
    }
    uv.D_inf = ps.D_inf = 1.0 / (D * E);
    uv.E_inf = ps.E_inf = cd{1.0, 0.0};
    if (!s.inside.empty()) {
        uv.inside = convert_triplet(s.inside, Kind::qr, Kind::uv, D, E);
        ps.inside = convert_triplet(s.inside, Kind::qr, Kind::ps, D, E);
    }
    if (!s.outside.empty()) {
        uv.outside = convert_triplet(s.outside, Kind::qr, Kind::uv, D, E);
        ps.outside = convert_triplet(s.outside, Kind::qr, Kind::ps, D, E);
    }
    return {uv, ps};
}

// ── z = 1 closed forms ────────────────────────────────────────────────────────

struct JostAtOne {
    Kind kind = Kind::qr;
    int n_lo = 0, n_hi = 0;
    std::vector<Matrix2cd> value;  // [ψ̄_n(1) ψ_n(1)]

    const Matrix2cd& at(int n) const {
        const int c = n < n_lo ? n_lo : (n > n_hi ? n_hi : n);
        return value[static_cast<size_t>(c - n_lo)];
    }
};

// Closed-form z = 1 Jost matrices of the system `kind` derived from the qr
// pair (kind = qr gives the pair's own system).
inline JostAtOne jost_at_one(Kind kind, const PotentialPair& pair) {
    if (pair.kind != Kind::qr) fail_input("BadPotentialPair", "jost_at_one expects a qr pair");
    const CumulativeData c = cumulative_data(pair);
    JostAtOne out;
    out.kind = kind;
    out.n_lo = pair.n_min - 2;
    out.n_hi = pair.n_max() + 2;
    // suffix sums Σ_{j≥n} q_j and Σ_{j≥n} r_j
    auto suffix = [&](bool first, int n) {
        cd acc{0.0, 0.0};
        for (int j = std::max(n, pair.n_min); j <= pair.n_max(); ++j)
            acc += first ? pair.a(j) : pair.b(j);
        return acc;
    };
    for (int n = out.n_lo; n <= out.n_hi; ++n) {
        Matrix2cd M;
        if (kind == Kind::qr) {
            M << cd{1.0, 0.0}, cd{0.0, 0.0}, suffix(false, n), cd{1.0, 0.0};
        } else if (kind == Kind::uv) {
            const cd sq = suffix(true, n);
            M << c.E_at(n - 1) / c.E_inf, (c.E_at(n - 1) / c.D_inf) * sq,
                 -pair.b(n) * c.D_at(n - 1) / c.E_inf,
                 (c.D_at(n - 1) / c.D_inf) * (1.0 - pair.b(n) * sq);
        } else {
            const cd sr = suffix(false, n + 1);
            M << (c.E_at(n - 1) / c.E_inf) * (1.0 + pair.a(n) * sr),
                 pair.a(n) * c.E_at(n - 1) / c.D_inf,
                 (c.D_at(n) / c.E_inf) * sr, c.D_at(n) / c.D_inf;
        }
        out.value.push_back(M);
    }
    return out;
}

// Recovers the qr pair from the z = 1 Jost matrices of its uv or ps partner.
inline PotentialPair recover_qr_at_one(Kind kind, const JostAtOne& j1, cd D_inf, cd E_inf) {
    if (kind == Kind::qr)
        fail_input("BadPotentialPair", "q_n cannot be read from qr z = 1 data");
    const cd rho = D_inf / E_inf;
    std::vector<cd> q, r;
    const int lo = j1.n_lo + 1, hi = j1.n_hi - 1;
    for (int n = lo; n <= hi; ++n) {
        const Matrix2cd& M = j1.at(n);
        const cd psb1 = M(0, 0), psb2 = M(1, 0), ps1 = M(0, 1), ps2 = M(1, 1);
        const cd det = psb1 * ps2 - psb2 * ps1;
        if (kind == Kind::uv) {
            const Matrix2cd& Mn = j1.at(n + 1);
            if (std::abs(psb1) < 1e-13 || std::abs(Mn(0, 0)) < 1e-13 || std::abs(det) < 1e-13)
                fail_numeric("DegenerateDenominator", "z = 1 recovery denominator vanishes");
            q.push_back(rho * (ps1 / psb1 - Mn(0, 1) / Mn(0, 0)));
            r.push_back(-(psb1 * psb2 / det) / rho);
        } else {
            const Matrix2cd& Mp = j1.at(n - 1);
            if (std::abs(ps2) < 1e-13 || std::abs(Mp(1, 1)) < 1e-13 || std::abs(det) < 1e-13)
                fail_numeric("DegenerateDenominator", "z = 1 recovery denominator vanishes");
            q.push_back(rho * ps1 * ps2 / det);
            r.push_back((Mp(1, 0) / Mp(1, 1) - psb2 / ps2) / rho);
        }
    }
    return PotentialPair(Kind::qr, lo, std::move(q), std::move(r)).trimmed();
}

}  // namespace dnls
