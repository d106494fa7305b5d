/*
 * scattering.hpp — scattering coefficients on the unit-circle grid.
 *
 * With compactly supported potentials the Jost solutions reach their free
 * asymptotic forms exactly at n_lo = n_min − pad and n_hi = n_max + pad, so
 * the scattering coefficients are exact boundary reads:
 *
 *   at n_hi:  φ_n  = [ z^{−n}/T_r ;  (R/T_r)  z^n ]
 *             φ̄_n  = [ (R̄/T̄_r) z^{−n} ;  z^n/T̄_r ]
 *   at n_lo:  ψ_n  = [ (L/T_l) z^{−n} ;  z^n/T_l ]
 *             ψ̄_n  = [ z^{−n}/T̄_l ;  (L̄/T̄_l) z^n ]
 *
 * For the qr system left and right transmissions coincide (T := T_l = T_r,
 * T̄ := T̄_l = T̄_r); the boundary reads are cross-checked against the
 * Wronskian formulas 1/T = det[φ_n ψ_n], 1/T̄ = det[ψ̄_n φ̄_n].
 *
 * Limit values, recovered as grid means (Cauchy mean value of an analytic,
 * even function of z):
 *   qr:     D_∞ = mean_m 1/T(z_m)      E_∞ = mean_m 1/T̄(z_m)
 *   uv/ps:  1/T_l → 1 at z = 0 and D_∞ = 1 / mean_m (1/T_r(z_m)); likewise
 *           at z = ∞ with the barred coefficients.
 *
 * Identity suite (verify_identities):
 *   uv/ps:  T_r = D_∞ T_l            T̄_r = D_∞ T̄_l
 *           T_r T̄_r = D_∞ (1 − R R̄)  T_l T̄_l = (1 − L L̄)/D_∞
 *           L/T_l = −D_∞ R̄/T̄_r      L̄/T̄_l = −D_∞ R/T_r
 *   qr:     T_l = T_r, T̄_l = T̄_r
 *           L/T = −R̄/T̄, L̄/T̄ = −R/T, T T̄ = 1 − L L̄ = 1 − R R̄
 *   all:    [[1/T_r, R/T_r],[R̄/T̄_r, 1/T̄_r]]·[[1/T̄_l, L̄/T̄_l],[L/T_l, 1/T_l]] = I
 *           and evenness of every coefficient in z.
 */

#pragma once

#include <map>
#include <string>
#include <vector>

#include "dnls/boundstates.hpp"
#include "dnls/lattice.hpp"
#include "dnls/types.hpp"

namespace dnls {

// ── Scattering data ───────────────────────────────────────────────────────────

struct ScatteringData {
    Kind kind = Kind::qr;
    int M = 0;  // grid size; coefficient index m corresponds to z_m
    std::vector<cd> T_l, T_r, Tbar_l, Tbar_r, R, Rbar, L, Lbar;
    cd D_inf{1.0, 0.0}, E_inf{1.0, 0.0};
    Triplet inside{Side::inside, {}}, outside{Side::outside, {}};

    SpectralGrid grid() const { return SpectralGrid(M); }
};

// ── Forward map ───────────────────────────────────────────────────────────────

inline ScatteringData scatter(const PotentialPair& pair, const SpectralGrid& grid,
                              int pad = 4) {
    check_admissible(pair);
    ScatteringData s;
    s.kind = pair.kind;
    s.M = grid.M;
    const int count = grid.M;
    for (auto* v : {&s.T_l, &s.T_r, &s.Tbar_l, &s.Tbar_r, &s.R, &s.Rbar, &s.L, &s.Lbar})
        v->resize(static_cast<size_t>(count));

    cd invT_mean{0.0, 0.0}, invTbar_mean{0.0, 0.0};
    cd invTr_mean{0.0, 0.0}, invTbar_r_mean{0.0, 0.0};

    for (int m = 0; m < count; ++m) {
        const cd z = grid.z(m);
        const JostFamily f = jost_solutions(pair, z, pad);
        const int n_lo = f.n_lo, n_hi = f.n_hi;
        const cd zhi = detail::pow_int(z, n_hi), zlo = detail::pow_int(z, n_lo);

        // asymptotic settling check: the free recursion must leave the reads
        // invariant one site further into the pad region
        {
            const cd read0 = f.psi(n_lo)(1) / detail::pow_int(z, n_lo);
            const cd read1 = f.psi(n_lo + 1)(1) / detail::pow_int(z, n_lo + 1);
            if (std::abs(read0 - read1) > 1e-9 * std::max(1.0, std::abs(read0)))
                fail_numeric("NonDecayingSolution",
                             "asymptotic read not settled at the window boundary");
        }

        const cd inv_Tr = f.phi(n_hi)(0) * zhi;
        const cd RoTr = f.phi(n_hi)(1) / zhi;
        const cd inv_Tbr = f.phibar(n_hi)(1) / zhi;
        const cd RboTbr = f.phibar(n_hi)(0) * zhi;
        const cd inv_Tl = f.psi(n_lo)(1) / zlo;
        const cd LoTl = f.psi(n_lo)(0) * zlo;
        const cd inv_Tbl = f.psibar(n_lo)(0) * zlo;
        const cd LboTbl = f.psibar(n_lo)(1) / zlo;

        if (std::abs(inv_Tr) < 1e-13 || std::abs(inv_Tl) < 1e-13 ||
            std::abs(inv_Tbr) < 1e-13 || std::abs(inv_Tbl) < 1e-13)
            fail_numeric("DegenerateDenominator",
                         "1/T vanishes on the grid (spectral singularity on |z| = 1)");

        s.T_r[static_cast<size_t>(m)] = 1.0 / inv_Tr;
        s.T_l[static_cast<size_t>(m)] = 1.0 / inv_Tl;
        s.Tbar_r[static_cast<size_t>(m)] = 1.0 / inv_Tbr;
        s.Tbar_l[static_cast<size_t>(m)] = 1.0 / inv_Tbl;
        s.R[static_cast<size_t>(m)] = RoTr / inv_Tr;
        s.Rbar[static_cast<size_t>(m)] = RboTbr / inv_Tbr;
        s.L[static_cast<size_t>(m)] = LoTl / inv_Tl;
        s.Lbar[static_cast<size_t>(m)] = LboTbl / inv_Tbl;

        if (pair.kind == Kind::qr) {
            // Wronskian cross-checks at an interior site
            const int n = pair.n_min;
            const cd det_ps = f.phi(n)(0) * f.psi(n)(1) - f.phi(n)(1) * f.psi(n)(0);
            const cd det_bb = f.psibar(n)(0) * f.phibar(n)(1) - f.psibar(n)(1) * f.phibar(n)(0);
            const double scale = std::max(1.0, std::abs(inv_Tr));
            if (std::abs(det_ps - inv_Tr) > 1e-8 * scale ||
                std::abs(det_ps - inv_Tl) > 1e-8 * scale ||
                std::abs(det_bb - inv_Tbr) > 1e-8 * std::max(1.0, std::abs(inv_Tbr)) ||
                std::abs(det_bb - inv_Tbl) > 1e-8 * std::max(1.0, std::abs(inv_Tbl)))
                fail_numeric("NonDecayingSolution",
                             "Wronskian and boundary reads of 1/T disagree");
        }

        invT_mean += inv_Tl;
        invTbar_mean += inv_Tbl;
        invTr_mean += inv_Tr;
        invTbar_r_mean += inv_Tbr;
    }

    invT_mean /= static_cast<double>(count);
    invTbar_mean /= static_cast<double>(count);
    invTr_mean /= static_cast<double>(count);
    invTbar_r_mean /= static_cast<double>(count);

    if (pair.kind == Kind::qr) {
        s.D_inf = invT_mean;      // 1/T(0) = D_∞
        s.E_inf = invTbar_mean;   // 1/T̄(∞) = E_∞
    } else {
        // 1/T_r(0) = 1/D_∞ and 1/T̄_r(∞) = 1/D_∞; average the two estimates
        const cd d1 = 1.0 / invTr_mean, d2 = 1.0 / invTbar_r_mean;
        s.D_inf = 0.5 * (d1 + d2);
        s.E_inf = cd{1.0, 0.0};
    }
    return s;
}

// ── Identity suite ────────────────────────────────────────────────────────────

// Returns the maximal violation of each scattering identity over the grid.
inline std::map<std::string, double> verify_identities(const ScatteringData& s) {
    std::map<std::string, double> rep;
    auto track = [&](const std::string& name, double v) {
        double& slot = rep[name];
        if (v > slot) slot = v;
    };
    const SpectralGrid grid = s.grid();
    const cd D = s.D_inf;

    cd invT_mean{0.0, 0.0}, invTbar_mean{0.0, 0.0};
    for (int m = 0; m < s.M; ++m) {
        const size_t i = static_cast<size_t>(m);
        const cd Tl = s.T_l[i], Tr = s.T_r[i], Tbl = s.Tbar_l[i], Tbr = s.Tbar_r[i];
        const cd R = s.R[i], Rb = s.Rbar[i], L = s.L[i], Lb = s.Lbar[i];

        if (s.kind == Kind::qr) {
            track("left_right_transmission_equal", std::abs(Tl - Tr));
            track("left_right_transmission_equal", std::abs(Tbl - Tbr));
            track("reflection_cross_relation", std::abs(L / Tl + Rb / Tbl));
            track("reflection_cross_relation", std::abs(Lb / Tbl + R / Tl));
            track("unimodularity", std::abs(Tl * Tbl - (1.0 - L * Lb)));
            track("unimodularity", std::abs(Tl * Tbl - (1.0 - R * Rb)));
        } else {
            track("right_from_left_transmission", std::abs(Tr - D * Tl));
            track("right_from_left_transmission", std::abs(Tbr - D * Tbl));
            track("unimodularity", std::abs(Tr * Tbr - D * (1.0 - R * Rb)));
            track("unimodularity", std::abs(Tl * Tbl - (1.0 - L * Lb) / D));
            track("reflection_cross_relation", std::abs(L / Tl + D * Rb / Tbr));
            track("reflection_cross_relation", std::abs(Lb / Tbl + D * R / Tr));
        }

        // compatibility of the left and right coefficient matrices
        Eigen::Matrix2cd right, left;
        right << 1.0 / Tr, R / Tr, Rb / Tbr, 1.0 / Tbr;
        left << 1.0 / Tbl, Lb / Tbl, L / Tl, 1.0 / Tl;
        track("left_right_compatibility",
              (right * left - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff());

        invT_mean += 1.0 / Tl;
        invTbar_mean += 1.0 / Tbl;
    }

    // evenness in z: z_{m + M/2} = −z_m on the shifted grid
    const int half = s.M / 2;
    for (int m = 0; m < half; ++m) {
        const size_t i = static_cast<size_t>(m), j = static_cast<size_t>(m + half);
        for (const auto* v : {&s.T_l, &s.T_r, &s.Tbar_l, &s.Tbar_r, &s.R, &s.Rbar, &s.L,
                              &s.Lbar})
            track("evenness", std::abs((*v)[i] - (*v)[j]));
    }
    (void)grid;

    // limit values at z = 0 / z = ∞ via Cauchy grid means
    invT_mean /= static_cast<double>(s.M);
    invTbar_mean /= static_cast<double>(s.M);
    if (s.kind == Kind::qr) {
        track("transmission_limits", std::abs(invT_mean - s.D_inf));
        track("transmission_limits", std::abs(invTbar_mean - s.E_inf));
    } else {
        track("transmission_limits", std::abs(invT_mean - 1.0));
        track("transmission_limits", std::abs(invTbar_mean - 1.0));
    }
    return rep;
}

inline double max_identity_violation(const ScatteringData& s) {
    double v = 0.0;
    for (const auto& [name, val] : verify_identities(s)) v = std::max(v, val);
    return v;
}

// ── Transmission limits from the potentials ───────────────────────────────────

struct TransmissionLimits {
    cd D_inf{1.0, 0.0};      // 1/T(0) (qr) or the uv/ps cumulative product limit
    cd E_inf{1.0, 0.0};      // 1/T̄(∞) (qr); 1 for uv/ps
    cd S_inf{0.0, 0.0};      // z² coefficient: T = (1/D_∞)(1 − z² S_∞ + O(z⁴))  (qr)
    cd Q_inf{0.0, 0.0};      // z^{−2} coefficient of T̄ (qr)
    cd sum_ab_up{0.0, 0.0};  // Σ a_{k+1} b_k : T_l = 1 − z² Σ a_{k+1} b_k + O(z⁴)  (uv/ps)
    cd sum_ab_dn{0.0, 0.0};  // Σ a_k b_{k+1} : T̄_l = 1 − z^{−2} Σ a_k b_{k+1} + O(z^{−4})
};

inline TransmissionLimits transmission_limits(const PotentialPair& pair) {
    TransmissionLimits t;
    const CumulativeData c = cumulative_data(pair);
    t.D_inf = c.D_inf;
    if (pair.kind == Kind::qr) {
        t.E_inf = c.E_inf;
        t.S_inf = c.S_inf;
        t.Q_inf = c.Q_inf;
    } else {
        for (int k = pair.n_min - 1; k <= pair.n_max(); ++k) {
            t.sum_ab_up += pair.a(k + 1) * pair.b(k);
            t.sum_ab_dn += pair.a(k) * pair.b(k + 1);
        }
    }
    return t;
}

// ── Spectral Fourier coefficients ─────────────────────────────────────────────

// Coefficients f̂_k = (1/M) Σ_m f(z_m) z_m^{−k} so that f(z) ≈ Σ_k f̂_k z^k
// over the stored range; with `barred`, f̂_k = (1/M) Σ_m f(z_m) z_m^{+k} and
// f(z) ≈ Σ_k f̂_k z^{−k}.  When the samples are even in z, odd-k entries are
// forced to exact zero.  If the stored range cannot reproduce the samples the
// data is aliased and the grid (or range) is too coarse.
struct FourierCoefficients {
    int k_lo = 0, k_hi = 0;
    bool barred = false;
    std::vector<cd> c;

    cd at(int k) const {
        if (k < k_lo || k > k_hi) return cd{0.0, 0.0};
        return c[static_cast<size_t>(k - k_lo)];
    }
};

inline FourierCoefficients fourier_coefficients(const std::vector<cd>& samples,
                                                const SpectralGrid& grid, int k_lo, int k_hi,
                                                bool barred = false,
                                                bool check_aliasing = true) {
    if (static_cast<int>(samples.size()) != grid.M)
        fail_input("BadGrid", "sample count does not match grid size");
    if (k_lo > k_hi) fail_input("BadWindow", "empty coefficient range");
    if (grid.M < k_hi - k_lo + 1)
        fail_input("GridTooCoarse", "coefficient range wider than the grid");
    FourierCoefficients out;
    out.k_lo = k_lo;
    out.k_hi = k_hi;
    out.barred = barred;
    out.c.assign(static_cast<size_t>(k_hi - k_lo + 1), cd{0.0, 0.0});
    const int half = grid.M / 2;
    double even_dev = 0.0;
    for (int m = 0; m < half; ++m)
        even_dev = std::max(even_dev, std::abs(samples[static_cast<size_t>(m)] -
                                               samples[static_cast<size_t>(m + half)]));
    const bool even_input = even_dev < 1e-12;
    for (int m = 0; m < grid.M; ++m) {
        const cd z = grid.z(m);
        for (int k = k_lo; k <= k_hi; ++k)
            out.c[static_cast<size_t>(k - k_lo)] +=
                samples[static_cast<size_t>(m)] * detail::pow_int(z, barred ? k : -k);
    }
    for (auto& v : out.c) v /= static_cast<double>(grid.M);
    if (even_input)
        for (int k = k_lo; k <= k_hi; ++k)
            if (((k % 2) + 2) % 2 == 1) out.c[static_cast<size_t>(k - k_lo)] = cd{0.0, 0.0};
    if (check_aliasing) {
        double dev = 0.0;
        for (int m = 0; m < grid.M; ++m) {
            const cd z = grid.z(m);
            cd rec{0.0, 0.0};
            for (int k = k_lo; k <= k_hi; ++k)
                rec += out.c[static_cast<size_t>(k - k_lo)] *
                       detail::pow_int(z, barred ? -k : k);
            dev = std::max(dev, std::abs(rec - samples[static_cast<size_t>(m)]));
        }
        if (dev > 1e-9)
            fail_numeric("GridTooCoarse",
                         "stored coefficient range does not reproduce the samples");
    }
    return out;
}

}  // namespace dnls
