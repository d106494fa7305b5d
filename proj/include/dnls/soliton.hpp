/*
 * soliton.hpp — closed-form reflectionless (multi-soliton) solutions.
 *
 * A pair of triplets (inside: A, B, C with |eig A| < 1; outside: Ā, B̄, C̄ with
 * |eig Ā| > 1) generates kernels Ω_k = C ℰ A^{k−1} B, Ω̄_k = C̄ ℰ̄ Ā^{−k−1} B̄
 * whose Marchenko systems are solvable in closed form.  The building blocks:
 *
 *   Sylvester sums    Υ = Σ_{k≥0} A^k B C̄ Ā^{−k},   Ῡ = Σ_{k≥0} Ā^{−k} B̄ C A^k,
 *                     the unique solutions of Υ − A Υ Ā^{−1} = B C̄ and
 *                     Ῡ − Ā^{−1} Ῡ A = B̄ C,
 *   propagators       ℰ = exp(−it(A−A^{−1})²),  ℰ̄ = exp(+it(Ā−Ā^{−1})²),
 *   site matrices     U_n = I − ℰ̄ Ā^{−n−2} Ῡ ℰ A^{2n+1} Υ Ā^{−n−1},
 *                     Ū_n = I − ℰ A^n Υ ℰ̄ Ā^{−2n−3} Ῡ A^{n+1}.
 *
 * The solution tables of the standard Marchenko system (m ≥ n+1; the diagonal
 * m = n carries the normalization [1;0] / [0;1]):
 *   [M_nm]_1 = −C̄ Ā^{−n} U_n^{−1} ℰ̄ Ā^{−m−1} B̄
 *   [M_nm]_2 =  C A^n Ū_n^{−1} ℰ A^n Υ ℰ̄ Ā^{−n−m−2} B̄
 *   [M̄_nm]_1 =  C̄ Ā^{−n} U_n^{−1} ℰ̄ Ā^{−n−2} Ῡ ℰ A^{n+m} B
 *   [M̄_nm]_2 = −C A^n Ū_n^{−1} ℰ A^{m−1} B
 * (same shapes for all three systems, each with its own triplets).
 *
 * Two independent recovery routes to the qr potentials:
 *   row-sum route — geometric sums of the tables over m ≥ n feed the
 *   quotient recovery used by the standard Marchenko solver;
 *   tau route — diagonals of the summed (alternate) system in closed form,
 *     τ_n  = −C̄ (I−Ā^{−2})^{−1} (I−Ā^{−1})^{−1} Ā^{−n−1} V_n^{−1} ℰ̄ Ā^{−n−1} B̄
 *     τ̄_n = −C A^{n−1} (I−A)^{−1} V̄_n^{−1} ℰ A^{n+1} B
 *   with q_n = τ_n − τ_{n+1} and r_n = τ̄_{n−1} − τ̄_n.  (The summed-system
 *   closed forms hold for column indices m ≥ n+1; the diagonal is reached
 *   through 𝒦_nn = 𝒦_{n(n+1)}, so the trailing power is evaluated at m = n+1.)
 */

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "dnls/boundstates.hpp"
#include "dnls/types.hpp"

namespace dnls {

// ── Sylvester equations ───────────────────────────────────────────────────────

struct SylvesterPair {
    MatrixXcd Upsilon;     // N_in × N_out
    MatrixXcd Upsilonbar;  // N_out × N_in
};

namespace detail {

// Solves X − L X R = S by Kronecker vectorization (column-major vec):
// (I − Rᵀ ⊗ L) vec X = vec S.
inline MatrixXcd solve_sylvester_like(const MatrixXcd& L, const MatrixXcd& R,
                                      const MatrixXcd& S) {
    const int p = static_cast<int>(L.rows()), q = static_cast<int>(R.cols());
    if (p == 0 || q == 0) return MatrixXcd::Zero(p, q);
    MatrixXcd K = MatrixXcd::Identity(p * q, p * q);
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < q; ++i) K.block(j * p, i * p, p, p) -= R(i, j) * L;
    const Eigen::Map<const VectorXcd> s(S.data(), p * q);
    const VectorXcd x = K.fullPivLu().solve(s);
    MatrixXcd X = Eigen::Map<const MatrixXcd>(x.data(), p, q);
    if ((X - L * X * R - S).cwiseAbs().maxCoeff() > 1e-10)
        fail_numeric("IllConditioned", "Sylvester solve residual exceeds 1e-10");
    return X;
}

inline MatrixXcd identity_minus_power(const ExpandedTriplet& e, int k) {
    return MatrixXcd::Identity(e.N, e.N) - e.A_power(k);
}

}  // namespace detail

inline SylvesterPair sylvester(const ExpandedTriplet& in, const ExpandedTriplet& out) {
    const MatrixXcd Abar_inv = out.A_power(-1);
    SylvesterPair s;
    s.Upsilon = detail::solve_sylvester_like(in.A_power(1), Abar_inv, in.B() * out.C);
    s.Upsilonbar = detail::solve_sylvester_like(Abar_inv, in.A_power(1), out.B() * in.C);
    return s;
}

inline SylvesterPair sylvester(const Triplet& inside, const Triplet& outside) {
    return sylvester(expanded(inside), expanded(outside));
}

// ── Time propagators ──────────────────────────────────────────────────────────

struct TimePropagators {
    MatrixXcd E;     // exp(−it(A − A^{−1})²)
    MatrixXcd Ebar;  // exp(+it(Ā − Ā^{−1})²)
    double t = 0.0;
};

inline TimePropagators propagators(const ExpandedTriplet& in, const ExpandedTriplet& out,
                                   double t) {
    return {in.flow_exp(cd{0.0, -t}), out.flow_exp(cd{0.0, t}), t};
}

inline TimePropagators propagators(const Triplet& inside, const Triplet& outside, double t) {
    return propagators(expanded(inside), expanded(outside), t);
}

// Time evolution of the norming rows of a canonical triplet:
// inside C_j ↦ C_j exp(−it(A_j−A_j^{−1})²), outside C̄_j ↦ C̄_j exp(+it(Ā_j−Ā_j^{−1})²).
inline Triplet evolve_triplet(const Triplet& trip, double t) {
    Triplet out = trip;
    const cd s = trip.side == Side::inside ? cd{0.0, -t} : cd{0.0, t};
    for (auto& b : out.blocks) b.C = b.C * jordan_flow_exp(b.z, b.m, s);
    return out;
}

// ── Closed-form solution tables ───────────────────────────────────────────────

class SolitonTables {
public:
    SolitonTables(const Triplet& inside, const Triplet& outside, double t)
        : in_(expanded(inside)), out_(expanded(outside)), syl_(sylvester(in_, out_)) {
        const TimePropagators p = propagators(in_, out_, t);
        E_ = p.E;
        Eb_ = p.Ebar;
    }

    const SylvesterPair& sylvester_pair() const { return syl_; }

    MatrixXcd Un(int n) const {
        return MatrixXcd::Identity(out_.N, out_.N) -
               Eb_ * out_.A_power(-n - 2) * syl_.Upsilonbar * E_ * in_.A_power(2 * n + 1) *
                   syl_.Upsilon * out_.A_power(-n - 1);
    }
    MatrixXcd Ubn(int n) const {
        return MatrixXcd::Identity(in_.N, in_.N) -
               E_ * in_.A_power(n) * syl_.Upsilon * Eb_ * out_.A_power(-2 * n - 3) *
                   syl_.Upsilonbar * in_.A_power(n + 1);
    }

    // Reflectionless Marchenko kernels.
    cd omega(int k) const { return scalar(in_.C * E_ * in_.A_power(k - 1) * in_.B()); }
    cd omegabar(int k) const {
        return scalar(out_.C * Eb_ * out_.A_power(-k - 1) * out_.B());
    }

    // Standard-system solution tables (diagonal m = n holds the normalization).
    cd M1(int n, int m) const {
        if (m <= n) return cd{0.0, 0.0};
        return -scalar(out_.C * out_.A_power(-n) * solve_out(Un(n), Eb_) *
                       out_.A_power(-m - 1) * out_.B());
    }
    cd M2(int n, int m) const {
        if (m <= n) return m == n ? cd{1.0, 0.0} : cd{0.0, 0.0};
        return scalar(in_.C * in_.A_power(n) * solve_in(Ubn(n), E_) * in_.A_power(n) *
                      syl_.Upsilon * Eb_ * out_.A_power(-n - m - 2) * out_.B());
    }
    cd Mbar1(int n, int m) const {
        if (m <= n) return m == n ? cd{1.0, 0.0} : cd{0.0, 0.0};
        return scalar(out_.C * out_.A_power(-n) * solve_out(Un(n), Eb_) *
                      out_.A_power(-n - 2) * syl_.Upsilonbar * E_ * in_.A_power(n + m) *
                      in_.B());
    }
    cd Mbar2(int n, int m) const {
        if (m <= n) return cd{0.0, 0.0};
        return -scalar(in_.C * in_.A_power(n) * solve_in(Ubn(n), E_) * in_.A_power(m - 1) *
                       in_.B());
    }

    // Row sums Σ_{m≥n} of the four table components (geometric tails included).
    struct RowSums {
        cd Mbar1, Mbar2, M1, M2;
    };
    RowSums row_sums(int n) const {
        const MatrixXcd Gi = inv_in(detail::identity_minus_power(in_, 1));       // (I−A)^{−1}
        const MatrixXcd Gbi = inv_out(detail::identity_minus_power(out_, -1));   // (I−Ā^{−1})^{−1}
        const MatrixXcd UinvEb = solve_out(Un(n), Eb_);
        const MatrixXcd UbinvE = solve_in(Ubn(n), E_);
        RowSums s;
        s.M1 = -scalar(out_.C * out_.A_power(-n) * UinvEb * out_.A_power(-n - 2) * Gbi *
                       out_.B());
        s.Mbar1 = cd{1.0, 0.0} + scalar(out_.C * out_.A_power(-n) * UinvEb *
                                        out_.A_power(-n - 2) * syl_.Upsilonbar * E_ *
                                        in_.A_power(2 * n + 1) * Gi * in_.B());
        s.M2 = cd{1.0, 0.0} + scalar(in_.C * in_.A_power(n) * UbinvE * in_.A_power(n) *
                                     syl_.Upsilon * Eb_ * out_.A_power(-2 * n - 3) * Gbi *
                                     out_.B());
        s.Mbar2 = -scalar(in_.C * in_.A_power(n) * UbinvE * in_.A_power(n) * Gi * in_.B());
        return s;
    }

    // Summed (alternate) system in closed form; with uv triplets this gives the
    // unbarred table, with ps triplets the barred one.
    MatrixXcd Vn(int n) const {
        return MatrixXcd::Identity(out_.N, out_.N) +
               Eb_ * out_.A_power(-n - 1) * detail::identity_minus_power(out_, -1) *
                   syl_.Upsilonbar * E_ * in_.A_power(2 * n + 1) *
                   inv_in(detail::identity_minus_power(in_, 1)) * syl_.Upsilon *
                   out_.A_power(-n - 1);
    }
    MatrixXcd Vbn(int n) const {
        return MatrixXcd::Identity(in_.N, in_.N) +
               E_ * in_.A_power(n + 1) * detail::identity_minus_power(in_, 1) * syl_.Upsilon *
                   Eb_ * out_.A_power(-2 * n - 3) *
                   inv_out(detail::identity_minus_power(out_, -1)) * syl_.Upsilonbar *
                   in_.A_power(n - 1);
    }
    cd alternate_K(int n, int m) const {
        return -scalar(out_.C * out_.A_power(-n - 1) *
                       inv_out(detail::identity_minus_power(out_, -1)) * solve_out(Vn(n), Eb_) *
                       out_.A_power(-m) * out_.B());
    }
    cd alternate_Kbar(int n, int m) const {
        return -scalar(in_.C * in_.A_power(n - 1) *
                       inv_in(detail::identity_minus_power(in_, 1)) * solve_in(Vbn(n), E_) *
                       in_.A_power(m) * in_.B());
    }

    // Tau route on qr triplets: diagonals of the summed system transported to
    // the qr normalization.
    cd tau(int n) const {
        const MatrixXcd V = MatrixXcd::Identity(out_.N, out_.N) +
                            Eb_ * out_.A_power(-n - 1) *
                                detail::identity_minus_power(out_, -1) * syl_.Upsilonbar *
                                detail::identity_minus_power(in_, -2) * E_ *
                                in_.A_power(2 * n + 1) *
                                inv_in(detail::identity_minus_power(in_, 1)) * syl_.Upsilon *
                                inv_out(detail::identity_minus_power(out_, -2)) *
                                out_.A_power(-n - 1);
        // τ_n is the summed-system diagonal 𝒦_nn = 𝒦_{n(n+1)}; the closed form
        // is valid for column indices m ≥ n+1, so it is evaluated at m = n+1.
        return -scalar(out_.C * inv_out(detail::identity_minus_power(out_, -2)) *
                       inv_out(detail::identity_minus_power(out_, -1)) *
                       out_.A_power(-n - 1) * solve_out(V, Eb_) * out_.A_power(-n - 1) *
                       out_.B());
    }
    cd taubar(int n) const {
        const MatrixXcd V = MatrixXcd::Identity(in_.N, in_.N) +
                            E_ * in_.A_power(n + 1) * detail::identity_minus_power(in_, 1) *
                                syl_.Upsilon * Eb_ * out_.A_power(-2 * n - 3) *
                                inv_out(detail::identity_minus_power(out_, -1)) *
                                syl_.Upsilonbar * in_.A_power(n - 1);
        // diagonal 𝒦̄_nn = 𝒦̄_{n(n+1)}, evaluated at m = n+1 as for tau above
        return -scalar(in_.C * in_.A_power(n - 1) *
                       inv_in(detail::identity_minus_power(in_, 1)) * solve_in(V, E_) *
                       in_.A_power(n + 1) * in_.B());
    }

    // Explicit uv potentials (valid when the tables hold uv triplets).
    cd u(int n) const { return M1(n, n + 2); }
    cd v(int n) const { return Mbar2(n, n + 2); }

private:
    static cd scalar(const MatrixXcd& m) { return m.size() == 1 ? m(0, 0) : cd{0.0, 0.0}; }

    MatrixXcd solve_lu(const MatrixXcd& M, const MatrixXcd& rhs) const {
        if (M.rows() == 0) return rhs;
        const Eigen::FullPivLU<MatrixXcd> lu(M);
        if (!lu.isInvertible())
            fail_numeric("SingularUn", "closed-form site matrix is singular");
        return lu.solve(rhs);
    }
    MatrixXcd solve_out(const MatrixXcd& M, const MatrixXcd& rhs) const {
        return solve_lu(M, rhs);
    }
    MatrixXcd solve_in(const MatrixXcd& M, const MatrixXcd& rhs) const {
        return solve_lu(M, rhs);
    }
    MatrixXcd inv_in(const MatrixXcd& M) const {
        return solve_lu(M, MatrixXcd::Identity(in_.N, in_.N));
    }
    MatrixXcd inv_out(const MatrixXcd& M) const {
        return solve_lu(M, MatrixXcd::Identity(out_.N, out_.N));
    }

    ExpandedTriplet in_, out_;
    SylvesterPair syl_;
    MatrixXcd E_, Eb_;
};

// Four table components at one (n, m); `barred_first` layout matches the
// standard solver: {[M̄]_1, [M̄]_2} and {[M]_1, [M]_2}.
inline std::pair<Vector2cd, Vector2cd> explicit_solution_tables(const Triplet& inside,
                                                                const Triplet& outside,
                                                                double t, int n, int m) {
    const SolitonTables tab(inside, outside, t);
    return {Vector2cd(tab.Mbar1(n, m), tab.Mbar2(n, m)),
            Vector2cd(tab.M1(n, m), tab.M2(n, m))};
}

// ── Potentials ────────────────────────────────────────────────────────────────

enum class SolitonRoute { z7, tau, both };

inline PotentialPair soliton_qr(const Triplet& inside, const Triplet& outside, double t,
                                int n_lo = -32, int n_hi = 32,
                                SolitonRoute route = SolitonRoute::both) {
    if (inside.side != Side::inside || outside.side != Side::outside)
        fail_input("BadTriplet", "soliton_qr expects (inside, outside) triplets");
    if (n_hi < n_lo) fail_input("BadWindow", "window must be nondecreasing");
    const SolitonTables tab(inside, outside, t);
    const int len = n_hi - n_lo + 1;
    std::vector<cd> q_z7(len), r_z7(len), q_tau(len), r_tau(len);

    if (route != SolitonRoute::tau) {
        SolitonTables::RowSums prev = tab.row_sums(n_lo - 1);
        for (int n = n_lo; n <= n_hi; ++n) {
            const SolitonTables::RowSums s = tab.row_sums(n);
            const cd den = s.Mbar1 * s.M2 - s.M1 * s.Mbar2;
            if (std::abs(den) < 1e-13 || std::abs(s.M2) < 1e-13 ||
                std::abs(prev.M2) < 1e-13)
                fail_numeric("DegenerateDenominator", "row-sum recovery denominator vanishes");
            q_z7[static_cast<size_t>(n - n_lo)] = s.M1 * s.M2 / den;
            r_z7[static_cast<size_t>(n - n_lo)] = prev.Mbar2 / prev.M2 - s.Mbar2 / s.M2;
            prev = s;
        }
    }
    if (route != SolitonRoute::z7) {
        cd tau_next = tab.tau(n_lo), taubar_prev = tab.taubar(n_lo - 1);
        for (int n = n_lo; n <= n_hi; ++n) {
            const cd tau_n = tau_next, taubar_n = tab.taubar(n);
            tau_next = tab.tau(n + 1);
            q_tau[static_cast<size_t>(n - n_lo)] = tau_n - tau_next;
            r_tau[static_cast<size_t>(n - n_lo)] = taubar_prev - taubar_n;
            taubar_prev = taubar_n;
        }
    }
    if (route == SolitonRoute::both) {
        double dev = 0.0;
        for (int i = 0; i < len; ++i)
            dev = std::max(dev, std::max(std::abs(q_z7[static_cast<size_t>(i)] -
                                                  q_tau[static_cast<size_t>(i)]),
                                         std::abs(r_z7[static_cast<size_t>(i)] -
                                                  r_tau[static_cast<size_t>(i)])));
        if (dev > 1e-9)
            fail_numeric("IllConditioned", "row-sum and tau recovery routes disagree");
    }
    const bool use_tau = route == SolitonRoute::tau;
    PotentialPair pair(Kind::qr, n_lo, use_tau ? q_tau : q_z7, use_tau ? r_tau : r_z7);
    check_admissible(pair);
    return pair.trimmed(1e-13);
}

inline PotentialPair soliton_uv(const Triplet& inside_uv, const Triplet& outside_uv, double t,
                                int n_lo = -32, int n_hi = 32) {
    if (inside_uv.side != Side::inside || outside_uv.side != Side::outside)
        fail_input("BadTriplet", "soliton_uv expects (inside, outside) triplets");
    if (n_hi < n_lo) fail_input("BadWindow", "window must be nondecreasing");
    const SolitonTables tab(inside_uv, outside_uv, t);
    std::vector<cd> u, v;
    for (int n = n_lo; n <= n_hi; ++n) {
        u.push_back(tab.u(n));
        v.push_back(tab.v(n));
    }
    PotentialPair pair(Kind::uv, n_lo, u, v);
    check_admissible(pair);
    return pair.trimmed(1e-13);
}

// ── Transport of triplets and Sylvester solutions between systems ─────────────

struct TransportedTriplets {
    Triplet inside_uv, outside_uv;  // norming rows in the uv normalization
    Triplet inside_ps, outside_ps;  // norming rows in the ps normalization
    SylvesterPair uv, ps;           // transported Sylvester solutions
};

inline TransportedTriplets transport_triplets(const Triplet& inside_qr,
                                              const Triplet& outside_qr, cd D_inf, cd E_inf) {
    TransportedTriplets out;
    out.inside_uv = convert_triplet(inside_qr, Kind::qr, Kind::uv, D_inf, E_inf);
    out.outside_uv = convert_triplet(outside_qr, Kind::qr, Kind::uv, D_inf, E_inf);
    out.inside_ps = convert_triplet(inside_qr, Kind::qr, Kind::ps, D_inf, E_inf);
    out.outside_ps = convert_triplet(outside_qr, Kind::qr, Kind::ps, D_inf, E_inf);

    const ExpandedTriplet ein = expanded(inside_qr), eout = expanded(outside_qr);
    const SylvesterPair qr = sylvester(ein, eout);
    const cd rho = E_inf / D_inf;
    const MatrixXcd Fin = detail::identity_minus_power(ein, -2);    // I − A^{−2}
    const MatrixXcd Fout = detail::identity_minus_power(eout, -2);  // I − Ā^{−2}
    out.ps.Upsilon = rho * qr.Upsilon;
    out.ps.Upsilonbar = qr.Upsilonbar / rho;
    // (E/D) Υ (I−Ā^{−2})^{−1}, as the solution X of X (I−Ā^{−2}) = (E/D) Υ
    out.uv.Upsilon =
        Fout.transpose()
            .fullPivLu()
            .solve(MatrixXcd(rho * qr.Upsilon.transpose()))
            .transpose();
    out.uv.Upsilonbar = (qr.Upsilonbar / rho) * Fin;
    return out;
}

}  // namespace dnls
