/*
 * boundstates.hpp — bound states encoded as matrix triplets (A, B, C).
 *
 * A bound state of the qr system sits at a zero z_j of a(z) := det[φ_n ψ_n]
 * (= 1/T) in 0 < |z| < 1, together with its mirror at −z_j; the barred side
 * uses zeros z̄_j of ā(z) := det[ψ̄_n φ̄_n] (= 1/T̄) in |z| > 1.  A pole of
 * order m_j contributes:
 *   residues t_{jk}, k = 1..m_j, of T at z_j,
 *   dependency constants γ_{jk}, k = 0..m_j−1, linking φ-derivatives to
 *   ψ-derivatives at z_j,
 *   norming constants  c_{jk} = −2 Σ_{l=0}^{m_j−1−k} t_{j(k+1+l)} γ_{jl} / l!
 *   (barred side with +2).
 *
 * Canonical storage: one block per ±z_j pair — Jordan block A_j of size m_j at
 * the representative z_j (Im ≥ 0, ties by Re > 0), unit-tail column B_j, and
 * norming row C_j = [c_{j(m_j−1)}, …, c_{j1}, c_{j0}] (highest index first).
 *
 * Expanded representation: every computation involving powers of A (Marchenko
 * kernels, Sylvester sums, closed-form solution tables) uses both ±z_j blocks
 * explicitly, each with half-weight norming row and the −z_j row sign-adjusted
 * by diag{(−1)^{m_j}, …, (−1)^1}.  This makes the kernel C A^{k−1} B vanish
 * identically at odd k (the two mirror contributions cancel exactly) and
 * equals the stored single-block value at even k.
 */

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/types.hpp"

namespace dnls {

using Eigen::MatrixXcd;
using Eigen::RowVectorXcd;
using Eigen::VectorXcd;

enum class Side { inside, outside };

// ── Jordan-block utilities ────────────────────────────────────────────────────

// The m×m Jordan block with eigenvalue z and ones on the first superdiagonal.
inline MatrixXcd jordan_block(cd z, int m) {
    MatrixXcd J = MatrixXcd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        J(i, i) = z;
        if (i + 1 < m) J(i, i + 1) = cd{1.0, 0.0};
    }
    return J;
}

// Exact inverse of a Jordan block: (zI + N)^{−1} = Σ_{j<m} (−1)^j z^{−1−j} N^j.
inline MatrixXcd jordan_inverse(cd z, int m) {
    if (z == cd{0.0, 0.0}) fail_input("ZeroSpectralParameter", "Jordan block not invertible");
    MatrixXcd Ji = MatrixXcd::Zero(m, m);
    cd coeff = 1.0 / z;
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i + j < m; ++i) Ji(i, i + j) = coeff;
        coeff *= -1.0 / z;
    }
    return Ji;
}

// Integer power of a Jordan block by repeated multiplication (orders are tiny).
inline MatrixXcd jordan_power(cd z, int m, int k) {
    MatrixXcd base = k >= 0 ? jordan_block(z, m) : jordan_inverse(z, m);
    MatrixXcd acc = MatrixXcd::Identity(m, m);
    for (int e = std::abs(k); e > 0; --e) acc *= base;
    return acc;
}

// exp(s (J − J^{−1})²) for a Jordan block J = J(z, m); exact via the finite
// nilpotent Taylor expansion around the scalar value (z − 1/z)².
inline MatrixXcd jordan_flow_exp(cd z, int m, cd s) {
    const MatrixXcd J = jordan_block(z, m);
    const MatrixXcd W0 = J - jordan_inverse(z, m);
    const MatrixXcd W = W0 * W0;
    const cd lambda = W(0, 0);  // (z − 1/z)², shared along the diagonal
    const MatrixXcd N = W - lambda * MatrixXcd::Identity(m, m);
    MatrixXcd out = MatrixXcd::Identity(m, m);
    MatrixXcd term = MatrixXcd::Identity(m, m);
    double fact = 1.0;
    for (int k = 1; k < m; ++k) {
        term = term * (s * N);
        fact *= k;
        out += term / fact;
    }
    return std::exp(s * lambda) * out;
}

// ── Triplets ──────────────────────────────────────────────────────────────────

struct TripletBlock {
    cd z;             // representative eigenvalue of the ±z_j pair
    int m = 1;        // block size (pole order)
    RowVectorXcd C;   // norming row [c_{m−1}, …, c_1, c_0]
};

struct Triplet {
    Side side = Side::inside;
    std::vector<TripletBlock> blocks;

    bool empty() const { return blocks.empty(); }
    int order() const {
        int n = 0;
        for (const auto& b : blocks) n += b.m;
        return n;
    }

    void validate() const {
        for (const auto& b : blocks) {
            const double az = std::abs(b.z);
            if (b.m < 1 || b.C.size() != b.m)
                fail_input("BadTriplet", "block size/norming row mismatch");
            if (side == Side::inside && !(az > 0.0 && az < 1.0))
                fail_input("BadTriplet", "inside block must have 0 < |z| < 1");
            if (side == Side::outside && !(az > 1.0))
                fail_input("BadTriplet", "outside block must have |z| > 1");
        }
        for (size_t i = 0; i < blocks.size(); ++i)
            for (size_t j = i + 1; j < blocks.size(); ++j)
                if (std::abs(blocks[i].z - blocks[j].z) < 1e-12 ||
                    std::abs(blocks[i].z + blocks[j].z) < 1e-12)
                    fail_input("BadTriplet", "block eigenvalues must be distinct");
    }
};

// Expanded ± representation used by every power/kernel computation.
struct ExpandedTriplet {
    std::vector<cd> z;      // sub-block eigenvalues (two per stored block)
    std::vector<int> m;     // sub-block sizes
    RowVectorXcd C;         // concatenated norming row
    int N = 0;              // total order

    VectorXcd B() const {
        VectorXcd out = VectorXcd::Zero(N);
        int at = 0;
        for (int mm : m) {
            at += mm;
            out(at - 1) = cd{1.0, 0.0};
        }
        return out;
    }

    // Block-diagonal A^k.
    MatrixXcd A_power(int k) const {
        MatrixXcd out = MatrixXcd::Zero(N, N);
        int at = 0;
        for (size_t b = 0; b < z.size(); ++b) {
            out.block(at, at, m[b], m[b]) = jordan_power(z[b], m[b], k);
            at += m[b];
        }
        return out;
    }

    // exp(s (A − A^{−1})²), block-diagonal and exact.
    MatrixXcd flow_exp(cd s) const {
        MatrixXcd out = MatrixXcd::Zero(N, N);
        int at = 0;
        for (size_t b = 0; b < z.size(); ++b) {
            out.block(at, at, m[b], m[b]) = jordan_flow_exp(z[b], m[b], s);
            at += m[b];
        }
        return out;
    }

    cd CAB(int apow) const { return (C * A_power(apow) * B())(0); }
};

// Sign diagonal diag{(−1)^m, …, (−1)^1} applied to the norming row of the
// mirror block at −z_j.
inline RowVectorXcd mirror_row(const RowVectorXcd& C) {
    RowVectorXcd out = C;
    const int m = static_cast<int>(C.size());
    for (int i = 0; i < m; ++i)
        if ((m - i) % 2 == 1) out(i) = -out(i);
    return out;
}

inline ExpandedTriplet expanded(const Triplet& trip) {
    trip.validate();
    ExpandedTriplet e;
    e.N = 2 * trip.order();
    e.C.resize(e.N);
    int at = 0;
    for (const auto& b : trip.blocks) {
        e.z.push_back(b.z);
        e.m.push_back(b.m);
        e.C.segment(at, b.m) = 0.5 * b.C;
        at += b.m;
        e.z.push_back(-b.z);
        e.m.push_back(b.m);
        e.C.segment(at, b.m) = 0.5 * mirror_row(b.C);
        at += b.m;
    }
    return e;
}

// ── Kernel contributions ──────────────────────────────────────────────────────

// Contribution of one mirror representative (+z_j sub-blocks or −z_j
// sub-blocks) to the kernel value at index k.
inline cd kernel_contribution_half(const Triplet& trip, int k, bool mirror) {
    const ExpandedTriplet e = expanded(trip);
    cd sum{0.0, 0.0};
    int at = 0;
    for (size_t b = 0; b < e.z.size(); ++b) {
        const bool is_mirror = (b % 2 == 1);
        if (is_mirror == mirror) {
            const int apow = trip.side == Side::inside ? k - 1 : -k - 1;
            const MatrixXcd P = jordan_power(e.z[b], e.m[b], apow);
            // row × P × unit-tail column = row · (last column of P)
            sum += (e.C.segment(at, e.m[b]) * P.col(e.m[b] - 1))(0);
        }
        at += e.m[b];
    }
    return sum;
}

// C A^{k−1} B (inside) or C̄ Ā^{−k−1} B̄ (outside); identically zero at odd k.
inline cd kernel_contribution(const Triplet& trip, int k) {
    if (trip.empty()) return cd{0.0, 0.0};
    if (((k % 2) + 2) % 2 == 1) return cd{0.0, 0.0};
    return kernel_contribution_half(trip, k, false) + kernel_contribution_half(trip, k, true);
}

// ── Norming constants from residues and dependency constants ─────────────────

// t: residues t_1..t_m (index 0 holds t_1); gamma: γ_0..γ_{m−1}.
// Returns [c_{m−1}, …, c_1, c_0].
inline RowVectorXcd norming_row(const std::vector<cd>& t, const std::vector<cd>& gamma,
                                Side side) {
    const int m = static_cast<int>(t.size());
    if (static_cast<int>(gamma.size()) != m)
        fail_input("BadTriplet", "residue/dependency ladder length mismatch");
    if (std::abs(t[static_cast<size_t>(m - 1)]) == 0.0)
        fail_numeric("MissingOrder", "t_{j m_j} vanishes; pole order is not m_j");
    const double sgn = side == Side::inside ? -2.0 : 2.0;
    RowVectorXcd C(m);
    for (int k = 0; k < m; ++k) {
        cd sum{0.0, 0.0};
        double fact = 1.0;
        for (int l = 0; l <= m - 1 - k; ++l) {
            if (l > 0) fact *= l;
            sum += t[static_cast<size_t>(k + l)] * gamma[static_cast<size_t>(l)] / fact;
        }
        C(m - 1 - k) = sgn * sum;
    }
    return C;
}

// ── Triplet conversion among the three systems ────────────────────────────────
//
// Norming rows transform per block by right multiplication with a function of
// the block (A and B are unchanged):
//   inside:  C^(ps) = (D/E) C^(qr),  C^(uv) = C^(ps) (I − A^{−2})
//   outside: C̄^(ps) = (E/D) C̄^(qr), C̄^(ps) = C̄^(uv) (I − Ā^{−2})
inline Triplet convert_triplet(const Triplet& trip, Kind from, Kind to, cd D_inf, cd E_inf) {
    trip.validate();
    if (from == to) return trip;
    Triplet out = trip;
    const cd rho = trip.side == Side::inside ? D_inf / E_inf : E_inf / D_inf;
    for (auto& b : out.blocks) {
        const int m = b.m;
        const MatrixXcd I = MatrixXcd::Identity(m, m);
        const MatrixXcd F = I - jordan_power(b.z, m, -2);  // I − A^{−2}
        auto to_qr = [&](const RowVectorXcd& C, Kind k) -> RowVectorXcd {
            if (k == Kind::qr) return C;
            if (k == Kind::ps) return C / rho;
            // uv
            if (trip.side == Side::inside)
                return RowVectorXcd(F.transpose().partialPivLu().solve(C.transpose())) / rho;
            return (C * F) / rho;
        };
        auto from_qr = [&](const RowVectorXcd& C, Kind k) -> RowVectorXcd {
            if (k == Kind::qr) return C;
            if (k == Kind::ps) return rho * C;
            if (trip.side == Side::inside) return rho * (C * F);
            return rho * RowVectorXcd(F.transpose().partialPivLu().solve(C.transpose()));
        };
        b.C = from_qr(to_qr(b.C, from), to);
    }
    return out;
}

// ── Simple-pole search on raw qr potentials ───────────────────────────────────

struct SimplePole {
    cd z;       // canonical representative (Im ≥ 0, ties by Re > 0)
    cd t1;      // residue of the transmission coefficient at z
    cd gamma0;  // dependency constant φ_0 = γ_0 ψ_0
    cd c0;      // norming constant
};

struct PoleSearchResult {
    std::vector<SimplePole> inside, outside;
};

namespace detail {

// det[φ_n ψ_n] (= 1/T) or det[ψ̄_n φ̄_n] (= 1/T̄) of a qr pair at an interior
// site, by direct recursion; usable at any nonzero z (the Newton search may
// step outside the respective analyticity region transiently).
inline cd wronskian_inverse_transmission(const PotentialPair& pair, cd z, bool barred) {
    if (z == cd{0.0, 0.0}) fail_input("ZeroSpectralParameter", "z must be nonzero");
    const int n_lo = pair.n_min - 2, n_hi = pair.n_max() + 2;
    const int n0 = std::min(std::max(0, n_lo), n_hi);
    // backward member (ψ or ψ̄), seeded at n_hi
    Eigen::Vector2cd back = barred ? Eigen::Vector2cd(pow_int(z, -n_hi), cd{0.0, 0.0})
                                   : Eigen::Vector2cd(cd{0.0, 0.0}, pow_int(z, n_hi));
    for (int n = n_hi - 1; n >= n0; --n) back = transfer_matrix(pair, n, z) * back;
    // forward member (φ or φ̄), seeded at n_lo; qr transfer matrices have det 1
    Eigen::Vector2cd fwd = barred ? Eigen::Vector2cd(cd{0.0, 0.0}, pow_int(z, n_lo))
                                  : Eigen::Vector2cd(pow_int(z, -n_lo), cd{0.0, 0.0});
    for (int n = n_lo; n < n0; ++n) {
        const Eigen::Matrix2cd X = transfer_matrix(pair, n, z);
        Eigen::Matrix2cd Xi;
        Xi << X(1, 1), -X(0, 1), -X(1, 0), X(0, 0);
        fwd = Xi * fwd;
    }
    return barred ? back(0) * fwd(1) - back(1) * fwd(0)
                  : fwd(0) * back(1) - fwd(1) * back(0);
}

// Representative of a ±z pair: Im z ≥ 0, with near-real ties (|Im| below
// tolerance) resolved by Re z > 0.
inline cd canonical_representative(cd w) {
    if (std::abs(w.imag()) < 1e-9 * std::max(1.0, std::abs(w.real())))
        return w.real() < 0 ? -w : w;
    return w.imag() < 0 ? -w : w;
}

struct PoleScan {
    // evaluates f and reports roots of f inside the annulus r_lo < |w| < r_hi
    template <typename F>
    static std::vector<cd> newton_roots(F&& f, double r_lo, double r_hi) {
        std::vector<cd> roots;
        auto deflated = [&](cd w) {
            cd val = f(w);
            for (cd r : roots) val /= (w * w - r * r);
            return val;
        };
        const double radii[4] = {0.25, 0.5, 0.7, 0.88};
        for (double rad : radii) {
            const double r = r_lo + (r_hi - r_lo) * rad;
            for (int a = 0; a < 16; ++a) {
                cd w = std::polar(r, 2.0 * DNLS_PI * (a + 0.37) / 16.0);
                bool converged = false;
                for (int it = 0; it < 100; ++it) {
                    const double h = 1e-6 * std::max(std::abs(w), 0.05);
                    const cd fw = deflated(w);
                    const cd fp = (deflated(w + h) - deflated(w - h)) / (2.0 * h);
                    if (std::abs(fp) < 1e-14) break;
                    const cd step = fw / fp;
                    w -= step;
                    if (std::abs(w) < 1e-6 || std::abs(w) > r_hi + 0.2) break;
                    if (std::abs(step) < 1e-12) {
                        converged = true;
                        break;
                    }
                }
                if (!converged) continue;
                if (std::abs(f(w)) > 1e-8) continue;
                const double aw = std::abs(w);
                if (aw <= r_lo + 1e-6 || aw >= r_hi - 1e-6) continue;
                bool dup = false;
                for (cd r0 : roots)
                    if (std::abs(w - r0) < 1e-7 || std::abs(w + r0) < 1e-7) dup = true;
                if (dup) continue;
                // canonical representative
                w = canonical_representative(w);
                roots.push_back(w);
            }
        }
        std::sort(roots.begin(), roots.end(),
                  [](cd a, cd b) { return std::abs(a) < std::abs(b); });
        return roots;
    }
};

}  // namespace detail

// Finds the simple poles of T (inside) and T̄ (outside) for a qr pair, with
// residues and dependency constants.  Multiple poles are reported as errors,
// not resolved.
inline PoleSearchResult find_simple_poles(const PotentialPair& pair) {
    if (pair.kind != Kind::qr) fail_input("BadPotentialPair", "pole search expects a qr pair");
    check_admissible(pair);

    auto a_inside = [&](cd z) { return detail::wronskian_inverse_transmission(pair, z, false); };
    auto a_outside = [&](cd z) { return detail::wronskian_inverse_transmission(pair, z, true); };

    PoleSearchResult out;
    auto handle = [&](cd zj, auto&& fn, Side side) {
        const double h = 1e-6 * std::max(std::abs(zj), 0.05);
        const cd fp = (fn(zj + h) - fn(zj - h)) / (2.0 * h);
        if (std::abs(fp) < 1e-6)
            fail_numeric("MultiplePoleDetected",
                         "derivative of 1/T below threshold near a pole; order >= 2");
        SimplePole p;
        p.z = zj;
        p.t1 = 1.0 / fp;
        const JostFamily f = jost_solutions(pair, zj);
        const int n = 0 < f.n_lo ? f.n_lo : (0 > f.n_hi ? f.n_hi : 0);
        if (side == Side::inside) {
            const Eigen::Vector2cd psi = f.psi(n), phi = f.phi(n);
            const int c = std::abs(psi(0)) >= std::abs(psi(1)) ? 0 : 1;
            p.gamma0 = phi(c) / psi(c);
            p.c0 = -2.0 * p.t1 * p.gamma0;
            out.inside.push_back(p);
        } else {
            const Eigen::Vector2cd psb = f.psibar(n), phb = f.phibar(n);
            const int c = std::abs(psb(0)) >= std::abs(psb(1)) ? 0 : 1;
            p.gamma0 = phb(c) / psb(c);
            p.c0 = 2.0 * p.t1 * p.gamma0;
            out.outside.push_back(p);
        }
    };

    for (cd zj : detail::PoleScan::newton_roots(a_inside, 0.0, 1.0))
        handle(zj, a_inside, Side::inside);
    // outside zeros via w = 1/z
    auto b_fn = [&](cd w) { return a_outside(1.0 / w); };
    for (cd wj : detail::PoleScan::newton_roots(b_fn, 0.0, 1.0))
        handle(detail::canonical_representative(1.0 / wj), a_outside, Side::outside);
    return out;
}

// Builds the canonical triplets from a simple-pole search result.
inline std::pair<Triplet, Triplet> triplets_from_poles(const PoleSearchResult& poles) {
    Triplet in, outp;
    in.side = Side::inside;
    outp.side = Side::outside;
    for (const auto& p : poles.inside) {
        TripletBlock b;
        b.z = p.z;
        b.m = 1;
        b.C = RowVectorXcd::Constant(1, p.c0);
        in.blocks.push_back(b);
    }
    for (const auto& p : poles.outside) {
        TripletBlock b;
        b.z = p.z;
        b.m = 1;
        b.C = RowVectorXcd::Constant(1, p.c0);
        outp.blocks.push_back(b);
    }
    return {in, outp};
}

}  // namespace dnls
