/*
 * types.hpp — shared value types for the discrete scattering library.
 *
 * The library works with three first-order 2×2 linear lattice systems,
 * identified by the pair of potential sequences they carry:
 *
 *   kind = qr : coefficient matrix [[z, (z−1/z)q_n], [z r_n, 1/z + (z−1/z)q_n r_n]]
 *   kind = uv : coefficient matrix [[z, z u_n], [v_n/z, 1/z]]
 *   kind = ps : same shape as uv with potentials (p_n, s_n)
 *
 * Potentials are finitely supported complex sequences on an integer window
 * [n_min, n_max]; outside the window they are exactly zero, so asymptotic
 * reads at n_min − pad and n_max + pad are exact.
 *
 * Error classification (drives CLI exit codes):
 *   InputError    — malformed or inadmissible input data        (exit 2)
 *   NumericError  — numerical failure during computation        (exit 3)
 * Every throw carries a stable condition name as a message prefix, e.g.
 * "SingularMarchenkoOperator: ...".
 */

#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnls {

using cd = std::complex<double>;

inline constexpr double DNLS_PI = 3.14159265358979323846;

// ── Errors ────────────────────────────────────────────────────────────────────

struct InputError : std::invalid_argument {
    explicit InputError(const std::string& condition, const std::string& detail)
        : std::invalid_argument(condition + ": " + detail) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& condition, const std::string& detail)
        : std::runtime_error(condition + ": " + detail) {}
};

[[noreturn]] inline void fail_input(const std::string& condition, const std::string& detail) {
    throw InputError(condition, detail);
}

[[noreturn]] inline void fail_numeric(const std::string& condition, const std::string& detail) {
    throw NumericError(condition, detail);
}

// ── System kinds ──────────────────────────────────────────────────────────────

enum class Kind { qr, uv, ps };

inline std::string kind_name(Kind k) {
    switch (k) {
        case Kind::qr: return "qr";
        case Kind::uv: return "uv";
        case Kind::ps: return "ps";
    }
    return "?";
}

inline Kind kind_from_name(const std::string& s) {
    if (s == "qr") return Kind::qr;
    if (s == "uv") return Kind::uv;
    if (s == "ps") return Kind::ps;
    fail_input("UnknownKind", "expected qr|uv|ps, got '" + s + "'");
}

// ── Lattice window ────────────────────────────────────────────────────────────

struct LatticeWindow {
    int n_min;
    int n_max;
    int pad = 4;  // extra free sites kept on each side for asymptotic reads

    LatticeWindow(int lo, int hi, int p = 4) : n_min(lo), n_max(hi), pad(p) {
        if (n_min > n_max) fail_input("BadWindow", "n_min > n_max");
        if (pad < 2) fail_input("BadWindow", "pad must be >= 2");
    }
};

// ── Potential pair ────────────────────────────────────────────────────────────

struct PotentialPair {
    Kind kind = Kind::qr;
    int n_min = 0;
    std::vector<cd> first;   // q, u, or p on [n_min, n_max]
    std::vector<cd> second;  // r, v, or s on [n_min, n_max]

    PotentialPair() = default;
    PotentialPair(Kind k, int lo, std::vector<cd> a, std::vector<cd> b)
        : kind(k), n_min(lo), first(std::move(a)), second(std::move(b)) {
        if (first.size() != second.size())
            fail_input("BadPotentialPair", "first/second length mismatch");
        if (first.empty())
            fail_input("BadPotentialPair", "empty support window");
    }

    int n_max() const { return n_min + static_cast<int>(first.size()) - 1; }
    int size() const { return static_cast<int>(first.size()); }

    bool in_window(int n) const { return n >= n_min && n <= n_max(); }

    // value of the first potential at site n (exactly zero outside the window)
    cd a(int n) const { return in_window(n) ? first[static_cast<size_t>(n - n_min)] : cd{0.0, 0.0}; }
    // value of the second potential at site n
    cd b(int n) const { return in_window(n) ? second[static_cast<size_t>(n - n_min)] : cd{0.0, 0.0}; }

    // Drop leading/trailing sites where both potentials are below `tol`.
    // Keeps at least one site.
    PotentialPair trimmed(double tol = 1e-12) const {
        int lo = n_min, hi = n_max();
        while (lo < hi && std::abs(a(lo)) < tol && std::abs(b(lo)) < tol) ++lo;
        while (hi > lo && std::abs(a(hi)) < tol && std::abs(b(hi)) < tol) --hi;
        std::vector<cd> fa, fb;
        for (int n = lo; n <= hi; ++n) {
            fa.push_back(a(n));
            fb.push_back(b(n));
        }
        return PotentialPair(kind, lo, std::move(fa), std::move(fb));
    }
};

// Admissibility of a pair: every factor entering cumulative products must be
// nonzero (qr: 1 − q_n r_n and 1 + q_n r_{n+1}; uv: 1 − u_n v_n; ps: 1 − p_n s_n).
inline void check_admissible(const PotentialPair& pair, double tol = 1e-13) {
    for (int n = pair.n_min - 1; n <= pair.n_max() + 1; ++n) {
        if (pair.kind == Kind::qr) {
            if (std::abs(1.0 - pair.a(n) * pair.b(n)) < tol)
                fail_input("AdmissibilityViolation",
                           "1 - q_n r_n vanishes at n = " + std::to_string(n));
            if (std::abs(1.0 + pair.a(n) * pair.b(n + 1)) < tol)
                fail_input("AdmissibilityViolation",
                           "1 + q_n r_{n+1} vanishes at n = " + std::to_string(n));
        } else {
            if (std::abs(1.0 - pair.a(n) * pair.b(n)) < tol)
                fail_input("AdmissibilityViolation",
                           "1 - a_n b_n vanishes at n = " + std::to_string(n));
        }
    }
}

// ── Spectral grid ─────────────────────────────────────────────────────────────
// M uniform samples on the unit circle, shifted by half a step so that no
// sample hits z = ±1 (where several transformation factors are singular).
// θ_m = π(2m+1)/M, z_m = e^{iθ_m}.  With M even, −z_m is also a grid point.

struct SpectralGrid {
    int M;

    explicit SpectralGrid(int m = 1024) : M(m) {
        if (M < 4 || (M & (M - 1)) != 0)
            fail_input("BadGrid", "grid size must be a power of two >= 4");
    }

    double theta(int m) const { return DNLS_PI * (2.0 * m + 1.0) / M; }
    cd z(int m) const { return std::polar(1.0, theta(m)); }

    std::vector<cd> points() const {
        std::vector<cd> zs(static_cast<size_t>(M));
        for (int m = 0; m < M; ++m) zs[static_cast<size_t>(m)] = z(m);
        return zs;
    }

    static int default_size() {
        if (const char* env = std::getenv("DNLS_GRID")) {
            int v = std::atoi(env);
            if (v >= 64 && (v & (v - 1)) == 0) return v;
        }
        return 1024;
    }
};

}  // namespace dnls
