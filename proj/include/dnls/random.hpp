/*
 * random.hpp — deterministic random potential generation.
 *
 * Small-amplitude compactly supported qr pairs for round-trip verification:
 * with |q_n|, |r_n| ≤ 0.2 the transmission coefficient has no zeros, so the
 * generated pairs carry no bound states and scattering data is reflection-only.
 */

#pragma once

#include <cmath>
#include <random>

#include "dnls/types.hpp"

namespace dnls {

inline PotentialPair random_qr_pair(unsigned seed, int lo = -4, int hi = 4, double amp = 0.2) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-amp / std::sqrt(2.0), amp / std::sqrt(2.0));
    std::vector<cd> q, r;
    for (int n = lo; n <= hi; ++n) {
        q.emplace_back(u(rng), u(rng));
        r.emplace_back(u(rng), u(rng));
    }
    return PotentialPair(Kind::qr, lo, std::move(q), std::move(r));
}

}  // namespace dnls
