// Shared deterministic fixtures for the test suite.
#pragma once

#include "dnls/random.hpp"
#include "dnls/types.hpp"

namespace dnls::testfix {

// Deterministic small-amplitude random compact qr pair with support [-4, 4],
// amplitudes <= 0.2 (no bound states at these amplitudes).
using dnls::random_qr_pair;

// The standing fixture "P3" used across the suite.
inline PotentialPair p3() { return random_qr_pair(20240817u); }

}  // namespace dnls::testfix
