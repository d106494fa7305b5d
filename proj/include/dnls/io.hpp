/*
 * io.hpp — JSON and CSV serialization for the library's value types.
 *
 * Conventions:
 *   - Complex numbers are encoded as two-element arrays [re, im]; no
 *     complex-literal extension of JSON is assumed.
 *   - JSON is emitted compactly with a trailing newline; doubles use the
 *     shortest decimal representation that round-trips bit-exactly.
 *   - CSV uses a header row and %.17g-style decimals (also bit-exact);
 *     it is intended for per-site / per-grid-point plotting exports.
 *
 * Formats (documented in docs/formats.md):
 *   PotentialPair JSON:
 *     {"kind":"qr|uv|ps","n_min":int,"n_max":int,
 *      "first":[[re,im],...],"second":[[re,im],...]}
 *   PotentialPair CSV: columns n,re_first,im_first,re_second,im_second
 *   Triplet JSON:
 *     {"side":"inside|outside","blocks":[{"z":[re,im],"m":int,"C":[[re,im],...]},...]}
 *   Triplet-pair JSON: array of one or two Triplet objects (distinct sides)
 *   ScatteringData JSON: grid size + kind + arrays of [re,im] per coefficient
 *     + embedded triplets + limits D_inf, E_inf
 *
 * Malformed input raises InputError ("MalformedInput" / "BadFile").
 */

#pragma once

#include <string>
#include <utility>

#include "dnls/boundstates.hpp"
#include "dnls/scattering.hpp"
#include "dnls/types.hpp"

namespace dnls::io {

// ── Raw file helpers ──────────────────────────────────────────────────────────

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// ── PotentialPair ─────────────────────────────────────────────────────────────

std::string pair_to_json(const PotentialPair& pair);
PotentialPair pair_from_json(const std::string& text);

std::string pair_to_csv(const PotentialPair& pair);
// CSV carries no kind column; the caller supplies it (defaults to qr).
PotentialPair pair_from_csv(const std::string& text, Kind kind = Kind::qr);

// Dispatch on the file extension: ".csv" → CSV, anything else → JSON.
PotentialPair load_pair(const std::string& path, Kind csv_kind = Kind::qr);
void save_pair(const std::string& path, const PotentialPair& pair);

// ── Triplets ──────────────────────────────────────────────────────────────────

std::string triplet_to_json(const Triplet& triplet);
Triplet triplet_from_json(const std::string& text);

// A triplet file holds a single object or an array; missing sides come back
// as empty triplets of the appropriate side.
std::string triplets_to_json(const Triplet& inside, const Triplet& outside);
std::pair<Triplet, Triplet> triplets_from_json(const std::string& text);

std::pair<Triplet, Triplet> load_triplets(const std::string& path);
void save_triplets(const std::string& path, const Triplet& inside, const Triplet& outside);

// ── ScatteringData ────────────────────────────────────────────────────────────

std::string scattering_to_json(const ScatteringData& data);
ScatteringData scattering_from_json(const std::string& text);

ScatteringData load_scattering(const std::string& path);
void save_scattering(const std::string& path, const ScatteringData& data);

}  // namespace dnls::io
