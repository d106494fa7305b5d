#include "dnls/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dnls::io {

namespace {

using nlohmann::json;

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail_input("MalformedInput", "complex value must be a two-element [re, im] array");
    return {j[0].get<double>(), j[1].get<double>()};
}

json complex_vector_to_json(const std::vector<cd>& v) {
    json arr = json::array();
    for (cd z : v) arr.push_back(complex_to_json(z));
    return arr;
}

std::vector<cd> complex_vector_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) fail_input("MalformedInput", "field '" + field + "' must be an array");
    std::vector<cd> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(complex_from_json(e));
    return out;
}

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) fail_input("MalformedInput", "invalid JSON");
    return j;
}

const json& require(const json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) fail_input("MalformedInput", "missing field '" + key + "'");
    return *it;
}

int require_int(const json& j, const std::string& key) {
    const json& v = require(j, key);
    if (!v.is_number_integer()) fail_input("MalformedInput", "field '" + key + "' must be an integer");
    return v.get<int>();
}

// shortest-round-trip decimal, matching what the JSON writer emits
std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) fail_numeric("FormatFailure", "double formatting failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        fail_input("MalformedInput", "invalid number '" + s + "'");
    return x;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

json triplet_to_value(const Triplet& t) {
    json blocks = json::array();
    for (const auto& b : t.blocks) {
        json C = json::array();
        for (int i = 0; i < b.C.size(); ++i) C.push_back(complex_to_json(b.C(i)));
        blocks.push_back({{"z", complex_to_json(b.z)}, {"m", b.m}, {"C", C}});
    }
    return {{"side", t.side == Side::inside ? "inside" : "outside"}, {"blocks", blocks}};
}

Triplet triplet_from_value(const json& j) {
    if (!j.is_object()) fail_input("MalformedInput", "triplet must be a JSON object");
    Triplet t;
    const std::string side = require(j, "side").get<std::string>();
    if (side == "inside")
        t.side = Side::inside;
    else if (side == "outside")
        t.side = Side::outside;
    else
        fail_input("MalformedInput", "triplet side must be 'inside' or 'outside'");
    const json& blocks = require(j, "blocks");
    if (!blocks.is_array()) fail_input("MalformedInput", "triplet 'blocks' must be an array");
    for (const auto& bj : blocks) {
        TripletBlock b;
        b.z = complex_from_json(require(bj, "z"));
        b.m = require_int(bj, "m");
        const std::vector<cd> row = complex_vector_from_json(require(bj, "C"), "C");
        if (static_cast<int>(row.size()) != b.m)
            fail_input("MalformedInput", "triplet block C row length must equal m");
        b.C.resize(static_cast<Eigen::Index>(row.size()));
        for (size_t i = 0; i < row.size(); ++i) b.C(static_cast<Eigen::Index>(i)) = row[i];
        t.blocks.push_back(std::move(b));
    }
    t.validate();
    return t;
}

std::string dump(const json& j) { return j.dump() + "\n"; }

}  // namespace

// ── Raw file helpers ──────────────────────────────────────────────────────────

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_input("BadFile", "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_input("BadFile", "cannot open '" + path + "' for writing");
    out << content;
    if (!out) fail_input("BadFile", "write to '" + path + "' failed");
}

// ── PotentialPair ─────────────────────────────────────────────────────────────

std::string pair_to_json(const PotentialPair& pair) {
    const json j = {{"kind", kind_name(pair.kind)},
                    {"n_min", pair.n_min},
                    {"n_max", pair.n_max()},
                    {"first", complex_vector_to_json(pair.first)},
                    {"second", complex_vector_to_json(pair.second)}};
    return dump(j);
}

PotentialPair pair_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) fail_input("MalformedInput", "potential pair must be a JSON object");
    const Kind kind = kind_from_name(require(j, "kind").get<std::string>());
    const int n_min = require_int(j, "n_min");
    const int n_max = require_int(j, "n_max");
    std::vector<cd> first = complex_vector_from_json(require(j, "first"), "first");
    std::vector<cd> second = complex_vector_from_json(require(j, "second"), "second");
    if (static_cast<int>(first.size()) != n_max - n_min + 1)
        fail_input("MalformedInput", "'first' length does not match the [n_min, n_max] window");
    return PotentialPair(kind, n_min, std::move(first), std::move(second));
}

std::string pair_to_csv(const PotentialPair& pair) {
    std::string out = "n,re_first,im_first,re_second,im_second\n";
    for (int n = pair.n_min; n <= pair.n_max(); ++n) {
        const cd a = pair.a(n), b = pair.b(n);
        out += std::to_string(n) + "," + format_double(a.real()) + "," +
               format_double(a.imag()) + "," + format_double(b.real()) + "," +
               format_double(b.imag()) + "\n";
    }
    return out;
}

PotentialPair pair_from_csv(const std::string& text, Kind kind) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split(line, ',')[0] != "n")
        fail_input("MalformedInput", "CSV must start with the header row 'n,re_first,...'");
    bool have_n_min = false;
    int n_min = 0, expected = 0;
    std::vector<cd> first, second;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cols = split(line, ',');
        if (cols.size() != 5) fail_input("MalformedInput", "CSV row must have 5 columns");
        const int n = static_cast<int>(parse_double(cols[0]));
        if (!have_n_min) {
            n_min = n;
            expected = n;
            have_n_min = true;
        }
        if (n != expected) fail_input("MalformedInput", "CSV site indices must be consecutive");
        ++expected;
        first.emplace_back(parse_double(cols[1]), parse_double(cols[2]));
        second.emplace_back(parse_double(cols[3]), parse_double(cols[4]));
    }
    if (first.empty()) fail_input("MalformedInput", "CSV has no data rows");
    return PotentialPair(kind, n_min, std::move(first), std::move(second));
}

PotentialPair load_pair(const std::string& path, Kind csv_kind) {
    const std::string text = read_text_file(path);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        return pair_from_csv(text, csv_kind);
    return pair_from_json(text);
}

void save_pair(const std::string& path, const PotentialPair& pair) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        write_text_file(path, pair_to_csv(pair));
    else
        write_text_file(path, pair_to_json(pair));
}

// ── Triplets ──────────────────────────────────────────────────────────────────

std::string triplet_to_json(const Triplet& triplet) { return dump(triplet_to_value(triplet)); }

Triplet triplet_from_json(const std::string& text) { return triplet_from_value(parse(text)); }

std::string triplets_to_json(const Triplet& inside, const Triplet& outside) {
    return dump(json::array({triplet_to_value(inside), triplet_to_value(outside)}));
}

std::pair<Triplet, Triplet> triplets_from_json(const std::string& text) {
    const json j = parse(text);
    Triplet inside{Side::inside, {}}, outside{Side::outside, {}};
    bool have_inside = false, have_outside = false;
    const auto take = [&](const json& v) {
        Triplet t = triplet_from_value(v);
        if (t.side == Side::inside) {
            if (have_inside) fail_input("MalformedInput", "duplicate inside triplet");
            inside = std::move(t);
            have_inside = true;
        } else {
            if (have_outside) fail_input("MalformedInput", "duplicate outside triplet");
            outside = std::move(t);
            have_outside = true;
        }
    };
    if (j.is_array()) {
        for (const auto& v : j) take(v);
    } else {
        take(j);
    }
    return {std::move(inside), std::move(outside)};
}

std::pair<Triplet, Triplet> load_triplets(const std::string& path) {
    return triplets_from_json(read_text_file(path));
}

void save_triplets(const std::string& path, const Triplet& inside, const Triplet& outside) {
    write_text_file(path, triplets_to_json(inside, outside));
}

// ── ScatteringData ────────────────────────────────────────────────────────────

std::string scattering_to_json(const ScatteringData& data) {
    const json j = {{"kind", kind_name(data.kind)},
                    {"grid", data.M},
                    {"T_l", complex_vector_to_json(data.T_l)},
                    {"T_r", complex_vector_to_json(data.T_r)},
                    {"Tbar_l", complex_vector_to_json(data.Tbar_l)},
                    {"Tbar_r", complex_vector_to_json(data.Tbar_r)},
                    {"R", complex_vector_to_json(data.R)},
                    {"Rbar", complex_vector_to_json(data.Rbar)},
                    {"L", complex_vector_to_json(data.L)},
                    {"Lbar", complex_vector_to_json(data.Lbar)},
                    {"D_inf", complex_to_json(data.D_inf)},
                    {"E_inf", complex_to_json(data.E_inf)},
                    {"inside", triplet_to_value(data.inside)},
                    {"outside", triplet_to_value(data.outside)}};
    return dump(j);
}

ScatteringData scattering_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) fail_input("MalformedInput", "scattering data must be a JSON object");
    ScatteringData s;
    s.kind = kind_from_name(require(j, "kind").get<std::string>());
    s.M = require_int(j, "grid");
    s.T_l = complex_vector_from_json(require(j, "T_l"), "T_l");
    s.T_r = complex_vector_from_json(require(j, "T_r"), "T_r");
    s.Tbar_l = complex_vector_from_json(require(j, "Tbar_l"), "Tbar_l");
    s.Tbar_r = complex_vector_from_json(require(j, "Tbar_r"), "Tbar_r");
    s.R = complex_vector_from_json(require(j, "R"), "R");
    s.Rbar = complex_vector_from_json(require(j, "Rbar"), "Rbar");
    s.L = complex_vector_from_json(require(j, "L"), "L");
    s.Lbar = complex_vector_from_json(require(j, "Lbar"), "Lbar");
    for (const auto* v : {&s.T_l, &s.T_r, &s.Tbar_l, &s.Tbar_r, &s.R, &s.Rbar, &s.L, &s.Lbar})
        if (static_cast<int>(v->size()) != s.M && !(s.M == 0 && v->empty()))
            fail_input("MalformedInput", "coefficient array length does not match the grid size");
    s.D_inf = complex_from_json(require(j, "D_inf"));
    s.E_inf = complex_from_json(require(j, "E_inf"));
    s.inside = triplet_from_value(require(j, "inside"));
    s.outside = triplet_from_value(require(j, "outside"));
    if (s.inside.side != Side::inside || s.outside.side != Side::outside)
        fail_input("MalformedInput", "triplet sides are swapped");
    return s;
}

ScatteringData load_scattering(const std::string& path) {
    return scattering_from_json(read_text_file(path));
}

void save_scattering(const std::string& path, const ScatteringData& data) {
    write_text_file(path, scattering_to_json(data));
}

}  // namespace dnls::io
