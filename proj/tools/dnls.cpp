/*
 * dnls — command-line front end for the discrete scattering library.
 *
 * Subcommands:
 *   scatter    potential pair → scattering data on the spectral grid
 *   transform  qr pair → uv or ps pair
 *   invert     scattering data → potential pair (methods a–e)
 *   soliton    matrix triplets → closed-form multi-soliton pair at time t
 *   evolve     potential pair → pair at time t via the inverse scattering
 *              transform
 *   verify     identity suite / nonlinear-residual check / random round trip
 *
 * Files: "-" means stdin/stdout.  Pair files ending in .csv use the CSV
 * format; everything else is JSON (see docs/formats.md).  The DNLS_GRID
 * environment variable overrides the default grid size of 1024.
 *
 * Exit codes: 0 success, 2 malformed input, 3 numerical failure.
 */

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dnls/io.hpp"
#include "dnls/ist.hpp"
#include "dnls/marchenko.hpp"
#include "dnls/random.hpp"
#include "dnls/scattering.hpp"
#include "dnls/soliton.hpp"
#include "dnls/transforms.hpp"

namespace {

using namespace dnls;

std::string read_input(const std::string& path) {
    if (path != "-") return io::read_text_file(path);
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-")
        std::cout << content;
    else
        io::write_text_file(path, content);
}

bool is_csv(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

PotentialPair read_pair(const std::string& path, Kind csv_kind = Kind::qr) {
    const std::string text = read_input(path);
    return is_csv(path) ? io::pair_from_csv(text, csv_kind) : io::pair_from_json(text);
}

void write_pair(const std::string& path, const PotentialPair& pair, const std::string& format) {
    const bool csv = format == "csv" || (format.empty() && is_csv(path));
    write_output(path, csv ? io::pair_to_csv(pair) : io::pair_to_json(pair));
}

std::pair<int, int> parse_window(const std::string& spec) {
    const auto colon = spec.find(':', 1);  // allow a leading minus sign
    if (colon == std::string::npos)
        fail_input("BadWindow", "window must be of the form lo:hi, e.g. -32:32");
    try {
        const int lo = std::stoi(spec.substr(0, colon));
        const int hi = std::stoi(spec.substr(colon + 1));
        if (lo > hi) fail_input("BadWindow", "window lo exceeds hi");
        return {lo, hi};
    } catch (const std::invalid_argument&) {
        fail_input("BadWindow", "window bounds must be integers");
    } catch (const std::out_of_range&) {
        fail_input("BadWindow", "window bounds out of range");
    }
}

SolitonRoute route_from_name(const std::string& s) {
    if (s == "z7") return SolitonRoute::z7;
    if (s == "tau") return SolitonRoute::tau;
    if (s == "both") return SolitonRoute::both;
    fail_input("BadRoute", "expected z7|tau|both, got '" + s + "'");
}

std::string format_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

// ── Subcommand bodies ─────────────────────────────────────────────────────────

int run_scatter(const std::string& in, const std::string& out, int grid_size, bool poles) {
    const PotentialPair pair = read_pair(in);
    ScatteringData data = scatter(pair, SpectralGrid(grid_size));
    if (poles && pair.kind == Kind::qr) {
        const PoleSearchResult found = find_simple_poles(pair);
        const auto [inside, outside] = triplets_from_poles(found);
        data.inside = inside;
        data.outside = outside;
    }
    write_output(out, io::scattering_to_json(data));
    return 0;
}

int run_transform(const std::string& in, const std::string& out, const std::string& from,
                  const std::string& to, const std::string& format) {
    if (from != "qr") fail_input("BadTransform", "only transformations from qr are supported");
    const PotentialPair pair = read_pair(in);
    if (pair.kind != Kind::qr) fail_input("BadTransform", "input pair is not of kind qr");
    PotentialPair mapped = pair;
    if (to == "uv")
        mapped = qr_to_uv(pair);
    else if (to == "ps")
        mapped = qr_to_ps(pair);
    else
        fail_input("BadTransform", "target must be uv or ps, got '" + to + "'");
    write_pair(out, mapped, format);
    return 0;
}

int run_invert(const std::string& in, const std::string& out, const std::string& method,
               const std::string& window, int m_tail, const std::string& format) {
    const ScatteringData data = io::scattering_from_json(read_input(in));
    const auto [lo, hi] = parse_window(window);
    const PotentialPair pair = invert(data, inversion_method_from_name(method), lo, hi, m_tail);
    write_pair(out, pair.trimmed(1e-12), format);
    return 0;
}

int run_soliton(const std::string& triplets, const std::string& out, double t,
                const std::string& window, const std::string& route, const std::string& format) {
    const auto [inside, outside] = io::triplets_from_json(read_input(triplets));
    const auto [lo, hi] = parse_window(window);
    const PotentialPair pair = soliton_qr(inside, outside, t, lo, hi, route_from_name(route));
    write_pair(out, pair, format);
    return 0;
}

int run_evolve(const std::string& in, const std::string& out, double t,
               const std::string& method, int pad, const std::string& format) {
    const PotentialPair pair0 = read_pair(in);
    const PotentialPair pair_t =
        ist_solve(pair0, t, inversion_method_from_name(method), pad);
    write_pair(out, pair_t, format);
    return 0;
}

int run_verify_identities(const std::string& in) {
    const std::string text = read_input(in);
    // accept either scattering data or a raw pair (scattered on the default grid)
    ScatteringData data;
    try {
        data = io::scattering_from_json(text);
    } catch (const InputError&) {
        data = scatter(io::pair_from_json(text), SpectralGrid(SpectralGrid::default_size()));
    }
    std::string report = "identity,max_violation\n";
    double worst = 0.0;
    for (const auto& [name, violation] : verify_identities(data)) {
        report += name + "," + format_sci(violation) + "\n";
        worst = std::max(worst, violation);
    }
    report += "worst," + format_sci(worst) + "\n";
    std::cout << report;
    return 0;
}

int run_verify_pde(const std::string& in, double t, double h, const std::string& window) {
    const auto [inside, outside] = io::triplets_from_json(read_input(in));
    const auto [lo, hi] = parse_window(window);
    const PairSampler sampler = [&, inside = inside, outside = outside](double s) {
        return soliton_qr(inside, outside, s, lo - 8, hi + 8, SolitonRoute::z7);
    };
    const double r1 = pde_residual(sampler, t, h, lo, hi).max_norm;
    const double r2 = pde_residual(sampler, t, h / 2.0, lo, hi).max_norm;
    const double slope = (r2 > 0.0) ? std::log2(r1 / r2) : 0.0;
    std::cout << "h,max_residual\n"
              << format_sci(h) << "," << format_sci(r1) << "\n"
              << format_sci(h / 2.0) << "," << format_sci(r2) << "\n"
              << "order," << format_sci(slope) << "\n";
    return 0;
}

int run_verify_roundtrip(unsigned seed, int grid_size, const std::string& window) {
    const PotentialPair pair = random_qr_pair(seed);
    const ScatteringData data = scatter(pair, SpectralGrid(grid_size));
    const auto [lo, hi] = parse_window(window);
    std::cout << "method,max_error\n";
    double worst = 0.0;
    for (const char* name : {"a", "b", "c", "d", "e"}) {
        const PotentialPair back = invert(data, inversion_method_from_name(name), lo, hi);
        double err = 0.0;
        for (int n = lo; n <= hi; ++n)
            err = std::max({err, std::abs(back.a(n) - pair.a(n)),
                            std::abs(back.b(n) - pair.b(n))});
        worst = std::max(worst, err);
        std::cout << name << "," << format_sci(err) << "\n";
    }
    std::cout << "worst," << format_sci(worst) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Direct and inverse scattering for the semi-discrete derivative NLS lattice"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help and exit");  // frees -h / --h for the step size

    std::string in = "-", out = "-", format;
    std::string method = "a", window = "-32:32", route = "both";
    std::string from = "qr", to = "uv", triplets;
    int grid_size = dnls::SpectralGrid::default_size();
    int m_tail = 64, pad = 4;
    double t = 0.0, h = 1e-4;
    unsigned seed = 1;
    bool v_identities = false, v_pde = false, v_roundtrip = false, poles = false;

    auto* sc = app.add_subcommand("scatter", "Compute scattering data for a potential pair");
    sc->add_option("--in", in, "input pair (JSON/CSV, - for stdin)");
    sc->add_option("--grid", grid_size, "spectral grid size (power of two)");
    sc->add_option("--out", out, "output scattering data (JSON, - for stdout)");
    sc->add_flag("--poles", poles, "search for bound states and embed triplets");

    auto* tr = app.add_subcommand("transform", "Map a qr pair to the uv or ps system");
    tr->add_option("--from", from, "source system (qr)");
    tr->add_option("--to", to, "target system (uv|ps)")->required();
    tr->add_option("--in", in, "input pair");
    tr->add_option("--out", out, "output pair");
    tr->add_option("--format", format, "output format (json|csv)");

    auto* iv = app.add_subcommand("invert", "Recover a potential pair from scattering data");
    iv->add_option("--method", method, "inversion method (a|b|c|d|e)");
    iv->add_option("--in", in, "input scattering data (JSON)");
    iv->add_option("--window", window, "lattice window lo:hi");
    iv->add_option("--m-tail", m_tail, "kernel truncation tail length");
    iv->add_option("--out", out, "output pair");
    iv->add_option("--format", format, "output format (json|csv)");

    auto* so = app.add_subcommand("soliton", "Closed-form multi-soliton pair from triplets");
    so->add_option("--triplets", triplets, "triplet file (JSON)")->required();
    so->add_option("--t", t, "evolution time");
    so->add_option("--window", window, "lattice window lo:hi");
    so->add_option("--route", route, "recovery route (z7|tau|both)");
    so->add_option("--out", out, "output pair");
    so->add_option("--format", format, "output format (json|csv)");

    auto* ev = app.add_subcommand("evolve", "Evolve a qr pair by the inverse scattering transform");
    ev->add_option("--in", in, "input pair at t = 0");
    ev->add_option("--t", t, "evolution time")->required();
    ev->add_option("--method", method, "inversion method (a|b|c|d|e)");
    ev->add_option("--pad", pad, "window padding for the inversion");
    ev->add_option("--out", out, "output pair at time t");
    ev->add_option("--format", format, "output format (json|csv)");

    auto* vf = app.add_subcommand("verify", "Run verification suites and print reports");
    vf->add_flag("--identities", v_identities, "identity suite on scattering data or a pair");
    vf->add_flag("--pde", v_pde, "nonlinear-equation residual for a soliton family");
    vf->add_flag("--roundtrip", v_roundtrip, "scatter→invert round trip on a random pair");
    vf->add_option("--in", in, "input file for --identities / --pde");
    vf->add_option("--t", t, "evolution time for --pde");
    vf->add_option("--h,--step", h, "finite-difference step for --pde");
    vf->add_option("--seed", seed, "random seed for --roundtrip");
    vf->add_option("--grid", grid_size, "spectral grid size");
    vf->add_option("--window", window, "lattice window lo:hi");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sc->parsed()) return run_scatter(in, out, grid_size, poles);
        if (tr->parsed()) return run_transform(in, out, from, to, format);
        if (iv->parsed()) return run_invert(in, out, method, window, m_tail, format);
        if (so->parsed()) return run_soliton(triplets, out, t, window, route, format);
        if (ev->parsed()) return run_evolve(in, out, t, method, pad, format);
        if (vf->parsed()) {
            if (v_identities) return run_verify_identities(in);
            if (v_pde) return run_verify_pde(in, t, h, window);
            if (v_roundtrip) return run_verify_roundtrip(seed, grid_size, window);
            dnls::fail_input("BadVerifyMode", "choose one of --identities, --pde, --roundtrip");
        }
    } catch (const dnls::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dnls::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
