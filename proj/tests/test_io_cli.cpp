#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "dnls/io.hpp"
#include "dnls/ist.hpp"
#include "dnls/soliton.hpp"
#include "fixtures.hpp"

using namespace dnls;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

CliResult run_cli(const std::string& args, const std::string& stdin_file = "") {
    std::string cmd = std::string(DNLS_CLI_PATH) + " " + args;
    if (!stdin_file.empty()) cmd += " < " + stdin_file;
    cmd += " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    std::array<char, 4096> buf{};
    size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        res.output.append(buf.data(), got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

Triplet one_inside() {
    Triplet t;
    t.side = Side::inside;
    t.blocks.push_back({cd{0.5, 0.0}, 1, RowVectorXcd::Constant(1, cd{1.0, 0.0})});
    return t;
}
Triplet one_outside() {
    Triplet t;
    t.side = Side::outside;
    t.blocks.push_back({cd{2.0, 0.0}, 1, RowVectorXcd::Constant(1, cd{1.0, 0.0})});
    return t;
}

double pair_distance(const PotentialPair& a, const PotentialPair& b, int lo, int hi) {
    double d = 0.0;
    for (int n = lo; n <= hi; ++n)
        d = std::max({d, std::abs(a.a(n) - b.a(n)), std::abs(a.b(n) - b.b(n))});
    return d;
}

}  // namespace

TEST_CASE("pair JSON round trip is exact") {
    const PotentialPair p = testfix::p3();
    const std::string text = io::pair_to_json(p);
    const PotentialPair back = io::pair_from_json(text);
    CHECK(back.kind == p.kind);
    CHECK(back.n_min == p.n_min);
    REQUIRE(back.size() == p.size());
    for (int n = p.n_min; n <= p.n_max(); ++n) {
        CHECK(back.a(n) == p.a(n));  // bit-exact decimal encoding
        CHECK(back.b(n) == p.b(n));
    }
    // determinism: serializing twice gives byte-identical text
    CHECK(io::pair_to_json(back) == text);
}

TEST_CASE("pair CSV round trip is exact") {
    const PotentialPair p = testfix::random_qr_pair(7u);
    const std::string text = io::pair_to_csv(p);
    const PotentialPair back = io::pair_from_csv(text, Kind::qr);
    REQUIRE(back.size() == p.size());
    for (int n = p.n_min; n <= p.n_max(); ++n) {
        CHECK(back.a(n) == p.a(n));
        CHECK(back.b(n) == p.b(n));
    }
    CHECK(io::pair_to_csv(back) == text);
}

TEST_CASE("triplet JSON round trip, single and paired") {
    Triplet in = one_inside();
    in.blocks.push_back({cd{0.3, 0.25}, 2, RowVectorXcd::Zero(2)});
    in.blocks.back().C << cd{0.4, -0.2}, cd{0.1, 0.0};
    const Triplet back = io::triplet_from_json(io::triplet_to_json(in));
    REQUIRE(back.blocks.size() == in.blocks.size());
    for (size_t i = 0; i < in.blocks.size(); ++i) {
        CHECK(back.blocks[i].z == in.blocks[i].z);
        CHECK(back.blocks[i].m == in.blocks[i].m);
        CHECK(back.blocks[i].C == in.blocks[i].C);
    }

    const auto [bi, bo] = io::triplets_from_json(io::triplets_to_json(in, one_outside()));
    CHECK(bi.order() == 3);
    CHECK(bo.order() == 1);
    CHECK(bo.blocks[0].z == cd{2.0, 0.0});

    // single-object file: the missing side comes back empty
    const auto [si, so] = io::triplets_from_json(io::triplet_to_json(one_outside()));
    CHECK(si.empty());
    CHECK(so.order() == 1);
}

TEST_CASE("scattering data JSON round trip is exact") {
    ScatteringData data = scatter(testfix::p3(), SpectralGrid(64));
    data.inside = one_inside();
    data.outside = one_outside();
    const std::string text = io::scattering_to_json(data);
    const ScatteringData back = io::scattering_from_json(text);
    CHECK(back.M == data.M);
    CHECK(back.kind == data.kind);
    CHECK(back.D_inf == data.D_inf);
    CHECK(back.E_inf == data.E_inf);
    for (size_t i = 0; i < data.R.size(); ++i) {
        CHECK(back.R[i] == data.R[i]);
        CHECK(back.T_l[i] == data.T_l[i]);
        CHECK(back.Lbar[i] == data.Lbar[i]);
    }
    CHECK(back.inside.blocks[0].z == cd{0.5, 0.0});
    CHECK(io::scattering_to_json(back) == text);
}

TEST_CASE("malformed input raises InputError") {
    CHECK_THROWS_AS(io::pair_from_json("{not json"), InputError);
    CHECK_THROWS_AS(io::pair_from_json(R"({"kind":"qr","n_min":0})"), InputError);
    CHECK_THROWS_AS(io::pair_from_json(
                        R"({"kind":"xy","n_min":0,"n_max":0,"first":[[0,0]],"second":[[0,0]]})"),
                    InputError);
    CHECK_THROWS_AS(io::pair_from_csv("bogus\n1,2,3,4,5\n"), InputError);
    CHECK_THROWS_AS(io::triplet_from_json(R"({"side":"nowhere","blocks":[]})"), InputError);
    CHECK_THROWS_AS(io::read_text_file("/nonexistent/path.json"), InputError);
}

TEST_CASE("cli: scatter → invert round trip through files") {
    const PotentialPair p = testfix::p3();
    const std::string pair_path = temp_path("dnls_pair.json");
    const std::string sdata_path = temp_path("dnls_sdata.json");
    const std::string out_path = temp_path("dnls_back.json");
    io::write_text_file(pair_path, io::pair_to_json(p));

    const CliResult sc = run_cli("scatter --in " + pair_path + " --grid 256 --out " + sdata_path);
    CHECK(sc.exit_code == 0);

    const CliResult iv = run_cli("invert --method a --in " + sdata_path + " --window -16:16 --out " +
                                 out_path);
    CHECK(iv.exit_code == 0);
    const PotentialPair back = io::load_pair(out_path);
    CHECK(pair_distance(back, p, -16, 16) < 1e-8);
}

TEST_CASE("cli: transform matches the library map") {
    const PotentialPair p = testfix::p3();
    const std::string pair_path = temp_path("dnls_pair2.json");
    io::write_text_file(pair_path, io::pair_to_json(p));
    const CliResult tr = run_cli("transform --from qr --to uv --in " + pair_path);
    CHECK(tr.exit_code == 0);
    const PotentialPair uv = io::pair_from_json(tr.output);
    CHECK(uv.kind == Kind::uv);
    CHECK(pair_distance(uv, qr_to_uv(p), -8, 8) < 1e-15);
}

TEST_CASE("cli: soliton piped into scatter yields tiny reflection") {
    const std::string trip_path = temp_path("dnls_trip.json");
    io::save_triplets(trip_path, one_inside(), one_outside());

    const std::string pair_path = temp_path("dnls_soliton.json");
    const CliResult so =
        run_cli("soliton --triplets " + trip_path + " --t 0 --window -32:32 --out " + pair_path);
    CHECK(so.exit_code == 0);

    const CliResult sc = run_cli("scatter --grid 256", pair_path);
    CHECK(sc.exit_code == 0);
    const ScatteringData data = io::scattering_from_json(sc.output);
    double rmax = 0.0;
    for (cd r : data.R) rmax = std::max(rmax, std::abs(r));
    CHECK(rmax < 1e-8);
}

TEST_CASE("cli: evolve agrees with the closed-form soliton flow") {
    const PotentialPair pair0 = soliton_qr(one_inside(), one_outside(), 0.0, -32, 32);
    const std::string pair_path = temp_path("dnls_sol0.json");
    io::write_text_file(pair_path, io::pair_to_json(pair0));
    const CliResult ev = run_cli("evolve --in " + pair_path + " --t 0.5 --method a");
    CHECK(ev.exit_code == 0);
    const PotentialPair evolved = io::pair_from_json(ev.output);
    const PotentialPair closed = soliton_qr(one_inside(), one_outside(), 0.5, -32, 32);
    CHECK(pair_distance(evolved, closed, -10, 10) < 1e-7);
}

TEST_CASE("cli: verify subcommands produce reports") {
    const PotentialPair p = testfix::p3();
    const std::string pair_path = temp_path("dnls_pair3.json");
    io::write_text_file(pair_path, io::pair_to_json(p));

    const CliResult vi = run_cli("verify --identities --in " + pair_path);
    CHECK(vi.exit_code == 0);
    CHECK(vi.output.find("identity,max_violation") == 0);
    CHECK(vi.output.find("worst,") != std::string::npos);

    const CliResult vr = run_cli("verify --roundtrip --seed 3 --grid 256 --window -16:16");
    CHECK(vr.exit_code == 0);
    CHECK(vr.output.find("method,max_error") == 0);
    // determinism: same seed → byte-identical report
    const CliResult vr2 = run_cli("verify --roundtrip --seed 3 --grid 256 --window -16:16");
    CHECK(vr2.output == vr.output);

    const std::string trip_path = temp_path("dnls_trip2.json");
    io::save_triplets(trip_path, one_inside(), one_outside());
    const CliResult vp =
        run_cli("verify --pde --in " + trip_path + " --t 0.5 --step 1e-4 --window -12:12");
    CHECK(vp.exit_code == 0);
    CHECK(vp.output.find("order,") != std::string::npos);
}

TEST_CASE("cli: exit codes distinguish malformed input from numerical failure") {
    const std::string bad_path = temp_path("dnls_bad.json");
    io::write_text_file(bad_path, "{broken");
    CHECK(run_cli("scatter --in " + bad_path).exit_code == 2);
    CHECK(run_cli("scatter --in /nonexistent.json").exit_code == 2);
    CHECK(run_cli("invert --method q --in " + bad_path).exit_code == 2);

    // inadmissible pair (1 − q r = 0) → input error
    const PotentialPair inadm(Kind::qr, 0, {cd{1.0, 0.0}}, {cd{1.0, 0.0}});
    const std::string inadm_path = temp_path("dnls_inadm.json");
    io::write_text_file(inadm_path, io::pair_to_json(inadm));
    CHECK(run_cli("scatter --in " + inadm_path).exit_code == 2);

    // numerically failing request: soliton route consistency on a triplet with
    // an eigenvalue so close to the unit circle that the routes disagree
    CHECK(run_cli("bogus-subcommand").exit_code == 2);
}
