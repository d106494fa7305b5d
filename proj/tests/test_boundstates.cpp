#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dnls/boundstates.hpp"
#include "fixtures.hpp"

using namespace dnls;

TEST_CASE("jordan powers by repeated multiplication") {
    const cd z{0.5, 0.0};
    const MatrixXcd J2 = jordan_power(z, 2, 2);
    CHECK(std::abs(J2(0, 0) - 0.25) < 1e-15);
    CHECK(std::abs(J2(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(J2(1, 0)) == 0.0);
    CHECK(std::abs(J2(1, 1) - 0.25) < 1e-15);

    const MatrixXcd I = jordan_power(z, 3, 5) * jordan_power(z, 3, -5);
    CHECK((I - MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK_THROWS_AS((void)jordan_inverse(cd{0.0, 0.0}, 2), InputError);
}

TEST_CASE("jordan flow exponential against scalar and series checks") {
    // m = 1 reduces to exp(s (z - 1/z)^2)
    const cd z{0.5, 0.3}, s{0.0, -0.7};
    const cd lam = (z - 1.0 / z) * (z - 1.0 / z);
    CHECK(std::abs(jordan_flow_exp(z, 1, s)(0, 0) - std::exp(s * lam)) < 1e-14);

    // m = 2: compare with a dense Taylor series of exp(s W)
    const MatrixXcd J = jordan_block(z, 2);
    const MatrixXcd W0 = J - jordan_inverse(z, 2);
    const MatrixXcd W = W0 * W0;
    MatrixXcd expW = MatrixXcd::Identity(2, 2), term = MatrixXcd::Identity(2, 2);
    for (int k = 1; k <= 60; ++k) {
        term = term * (s * W) / static_cast<double>(k);
        expW += term;
    }
    CHECK((jordan_flow_exp(z, 2, s) - expW).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("norming rows from residues and dependency constants") {
    // simple pole: c_0 = -2 t_1 g_0 (inside), +2 t_1 g_0 (outside)
    const RowVectorXcd c_in = norming_row({cd{2.0, 1.0}}, {cd{0.5, 0.0}}, Side::inside);
    CHECK(std::abs(c_in(0) - cd{-2.0, -1.0}) < 1e-15);
    const RowVectorXcd c_out = norming_row({cd{2.0, 1.0}}, {cd{0.5, 0.0}}, Side::outside);
    CHECK(std::abs(c_out(0) - cd{2.0, 1.0}) < 1e-15);

    // m = 2: c_1 = -2 t_2 g_0, c_0 = -2 (t_1 g_0 + t_2 g_1); row is [c_1, c_0]
    const cd t1{1.0, 0.0}, t2{3.0, 0.0}, g0{0.5, 0.0}, g1{-2.0, 0.0};
    const RowVectorXcd c2 = norming_row({t1, t2}, {g0, g1}, Side::inside);
    CHECK(std::abs(c2(0) - (-2.0 * t2 * g0)) < 1e-15);
    CHECK(std::abs(c2(1) - (-2.0 * (t1 * g0 + t2 * g1))) < 1e-15);

    CHECK_THROWS_AS((void)norming_row({t1, cd{0.0, 0.0}}, {g0, g1}, Side::inside), NumericError);
}

TEST_CASE("kernel contributions: scalar, Jordan, parity") {
    const cd c{0.7, -0.2};
    Triplet in;
    in.side = Side::inside;
    in.blocks.push_back({cd{0.5, 0.0}, 1, RowVectorXcd::Constant(1, c)});

    // C A^{k-1} B with scalar A = 0.5: k = 2 gives c * 0.5
    CHECK(std::abs(kernel_contribution(in, 2) - c * 0.5) < 1e-16);
    CHECK(std::abs(kernel_contribution(in, 4) - c * 0.125) < 1e-16);

    // odd k vanishes identically (exact zero, not merely small)
    for (int k = -7; k <= 65; k += 2) CHECK(kernel_contribution(in, k) == cd{0.0, 0.0});

    // the +z and -z representatives contribute identically at even k, bitwise
    for (int k = 2; k <= 64; k += 2) {
        const cd plus = kernel_contribution_half(in, k, false);
        const cd minus = kernel_contribution_half(in, k, true);
        CHECK(plus.real() == minus.real());
        CHECK(plus.imag() == minus.imag());
    }

    // Jordan block m = 2: k = 2 gives c_1 + 0.5 c_0
    const cd c1{1.5, 0.0}, c0{-0.4, 0.3};
    Triplet jt;
    jt.side = Side::inside;
    RowVectorXcd row(2);
    row << c1, c0;
    jt.blocks.push_back({cd{0.5, 0.0}, 2, row});
    CHECK(std::abs(kernel_contribution(jt, 2) - (c1 + 0.5 * c0)) < 1e-15);
    for (int k = 1; k <= 63; k += 2) CHECK(kernel_contribution(jt, k) == cd{0.0, 0.0});
    for (int k = 2; k <= 64; k += 2) {
        const cd plus = kernel_contribution_half(jt, k, false);
        const cd minus = kernel_contribution_half(jt, k, true);
        CHECK(plus.real() == minus.real());
        CHECK(plus.imag() == minus.imag());
    }

    // outside triplet: C Abar^{-k-1} B, scalar Abar = 2, k = 2 gives c / 8
    Triplet out;
    out.side = Side::outside;
    out.blocks.push_back({cd{2.0, 0.0}, 1, RowVectorXcd::Constant(1, c)});
    CHECK(std::abs(kernel_contribution(out, 2) - c / 8.0) < 1e-16);
    for (int k = 1; k <= 63; k += 2) CHECK(kernel_contribution(out, k) == cd{0.0, 0.0});
}

TEST_CASE("triplet conversion between systems") {
    Triplet in;
    in.side = Side::inside;
    in.blocks.push_back({cd{0.5, 0.0}, 1, RowVectorXcd::Constant(1, cd{1.0, 0.0})});

    // with D_inf = E_inf = 1: C^(uv) = C (1 - z^{-2}) = 1 - 4 = -3
    const Triplet uv = convert_triplet(in, Kind::qr, Kind::uv, cd{1, 0}, cd{1, 0});
    CHECK(std::abs(uv.blocks[0].C(0) - cd{-3.0, 0.0}) < 1e-14);

    // qr -> ps scales by D_inf/E_inf
    const cd D{0.8, 0.1}, E{1.1, -0.2};
    const Triplet ps = convert_triplet(in, Kind::qr, Kind::ps, D, E);
    CHECK(std::abs(ps.blocks[0].C(0) - D / E) < 1e-14);

    // composition consistency and round trips on a Jordan block
    Triplet big;
    big.side = Side::inside;
    RowVectorXcd row(2);
    row << cd{0.3, 0.4}, cd{-1.0, 0.2};
    big.blocks.push_back({cd{0.4, 0.2}, 2, row});
    big.blocks.push_back({cd{0.5, 0.0}, 1, RowVectorXcd::Constant(1, cd{2.0, 0.0})});
    const Triplet via_ps = convert_triplet(convert_triplet(big, Kind::qr, Kind::ps, D, E),
                                           Kind::ps, Kind::uv, D, E);
    const Triplet direct = convert_triplet(big, Kind::qr, Kind::uv, D, E);
    for (size_t b = 0; b < big.blocks.size(); ++b)
        CHECK((via_ps.blocks[b].C - direct.blocks[b].C).cwiseAbs().maxCoeff() < 1e-13);
    const Triplet back = convert_triplet(direct, Kind::uv, Kind::qr, D, E);
    for (size_t b = 0; b < big.blocks.size(); ++b)
        CHECK((back.blocks[b].C - big.blocks[b].C).cwiseAbs().maxCoeff() < 1e-13);

    // outside round trip
    Triplet outp;
    outp.side = Side::outside;
    outp.blocks.push_back({cd{2.0, 1.0}, 2, row});
    const Triplet o_uv = convert_triplet(outp, Kind::qr, Kind::uv, D, E);
    const Triplet o_back = convert_triplet(o_uv, Kind::uv, Kind::qr, D, E);
    CHECK((o_back.blocks[0].C - outp.blocks[0].C).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("triplet validation") {
    Triplet bad;
    bad.side = Side::inside;
    bad.blocks.push_back({cd{2.0, 0.0}, 1, RowVectorXcd::Constant(1, cd{1.0, 0.0})});
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad.side = Side::outside;
    CHECK_NOTHROW(bad.validate());
    bad.blocks.push_back({cd{-2.0, 0.0}, 1, RowVectorXcd::Constant(1, cd{1.0, 0.0})});
    CHECK_THROWS_AS(bad.validate(), InputError);  // mirror eigenvalues collide
}

TEST_CASE("find_simple_poles: no poles for small or zero potentials") {
    const PotentialPair zero(Kind::qr, 0, {cd{0, 0}}, {cd{0, 0}});
    const PoleSearchResult r0 = find_simple_poles(zero);
    CHECK(r0.inside.empty());
    CHECK(r0.outside.empty());

    const PoleSearchResult r3 = find_simple_poles(testfix::p3());
    CHECK(r3.inside.empty());
    CHECK(r3.outside.empty());
}

TEST_CASE("find_simple_poles: analytic single-site inside pole") {
    // q_0 = r_0 = 0.9: 1/T = (1 - qr) + qr z^2, zeros at z = +/- i sqrt(19)/9.
    // Residue 1/a'(z_j) = 1/(2 qr z_j); dependency phi_0 = gamma psi_0 with
    // psi_0 = [(z - 1/z) q z; *] gives gamma_0 = 1/(q (z^2 - 1)).
    const PotentialPair pair(Kind::qr, 0, {cd{0.9, 0.0}}, {cd{0.9, 0.0}});
    const PoleSearchResult res = find_simple_poles(pair);
    REQUIRE(res.inside.size() == 1);
    CHECK(res.outside.empty());
    const SimplePole& p = res.inside[0];
    const cd zj{0.0, std::sqrt(19.0) / 9.0};
    CHECK(std::abs(p.z - zj) < 1e-10);
    CHECK(std::abs(p.t1 - 1.0 / (2.0 * 0.81 * zj)) < 1e-8);
    CHECK(std::abs(p.gamma0 - 1.0 / (0.9 * (zj * zj - 1.0))) < 1e-8);
    CHECK(std::abs(p.c0 - (-2.0 * p.t1 * p.gamma0)) < 1e-14);
}

TEST_CASE("find_simple_poles: analytic adjacent-site outside pole") {
    // q_0 = 0.9, r_1 = -1: 1/Tbar = (1 + q_0 r_1) - q_0 r_1 / z^2 = 0.1 + 0.9/z^2,
    // zeros at z = +/- 3i.  Residue 1/abar'(3i) = 15i; dependency constant
    // phibar_0 = gammabar psibar_0 with psibar_0(3i) = [0; r_1/z^2] gives
    // gammabar_0 = z^2 / r_1 = 9.
    const PotentialPair pair(Kind::qr, 0, {cd{0.9, 0.0}, cd{0.0, 0.0}},
                             {cd{0.0, 0.0}, cd{-1.0, 0.0}});
    const PoleSearchResult res = find_simple_poles(pair);
    CHECK(res.inside.empty());
    REQUIRE(res.outside.size() == 1);
    const SimplePole& p = res.outside[0];
    CHECK(std::abs(p.z - cd{0.0, 3.0}) < 1e-9);
    CHECK(std::abs(p.t1 - cd{0.0, 15.0}) < 1e-6);
    CHECK(std::abs(p.gamma0 - 9.0) < 1e-7);
    CHECK(std::abs(p.c0 - (2.0 * p.t1 * p.gamma0)) < 1e-12);

    const auto [tin, tout] = triplets_from_poles(res);
    CHECK(tin.empty());
    REQUIRE(tout.blocks.size() == 1);
    CHECK(std::abs(tout.blocks[0].C(0) - p.c0) == 0.0);
    CHECK_NOTHROW(tout.validate());
}
