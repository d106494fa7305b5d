#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dnls/marchenko.hpp"
#include "dnls/soliton.hpp"
#include "dnls/transforms.hpp"
#include "fixtures.hpp"

using namespace dnls;

namespace {

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
Triplet two_inside() {
    Triplet t = one_inside();
    t.blocks.push_back({cd{0.3, 0.25}, 1, RowVectorXcd::Constant(1, cd{0.4, -0.2})});
    return t;
}
Triplet two_outside() {
    Triplet t = one_outside();
    t.blocks.push_back({cd{0.0, 1.8}, 1, RowVectorXcd::Constant(1, cd{0.5, 0.3})});
    return t;
}
Triplet jordan_inside() {
    Triplet t;
    t.side = Side::inside;
    RowVectorXcd C(2);
    C << cd{0.02, 0.0}, cd{0.3, 0.0};
    t.blocks.push_back({cd{0.0, 0.7}, 2, C});
    return t;
}
Triplet jordan_outside() {
    Triplet t;
    t.side = Side::outside;
    RowVectorXcd C(2);
    C << cd{0.02, 0.0}, cd{0.3, 0.0};
    t.blocks.push_back({cd{0.0, 1.5}, 2, C});
    return t;
}

ExpandedTriplet scalar_expanded(cd z, cd c) {
    ExpandedTriplet e;
    e.z = {z};
    e.m = {1};
    e.C = RowVectorXcd::Constant(1, c);
    e.N = 1;
    return e;
}

MarchenkoKernel kernel_from_tables(const SolitonTables& tab, Kind kind, int k_lo, int k_hi) {
    MarchenkoKernel ker;
    ker.kind = kind;
    ker.k_lo = k_lo;
    ker.k_hi = k_hi;
    for (int k = k_lo; k <= k_hi; ++k) {
        ker.om.push_back(tab.omega(k));
        ker.omb.push_back(tab.omegabar(k));
    }
    return ker;
}

}  // namespace

TEST_CASE("sylvester: scalar oracles") {
    const auto s = sylvester(scalar_expanded(cd{0.5, 0.0}, cd{1, 0}),
                             scalar_expanded(cd{2.0, 0.0}, cd{1, 0}));
    CHECK(std::abs(s.Upsilon(0, 0) - cd{4.0 / 3.0, 0.0}) < 1e-14);
    CHECK(std::abs(s.Upsilonbar(0, 0) - cd{4.0 / 3.0, 0.0}) < 1e-14);

    const auto z = sylvester(scalar_expanded(cd{0.5, 0.0}, cd{1, 0}),
                             scalar_expanded(cd{2.0, 0.0}, cd{0, 0}));
    CHECK(std::abs(z.Upsilon(0, 0)) == 0.0);

    // residual invariant on the expanded two-soliton pair
    const ExpandedTriplet ein = expanded(two_inside()), eout = expanded(two_outside());
    const auto s2 = sylvester(ein, eout);
    const MatrixXcd res =
        s2.Upsilon - ein.A_power(1) * s2.Upsilon * eout.A_power(-1) - ein.B() * eout.C;
    CHECK(res.cwiseAbs().maxCoeff() < 1e-12);
    const MatrixXcd resb =
        s2.Upsilonbar - eout.A_power(-1) * s2.Upsilonbar * ein.A_power(1) - eout.B() * ein.C;
    CHECK(resb.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("propagators: scalar value, Jordan structure, composition") {
    const ExpandedTriplet ein = scalar_expanded(cd{0.5, 0.0}, cd{1, 0});
    const ExpandedTriplet eout = scalar_expanded(cd{2.0, 0.0}, cd{1, 0});
    CHECK((propagators(ein, eout, 0.0).E - MatrixXcd::Identity(1, 1)).cwiseAbs().maxCoeff() ==
          0.0);
    const TimePropagators p1 = propagators(ein, eout, 1.0);
    CHECK(std::abs(p1.E(0, 0) - std::exp(cd{0.0, -2.25})) < 1e-14);
    CHECK(std::abs(p1.Ebar(0, 0) - std::exp(cd{0.0, 2.25})) < 1e-14);

    const ExpandedTriplet ej = expanded(jordan_inside());
    const TimePropagators pj = propagators(ej, expanded(jordan_outside()), 0.7);
    const cd zj{0.0, 0.7};
    const cd lam = std::exp(cd{0.0, -0.7} * std::pow(zj - 1.0 / zj, 2));
    CHECK(std::abs(pj.E(0, 0) - lam) < 1e-13);
    CHECK(std::abs(pj.E(1, 1) - lam) < 1e-13);
    CHECK(std::abs(pj.E(1, 0)) == 0.0);
    // E commutes with A; E(t+s) = E(t) E(s)
    CHECK((pj.E * ej.A_power(1) - ej.A_power(1) * pj.E).cwiseAbs().maxCoeff() < 1e-13);
    const TimePropagators pa = propagators(ej, expanded(jordan_outside()), 0.3);
    const TimePropagators pb = propagators(ej, expanded(jordan_outside()), 0.4);
    CHECK((pj.E - pa.E * pb.E).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kernels match the evolved-triplet contributions") {
    const SolitonTables tab(two_inside(), two_outside(), 0.8);
    const Triplet ein = evolve_triplet(two_inside(), 0.8);
    const Triplet eout = evolve_triplet(two_outside(), 0.8);
    for (int k = -6; k <= 30; ++k) {
        CHECK(std::abs(tab.omega(k) - kernel_contribution(ein, k)) < 1e-12);
        CHECK(std::abs(tab.omegabar(k) - kernel_contribution(eout, k)) < 1e-12);
    }
}

TEST_CASE("empty triplets: zero tables and zero pair") {
    Triplet in, out;
    in.side = Side::inside;
    out.side = Side::outside;
    const SolitonTables tab(in, out, 0.5);
    CHECK(tab.omega(4) == cd{0.0, 0.0});
    CHECK(tab.M1(0, 2) == cd{0.0, 0.0});
    CHECK(tab.Mbar1(0, 0) == cd{1.0, 0.0});
    const PotentialPair pair = soliton_qr(in, out, 0.5, -8, 8);
    for (int n = -8; n <= 8; ++n) {
        CHECK(std::abs(pair.a(n)) == 0.0);
        CHECK(std::abs(pair.b(n)) == 0.0);
    }
}

TEST_CASE("one-soliton scalar asymptotics: geometric decay of the pair") {
    const PotentialPair pair = soliton_qr(one_inside(), one_outside(), 0.0, -32, 32);
    for (int n = 10; n <= 14; ++n) {
        CHECK(std::abs(pair.a(n + 1) / pair.a(n) - 0.25) < 1e-3);
        CHECK(std::abs(pair.b(n + 1) / pair.b(n) - 0.25) < 1e-3);
    }
}

TEST_CASE("closed-form tables solve the standard Marchenko system") {
    for (double t : {0.0, 0.5}) {
        const SolitonTables tab(two_inside(), two_outside(), t);
        // sites at strongly negative n amplify the barred kernel's growth and
        // lose digits to cancellation; stay in a well-conditioned range
        const MarchenkoKernel ker = kernel_from_tables(tab, Kind::qr, -16, 130);
        for (int n : {-2, 0, 3}) {
            // substitution residual of the closed-form table
            SiteTables ct;
            ct.n = n;
            ct.m_max = n + 56;
            for (int m = n; m <= ct.m_max; ++m) {
                ct.Kbar.push_back(Vector2cd(tab.Mbar1(n, m), tab.Mbar2(n, m)));
                ct.K.push_back(Vector2cd(tab.M1(n, m), tab.M2(n, m)));
            }
            CHECK(standard_residual(ker, ct) < 1e-10);
            // agreement with the dense solver
            const SiteTables st = solve_standard(ker, n, n + 40);
            for (int m = n; m <= n + 24; ++m) {
                CHECK((ct.Kbar_at(m) - st.Kbar_at(m)).cwiseAbs().maxCoeff() < 1e-10);
                CHECK((ct.K_at(m) - st.K_at(m)).cwiseAbs().maxCoeff() < 1e-10);
            }
        }
    }
}

TEST_CASE("soliton_qr: route agreement and scattering closure") {
    for (double t : {0.0, 0.5, 1.0}) {
        const PotentialPair z7 =
            soliton_qr(one_inside(), one_outside(), t, -32, 32, SolitonRoute::z7);
        const PotentialPair tau =
            soliton_qr(one_inside(), one_outside(), t, -32, 32, SolitonRoute::tau);
        double dev = 0.0;
        for (int n = -32; n <= 32; ++n)
            dev = std::max({dev, std::abs(z7.a(n) - tau.a(n)), std::abs(z7.b(n) - tau.b(n))});
        CHECK(dev < 1e-10);
        CHECK_NOTHROW(soliton_qr(two_inside(), two_outside(), t, -32, 32));
        CHECK_NOTHROW(soliton_qr(jordan_inside(), jordan_outside(), t, -32, 32));
    }

    const PotentialPair pair = soliton_qr(one_inside(), one_outside(), 0.0, -32, 32);
    const ScatteringData data = scatter(pair, SpectralGrid(512));
    double rmax = 0.0;
    for (int m = 0; m < 512; ++m)
        rmax = std::max({rmax, std::abs(data.R[static_cast<size_t>(m)]),
                         std::abs(data.Rbar[static_cast<size_t>(m)])});
    CHECK(rmax < 1e-8);

    const PoleSearchResult poles = find_simple_poles(pair);
    REQUIRE(poles.inside.size() == 1);
    REQUIRE(poles.outside.size() == 1);
    CHECK(std::abs(poles.inside[0].z - cd{0.5, 0.0}) < 1e-6);
    CHECK(std::abs(poles.outside[0].z - cd{2.0, 0.0}) < 1e-6);
    CHECK(std::abs(poles.inside[0].c0 - cd{1.0, 0.0}) < 1e-5);
    CHECK(std::abs(poles.outside[0].c0 - cd{1.0, 0.0}) < 1e-5);
}

TEST_CASE("transports, uv potentials, alternate closed forms") {
    const double t = 0.5;
    const PotentialPair pair = soliton_qr(two_inside(), two_outside(), t, -32, 32);
    const ScatteringData data = scatter(pair, SpectralGrid(512));
    const cd D = data.D_inf, E = data.E_inf;

    const TransportedTriplets tr =
        transport_triplets(two_inside(), two_outside(), D, E);
    // transported Sylvester solutions equal direct solves on converted triplets
    const SylvesterPair suv = sylvester(tr.inside_uv, tr.outside_uv);
    CHECK((suv.Upsilon - tr.uv.Upsilon).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((suv.Upsilonbar - tr.uv.Upsilonbar).cwiseAbs().maxCoeff() < 1e-12);
    const SylvesterPair sps = sylvester(tr.inside_ps, tr.outside_ps);
    CHECK((sps.Upsilon - tr.ps.Upsilon).cwiseAbs().maxCoeff() < 1e-12);

    const SolitonTables tqr(two_inside(), two_outside(), t);
    const SolitonTables tuv(tr.inside_uv, tr.outside_uv, t);
    const SolitonTables tps(tr.inside_ps, tr.outside_ps, t);
    // the ps site matrices coincide with the qr ones
    for (int n : {-3, 0, 2}) {
        CHECK((tps.Un(n) - tqr.Un(n)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((tps.Ubn(n) - tqr.Ubn(n)).cwiseAbs().maxCoeff() < 1e-12);
    }

    // explicit uv potentials agree with the transform route
    const PotentialPair uv_direct = soliton_uv(tr.inside_uv, tr.outside_uv, t, -24, 24);
    const PotentialPair uv_transform = qr_to_uv(pair);
    for (int n = -20; n <= 20; ++n) {
        CHECK(std::abs(uv_direct.a(n) - uv_transform.a(n)) < 1e-9);
        CHECK(std::abs(uv_direct.b(n) - uv_transform.b(n)) < 1e-9);
    }

    // alternate (summed) system: closed forms vs dense solve
    const MarchenkoKernel kuv = kernel_from_tables(tuv, Kind::uv, -16, 120);
    const MarchenkoKernel kps = kernel_from_tables(tps, Kind::ps, -16, 120);
    // the dense diagonal equals the closed form at m = n+1 (𝒦_nn = 𝒦_{n(n+1)})
    const AlternateDiagonals d = solve_alternate(kuv, kps, -5, 6, 40);
    for (int n = -5; n <= 6; ++n) {
        CHECK(std::abs(d.K(n) - tuv.alternate_K(n, n + 1)) < 1e-9);
        CHECK(std::abs(d.Kbar(n) - tps.alternate_Kbar(n, n + 1)) < 1e-9);
    }
    // tau diagonals are the uv/ps alternate diagonals scaled by D/E and E/D
    for (int n : {-3, 0, 4}) {
        CHECK(std::abs(tqr.tau(n) - (D / E) * d.K(n)) < 1e-9);
        CHECK(std::abs(tqr.taubar(n) - (E / D) * d.Kbar(n)) < 1e-9);
    }
}

TEST_CASE("explicit_solution_tables wrapper and input validation") {
    const auto [kbar, k] = explicit_solution_tables(one_inside(), one_outside(), 0.0, 0, 0);
    CHECK(kbar(0) == cd{1.0, 0.0});
    CHECK(k(1) == cd{1.0, 0.0});
    CHECK_THROWS_AS(soliton_qr(one_outside(), one_inside(), 0.0), InputError);
    CHECK_THROWS_AS(soliton_qr(one_inside(), one_outside(), 0.0, 4, -4), InputError);
}
