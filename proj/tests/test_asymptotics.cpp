#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pencil/asymptotics.hpp"
#include "testutil.hpp"

using namespace pencil;
using namespace pencil::testutil;

static const double PI = 3.14159265358979323846;

static AsymptoticCoeffs coeffs_of(const ProblemSpec& s) {
    return tau_coeffs(classify_case(s), s);
}

TEST_CASE("quadrature of g") {
    CHECK(G_of(make_missile("0")) == doctest::Approx(0.0));
    CHECK(G_of(make_missile("1", 2.0)) == doctest::Approx(2.0));
    CHECK(G_of(make_missile("x")) == doctest::Approx(0.5));
    CHECK(G_of(make_missile("sin(pi*x)")) == doctest::Approx(2.0 / PI).epsilon(1e-10));
    CHECK(G_of(make_missile("x^2", 2.0), 1.5) == doctest::Approx(1.125));
}

TEST_CASE("flexible missile tau values") {
    AsymptoticCoeffs c0 = coeffs_of(make_missile("0"));
    CHECK(c0.tau0.real() == doctest::Approx(-2.5 * PI));
    CHECK(std::abs(c0.tau1) < 1e-14);
    CHECK(std::abs(c0.tau2) < 1e-14);
    CHECK(c0.tau0.imag() == 0.0);

    AsymptoticCoeffs c1 = coeffs_of(make_missile("1"));
    CHECK(c1.tau1.real() == doctest::Approx(1.0 / (4.0 * PI)));
    CHECK(c1.tau1.imag() == 0.0);  // real for real g
    CHECK(c1.tau2.imag() == 0.0);
}

TEST_CASE("CaseA1 tau values, beta3 = beta4 = 1, g = 0") {
    AsymptoticCoeffs c1 = coeffs_of(make_caseA1(1, 1.0, 1.0));
    CHECK(c1.tau0.real() == doctest::Approx(-0.75 * PI));
    CHECK(c1.tau1 == Complex(0.0, 1.0 / PI));
    CHECK(std::abs(c1.tau2 - Complex(0.0, 0.75 / PI)) < 1e-14);

    AsymptoticCoeffs c2 = coeffs_of(make_caseA1(2, 1.0, 1.0));
    CHECK(c2.tau0.real() == doctest::Approx(-PI));
    CHECK(std::abs(c2.tau2 - Complex(-1.0 / (PI * PI), 1.0 / PI)) < 1e-14);
}

TEST_CASE("seed values") {
    AsymptoticCoeffs fm = coeffs_of(make_missile("0"));
    CHECK(std::abs(seed_mu(4, fm, 1.0) - Complex(1.5 * PI)) < 1e-14);

    AsymptoticCoeffs c5 = coeffs_of(make_caseA1(5, 1.0, 1.0));
    Complex want = Complex(9.5 * PI, 1.0 / (10.0 * PI) + 1.0 / (200.0 * PI));
    CHECK(std::abs(seed_mu(10, c5, 1.0) - want) < 1e-13);

    for (int k = 1; k < 30; ++k)
        CHECK(seed_mu(k + 1, c5, 1.0).real() > seed_mu(k, c5, 1.0).real());
}

TEST_CASE("tau0 scales like 1/a") {
    for (int lc = 1; lc <= 6; ++lc) {
        AsymptoticCoeffs c1 = coeffs_of(make_caseA1(lc, 1.0, 1.0, "0", 1.0));
        AsymptoticCoeffs c2 = coeffs_of(make_caseA1(lc, 1.0, 1.0, "0", 2.0));
        CHECK(std::abs(c2.tau0 - 0.5 * c1.tau0) < 1e-14);
    }
    AsymptoticCoeffs m1 = coeffs_of(make_missile("0", 1.0));
    AsymptoticCoeffs m2 = coeffs_of(make_missile("0", 2.0));
    CHECK(std::abs(m2.tau0 - 0.5 * m1.tau0) < 1e-14);
}

TEST_CASE("unsupported labels throw") {
    // CaseA1/CaseA2 coefficients need beta3 beta4 != 0; a right pair outside
    // the two beta patterns has no printed table
    ProblemSpec s = validate(1.0, Expr::parse("0"), "0",
                             {bc(Endpoint::Left, 0), bc(Endpoint::Left, 1),
                              bc(Endpoint::Right, 0), bc(Endpoint::Right, 1)});
    CHECK_THROWS_AS(tau_coeffs(classify_case(s), s), UnsupportedCase);
}

TEST_CASE("exact zero progressions annihilate phi0") {
    struct Pick {
        ProblemSpec spec;
        double c1, c0;
        int kmin;
    };
    std::vector<Pick> picks;
    picks.push_back({make_caseA1(2, 1.0, 1.0), 1.0, -1.0, 2});
    picks.push_back({make_caseA1(5, 1.0, 1.0), 1.0, -0.5, 2});
    picks.push_back({make_caseA2(2, 1.0, -1.0), 1.0, -0.5, 1});
    picks.push_back({make_caseA2(5, 1.0, -1.0), 1.0, -1.0, 2});
    for (const auto& pk : picks) {
        ZeroTable zt = phi0_zero_table(classify_case(pk.spec));
        REQUIRE(zt.exact.has_value());
        CHECK(zt.exact->c1 == doctest::Approx(pk.c1));
        CHECK(zt.exact->c0 == doctest::Approx(pk.c0));
        CHECK(zt.exact->kmin == pk.kmin);
        for (int k = pk.kmin; k <= 30; ++k) {
            double mu = (zt.exact->c1 * k + zt.exact->c0) * PI / pk.spec.a;
            CHECK(std::abs(zt.phi0(Complex(mu), pk.spec.a)) < 1e-10);
        }
    }
}

TEST_CASE("origin multiplicities per case") {
    CHECK(phi0_zero_table(classify_case(make_caseA1(1, 1.0, 1.0))).origin_multiplicity == 4);
    CHECK(phi0_zero_table(classify_case(make_caseA1(6, 1.0, 1.0))).origin_multiplicity == 8);
    CHECK(phi0_zero_table(classify_case(make_caseA2(1, 1.0, -1.0))).origin_multiplicity == 2);
    CHECK(phi0_zero_table(classify_case(make_caseA2(4, 1.0, -1.0))).origin_multiplicity == 6);
    CHECK(phi0_zero_table(classify_case(make_missile())).origin_multiplicity == 8);
}

TEST_CASE("bracketed cases: sign change in each bracket, zero near the center") {
    for (auto spec : {make_caseA1(6, 1.0, 1.0), make_missile()}) {
        ZeroTable zt = phi0_zero_table(classify_case(spec));
        REQUIRE(zt.brackets.has_value());
        for (int k = zt.brackets->kmin; k <= zt.brackets->kmin + 10; ++k) {
            auto [lo, hi] = zt.bracket_for(k, spec.a);
            double flo = zt.phi0(Complex(lo), spec.a).real();
            double fhi = zt.phi0(Complex(hi), spec.a).real();
            CHECK(flo * fhi < 0.0);  // exactly one simple zero inside
            double center = (4.0 * k + zt.brackets->center_c0) * PI / (4.0 * spec.a);
            CHECK(lo < center + PI / spec.a);
            CHECK(hi > center - PI / spec.a);
        }
    }
}

TEST_CASE("fit recovers planted tau1 and tau2") {
    Complex tau0(-0.75 * PI, 0.0), tau1(0.04, 0.3), tau2(-0.2, 0.11);
    std::vector<std::pair<int, Complex>> mus;
    for (int k = 10; k <= 40; ++k) {
        Complex mu = Complex(k * PI) + tau0 + tau1 / double(k) + tau2 / double(k * k);
        mus.push_back({k, mu});
    }
    FittedTau ft = fit_tau(mus, 1.0, tau0);
    CHECK(std::abs(ft.tau1 - tau1) < 1e-10);
    CHECK(std::abs(ft.tau2 - tau2) < 1e-8);
}
