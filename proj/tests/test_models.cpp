#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nmep/models.hpp"
#include "nmep/reference.hpp"

using namespace nmep;

namespace {
constexpr double pi = 3.141592653589793238462643383279502884;
}

TEST_CASE("spin-star rate and lamb shift") {
    SpinStarParams p; // alpha=1, n=4, beta_omega=2
    CHECK(spin_star_rate(p, 0.0) == 0.0);
    // 4 sin(pi/2) / (cos(pi/2) + cosh 2) = 4 / cosh 2
    CHECK(spin_star_rate(p, pi / 8.0) == doctest::Approx(1.063208915336319).epsilon(1e-13));
    CHECK(spin_star_rate(p, 3.0 * pi / 8.0) ==
          doctest::Approx(-1.063208915336319).epsilon(1e-13));
    // 4 sinh(-2) / (1 + cosh 2)
    CHECK(spin_star_lamb_shift(p, 0.0) == doctest::Approx(-3.04637662382306).epsilon(1e-13));
}

TEST_CASE("dephasing factor values") {
    SpinStarParams p;
    CHECK(std::abs(spin_star_f(p, 0.0) - 1.0) == 0.0);
    // |f(pi/4)| = tanh(1)^4
    CHECK(std::abs(spin_star_f(p, pi / 4.0)) ==
          doctest::Approx(0.33642976438608246).epsilon(1e-13));
    CHECK(std::abs(spin_star_f(p, pi / 2.0) - 1.0) < 1e-12);
}

TEST_CASE("log-derivative of f matches rate and lamb shift") {
    // pins the generator sign convention: d ln f / dt = -2 gamma - 2 i delta
    SpinStarParams p;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ts(0.01, 2.0);
    const double h = 1e-6;
    for (int k = 0; k < 100; ++k) {
        const double t = ts(rng);
        const cplx dlnf =
            (std::log(spin_star_f(p, t + h)) - std::log(spin_star_f(p, t - h))) / (2.0 * h);
        CHECK(dlnf.real() == doctest::Approx(-2.0 * spin_star_rate(p, t)).epsilon(1e-6));
        CHECK(dlnf.imag() == doctest::Approx(-2.0 * spin_star_lamb_shift(p, t)).epsilon(1e-6));
    }
}

TEST_CASE("closed-form solution solves the master equation") {
    SpinStarParams p;
    DensityMatrix rho0(2);
    rho0(0, 0) = 0.3;
    rho0(1, 1) = 0.7;
    rho0(0, 1) = cplx(0.2, -0.1);
    rho0(1, 0) = std::conj(rho0(0, 1));
    const auto m = spin_star_model(p);
    const double t = 0.77;
    const auto rho = spin_star_analytic(p, rho0, t);
    CHECK(rho(0, 0) == rho0(0, 0));
    CHECK(rho(1, 1) == rho0(1, 1));
    const double h = 1e-5;
    const auto dplus = spin_star_analytic(p, rho0, t + h);
    const auto dminus = spin_star_analytic(p, rho0, t - h);
    const auto rhs = generator_rhs(m, t, rho);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const cplx numeric = (dplus(i, j) - dminus(i, j)) / (2.0 * h);
            CHECK(std::abs(numeric - rhs(i, j)) < 1e-6);
        }
}

TEST_CASE("effective hamiltonian splits into hermitian and decay parts") {
    SpinStarParams p;
    const auto m = spin_star_model(p);
    for (double t : {0.1, 0.5, 1.1, 1.9}) {
        const Matrix hs = m.hamiltonian_at(t);
        CHECK(hs.is_hermitian(1e-10));
        const Matrix heff = effective_hamiltonian(m, t);
        CHECK((heff + heff.adjoint() - cplx(2.0) * hs).max_abs() < 1e-10);
    }
}

TEST_CASE("quadrature tables at the closed-form exponent") {
    // alpha = 1: f_cos(x) = sin(x), f_sin(x) = 1 - cos(x)
    TransmonTables tab(1.0, 12.0, 24001);
    for (double x = 0.0; x <= 12.0; x += 0.37) {
        CHECK(std::abs(tab.f_cos(x) - std::sin(x)) < 1e-6);
        CHECK(std::abs(tab.f_sin(x) - (1.0 - std::cos(x))) < 1e-6);
    }
    CHECK(tab.f_cos(0.0) == 0.0);
    CHECK(tab.f_sin(0.0) == 0.0);
}

TEST_CASE("quadrature tables against independent oracle values") {
    TransmonTables tab(0.9, 12.0, 48001);
    CHECK(std::abs(tab.f_cos(1.0) - 0.8523019734279904) < 1e-6);
    CHECK(std::abs(tab.f_sin(1.0) - 0.4364715031638964) < 1e-6);
    CHECK(std::abs(tab.f_cos(5.0) - (-0.5856275728200871)) < 1e-6);
    CHECK(std::abs(tab.f_sin(5.0) - 0.7470847881655213) < 1e-6);
    CHECK(std::abs(tab.f_cos(10.0) - (-0.23218681438436498)) < 1e-6);
    CHECK(std::abs(tab.f_sin(10.0) - 1.552958196441512) < 1e-6);
}

TEST_CASE("table domain and construction errors") {
    TransmonTables tab(0.9, 2.0, 2001);
    CHECK_THROWS_AS(tab.f_cos(2.5), OutOfTableRange);
    CHECK_THROWS_AS(tab.f_sin(-0.1), OutOfTableRange);
    CHECK_THROWS_AS(TransmonTables(0.0, 1.0, 100), InvalidExponent);
    CHECK_THROWS_AS(TransmonTables(-0.5, 1.0, 100), InvalidExponent);
    CHECK_THROWS_AS(TransmonTables(2.0, 1.0, 100), InvalidExponent);
}

TEST_CASE("transmon coefficient functions") {
    TransmonModel m(TransmonParams{});
    const auto r0 = m.rates(0.0);
    CHECK(r0.gamma_plus == 0.0);
    CHECK(r0.gamma_minus == 0.0);
    CHECK(r0.lamb_shift == 0.0);

    const auto r = m.rates(0.5);
    CHECK(r.gamma_plus == doctest::Approx(-10.536266180759888).epsilon(1e-5));
    CHECK(r.gamma_minus == doctest::Approx(2.437746062350762).epsilon(1e-5));
    CHECK(r.lamb_shift == doctest::Approx(-40.9573447256762).epsilon(1e-5));
}

TEST_CASE("rate divergence at exponent one") {
    TransmonParams p;
    p.alpha = 1.0;
    TransmonModel m(p); // tables are fine at alpha = 1
    CHECK_THROWS_AS(m.rates(0.5), InvalidExponent);
    CHECK_THROWS_AS(m.channels(0.5), InvalidExponent);
}

TEST_CASE("channel diagonalization invariants") {
    TransmonParams p;
    TransmonModel m(p);
    double max_du = 0.0;
    Matrix prev_u;
    const double ds = 5e-5;
    for (double s = ds; s <= 1.0; s += 0.01) {
        const auto r = m.rates(s);
        const auto ch = m.channels(s);
        // rate sum matches the coefficient-matrix trace
        CHECK(ch.rates[0] + ch.rates[1] ==
              doctest::Approx(2.0 * p.c * (r.gamma_plus + r.gamma_minus)).epsilon(1e-12));
        // one effective rate stays negative for all s > 0
        CHECK(std::min(ch.rates[0], ch.rates[1]) < 0.0);
        CHECK(std::max(ch.rates[0], ch.rates[1]) > 0.0);
        // basis stays unitary
        CHECK((ch.basis.adjoint() * ch.basis - Matrix::identity(2)).max_abs() < 1e-12);
        // continuity across one solver step
        const auto next = m.channels(s + ds);
        max_du = std::max(max_du, (next.basis - ch.basis).max_abs() / ds);
    }
    CHECK(max_du < 100.0); // no branch flips: bounded slope along the trajectory
}

TEST_CASE("hand-diagonalizable coefficient matrix") {
    // gamma+ = gamma- = g, lamb shift 0: d = [[g,-g],[-g,g]], eigenvalues (2g, 0)
    const double g = 0.7;
    const Matrix d(2, {g, -g, -g, g});
    const Eig2 e = hermitian_eig2(d);
    CHECK(e.values[0] == doctest::Approx(2.0 * g).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("transmon lindblad facade") {
    auto model = transmon_lindblad_model(TransmonParams{});
    REQUIRE(model.channels.size() == 2);
    CHECK(model.dim == 2);
    const Matrix h = model.hamiltonian_at(0.3);
    CHECK(h.is_hermitian(1e-12));
    CHECK(h(0, 0).real() < 0.0); // -(pi + c lamb_shift) sigma_z with small c
    const Matrix heff = effective_hamiltonian(model, 0.3);
    CHECK((heff + heff.adjoint() - cplx(2.0) * h).max_abs() < 1e-10);
}

TEST_CASE("tabulated model interpolation") {
    TabulatedModelSpec spec;
    spec.dim = 2;
    TabulatedChannel ch;
    ch.op = sigma_z();
    ch.rates = {{0.0, 0.0}, {1.0, 2.0}};
    spec.channels.push_back(ch);
    spec.hamiltonian = {{0.0, Matrix(2)}};
    const auto m = tabulated_model(spec);
    CHECK(m.channels[0].rate_at(0.5) == doctest::Approx(1.0));
    CHECK(m.channels[0].rate_at(0.0) == doctest::Approx(0.0));
    CHECK(m.channels[0].rate_at(1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(m.channels[0].rate_at(1.5), OutOfRange);
    CHECK_THROWS_AS(m.channels[0].rate_at(-0.5), OutOfRange);
    // constant hamiltonian is valid everywhere
    CHECK(m.hamiltonian_at(123.0).max_abs() == 0.0);
}

TEST_CASE("tabulated model constant rate") {
    TabulatedModelSpec spec;
    spec.dim = 2;
    spec.channels.push_back({sigma_minus(), {{0.0, 1.0}}});
    spec.hamiltonian = {{0.0, sigma_z()}};
    const auto m = tabulated_model(spec);
    CHECK(m.channels[0].rate_at(-7.0) == 1.0);
    CHECK(m.channels[0].rate_at(42.0) == 1.0);
}

TEST_CASE("tabulated model validation") {
    TabulatedModelSpec spec;
    spec.dim = 2;
    spec.channels.push_back({sigma_z(), {{1.0, 0.5}, {0.5, 0.7}}});
    spec.hamiltonian = {{0.0, Matrix(2)}};
    CHECK_THROWS_AS(tabulated_model(spec), NonMonotonicTimes);

    TabulatedModelSpec bad_dim;
    bad_dim.dim = 2;
    bad_dim.channels.push_back({Matrix(3), {{0.0, 1.0}}});
    bad_dim.hamiltonian = {{0.0, Matrix(2)}};
    CHECK_THROWS_AS(tabulated_model(bad_dim), ConfigError);
}

TEST_CASE("tabulated model parser") {
    std::istringstream in(
        "# two-level dephasing with a linear rate ramp\n"
        "dim=2 channels=1\n"
        "channel:\n"
        "1 0\n"
        "0 -1\n"
        "rates:\n"
        "0 0\n"
        "1 2\n"
        "hamiltonian:\n"
        "0 0.5-0.5j\n"
        "0.5+0.5j 0\n");
    const auto spec = parse_tabulated_model(in, "inline");
    CHECK(spec.dim == 2);
    REQUIRE(spec.channels.size() == 1);
    CHECK(spec.channels[0].op == sigma_z());
    CHECK(spec.channels[0].rates.size() == 2);
    REQUIRE(spec.hamiltonian.size() == 1);
    CHECK(spec.hamiltonian[0].second(0, 1) == cplx(0.5, -0.5));
}

TEST_CASE("tabulated parser with hamiltonian samples") {
    std::istringstream in(
        "dim=2 channels=1\n"
        "channel:\n"
        "0 1\n"
        "0 0\n"
        "rates:\n"
        "0 1\n"
        "hamiltonian:\n"
        "t 0\n"
        "0 0\n"
        "0 0\n"
        "t 1\n"
        "2 0\n"
        "0 -2\n");
    const auto m = tabulated_model(parse_tabulated_model(in, "inline"));
    CHECK(m.hamiltonian_at(0.5)(0, 0) == cplx(1.0));
    CHECK(m.hamiltonian_at(1.0)(1, 1) == cplx(-2.0));
    CHECK_THROWS_AS(m.hamiltonian_at(2.0), OutOfRange);
}

TEST_CASE("tabulated parser reports line numbers") {
    std::istringstream bad(
        "dim=2 channels=1\n"
        "channel:\n"
        "1 0\n"
        "0 oops\n");
    try {
        parse_tabulated_model(bad, "badfile");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("badfile:4") != std::string::npos);
    }

    std::istringstream empty("");
    CHECK_THROWS_AS(parse_tabulated_model(empty, "empty"), ParseError);

    std::istringstream header("dim=x channels=1\n");
    CHECK_THROWS_AS(parse_tabulated_model(header, "hdr"), ParseError);
}
