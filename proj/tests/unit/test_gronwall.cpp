#include <doctest.h>

#include <cmath>
#include <random>

#include "gvc/error.hpp"
#include "gvc/gronwall.hpp"
#include "support.hpp"

using namespace gvc;

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

KernelTriple constant_triple(const Grid& g, double c1, double c2, double c12) {
    return sample_kernels(
        g, 1, [c1](double, double, double, std::span<double> o) { o[0] = c1; },
        [c2](double, double, double, std::span<double> o) { o[0] = c2; },
        [c12](double, double, double, double, std::span<double> o) { o[0] = c12; });
}

}  // namespace

TEST_CASE("coefficient table examples") {
    const auto a = gronwall_coeffs(1, 1, 1, 0, 3, 3);
    CHECK(a.C[1][1] == 2.0);
    CHECK(a.kmax() == 3);
    CHECK(a.lmax() == 3);

    const double c = 0.7;
    const auto b = gronwall_coeffs(1, 0, 0, c, 6, 6);
    for (int k = 0; k <= 6; ++k) {
        for (int l = 0; l <= 6; ++l) {
            if (k == l) CHECK(b.C[k][l] == doctest::Approx(std::pow(c, k) / (factorial(k) * factorial(k))).epsilon(1e-14));
            else CHECK(b.C[k][l] == 0.0);
        }
    }

    const double bb = 1.3;
    const auto d = gronwall_coeffs(1, bb, 0, 0, 6, 4);
    for (int k = 0; k <= 6; ++k) {
        CHECK(d.C[k][0] == doctest::Approx(std::pow(bb, k) / factorial(k)).epsilon(1e-14));
        for (int l = 1; l <= 4; ++l) CHECK(d.C[k][l] == 0.0);
    }
    CHECK(d.C[0] == std::vector<double>{1.0, 0.0, 0.0, 0.0, 0.0});

    CHECK_THROWS_AS(gronwall_coeffs(1, 1, 1, 1, -1, 2), InvalidArgument);
}

TEST_CASE("C[1][1] = 2 B1 B2 + B12 and the coefficient bound") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double B1 = U(rng), B2 = U(rng), B12 = U(rng);
        const auto c = gronwall_coeffs(1, B1, B2, B12, 10, 10);
        CHECK(c.C[1][1] == 2.0 * B1 * B2 + B12);
        const double B = gronwall_B(B1, B2, B12);
        for (int k = 0; k <= 10; ++k)
            for (int l = 0; l <= 10; ++l) CHECK(std::abs(c.C[k][l]) <= gronwall_coeff_bound(B, k, l) * (1 + 1e-12));
    }
    CHECK(gronwall_B(0.5, -2, 3) == 2.0);
    CHECK(gronwall_B(0.1, 0.1, 12) == 2.0);
    CHECK(gronwall_coeff_bound(1, 2, 1) == doctest::Approx(27.0 / 2.0));
}

TEST_CASE("series evaluation examples") {
    CHECK(gronwall_solve(2.5, 0, 0, 0, 0.7, 0.3) == 2.5);
    CHECK(gronwall_solve(1, 0, 0, 1, 1, 1) == doctest::Approx(gvtest::bessel_series(1, 1)).epsilon(1e-12));
    CHECK(std::abs(gronwall_solve(1, 0, 0, 1, 1, 1) - 2.2795853) <= 1e-7);
    for (double dt : {0.0, 0.5, 3.0}) CHECK(gronwall_solve(1, 1, 0, 0, 1, dt) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    // Separable case: B12 = -B1 B2 gives exp(B1 ds + B2 dt).
    CHECK(gronwall_solve(1, 0.4, 0.9, -0.36, 1.2, 0.8) == doctest::Approx(std::exp(0.4 * 1.2 + 0.9 * 0.8)).epsilon(1e-12));

    const auto c = gronwall_coeffs(1, 0, 0, 1, 30, 30);
    CHECK(gronwall_eval(c, 1, 1) == doctest::Approx(gvtest::bessel_series(1, 1)).epsilon(1e-12));
    CHECK_THROWS_AS(gronwall_eval(c, -1, 1), InvalidArgument);
    const auto small = gronwall_coeffs(1, 3, 3, 3, 3, 3);
    CHECK_THROWS_AS(gronwall_eval(small, 2, 2), TruncationError);
    CHECK(gronwall_tail_bound(gronwall_coeffs(1, 1, 1, 1, 20, 20), 1, 1) <
          gronwall_tail_bound(gronwall_coeffs(1, 1, 1, 1, 10, 10), 1, 1));
}

TEST_CASE("exponential bound examples") {
    CHECK(gronwall_bound(1, 0, 0, 3, 1, 1) == doctest::Approx(std::exp(3.0)));
    CHECK(gronwall_bound(1, 0, 0, 0, 2, 2) == 1.0);
    CHECK(gronwall_bound(1, 0, 0, 1, 1, 1) == doctest::Approx(std::exp(std::sqrt(3.0))));
    CHECK(gronwall_solve(1, 0, 0, 1, 1, 1) <= gronwall_bound(1, 0, 0, 1, 1, 1));
}

TEST_CASE("separable bound dominates the series") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const double B1 = U(rng), B2 = U(rng), B12 = U(rng);
        for (int a = 1; a <= 5; ++a) {
            for (int b = 1; b <= 5; ++b) {
                const double ds = 0.3 * a, dt = 0.3 * b;
                CHECK(std::abs(gronwall_solve(1, B1, B2, B12, ds, dt)) <= gronwall_bound_separable(1, B1, B2, B12, ds, dt));
            }
        }
    }
}

TEST_CASE("product form bound fails when one side is short") {
    // B1 = 1 with dt small: zeta ~ e^{ds} while the product bound tends to 1.
    const double z = gronwall_solve(1, 1, 0, 0, 1, 0.1);
    CHECK(z == doctest::Approx(std::exp(1.0)));
    CHECK(z > gronwall_bound(1, 1, 0, 0, 1, 0.1));
}

TEST_CASE("series agrees with the discrete linear solve at second order") {
    auto err = [](int N) {
        const Grid g = make_grid(1, 1, N, N);
        const double A0 = 0.8, B1 = 0.6, B2 = -0.4, B12 = 0.9;
        const Field z = solve_linear(constant_triple(g, B1, B2, B12), Field::on(g, 1, A0), g, 1e-13);
        double e = 0.0;
        for (int i = 0; i < g.ns(); ++i)
            for (int j = 0; j < g.nt(); ++j) e = std::max(e, std::abs(z.at(i, j) - gronwall_solve(A0, B1, B2, B12, g.s[i], g.t[j])));
        return e;
    };
    const double e8 = err(8), e16 = err(16);
    CAPTURE(e8);
    CAPTURE(e16);
    CHECK(e8 / e16 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("comparison examples") {
    const Grid g = make_grid(1, 1, 5, 5);
    const KernelTriple phi = constant_triple(g, 0.5, 0.3, 0.8);
    const Field f = Field::on(g, 1, 2.0);

    const auto same = check_comparison(f, f, phi, g);
    CHECK(same.passed);
    CHECK(std::abs(same.worst_margin) <= 1e-12);

    const auto half = check_comparison(f, 0.5 * f, phi, g);
    CHECK(half.passed);
    CHECK(sup_diff(half.z, 0.5 * half.zeta) <= 1e-12);
    CHECK(half.zeta.at(5, 5) - half.z.at(5, 5) == doctest::Approx(0.5 * half.zeta.at(5, 5)));
    CHECK(half.worst_margin == doctest::Approx(1.0));  // at the origin, where zeta = forcing

    const auto zero = check_comparison(f, 0.25 * f, KernelTriple::on(g, 1), g);
    CHECK(zero.passed);
    CHECK(zero.worst_margin == doctest::Approx(1.5));

    CHECK_THROWS_AS(check_comparison(f, 2.0 * f, phi, g), InvalidArgument);
    CHECK_THROWS_AS(check_comparison(-1.0 * f, -1.0 * f, phi, g), InvalidArgument);
    CHECK_THROWS_AS(check_comparison(f, f, constant_triple(g, -0.1, 0, 0), g), InvalidArgument);
}

TEST_CASE("comparison holds on random nonnegative instances") {
    const Grid g = make_grid(1, 1, 5, 4);
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        KernelTriple phi = gvtest::random_triple(g, 1 + trial % 2, rng, 1.0);
        for (auto* v : {&phi.v1(), &phi.v2(), &phi.v12()})
            for (auto& x : *v) x = std::abs(x);
        Field zf = gvtest::random_field(g, phi.m(), rng, 0.0, 2.0);
        Field wf = zf;
        for (auto& x : wf.values()) x *= U(rng);
        const auto r = check_comparison(zf, wf, phi, g);
        CHECK(r.passed);
        CHECK(r.worst_margin >= -1e-10);
    }
}
