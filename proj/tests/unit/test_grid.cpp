#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gvc/error.hpp"
#include "gvc/grid.hpp"

using namespace gvc;

TEST_CASE("make_grid builds uniform nodes") {
    const Grid g = make_grid(1, 1, 2, 2);
    CHECK(g.s == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(g.t == std::vector<double>{0.0, 0.5, 1.0});

    const Grid h = make_grid(2, 1, 4, 2);
    CHECK(h.hs == 0.5);
    CHECK(h.ht == 0.5);
    CHECK(h.s.back() == 2.0);
    CHECK(h.ns() == 5);
    CHECK(h.nt() == 3);
}

TEST_CASE("make_grid rejects degenerate extents") {
    CHECK_THROWS_AS(make_grid(1, 1, 0, 2), InvalidArgument);
    CHECK_THROWS_AS(make_grid(0, 1, 2, 2), InvalidArgument);
    CHECK_THROWS_AS(make_grid(1, -1, 2, 2), InvalidArgument);
    CHECK_THROWS_AS(make_grid(1, 1, 2, -3), InvalidArgument);
}

TEST_CASE("trap_weights") {
    CHECK(trap_weights(2, 0.5) == std::vector<double>{0.25, 0.5, 0.25});
    CHECK(trap_weights(1, 1.0) == std::vector<double>{0.5, 0.5});
    const auto w = trap_weights(4, 0.25);
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(trap_weights(0, 1.0), InvalidArgument);
}

TEST_CASE("cum_integral_s examples") {
    const Grid g = make_grid(1, 1, 2, 3);
    const Field one = Field::on(g, 1, 1.0);
    const Field I = cum_integral_s(one, g);
    for (int j = 0; j < g.nt(); ++j) {
        CHECK(I.at(0, j) == 0.0);
        CHECK(I.at(1, j) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(I.at(2, j) == doctest::Approx(1.0).epsilon(1e-15));
    }

    const Grid g4 = make_grid(1, 1, 4, 2);
    Field sig = Field::on(g4, 1);
    for (int i = 0; i < g4.ns(); ++i)
        for (int j = 0; j < g4.nt(); ++j) sig.at(i, j) = g4.s[i];
    CHECK(cum_integral_s(sig, g4).at(4, 1) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(sup_norm(cum_integral_s(Field::on(g4, 2), g4)) == 0.0);
}

TEST_CASE("cum_integral_t and cum_integral_st agree with composition") {
    const Grid g = make_grid(1.5, 0.7, 5, 7);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    Field f = Field::on(g, 2);
    for (auto& v : f.values()) v = U(rng);
    const Field ts = cum_integral_t(cum_integral_s(f, g), g);
    const Field st = cum_integral_s(cum_integral_t(f, g), g);
    const Field both = cum_integral_st(f, g);
    CHECK(sup_diff(ts, both) <= 1e-14);
    CHECK(sup_diff(st, both) <= 1e-14);

    // t-integral of t over [0, B]
    Field tf = Field::on(g, 1);
    for (int i = 0; i < g.ns(); ++i)
        for (int j = 0; j < g.nt(); ++j) tf.at(i, j) = g.t[j];
    CHECK(cum_integral_t(tf, g).at(3, g.Nt) == doctest::Approx(0.5 * 0.7 * 0.7).epsilon(1e-14));
}

TEST_CASE("weighted_inner of ones is the area") {
    const Grid g = make_grid(2, 3, 4, 6);
    const Field one = Field::on(g, 1, 1.0);
    CHECK(weighted_inner(one, one, g) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("adjoint weights transpose causal weights") {
    const int n = 7;
    const double h = 0.3;
    const auto w = trap_weights(n, h);
    for (int i = 0; i <= n; ++i) {
        for (int a = 0; a <= n; ++a) {
            CHECK(w[a] * adjoint_weight(a, i, h, n) ==
                  doctest::Approx(w[i] * causal_weight(i, a, h)).epsilon(1e-15));
        }
    }
    // Interior rows are the trapezoid rule over [x_a, x_n].
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) sum += adjoint_weight(2, i, h, n);
    CHECK(sum == doctest::Approx((n - 2) * h).epsilon(1e-14));
}

TEST_CASE("Field arithmetic") {
    Field a(2, 3, 2, 1.0), b(2, 3, 2, 2.0);
    const Field c = a + b;
    CHECK(c.at(1, 2, 1) == 3.0);
    CHECK(sup_diff(c - b, a) == 0.0);
    CHECK((2.0 * b).at(0, 0) == 4.0);
    CHECK(a.same_shape(b));
    CHECK_FALSE(a.same_shape(Field(2, 3, 1)));
}
