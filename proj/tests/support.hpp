#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gvc/grid.hpp"
#include "gvc/gvlinalg.hpp"
#include "gvc/problem.hpp"

namespace gvtest {

using namespace gvc;

inline double sech2(double x) {
    const double c = std::cosh(x);
    return 1.0 / (c * c);
}

// n = 2 with every control block entering every mapping, nonlinearly where
// it matters. Lipschitz constants hold on the box [-1,1] for all controls.
inline ProblemDef rich_problem() {
    ProblemDef p;
    p.name = "rich";
    p.n = 2;
    p.p1 = p.p2 = p.p12 = 1;
    p.box1 = p.box2 = p.box12 = Box::uniform(1, -1.0, 1.0);

    p.f0 = [](double s, double t, const ControlView& u, Out o) {
        o[0] = std::sin(u.u1[0]) + 0.5 * u.u12[0];
        o[1] = s * t + 0.3 * u.u2[0] * u.u2[0];
    };
    p.du_f0 = [](double, double, const ControlView& u, const ControlJacobian& J) {
        J.u1[0] = std::cos(u.u1[0]);
        J.u2[1] = 0.6 * u.u2[0];
        J.u12[0] = 0.5;
    };

    p.f1 = [](double, double, double sig, Vec y, const ControlView& u, Out o) {
        o[0] = 0.4 * std::tanh(y[0]) + 0.2 * sig * u.u1[0];
        o[1] = 0.3 * y[1] + 0.1 * u.u12[0] * y[0];
    };
    p.dy_f1 = [](double, double, double, Vec y, const ControlView& u, Out o) {
        o[0] = 0.4 * sech2(y[0]);
        o[2] = 0.1 * u.u12[0];
        o[3] = 0.3;
    };
    p.du_f1 = [](double, double, double sig, Vec y, const ControlView&, const ControlJacobian& J) {
        J.u1[0] = 0.2 * sig;
        J.u12[1] = 0.1 * y[0];
    };

    p.f2 = [](double, double t, double, Vec y, const ControlView& u, Out o) {
        o[0] = 0.2 * y[1] + 0.3 * u.u2[0];
        o[1] = 0.25 * std::sin(y[0]) + 0.1 * t * u.u12[0];
    };
    p.dy_f2 = [](double, double, double, Vec y, const ControlView&, Out o) {
        o[1] = 0.2;
        o[2] = 0.25 * std::cos(y[0]);
    };
    p.du_f2 = [](double, double t, double, Vec, const ControlView&, const ControlJacobian& J) {
        J.u2[0] = 0.3;
        J.u12[1] = 0.1 * t;
    };

    p.f12 = [](double s, double, double sig, double, Vec y, const ControlView& u, Out o) {
        o[0] = 0.3 * std::sin(y[1]) + 0.2 * u.u12[0] + 0.1 * u.u1[0] * u.u2[0];
        o[1] = 0.2 * std::tanh(y[0] + y[1]) + 0.1 * s * sig * u.u12[0] * u.u12[0];
    };
    p.dy_f12 = [](double, double, double, double, Vec y, const ControlView&, Out o) {
        o[1] = 0.3 * std::cos(y[1]);
        o[2] = o[3] = 0.2 * sech2(y[0] + y[1]);
    };
    p.du_f12 = [](double s, double, double sig, double, Vec, const ControlView& u,
                  const ControlJacobian& J) {
        J.u1[0] = 0.1 * u.u2[0];
        J.u2[0] = 0.1 * u.u1[0];
        J.u12[0] = 0.2;
        J.u12[1] = 0.2 * s * sig * u.u12[0];
    };

    p.F0 = [](Vec y, const ControlView& u) {
        return y[0] * y[0] + 0.5 * y[1] * u.u1[0] + 0.2 * u.u2[0] * u.u2[0] + 0.3 * u.u12[0] * y[0];
    };
    p.grad_F0 = [](Vec y, const ControlView& u, Out gy, const ControlGradient& gu) {
        gy[0] = 2.0 * y[0] + 0.3 * u.u12[0];
        gy[1] = 0.5 * u.u1[0];
        gu.u1[0] = 0.5 * y[1];
        gu.u2[0] = 0.4 * u.u2[0];
        gu.u12[0] = 0.3 * y[0];
    };
    p.F1 = [](double s, Vec y, const ControlView& u) {
        return 0.5 * (y[0] - s) * (y[0] - s) + 0.1 * u.u1[0] * y[1] + 0.2 * u.u12[0] * u.u12[0];
    };
    p.grad_F1 = [](double s, Vec y, const ControlView& u, Out gy, const ControlGradient& gu) {
        gy[0] = y[0] - s;
        gy[1] = 0.1 * u.u1[0];
        gu.u1[0] = 0.1 * y[1];
        gu.u12[0] = 0.4 * u.u12[0];
    };
    p.F2 = [](double t, Vec y, const ControlView& u) {
        return 0.5 * y[1] * y[1] + 0.3 * t * u.u2[0] + 0.1 * u.u12[0] * y[0];
    };
    p.grad_F2 = [](double t, Vec y, const ControlView& u, Out gy, const ControlGradient& gu) {
        gy[0] = 0.1 * u.u12[0];
        gy[1] = y[1];
        gu.u2[0] = 0.3 * t;
        gu.u12[0] = 0.1 * y[0];
    };
    p.F12 = [](double s, double t, Vec y, const ControlView& u) {
        const double e = y[0] - s * t;
        return 0.5 * e * e + 0.1 * y[1] * y[1] +
               0.05 * (u.u1[0] * u.u1[0] + u.u2[0] * u.u2[0] + u.u12[0] * u.u12[0]) +
               0.1 * u.u12[0] * y[1];
    };
    p.grad_F12 = [](double s, double t, Vec y, const ControlView& u, Out gy,
                    const ControlGradient& gu) {
        gy[0] = y[0] - s * t;
        gy[1] = 0.2 * y[1] + 0.1 * u.u12[0];
        gu.u1[0] = 0.1 * u.u1[0];
        gu.u2[0] = 0.1 * u.u2[0];
        gu.u12[0] = 0.1 * u.u12[0] + 0.1 * y[1];
    };

    p.L1 = 0.4;
    p.L2 = 0.25;
    p.L12 = 0.4;
    return p;
}

inline ControlField random_controls(const ProblemDef& p, const Grid& g, std::mt19937_64& rng,
                                    double amp = 0.8) {
    std::uniform_real_distribution<double> U(-amp, amp);
    ControlField u = make_controls(p, g);
    for (auto& v : u.u1) v = U(rng);
    for (auto& v : u.u2) v = U(rng);
    for (auto& v : u.u12.values()) v = U(rng);
    return u;
}

inline ControlField random_direction(const ControlField& like, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ControlField d = like;
    for (auto& v : d.u1) v = U(rng);
    for (auto& v : d.u2) v = U(rng);
    for (auto& v : d.u12.values()) v = U(rng);
    return d;
}

inline Field random_field(const Grid& g, int dim, std::mt19937_64& rng, double lo = -1.0,
                          double hi = 1.0) {
    std::uniform_real_distribution<double> U(lo, hi);
    Field f = Field::on(g, dim);
    for (auto& v : f.values()) v = U(rng);
    return f;
}

// Independent entries in [-C, C] on the causal region.
inline KernelTriple random_triple(const Grid& g, int m, std::mt19937_64& rng, double C = 1.0) {
    std::uniform_real_distribution<double> U(-C, C);
    auto fill = [&](std::span<double> o) {
        for (auto& v : o) v = U(rng);
    };
    return sample_kernels(
        g, m, [&](double, double, double, std::span<double> o) { fill(o); },
        [&](double, double, double, std::span<double> o) { fill(o); },
        [&](double, double, double, double, std::span<double> o) { fill(o); });
}

// Smooth kernels: random combinations of a few low-frequency modes, |K| <= C.
inline KernelTriple smooth_triple(const Grid& g, std::mt19937_64& rng, double C = 1.0) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> c(12);
    for (auto& v : c) v = U(rng) * C / 4.0;
    return sample_kernels(
        g, 1,
        [c](double s, double t, double sig, std::span<double> o) {
            o[0] = c[0] + c[1] * std::cos(s - sig) + c[2] * t + c[3] * std::sin(2.0 * sig);
        },
        [c](double s, double t, double tau, std::span<double> o) {
            o[0] = c[4] + c[5] * std::sin(t + tau) + c[6] * s + c[7] * std::cos(3.0 * tau);
        },
        [c](double s, double t, double sig, double tau, std::span<double> o) {
            o[0] = c[8] + c[9] * std::cos(s * tau) + c[10] * sig * t + c[11] * std::sin(sig + tau);
        });
}

// Linear dynamics with smooth random matrix kernels, a scalar distributed
// control entering f12, and quadratic tracking costs on every term.
inline ProblemDef random_linear_problem(std::mt19937_64& rng, int n = 2) {
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    const int nn = n * n;
    std::vector<double> a(nn), b(nn), c(nn), d(nn), r(n);
    for (auto* v : {&a, &b, &c, &d}) {
        for (auto& x : *v) x = U(rng);
    }
    for (auto& x : r) x = U(rng);

    ProblemDef p;
    p.name = "random_linear";
    p.n = n;
    p.p12 = 1;
    p.f0 = [n](double s, double t, const ControlView&, Out o) {
        for (int k = 0; k < n; ++k) o[k] = std::cos(s + k * t);
    };
    p.f1 = [=](double s, double t, double sig, Vec y, const ControlView&, Out o) {
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) o[i] += a[i * n + k] * std::cos(s - sig + t * k) * y[k];
        }
    };
    p.dy_f1 = [=](double s, double t, double sig, Vec, const ControlView&, Out o) {
        for (int i = 0; i < nn; ++i) o[i] = a[i] * std::cos(s - sig + t * (i % n));
    };
    p.f2 = [=](double s, double t, double tau, Vec y, const ControlView&, Out o) {
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) o[i] += b[i * n + k] * std::sin(1.0 + t * tau + s * k) * y[k];
        }
    };
    p.dy_f2 = [=](double s, double t, double tau, Vec, const ControlView&, Out o) {
        for (int i = 0; i < nn; ++i) o[i] = b[i] * std::sin(1.0 + t * tau + s * (i % n));
    };
    p.f12 = [=](double s, double t, double sig, double tau, Vec y, const ControlView& u, Out o) {
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) o[i] += c[i * n + k] * std::cos(s * tau - t * sig + k) * y[k];
            o[i] += d[i] * u.u12[0];
        }
    };
    p.dy_f12 = [=](double s, double t, double sig, double tau, Vec, const ControlView&, Out o) {
        for (int i = 0; i < nn; ++i) o[i] = c[i] * std::cos(s * tau - t * sig + (i % n));
    };
    p.du_f12 = [=](double, double, double, double, Vec, const ControlView&, const ControlJacobian& J) {
        for (int i = 0; i < n; ++i) J.u12[i] = d[i];
    };
    p.F0 = [=](Vec y, const ControlView&) {
        double v = 0.0;
        for (int k = 0; k < n; ++k) v += r[k] * y[k];
        return v;
    };
    p.grad_F0 = [=](Vec, const ControlView&, Out gy, const ControlGradient&) {
        for (int k = 0; k < n; ++k) gy[k] = r[k];
    };
    p.F1 = [=](double s, Vec y, const ControlView&) { return 0.5 * (y[0] - s) * (y[0] - s); };
    p.grad_F1 = [](double s, Vec y, const ControlView&, Out gy, const ControlGradient&) { gy[0] = y[0] - s; };
    p.F2 = [=](double t, Vec y, const ControlView&) { return 0.5 * y[n - 1] * y[n - 1] * t; };
    p.grad_F2 = [=](double t, Vec y, const ControlView&, Out gy, const ControlGradient&) {
        gy[n - 1] = y[n - 1] * t;
    };
    p.F12 = [=](double s, double t, Vec y, const ControlView& u) {
        double v = 0.5 * u.u12[0] * u.u12[0];
        for (int k = 0; k < n; ++k) v += 0.5 * (y[k] - s * t) * (y[k] - s * t);
        return v;
    };
    p.grad_F12 = [=](double s, double t, Vec y, const ControlView& u, Out gy, const ControlGradient& gu) {
        for (int k = 0; k < n; ++k) gy[k] = y[k] - s * t;
        gu.u12[0] = u.u12[0];
    };
    // Row sums of |coefficients| bound the max-norm Lipschitz constants.
    auto rowmax = [n](const std::vector<double>& m) {
        double best = 0.0;
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += std::abs(m[i * n + k]);
            best = std::max(best, acc);
        }
        return best;
    };
    p.L1 = rowmax(a);
    p.L2 = rowmax(b);
    p.L12 = rowmax(c);
    p.indep_f0 = p.indep_f1 = p.indep_f2 = {true, true, true};
    return p;
}

// sum_k (x y)^k / (k!)^2, summed until terms vanish.
inline double bessel_series(double x, double y) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= x * y / (double(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

}  // namespace gvtest
