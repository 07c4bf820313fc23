#include "gvc/demos.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "gvc/error.hpp"
#include "gvc/forward.hpp"
#include "gvc/gvlinalg.hpp"

namespace gvc {

namespace {

int node(double x, double h, int n) {
    return std::clamp(static_cast<int>(std::lround(x / h)), 0, n);
}

double gaussian(double x, double amp, double c, double w) {
    const double z = (x - c) / w;
    return amp * std::exp(-0.5 * z * z);
}

double gaussian_dx(double x, double amp, double c, double w) {
    return -gaussian(x, amp, c, w) * (x - c) / (w * w);
}

// d/dx of samples f[0..n] with spacing h; second order everywhere when n >= 2.
std::vector<double> diff(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size()) - 1;
    std::vector<double> d(f.size(), 0.0);
    if (n < 1) return d;
    if (n == 1) {
        d[0] = d[1] = (f[1] - f[0]) / h;
        return d;
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
    for (int k = 1; k < n; ++k) d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    return d;
}

ProblemDef scalar_volterra_in_s(std::string name) {
    ProblemDef p;
    p.name = std::move(name);
    p.n = 1;
    p.f1 = [](double, double, double, Vec y, const ControlView&, Out out) { out[0] = y[0]; };
    p.dy_f1 = [](double, double, double, Vec, const ControlView&, Out out) { out[0] = 1.0; };
    p.L1 = 1.0;
    p.indep_f0 = p.indep_f1 = p.indep_f2 = {true, true, true};
    return p;
}

}  // namespace

ProblemDef make_manufactured_linear() {
    ProblemDef p = scalar_volterra_in_s("manufactured_linear");
    p.f0 = [](double s, double t, const ControlView&, Out out) { out[0] = s * t - 0.5 * t * s * s; };
    return p;
}

ProblemDef make_exponential() {
    ProblemDef p = scalar_volterra_in_s("exponential");
    p.f0 = [](double, double, const ControlView&, Out out) { out[0] = 1.0; };
    return p;
}

SyntheticLq make_synthetic_lq(const Grid& g, std::uint64_t seed, const LqOptions& opts) {
    if (!(opts.rho >= 0.0)) throw InvalidArgument("make_synthetic_lq: rho must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(0.5, 1.5);
    const double c1 = opts.scale * coef(rng), c2 = opts.scale * coef(rng), c3 = opts.scale * coef(rng);
    const double pi = std::numbers::pi;

    SyntheticLq out;
    ProblemDef& p = out.problem;
    LqDescriptor& d = out.optimum;
    d.kind = opts.kind;
    d.a = opts.a;
    d.rho = opts.kind == LqKind::regularized ? opts.rho : 0.0;

    p.n = 1;
    p.p12 = 1;
    p.L12 = std::abs(opts.a);
    p.indep_f0 = p.indep_f1 = p.indep_f2 = {true, true, true};
    const double a = opts.a;
    p.f12 = [a](double, double, double, double, Vec y, const ControlView& u, Out o) {
        o[0] = a * y[0] + u.u12[0];
    };
    p.dy_f12 = [a](double, double, double, double, Vec, const ControlView&, Out o) { o[0] = a; };
    p.du_f12 = [](double, double, double, double, Vec, const ControlView&, const ControlJacobian& J) {
        J.u12[0] = 1.0;
    };

    const double hs = g.hs, ht = g.ht;
    const int Ns = g.Ns, Nt = g.Nt;

    if (opts.kind == LqKind::decoupled) {
        p.name = "decoupled_quadratic";
        Field c = Field::on(g, 1);
        for (int i = 0; i < g.ns(); ++i) {
            for (int j = 0; j < g.nt(); ++j) {
                c.at(i, j) = c1 * std::sin(pi * g.s[i] / g.A) * std::cos(pi * g.t[j] / g.B) + 0.5 * c2;
            }
        }
        auto cp = std::make_shared<const Field>(c);
        p.F12 = [cp, hs, ht, Ns, Nt](double s, double t, Vec, const ControlView& u) {
            const double e = u.u12[0] - cp->at(node(s, hs, Ns), node(t, ht, Nt));
            return 0.5 * e * e;
        };
        p.grad_F12 = [cp, hs, ht, Ns, Nt](double s, double t, Vec, const ControlView& u, Out,
                                          const ControlGradient& gu) {
            gu.u12[0] = u.u12[0] - cp->at(node(s, hs, Ns), node(t, ht, Nt));
        };
        d.u_star = c;
        d.J_star = 0.0;
        return out;
    }

    auto yref = std::make_shared<Field>(Field::on(g, 1));
    const double rho = d.rho;
    p.F12 = [yref, rho, hs, ht, Ns, Nt](double s, double t, Vec y, const ControlView& u) {
        const double e = y[0] - yref->at(node(s, hs, Ns), node(t, ht, Nt));
        return 0.5 * e * e + 0.5 * rho * u.u12[0] * u.u12[0];
    };
    p.grad_F12 = [yref, rho, hs, ht, Ns, Nt](double s, double t, Vec y, const ControlView& u, Out gy,
                                             const ControlGradient& gu) {
        gy[0] = y[0] - yref->at(node(s, hs, Ns), node(t, ht, Nt));
        gu.u12[0] = rho * u.u12[0];
    };

    if (opts.kind == LqKind::regularized) {
        p.name = "synthetic_lq";
        for (int i = 0; i < g.ns(); ++i) {
            for (int j = 0; j < g.nt(); ++j) {
                const double s = g.s[i], t = g.t[j];
                yref->at(i, j) = c1 * std::sin(pi * s / g.A) * std::sin(pi * t / g.B) + c2 * s * t;
            }
        }
    } else {
        p.name = "lq_inverse_crime";
        ControlField ut = make_controls(p, g);
        for (int i = 0; i < g.ns(); ++i) {
            for (int j = 0; j < g.nt(); ++j) {
                const double s = g.s[i] / g.A, t = g.t[j] / g.B;
                ut.u12.at(i, j) = c1 + c2 * std::cos(pi * s) * t + c3 * s * s;
            }
        }
        *yref = solve_forward(p, ut, g).y;
        d.u_star = ut.u12;
        d.J_star = 0.0;
    }
    d.y_ref = *yref;
    return out;
}

MemoryKernel exponential_kernel(double kappa, double lambda) {
    MemoryKernel k;
    k.K = [kappa, lambda](double, double t, double tau) { return kappa * std::exp(-lambda * (t - tau)); };
    k.K_t = [kappa, lambda](double, double t, double tau) {
        return -lambda * kappa * std::exp(-lambda * (t - tau));
    };
    return k;
}

namespace {

ChromatographyParams with_default_profiles(ChromatographyParams p) {
    if (!p.inlet) p.inlet = [](double t) { return gaussian(t, 1.0, 0.25, 0.08); };
    if (!p.inlet_dt) p.inlet_dt = [](double t) { return gaussian_dx(t, 1.0, 0.25, 0.08); };
    if (!p.initial) p.initial = [](double s) { return gaussian(s, 0.2, 0.5, 0.15); };
    if (!p.initial_ds) p.initial_ds = [](double s) { return gaussian_dx(s, 0.2, 0.5, 0.15); };
    if (!p.phi0) p.phi0 = [](double s, double t) { return gaussian(t - s / 1.5, 0.8, 0.25, 0.1); };
    return p;
}

void check_params(const ChromatographyParams& p) {
    if (!(p.beta > 0.0)) throw InvalidArgument("chromatography: beta must be > 0");
    if (!(p.mu_reg >= 0.0)) throw InvalidArgument("chromatography: mu_reg must be >= 0");
    if (!(p.v_lo > 0.0 && p.v_lo <= p.v_ref && p.v_ref <= p.v_hi)) {
        throw InvalidArgument("chromatography: need 0 < v_lo <= v_ref <= v_hi");
    }
    if (!p.kernel.K || !p.kernel.K_t) throw InvalidArgument("chromatography: memory kernel missing");
    if (!(p.resolvent_tol > 0.0)) throw InvalidArgument("chromatography: resolvent_tol must be > 0");
}

}  // namespace

ChromatographyTables chromatography_tables(const Grid& g, const ChromatographyParams& prm) {
    check_params(prm);
    const int ns = g.ns(), nt = g.nt();
    ChromatographyTables T;
    T.ns = ns;
    T.nt = nt;
    const std::size_t n2 = std::size_t(ns) * nt, n3 = n2 * nt;
    T.l0.assign(n2, 0.0);
    T.l0_t.assign(n2, 0.0);
    T.alpha0.assign(n2, 0.0);
    T.alpha2.assign(n2, 0.0);
    T.l1.assign(n3, 0.0);
    T.l1_t.assign(n3, 0.0);
    T.a3_tilde.assign(n3, 0.0);
    T.a3_tilde_t.assign(n3, 0.0);
    auto at2 = [nt](int i, int j) { return std::size_t(i) * nt + j; };
    auto at3 = [nt](int i, int j, int b) { return (std::size_t(i) * nt + j) * nt + b; };

    // y = l0 phi + int k y  with  k = K_t / (beta + K(s,t,t)).
    KernelTriple k = KernelTriple::on(g, 1);
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
            const double den = prm.beta + prm.kernel.K(g.s[i], g.t[j], g.t[j]);
            if (!(den > 0.0)) {
                throw InvalidArgument("chromatography: beta + K(s,t,t) <= 0 at a grid node");
            }
            T.l0[at2(i, j)] = prm.beta / den;
            for (int b = 0; b <= j; ++b) *k.k2(i, j, b) = prm.kernel.K_t(g.s[i], g.t[j], g.t[b]) / den;
        }
    }
    const Resolvent R = resolvent(k, g, prm.resolvent_tol, ComposeRule::trapezoid);
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
            for (int b = 0; b <= j; ++b) T.l1[at3(i, j, b)] = *R.R.k2(i, j, b) * T.l0[at2(i, b)];
        }
    }

    std::vector<double> col;
    for (int i = 0; i < ns; ++i) {
        col.assign(nt, 0.0);
        for (int j = 0; j < nt; ++j) col[j] = T.l0[at2(i, j)];
        const auto dcol = diff(col, g.ht);
        for (int j = 0; j < nt; ++j) T.l0_t[at2(i, j)] = dcol[j];
        // l1_t along t for each fixed tau; a lone diagonal node borrows its neighbour.
        for (int b = 0; b < nt; ++b) {
            col.clear();
            for (int j = b; j < nt; ++j) col.push_back(T.l1[at3(i, j, b)]);
            if (col.size() < 2) {
                T.l1_t[at3(i, b, b)] = b > 0 ? T.l1_t[at3(i, b - 1, b - 1)] : 0.0;
                continue;
            }
            const auto d = diff(col, g.ht);
            for (int j = b; j < nt; ++j) T.l1_t[at3(i, j, b)] = d[j - b];
        }
    }

    const double a3 = prm.beta / prm.v_ref;
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
            T.alpha0[at2(i, j)] = prm.beta * (T.l0_t[at2(i, j)] + T.l1[at3(i, j, j)]);
            T.alpha2[at2(i, j)] = -prm.beta * (1.0 - T.l0[at2(i, j)]);
            for (int b = 0; b <= j; ++b) {
                double acc = 0.0;
                for (int c = b; c <= j; ++c) acc += causal_weight(j - b, c - b, g.ht) * T.l1_t[at3(i, c, b)];
                T.a3_tilde[at3(i, j, b)] = a3 * acc;
                T.a3_tilde_t[at3(i, j, b)] = a3 * T.l1_t[at3(i, j, b)];
            }
        }
    }
    return T;
}

ProblemDef make_chromatography(const Grid& g, const ChromatographyParams& params) {
    const ChromatographyParams prm = with_default_profiles(params);
    auto T = std::make_shared<const ChromatographyTables>(chromatography_tables(g, prm));
    const int nt = g.nt(), Ns = g.Ns, Nt = g.Nt;
    const double hs = g.hs, ht = g.ht;
    auto I = [hs, Ns](double s) { return node(s, hs, Ns); };
    auto J = [ht, Nt](double t) { return node(t, ht, Nt); };
    auto at2 = [nt](int i, int j) { return std::size_t(i) * nt + j; };
    auto at3 = [nt](int i, int j, int b) { return (std::size_t(i) * nt + j) * nt + b; };

    ProblemDef p;
    p.name = "chromatography";
    p.n = 3;
    p.p12 = 1;
    p.indep_f0 = {true, true, true};
    p.indep_f1 = {true, true, false};
    p.indep_f2 = {true, true, false};
    p.box12 = Box::uniform(1, prm.v_lo, prm.v_hi);

    const double phi00 = prm.inlet(0.0);
    p.f0 = [prm, phi00](double s, double t, const ControlView&, Out o) {
        o[0] = prm.initial(s) + prm.inlet(t) - phi00;
        o[1] = prm.initial_ds(s);
        o[2] = prm.inlet_dt(t);
    };

    // phi_t row: int_0^s (a0 phi + a2 phi_t)(sigma, t) dsigma
    p.f1 = [=](double, double t, double sig, Vec y, const ControlView& u, Out o) {
        const std::size_t k = at2(I(sig), J(t));
        o[2] = (T->alpha0[k] * y[0] + T->alpha2[k] * y[2]) / u.u12[0];
    };
    p.dy_f1 = [=](double, double t, double sig, Vec, const ControlView& u, Out o) {
        const std::size_t k = at2(I(sig), J(t));
        o[2 * 3 + 0] = T->alpha0[k] / u.u12[0];
        o[2 * 3 + 2] = T->alpha2[k] / u.u12[0];
    };
    p.du_f1 = [=](double, double t, double sig, Vec y, const ControlView& u, const ControlJacobian& Jm) {
        const std::size_t k = at2(I(sig), J(t));
        const double v = u.u12[0];
        Jm.u12[2] = -(T->alpha0[k] * y[0] + T->alpha2[k] * y[2]) / (v * v);
    };

    // phi_s row: int_0^t (a0 phi + a2 phi_t + a3~(t, s, tau) phi)(s, tau) dtau
    p.f2 = [=](double s, double t, double tau, Vec y, const ControlView& u, Out o) {
        const int i = I(s), b = J(tau);
        const std::size_t k = at2(i, b);
        o[1] = (T->alpha0[k] * y[0] + T->alpha2[k] * y[2]) / u.u12[0] + T->a3_tilde[at3(i, J(t), b)] * y[0];
    };
    p.dy_f2 = [=](double s, double t, double tau, Vec, const ControlView& u, Out o) {
        const int i = I(s), b = J(tau);
        const std::size_t k = at2(i, b);
        o[1 * 3 + 0] = T->alpha0[k] / u.u12[0] + T->a3_tilde[at3(i, J(t), b)];
        o[1 * 3 + 2] = T->alpha2[k] / u.u12[0];
    };
    p.du_f2 = [=](double s, double, double tau, Vec y, const ControlView& u, const ControlJacobian& Jm) {
        const std::size_t k = at2(I(s), J(tau));
        const double v = u.u12[0];
        Jm.u12[1] = -(T->alpha0[k] * y[0] + T->alpha2[k] * y[2]) / (v * v);
    };

    // phi row: (a0 phi + a2 phi_t + a3~(t, sigma, tau) phi); phi_t row: a3~_t(t, sigma, tau) phi
    p.f12 = [=](double, double t, double sig, double tau, Vec y, const ControlView& u, Out o) {
        const int i = I(sig), b = J(tau);
        const std::size_t k = at2(i, b), k3 = at3(i, J(t), b);
        o[0] = (T->alpha0[k] * y[0] + T->alpha2[k] * y[2]) / u.u12[0] + T->a3_tilde[k3] * y[0];
        o[2] = T->a3_tilde_t[k3] * y[0];
    };
    p.dy_f12 = [=](double, double t, double sig, double tau, Vec, const ControlView& u, Out o) {
        const int i = I(sig), b = J(tau);
        const std::size_t k = at2(i, b), k3 = at3(i, J(t), b);
        o[0] = T->alpha0[k] / u.u12[0] + T->a3_tilde[k3];
        o[2] = T->alpha2[k] / u.u12[0];
        o[2 * 3 + 0] = T->a3_tilde_t[k3];
    };
    p.du_f12 = [=](double, double, double sig, double tau, Vec y, const ControlView& u,
                   const ControlJacobian& Jm) {
        const std::size_t k = at2(I(sig), J(tau));
        const double v = u.u12[0];
        Jm.u12[0] = -(T->alpha0[k] * y[0] + T->alpha2[k] * y[2]) / (v * v);
    };

    const double mu = prm.mu_reg;
    auto phi0 = prm.phi0;
    p.F12 = [phi0, mu](double s, double t, Vec y, const ControlView& u) {
        const double e = y[0] - phi0(s, t);
        return e * e + mu * u.u12[0] * u.u12[0];
    };
    p.grad_F12 = [phi0, mu](double s, double t, Vec y, const ControlView& u, Out gy,
                            const ControlGradient& gu) {
        gy[0] = 2.0 * (y[0] - phi0(s, t));
        gu.u12[0] = 2.0 * mu * u.u12[0];
    };

    // Max-norm Lipschitz constants over the grid, worst case at v = v_lo.
    const double vinv = 1.0 / prm.v_lo;
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < nt; ++j) {
            const std::size_t k = at2(i, j);
            const double local = (std::abs(T->alpha0[k]) + std::abs(T->alpha2[k])) * vinv;
            p.L1 = std::max(p.L1, local);
            for (int jt = j; jt < nt; ++jt) {
                const std::size_t k3 = at3(i, jt, j);
                p.L2 = std::max(p.L2, local + std::abs(T->a3_tilde[k3]));
                p.L12 = std::max({p.L12, local + std::abs(T->a3_tilde[k3]), std::abs(T->a3_tilde_t[k3])});
            }
        }
    }
    return p;
}

const std::vector<std::string>& demo_names() {
    static const std::vector<std::string> names{"manufactured_linear", "exponential",
                                                "synthetic_lq",        "lq_inverse_crime",
                                                "decoupled_quadratic", "chromatography"};
    return names;
}

Demo make_demo(const std::string& name, const Grid& g, std::uint64_t seed,
               const ChromatographyParams& chrom, const LqOptions& lq_opts) {
    auto from_lq = [&](LqKind kind) {
        LqOptions o = lq_opts;
        o.kind = kind;
        SyntheticLq lq = make_synthetic_lq(g, seed, o);
        Demo d{std::move(lq.problem), {}, std::move(lq.optimum)};
        d.u0 = make_controls(d.problem, g);
        return d;
    };
    if (name == "manufactured_linear" || name == "exponential") {
        Demo d;
        d.problem = name == "exponential" ? make_exponential() : make_manufactured_linear();
        d.u0 = make_controls(d.problem, g);
        return d;
    }
    if (name == "synthetic_lq") return from_lq(LqKind::regularized);
    if (name == "lq_inverse_crime") return from_lq(LqKind::inverse_crime);
    if (name == "decoupled_quadratic") return from_lq(LqKind::decoupled);
    if (name == "chromatography") {
        Demo d;
        d.problem = make_chromatography(g, chrom);
        d.u0 = make_controls(d.problem, g);
        std::fill(d.u0.u12.values().begin(), d.u0.u12.values().end(), chrom.v_ref);
        return d;
    }
    throw InvalidArgument("unknown problem '" + name + "'");
}

}  // namespace gvc
