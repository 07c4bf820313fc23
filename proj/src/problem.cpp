#include "gvc/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "eval.hpp"
#include "gvc/error.hpp"

namespace gvc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_box(const Box& b, int p, const char* name) {
    if (static_cast<int>(b.lo.size()) != p || static_cast<int>(b.hi.size()) != p) {
        throw InvalidArgument(std::string("controls: box for ") + name + " has wrong size");
    }
    for (int k = 0; k < p; ++k) {
        if (std::isnan(b.lo[k]) || std::isnan(b.hi[k]) || b.lo[k] > b.hi[k]) {
            throw InvalidArgument(std::string("controls: box for ") + name + " has lo > hi");
        }
    }
}

void check_block(std::span<const double> v, const Box& b, double tol, const char* name) {
    const std::size_t p = b.lo.size();
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double x = v[k];
        if (!std::isfinite(x)) {
            throw InvalidArgument(std::string("controls: non-finite sample in ") + name);
        }
        if (x < b.lo[k % p] - tol || x > b.hi[k % p] + tol) {
            throw InvalidArgument(std::string("controls: sample outside box in ") + name);
        }
    }
}

bool is_empty(const Box& b) { return b.lo.empty() && b.hi.empty(); }

Box or_default(Box b, const Box& fallback, int p) {
    if (!is_empty(b)) return b;
    return is_empty(fallback) ? Box::unbounded(p) : fallback;
}

void clamp_block(std::span<double> v, const Box& b) {
    const std::size_t p = b.lo.size();
    if (p == 0) return;
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::clamp(v[k], b.lo[k % p], b.hi[k % p]);
}

}  // namespace

Box Box::unbounded(int p) { return Box{std::vector<double>(p, -kInf), std::vector<double>(p, kInf)}; }

Box Box::uniform(int p, double lo, double hi) {
    return Box{std::vector<double>(p, lo), std::vector<double>(p, hi)};
}

bool Box::bounded() const {
    for (std::size_t k = 0; k < lo.size(); ++k) {
        if (!std::isfinite(lo[k]) || !std::isfinite(hi[k])) return false;
    }
    return true;
}

void check_problem(const ProblemDef& p) {
    if (p.n < 1) throw InvalidArgument("problem: state dimension must be >= 1");
    if (p.p1 < 0 || p.p2 < 0 || p.p12 < 0) {
        throw InvalidArgument("problem: negative control dimension");
    }
    if (!(p.L1 >= 0.0) || !(p.L2 >= 0.0) || !(p.L12 >= 0.0)) {
        throw InvalidArgument("problem: Lipschitz constants must be >= 0");
    }
}

ControlField make_controls(const ProblemDef& p, const Grid& g, Box box1, Box box2, Box box12) {
    check_problem(p);
    ControlField u;
    u.p1 = p.p1;
    u.p2 = p.p2;
    u.p12 = p.p12;
    u.u1.assign(std::size_t(g.ns()) * p.p1, 0.0);
    u.u2.assign(std::size_t(g.nt()) * p.p2, 0.0);
    u.u12 = Field::on(g, p.p12);
    u.box1 = or_default(std::move(box1), p.box1, p.p1);
    u.box2 = or_default(std::move(box2), p.box2, p.p2);
    u.box12 = or_default(std::move(box12), p.box12, p.p12);
    check_box(u.box1, p.p1, "u1");
    check_box(u.box2, p.p2, "u2");
    check_box(u.box12, p.p12, "u12");
    clamp_block(u.u1, u.box1);
    clamp_block(u.u2, u.box2);
    clamp_block(u.u12.values(), u.box12);
    return u;
}

void check_controls(const ProblemDef& p, const ControlField& u, const Grid& g, double tol) {
    if (u.p1 != p.p1 || u.p2 != p.p2 || u.p12 != p.p12) {
        throw InvalidArgument("controls: block dimensions do not match the problem");
    }
    if (u.u1.size() != std::size_t(g.ns()) * p.p1 || u.u2.size() != std::size_t(g.nt()) * p.p2 ||
        !u.u12.matches(g) || u.u12.dim() != p.p12) {
        throw InvalidArgument("controls: sample arrays do not match the grid");
    }
    check_box(u.box1, p.p1, "u1");
    check_box(u.box2, p.p2, "u2");
    check_box(u.box12, p.p12, "u12");
    check_block(u.u1, u.box1, tol, "u1");
    check_block(u.u2, u.box2, tol, "u2");
    check_block(u.u12.values(), u.box12, tol, "u12");
}

ControlField axpy(const ControlField& u, double c, const ControlField& d) {
    if (u.u1.size() != d.u1.size() || u.u2.size() != d.u2.size() || !u.u12.same_shape(d.u12)) {
        throw InvalidArgument("axpy: control shapes differ");
    }
    ControlField r = u;
    for (std::size_t k = 0; k < r.u1.size(); ++k) r.u1[k] += c * d.u1[k];
    for (std::size_t k = 0; k < r.u2.size(); ++k) r.u2[k] += c * d.u2[k];
    auto& v = r.u12.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += c * d.u12.values()[k];
    return r;
}

double control_inner(const ControlField& x, const ControlField& y, const Grid& g) {
    if (x.u1.size() != y.u1.size() || x.u2.size() != y.u2.size() || !x.u12.same_shape(y.u12)) {
        throw InvalidArgument("control_inner: control shapes differ");
    }
    const auto ws = trap_weights(g.Ns, g.hs);
    const auto wt = trap_weights(g.Nt, g.ht);
    double acc = weighted_inner(x.u12, y.u12, g);
    for (int a = 0; a < g.ns(); ++a) acc += ws[a] * detail::dot(x.u1_at(a), y.u1_at(a));
    for (int b = 0; b < g.nt(); ++b) acc += wt[b] * detail::dot(x.u2_at(b), y.u2_at(b));
    return acc;
}

double control_sup(const ControlField& x) {
    double m = sup_norm(x.u12);
    for (double v : x.u1) m = std::max(m, std::abs(v));
    for (double v : x.u2) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> flatten(const ControlField& u) {
    std::vector<double> v;
    v.reserve(u.u1.size() + u.u2.size() + u.u12.values().size());
    v.insert(v.end(), u.u1.begin(), u.u1.end());
    v.insert(v.end(), u.u2.begin(), u.u2.end());
    v.insert(v.end(), u.u12.values().begin(), u.u12.values().end());
    return v;
}

void unflatten(std::span<const double> v, ControlField& u) {
    if (v.size() != u.u1.size() + u.u2.size() + u.u12.values().size()) {
        throw InvalidArgument("unflatten: length mismatch");
    }
    auto it = v.begin();
    std::copy_n(it, u.u1.size(), u.u1.begin());
    it += static_cast<std::ptrdiff_t>(u.u1.size());
    std::copy_n(it, u.u2.size(), u.u2.begin());
    it += static_cast<std::ptrdiff_t>(u.u2.size());
    std::copy_n(it, u.u12.values().size(), u.u12.values().begin());
}

bool ValidationReport::lipschitz_ok() const {
    return std::none_of(lipschitz.begin(), lipschitz.end(),
                        [](const LipschitzCheck& c) { return c.exceeds; });
}

double ValidationReport::worst_jacobian_error() const {
    double m = 0.0;
    for (const auto& j : jacobians) m = std::max(m, j.max_abs_err);
    return m;
}

namespace {

// Sampling state and the central-difference machinery used by validate_problem.
struct Sampler {
    const ProblemDef& p;
    const Grid& g;
    std::mt19937_64 rng;

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    int index(int hi) { return std::uniform_int_distribution<int>(0, hi)(rng); }

    void fill_box(std::vector<double>& v, const Box& b) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            double lo = b.lo[k], hi = b.hi[k];
            if (!std::isfinite(lo) && !std::isfinite(hi)) {
                lo = -1.0;
                hi = 1.0;
            } else if (!std::isfinite(lo)) {
                lo = hi - 2.0;
            } else if (!std::isfinite(hi)) {
                hi = lo + 2.0;
            }
            v[k] = uniform(lo, hi);
        }
    }
};

template <class F>
auto guarded(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const EvaluationError&) {
        throw;
    } catch (const std::exception& e) {
        throw EvaluationError("validate_problem: " + name + " failed: " + e.what(), name);
    }
}

void require_finite(std::span<const double> v, const std::string& name) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw EvaluationError("validate_problem: " + name + " returned a non-finite value",
                                  name);
        }
    }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double step_for(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

// Central-difference Jacobian of an n-vector map of x; column-major into
// a row-major n x m buffer.
template <class Map>
std::vector<double> fd_jacobian(Map&& map, std::vector<double> x, int n) {
    const int m = static_cast<int>(x.size());
    std::vector<double> J(std::size_t(n) * m), fp(n), fm(n);
    for (int c = 0; c < m; ++c) {
        const double x0 = x[c];
        const double h = step_for(x0);
        x[c] = x0 + h;
        map(x, fp);
        x[c] = x0 - h;
        map(x, fm);
        x[c] = x0;
        for (int r = 0; r < n; ++r) J[r * m + c] = (fp[r] - fm[r]) / (2.0 * h);
    }
    return J;
}

template <class Fn>
std::vector<double> fd_gradient(Fn&& fn, std::vector<double> x) {
    std::vector<double> gr(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double x0 = x[c];
        const double h = step_for(x0);
        x[c] = x0 + h;
        const double fp = fn(x);
        x[c] = x0 - h;
        const double fm = fn(x);
        x[c] = x0;
        gr[c] = (fp - fm) / (2.0 * h);
    }
    return gr;
}

}  // namespace

ValidationReport validate_problem(const ProblemDef& p, const Grid& g, int trials,
                                  std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("validate_problem: trials must be >= 1");
    check_problem(p);
    const int n = p.n;
    Sampler smp{p, g, std::mt19937_64(seed)};

    ControlField boxes = make_controls(p, g);
    ValidationReport rep;
    rep.lipschitz = {{"f1", 0.0, p.L1, false}, {"f2", 0.0, p.L2, false}, {"f12", 0.0, p.L12, false}};
    const char* jac_names[] = {"dy_f1", "dy_f2",  "dy_f12", "du_f0",   "du_f1",   "du_f2",
                               "du_f12", "grad_F0", "grad_F1", "grad_F2", "grad_F12"};
    for (const char* nm : jac_names) rep.jacobians.push_back({nm, 0.0});
    auto bump = [&](int idx, double v) {
        rep.jacobians[idx].max_abs_err = std::max(rep.jacobians[idx].max_abs_err, v);
    };

    std::vector<double> y(n), y2(n), u1(p.p1), u2(p.p2), u12(p.p12);
    std::vector<double> fa(n), fb(n), jac(std::size_t(n) * n);
    detail::JacBuf jb(p);
    detail::GradBuf gb(p);

    for (int trial = 0; trial < trials; ++trial) {
        const int i = smp.index(g.Ns), j = smp.index(g.Nt);
        const int a = smp.index(i), b = smp.index(j);
        const double s = g.s[i], t = g.t[j], sig = g.s[a], tau = g.t[b];
        for (auto& v : y) v = smp.uniform(-2.0, 2.0);
        for (auto& v : y2) v = smp.uniform(-2.0, 2.0);
        smp.fill_box(u1, boxes.box1);
        smp.fill_box(u2, boxes.box2);
        smp.fill_box(u12, boxes.box12);
        const ControlView U{u1, u2, u12};
        const double dy = max_abs_diff(y, y2);

        // Lipschitz ratios.
        auto ratio = [&](int idx, auto&& eval) {
            eval(y, fa);
            eval(y2, fb);
            require_finite(fa, rep.lipschitz[idx].mapping);
            require_finite(fb, rep.lipschitz[idx].mapping);
            if (dy > 0.0) {
                auto& c = rep.lipschitz[idx];
                c.observed = std::max(c.observed, max_abs_diff(fa, fb) / dy);
            }
        };
        auto F1 = [&](std::span<const double> yy, std::span<double> out) {
            guarded("f1", [&] { detail::eval_f1(p, s, t, sig, yy, U, out); });
        };
        auto F2 = [&](std::span<const double> yy, std::span<double> out) {
            guarded("f2", [&] { detail::eval_f2(p, s, t, tau, yy, U, out); });
        };
        auto F12 = [&](std::span<const double> yy, std::span<double> out) {
            guarded("f12", [&] { detail::eval_f12(p, s, t, sig, tau, yy, U, out); });
        };
        ratio(0, F1);
        ratio(1, F2);
        ratio(2, F12);

        // y-Jacobians.
        auto check_dy = [&](int idx, auto&& eval, auto&& deval) {
            auto fd = fd_jacobian([&](const std::vector<double>& x, std::vector<double>& o) {
                eval(std::span<const double>(x), std::span<double>(o));
            }, y, n);
            guarded(rep.jacobians[idx].mapping, [&] { deval(jac); });
            require_finite(jac, rep.jacobians[idx].mapping);
            bump(idx, max_abs_diff(fd, jac));
        };
        check_dy(0, F1, [&](std::vector<double>& o) { detail::eval_dy_f1(p, s, t, sig, y, U, o); });
        check_dy(1, F2, [&](std::vector<double>& o) { detail::eval_dy_f2(p, s, t, tau, y, U, o); });
        check_dy(2, F12,
                 [&](std::vector<double>& o) { detail::eval_dy_f12(p, s, t, sig, tau, y, U, o); });

        // u-Jacobians: perturb each block in turn.
        auto check_du = [&](int idx, auto&& eval_at, auto&& deval) {
            guarded(rep.jacobians[idx].mapping, [&] { deval(); });
            const std::vector<double>* blocks[3] = {&jb.u1, &jb.u2, &jb.u12};
            for (int blk = 0; blk < 3; ++blk) {
                std::vector<double> base = blk == 0 ? u1 : blk == 1 ? u2 : u12;
                if (base.empty()) continue;
                auto fd = fd_jacobian([&](const std::vector<double>& x, std::vector<double>& o) {
                    ControlView V = U;
                    if (blk == 0) V.u1 = x;
                    if (blk == 1) V.u2 = x;
                    if (blk == 2) V.u12 = x;
                    eval_at(V, std::span<double>(o));
                }, base, n);
                require_finite(*blocks[blk], rep.jacobians[idx].mapping);
                bump(idx, max_abs_diff(fd, *blocks[blk]));
            }
        };
        check_du(
            3,
            [&](const ControlView& V, std::span<double> o) {
                guarded("f0", [&] { detail::eval_f0(p, s, t, V, o); });
            },
            [&] { detail::eval_du_f0(p, s, t, U, jb); });
        check_du(
            4,
            [&](const ControlView& V, std::span<double> o) {
                guarded("f1", [&] { detail::eval_f1(p, s, t, sig, y, V, o); });
            },
            [&] { detail::eval_du_f1(p, s, t, sig, y, U, jb); });
        check_du(
            5,
            [&](const ControlView& V, std::span<double> o) {
                guarded("f2", [&] { detail::eval_f2(p, s, t, tau, y, V, o); });
            },
            [&] { detail::eval_du_f2(p, s, t, tau, y, U, jb); });
        check_du(
            6,
            [&](const ControlView& V, std::span<double> o) {
                guarded("f12", [&] { detail::eval_f12(p, s, t, sig, tau, y, V, o); });
            },
            [&] { detail::eval_du_f12(p, s, t, sig, tau, y, U, jb); });

        // Cost gradients in y and in each control block.
        auto check_grad = [&](int idx, auto&& cost, auto&& geval) {
            const std::string& nm = rep.jacobians[idx].mapping;
            guarded(nm, [&] { geval(); });
            auto gy = fd_gradient(
                [&](const std::vector<double>& x) { return guarded(nm, [&] { return cost(x, U); }); },
                y);
            bump(idx, max_abs_diff(gy, gb.y));
            const std::vector<double>* blocks[3] = {&gb.u1, &gb.u2, &gb.u12};
            for (int blk = 0; blk < 3; ++blk) {
                std::vector<double> base = blk == 0 ? u1 : blk == 1 ? u2 : u12;
                if (base.empty()) continue;
                auto gu = fd_gradient(
                    [&](const std::vector<double>& x) {
                        ControlView V = U;
                        if (blk == 0) V.u1 = x;
                        if (blk == 1) V.u2 = x;
                        if (blk == 2) V.u12 = x;
                        return guarded(nm, [&] { return cost(y, V); });
                    },
                    base);
                bump(idx, max_abs_diff(gu, *blocks[blk]));
            }
        };
        check_grad(
            7, [&](const std::vector<double>& x, const ControlView& V) { return detail::eval_F0(p, x, V); },
            [&] { detail::eval_grad_F0(p, y, U, gb); });
        check_grad(
            8,
            [&](const std::vector<double>& x, const ControlView& V) { return detail::eval_F1(p, s, x, V); },
            [&] { detail::eval_grad_F1(p, s, y, U, gb); });
        check_grad(
            9,
            [&](const std::vector<double>& x, const ControlView& V) { return detail::eval_F2(p, t, x, V); },
            [&] { detail::eval_grad_F2(p, t, y, U, gb); });
        check_grad(
            10,
            [&](const std::vector<double>& x, const ControlView& V) {
                return detail::eval_F12(p, s, t, x, V);
            },
            [&] { detail::eval_grad_F12(p, s, t, y, U, gb); });
    }

    for (auto& c : rep.lipschitz) c.exceeds = c.observed > c.declared * (1.0 + 1e-9) + 1e-12;
    return rep;
}

}  // namespace gvc
