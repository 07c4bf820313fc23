#include "gvc/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eval.hpp"
#include "gvc/error.hpp"

namespace gvc {

Field picard_map(const ProblemDef& p, const ControlField& u, const Grid& g, const Field& y) {
    const int n = p.n;
    if (!y.matches(g) || y.dim() != n) throw InvalidArgument("picard_map: state shape mismatch");
    Field out = Field::on(g, n);
    std::vector<double> buf(n);
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < g.nt(); ++j) {
            const double s = g.s[i], t = g.t[j];
            auto o = out(i, j);
            detail::eval_f0(p, s, t, u.at(i, j), o);
            if (p.f1 && i > 0) {
                for (int a = 0; a <= i; ++a) {
                    detail::eval_f1(p, s, t, g.s[a], y(a, j), u.at(a, j), buf);
                    const double w = causal_weight(i, a, g.hs);
                    for (int k = 0; k < n; ++k) o[k] += w * buf[k];
                }
            }
            if (p.f2 && j > 0) {
                for (int b = 0; b <= j; ++b) {
                    detail::eval_f2(p, s, t, g.t[b], y(i, b), u.at(i, b), buf);
                    const double w = causal_weight(j, b, g.ht);
                    for (int k = 0; k < n; ++k) o[k] += w * buf[k];
                }
            }
            if (p.f12 && i > 0 && j > 0) {
                for (int a = 0; a <= i; ++a) {
                    const double wa = causal_weight(i, a, g.hs);
                    for (int b = 0; b <= j; ++b) {
                        detail::eval_f12(p, s, t, g.s[a], g.t[b], y(a, b), u.at(a, b), buf);
                        const double w = wa * causal_weight(j, b, g.ht);
                        for (int k = 0; k < n; ++k) o[k] += w * buf[k];
                    }
                }
            }
            for (int k = 0; k < n; ++k) {
                if (!std::isfinite(o[k])) {
                    throw NumericalError("solve_forward: non-finite value at node (" +
                                             std::to_string(i) + ", " + std::to_string(j) + ")",
                                         i, j);
                }
            }
        }
    }
    return out;
}

double weighted_norm(const Field& z, const Grid& g, double mu) {
    if (!z.matches(g)) throw InvalidArgument("weighted_norm: shape mismatch");
    double m = 0.0;
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < g.nt(); ++j) {
            const double w = std::exp(-mu * (g.s[i] + g.t[j]));
            for (double v : z(i, j)) m = std::max(m, w * std::abs(v));
        }
    }
    return m;
}

ForwardResult solve_forward(const ProblemDef& p, const ControlField& u, const Grid& g,
                            const ForwardOptions& opts) {
    check_problem(p);
    if (!(opts.tol > 0.0)) throw InvalidArgument("solve_forward: tol must be > 0");
    if (opts.max_iters < 1) throw InvalidArgument("solve_forward: max_iters must be >= 1");
    if (opts.mu && !(*opts.mu >= 0.0)) throw InvalidArgument("solve_forward: mu must be >= 0");
    check_controls(p, u, g);

    ForwardResult r;
    if (opts.initial) {
        if (!opts.initial->matches(g) || opts.initial->dim() != p.n) {
            throw InvalidArgument("solve_forward: initial guess shape mismatch");
        }
        r.y = *opts.initial;
    } else {
        r.y = Field::on(g, p.n);
        for (int i = 0; i < g.ns(); ++i) {
            for (int j = 0; j < g.nt(); ++j) detail::eval_f0(p, g.s[i], g.t[j], u.at(i, j), r.y(i, j));
        }
    }

    for (int it = 1; it <= opts.max_iters; ++it) {
        Field next = picard_map(p, u, g, r.y);
        const double d = sup_diff(next, r.y);
        r.deltas.push_back(d);
        if (opts.mu) r.weighted_deltas.push_back(weighted_norm(next - r.y, g, *opts.mu));
        r.y = std::move(next);
        r.iterations = it;
        r.final_delta = d;
        if (d <= opts.tol) return r;
    }
    throw DivergenceError("solve_forward: no convergence in " + std::to_string(opts.max_iters) +
                              " iterations (last delta " + std::to_string(r.final_delta) + ")",
                          r.final_delta, r.iterations);
}

double contraction_factor(double L1, double L2, double L12, double A, double B, double mu) {
    if (!(mu > 0.0)) throw InvalidArgument("contraction_factor: mu must be > 0");
    if (L1 < 0.0 || L2 < 0.0 || L12 < 0.0 || A < 0.0 || B < 0.0) {
        throw InvalidArgument("contraction_factor: inputs must be >= 0");
    }
    const double single = -std::expm1(-mu * (A + B)) / mu;
    const double dbl = (-std::expm1(-mu * A) - std::expm1(-mu * B)) / (mu * mu);
    return single * (L1 + L2) + dbl * L12;
}

double choose_mu(double L1, double L2, double L12, double A, double B, double q_target) {
    if (!(q_target > 0.0 && q_target < 1.0)) {
        throw InvalidArgument("choose_mu: q_target must lie in (0,1)");
    }
    auto ok = [&](double mu) { return contraction_factor(L1, L2, L12, A, B, mu) <= q_target; };
    double hi = kMuLowerBound;
    if (ok(hi)) return hi;
    double lo = hi;
    while (!ok(hi)) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace gvc
