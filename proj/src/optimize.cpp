#include "gvc/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "eval.hpp"
#include "gvc/error.hpp"

namespace gvc {

namespace {

void clamp_block(std::vector<double>& v, const Box& b) {
    const std::size_t p = b.lo.size();
    if (p == 0) return;
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::clamp(v[k], b.lo[k % p], b.hi[k % p]);
}

void check_box_order(const Box& b) {
    if (b.lo.size() != b.hi.size()) throw InvalidArgument("project: malformed box");
    for (std::size_t k = 0; k < b.lo.size(); ++k) {
        if (!(b.lo[k] <= b.hi[k])) throw InvalidArgument("project: box has lo > hi");
    }
}

struct Evaluated {
    ControlField u;
    Field y;
    double J = 0.0;
};

}  // namespace

ControlField project(const ControlField& u) {
    check_box_order(u.box1);
    check_box_order(u.box2);
    check_box_order(u.box12);
    ControlField r = u;
    clamp_block(r.u1, r.box1);
    clamp_block(r.u2, r.box2);
    clamp_block(r.u12.values(), r.box12);
    return r;
}

double stationarity(const ControlField& u, const GradientField& gr) {
    const ControlField G = gr.as_control(u);
    const ControlField step = project(axpy(u, -1.0, G));
    return control_sup(axpy(u, -1.0, step));
}

OptimizeResult optimize(const ProblemDef& p, const ControlField& u0, const Grid& g,
                        const OptimizeOptions& opts) {
    if (!(opts.step0 > 0.0)) throw InvalidArgument("optimize: step0 must be > 0");
    if (!(opts.armijo_c > 0.0 && opts.armijo_c < 1.0)) {
        throw InvalidArgument("optimize: armijo_c must lie in (0,1)");
    }
    if (!(opts.backtrack > 0.0 && opts.backtrack < 1.0)) {
        throw InvalidArgument("optimize: backtrack must lie in (0,1)");
    }
    if (opts.max_outer < 0) throw InvalidArgument("optimize: max_outer must be >= 0");
    check_controls(p, u0, g);

    auto evaluate = [&](const ControlField& u, int k) {
        try {
            Evaluated e{u, solve_forward(p, u, g, opts.forward).y, 0.0};
            e.J = cost(p, e.y, u, g);
            return e;
        } catch (const std::exception& ex) {
            throw OptimizeError(std::string("optimize: forward solve failed: ") + ex.what(), u, k);
        }
    };

    OptimizeResult res;
    Evaluated cur = evaluate(u0, 0);
    ControlField prev_u, prev_G;
    bool have_prev = false;

    for (int k = 0;; ++k) {
        try {
            res.psi = solve_costate(p, cur.y, cur.u, g);
        } catch (const std::exception& ex) {
            throw OptimizeError(std::string("optimize: co-state solve failed: ") + ex.what(), cur.u, k);
        }
        res.grad = gradient(p, cur.y, cur.u, res.psi, g);
        const ControlField G = res.grad.as_control(cur.u);
        const double stat = stationarity(cur.u, res.grad);
        res.history.push_back({k, cur.J, stat, 0.0});
        res.iterations = k;
        if (stat <= opts.stat_tol || cur.J <= opts.target_cost) {
            res.converged = true;
            break;
        }
        if (k >= opts.max_outer) break;

        double alpha = opts.step0;
        if (have_prev) {
            const ControlField s = axpy(cur.u, -1.0, prev_u);
            const ControlField yv = axpy(G, -1.0, prev_G);
            const double sy = control_inner(s, yv, g);
            const double ss = control_inner(s, s, g);
            if (sy > 0.0 && ss > 0.0) alpha = std::clamp(ss / sy, 1e-10, 1e10);
        }

        bool accepted = false;
        for (int halving = 0; halving <= 60; ++halving) {
            const ControlField trial = project(axpy(cur.u, -alpha, G));
            // Below this the comparison of J values is rounding noise.
            if (control_sup(axpy(trial, -1.0, cur.u)) <= 1e-13 * std::max(1.0, control_sup(cur.u))) break;
            const double decrease = control_inner(G, axpy(cur.u, -1.0, trial), g);
            Evaluated next = evaluate(trial, k + 1);
            if (next.J <= cur.J - opts.armijo_c * decrease) {
                prev_u = cur.u;
                prev_G = G;
                have_prev = true;
                res.history.back().step = alpha;
                cur = std::move(next);
                accepted = true;
                break;
            }
            alpha *= opts.backtrack;
        }
        if (!accepted) {
            throw OptimizeError("optimize: line search stalled (60 halvings or a step below rounding)", cur.u, k);
        }
    }
    res.u = cur.u;
    res.y = cur.y;
    return res;
}

const ClaimResult* ExtremumReport::find(const std::string& name) const {
    for (const auto& c : claims) {
        if (c.claim == name) return &c;
    }
    return nullptr;
}

namespace {

// Candidate values for one control block: a per-axis lattice of
// ~n_samples^(1/p) points (at least 2) plus the box corners.
std::vector<std::vector<double>> candidates(const Box& box, std::span<const double> current,
                                            int n_samples) {
    const int p = static_cast<int>(current.size());
    std::vector<double> lo(p), hi(p);
    for (int k = 0; k < p; ++k) {
        lo[k] = box.lo[k];
        hi[k] = box.hi[k];
        if (!std::isfinite(lo[k])) lo[k] = std::min(current[k], std::isfinite(hi[k]) ? hi[k] : current[k]) - 1.0;
        if (!std::isfinite(hi[k])) hi[k] = std::max(current[k], lo[k]) + 1.0;
    }
    int per_axis = std::max(2, static_cast<int>(std::floor(std::pow(double(n_samples), 1.0 / p) + 1e-9)));
    std::vector<std::vector<double>> out;
    std::vector<int> idx(p, 0);
    for (;;) {
        std::vector<double> v(p);
        for (int k = 0; k < p; ++k) {
            v[k] = idx[k] == per_axis - 1 ? hi[k] : lo[k] + (hi[k] - lo[k]) * idx[k] / (per_axis - 1);
        }
        out.push_back(std::move(v));
        int k = 0;
        while (k < p && ++idx[k] == per_axis) idx[k++] = 0;
        if (k == p) break;
    }
    // Corners are already on the lattice; kept explicit for p where the
    // lattice is coarser than requested.
    for (int mask = 0; mask < (1 << p); ++mask) {
        std::vector<double> v(p);
        for (int k = 0; k < p; ++k) v[k] = (mask >> k) & 1 ? hi[k] : lo[k];
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
    }
    return out;
}

struct Probe {
    ClaimResult r;
    void record(double at_current, const std::vector<double>& values, double tol, int i, int j) {
        const auto best = std::min_element(values.begin(), values.end());  // first index wins
        r.argmin.push_back(static_cast<int>(best - values.begin()));
        ++r.tested;
        const double gap = at_current - *best;
        if (gap <= tol) ++r.passed;
        if (gap > r.worst_violation || r.worst_i < 0) {
            if (gap > r.worst_violation) r.worst_violation = gap;
            r.worst_i = i;
            r.worst_j = j;
        }
    }
    ClaimResult done() {
        r.fraction = r.tested > 0 ? double(r.passed) / r.tested : 1.0;
        return r;
    }
};

}  // namespace

ExtremumReport check_extremum_principle(const ProblemDef& p, const ControlField& u,
                                        const Field& y, const CoState& psi, const Grid& g,
                                        int n_samples, double tol) {
    if (n_samples < 2) throw InvalidArgument("check_extremum_principle: n_samples must be >= 2");
    check_controls(p, u, g, 1e-12);
    const int N = g.Ns, M = g.Nt;
    const auto ws = trap_weights(N, g.hs);
    const auto wt = trap_weights(M, g.ht);
    ExtremumReport rep;

    auto H = [&](HamiltonianKind kind, int i, int j, const ControlView& U) {
        return hamiltonian(p, y, u, psi, g, {kind, i, j}, U);
    };
    auto with = [](ControlView U, int block, std::span<const double> v) {
        if (block == 1) U.u1 = v;
        if (block == 2) U.u2 = v;
        if (block == 12) U.u12 = v;
        return U;
    };

    // Generic driver: objective(v) for one point, minimized over candidates of `box`.
    auto run = [&](const std::string& name, bool applicable, int dim, const Box& box,
                   const std::vector<std::pair<int, int>>& points,
                   const std::function<std::span<const double>(int, int)>& current,
                   const std::function<double(int, int, std::span<const double>)>& objective) {
        Probe pr;
        pr.r.claim = name;
        pr.r.applicable = applicable && dim > 0;
        if (pr.r.applicable) {
            for (auto [i, j] : points) {
                const auto cur = current(i, j);
                const double at_cur = objective(i, j, cur);
                std::vector<double> vals;
                for (const auto& c : candidates(box, cur, n_samples)) vals.push_back(objective(i, j, c));
                pr.record(at_cur, vals, tol, i, j);
            }
        }
        rep.claims.push_back(pr.done());
    };

    std::vector<std::pair<int, int>> interior, s_line, t_line, corner{{N, M}};
    for (int a = 1; a < N; ++a) {
        s_line.push_back({a, M});
        for (int b = 1; b < M; ++b) interior.push_back({a, b});
    }
    for (int b = 1; b < M; ++b) t_line.push_back({N, b});

    run("u12", p.indep_f0.u12 && p.indep_f1.u12 && p.indep_f2.u12, p.p12, u.box12, interior,
        [&](int a, int b) { return u.u12(a, b); },
        [&](int a, int b, std::span<const double> v) {
            return H(HamiltonianKind::h12, a, b, with(u.at(a, b), 12, v));
        });

    run("u1", p.indep_f0.u1 && p.indep_f2.u1, p.p1, u.box1, s_line,
        [&](int a, int) { return u.u1_at(a); },
        [&](int a, int, std::span<const double> v) {
            double h = H(HamiltonianKind::h1, a, 0, with(u.at(a, M), 1, v));
            for (int b = 0; b <= M; ++b) h += wt[b] * H(HamiltonianKind::h12, a, b, with(u.at(a, b), 1, v));
            return h;
        });

    run("u2", p.indep_f0.u2 && p.indep_f1.u2, p.p2, u.box2, t_line,
        [&](int, int b) { return u.u2_at(b); },
        [&](int, int b, std::span<const double> v) {
            double h = H(HamiltonianKind::h2, 0, b, with(u.at(N, b), 2, v));
            for (int a = 0; a <= N; ++a) h += ws[a] * H(HamiltonianKind::h12, a, b, with(u.at(a, b), 2, v));
            return h;
        });

    run("u12_A", p.indep_f0.u12, p.p12, u.box12, t_line,
        [&](int, int b) { return u.u12(N, b); },
        [&](int, int b, std::span<const double> v) {
            return H(HamiltonianKind::h2, 0, b, with(u.at(N, b), 12, v));
        });

    run("u12_B", p.indep_f0.u12, p.p12, u.box12, s_line,
        [&](int a, int) { return u.u12(a, M); },
        [&](int a, int, std::span<const double> v) {
            return H(HamiltonianKind::h1, a, 0, with(u.at(a, M), 12, v));
        });

    run("u1_A", true, p.p1, u.box1, corner, [&](int, int) { return u.u1_at(N); },
        [&](int, int, std::span<const double> v) {
            double h = H(HamiltonianKind::h0, 0, 0, with(u.at(N, M), 1, v));
            for (int b = 0; b <= M; ++b) {
                h += wt[b] * detail::eval_F2(p, g.t[b], y(N, b), with(u.at(N, b), 1, v));
            }
            return h;
        });

    run("u2_B", true, p.p2, u.box2, corner, [&](int, int) { return u.u2_at(M); },
        [&](int, int, std::span<const double> v) {
            double h = H(HamiltonianKind::h0, 0, 0, with(u.at(N, M), 2, v));
            for (int a = 0; a <= N; ++a) {
                h += ws[a] * detail::eval_F1(p, g.s[a], y(a, M), with(u.at(a, M), 2, v));
            }
            return h;
        });

    run("u12_AB", true, p.p12, u.box12, corner, [&](int, int) { return u.u12(N, M); },
        [&](int, int, std::span<const double> v) {
            return H(HamiltonianKind::h0, 0, 0, with(u.at(N, M), 12, v));
        });

    return rep;
}

}  // namespace gvc
