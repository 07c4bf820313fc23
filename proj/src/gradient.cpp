#include "gvc/gradient.hpp"

#include <cmath>

#include "eval.hpp"
#include "gvc/error.hpp"

namespace gvc {

namespace {

// Control-gradient accumulator for one node: covector blocks (u1, u2, u12).
struct Tri {
    std::vector<double> u1, u2, u12;
    explicit Tri(const ProblemDef& p) : u1(p.p1, 0.0), u2(p.p2, 0.0), u12(p.p12, 0.0) {}
    void clear() {
        detail::zero(u1);
        detail::zero(u2);
        detail::zero(u12);
    }
    // += c * x^T J, J an n x p Jacobian per block
    void add(std::span<const double> x, detail::JacBuf& J, double c = 1.0) {
        detail::covec_times(x, J.u1, static_cast<int>(u1.size()), c, u1);
        detail::covec_times(x, J.u2, static_cast<int>(u2.size()), c, u2);
        detail::covec_times(x, J.u12, static_cast<int>(u12.size()), c, u12);
    }
    void add(const detail::GradBuf& G) {
        for (std::size_t k = 0; k < u1.size(); ++k) u1[k] += G.u1[k];
        for (std::size_t k = 0; k < u2.size(); ++k) u2[k] += G.u2[k];
        for (std::size_t k = 0; k < u12.size(); ++k) u12[k] += G.u12[k];
    }
};

bool all_zero(std::span<const double> v) {
    for (double x : v) {
        if (x != 0.0) return false;
    }
    return true;
}

}  // namespace

ControlField GradientField::as_control(const ControlField& like) const {
    ControlField d = like;
    d.u1 = g_u1;
    d.u2 = g_u2;
    d.u12 = g_u12;
    return d;
}

double cost(const ProblemDef& p, const Field& y, const ControlField& u, const Grid& g) {
    check_problem(p);
    if (!y.matches(g) || y.dim() != p.n) throw InvalidArgument("cost: state shape mismatch");
    const int N = g.Ns, M = g.Nt;
    const auto ws = trap_weights(N, g.hs);
    const auto wt = trap_weights(M, g.ht);
    double J = detail::eval_F0(p, y(N, M), u.at(N, M));
    if (p.F1) {
        for (int a = 0; a <= N; ++a) J += ws[a] * detail::eval_F1(p, g.s[a], y(a, M), u.at(a, M));
    }
    if (p.F2) {
        for (int b = 0; b <= M; ++b) J += wt[b] * detail::eval_F2(p, g.t[b], y(N, b), u.at(N, b));
    }
    if (p.F12) {
        for (int a = 0; a <= N; ++a) {
            for (int b = 0; b <= M; ++b) {
                J += ws[a] * wt[b] * detail::eval_F12(p, g.s[a], g.t[b], y(a, b), u.at(a, b));
            }
        }
    }
    if (!std::isfinite(J)) throw NumericalError("cost: non-finite value", N, M);
    return J;
}

GradientField gradient(const ProblemDef& p, const Field& y, const ControlField& u,
                       const CoState& psi, const Grid& g) {
    check_problem(p);
    check_controls(p, u, g, 1e-12);
    if (!y.matches(g) || y.dim() != p.n) throw InvalidArgument("gradient: state shape mismatch");
    const int n = p.n, N = g.Ns, M = g.Nt;
    const auto ws = trap_weights(N, g.hs);
    const auto wt = trap_weights(M, g.ht);

    GradientField gr;
    gr.p1 = p.p1;
    gr.p2 = p.p2;
    gr.p12 = p.p12;
    gr.g_u1.assign(std::size_t(g.ns()) * p.p1, 0.0);
    gr.g_u2.assign(std::size_t(g.nt()) * p.p2, 0.0);
    gr.g_u12 = Field::on(g, p.p12);

    detail::JacBuf J(p);
    detail::GradBuf G(p);
    Tri H(p);
    std::vector<double> c(n);

    // Adds (weight * H) into the sample gradients at node (a, b): u1 sums
    // over b, u2 over a, u12 stays pointwise. Weights are removed below.
    auto scatter = [&](int a, int b, double weight) {
        for (int k = 0; k < p.p1; ++k) gr.g_u1[a * p.p1 + k] += weight * H.u1[k];
        for (int k = 0; k < p.p2; ++k) gr.g_u2[b * p.p2 + k] += weight * H.u2[k];
        for (int k = 0; k < p.p12; ++k) gr.g_u12.at(a, b, k) += weight * H.u12[k];
    };

    // h12 at every node.
    for (int a = 0; a <= N; ++a) {
        for (int b = 0; b <= M; ++b) {
            H.clear();
            const ControlView U = u.at(a, b);
            const auto yab = y(a, b);
            const double sa = g.s[a], tb = g.t[b];
            detail::eval_grad_F12(p, sa, tb, yab, U, G);
            H.add(G);
            if (p.du_f0) {
                detail::eval_du_f0(p, sa, tb, U, J);
                H.add(psi.psi12(a, b), J);
            }
            if (p.du_f1) {
                for (int i = a; i <= N; ++i) {
                    const double v = adjoint_weight(a, i, g.hs, N);
                    for (int k = 0; k < n; ++k) {
                        c[k] = v * psi.psi12.at(i, b, k) + (i == N ? psi.psi2_at(b)[k] : 0.0);
                    }
                    if (all_zero(c)) continue;
                    detail::eval_du_f1(p, g.s[i], tb, sa, yab, U, J);
                    H.add(c, J);
                }
            }
            if (p.du_f2) {
                for (int j = b; j <= M; ++j) {
                    const double v = adjoint_weight(b, j, g.ht, M);
                    for (int k = 0; k < n; ++k) {
                        c[k] = v * psi.psi12.at(a, j, k) + (j == M ? psi.psi1_at(a)[k] : 0.0);
                    }
                    if (all_zero(c)) continue;
                    detail::eval_du_f2(p, sa, g.t[j], tb, yab, U, J);
                    H.add(c, J);
                }
            }
            if (p.du_f12) {
                for (int i = a; i <= N; ++i) {
                    const double vi = adjoint_weight(a, i, g.hs, N);
                    for (int j = b; j <= M; ++j) {
                        const double vj = adjoint_weight(b, j, g.ht, M);
                        for (int k = 0; k < n; ++k) {
                            double x = vi * vj * psi.psi12.at(i, j, k);
                            if (j == M) x += vi * psi.psi1_at(i)[k];
                            if (i == N) x += vj * psi.psi2_at(j)[k];
                            if (i == N && j == M) x += psi.psi0[k];
                            c[k] = x;
                        }
                        if (all_zero(c)) continue;
                        detail::eval_du_f12(p, g.s[i], g.t[j], sa, tb, yab, U, J);
                        H.add(c, J);
                    }
                }
            }
            scatter(a, b, ws[a] * wt[b]);
        }
    }

    gr.g_end.u1_A.assign(p.p1, 0.0);
    gr.g_end.u2_B.assign(p.p2, 0.0);
    gr.g_end.u12_AB.assign(p.p12, 0.0);

    // h1 along t = B.
    for (int a = 0; a <= N; ++a) {
        H.clear();
        const ControlView U = u.at(a, M);
        const auto ya = y(a, M);
        detail::eval_grad_F1(p, g.s[a], ya, U, G);
        H.add(G);
        if (p.du_f0) {
            detail::eval_du_f0(p, g.s[a], g.t[M], U, J);
            H.add(psi.psi1_at(a), J);
        }
        if (p.du_f1) {
            for (int i = a; i <= N; ++i) {
                const double v = adjoint_weight(a, i, g.hs, N);
                for (int k = 0; k < n; ++k) c[k] = v * psi.psi1_at(i)[k] + (i == N ? psi.psi0[k] : 0.0);
                if (all_zero(c)) continue;
                detail::eval_du_f1(p, g.s[i], g.t[M], g.s[a], ya, U, J);
                H.add(c, J);
            }
        }
        scatter(a, M, ws[a]);
        for (int k = 0; k < p.p2; ++k) gr.g_end.u2_B[k] += ws[a] * H.u2[k];
    }

    // h2 along s = A.
    for (int b = 0; b <= M; ++b) {
        H.clear();
        const ControlView U = u.at(N, b);
        const auto yb = y(N, b);
        detail::eval_grad_F2(p, g.t[b], yb, U, G);
        H.add(G);
        if (p.du_f0) {
            detail::eval_du_f0(p, g.s[N], g.t[b], U, J);
            H.add(psi.psi2_at(b), J);
        }
        if (p.du_f2) {
            for (int j = b; j <= M; ++j) {
                const double v = adjoint_weight(b, j, g.ht, M);
                for (int k = 0; k < n; ++k) c[k] = v * psi.psi2_at(j)[k] + (j == M ? psi.psi0[k] : 0.0);
                if (all_zero(c)) continue;
                detail::eval_du_f2(p, g.s[N], g.t[j], g.t[b], yb, U, J);
                H.add(c, J);
            }
        }
        scatter(N, b, wt[b]);
        for (int k = 0; k < p.p1; ++k) gr.g_end.u1_A[k] += wt[b] * H.u1[k];
    }

    // h0 at (A, B).
    {
        H.clear();
        const ControlView U = u.at(N, M);
        detail::eval_grad_F0(p, y(N, M), U, G);
        H.add(G);
        if (p.du_f0) {
            detail::eval_du_f0(p, g.s[N], g.t[M], U, J);
            H.add(psi.psi0, J);
        }
        scatter(N, M, 1.0);
        for (int k = 0; k < p.p1; ++k) gr.g_end.u1_A[k] += H.u1[k];
        for (int k = 0; k < p.p2; ++k) gr.g_end.u2_B[k] += H.u2[k];
        for (int k = 0; k < p.p12; ++k) gr.g_end.u12_AB[k] += H.u12[k];
    }

    // Remove the quadrature weights so that dJ = <gr, du>_w.
    for (int a = 0; a <= N; ++a) {
        for (int k = 0; k < p.p1; ++k) gr.g_u1[a * p.p1 + k] /= ws[a];
    }
    for (int b = 0; b <= M; ++b) {
        for (int k = 0; k < p.p2; ++k) gr.g_u2[b * p.p2 + k] /= wt[b];
    }
    for (int a = 0; a <= N; ++a) {
        for (int b = 0; b <= M; ++b) {
            for (int k = 0; k < p.p12; ++k) gr.g_u12.at(a, b, k) /= ws[a] * wt[b];
        }
    }
    return gr;
}

double gradient_inner(const GradientField& gr, const ControlField& du, const Grid& g) {
    ControlField x = du;
    x.u1 = gr.g_u1;
    x.u2 = gr.g_u2;
    x.u12 = gr.g_u12;
    return control_inner(x, du, g);
}

FdResult fd_directional(const ProblemDef& p, const ControlField& u, const ControlField& du,
                        const Grid& g, double eps, const ForwardOptions& fopts) {
    if (!(eps > 0.0)) throw InvalidArgument("fd_directional: eps must be > 0");
    check_controls(p, u, g);
    auto inside = [&](double e) {
        try {
            check_controls(p, axpy(u, e, du), g);
            check_controls(p, axpy(u, -e, du), g);
            return true;
        } catch (const InvalidArgument&) {
            return false;
        }
    };
    int halvings = 0;
    while (!inside(eps)) {
        if (++halvings > 60) {
            throw InvalidArgument("fd_directional: direction leaves the boxes for every step");
        }
        eps *= 0.5;
    }
    auto J = [&](double e) {
        const ControlField ue = axpy(u, e, du);
        return cost(p, solve_forward(p, ue, g, fopts).y, ue, g);
    };
    FdResult r;
    r.eps = eps;
    r.value = (J(eps) - J(-eps)) / (2.0 * eps);
    r.value_half = (J(0.5 * eps) - J(-0.5 * eps)) / eps;
    return r;
}

Variation variation(const ProblemDef& p, const Field& y, const ControlField& u,
                    const ControlField& du, const Grid& g) {
    const KernelTriple K = linearized_kernels(p, y, u, g);
    const int n = p.n, N = g.Ns, M = g.Nt;
    detail::JacBuf J(p);
    std::vector<double> tmp(n);

    // Jacobian times du at node (a, b), accumulated with weight w into out.
    auto jdu = [&](int a, int b, double w, double* out) {
        const auto d1 = du.u1_at(a);
        const auto d2 = du.u2_at(b);
        const auto d12 = du.u12(a, b);
        for (int r = 0; r < n; ++r) {
            double acc = 0.0;
            for (int q = 0; q < p.p1; ++q) acc += J.u1[r * p.p1 + q] * d1[q];
            for (int q = 0; q < p.p2; ++q) acc += J.u2[r * p.p2 + q] * d2[q];
            for (int q = 0; q < p.p12; ++q) acc += J.u12[r * p.p12 + q] * d12[q];
            out[r] += w * acc;
        }
    };

    Field forcing = Field::on(g, n);
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= M; ++j) {
            const double s = g.s[i], t = g.t[j];
            double* o = forcing(i, j).data();
            if (p.du_f0) {
                detail::eval_du_f0(p, s, t, u.at(i, j), J);
                jdu(i, j, 1.0, o);
            }
            if (p.du_f1) {
                for (int a = 0; a <= i; ++a) {
                    const double w = causal_weight(i, a, g.hs);
                    if (w == 0.0) continue;
                    detail::eval_du_f1(p, s, t, g.s[a], y(a, j), u.at(a, j), J);
                    jdu(a, j, w, o);
                }
            }
            if (p.du_f2) {
                for (int b = 0; b <= j; ++b) {
                    const double w = causal_weight(j, b, g.ht);
                    if (w == 0.0) continue;
                    detail::eval_du_f2(p, s, t, g.t[b], y(i, b), u.at(i, b), J);
                    jdu(i, b, w, o);
                }
            }
            if (p.du_f12) {
                for (int a = 0; a <= i; ++a) {
                    const double wa = causal_weight(i, a, g.hs);
                    if (wa == 0.0) continue;
                    for (int b = 0; b <= j; ++b) {
                        const double w = wa * causal_weight(j, b, g.ht);
                        if (w == 0.0) continue;
                        detail::eval_du_f12(p, s, t, g.s[a], g.t[b], y(a, b), u.at(a, b), J);
                        jdu(a, b, w, o);
                    }
                }
            }
        }
    }

    Variation v;
    v.dy = solve_linear_marching(K, forcing, g);

    const auto ws = trap_weights(N, g.hs);
    const auto wt = trap_weights(M, g.ht);
    detail::GradBuf G(p);
    auto term = [&](int a, int b) {
        double acc = detail::dot(G.y, v.dy(a, b));
        acc += detail::dot(G.u1, du.u1_at(a));
        acc += detail::dot(G.u2, du.u2_at(b));
        acc += detail::dot(G.u12, du.u12(a, b));
        return acc;
    };
    detail::eval_grad_F0(p, y(N, M), u.at(N, M), G);
    v.dJ = term(N, M);
    for (int a = 0; a <= N; ++a) {
        detail::eval_grad_F1(p, g.s[a], y(a, M), u.at(a, M), G);
        v.dJ += ws[a] * term(a, M);
    }
    for (int b = 0; b <= M; ++b) {
        detail::eval_grad_F2(p, g.t[b], y(N, b), u.at(N, b), G);
        v.dJ += wt[b] * term(N, b);
    }
    for (int a = 0; a <= N; ++a) {
        for (int b = 0; b <= M; ++b) {
            detail::eval_grad_F12(p, g.s[a], g.t[b], y(a, b), u.at(a, b), G);
            v.dJ += ws[a] * wt[b] * term(a, b);
        }
    }
    return v;
}

}  // namespace gvc
