#include "gvc/costate.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "eval.hpp"
#include "gvc/dense.hpp"
#include "gvc/error.hpp"

namespace gvc {

namespace {

void check_state(const ProblemDef& p, const Field& y, const ControlField& u, const Grid& g) {
    check_problem(p);
    if (!y.matches(g) || y.dim() != p.n) throw InvalidArgument("costate: state shape mismatch");
    check_controls(p, u, g, 1e-12);
}

using BlockAt = std::function<const double*(int outer, int inner)>;

// Solves x_a = rho_a + sum_{i >= a} V_ai x_i B(i, a) backwards along one edge.
std::vector<double> backward_edge(const std::vector<double>& rho, int n_steps, double h, int m,
                                  const BlockAt& B) {
    std::vector<double> x(rho.size());
    std::vector<double> A(std::size_t(m) * m), rhs(m);
    for (int a = n_steps; a >= 0; --a) {
        std::copy_n(rho.begin() + std::ptrdiff_t(a) * m, m, rhs.begin());
        for (int i = a + 1; i <= n_steps; ++i) {
            dense::gevm_acc(x.data() + std::size_t(i) * m, B(i, a), adjoint_weight(a, i, h, n_steps),
                            rhs.data(), m);
        }
        const double v = adjoint_weight(a, a, h, n_steps);
        const double* D = B(a, a);
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) A[r * m + c] = (r == c ? 1.0 : 0.0) - v * D[c * m + r];
        }
        if (!dense::solve_in_place(A, rhs, m)) {
            throw NumericalError("solve_costate: singular edge block", a, -1);
        }
        std::copy(rhs.begin(), rhs.end(), x.begin() + std::ptrdiff_t(a) * m);
    }
    return x;
}

// x_a = rho_a + sum_{i >= a} V_ai rho_i R(i, a)
std::vector<double> resolvent_edge(const std::vector<double>& rho, int n_steps, double h, int m,
                                   const BlockAt& R) {
    std::vector<double> x = rho;
    for (int a = 0; a <= n_steps; ++a) {
        for (int i = a; i <= n_steps; ++i) {
            const double v = adjoint_weight(a, i, h, n_steps);
            if (v != 0.0) {
                dense::gevm_acc(rho.data() + std::size_t(i) * m, R(i, a), v,
                                x.data() + std::size_t(a) * m, m);
            }
        }
    }
    return x;
}

// Forcing terms rho1, rho2 of the edge equations.
void edge_forcing(const ProblemDef& p, const Field& y, const ControlField& u, const Grid& g,
                  const KernelTriple& K, const std::vector<double>& psi0, std::vector<double>& rho1,
                  std::vector<double>& rho2) {
    const int n = p.n, N = g.Ns, M = g.Nt;
    detail::GradBuf G(p);
    rho1.assign(std::size_t(g.ns()) * n, 0.0);
    rho2.assign(std::size_t(g.nt()) * n, 0.0);
    for (int a = 0; a <= N; ++a) {
        detail::eval_grad_F1(p, g.s[a], y(a, M), u.at(a, M), G);
        double* r = rho1.data() + std::size_t(a) * n;
        std::copy(G.y.begin(), G.y.end(), r);
        dense::gevm_acc(psi0.data(), K.k1(N, M, a), 1.0, r, n);
    }
    for (int b = 0; b <= M; ++b) {
        detail::eval_grad_F2(p, g.t[b], y(N, b), u.at(N, b), G);
        double* r = rho2.data() + std::size_t(b) * n;
        std::copy(G.y.begin(), G.y.end(), r);
        dense::gevm_acc(psi0.data(), K.k2(N, M, b), 1.0, r, n);
    }
}

CoState init_costate(const ProblemDef& p, const Field& y, const ControlField& u, const Grid& g) {
    CoState psi;
    psi.n = p.n;
    detail::GradBuf G(p);
    detail::eval_grad_F0(p, y(g.Ns, g.Nt), u.at(g.Ns, g.Nt), G);
    psi.psi0 = G.y;
    return psi;
}

void require_finite(const CoState& psi) {
    auto bad = [](const std::vector<double>& v) {
        return std::any_of(v.begin(), v.end(), [](double x) { return !std::isfinite(x); });
    };
    if (bad(psi.psi0) || bad(psi.psi1) || bad(psi.psi2) || bad(psi.psi12.values())) {
        throw NumericalError("costate: non-finite co-state entry", -1, -1);
    }
}

}  // namespace

KernelTriple linearized_kernels(const ProblemDef& p, const Field& y, const ControlField& u,
                                const Grid& g) {
    check_state(p, y, u, g);
    const int n = p.n;
    const std::size_t bs = std::size_t(n) * n;
    KernelTriple K = KernelTriple::on(g, n);
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < g.nt(); ++j) {
            const double s = g.s[i], t = g.t[j];
            for (int a = 0; a <= i; ++a) {
                if (p.dy_f1) detail::eval_dy_f1(p, s, t, g.s[a], y(a, j), u.at(a, j), {K.k1(i, j, a), bs});
                if (p.dy_f12) {
                    for (int b = 0; b <= j; ++b) {
                        detail::eval_dy_f12(p, s, t, g.s[a], g.t[b], y(a, b), u.at(a, b),
                                            {K.k12(i, j, a, b), bs});
                    }
                }
            }
            if (p.dy_f2) {
                for (int b = 0; b <= j; ++b) {
                    detail::eval_dy_f2(p, s, t, g.t[b], y(i, b), u.at(i, b), {K.k2(i, j, b), bs});
                }
            }
        }
    }
    for (const auto* v : {&K.v1(), &K.v2(), &K.v12()}) {
        for (double x : *v) {
            if (!std::isfinite(x)) throw NumericalError("linearized_kernels: non-finite Jacobian", -1, -1);
        }
    }
    return K;
}

Field costate_forcing(const ProblemDef& p, const Field& y, const ControlField& u, const Grid& g,
                      const KernelTriple& K, const CoState& psi) {
    const int n = p.n, N = g.Ns, M = g.Nt;
    Field z0 = Field::on(g, n);
    detail::GradBuf G(p);
    for (int a = 0; a <= N; ++a) {
        for (int b = 0; b <= M; ++b) {
            double* o = z0(a, b).data();
            detail::eval_grad_F12(p, g.s[a], g.t[b], y(a, b), u.at(a, b), G);
            std::copy(G.y.begin(), G.y.end(), o);
            dense::gevm_acc(psi.psi2_at(b).data(), K.k1(N, b, a), 1.0, o, n);
            dense::gevm_acc(psi.psi1_at(a).data(), K.k2(a, M, b), 1.0, o, n);
            dense::gevm_acc(psi.psi0.data(), K.k12(N, M, a, b), 1.0, o, n);
            for (int i = a; i <= N; ++i) {
                const double v = adjoint_weight(a, i, g.hs, N);
                if (v != 0.0) dense::gevm_acc(psi.psi1_at(i).data(), K.k12(i, M, a, b), v, o, n);
            }
            for (int j = b; j <= M; ++j) {
                const double v = adjoint_weight(b, j, g.ht, M);
                if (v != 0.0) dense::gevm_acc(psi.psi2_at(j).data(), K.k12(N, j, a, b), v, o, n);
            }
        }
    }
    return z0;
}

CoState solve_costate(const ProblemDef& p, const Field& y, const ControlField& u, const Grid& g) {
    const KernelTriple K = linearized_kernels(p, y, u, g);
    const int n = p.n, N = g.Ns, M = g.Nt;
    CoState psi = init_costate(p, y, u, g);
    std::vector<double> rho1, rho2;
    edge_forcing(p, y, u, g, K, psi.psi0, rho1, rho2);
    psi.psi1 = backward_edge(rho1, N, g.hs, n, [&](int i, int a) { return K.k1(i, M, a); });
    psi.psi2 = backward_edge(rho2, M, g.ht, n, [&](int j, int b) { return K.k2(N, j, b); });
    const Field z0 = costate_forcing(p, y, u, g, K, psi);
    psi.psi12 = solve_adjoint_marching(K, z0, g);
    require_finite(psi);
    return psi;
}

CoState costate_via_resolvent(const ProblemDef& p, const Field& y, const ControlField& u,
                              const Grid& g, double tol) {
    const KernelTriple K = linearized_kernels(p, y, u, g);
    const Resolvent R = resolvent(K, g, tol);
    const int n = p.n, N = g.Ns, M = g.Nt;
    CoState psi = init_costate(p, y, u, g);
    std::vector<double> rho1, rho2;
    edge_forcing(p, y, u, g, K, psi.psi0, rho1, rho2);
    psi.psi1 = resolvent_edge(rho1, N, g.hs, n, [&](int i, int a) { return R.R.k1(i, M, a); });
    psi.psi2 = resolvent_edge(rho2, M, g.ht, n, [&](int j, int b) { return R.R.k2(N, j, b); });
    const Field z0 = costate_forcing(p, y, u, g, K, psi);
    psi.psi12 = solve_adjoint(R, z0, g);
    require_finite(psi);
    return psi;
}

CostateResiduals costate_residuals(const ProblemDef& p, const Field& y, const ControlField& u,
                                   const Grid& g, const CoState& psi) {
    const KernelTriple K = linearized_kernels(p, y, u, g);
    const int n = p.n, N = g.Ns, M = g.Nt;
    std::vector<double> rho1, rho2;
    edge_forcing(p, y, u, g, K, psi.psi0, rho1, rho2);
    CostateResiduals res;
    auto edge_res = [&](const std::vector<double>& x, const std::vector<double>& rho, int ns,
                        double h, const BlockAt& B) {
        double worst = 0.0;
        std::vector<double> r(n);
        for (int a = 0; a <= ns; ++a) {
            std::copy_n(rho.begin() + std::ptrdiff_t(a) * n, n, r.begin());
            for (int i = a; i <= ns; ++i) {
                dense::gevm_acc(x.data() + std::size_t(i) * n, B(i, a), adjoint_weight(a, i, h, ns), r.data(), n);
            }
            for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(x[a * n + k] - r[k]));
        }
        return worst;
    };
    res.psi1 = edge_res(psi.psi1, rho1, N, g.hs, [&](int i, int a) { return K.k1(i, M, a); });
    res.psi2 = edge_res(psi.psi2, rho2, M, g.ht, [&](int j, int b) { return K.k2(N, j, b); });
    const Field z0 = costate_forcing(p, y, u, g, K, psi);
    res.psi12 = adjoint_residual(K, psi.psi12, z0, g);
    return res;
}

double hamiltonian(const ProblemDef& p, const Field& y, const ControlField& u,
                   const CoState& psi, const Grid& g, HamiltonianAt at,
                   std::optional<ControlView> control) {
    const int n = p.n, N = g.Ns, M = g.Nt;
    std::vector<double> f(n);
    auto dot = [](std::span<const double> a, std::span<const double> b) { return detail::dot(a, b); };
    switch (at.kind) {
        case HamiltonianKind::h0: {
            const ControlView U = control.value_or(u.at(N, M));
            detail::eval_f0(p, g.s[N], g.t[M], U, f);
            return detail::eval_F0(p, y(N, M), U) + dot(psi.psi0, f);
        }
        case HamiltonianKind::h1: {
            const int a = at.i;
            if (a < 0 || a > N) throw InvalidArgument("hamiltonian: h1 index out of range");
            const ControlView U = control.value_or(u.at(a, M));
            const auto ya = y(a, M);
            double h = detail::eval_F1(p, g.s[a], ya, U);
            detail::eval_f0(p, g.s[a], g.t[M], U, f);
            h += dot(psi.psi1_at(a), f);
            detail::eval_f1(p, g.s[N], g.t[M], g.s[a], ya, U, f);
            h += dot(psi.psi0, f);
            for (int i = a; i <= N; ++i) {
                const double v = adjoint_weight(a, i, g.hs, N);
                if (v == 0.0) continue;
                detail::eval_f1(p, g.s[i], g.t[M], g.s[a], ya, U, f);
                h += v * dot(psi.psi1_at(i), f);
            }
            return h;
        }
        case HamiltonianKind::h2: {
            const int b = at.j;
            if (b < 0 || b > M) throw InvalidArgument("hamiltonian: h2 index out of range");
            const ControlView U = control.value_or(u.at(N, b));
            const auto yb = y(N, b);
            double h = detail::eval_F2(p, g.t[b], yb, U);
            detail::eval_f0(p, g.s[N], g.t[b], U, f);
            h += dot(psi.psi2_at(b), f);
            detail::eval_f2(p, g.s[N], g.t[M], g.t[b], yb, U, f);
            h += dot(psi.psi0, f);
            for (int j = b; j <= M; ++j) {
                const double v = adjoint_weight(b, j, g.ht, M);
                if (v == 0.0) continue;
                detail::eval_f2(p, g.s[N], g.t[j], g.t[b], yb, U, f);
                h += v * dot(psi.psi2_at(j), f);
            }
            return h;
        }
        case HamiltonianKind::h12: {
            const int a = at.i, b = at.j;
            if (a < 0 || a > N || b < 0 || b > M) {
                throw InvalidArgument("hamiltonian: h12 index out of range");
            }
            const ControlView U = control.value_or(u.at(a, b));
            const auto yab = y(a, b);
            const double sa = g.s[a], tb = g.t[b];
            double h = detail::eval_F12(p, sa, tb, yab, U);
            detail::eval_f0(p, sa, tb, U, f);
            h += dot(psi.psi12(a, b), f);
            if (p.f1) {
                detail::eval_f1(p, g.s[N], tb, sa, yab, U, f);
                h += dot(psi.psi2_at(b), f);
                for (int i = a; i <= N; ++i) {
                    const double v = adjoint_weight(a, i, g.hs, N);
                    if (v == 0.0) continue;
                    detail::eval_f1(p, g.s[i], tb, sa, yab, U, f);
                    h += v * dot(psi.psi12(i, b), f);
                }
            }
            if (p.f2) {
                detail::eval_f2(p, sa, g.t[M], tb, yab, U, f);
                h += dot(psi.psi1_at(a), f);
                for (int j = b; j <= M; ++j) {
                    const double v = adjoint_weight(b, j, g.ht, M);
                    if (v == 0.0) continue;
                    detail::eval_f2(p, sa, g.t[j], tb, yab, U, f);
                    h += v * dot(psi.psi12(a, j), f);
                }
            }
            if (p.f12) {
                detail::eval_f12(p, g.s[N], g.t[M], sa, tb, yab, U, f);
                h += dot(psi.psi0, f);
                for (int i = a; i <= N; ++i) {
                    const double vi = adjoint_weight(a, i, g.hs, N);
                    if (vi == 0.0) continue;
                    detail::eval_f12(p, g.s[i], g.t[M], sa, tb, yab, U, f);
                    h += vi * dot(psi.psi1_at(i), f);
                }
                for (int j = b; j <= M; ++j) {
                    const double vj = adjoint_weight(b, j, g.ht, M);
                    if (vj == 0.0) continue;
                    detail::eval_f12(p, g.s[N], g.t[j], sa, tb, yab, U, f);
                    h += vj * dot(psi.psi2_at(j), f);
                }
                for (int i = a; i <= N; ++i) {
                    const double vi = adjoint_weight(a, i, g.hs, N);
                    if (vi == 0.0) continue;
                    for (int j = b; j <= M; ++j) {
                        const double v = vi * adjoint_weight(b, j, g.ht, M);
                        if (v == 0.0) continue;
                        detail::eval_f12(p, g.s[i], g.t[j], sa, tb, yab, U, f);
                        h += v * dot(psi.psi12(i, j), f);
                    }
                }
            }
            return h;
        }
    }
    throw InvalidArgument("hamiltonian: unknown kind");
}

}  // namespace gvc
