#include "gvc/gvlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gvc/dense.hpp"
#include "gvc/error.hpp"

namespace gvc {

KernelTriple::KernelTriple(int ns, int nt, int m) : ns_(ns), nt_(nt), m_(m) {
    if (ns < 1 || nt < 1 || m < 1) throw InvalidArgument("KernelTriple: extents must be >= 1");
    v1_.assign(std::size_t(ns) * nt * ns * bs(), 0.0);
    v2_.assign(std::size_t(ns) * nt * nt * bs(), 0.0);
    v12_.assign(std::size_t(ns) * nt * ns * nt * bs(), 0.0);
}

namespace {

double max_block_norm(const std::vector<double>& v, int m) {
    const std::size_t bs = std::size_t(m) * m;
    double best = 0.0;
    for (std::size_t off = 0; off < v.size(); off += bs) {
        best = std::max(best, dense::inf_norm(v.data() + off, m));
    }
    return best;
}

bool block_is_zero(const double* b, int m) {
    for (int k = 0; k < m * m; ++k) {
        if (b[k] != 0.0) return false;
    }
    return true;
}

}  // namespace

double KernelTriple::norm1() const { return max_block_norm(v1_, m_); }
double KernelTriple::norm2() const { return max_block_norm(v2_, m_); }
double KernelTriple::norm12() const { return max_block_norm(v12_, m_); }
double KernelTriple::sup_bound() const { return std::max({norm1(), norm2(), norm12()}); }

bool KernelTriple::causal() const {
    for (int i = 0; i < ns_; ++i) {
        for (int j = 0; j < nt_; ++j) {
            for (int a = i + 1; a < ns_; ++a) {
                if (!block_is_zero(k1(i, j, a), m_)) return false;
                for (int b = 0; b < nt_; ++b) {
                    if (!block_is_zero(k12(i, j, a, b), m_)) return false;
                }
            }
            for (int b = j + 1; b < nt_; ++b) {
                if (!block_is_zero(k2(i, j, b), m_)) return false;
                for (int a = 0; a <= std::min(i, ns_ - 1); ++a) {
                    if (!block_is_zero(k12(i, j, a, b), m_)) return false;
                }
            }
        }
    }
    return true;
}

KernelTriple& KernelTriple::operator+=(const KernelTriple& o) {
    if (!same_shape(o)) throw InvalidArgument("KernelTriple +=: shape mismatch");
    for (std::size_t k = 0; k < v1_.size(); ++k) v1_[k] += o.v1_[k];
    for (std::size_t k = 0; k < v2_.size(); ++k) v2_[k] += o.v2_[k];
    for (std::size_t k = 0; k < v12_.size(); ++k) v12_[k] += o.v12_[k];
    return *this;
}

KernelTriple& KernelTriple::operator-=(const KernelTriple& o) {
    if (!same_shape(o)) throw InvalidArgument("KernelTriple -=: shape mismatch");
    for (std::size_t k = 0; k < v1_.size(); ++k) v1_[k] -= o.v1_[k];
    for (std::size_t k = 0; k < v2_.size(); ++k) v2_[k] -= o.v2_[k];
    for (std::size_t k = 0; k < v12_.size(); ++k) v12_[k] -= o.v12_[k];
    return *this;
}

KernelTriple& KernelTriple::operator*=(double c) {
    for (double& x : v1_) x *= c;
    for (double& x : v2_) x *= c;
    for (double& x : v12_) x *= c;
    return *this;
}

KernelTriple operator+(KernelTriple a, const KernelTriple& b) { return a += b; }
KernelTriple operator-(KernelTriple a, const KernelTriple& b) { return a -= b; }

KernelTriple sample_kernels(const Grid& g, int m, const Kernel1Fn& k1, const Kernel2Fn& k2,
                            const Kernel12Fn& k12) {
    KernelTriple K = KernelTriple::on(g, m);
    const std::size_t bs = std::size_t(m) * m;
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < g.nt(); ++j) {
            for (int a = 0; a <= i; ++a) {
                if (k1) k1(g.s[i], g.t[j], g.s[a], {K.k1(i, j, a), bs});
                if (k12) {
                    for (int b = 0; b <= j; ++b) {
                        k12(g.s[i], g.t[j], g.s[a], g.t[b], {K.k12(i, j, a, b), bs});
                    }
                }
            }
            if (k2) {
                for (int b = 0; b <= j; ++b) k2(g.s[i], g.t[j], g.t[b], {K.k2(i, j, b), bs});
            }
        }
    }
    return K;
}

namespace {

void require(const KernelTriple& K, const Grid& g, int dim, const char* who) {
    if (!K.matches(g)) throw InvalidArgument(std::string(who) + ": kernel does not match grid");
    if (K.m() != dim) throw InvalidArgument(std::string(who) + ": block dimension mismatch");
}

}  // namespace

Field gv_apply(const KernelTriple& K, const Field& z, const Grid& g) {
    if (!z.matches(g)) throw InvalidArgument("gv_apply: field does not match grid");
    require(K, g, z.dim(), "gv_apply");
    const int m = K.m();
    Field out = Field::on(g, m);
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < g.nt(); ++j) {
            double* o = out(i, j).data();
            for (int a = 0; a <= i; ++a) {
                const double wa = causal_weight(i, a, g.hs);
                if (wa != 0.0) dense::gemv_acc(K.k1(i, j, a), z(a, j).data(), wa, o, m);
            }
            for (int b = 0; b <= j; ++b) {
                const double wb = causal_weight(j, b, g.ht);
                if (wb != 0.0) dense::gemv_acc(K.k2(i, j, b), z(i, b).data(), wb, o, m);
            }
            for (int a = 0; a <= i; ++a) {
                const double wa = causal_weight(i, a, g.hs);
                if (wa == 0.0) continue;
                for (int b = 0; b <= j; ++b) {
                    const double w = wa * causal_weight(j, b, g.ht);
                    if (w != 0.0) dense::gemv_acc(K.k12(i, j, a, b), z(a, b).data(), w, o, m);
                }
            }
        }
    }
    return out;
}

Field gv_adjoint_apply(const Field& zeta, const KernelTriple& K, const Grid& g) {
    if (!zeta.matches(g)) throw InvalidArgument("gv_adjoint_apply: field does not match grid");
    require(K, g, zeta.dim(), "gv_adjoint_apply");
    const int m = K.m();
    const int N = g.Ns, M = g.Nt;
    Field out = Field::on(g, m);
    for (int a = 0; a < g.ns(); ++a) {
        for (int b = 0; b < g.nt(); ++b) {
            double* o = out(a, b).data();
            for (int i = a; i <= N; ++i) {
                const double v = adjoint_weight(a, i, g.hs, N);
                if (v != 0.0) dense::gevm_acc(zeta(i, b).data(), K.k1(i, b, a), v, o, m);
            }
            for (int j = b; j <= M; ++j) {
                const double v = adjoint_weight(b, j, g.ht, M);
                if (v != 0.0) dense::gevm_acc(zeta(a, j).data(), K.k2(a, j, b), v, o, m);
            }
            for (int i = a; i <= N; ++i) {
                const double vi = adjoint_weight(a, i, g.hs, N);
                if (vi == 0.0) continue;
                for (int j = b; j <= M; ++j) {
                    const double v = vi * adjoint_weight(b, j, g.ht, M);
                    if (v != 0.0) dense::gevm_acc(zeta(i, j).data(), K.k12(i, j, a, b), v, o, m);
                }
            }
        }
    }
    return out;
}

namespace {

// E[(i * n + c) * n + a]: weight of inner node c when composing over
// [x_a, x_i] along one direction.
std::vector<double> inner_weights(int n_steps, double h, ComposeRule rule) {
    const int n = n_steps + 1;
    std::vector<double> E(std::size_t(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c <= i; ++c) {
            for (int a = 0; a <= c; ++a) {
                double e = 0.0;
                if (rule == ComposeRule::discrete_operator) {
                    const double wia = causal_weight(i, a, h);
                    if (wia != 0.0) e = causal_weight(i, c, h) * causal_weight(c, a, h) / wia;
                } else if (a != i) {
                    e = (c == a || c == i) ? 0.5 * h : h;
                }
                E[(std::size_t(i) * n + c) * n + a] = e;
            }
        }
    }
    return E;
}

}  // namespace

KernelTriple gv_compose(const KernelTriple& L, const KernelTriple& K, const Grid& g,
                        ComposeRule rule) {
    if (!L.same_shape(K)) throw InvalidArgument("gv_compose: kernel shapes differ");
    require(L, g, L.m(), "gv_compose");
    const int m = K.m();
    const int ns = g.ns(), nt = g.nt();
    const auto Es = inner_weights(g.Ns, g.hs, rule);
    const auto Et = inner_weights(g.Nt, g.ht, rule);
    auto es = [&](int i, int c) { return Es.data() + (std::size_t(i) * ns + c) * ns; };
    auto et = [&](int j, int d) { return Et.data() + (std::size_t(j) * nt + d) * nt; };

    KernelTriple Mk = KernelTriple::on(g, m);
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
            // M1 = L1 (x)_{1,1} K1
            for (int c = 0; c <= i; ++c) {
                const double* l = L.k1(i, j, c);
                if (block_is_zero(l, m)) continue;
                const double* e = es(i, c);
                for (int a = 0; a <= c; ++a) {
                    if (e[a] != 0.0) dense::gemm_acc(l, K.k1(c, j, a), e[a], Mk.k1(i, j, a), m);
                }
            }
            // M2 = L2 (x)_{2,2} K2
            for (int d = 0; d <= j; ++d) {
                const double* l = L.k2(i, j, d);
                if (block_is_zero(l, m)) continue;
                const double* e = et(j, d);
                for (int b = 0; b <= d; ++b) {
                    if (e[b] != 0.0) dense::gemm_acc(l, K.k2(i, d, b), e[b], Mk.k2(i, j, b), m);
                }
            }
            // Pointwise products L1 K2 and L2 K1.
            for (int a = 0; a <= i; ++a) {
                const double* l1 = L.k1(i, j, a);
                if (block_is_zero(l1, m)) continue;
                for (int b = 0; b <= j; ++b) dense::gemm_acc(l1, K.k2(a, j, b), 1.0, Mk.k12(i, j, a, b), m);
            }
            for (int b = 0; b <= j; ++b) {
                const double* l2 = L.k2(i, j, b);
                if (block_is_zero(l2, m)) continue;
                for (int a = 0; a <= i; ++a) dense::gemm_acc(l2, K.k1(i, b, a), 1.0, Mk.k12(i, j, a, b), m);
            }
            // L1 (x)_{1,12} K12 and L12 (x)_{12,1} K1
            for (int c = 0; c <= i; ++c) {
                const double* e = es(i, c);
                const double* l1 = L.k1(i, j, c);
                if (!block_is_zero(l1, m)) {
                    for (int a = 0; a <= c; ++a) {
                        if (e[a] == 0.0) continue;
                        for (int b = 0; b <= j; ++b) {
                            dense::gemm_acc(l1, K.k12(c, j, a, b), e[a], Mk.k12(i, j, a, b), m);
                        }
                    }
                }
                for (int b = 0; b <= j; ++b) {
                    const double* l12 = L.k12(i, j, c, b);
                    if (block_is_zero(l12, m)) continue;
                    for (int a = 0; a <= c; ++a) {
                        if (e[a] != 0.0) dense::gemm_acc(l12, K.k1(c, b, a), e[a], Mk.k12(i, j, a, b), m);
                    }
                }
            }
            // L2 (x)_{2,12} K12 and L12 (x)_{12,2} K2
            for (int d = 0; d <= j; ++d) {
                const double* e = et(j, d);
                const double* l2 = L.k2(i, j, d);
                if (!block_is_zero(l2, m)) {
                    for (int a = 0; a <= i; ++a) {
                        for (int b = 0; b <= d; ++b) {
                            if (e[b] != 0.0) dense::gemm_acc(l2, K.k12(i, d, a, b), e[b], Mk.k12(i, j, a, b), m);
                        }
                    }
                }
                for (int a = 0; a <= i; ++a) {
                    const double* l12 = L.k12(i, j, a, d);
                    if (block_is_zero(l12, m)) continue;
                    for (int b = 0; b <= d; ++b) {
                        if (e[b] != 0.0) dense::gemm_acc(l12, K.k2(a, d, b), e[b], Mk.k12(i, j, a, b), m);
                    }
                }
            }
            // L12 (x)_{12,12} K12
            for (int c = 0; c <= i; ++c) {
                const double* ec = es(i, c);
                for (int d = 0; d <= j; ++d) {
                    const double* l12 = L.k12(i, j, c, d);
                    if (block_is_zero(l12, m)) continue;
                    const double* ed = et(j, d);
                    for (int a = 0; a <= c; ++a) {
                        if (ec[a] == 0.0) continue;
                        double* mrow = Mk.k12(i, j, a, 0);
                        const double* krow = K.k12(c, d, a, 0);
                        const std::size_t bs = std::size_t(m) * m;
                        if (m == 1) {
                            const double f = ec[a] * l12[0];
                            for (int b = 0; b <= d; ++b) mrow[b] += f * ed[b] * krow[b];
                        } else {
                            for (int b = 0; b <= d; ++b) {
                                if (ed[b] != 0.0) dense::gemm_acc(l12, krow + b * bs, ec[a] * ed[b], mrow + b * bs, m);
                            }
                        }
                    }
                }
            }
        }
    }
    return Mk;
}

PowerBounds kernel_power_bound(double C, int k, double A, double B) {
    if (k < 1) throw InvalidArgument("kernel_power_bound: k must be >= 1");
    if (!(C >= 0.0)) throw InvalidArgument("kernel_power_bound: C must be >= 0");
    PowerBounds pb;
    if (C == 0.0) return pb;
    const double lc = std::log(C);
    pb.bound1 = std::exp(k * lc + (k - 1) * std::log(A) - std::lgamma(double(k)));
    pb.bound2 = std::exp(k * lc + (k - 1) * std::log(B) - std::lgamma(double(k)));
    if (k == 1) {
        pb.bound12 = C;
    } else {
        const int mk = (k - 2) / 2;  // floor(k/2 - 1)
        const double Q = std::max({A, B, 1.0});
        pb.bound12 = std::exp(k * std::log(3.0 * C) + 2.0 * (k - 1) * std::log(Q) -
                              std::lgamma(mk + 1.0) - std::lgamma(double(k - 2 - mk) + 1.0));
    }
    return pb;
}

PowerBounds kernel_power_tail(double C, int k_max, double A, double B) {
    PowerBounds tail;
    if (C == 0.0) return tail;
    // The terms are eventually dominated by a factorial; sum until they are
    // negligible and decreasing.
    PowerBounds prev{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()};
    for (int k = k_max + 1; k < k_max + 100000; ++k) {
        const PowerBounds b = kernel_power_bound(C, k, A, B);
        tail.bound1 += b.bound1;
        tail.bound2 += b.bound2;
        tail.bound12 += b.bound12;
        const bool falling = b.bound1 <= prev.bound1 && b.bound2 <= prev.bound2 &&
                             b.bound12 <= prev.bound12;
        const bool tiny = b.bound1 <= 1e-17 * tail.bound1 && b.bound2 <= 1e-17 * tail.bound2 &&
                          b.bound12 <= 1e-17 * tail.bound12;
        if (falling && (tiny || (b.bound1 + b.bound2 + b.bound12) < 1e-300)) break;
        prev = b;
    }
    return tail;
}

std::vector<KernelTriple> kernel_powers(const KernelTriple& K, const Grid& g, int k_max,
                                        ComposeRule rule) {
    if (k_max < 1) throw InvalidArgument("kernel_powers: k_max must be >= 1");
    std::vector<KernelTriple> out;
    out.reserve(k_max);
    out.push_back(K);
    for (int k = 2; k <= k_max; ++k) out.push_back(gv_compose(K, out.back(), g, rule));
    return out;
}

Resolvent resolvent(const KernelTriple& K, const Grid& g, double tol, ComposeRule rule,
                    int max_terms) {
    if (!(tol > 0.0)) throw InvalidArgument("resolvent: tol must be > 0");
    require(K, g, K.m(), "resolvent");
    Resolvent r;
    const double C = K.sup_bound();
    if (C == 0.0) {
        r.R = KernelTriple::on(g, K.m());
        return r;
    }
    int k_max = 1;
    PowerBounds tail = kernel_power_tail(C, k_max, g.A, g.B);
    while (!(tail.bound1 < tol && tail.bound2 < tol && tail.bound12 < tol)) {
        if (++k_max > max_terms) {
            throw TruncationError("resolvent: analytic tail still >= tol after " +
                                  std::to_string(max_terms) + " terms");
        }
        tail = kernel_power_tail(C, k_max, g.A, g.B);
    }
    r.truncation_k = k_max;
    r.tail = tail;
    r.tail_bound = std::max({tail.bound1, tail.bound2, tail.bound12});
    r.R = K;
    KernelTriple P = K;
    for (int k = 2; k <= k_max; ++k) {
        P = gv_compose(K, P, g, rule);
        r.R += P;
    }
    return r;
}

Field solve_linear(const Resolvent& R, const Field& z0, const Grid& g) {
    return z0 + gv_apply(R.R, z0, g);
}

Field solve_linear(const KernelTriple& K, const Field& z0, const Grid& g, double tol) {
    require(K, g, z0.dim(), "solve_linear");
    return solve_linear(resolvent(K, g, tol), z0, g);
}

Field solve_linear_marching(const KernelTriple& K, const Field& z0, const Grid& g) {
    if (!z0.matches(g)) throw InvalidArgument("solve_linear_marching: field does not match grid");
    require(K, g, z0.dim(), "solve_linear_marching");
    const int m = K.m();
    Field z = Field::on(g, m);
    std::vector<double> A(std::size_t(m) * m), rhs(m);
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < g.nt(); ++j) {
            std::copy(z0(i, j).begin(), z0(i, j).end(), rhs.begin());
            for (int a = 0; a < i; ++a) {
                dense::gemv_acc(K.k1(i, j, a), z(a, j).data(), causal_weight(i, a, g.hs), rhs.data(), m);
            }
            for (int b = 0; b < j; ++b) {
                dense::gemv_acc(K.k2(i, j, b), z(i, b).data(), causal_weight(j, b, g.ht), rhs.data(), m);
            }
            for (int a = 0; a <= i; ++a) {
                const double wa = causal_weight(i, a, g.hs);
                if (wa == 0.0) continue;
                for (int b = 0; b <= j; ++b) {
                    if (a == i && b == j) continue;
                    const double w = wa * causal_weight(j, b, g.ht);
                    if (w != 0.0) dense::gemv_acc(K.k12(i, j, a, b), z(a, b).data(), w, rhs.data(), m);
                }
            }
            const double wi = causal_weight(i, i, g.hs), wj = causal_weight(j, j, g.ht);
            std::fill(A.begin(), A.end(), 0.0);
            for (int r = 0; r < m; ++r) A[r * m + r] = 1.0;
            for (int k = 0; k < m * m; ++k) {
                A[k] -= wi * K.k1(i, j, i)[k] + wj * K.k2(i, j, j)[k] + wi * wj * K.k12(i, j, i, j)[k];
            }
            if (!dense::solve_in_place(A, rhs, m)) {
                throw NumericalError("solve_linear_marching: singular diagonal block", i, j);
            }
            std::copy(rhs.begin(), rhs.end(), z(i, j).begin());
        }
    }
    return z;
}

double linear_residual(const KernelTriple& K, const Field& z, const Field& z0, const Grid& g) {
    return sup_diff(z, z0 + gv_apply(K, z, g));
}

Field solve_adjoint(const Resolvent& R, const Field& zeta0, const Grid& g) {
    return zeta0 + gv_adjoint_apply(zeta0, R.R, g);
}

Field solve_adjoint(const KernelTriple& K, const Field& zeta0, const Grid& g, double tol) {
    require(K, g, zeta0.dim(), "solve_adjoint");
    return solve_adjoint(resolvent(K, g, tol), zeta0, g);
}

Field solve_adjoint_picard(const KernelTriple& K, const Field& zeta0, const Grid& g, double tol,
                           int max_iters) {
    if (!(tol > 0.0)) throw InvalidArgument("solve_adjoint_picard: tol must be > 0");
    require(K, g, zeta0.dim(), "solve_adjoint_picard");
    Field zeta = zeta0;
    double d = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        Field next = zeta0 + gv_adjoint_apply(zeta, K, g);
        d = sup_diff(next, zeta);
        zeta = std::move(next);
        if (d <= tol) return zeta;
    }
    throw DivergenceError("solve_adjoint_picard: no convergence", d, max_iters);
}

Field solve_adjoint_marching(const KernelTriple& K, const Field& zeta0, const Grid& g) {
    if (!zeta0.matches(g)) throw InvalidArgument("solve_adjoint_marching: field does not match grid");
    require(K, g, zeta0.dim(), "solve_adjoint_marching");
    const int m = K.m();
    const int N = g.Ns, M = g.Nt;
    Field zeta = Field::on(g, m);
    std::vector<double> A(std::size_t(m) * m), rhs(m);
    for (int a = N; a >= 0; --a) {
        for (int b = M; b >= 0; --b) {
            std::copy(zeta0(a, b).begin(), zeta0(a, b).end(), rhs.begin());
            for (int i = a + 1; i <= N; ++i) {
                dense::gevm_acc(zeta(i, b).data(), K.k1(i, b, a), adjoint_weight(a, i, g.hs, N), rhs.data(), m);
            }
            for (int j = b + 1; j <= M; ++j) {
                dense::gevm_acc(zeta(a, j).data(), K.k2(a, j, b), adjoint_weight(b, j, g.ht, M), rhs.data(), m);
            }
            for (int i = a; i <= N; ++i) {
                const double vi = adjoint_weight(a, i, g.hs, N);
                if (vi == 0.0) continue;
                for (int j = b; j <= M; ++j) {
                    if (i == a && j == b) continue;
                    const double v = vi * adjoint_weight(b, j, g.ht, M);
                    if (v != 0.0) dense::gevm_acc(zeta(i, j).data(), K.k12(i, j, a, b), v, rhs.data(), m);
                }
            }
            // zeta_ab (I - D) = rhs  <=>  (I - D)^T zeta_ab^T = rhs^T
            const double va = adjoint_weight(a, a, g.hs, N), vb = adjoint_weight(b, b, g.ht, M);
            for (int r = 0; r < m; ++r) {
                for (int c = 0; c < m; ++c) {
                    const int k = c * m + r;  // transpose
                    A[r * m + c] = (r == c ? 1.0 : 0.0) -
                                   (va * K.k1(a, b, a)[k] + vb * K.k2(a, b, b)[k] + va * vb * K.k12(a, b, a, b)[k]);
                }
            }
            if (!dense::solve_in_place(A, rhs, m)) {
                throw NumericalError("solve_adjoint_marching: singular diagonal block", a, b);
            }
            std::copy(rhs.begin(), rhs.end(), zeta(a, b).begin());
        }
    }
    return zeta;
}

double adjoint_residual(const KernelTriple& K, const Field& zeta, const Field& zeta0,
                        const Grid& g) {
    return sup_diff(zeta, zeta0 + gv_adjoint_apply(zeta, K, g));
}

}  // namespace gvc
