#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gvc/grid.hpp"

namespace gvc {

/// Discretized kernel triple (K1, K2, K12) on a grid, with m x m blocks:
///   K1(i, j, a)       ~ K1(s_i, t_j, sigma_a),           a <= i
///   K2(i, j, b)       ~ K2(s_i, t_j, tau_b),             b <= j
///   K12(i, j, a, b)   ~ K12(s_i, t_j, sigma_a, tau_b),   a <= i, b <= j
/// Blocks outside the causal region are kept at zero.
class KernelTriple {
public:
    KernelTriple() = default;
    KernelTriple(int ns, int nt, int m);
    static KernelTriple on(const Grid& g, int m) { return KernelTriple(g.ns(), g.nt(), m); }

    int ns() const noexcept { return ns_; }
    int nt() const noexcept { return nt_; }
    int m() const noexcept { return m_; }
    bool matches(const Grid& g) const noexcept { return ns_ == g.ns() && nt_ == g.nt(); }
    bool same_shape(const KernelTriple& o) const noexcept {
        return ns_ == o.ns_ && nt_ == o.nt_ && m_ == o.m_;
    }

    double* k1(int i, int j, int a) noexcept { return v1_.data() + off1(i, j, a); }
    const double* k1(int i, int j, int a) const noexcept { return v1_.data() + off1(i, j, a); }
    double* k2(int i, int j, int b) noexcept { return v2_.data() + off2(i, j, b); }
    const double* k2(int i, int j, int b) const noexcept { return v2_.data() + off2(i, j, b); }
    double* k12(int i, int j, int a, int b) noexcept { return v12_.data() + off12(i, j, a, b); }
    const double* k12(int i, int j, int a, int b) const noexcept {
        return v12_.data() + off12(i, j, a, b);
    }

    std::vector<double>& v1() noexcept { return v1_; }
    std::vector<double>& v2() noexcept { return v2_; }
    std::vector<double>& v12() noexcept { return v12_; }
    const std::vector<double>& v1() const noexcept { return v1_; }
    const std::vector<double>& v2() const noexcept { return v2_; }
    const std::vector<double>& v12() const noexcept { return v12_; }

    /// Largest induced max-norm over the blocks of each component.
    double norm1() const;
    double norm2() const;
    double norm12() const;
    /// max(norm1, norm2, norm12)
    double sup_bound() const;

    /// True when every block above the causal diagonal is exactly zero.
    bool causal() const;

    KernelTriple& operator+=(const KernelTriple& o);
    KernelTriple& operator-=(const KernelTriple& o);
    KernelTriple& operator*=(double c);

private:
    std::size_t bs() const noexcept { return std::size_t(m_) * m_; }
    std::size_t off1(int i, int j, int a) const noexcept {
        return ((std::size_t(i) * nt_ + j) * ns_ + a) * bs();
    }
    std::size_t off2(int i, int j, int b) const noexcept {
        return ((std::size_t(i) * nt_ + j) * nt_ + b) * bs();
    }
    std::size_t off12(int i, int j, int a, int b) const noexcept {
        return (((std::size_t(i) * nt_ + j) * ns_ + a) * nt_ + b) * bs();
    }

    int ns_ = 0;
    int nt_ = 0;
    int m_ = 0;
    std::vector<double> v1_, v2_, v12_;
};

KernelTriple operator+(KernelTriple a, const KernelTriple& b);
KernelTriple operator-(KernelTriple a, const KernelTriple& b);

/// Block-writer callbacks for sample_kernels; `out` is an m x m row-major
/// block, zeroed before the call. Any of them may be empty.
using Kernel1Fn = std::function<void(double s, double t, double sig, std::span<double> out)>;
using Kernel2Fn = std::function<void(double s, double t, double tau, std::span<double> out)>;
using Kernel12Fn =
    std::function<void(double s, double t, double sig, double tau, std::span<double> out)>;

/// Samples continuous kernels on the causal region of g.
KernelTriple sample_kernels(const Grid& g, int m, const Kernel1Fn& k1, const Kernel2Fn& k2,
                            const Kernel12Fn& k12);

/// How the inner integrals of a composition are discretized.
enum class ComposeRule {
    /// Product of the weighted quadrature operators: gv_apply(gv_compose(L,K)) equals
    /// gv_apply(L, gv_apply(K, .)) to rounding. Default.
    discrete_operator,
    /// Trapezoid rule on each inner interval [sigma, s] / [tau, t].
    trapezoid,
};

/// (K (x)_0 z)(i,j): the three Volterra integrals of z against K.
Field gv_apply(const KernelTriple& K, const Field& z, const Grid& g);

/// (zeta (x)~_0 K)(a,b): the backward integrals over [s_a, A] x [t_b, B] of the
/// row covectors zeta against K. Weights are chosen so that
/// weighted_inner(zeta, gv_apply(K, z)) == weighted_inner(gv_adjoint_apply(zeta, K), z).
Field gv_adjoint_apply(const Field& zeta, const KernelTriple& K, const Grid& g);

/// The kernel M = L (x) K with M (x)_0 z = L (x)_0 (K (x)_0 z).
KernelTriple gv_compose(const KernelTriple& L, const KernelTriple& K, const Grid& g,
                        ComposeRule rule = ComposeRule::discrete_operator);

struct PowerBounds {
    double bound1 = 0.0;
    double bound2 = 0.0;
    double bound12 = 0.0;
};

/// Analytic bounds on the components of the k-th composition power of a
/// triple bounded by C on [0,A] x [0,B]. Throws InvalidArgument for k < 1 or C < 0.
PowerBounds kernel_power_bound(double C, int k, double A, double B);

/// Sum over k > k_max of kernel_power_bound, per component.
PowerBounds kernel_power_tail(double C, int k_max, double A, double B);

/// K, K(x)K, ..., K^{(x)k_max} (left multiplication: P_{k+1} = K (x) P_k).
std::vector<KernelTriple> kernel_powers(const KernelTriple& K, const Grid& g, int k_max,
                                        ComposeRule rule = ComposeRule::discrete_operator);

struct Resolvent {
    KernelTriple R;
    int truncation_k = 1;
    double tail_bound = 0.0;  ///< max over components of the analytic tail
    PowerBounds tail;
};

/// Truncated Neumann series R = sum_{k=1}^{k_max} K^{(x)k}, with k_max the first
/// order whose analytic tail is < tol in every component. Throws
/// TruncationError if that needs more than max_terms powers.
Resolvent resolvent(const KernelTriple& K, const Grid& g, double tol,
                    ComposeRule rule = ComposeRule::discrete_operator, int max_terms = 400);

/// z = z0 + R (x)_0 z0
Field solve_linear(const KernelTriple& K, const Field& z0, const Grid& g, double tol);
Field solve_linear(const Resolvent& R, const Field& z0, const Grid& g);

/// Exact solve of z = z0 + K (x)_0 z by causal node-by-node substitution.
/// Throws NumericalError if a diagonal block is singular.
Field solve_linear_marching(const KernelTriple& K, const Field& z0, const Grid& g);

/// sup |z - z0 - K (x)_0 z|
double linear_residual(const KernelTriple& K, const Field& z, const Field& z0, const Grid& g);

/// zeta = zeta0 + zeta0 (x)~_0 R
Field solve_adjoint(const KernelTriple& K, const Field& zeta0, const Grid& g, double tol);
Field solve_adjoint(const Resolvent& R, const Field& zeta0, const Grid& g);

/// Backward successive approximation of zeta = zeta0 + zeta (x)~_0 K.
/// Throws DivergenceError after max_iters.
Field solve_adjoint_picard(const KernelTriple& K, const Field& zeta0, const Grid& g, double tol,
                           int max_iters = 500);

/// Exact backward substitution for zeta = zeta0 + zeta (x)~_0 K.
Field solve_adjoint_marching(const KernelTriple& K, const Field& zeta0, const Grid& g);

/// sup |zeta - zeta0 - zeta (x)~_0 K|
double adjoint_residual(const KernelTriple& K, const Field& zeta, const Field& zeta0,
                        const Grid& g);

}  // namespace gvc
