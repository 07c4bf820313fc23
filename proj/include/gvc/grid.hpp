#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gvc {

/// Uniform tensor-product grid on [0,A]x[0,B] with Ns x Nt steps.
struct Grid {
    double A = 1.0;
    double B = 1.0;
    int Ns = 1;
    int Nt = 1;
    double hs = 1.0;
    double ht = 1.0;
    std::vector<double> s;  ///< Ns+1 nodes, s[0] = 0, s[Ns] = A
    std::vector<double> t;  ///< Nt+1 nodes, t[0] = 0, t[Nt] = B

    int ns() const noexcept { return Ns + 1; }
    int nt() const noexcept { return Nt + 1; }
};

/// Throws InvalidArgument unless A, B > 0 and Ns, Nt >= 1.
Grid make_grid(double A, double B, int Ns, int Nt);

/// Composite trapezoid weights for n_steps intervals of width h.
std::vector<double> trap_weights(int n_steps, double h);

/// Weight of node `a` in the trapezoid rule over [x_0, x_i]. Zero for i == 0
/// (the degenerate interval) and for a > i.
inline double causal_weight(int i, int a, double h) noexcept {
    if (i == 0 || a > i || a < 0) return 0.0;
    return (a == 0 || a == i) ? 0.5 * h : h;
}

/// Weight of node `i` in the backward rule over [x_a, x_n] that is the exact
/// transpose of causal_weight under the global trapezoid inner product:
///   w_a * adjoint_weight(a, i) == w_i * causal_weight(i, a).
/// Coincides with the trapezoid rule on [x_a, x_n] for 0 < a < n.
inline double adjoint_weight(int a, int i, double h, int n) noexcept {
    if (i < a || i > n) return 0.0;
    if (i == a) return a == 0 ? 0.0 : 0.5 * h;
    return i == n ? 0.5 * h : h;
}

/// Dense (ni x nj) array of dim-vectors, row-major in (i, j, k).
class Field {
public:
    Field() = default;
    Field(int ni, int nj, int dim, double fill = 0.0);

    static Field on(const Grid& g, int dim, double fill = 0.0) {
        return Field(g.ns(), g.nt(), dim, fill);
    }

    int ni() const noexcept { return ni_; }
    int nj() const noexcept { return nj_; }
    int dim() const noexcept { return dim_; }

    std::span<double> operator()(int i, int j) noexcept {
        return {v_.data() + offset(i, j), static_cast<std::size_t>(dim_)};
    }
    std::span<const double> operator()(int i, int j) const noexcept {
        return {v_.data() + offset(i, j), static_cast<std::size_t>(dim_)};
    }
    double& at(int i, int j, int k = 0) noexcept { return v_[offset(i, j) + k]; }
    double at(int i, int j, int k = 0) const noexcept { return v_[offset(i, j) + k]; }

    std::vector<double>& values() noexcept { return v_; }
    const std::vector<double>& values() const noexcept { return v_; }

    bool same_shape(const Field& o) const noexcept {
        return ni_ == o.ni_ && nj_ == o.nj_ && dim_ == o.dim_;
    }
    bool matches(const Grid& g) const noexcept { return ni_ == g.ns() && nj_ == g.nt(); }

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double c);

private:
    std::size_t offset(int i, int j) const noexcept {
        return (static_cast<std::size_t>(i) * nj_ + j) * dim_;
    }

    int ni_ = 0;
    int nj_ = 0;
    int dim_ = 0;
    std::vector<double> v_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field a);

/// max |entry|
double sup_norm(const Field& f);
double sup_diff(const Field& a, const Field& b);

/// Trapezoid-weighted inner product sum_ij w_i w_j <a(i,j), b(i,j)>.
double weighted_inner(const Field& a, const Field& b, const Grid& g);

/// out(i,j) = trapezoid approximation of the integral of f(., t_j) over [0, s_i].
Field cum_integral_s(const Field& f, const Grid& g);
/// out(i,j) = trapezoid approximation of the integral of f(s_i, .) over [0, t_j].
Field cum_integral_t(const Field& f, const Grid& g);
/// Product-trapezoid double integral over [0,s_i]x[0,t_j]; equals
/// cum_integral_t(cum_integral_s(f)) to rounding.
Field cum_integral_st(const Field& f, const Grid& g);

}  // namespace gvc
