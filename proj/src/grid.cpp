#include "gvc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gvc/error.hpp"

namespace gvc {

Grid make_grid(double A, double B, int Ns, int Nt) {
    if (!(A > 0.0) || !(B > 0.0) || !std::isfinite(A) || !std::isfinite(B)) {
        throw InvalidArgument("make_grid: extents must be positive and finite");
    }
    if (Ns < 1 || Nt < 1) {
        throw InvalidArgument("make_grid: step counts must be >= 1 (got Ns=" +
                              std::to_string(Ns) + ", Nt=" + std::to_string(Nt) + ")");
    }
    Grid g;
    g.A = A;
    g.B = B;
    g.Ns = Ns;
    g.Nt = Nt;
    g.hs = A / Ns;
    g.ht = B / Nt;
    g.s.resize(Ns + 1);
    g.t.resize(Nt + 1);
    for (int i = 0; i <= Ns; ++i) g.s[i] = i * g.hs;
    for (int j = 0; j <= Nt; ++j) g.t[j] = j * g.ht;
    g.s[Ns] = A;
    g.t[Nt] = B;
    return g;
}

std::vector<double> trap_weights(int n_steps, double h) {
    if (n_steps < 1) throw InvalidArgument("trap_weights: n_steps must be >= 1");
    std::vector<double> w(n_steps + 1, h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
}

Field::Field(int ni, int nj, int dim, double fill)
    : ni_(ni), nj_(nj), dim_(dim),
      v_(static_cast<std::size_t>(ni) * nj * dim, fill) {
    if (ni < 0 || nj < 0 || dim < 0) throw InvalidArgument("Field: negative extent");
}

Field& Field::operator+=(const Field& o) {
    if (!same_shape(o)) throw InvalidArgument("Field +=: shape mismatch");
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    if (!same_shape(o)) throw InvalidArgument("Field -=: shape mismatch");
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
    return *this;
}

Field& Field::operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double c, Field a) { return a *= c; }

double sup_norm(const Field& f) {
    double m = 0.0;
    for (double x : f.values()) m = std::max(m, std::abs(x));
    return m;
}

double sup_diff(const Field& a, const Field& b) {
    if (!a.same_shape(b)) throw InvalidArgument("sup_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    }
    return m;
}

double weighted_inner(const Field& a, const Field& b, const Grid& g) {
    if (!a.same_shape(b) || !a.matches(g)) throw InvalidArgument("weighted_inner: shape mismatch");
    const auto ws = trap_weights(g.Ns, g.hs);
    const auto wt = trap_weights(g.Nt, g.ht);
    double acc = 0.0;
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < g.nt(); ++j) {
            auto x = a(i, j);
            auto y = b(i, j);
            double dot = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) dot += x[k] * y[k];
            acc += ws[i] * wt[j] * dot;
        }
    }
    return acc;
}

Field cum_integral_s(const Field& f, const Grid& g) {
    if (!f.matches(g)) throw InvalidArgument("cum_integral_s: field does not match grid");
    Field out(f.ni(), f.nj(), f.dim());
    const int m = f.dim();
    for (int j = 0; j < g.nt(); ++j) {
        for (int i = 1; i < g.ns(); ++i) {
            for (int k = 0; k < m; ++k) {
                out.at(i, j, k) =
                    out.at(i - 1, j, k) + 0.5 * g.hs * (f.at(i - 1, j, k) + f.at(i, j, k));
            }
        }
    }
    return out;
}

Field cum_integral_t(const Field& f, const Grid& g) {
    if (!f.matches(g)) throw InvalidArgument("cum_integral_t: field does not match grid");
    Field out(f.ni(), f.nj(), f.dim());
    const int m = f.dim();
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 1; j < g.nt(); ++j) {
            for (int k = 0; k < m; ++k) {
                out.at(i, j, k) =
                    out.at(i, j - 1, k) + 0.5 * g.ht * (f.at(i, j - 1, k) + f.at(i, j, k));
            }
        }
    }
    return out;
}

Field cum_integral_st(const Field& f, const Grid& g) {
    if (!f.matches(g)) throw InvalidArgument("cum_integral_st: field does not match grid");
    Field out(f.ni(), f.nj(), f.dim());
    const int m = f.dim();
    for (int i = 1; i < g.ns(); ++i) {
        for (int j = 1; j < g.nt(); ++j) {
            auto o = out(i, j);
            for (int a = 0; a <= i; ++a) {
                const double wa = causal_weight(i, a, g.hs);
                for (int b = 0; b <= j; ++b) {
                    const double w = wa * causal_weight(j, b, g.ht);
                    for (int k = 0; k < m; ++k) o[k] += w * f.at(a, b, k);
                }
            }
        }
    }
    return out;
}

}  // namespace gvc
