#include "gvc/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gvc/error.hpp"

namespace gvc {

namespace {

// sum_{k > K} x^k / k!, x >= 0
double exp_tail(double x, int K) {
    if (x <= 0.0) return 0.0;
    int k = K + 1;
    double term = std::exp(k * std::log(x) - std::lgamma(k + 1.0));
    double sum = 0.0;
    while (term > 0.0) {
        sum += term;
        ++k;
        const double ratio = x / k;
        term *= ratio;
        if (ratio < 0.5 && term <= sum * 1e-17) {
            sum += term * ratio / (1.0 - ratio);  // geometric cap on the rest
            break;
        }
    }
    return sum;
}

void require_nonnegative(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!(x >= 0.0)) throw InvalidArgument(std::string("check_comparison: negative ") + what);
    }
}

}  // namespace

double gronwall_B(double B1, double B2, double B12) {
    return std::max({std::abs(B1), std::abs(B2), std::sqrt(std::abs(B12) / 3.0)});
}

GronwallCoeffs gronwall_coeffs(double A0, double B1, double B2, double B12, int kmax, int lmax) {
    if (kmax < 0 || lmax < 0) throw InvalidArgument("gronwall_coeffs: orders must be >= 0");
    GronwallCoeffs c{A0, B1, B2, B12, {}};
    c.C.assign(kmax + 1, std::vector<double>(lmax + 1, 0.0));
    c.C[0][0] = 1.0;
    for (int k = 1; k <= kmax; ++k) c.C[k][0] = c.C[k - 1][0] * B1 / k;
    for (int l = 1; l <= lmax; ++l) c.C[0][l] = c.C[0][l - 1] * B2 / l;
    for (int k = 0; k < kmax; ++k) {
        for (int l = 0; l < lmax; ++l) {
            c.C[k + 1][l + 1] = B1 / (k + 1) * c.C[k][l + 1] + B2 / (l + 1) * c.C[k + 1][l] +
                                B12 / ((k + 1.0) * (l + 1.0)) * c.C[k][l];
        }
    }
    return c;
}

double gronwall_coeff_bound(double B, int k, int l) {
    if (B == 0.0) return (k == 0 && l == 0) ? 1.0 : 0.0;
    return std::exp((k + l) * std::log(3.0 * B) - std::lgamma(k + 1.0) - std::lgamma(l + 1.0));
}

double gronwall_tail_bound(const GronwallCoeffs& c, double ds, double dt) {
    if (c.C.empty()) throw InvalidArgument("gronwall_tail_bound: empty coefficient table");
    const double B3 = 3.0 * gronwall_B(c.B1, c.B2, c.B12);
    const double x = B3 * ds, y = B3 * dt;
    return std::abs(c.A0) * (exp_tail(x, c.kmax()) * std::exp(y) + std::exp(x) * exp_tail(y, c.lmax()));
}

double gronwall_eval(const GronwallCoeffs& c, double ds, double dt, double rel_tol) {
    if (!(ds >= 0.0) || !(dt >= 0.0)) throw InvalidArgument("gronwall_eval: ds, dt must be >= 0");
    if (c.C.empty()) throw InvalidArgument("gronwall_eval: empty coefficient table");
    double sum = 0.0, pk = 1.0;
    for (int k = 0; k <= c.kmax(); ++k) {
        double row = 0.0, pl = 1.0;
        for (int l = 0; l <= c.lmax(); ++l) {
            row += c.C[k][l] * pl;
            pl *= dt;
        }
        sum += row * pk;
        pk *= ds;
    }
    const double result = c.A0 * sum;
    const double tail = gronwall_tail_bound(c, ds, dt);
    if (!std::isfinite(result) || tail > rel_tol * std::abs(result)) {
        throw TruncationError("gronwall_eval: series orders too small for the requested accuracy");
    }
    return result;
}

double gronwall_solve(double A0, double B1, double B2, double B12, double ds, double dt,
                      double rel_tol) {
    for (int order = 16;; order *= 2) {
        try {
            return gronwall_eval(gronwall_coeffs(A0, B1, B2, B12, order, order), ds, dt, rel_tol);
        } catch (const TruncationError&) {
            if (order >= 1024) throw;
        }
    }
}

double gronwall_bound(double A0, double B1, double B2, double B12, double ds, double dt) {
    if (!(ds >= 0.0) || !(dt >= 0.0)) throw InvalidArgument("gronwall_bound: ds, dt must be >= 0");
    return A0 * std::exp(3.0 * gronwall_B(B1, B2, B12) * ds * dt);
}

double gronwall_bound_separable(double A0, double B1, double B2, double B12, double ds,
                                double dt) {
    if (!(ds >= 0.0) || !(dt >= 0.0)) {
        throw InvalidArgument("gronwall_bound_separable: ds, dt must be >= 0");
    }
    return A0 * std::exp(3.0 * gronwall_B(B1, B2, B12) * (ds + dt));
}

ComparisonResult check_comparison(const Field& zeta_forcing, const Field& z_forcing,
                                  const KernelTriple& phi, const Grid& g, double tol,
                                  double slack) {
    if (!zeta_forcing.matches(g) || !z_forcing.same_shape(zeta_forcing)) {
        throw InvalidArgument("check_comparison: forcing shape mismatch");
    }
    if (!phi.matches(g) || phi.m() != zeta_forcing.dim()) {
        throw InvalidArgument("check_comparison: kernel shape mismatch");
    }
    require_nonnegative(phi.v1(), "kernel entry");
    require_nonnegative(phi.v2(), "kernel entry");
    require_nonnegative(phi.v12(), "kernel entry");
    require_nonnegative(zeta_forcing.values(), "forcing");
    require_nonnegative(z_forcing.values(), "forcing");
    const auto& fz = z_forcing.values();
    const auto& fzeta = zeta_forcing.values();
    for (std::size_t k = 0; k < fz.size(); ++k) {
        if (fz[k] > fzeta[k]) throw InvalidArgument("check_comparison: z_forcing exceeds zeta_forcing");
    }

    ComparisonResult r;
    r.zeta = solve_linear(phi, zeta_forcing, g, tol);
    r.z = solve_linear(phi, z_forcing, g, tol);
    r.passed = true;
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < g.nt(); ++j) {
            for (int k = 0; k < r.z.dim(); ++k) {
                const double zeta = r.zeta.at(i, j, k);
                const double margin = zeta - r.z.at(i, j, k);
                if (margin < -slack * std::max(1.0, std::abs(zeta))) r.passed = false;
                if (margin < r.worst_margin) {
                    r.worst_margin = margin;
                    r.worst_i = i;
                    r.worst_j = j;
                }
            }
        }
    }
    return r;
}

}  // namespace gvc
