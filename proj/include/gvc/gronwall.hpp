#pragma once

#include <vector>

#include "gvc/grid.hpp"
#include "gvc/gvlinalg.hpp"

namespace gvc {

/// Double power series solution of the constant-coefficient equation
///   zeta = A0 + B1 int_{s1}^{s} zeta + B2 int_{t1}^{t} zeta + B12 intint zeta
/// as zeta = A0 sum_{k,l} C[k][l] ds^k dt^l.
struct GronwallCoeffs {
    double A0 = 0.0;
    double B1 = 0.0;
    double B2 = 0.0;
    double B12 = 0.0;
    std::vector<std::vector<double>> C;  ///< (kmax+1) x (lmax+1)

    int kmax() const noexcept { return static_cast<int>(C.size()) - 1; }
    int lmax() const noexcept { return C.empty() ? -1 : static_cast<int>(C[0].size()) - 1; }
};

/// max(|B1|, |B2|, sqrt(|B12|/3))
double gronwall_B(double B1, double B2, double B12);

/// Fills C from the boundary rows B1^k/k!, B2^l/l! and the three-term recursion.
/// Throws InvalidArgument for negative orders.
GronwallCoeffs gronwall_coeffs(double A0, double B1, double B2, double B12, int kmax, int lmax);

/// (3B)^{k+l} / (k! l!)
double gronwall_coeff_bound(double B, int k, int l);

/// Evaluates the truncated series. The neglected part is bounded through
/// gronwall_coeff_bound; throws TruncationError unless that bound is below
/// rel_tol * |result|. Throws InvalidArgument for ds < 0 or dt < 0.
double gronwall_eval(const GronwallCoeffs& c, double ds, double dt, double rel_tol = 1e-12);

/// Upper bound on the neglected terms of gronwall_eval (including the |A0| factor).
double gronwall_tail_bound(const GronwallCoeffs& c, double ds, double dt);

/// Picks orders large enough for rel_tol and evaluates.
double gronwall_solve(double A0, double B1, double B2, double B12, double ds, double dt,
                      double rel_tol = 1e-12);

/// A0 exp(3B ds dt)
double gronwall_bound(double A0, double B1, double B2, double B12, double ds, double dt);

/// A0 exp(3B (ds + dt)): the bound implied by summing the coefficient bound.
double gronwall_bound_separable(double A0, double B1, double B2, double B12, double ds,
                                double dt);

struct ComparisonResult {
    bool passed = false;
    double worst_margin = 0.0;  ///< min over nodes and components of zeta - z (negative on failure)
    int worst_i = -1;
    int worst_j = -1;
    Field zeta;
    Field z;
};

/// Solves zeta = zeta_forcing + phi (x)_0 zeta and z = z_forcing + phi (x)_0 z
/// with solve_linear and checks z <= zeta + slack everywhere. Throws
/// InvalidArgument if any kernel entry or forcing is negative, or if
/// z_forcing exceeds zeta_forcing somewhere.
ComparisonResult check_comparison(const Field& zeta_forcing, const Field& z_forcing,
                                  const KernelTriple& phi, const Grid& g, double tol = 1e-12,
                                  double slack = 1e-10);

}  // namespace gvc
