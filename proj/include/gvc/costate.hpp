#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "gvc/grid.hpp"
#include "gvc/gvlinalg.hpp"
#include "gvc/problem.hpp"

namespace gvc {

/// Co-state (psi0, psi1(s), psi2(t), psi12(s,t)); every entry is a row covector of length n.
struct CoState {
    int n = 0;
    std::vector<double> psi0;  ///< n
    std::vector<double> psi1;  ///< ns * n
    std::vector<double> psi2;  ///< nt * n
    Field psi12;               ///< ns x nt x n

    std::span<const double> psi1_at(int a) const {
        return {psi1.data() + std::size_t(a) * n, std::size_t(n)};
    }
    std::span<const double> psi2_at(int b) const {
        return {psi2.data() + std::size_t(b) * n, std::size_t(n)};
    }
};

/// y-Jacobians of f1, f2, f12 along (y, u), sampled on the causal region.
KernelTriple linearized_kernels(const ProblemDef& p, const Field& y, const ControlField& u,
                                const Grid& g);

/// Forcing of the psi12 equation, given psi0, psi1, psi2.
Field costate_forcing(const ProblemDef& p, const Field& y, const ControlField& u, const Grid& g,
                      const KernelTriple& K, const CoState& psi);

/// Solves the backward Hamiltonian equations by exact node-by-node
/// substitution: psi0 in closed form, psi1 and psi2 along their edges,
/// then psi12 over the grid.
CoState solve_costate(const ProblemDef& p, const Field& y, const ControlField& u, const Grid& g);

/// Same object through the resolvent of the linearized kernels:
/// psi1 = rho1 + rho1 (x)~ R1, psi2 likewise, psi12 = zeta0 + zeta0 (x)~_0 R.
CoState costate_via_resolvent(const ProblemDef& p, const Field& y, const ControlField& u,
                              const Grid& g, double tol);

struct CostateResiduals {
    double psi1 = 0.0;
    double psi2 = 0.0;
    double psi12 = 0.0;
    double max() const { return std::max({psi1, psi2, psi12}); }
};

/// Plugs psi back into the right-hand sides of the backward equations.
CostateResiduals costate_residuals(const ProblemDef& p, const Field& y, const ControlField& u,
                                   const Grid& g, const CoState& psi);

enum class HamiltonianKind { h0, h1, h2, h12 };

/// Which Hamiltonian to evaluate: h1 at s_i, h2 at t_j, h12 at (s_i, t_j).
struct HamiltonianAt {
    HamiltonianKind kind = HamiltonianKind::h12;
    int i = 0;
    int j = 0;
};

/// Value of the chosen Hamiltonian. `control` replaces the control triple at the
/// evaluation node (U(s_i,B) for h1, U(A,t_j) for h2, U(A,B) for h0,
/// U(s_i,t_j) for h12); the state and co-state stay fixed.
/// Throws InvalidArgument for an out-of-range location.
double hamiltonian(const ProblemDef& p, const Field& y, const ControlField& u,
                   const CoState& psi, const Grid& g, HamiltonianAt at,
                   std::optional<ControlView> control = std::nullopt);

}  // namespace gvc
