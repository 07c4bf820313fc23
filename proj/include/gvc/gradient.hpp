#pragma once

#include <vector>

#include "gvc/costate.hpp"
#include "gvc/forward.hpp"
#include "gvc/grid.hpp"
#include "gvc/problem.hpp"

namespace gvc {

/// Gradient of J with respect to the node samples of (u1, u2, u12), expressed
/// against the trapezoid-weighted control inner product (control_inner), so
/// that dJ[du] = <gradient, du>_w.
struct GradientField {
    int p1 = 0;
    int p2 = 0;
    int p12 = 0;
    std::vector<double> g_u1;  ///< ns * p1
    std::vector<double> g_u2;  ///< nt * p2
    Field g_u12;               ///< ns x nt x p12

    /// Endpoint contributions, already folded into the last samples above:
    /// u1(A) <- grad h0 + int grad h2 dt; u2(B) <- grad h0 + int grad h1 ds;
    /// u12(A,B) <- grad h0. Unweighted.
    struct Endpoint {
        std::vector<double> u1_A;
        std::vector<double> u2_B;
        std::vector<double> u12_AB;
    } g_end;

    /// The gradient as a control-shaped direction (boxes copied from `like`).
    ControlField as_control(const ControlField& like) const;
};

/// J = F0 + int F1 ds + int F2 dt + intint F12, product trapezoid.
double cost(const ProblemDef& p, const Field& y, const ControlField& u, const Grid& g);

/// Assembles the Hamiltonian control gradients into a GradientField.
GradientField gradient(const ProblemDef& p, const Field& y, const ControlField& u,
                       const CoState& psi, const Grid& g);

/// <gradient, du>_w
double gradient_inner(const GradientField& gr, const ControlField& du, const Grid& g);

struct FdResult {
    double value = 0.0;       ///< central difference at eps
    double value_half = 0.0;  ///< central difference at eps/2 (Richardson check)
    double eps = 0.0;         ///< step actually used after shrinking into the boxes
};

/// (J(u + eps du) - J(u - eps du)) / (2 eps), shrinking eps until both
/// perturbed controls lie in their boxes. Throws InvalidArgument if no
/// such eps exists, and propagates forward-solver failures.
FdResult fd_directional(const ProblemDef& p, const ControlField& u, const ControlField& du,
                        const Grid& g, double eps = 1e-5, const ForwardOptions& fopts = {});

struct Variation {
    Field dy;
    double dJ = 0.0;
};

/// Solves the linearized state equation for dy given du and evaluates the
/// first variation of J directly from dy and du.
Variation variation(const ProblemDef& p, const Field& y, const ControlField& u,
                    const ControlField& du, const Grid& g);

}  // namespace gvc
