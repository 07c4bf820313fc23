#pragma once

#include <optional>
#include <vector>

#include "gvc/grid.hpp"
#include "gvc/problem.hpp"

namespace gvc {

struct ForwardOptions {
    double tol = 1e-12;  ///< stop when the sup-norm Picard update is <= tol
    int max_iters = 200;
    std::optional<double> mu;       ///< also log deltas in the e^{-mu(s+t)} weighted norm
    std::optional<Field> initial;   ///< starting iterate; defaults to f0
};

struct ForwardResult {
    Field y;
    std::vector<double> deltas;           ///< sup-norm update per iteration
    std::vector<double> weighted_deltas;  ///< filled only when opts.mu is set
    int iterations = 0;
    double final_delta = 0.0;
};

/// One application of the discrete Picard operator S (product trapezoid).
Field picard_map(const ProblemDef& p, const ControlField& u, const Grid& g, const Field& y);

/// Solves y = S(y) by successive approximation.
/// Throws DivergenceError after max_iters, NumericalError at the first
/// non-finite node.
ForwardResult solve_forward(const ProblemDef& p, const ControlField& u, const Grid& g,
                            const ForwardOptions& opts = {});

/// sup over nodes of e^{-mu (s+t)} |z(s,t)|_inf
double weighted_norm(const Field& z, const Grid& g, double mu);

/// mu^-1 (1 - e^{-mu(A+B)}) (L1 + L2) + mu^-2 (2 - e^{-mu A} - e^{-mu B}) L12
double contraction_factor(double L1, double L2, double L12, double A, double B, double mu);

/// Smallest mu (doubling, then bisection to 1e-6) with contraction_factor <= q_target.
double choose_mu(double L1, double L2, double L12, double A, double B, double q_target);

/// Lower end of the choose_mu search.
inline constexpr double kMuLowerBound = 1e-6;

}  // namespace gvc
