#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gvc/costate.hpp"
#include "gvc/forward.hpp"
#include "gvc/gradient.hpp"
#include "gvc/grid.hpp"
#include "gvc/problem.hpp"

namespace gvc {

struct OptimizeOptions {
    int max_outer = 200;
    double step0 = 1.0;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double stat_tol = 1e-6;
    /// Stop early once J drops to this value (useful when the optimum is known to be 0).
    double target_cost = -std::numeric_limits<double>::infinity();
    ForwardOptions forward;
};

struct OptimizeRecord {
    int k = 0;
    double J = 0.0;
    double stationarity = 0.0;
    double step = 0.0;  ///< step accepted from this iterate (0 on the last record)
};

struct OptimizeResult {
    ControlField u;
    Field y;
    CoState psi;
    GradientField grad;
    std::vector<OptimizeRecord> history;
    bool converged = false;
    int iterations = 0;
};

/// Raised when a solve fails mid-run or the line search stalls; carries the
/// last accepted iterate.
class OptimizeError : public std::runtime_error {
public:
    OptimizeError(const std::string& what, ControlField snapshot, int iteration)
        : std::runtime_error(what), snapshot_(std::move(snapshot)), iteration_(iteration) {}
    const ControlField& snapshot() const noexcept { return snapshot_; }
    int iteration() const noexcept { return iteration_; }

private:
    ControlField snapshot_;
    int iteration_;
};

/// Componentwise clamp of every sample into its box. Throws InvalidArgument
/// for an inverted box.
ControlField project(const ControlField& u);

/// || u - project(u - G) ||_inf
double stationarity(const ControlField& u, const GradientField& gr);

/// Projected gradient descent with Armijo backtracking and
/// Barzilai-Borwein initial steps.
OptimizeResult optimize(const ProblemDef& p, const ControlField& u0, const Grid& g,
                        const OptimizeOptions& opts = {});

struct ClaimResult {
    std::string claim;
    bool applicable = false;
    int tested = 0;
    int passed = 0;
    double fraction = 0.0;
    double worst_violation = 0.0;  ///< max over points of objective(current) - sampled min
    int worst_i = -1;
    int worst_j = -1;
    std::vector<int> argmin;  ///< per tested point, index of the best sample
};

struct ExtremumReport {
    std::vector<ClaimResult> claims;
    const ClaimResult* find(const std::string& name) const;
};

/// Audits the partial extremum principle by lattice sampling: for each claim
/// whose independence precondition holds, compares the claim's objective at
/// the current control with its minimum over n_samples candidates per point
/// (uniform lattice over the box plus its corners; a +-1 window around the
/// current value on unbounded sides). Claims:
///   u12        h12 at interior nodes           (f0, f1, f2 independent of u12)
///   u1         h1 + int h12 dt, 0 < s < A      (f0, f2 independent of u1)
///   u2         h2 + int h12 ds, 0 < t < B      (f0, f1 independent of u2)
///   u12_A      h2 in u12(A,t), 0 < t < B       (f0 independent of u12)
///   u12_B      h1 in u12(s,B), 0 < s < A       (f0 independent of u12)
///   u1_A       h0 + int F2 dt in u1(A)
///   u2_B       h0 + int F1 ds in u2(B)
///   u12_AB     h0 in u12(A,B)
ExtremumReport check_extremum_principle(const ProblemDef& p, const ControlField& u,
                                        const Field& y, const CoState& psi, const Grid& g,
                                        int n_samples, double tol);

}  // namespace gvc
