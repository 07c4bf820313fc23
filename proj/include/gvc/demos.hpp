#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gvc/grid.hpp"
#include "gvc/problem.hpp"

namespace gvc {

/// y = s t recovered exactly by the trapezoid rule: f1 = y, f0 = s t - t s^2 / 2.
ProblemDef make_manufactured_linear();

/// y = 1 + int_0^s y, solution e^s.
ProblemDef make_exponential();

enum class LqKind {
    regularized,    ///< F12 = (y - y_ref)^2 / 2 + rho u^2 / 2, y_ref smooth
    inverse_crime,  ///< rho = 0, y_ref produced by a known control u_true
    decoupled,      ///< F12 = (u - c(s,t))^2 / 2; optimum u = c
};

struct LqOptions {
    LqKind kind = LqKind::regularized;
    double a = 0.1;
    double rho = 1e-2;  ///< ignored for inverse_crime (forced to 0) and decoupled
    double scale = 1.0;  ///< amplitude of y_ref, u_true or c; 0 makes the target vanish
};

/// What is known about the optimum of a synthetic LQ instance.
struct LqDescriptor {
    LqKind kind = LqKind::regularized;
    double a = 0.0;
    double rho = 0.0;
    Field y_ref;                  ///< tracking target (empty for decoupled)
    std::optional<Field> u_star;  ///< known minimizer: u_true or c
    std::optional<double> J_star; ///< known optimal cost
};

struct SyntheticLq {
    ProblemDef problem;
    LqDescriptor optimum;
};

/// Scalar state, scalar distributed control: f12 = a y + u, f0 = f1 = f2 = 0.
/// Coefficients of the smooth targets are drawn from `seed`.
SyntheticLq make_synthetic_lq(const Grid& g, std::uint64_t seed, const LqOptions& opts = {});

/// K(s,t,tau) and its t-derivative.
struct MemoryKernel {
    std::function<double(double s, double t, double tau)> K;
    std::function<double(double s, double t, double tau)> K_t;
};

/// K = kappa exp(-lambda (t - tau))
MemoryKernel exponential_kernel(double kappa, double lambda);

struct ChromatographyParams {
    double beta = 1.0;
    MemoryKernel kernel = exponential_kernel(0.5, 1.0);
    double mu_reg = 1e-3;
    double v_lo = 0.5;
    double v_hi = 2.0;
    /// Velocity used inside the memory term, whose exact form would couple
    /// v along whole time columns.
    double v_ref = 1.0;
    std::function<double(double t)> inlet;       ///< phi(0, t); default Gaussian pulse
    std::function<double(double t)> inlet_dt;
    std::function<double(double s)> initial;     ///< phi(s, 0); default small Gaussian
    std::function<double(double s)> initial_ds;
    std::function<double(double s, double t)> phi0;  ///< tracking target; default travelling pulse
    double resolvent_tol = 1e-12;
};

/// Grid tables behind the chromatography dynamics. Indices: i for s or
/// sigma, j for t, b for tau (b <= j).
struct ChromatographyTables {
    int ns = 0;
    int nt = 0;
    std::vector<double> l0, l0_t;        ///< ns x nt
    std::vector<double> l1, l1_t;        ///< ns x nt x nt
    std::vector<double> a3_tilde;        ///< ns x nt x nt: int_tau^t a3 l1_t
    std::vector<double> a3_tilde_t;      ///< ns x nt x nt
    std::vector<double> alpha0, alpha2;  ///< ns x nt; a0 = alpha0 / v, a2 = alpha2 / v

    double l0_at(int i, int j) const { return l0[std::size_t(i) * nt + j]; }
    double l1_at(int i, int j, int b) const { return l1[(std::size_t(i) * nt + j) * nt + b]; }
    double l1_t_at(int i, int j, int b) const { return l1_t[(std::size_t(i) * nt + j) * nt + b]; }
};

/// Throws InvalidArgument if beta <= 0, mu_reg < 0, the velocity box is not
/// 0 < v_lo <= v_ref <= v_hi, a profile is missing, or beta + K(s,t,t) <= 0
/// at some node.
ChromatographyTables chromatography_tables(const Grid& g, const ChromatographyParams& prm);

/// State [phi, phi_s, phi_t], control u12 = v. The problem is tied to g:
/// callbacks look up the grid tables at the nearest node.
ProblemDef make_chromatography(const Grid& g, const ChromatographyParams& prm = {});

/// A registered demo: the problem, a starting control and, when known, the optimum.
struct Demo {
    ProblemDef problem;
    ControlField u0;
    std::optional<LqDescriptor> lq;
};

/// manufactured_linear, exponential, synthetic_lq, lq_inverse_crime,
/// decoupled_quadratic, chromatography
const std::vector<std::string>& demo_names();

/// Throws InvalidArgument naming the key if `name` is not registered.
/// `lq.kind` is ignored; the name selects the LQ variant.
Demo make_demo(const std::string& name, const Grid& g, std::uint64_t seed = 1,
               const ChromatographyParams& chrom = {}, const LqOptions& lq = {});

}  // namespace gvc
