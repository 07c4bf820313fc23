#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gvc/grid.hpp"

namespace gvc {

/// Control values seen by the dynamics at one integration node:
/// (u1(sigma), u2(tau), u12(sigma, tau)).
struct ControlView {
    std::span<const double> u1;
    std::span<const double> u2;
    std::span<const double> u12;
};

/// Jacobian of an n-vector mapping with respect to each control block.
/// Each span is n x p_block, row-major.
struct ControlJacobian {
    std::span<double> u1;
    std::span<double> u2;
    std::span<double> u12;
};

/// Gradient of a scalar mapping with respect to each control block.
struct ControlGradient {
    std::span<double> u1;
    std::span<double> u2;
    std::span<double> u12;
};

using Vec = std::span<const double>;
using Out = std::span<double>;

/// Componentwise bounds for one control block; +-inf marks an open side.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    static Box unbounded(int p);
    static Box uniform(int p, double lo, double hi);
    bool bounded() const;
};

/// A Goursat-Volterra optimal control problem
///
///   y(s,t) = f0(s,t,U(s,t)) + int_0^s f1(s,t,sig,y(sig,t),U(sig,t)) dsig
///          + int_0^t f2(s,t,tau,y(s,tau),U(s,tau)) dtau
///          + int_0^s int_0^t f12(s,t,sig,tau,y(sig,tau),U(sig,tau)) dtau dsig
///
///   J = F0(y(A,B),U(A,B)) + int F1(s,y(s,B),U(s,B)) ds
///     + int F2(t,y(A,t),U(A,t)) dt + intint F12(s,t,y,U) dt ds
///
/// with U(s,t) = (u1(s), u2(t), u12(s,t)).
///
/// Every output buffer is zero-filled before the callback runs, so a
/// callback only writes its nonzero entries. An empty std::function means
/// the mapping is identically zero. Gradients are row vectors; Jacobians
/// are row-major (row = output component).
struct ProblemDef {
    std::string name;
    int n = 1;
    int p1 = 0;
    int p2 = 0;
    int p12 = 0;

    std::function<void(double s, double t, const ControlView& u, Out out)> f0;
    std::function<void(double s, double t, double sig, Vec y, const ControlView& u, Out out)> f1;
    std::function<void(double s, double t, double tau, Vec y, const ControlView& u, Out out)> f2;
    std::function<void(double s, double t, double sig, double tau, Vec y, const ControlView& u,
                       Out out)>
        f12;

    std::function<void(double s, double t, double sig, Vec y, const ControlView& u, Out out)> dy_f1;
    std::function<void(double s, double t, double tau, Vec y, const ControlView& u, Out out)> dy_f2;
    std::function<void(double s, double t, double sig, double tau, Vec y, const ControlView& u,
                       Out out)>
        dy_f12;

    std::function<void(double s, double t, const ControlView& u, const ControlJacobian& out)> du_f0;
    std::function<void(double s, double t, double sig, Vec y, const ControlView& u,
                       const ControlJacobian& out)>
        du_f1;
    std::function<void(double s, double t, double tau, Vec y, const ControlView& u,
                       const ControlJacobian& out)>
        du_f2;
    std::function<void(double s, double t, double sig, double tau, Vec y, const ControlView& u,
                       const ControlJacobian& out)>
        du_f12;

    std::function<double(Vec y, const ControlView& u)> F0;
    std::function<double(double s, Vec y, const ControlView& u)> F1;
    std::function<double(double t, Vec y, const ControlView& u)> F2;
    std::function<double(double s, double t, Vec y, const ControlView& u)> F12;

    std::function<void(Vec y, const ControlView& u, Out gy, const ControlGradient& gu)> grad_F0;
    std::function<void(double s, Vec y, const ControlView& u, Out gy, const ControlGradient& gu)>
        grad_F1;
    std::function<void(double t, Vec y, const ControlView& u, Out gy, const ControlGradient& gu)>
        grad_F2;
    std::function<void(double s, double t, Vec y, const ControlView& u, Out gy,
                       const ControlGradient& gu)>
        grad_F12;

    /// Declared Lipschitz constants of f1, f2, f12 in y (max-norm).
    double L1 = 0.0;
    double L2 = 0.0;
    double L12 = 0.0;

    struct Independence {
        bool u1 = false;
        bool u2 = false;
        bool u12 = false;
    };
    /// Which control blocks f0, f1, f2 do not depend on.
    Independence indep_f0;
    Independence indep_f1;
    Independence indep_f2;

    /// Admissible sets for each control block; empty means unbounded.
    Box box1;
    Box box2;
    Box box12;
};


/// Node samples of (u1, u2, u12) plus their boxes. The values at s = A,
/// t = B double as the endpoint controls u1(A), u2(B), u12(s,B), ...
struct ControlField {
    int p1 = 0;
    int p2 = 0;
    int p12 = 0;
    std::vector<double> u1;  ///< ns * p1
    std::vector<double> u2;  ///< nt * p2
    Field u12;               ///< ns x nt x p12
    Box box1;
    Box box2;
    Box box12;

    std::span<double> u1_at(int a) { return {u1.data() + std::size_t(a) * p1, std::size_t(p1)}; }
    std::span<const double> u1_at(int a) const {
        return {u1.data() + std::size_t(a) * p1, std::size_t(p1)};
    }
    std::span<double> u2_at(int b) { return {u2.data() + std::size_t(b) * p2, std::size_t(p2)}; }
    std::span<const double> u2_at(int b) const {
        return {u2.data() + std::size_t(b) * p2, std::size_t(p2)};
    }
    ControlView at(int a, int b) const { return {u1_at(a), u2_at(b), u12(a, b)}; }
};

/// Zero-valued controls (clamped into the boxes) sized for p on g.
/// Missing boxes default to the problem's admissible boxes.
ControlField make_controls(const ProblemDef& p, const Grid& g, Box box1 = {}, Box box2 = {},
                           Box box12 = {});

/// Throws InvalidArgument if shapes disagree with (p, g), a box is
/// inverted, or a sample lies outside its box (slack `tol`).
void check_controls(const ProblemDef& p, const ControlField& u, const Grid& g, double tol = 0.0);

/// Throws InvalidArgument on negative dimensions, negative Lipschitz
/// constants, or missing mappings required by the declared dimensions.
void check_problem(const ProblemDef& p);

/// u + c * d, without projection.
ControlField axpy(const ControlField& u, double c, const ControlField& d);

/// sum w_a w_b <x12,y12> + sum w_a <x1,y1> + sum w_b <x2,y2>
double control_inner(const ControlField& x, const ControlField& y, const Grid& g);

/// max |entry| over all three blocks
double control_sup(const ControlField& x);

/// Flat copies of (u1, u2, u12) in that order, and the inverse.
std::vector<double> flatten(const ControlField& u);
void unflatten(std::span<const double> v, ControlField& u);

struct LipschitzCheck {
    std::string mapping;
    double observed = 0.0;
    double declared = 0.0;
    bool exceeds = false;
};

struct JacobianCheck {
    std::string mapping;
    double max_abs_err = 0.0;
};

struct ValidationReport {
    std::vector<LipschitzCheck> lipschitz;
    std::vector<JacobianCheck> jacobians;

    bool lipschitz_ok() const;
    double worst_jacobian_error() const;
    bool passes(double jac_tol) const { return lipschitz_ok() && worst_jacobian_error() <= jac_tol; }
};

/// Spot-checks declared Lipschitz constants and user Jacobians/gradients
/// against central differences at `trials` random sample points.
/// Deterministic for a fixed seed. Throws EvaluationError naming the
/// mapping if a callback throws or returns a non-finite value.
ValidationReport validate_problem(const ProblemDef& p, const Grid& g, int trials,
                                  std::uint64_t seed = 12345);

}  // namespace gvc
