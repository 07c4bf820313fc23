#pragma once

// Internal helpers: evaluate ProblemDef mappings into zero-filled buffers,
// treating empty callbacks as identically zero.

#include <algorithm>
#include <span>
#include <vector>

#include "gvc/problem.hpp"

namespace gvc::detail {

inline void zero(std::span<double> v) { std::fill(v.begin(), v.end(), 0.0); }

inline void eval_f0(const ProblemDef& p, double s, double t, const ControlView& u, Out out) {
    zero(out);
    if (p.f0) p.f0(s, t, u, out);
}
inline void eval_f1(const ProblemDef& p, double s, double t, double sig, Vec y, const ControlView& u,
                    Out out) {
    zero(out);
    if (p.f1) p.f1(s, t, sig, y, u, out);
}
inline void eval_f2(const ProblemDef& p, double s, double t, double tau, Vec y, const ControlView& u,
                    Out out) {
    zero(out);
    if (p.f2) p.f2(s, t, tau, y, u, out);
}
inline void eval_f12(const ProblemDef& p, double s, double t, double sig, double tau, Vec y,
                     const ControlView& u, Out out) {
    zero(out);
    if (p.f12) p.f12(s, t, sig, tau, y, u, out);
}

inline void eval_dy_f1(const ProblemDef& p, double s, double t, double sig, Vec y,
                       const ControlView& u, Out out) {
    zero(out);
    if (p.dy_f1) p.dy_f1(s, t, sig, y, u, out);
}
inline void eval_dy_f2(const ProblemDef& p, double s, double t, double tau, Vec y,
                       const ControlView& u, Out out) {
    zero(out);
    if (p.dy_f2) p.dy_f2(s, t, tau, y, u, out);
}
inline void eval_dy_f12(const ProblemDef& p, double s, double t, double sig, double tau, Vec y,
                        const ControlView& u, Out out) {
    zero(out);
    if (p.dy_f12) p.dy_f12(s, t, sig, tau, y, u, out);
}

/// Buffers for a control Jacobian (n x p per block).
struct JacBuf {
    std::vector<double> u1, u2, u12;
    JacBuf(const ProblemDef& p) : u1(p.n * p.p1), u2(p.n * p.p2), u12(p.n * p.p12) {}
    ControlJacobian view() { return {u1, u2, u12}; }
    void clear() {
        zero(u1);
        zero(u2);
        zero(u12);
    }
};

/// Buffers for a scalar cost gradient.
struct GradBuf {
    std::vector<double> y, u1, u2, u12;
    GradBuf(const ProblemDef& p) : y(p.n), u1(p.p1), u2(p.p2), u12(p.p12) {}
    ControlGradient view() { return {u1, u2, u12}; }
    void clear() {
        zero(y);
        zero(u1);
        zero(u2);
        zero(u12);
    }
};

inline void eval_du_f0(const ProblemDef& p, double s, double t, const ControlView& u, JacBuf& J) {
    J.clear();
    if (p.du_f0) p.du_f0(s, t, u, J.view());
}
inline void eval_du_f1(const ProblemDef& p, double s, double t, double sig, Vec y,
                       const ControlView& u, JacBuf& J) {
    J.clear();
    if (p.du_f1) p.du_f1(s, t, sig, y, u, J.view());
}
inline void eval_du_f2(const ProblemDef& p, double s, double t, double tau, Vec y,
                       const ControlView& u, JacBuf& J) {
    J.clear();
    if (p.du_f2) p.du_f2(s, t, tau, y, u, J.view());
}
inline void eval_du_f12(const ProblemDef& p, double s, double t, double sig, double tau, Vec y,
                        const ControlView& u, JacBuf& J) {
    J.clear();
    if (p.du_f12) p.du_f12(s, t, sig, tau, y, u, J.view());
}

inline double eval_F0(const ProblemDef& p, Vec y, const ControlView& u) {
    return p.F0 ? p.F0(y, u) : 0.0;
}
inline double eval_F1(const ProblemDef& p, double s, Vec y, const ControlView& u) {
    return p.F1 ? p.F1(s, y, u) : 0.0;
}
inline double eval_F2(const ProblemDef& p, double t, Vec y, const ControlView& u) {
    return p.F2 ? p.F2(t, y, u) : 0.0;
}
inline double eval_F12(const ProblemDef& p, double s, double t, Vec y, const ControlView& u) {
    return p.F12 ? p.F12(s, t, y, u) : 0.0;
}

inline void eval_grad_F0(const ProblemDef& p, Vec y, const ControlView& u, GradBuf& G) {
    G.clear();
    if (p.grad_F0) p.grad_F0(y, u, G.y, G.view());
}
inline void eval_grad_F1(const ProblemDef& p, double s, Vec y, const ControlView& u, GradBuf& G) {
    G.clear();
    if (p.grad_F1) p.grad_F1(s, y, u, G.y, G.view());
}
inline void eval_grad_F2(const ProblemDef& p, double t, Vec y, const ControlView& u, GradBuf& G) {
    G.clear();
    if (p.grad_F2) p.grad_F2(t, y, u, G.y, G.view());
}
inline void eval_grad_F12(const ProblemDef& p, double s, double t, Vec y, const ControlView& u,
                          GradBuf& G) {
    G.clear();
    if (p.grad_F12) p.grad_F12(s, t, y, u, G.y, G.view());
}

/// out += c * (row covector x) * (n x p matrix M)
inline void covec_times(std::span<const double> x, const std::vector<double>& M, int p, double c,
                        std::span<double> out) {
    if (p == 0 || c == 0.0) return;
    const int n = static_cast<int>(x.size());
    for (int r = 0; r < n; ++r) {
        const double xr = c * x[r];
        if (xr == 0.0) continue;
        for (int q = 0; q < p; ++q) out[q] += xr * M[r * p + q];
    }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

}  // namespace gvc::detail
