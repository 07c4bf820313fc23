#pragma once

#include <span>

namespace gvc::dense {

// Small row-major dense helpers for the n x n blocks that appear in kernels
// and Jacobians. n is expected to be tiny (state dimension).

/// Solves M x = rhs in place (rhs becomes x). M is destroyed. Partial pivoting.
/// Returns false when M is numerically singular.
bool solve_in_place(std::span<double> M, std::span<double> rhs, int n);

/// Max row sum of |block|; the operator norm induced by the max-norm.
double inf_norm(const double* block, int m);

/// out += c * (block * x)    (block m x m, x column m-vector)
inline void gemv_acc(const double* block, const double* x, double c, double* out, int m) {
    for (int r = 0; r < m; ++r) {
        double acc = 0.0;
        for (int k = 0; k < m; ++k) acc += block[r * m + k] * x[k];
        out[r] += c * acc;
    }
}

/// out += c * (x^T * block)  (row covector times block)
inline void gevm_acc(const double* x, const double* block, double c, double* out, int m) {
    for (int k = 0; k < m; ++k) {
        const double xk = c * x[k];
        if (xk == 0.0) continue;
        for (int r = 0; r < m; ++r) out[r] += xk * block[k * m + r];
    }
}

/// out += c * (L * K)  for m x m blocks
inline void gemm_acc(const double* L, const double* K, double c, double* out, int m) {
    if (m == 1) {
        out[0] += c * L[0] * K[0];
        return;
    }
    for (int r = 0; r < m; ++r) {
        for (int k = 0; k < m; ++k) {
            const double lrk = c * L[r * m + k];
            if (lrk == 0.0) continue;
            for (int q = 0; q < m; ++q) out[r * m + q] += lrk * K[k * m + q];
        }
    }
}

}  // namespace gvc::dense
