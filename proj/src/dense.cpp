#include "gvc/dense.hpp"

#include <cmath>
#include <utility>

namespace gvc::dense {

bool solve_in_place(std::span<double> M, std::span<double> rhs, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(M[col * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(M[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (!(best > 1e-300)) return false;
        if (piv != col) {
            for (int k = 0; k < n; ++k) std::swap(M[col * n + k], M[piv * n + k]);
            std::swap(rhs[col], rhs[piv]);
        }
        const double d = M[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = M[r * n + col] / d;
            if (f == 0.0) continue;
            for (int k = col; k < n; ++k) M[r * n + k] -= f * M[col * n + k];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int k = r + 1; k < n; ++k) acc -= M[r * n + k] * rhs[k];
        rhs[r] = acc / M[r * n + r];
    }
    return true;
}

double inf_norm(const double* block, int m) {
    double best = 0.0;
    for (int r = 0; r < m; ++r) {
        double row = 0.0;
        for (int k = 0; k < m; ++k) row += std::abs(block[r * m + k]);
        if (row > best) best = row;
    }
    return best;
}

}  // namespace gvc::dense
