#pragma once

#include "tvglasso/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace tvglasso {

template <typename Scalar>
Scalar soft_threshold(Scalar x, Scalar tau) {
    if (x > tau) return x - tau;
    if (x < -tau) return x + tau;
    return Scalar{0};
}

// Proximal operator of w * TV(x) = w * sum_k |x[k+1] - x[k]| on a chain,
// i.e. argmin_x 0.5*||x - y||^2 + w*TV(x). Direct non-iterative algorithm
// (Condat 2013); plateaus come out exactly equal, which downstream code
// relies on to report exact zero differences.
template <typename Scalar>
void tv1d_prox(const Scalar* y, Index n, Scalar w, Scalar* x) {
    if (n <= 0) return;
    if (n == 1 || w <= Scalar{0}) {
        for (Index i = 0; i < n; ++i) x[i] = y[i];
        return;
    }
    Index k = 0, k0 = 0, kminus = 0, kplus = 0;
    Scalar vmin = y[0] - w;
    Scalar vmax = y[0] + w;
    Scalar umin = w;
    Scalar umax = -w;
    const Scalar two_w = 2 * w;
    for (;;) {
        while (k == n - 1) {
            if (umin < Scalar{0}) {
                do x[k0++] = vmin;
                while (k0 <= kminus);
                k = kminus = k0;
                vmin = y[k];
                umin = w;
                umax = y[k] + w - vmax;
            } else if (umax > Scalar{0}) {
                do x[k0++] = vmax;
                while (k0 <= kplus);
                k = kplus = k0;
                vmax = y[k];
                umax = -w;
                umin = y[k] - w - vmin;
            } else {
                vmin += umin / static_cast<Scalar>(k - k0 + 1);
                do x[k0++] = vmin;
                while (k0 <= k);
                return;
            }
        }
        umin += y[k + 1] - vmin;
        if (umin < -w) {
            do x[k0++] = vmin;
            while (k0 <= kminus);
            k = kplus = kminus = k0;
            vmin = y[k];
            vmax = y[k] + two_w;
            umin = w;
            umax = -w;
        } else {
            umax += y[k + 1] - vmax;
            if (umax > w) {
                do x[k0++] = vmax;
                while (k0 <= kplus);
                k = kplus = kminus = k0;
                vmin = y[k] - two_w;
                vmax = y[k];
                umin = w;
                umax = -w;
            } else {
                ++k;
                if (umin >= w) {
                    vmin += (umin - w) / static_cast<Scalar>(k - k0 + 1);
                    umin = w;
                    kminus = k;
                }
                if (umax <= -w) {
                    vmax += (umax + w) / static_cast<Scalar>(k - k0 + 1);
                    umax = -w;
                    kplus = k;
                }
            }
        }
    }
}

template <typename Scalar>
std::vector<Scalar> tv1d_prox(const std::vector<Scalar>& y, Scalar w) {
    std::vector<Scalar> x(y.size());
    tv1d_prox(y.data(), static_cast<Index>(y.size()), w, x.data());
    return x;
}

// argmin_T  -log det T + tr(S T) + (rho/2)*||T - A||_F^2  over T > 0,
// equivalently the solution of rho*T - T^{-1} = rho*A - S. Solved exactly
// through the eigendecomposition of G = rho*A - S; always returns a
// positive definite matrix.
template <typename Scalar>
MatrixX<Scalar> logdet_prox(const MatrixX<Scalar>& G, Scalar rho) {
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(G);
    VectorX<Scalar> d = eig.eigenvalues();
    for (Index i = 0; i < d.size(); ++i) {
        const Scalar root = std::sqrt(d(i) * d(i) + 4 * rho);
        // cancellation-free branch keeps tiny eigenvalues positive
        d(i) = (d(i) >= Scalar{0}) ? (d(i) + root) / (2 * rho) : 2 / (root - d(i));
    }
    MatrixX<Scalar> out =
        eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
    // symmetrize away the rounding skew
    out = ((out + out.transpose()) / 2).eval();
    return out;
}

}  // namespace tvglasso
