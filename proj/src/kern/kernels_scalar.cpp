#include <cmath>
#include <cstddef>

#include "d2d/kern/kernels.hpp"

// Reference kernels. Plain loops, fixed left-to-right accumulation order.

namespace d2d::kern {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void vmax_scalar(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] > acc[i]) acc[i] = x[i];
    }
}

void relu_scalar(double* y, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_scalar(double* dx, const double* z, const double* dy, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dx[i] = z[i] > 0.0 ? dy[i] : 0.0;
}

void square_scalar(double* y, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void adam_scalar(double* p, double* m, double* v, const double* g, std::size_t n,
                 const AdamStep& s) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
        const double mhat = m[i] * s.bc1;
        const double vhat = v[i] * s.bc2;
        p[i] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
    }
}

}  // namespace

const Kernels& scalar_table() {
    static const Kernels k{dot_scalar,  axpy_scalar,   vmax_scalar, relu_scalar,
                           relu_bwd_scalar, square_scalar, sum_scalar,  adam_scalar};
    return k;
}

}  // namespace d2d::kern
