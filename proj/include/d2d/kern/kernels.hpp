#pragma once

#include <cstddef>
#include <string>

// Dense inner loops shared by the solver, the network, and the optimizer.
// Every kernel has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized variant selected once at startup. Variants are
// equivalence-tested against the reference.
//
// Row-stability contract: a kernel's result depends only on its operands,
// never on the position of the row inside a larger batch. Vectorization is
// therefore only applied along the contiguous operand axis, which keeps
// batched MLP evaluation bitwise equal to row-by-row evaluation.

namespace d2d::kern {

// Per-step Adam constants; bc1/bc2 are the bias-correction factors
// 1/(1-beta1^t) and 1/(1-beta2^t).
struct AdamStep {
    double lr;
    double beta1;
    double beta2;
    double eps;
    double bc1;
    double bc2;
};

struct Kernels {
    // acc = dot(a, b)
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
    // acc = elementwise max(acc, x)
    void (*vmax)(double* acc, const double* x, std::size_t n);
    // y = max(x, 0)
    void (*relu)(double* y, const double* x, std::size_t n);
    // dx = z > 0 ? dy : 0   (z are pre-activations)
    void (*relu_bwd)(double* dx, const double* z, const double* dy, std::size_t n);
    // y = x * x
    void (*square)(double* y, const double* x, std::size_t n);
    // sum of elements
    double (*sum)(const double* x, std::size_t n);
    // fused Adam moment update + parameter step
    void (*adam)(double* p, double* m, double* v, const double* g, std::size_t n,
                 const AdamStep& step);
};

enum class Backend { Scalar, Avx2 };

// Active kernel table (resolved once, before main, to the best supported
// backend; override with force_backend for tests).
const Kernels& active();
Backend active_backend();
std::string backend_name();

// Returns false if the requested backend is not available on this CPU.
bool force_backend(Backend b);

// Tables for direct access in equivalence tests.
const Kernels& scalar_table();
const Kernels* avx2_table();  // nullptr when unavailable

// Convenience forwarders.
inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline void axpy(double* y, double alpha, const double* x, std::size_t n) {
    active().axpy(y, alpha, x, n);
}
inline void vmax(double* acc, const double* x, std::size_t n) {
    active().vmax(acc, x, n);
}
inline void relu(double* y, const double* x, std::size_t n) {
    active().relu(y, x, n);
}
inline void relu_bwd(double* dx, const double* z, const double* dy, std::size_t n) {
    active().relu_bwd(dx, z, dy, n);
}
inline void square(double* y, const double* x, std::size_t n) {
    active().square(y, x, n);
}
inline double sum(const double* x, std::size_t n) { return active().sum(x, n); }
inline void adam(double* p, double* m, double* v, const double* g, std::size_t n,
                 const AdamStep& step) {
    active().adam(p, m, v, g, n, step);
}

}  // namespace d2d::kern
