// AVX2 + FMA kernel variants. Compiled with -mavx2 -mfma in its own
// translation unit; only reachable through the dispatch table after a
// runtime CPU check.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "d2d/kern/kernels.hpp"

namespace d2d::kern {
namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double acc = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void vmax_avx2(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_max_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(acc + i, v);
    }
    for (; i < n; ++i) {
        if (x[i] > acc[i]) acc[i] = x[i];
    }
}

void relu_avx2(double* y, const double* x, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    }
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_avx2(double* dx, const double* z, const double* dy, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(z + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(dx + i, _mm256_and_pd(mask, _mm256_loadu_pd(dy + i)));
    }
    for (; i < n; ++i) dx[i] = z[i] > 0.0 ? dy[i] : 0.0;
}

void square_avx2(double* y, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_mul_pd(v, v));
    }
    for (; i < n; ++i) y[i] = x[i] * x[i];
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    }
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double acc = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

void adam_avx2(double* p, double* m, double* v, const double* g, std::size_t n,
               const AdamStep& s) {
    const __m256d b1 = _mm256_set1_pd(s.beta1);
    const __m256d b2 = _mm256_set1_pd(s.beta2);
    const __m256d one_b1 = _mm256_set1_pd(1.0 - s.beta1);
    const __m256d one_b2 = _mm256_set1_pd(1.0 - s.beta2);
    const __m256d bc1 = _mm256_set1_pd(s.bc1);
    const __m256d bc2 = _mm256_set1_pd(s.bc2);
    const __m256d lr = _mm256_set1_pd(s.lr);
    const __m256d eps = _mm256_set1_pd(s.eps);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d gi = _mm256_loadu_pd(g + i);
        __m256d mi = _mm256_fmadd_pd(b1, _mm256_loadu_pd(m + i), _mm256_mul_pd(one_b1, gi));
        __m256d vi = _mm256_fmadd_pd(b2, _mm256_loadu_pd(v + i),
                                     _mm256_mul_pd(one_b2, _mm256_mul_pd(gi, gi)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        const __m256d mhat = _mm256_mul_pd(mi, bc1);
        const __m256d vhat = _mm256_mul_pd(vi, bc2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), eps);
        const __m256d upd = _mm256_div_pd(_mm256_mul_pd(lr, mhat), denom);
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), upd));
    }
    for (; i < n; ++i) {
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
        p[i] -= s.lr * (m[i] * s.bc1) / (std::sqrt(v[i] * s.bc2) + s.eps);
    }
}

}  // namespace

const Kernels* avx2_table() {
    static const Kernels k{dot_avx2,  axpy_avx2,   vmax_avx2, relu_avx2,
                           relu_bwd_avx2, square_avx2, sum_avx2,  adam_avx2};
    return &k;
}

}  // namespace d2d::kern

#else

#include "d2d/kern/kernels.hpp"

namespace d2d::kern {
const Kernels* avx2_table() { return nullptr; }
}  // namespace d2d::kern

#endif
