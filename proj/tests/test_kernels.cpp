#include <doctest.h>

#include <cmath>
#include <vector>

#include "d2d/kern/kernels.hpp"
#include "d2d/util/rng.hpp"

using namespace d2d;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -2.0,
                               double hi = 2.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

bool close_rel(double a, double b, double tol) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) <= tol * scale;
}

// Sizes straddling the vector width to hit every remainder path.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 257};

}  // namespace

TEST_CASE("scalar and avx2 kernels agree") {
    const kern::Kernels& ref = kern::scalar_table();
    const kern::Kernels* simd = kern::avx2_table();
    if (simd == nullptr || !kern::force_backend(kern::Backend::Avx2)) {
        MESSAGE("avx2 unavailable on this host; equivalence suite skipped");
        return;
    }
    kern::force_backend(kern::Backend::Scalar);

    Rng rng(99);
    for (std::size_t n : kSizes) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);

        CHECK(close_rel(ref.dot(a.data(), b.data(), n), simd->dot(a.data(), b.data(), n),
                        1e-13));
        CHECK(close_rel(ref.sum(a.data(), n), simd->sum(a.data(), n), 1e-13));

        {
            auto y1 = random_vec(rng, n);
            auto y2 = y1;
            ref.axpy(y1.data(), 1.37, a.data(), n);
            simd->axpy(y2.data(), 1.37, a.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(close_rel(y1[i], y2[i], 1e-14));
        }
        {
            auto acc1 = random_vec(rng, n);
            auto acc2 = acc1;
            ref.vmax(acc1.data(), a.data(), n);
            simd->vmax(acc2.data(), a.data(), n);
            CHECK(acc1 == acc2);  // max is exact
        }
        {
            std::vector<double> y1(n), y2(n);
            ref.relu(y1.data(), a.data(), n);
            simd->relu(y2.data(), a.data(), n);
            CHECK(y1 == y2);
            std::vector<double> dx1(n), dx2(n);
            ref.relu_bwd(dx1.data(), a.data(), b.data(), n);
            simd->relu_bwd(dx2.data(), a.data(), b.data(), n);
            CHECK(dx1 == dx2);
        }
        {
            std::vector<double> y1(n), y2(n);
            ref.square(y1.data(), a.data(), n);
            simd->square(y2.data(), a.data(), n);
            CHECK(y1 == y2);  // single multiply, identical rounding
        }
        {
            auto p1 = random_vec(rng, n);
            auto p2 = p1;
            std::vector<double> m1(n, 0.0), v1(n, 0.0), m2(n, 0.0), v2(n, 0.0);
            const kern::AdamStep step{1e-3, 0.9, 0.999, 1e-8, 1.0 / (1.0 - 0.9),
                                      1.0 / (1.0 - 0.999)};
            ref.adam(p1.data(), m1.data(), v1.data(), a.data(), n, step);
            simd->adam(p2.data(), m2.data(), v2.data(), a.data(), n, step);
            for (std::size_t i = 0; i < n; ++i) CHECK(close_rel(p1[i], p2[i], 1e-13));
        }
    }
    kern::force_backend(kern::Backend::Avx2);
}

TEST_CASE("dot matches a hand-rolled loop") {
    Rng rng(7);
    const auto a = random_vec(rng, 33);
    const auto b = random_vec(rng, 33);
    double expect = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) expect += a[i] * b[i];
    CHECK(close_rel(kern::dot(a.data(), b.data(), a.size()), expect, 1e-12));
}

TEST_CASE("vmax keeps the running maximum") {
    std::vector<double> acc = {1.0, -5.0, 0.0};
    const std::vector<double> x = {0.5, -4.0, 0.0};
    kern::vmax(acc.data(), x.data(), acc.size());
    CHECK(acc == std::vector<double>{1.0, -4.0, 0.0});
}

TEST_CASE("active backend reports a name") {
    CHECK((kern::backend_name() == "avx2" || kern::backend_name() == "scalar"));
}
