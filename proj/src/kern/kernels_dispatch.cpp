#include "d2d/kern/kernels.hpp"

namespace d2d::kern {
namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct Dispatch {
    const Kernels* table;
    Backend backend;

    Dispatch() {
        if (cpu_has_avx2_fma() && avx2_table() != nullptr) {
            table = avx2_table();
            backend = Backend::Avx2;
        } else {
            table = &scalar_table();
            backend = Backend::Scalar;
        }
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace

const Kernels& active() { return *dispatch().table; }

Backend active_backend() { return dispatch().backend; }

std::string backend_name() {
    return dispatch().backend == Backend::Avx2 ? "avx2" : "scalar";
}

bool force_backend(Backend b) {
    if (b == Backend::Scalar) {
        dispatch().table = &scalar_table();
        dispatch().backend = Backend::Scalar;
        return true;
    }
    if (cpu_has_avx2_fma() && avx2_table() != nullptr) {
        dispatch().table = avx2_table();
        dispatch().backend = Backend::Avx2;
        return true;
    }
    return false;
}

}  // namespace d2d::kern
