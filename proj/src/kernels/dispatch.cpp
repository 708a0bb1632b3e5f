#include <atomic>

#include "sepopt/kernels.hpp"

namespace sepopt::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SEPOPT_HAVE_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend detect_backend() {
#if defined(SEPOPT_HAVE_AVX2)
    if (cpu_has_avx2()) return Backend::avx2;
#endif
    return Backend::scalar;
}

std::atomic<Backend> g_backend{detect_backend()};

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::scalar};
    if (cpu_has_avx2()) out.push_back(Backend::avx2);
    return out;
}

DminSweepFn dmin_sweep_fn(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &scalar::dmin_sweep;
        case Backend::avx2:
#if defined(SEPOPT_HAVE_AVX2)
            if (cpu_has_avx2()) return &avx2::dmin_sweep;
#endif
            return nullptr;
    }
    return nullptr;
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

Backend set_backend(Backend b) {
    if (dmin_sweep_fn(b) != nullptr) {
        g_backend.store(b, std::memory_order_relaxed);
    }
    return active_backend();
}

void dmin_sweep(const CpaGeometry& g, const double* cos_c, const double* sin_c,
                double* dmin_out, std::size_t n) {
    dmin_sweep_fn(active_backend())(g, cos_c, sin_c, dmin_out, n);
}

}  // namespace sepopt::kernels
