#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sepopt/cpa.hpp"

namespace sepopt::kernels {

enum class Backend {
    scalar = 0,
    avx2 = 1,
};

const char* backend_name(Backend b);

// Backends compiled into this binary and usable on this CPU.
std::vector<Backend> available_backends();

// Minimum separation over future time for a batch of candidate headings
// given as (cos, sin) pairs. Writes n results to dmin_out. All backends
// produce bit-identical output (see cpa_dmin).
using DminSweepFn = void (*)(const CpaGeometry& g, const double* cos_c,
                             const double* sin_c, double* dmin_out,
                             std::size_t n);

// Implementation for a specific backend; null if unavailable.
DminSweepFn dmin_sweep_fn(Backend b);

// Backend the dispatched entry points currently use.
Backend active_backend();

// Force a backend (for tests/benchmarks); ignores the request if the
// backend is unavailable. Returns the backend now active.
Backend set_backend(Backend b);

// Dispatched entry point.
void dmin_sweep(const CpaGeometry& g, const double* cos_c, const double* sin_c,
                double* dmin_out, std::size_t n);

namespace scalar {
void dmin_sweep(const CpaGeometry& g, const double* cos_c, const double* sin_c,
                double* dmin_out, std::size_t n);
}

#if defined(SEPOPT_HAVE_AVX2)
namespace avx2 {
void dmin_sweep(const CpaGeometry& g, const double* cos_c, const double* sin_c,
                double* dmin_out, std::size_t n);
}
#endif

}  // namespace sepopt::kernels
