#include "sepopt/kernels.hpp"

namespace sepopt::kernels::scalar {

void dmin_sweep(const CpaGeometry& g, const double* cos_c, const double* sin_c,
                double* dmin_out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        dmin_out[i] = cpa_dmin(g, cos_c[i], sin_c[i]);
    }
}

}  // namespace sepopt::kernels::scalar
