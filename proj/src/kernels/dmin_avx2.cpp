#if defined(SEPOPT_HAVE_AVX2)

#include <immintrin.h>

#include "sepopt/kernels.hpp"

namespace sepopt::kernels::avx2 {

// Four lanes of cpa_dmin. Every lane executes the same IEEE operation
// sequence as the scalar reference — plain mul/add/sub (no FMA), division,
// max, sqrt — so results are bit-identical to scalar::dmin_sweep.
void dmin_sweep(const CpaGeometry& g, const double* cos_c, const double* sin_c,
                double* dmin_out, std::size_t n) {
    const __m256d rel_x = _mm256_set1_pd(g.rel_x);
    const __m256d rel_y = _mm256_set1_pd(g.rel_y);
    const __m256d intr_vx = _mm256_set1_pd(g.intr_vx);
    const __m256d intr_vy = _mm256_set1_pd(g.intr_vy);
    const __m256d own_speed = _mm256_set1_pd(g.own_speed);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d vel_eps = _mm256_set1_pd(kParallelVelEps);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d c = _mm256_loadu_pd(cos_c + i);
        const __m256d s = _mm256_loadu_pd(sin_c + i);
        const __m256d dvx = _mm256_sub_pd(intr_vx, _mm256_mul_pd(own_speed, c));
        const __m256d dvy = _mm256_sub_pd(intr_vy, _mm256_mul_pd(own_speed, s));
        const __m256d vv = _mm256_add_pd(_mm256_mul_pd(dvx, dvx),
                                         _mm256_mul_pd(dvy, dvy));
        const __m256d num = _mm256_sub_pd(
            zero, _mm256_add_pd(_mm256_mul_pd(rel_x, dvx),
                                _mm256_mul_pd(rel_y, dvy)));
        // max picks the second operand on NaN, matching the scalar ternary
        __m256d tau = _mm256_max_pd(_mm256_div_pd(num, vv), zero);
        const __m256d parallel = _mm256_cmp_pd(vv, vel_eps, _CMP_LT_OQ);
        tau = _mm256_andnot_pd(parallel, tau);
        const __m256d ex = _mm256_add_pd(rel_x, _mm256_mul_pd(tau, dvx));
        const __m256d ey = _mm256_add_pd(rel_y, _mm256_mul_pd(tau, dvy));
        const __m256d d = _mm256_sqrt_pd(_mm256_add_pd(
            _mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)));
        _mm256_storeu_pd(dmin_out + i, d);
    }
    if (i < n) {
        scalar::dmin_sweep(g, cos_c + i, sin_c + i, dmin_out + i, n - i);
    }
}

}  // namespace sepopt::kernels::avx2

#endif  // SEPOPT_HAVE_AVX2
