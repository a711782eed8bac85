// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>

#include "clustervol/kernels.hpp"

namespace clustervol::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i];
    return s;
}

CrossMoments centered_cross_avx2(const double* x, double xbar, const double* y, double ybar,
                                 std::size_t n) {
    const __m256d vxbar = _mm256_set1_pd(xbar);
    const __m256d vybar = _mm256_set1_pd(ybar);
    __m256d sxx = _mm256_setzero_pd();
    __m256d sxy = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), vxbar);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), vybar);
        sxx = _mm256_fmadd_pd(dx, dx, sxx);
        sxy = _mm256_fmadd_pd(dx, dy, sxy);
    }
    CrossMoments m{hsum(sxx), hsum(sxy)};
    for (; i < n; ++i) {
        const double dx = x[i] - xbar;
        m.sxx += dx * dx;
        m.sxy += dx * (y[i] - ybar);
    }
    return m;
}

// Element-wise kernels avoid FMA so they round exactly like the scalar ones.
void affine_residual_avx2(const double* cur, const double* lag, double shift, double slope,
                          double* out, std::size_t n) {
    const __m256d vshift = _mm256_set1_pd(shift);
    const __m256d vslope = _mm256_set1_pd(slope);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d c = _mm256_sub_pd(_mm256_loadu_pd(cur + i), vshift);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(c, _mm256_mul_pd(vslope, _mm256_loadu_pd(lag + i))));
    }
    for (; i < n; ++i) out[i] = (cur[i] - shift) - slope * lag[i];
}

void square_avx2(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(v, v));
    }
    for (; i < n; ++i) out[i] = x[i] * x[i];
}

void arch_variance_avx2(const double* lag_sq, double a0, double a1, double floor, double* out,
                        std::size_t n) {
    const __m256d va0 = _mm256_set1_pd(a0);
    const __m256d va1 = _mm256_set1_pd(a1);
    const __m256d vfloor = _mm256_set1_pd(floor);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d s2 = _mm256_add_pd(va0, _mm256_mul_pd(va1, _mm256_loadu_pd(lag_sq + i)));
        _mm256_storeu_pd(out + i, _mm256_max_pd(s2, vfloor));
    }
    for (; i < n; ++i) out[i] = std::max(a0 + a1 * lag_sq[i], floor);
}

double ratio_sum_avx2(const double* num, const double* den, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_loadu_pd(num + i), _mm256_loadu_pd(den + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += num[i] / den[i];
    return s;
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{Isa::Avx2,         sum_avx2,          centered_cross_avx2,
                                   affine_residual_avx2, square_avx2, arch_variance_avx2,
                                   ratio_sum_avx2};
    return &table;
}

}  // namespace clustervol::kernels
