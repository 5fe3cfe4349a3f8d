// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "eldro/kernels.hpp"

#include <immintrin.h>

namespace eldro::kernels {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(std::span<const double> x) {
    const std::size_t n = x.size();
    const double* p = x.data();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(p + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += p[i];
    return s;
}

ElMoments el_moments_avx2(std::span<const double> h, double lambda) {
    const std::size_t n = h.size();
    const double* p = h.data();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d lam = _mm256_set1_pd(lambda);
    __m256d g = _mm256_setzero_pd();
    __m256d dg = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(p + i);
        const __m256d q = _mm256_div_pd(v, _mm256_fmadd_pd(lam, v, one));
        g = _mm256_add_pd(g, q);
        dg = _mm256_fmadd_pd(q, q, dg);
    }
    ElMoments m{hsum(g), hsum(dg)};
    for (; i < n; ++i) {
        const double q = p[i] / (1.0 + lambda * p[i]);
        m.g += q;
        m.dg += q * q;
    }
    return m;
}

DualMoments dual_moments_avx2(std::span<const double> d, std::span<const double> w, double s) {
    const std::size_t n = d.size();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d sv = _mm256_set1_pd(s);
    __m256d mass = _mm256_setzero_pd();
    __m256d dmass = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_div_pd(one, _mm256_add_pd(sv, _mm256_loadu_pd(d.data() + i)));
        const __m256d t = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), r);
        mass = _mm256_add_pd(mass, t);
        dmass = _mm256_fmadd_pd(t, r, dmass);
    }
    DualMoments m{hsum(mass), hsum(dmass)};
    for (; i < n; ++i) {
        const double r = 1.0 / (s + d[i]);
        const double t = w[i] * r;
        m.mass += t;
        m.dmass += t * r;
    }
    return m;
}

CrossMoments cross_moments_avx2(std::span<const double> a, std::span<const double> b, double mean_a,
                                double mean_b) {
    const std::size_t n = a.size();
    const __m256d ma = _mm256_set1_pd(mean_a);
    const __m256d mb = _mm256_set1_pd(mean_b);
    __m256d sxx = _mm256_setzero_pd();
    __m256d syy = _mm256_setzero_pd();
    __m256d sxy = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), ma);
        const __m256d y = _mm256_sub_pd(_mm256_loadu_pd(b.data() + i), mb);
        sxx = _mm256_fmadd_pd(x, x, sxx);
        syy = _mm256_fmadd_pd(y, y, syy);
        sxy = _mm256_fmadd_pd(x, y, sxy);
    }
    CrossMoments m{hsum(sxx), hsum(syy), hsum(sxy)};
    for (; i < n; ++i) {
        const double x = a[i] - mean_a;
        const double y = b[i] - mean_b;
        m.sxx += x * x;
        m.syy += y * y;
        m.sxy += x * y;
    }
    return m;
}

} // namespace

const KernelTable& avx2_kernel_table() {
    static const KernelTable table{"avx2", sum_avx2, el_moments_avx2, dual_moments_avx2, cross_moments_avx2};
    return table;
}

} // namespace eldro::kernels
