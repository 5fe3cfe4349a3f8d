#include "eldro/kernels.hpp"

namespace eldro::kernels {

namespace {

double sum_scalar(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

ElMoments el_moments_scalar(std::span<const double> h, double lambda) {
    ElMoments m;
    for (double v : h) {
        const double q = v / (1.0 + lambda * v);
        m.g += q;
        m.dg += q * q;
    }
    return m;
}

DualMoments dual_moments_scalar(std::span<const double> d, std::span<const double> w, double s) {
    DualMoments m;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = 1.0 / (s + d[i]);
        const double t = w[i] * r;
        m.mass += t;
        m.dmass += t * r;
    }
    return m;
}

CrossMoments cross_moments_scalar(std::span<const double> a, std::span<const double> b, double mean_a,
                                  double mean_b) {
    CrossMoments m;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i] - mean_a;
        const double y = b[i] - mean_b;
        m.sxx += x * x;
        m.syy += y * y;
        m.sxy += x * y;
    }
    return m;
}

} // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", sum_scalar, el_moments_scalar, dual_moments_scalar,
                                   cross_moments_scalar};
    return table;
}

} // namespace eldro::kernels
