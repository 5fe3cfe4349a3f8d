#pragma once

// Data-parallel reductions behind the EL and dual solvers and the empirical
// correlation field. Each kernel has a scalar reference implementation and,
// on x86-64, an AVX2 variant; the variant is chosen once at runtime from the
// CPU features (override with ELDRO_SIMD=scalar).

#include <span>
#include <string_view>

namespace eldro::kernels {

/// g = sum h_i / (1 + lambda h_i) and dg = sum h_i^2 / (1 + lambda h_i)^2.
/// The EL root equation is g = 0 and dg is -g'(lambda).
struct ElMoments {
    double g = 0.0;
    double dg = 0.0;
};

/// sum w_i / (s + d_i) and sum w_i / (s + d_i)^2.
struct DualMoments {
    double mass = 0.0;
    double dmass = 0.0;
};

/// Centered second moments of two paired samples about the given means.
struct CrossMoments {
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
};

struct KernelTable {
    std::string_view name;
    double (*sum)(std::span<const double> x);
    ElMoments (*el_moments)(std::span<const double> h, double lambda);
    DualMoments (*dual_moments)(std::span<const double> d, std::span<const double> w, double s);
    CrossMoments (*cross_moments)(std::span<const double> a, std::span<const double> b, double mean_a,
                                  double mean_b);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Table used by the library; resolved on first call.
const KernelTable& active();

} // namespace eldro::kernels
