// Every vector kernel must agree with the scalar reference up to
// reassociation error.

#include "eldro/kernels.hpp"
#include "eldro/stats.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace eldro;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = lo + (hi - lo) * rng.uniform_open();
    return v;
}

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * (scale + std::abs(a)); }

} // namespace

TEST_CASE("active kernel table is one of the known variants", "[kernels]") {
    const auto& t = kernels::active();
    CHECK((t.name == "scalar" || t.name == "avx2"));
    if (t.name == "avx2") CHECK(kernels::avx2_kernels() != nullptr);
}

TEST_CASE("AVX2 kernels match the scalar reference", "[kernels][property]") {
    const kernels::KernelTable* vec = kernels::avx2_kernels();
    if (vec == nullptr) {
        SUCCEED("AVX2 variant unavailable on this machine");
        return;
    }
    const auto& ref = kernels::scalar_kernels();
    Rng rng(RandomSeed{2024});
    // Lengths cover the unrolled body, the 4-wide tail and the scalar remainder.
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 31u, 80u, 1001u}) {
        const auto a = random_vector(rng, n, -50.0, 50.0);
        const auto b = random_vector(rng, n, -5.0, 120.0);
        double mag = 0.0;
        for (double v : a) mag += std::abs(v);
        CHECK(close(vec->sum(a), ref.sum(a), mag));

        const double lambda = 0.004;
        const auto e1 = vec->el_moments(a, lambda), e2 = ref.el_moments(a, lambda);
        CHECK(close(e1.g, e2.g, mag));
        CHECK(close(e1.dg, e2.dg, e2.dg));

        const auto d = random_vector(rng, n, 0.0, 10.0);
        const auto w = random_vector(rng, n, 0.0, 1.0);
        const auto m1 = vec->dual_moments(d, w, 0.3), m2 = ref.dual_moments(d, w, 0.3);
        CHECK(close(m1.mass, m2.mass, m2.mass));
        CHECK(close(m1.dmass, m2.dmass, m2.dmass));

        const auto c1 = vec->cross_moments(a, b, 1.5, 40.0), c2 = ref.cross_moments(a, b, 1.5, 40.0);
        CHECK(close(c1.sxx, c2.sxx, c2.sxx));
        CHECK(close(c1.syy, c2.syy, c2.syy));
        CHECK(close(c1.sxy, c2.sxy, std::sqrt(c2.sxx * c2.syy)));
    }
}

TEST_CASE("scalar kernels compute the documented sums", "[kernels]") {
    const auto& k = kernels::scalar_kernels();
    const std::vector<double> h{-1.0, 2.0};
    const auto m = k.el_moments(h, 0.25);
    CHECK(m.g == Catch::Approx(-1.0 / 0.75 + 2.0 / 1.5));
    CHECK(m.dg == Catch::Approx(1.0 / 0.5625 + 4.0 / 2.25));
    const std::vector<double> d{0.0, 1.0}, w{0.5, 0.5};
    const auto dm = k.dual_moments(d, w, 1.0);
    CHECK(dm.mass == Catch::Approx(0.5 + 0.25));
    CHECK(dm.dmass == Catch::Approx(0.5 + 0.125));
}
