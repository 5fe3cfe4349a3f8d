#include "eldro/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace eldro::kernels {

#if defined(ELDRO_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(ELDRO_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_kernel_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& chosen = [] () -> const KernelTable& {
        const char* env = std::getenv("ELDRO_SIMD");
        if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
        if (const KernelTable* t = avx2_kernels()) return *t;
        return scalar_kernels();
    }();
    return chosen;
}

} // namespace eldro::kernels
