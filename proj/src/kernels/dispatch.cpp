#include <atomic>
#include <cstdlib>
#include <string>

#include "roughness/errors.hpp"
#include "roughness/kernels.hpp"

namespace roughness::kernels {

namespace {

Isa detect_default()
{
    Isa best = isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
    if (const char* env = std::getenv("ROUGHNESS_ISA")) {
        const std::string want(env);
        if (want == "scalar")
            return Isa::scalar;
        if (want == "avx2" && isa_supported(Isa::avx2))
            return Isa::avx2;
    }
    return best;
}

std::atomic<Isa>& current()
{
    static std::atomic<Isa> isa{detect_default()};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa)
{
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool isa_supported(Isa isa)
{
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(ROUGHNESS_WITH_AVX2)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }
    return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa)
{
    if (!isa_supported(isa))
        throw ConfigError(std::string("instruction set not supported here: ") + std::string(isa_name(isa)));
    current().store(isa, std::memory_order_relaxed);
}

void pair_scores(const PointColumns& points, const Alphas& alphas, std::span<double> out)
{
#if defined(ROUGHNESS_WITH_AVX2)
    if (active_isa() == Isa::avx2)
        return avx2::pair_scores(points, alphas, out);
#endif
    scalar::pair_scores(points, alphas, out);
}

void fir_valid(std::span<const double> input, std::span<const double> taps, std::span<double> out)
{
#if defined(ROUGHNESS_WITH_AVX2)
    if (active_isa() == Isa::avx2)
        return avx2::fir_valid(input, taps, out);
#endif
    scalar::fir_valid(input, taps, out);
}

}  // namespace roughness::kernels
