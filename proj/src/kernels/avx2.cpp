#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "roughness/kernels.hpp"

// glibc libmvec, AVX2 variant of pow (4 doubles).
extern "C" __m256d _ZGVdN4vv_pow(__m256d x, __m256d y);

namespace roughness::kernels::avx2 {

namespace {

inline __m256d vabs(__m256d v)
{
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline __m256d vpow(__m256d base, __m256d exponent) { return _ZGVdN4vv_pow(base, exponent); }

}  // namespace

void pair_scores(const PointColumns& points, const Alphas& a, std::span<double> out)
{
    const std::size_t n = points.size();
    if (n < 2)
        return;
    const double* x = points.x();
    const double* y = points.y();
    const double* z = points.z();
    const double* tau = points.tau();

    // Per-point roll and pitch penalties; padded so lane loads stay in bounds.
    const std::size_t padded = (n + 3) / 4 * 4 + 4;
    std::vector<double> roll_pen(padded, 0.0);
    std::vector<double> pitch_pen(padded, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        roll_pen[i] = a[6] * std::pow(std::abs(points.roll_rate()[i]), a[7]);
        pitch_pen[i] = a[8] * std::pow(std::abs(points.pitch_rate()[i]), a[9]);
    }

    const __m256d a0 = _mm256_set1_pd(a[0]), a1 = _mm256_set1_pd(a[1]);
    const __m256d a2 = _mm256_set1_pd(a[2]), a3 = _mm256_set1_pd(a[3]);
    const __m256d a4 = _mm256_set1_pd(a[4]), a5 = _mm256_set1_pd(a[5]);

    alignas(32) double lane[4];
    std::size_t k = 0;
    for (std::size_t r = 0; r + 1 < n; ++r) {
        const __m256d xr = _mm256_set1_pd(x[r]), yr = _mm256_set1_pd(y[r]);
        const __m256d zr = _mm256_set1_pd(z[r]), tr = _mm256_set1_pd(tau[r]);
        const __m256d rr = _mm256_set1_pd(roll_pen[r]), pr = _mm256_set1_pd(pitch_pen[r]);
        for (std::size_t c = r + 1; c < n; c += 4) {
            const __m256d dx = _mm256_sub_pd(xr, _mm256_loadu_pd(x + c));
            const __m256d dy = _mm256_sub_pd(yr, _mm256_loadu_pd(y + c));
            const __m256d dist = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
            const __m256d dz = vabs(_mm256_sub_pd(zr, _mm256_loadu_pd(z + c)));
            const __m256d dt = vabs(_mm256_sub_pd(tr, _mm256_loadu_pd(tau + c)));

            __m256d s = _mm256_mul_pd(a0, vpow(dz, a1));
            s = _mm256_sub_pd(s, _mm256_mul_pd(a2, vpow(dt, a3)));
            s = _mm256_sub_pd(s, _mm256_mul_pd(a4, vpow(dist, a5)));
            s = _mm256_sub_pd(s, _mm256_add_pd(rr, _mm256_loadu_pd(roll_pen.data() + c)));
            s = _mm256_sub_pd(s, _mm256_add_pd(pr, _mm256_loadu_pd(pitch_pen.data() + c)));

            const std::size_t valid = std::min<std::size_t>(4, n - c);
            if (valid == 4) {
                _mm256_storeu_pd(out.data() + k, s);
            } else {
                _mm256_store_pd(lane, s);
                std::copy_n(lane, valid, out.data() + k);
            }
            k += valid;
        }
    }
}

void fir_valid(std::span<const double> input, std::span<const double> taps, std::span<double> out)
{
    const std::size_t t = taps.size();
    const std::size_t count = out.size();
    std::size_t n = 0;
    for (; n + 4 <= count; n += 4) {
        const double* window = input.data() + n + t - 1;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < t; ++j)
            acc = _mm256_fmadd_pd(_mm256_set1_pd(taps[j]),
                                  _mm256_loadu_pd(window - static_cast<std::ptrdiff_t>(j)), acc);
        _mm256_storeu_pd(out.data() + n, acc);
    }
    for (; n < count; ++n) {
        const double* window = input.data() + n + t - 1;
        double acc = 0.0;
        for (std::size_t j = 0; j < t; ++j)
            acc = std::fma(taps[j], window[-static_cast<std::ptrdiff_t>(j)], acc);
        out[n] = acc;
    }
}

}  // namespace roughness::kernels::avx2
