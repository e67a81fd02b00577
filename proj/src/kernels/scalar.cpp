#include <cmath>

#include "roughness/kernels.hpp"

namespace roughness::kernels {

PointColumns::PointColumns(std::span<const LaserPoint> points) : size_(points.size())
{
    const std::size_t padded = (size_ + 3) / 4 * 4 + 4;
    for (auto* col : {&x_, &y_, &z_, &tau_, &roll_rate_, &pitch_rate_})
        col->assign(padded, 0.0);
    for (std::size_t i = 0; i < size_; ++i) {
        x_[i] = points[i].x;
        y_[i] = points[i].y;
        z_[i] = points[i].z;
        tau_[i] = points[i].tau;
        roll_rate_[i] = points[i].roll_rate;
        pitch_rate_[i] = points[i].pitch_rate;
    }
}

namespace scalar {

void pair_scores(const PointColumns& points, const Alphas& a, std::span<double> out)
{
    const std::size_t n = points.size();
    const double* x = points.x();
    const double* y = points.y();
    const double* z = points.z();
    const double* tau = points.tau();
    const double* roll = points.roll_rate();
    const double* pitch = points.pitch_rate();

    std::size_t k = 0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r + 1; c < n; ++c) {
            const double dx = x[r] - x[c];
            const double dy = y[r] - y[c];
            out[k++] = pair_delta(std::abs(z[r] - z[c]), std::abs(tau[r] - tau[c]),
                                  std::sqrt(dx * dx + dy * dy), std::abs(roll[r]),
                                  std::abs(roll[c]), std::abs(pitch[r]), std::abs(pitch[c]), a);
        }
    }
}

void fir_valid(std::span<const double> input, std::span<const double> taps, std::span<double> out)
{
    const std::size_t t = taps.size();
    for (std::size_t n = 0; n < out.size(); ++n) {
        const double* window = input.data() + n + t - 1;
        double acc = 0.0;
        for (std::size_t j = 0; j < t; ++j)
            acc += taps[j] * window[-static_cast<std::ptrdiff_t>(j)];
        out[n] = acc;
    }
}

}  // namespace scalar
}  // namespace roughness::kernels
