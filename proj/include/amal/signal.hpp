#ifndef AMAL_SIGNAL_HPP
#define AMAL_SIGNAL_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace amal {

/// Sliding median; the window is filled by replicating the edge sample, so
/// monotone series (steady motion) pass through unchanged everywhere.
inline std::vector<double> median_filter(const std::vector<double>& series, int window) {
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("median window must be odd >= 1");
    const int n = static_cast<int>(series.size());
    std::vector<double> out(n);
    const int half = window / 2;
    std::vector<double> buf(window);
    for (int i = 0; i < n; ++i) {
        for (int k = -half; k <= half; ++k)
            buf[k + half] = series[std::clamp(i + k, 0, n - 1)];
        std::sort(buf.begin(), buf.end());
        out[i] = buf[half];
    }
    return out;
}

/// `levels` passes of the binomial kernel (1,4,6,4,1)/16, antisymmetric
/// reflection at the boundaries (ramps are preserved exactly, so a steady
/// motion keeps constant velocity). Same-length output: smoothing only, no
/// decimation, so frame indices keep their meaning for PoI bookkeeping.
inline std::vector<double> gaussian_smooth(std::vector<double> series, int levels) {
    if (levels < 0) throw std::invalid_argument("levels must be >= 0");
    static const double kernel[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    const int n = static_cast<int>(series.size());
    if (n == 0) return series;
    auto sample = [&](int idx) {
        if (idx < 0) return 2.0 * series[0] - series[std::min(-idx, n - 1)];
        if (idx >= n) return 2.0 * series[n - 1] - series[std::max(2 * (n - 1) - idx, 0)];
        return series[idx];
    };
    std::vector<double> next(n);
    for (int l = 0; l < levels; ++l) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int k = -2; k <= 2; ++k) acc += kernel[k + 2] * sample(i + k);
            next[i] = acc;
        }
        series.swap(next);
    }
    return series;
}

}  // namespace amal

#endif
