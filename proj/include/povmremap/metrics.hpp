#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "povmremap/error.hpp"
#include "povmremap/image.hpp"

namespace povmremap {

enum class SsimMode { global, windowed };

struct MetricsReport {
    double psnr_db = 0.0; // +INF when images identical
    double ssim = 0.0;
    SsimMode ssim_mode = SsimMode::windowed;
    double entropy_in = 0.0;
    double entropy_out = 0.0;
    double delta_entropy_pct = 0.0;
    double elapsed_seconds = 0.0;
};

inline constexpr double kSsimC1 = (0.01 * 255.0) * (0.01 * 255.0); // 6.5025
inline constexpr double kSsimC2 = (0.03 * 255.0) * (0.03 * 255.0); // 58.5225

inline void check_same_dims(const GrayImage& a, const GrayImage& b, const char* op) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionMismatch(std::string(op) + ": image dimensions differ");
}

/// 10 log10(255^2 / MSE); +INF for identical images.
inline double psnr(const GrayImage& a, const GrayImage& b) {
    check_same_dims(a, b, "psnr");
    double sse = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) {
        const double d = static_cast<double>(a.data[p]) - static_cast<double>(b.data[p]);
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(a.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

/// Single-window SSIM over whole-image statistics (population variance).
inline double ssim_global(const GrayImage& a, const GrayImage& b) {
    check_same_dims(a, b, "ssim_global");
    if (a.size() < 2) throw TooSmall("ssim_global: need at least 2 pixels");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) { ma += a.data[p]; mb += b.data[p]; }
    ma /= n; mb /= n;
    double va = 0.0, vb = 0.0, cov = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) {
        const double da = a.data[p] - ma, db = b.data[p] - mb;
        va += da * da; vb += db * db; cov += da * db;
    }
    va /= n; vb /= n; cov /= n;
    return ((2.0 * ma * mb + kSsimC1) * (2.0 * cov + kSsimC2)) /
           ((ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2));
}

namespace detail {

inline const std::array<double, 121>& ssim_window() {
    static const std::array<double, 121> w = [] {
        std::array<double, 121> g{};
        double sum = 0.0;
        for (int y = 0; y < 11; ++y)
            for (int x = 0; x < 11; ++x) {
                const double dx = x - 5, dy = y - 5;
                g[y * 11 + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
                sum += g[y * 11 + x];
            }
        for (auto& v : g) v /= sum;
        return g;
    }();
    return w;
}

} // namespace detail

/// Mean of per-window SSIM, 11x11 Gaussian weights (sigma = 1.5), windows
/// fully inside the image (no padding).
inline double ssim_windowed(const GrayImage& a, const GrayImage& b) {
    check_same_dims(a, b, "ssim_windowed");
    if (a.width < 11 || a.height < 11)
        throw TooSmall("ssim_windowed: both dimensions must be >= 11");
    const auto& w = detail::ssim_window();
    double acc = 0.0;
    std::size_t windows = 0;
    for (int y = 0; y + 11 <= a.height; ++y) {
        for (int x = 0; x + 11 <= a.width; ++x) {
            double ma = 0.0, mb = 0.0;
            for (int j = 0; j < 11; ++j)
                for (int i = 0; i < 11; ++i) {
                    const double wt = w[j * 11 + i];
                    ma += wt * a.at(x + i, y + j);
                    mb += wt * b.at(x + i, y + j);
                }
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int j = 0; j < 11; ++j)
                for (int i = 0; i < 11; ++i) {
                    const double wt = w[j * 11 + i];
                    const double da = a.at(x + i, y + j) - ma;
                    const double db = b.at(x + i, y + j) - mb;
                    va += wt * da * da;
                    vb += wt * db * db;
                    cov += wt * da * db;
                }
            acc += ((2.0 * ma * mb + kSsimC1) * (2.0 * cov + kSsimC2)) /
                   ((ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2));
            ++windows;
        }
    }
    return acc / static_cast<double>(windows);
}

/// H = -sum p_i log2 p_i over nonzero bins; in [0, 8] bits.
inline double shannon_entropy(const GrayImage& img) {
    const Histogram h = compute_histogram(img);
    double e = 0.0;
    for (int i = 0; i < 256; ++i)
        if (h.probs[i] > 0.0) e -= h.probs[i] * std::log2(h.probs[i]);
    return e;
}

inline double delta_entropy_pct(const GrayImage& input, const GrayImage& output) {
    const double hin = shannon_entropy(input);
    if (hin <= 0.0)
        throw ZeroInputEntropy("delta_entropy_pct: input entropy is zero");
    return 100.0 * (shannon_entropy(output) - hin) / hin;
}

} // namespace povmremap
