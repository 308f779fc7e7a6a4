#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>
#include <vector>

#include "povmremap/error.hpp"
#include "povmremap/image.hpp"
#include "povmremap/povm.hpp"

namespace povmremap {

struct RemapResult {
    std::array<double, 256> lut{};
    std::vector<double> float_image; // row-major, lut[I(x,y)]
    GrayImage quantized;
    IntensityModel model_ref;
    double gamma = 1.0;
};

inline std::uint8_t quantize_intensity(double v) {
    v = std::min(255.0, std::max(0.0, v));
    return static_cast<std::uint8_t>(std::llround(v)); // half away from zero
}

/// Expectation-value remapping: I_hat(x,y) = sum_k mu_k E_k(I(x,y)),
/// realized as a 256-entry LUT followed by a per-pixel lookup. Rows may be
/// partitioned across threads; the output is identical for any thread count.
inline RemapResult remap_image(const GrayImage& img, const PovmTable& povm,
                               const IntensityModel& model = {},
                               int threads = 1) {
    RemapResult r;
    r.lut = observable_lut(povm);
    r.gamma = povm.gamma;
    r.model_ref = model;
    r.float_image.resize(img.size());
    r.quantized = GrayImage(img.width, img.height);

    auto run_rows = [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const std::size_t off = static_cast<std::size_t>(y) * img.width;
            for (int x = 0; x < img.width; ++x) {
                const double v = r.lut[img.data[off + x]];
                r.float_image[off + x] = v;
                r.quantized.data[off + x] = quantize_intensity(v);
            }
        }
    };

    if (threads <= 1 || img.height <= 1) {
        run_rows(0, img.height);
    } else {
        const int t = std::min(threads, img.height);
        std::vector<std::thread> pool;
        for (int j = 0; j < t; ++j) {
            const int y0 = static_cast<int>(static_cast<long long>(img.height) * j / t);
            const int y1 = static_cast<int>(static_cast<long long>(img.height) * (j + 1) / t);
            pool.emplace_back(run_rows, y0, y1);
        }
        for (auto& th : pool) th.join();
    }
    return r;
}

/// Per-pixel probability of outcome k (0-based): coeffs[k][I(x,y)].
inline std::vector<double> probability_map(const GrayImage& img, const PovmTable& povm,
                                           int k) {
    if (k < 0 || k >= povm.k)
        throw IndexOutOfRange("probability_map: component index out of range");
    std::vector<double> map(img.size());
    for (std::size_t p = 0; p < img.size(); ++p)
        map[p] = povm.coeffs[k][img.data[p]];
    return map;
}

/// Row-major CSV dump of the float image, 17 significant digits.
inline void float_image_to_csv(const std::vector<double>& img, int width,
                               std::ostream& out) {
    char buf[32];
    for (std::size_t p = 0; p < img.size(); ++p) {
        std::snprintf(buf, sizeof buf, "%.17g", img[p]);
        out << buf;
        out << (((p + 1) % static_cast<std::size_t>(width)) == 0 ? "\n" : ",");
    }
}

} // namespace povmremap
