#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "povmremap/error.hpp"
#include "povmremap/rng.hpp"

namespace povmremap {

/// 8-bit grayscale image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}
    GrayImage(int w, int h, std::vector<std::uint8_t> d)
        : width(w), height(h), data(std::move(d)) {}

    std::size_t size() const { return data.size(); }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const GrayImage&) const = default;
};

/// 256-bin intensity histogram; probs is the normalized distribution
/// (the diagonal of the image's density operator).
struct Histogram {
    std::array<std::uint64_t, 256> counts{};
    std::array<double, 256> probs{};
    std::uint64_t total = 0;

    int distinct_levels() const {
        int n = 0;
        for (auto c : counts) n += (c > 0);
        return n;
    }
};

inline Histogram compute_histogram(const GrayImage& img) {
    if (img.data.empty()) throw EmptyImage("compute_histogram: empty image");
    Histogram h;
    for (std::uint8_t v : img.data) ++h.counts[v];
    h.total = img.data.size();
    for (int i = 0; i < 256; ++i)
        h.probs[i] = static_cast<double>(h.counts[i]) / static_cast<double>(h.total);
    return h;
}

struct MixtureComponentSpec {
    double mean;
    double std;
    double weight;
};

/// Deterministic synthetic image: each pixel draws a component by weight,
/// then a normal sample, clipped to [0,255] and rounded half away from zero.
/// Uses three CounterRng draws per pixel (selection + Box-Muller pair).
inline GrayImage synth_mixture_image(int width, int height,
                                     const std::vector<MixtureComponentSpec>& components,
                                     std::uint64_t seed) {
    if (width <= 0 || height <= 0 || components.empty())
        throw InvalidParams("synth_mixture_image: empty size or component list");
    double wsum = 0.0;
    for (const auto& c : components) {
        if (c.std < 0.0) throw InvalidParams("synth_mixture_image: negative std");
        if (c.mean < 0.0 || c.mean > 255.0)
            throw InvalidParams("synth_mixture_image: mean outside [0,255]");
        if (c.weight < 0.0) throw InvalidParams("synth_mixture_image: negative weight");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw InvalidParams("synth_mixture_image: weights must sum to 1");

    CounterRng rng(seed);
    GrayImage img(width, height);
    const std::size_t n = img.size();
    for (std::size_t p = 0; p < n; ++p) {
        const std::uint64_t base = 3 * static_cast<std::uint64_t>(p);
        const double u = rng.uniform(base);
        double acc = 0.0;
        std::size_t c = components.size() - 1;
        for (std::size_t j = 0; j < components.size(); ++j) {
            acc += components[j].weight;
            if (u < acc) { c = j; break; }
        }
        double v = components[c].mean;
        if (components[c].std > 0.0)
            v += components[c].std * rng.normal(base + 1);
        v = std::min(255.0, std::max(0.0, v));
        img.data[p] = static_cast<std::uint8_t>(std::llround(v));
    }
    return img;
}

} // namespace povmremap
