#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "povmremap/baselines.hpp"
#include "povmremap/estimation.hpp"
#include "povmremap/image.hpp"
#include "povmremap/metrics.hpp"
#include "povmremap/povm.hpp"
#include "povmremap/remap.hpp"

namespace povmremap {

struct PipelineResult {
    IntensityModel model;
    PovmTable povm;
    RemapResult remap;
    double elapsed_seconds = 0.0; // estimation + POVM build + remap, no I/O
};

/// Full proposed pipeline: estimate, build Gaussian responses, normalize,
/// sharpen, remap.
inline PipelineResult run_pipeline(const GrayImage& img, ModelKind estimator, int k,
                                   double gamma, std::optional<double> delta = {},
                                   int threads = 1) {
    const auto t0 = std::chrono::steady_clock::now();
    const Histogram hist = compute_histogram(img);
    PipelineResult r;
    r.model = (estimator == ModelKind::kmeans) ? estimate_kmeans(hist, k)
                                               : estimate_gmm(hist, k);
    if (delta && r.model.kind == ModelKind::kmeans) r.model.delta = *delta;
    r.povm = sharpen(normalize(gaussian_responses(r.model)), gamma);
    r.remap = remap_image(img, r.povm, r.model, threads);
    r.elapsed_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline MetricsReport evaluate(const GrayImage& input, const GrayImage& output,
                              SsimMode mode, double elapsed_seconds) {
    MetricsReport m;
    m.psnr_db = psnr(input, output);
    m.ssim_mode = mode;
    m.ssim = (mode == SsimMode::global) ? ssim_global(input, output)
                                        : ssim_windowed(input, output);
    m.entropy_in = shannon_entropy(input);
    m.entropy_out = shannon_entropy(output);
    m.delta_entropy_pct = 100.0 * (m.entropy_out - m.entropy_in) /
                          (m.entropy_in > 0.0 ? m.entropy_in : 1.0);
    m.elapsed_seconds = elapsed_seconds;
    return m;
}

struct CompareRow {
    std::string method;
    MetricsReport metrics;
    std::string error; // nonempty when the method could not run
};

/// Rows for the proposed methods and both classical baselines. Methods
/// that cannot handle the input record the failure instead of aborting
/// the table.
inline std::vector<CompareRow> compare_methods(const GrayImage& img, int k, double gamma,
                                               SsimMode mode, double kappa = 1.0,
                                               int threads = 1) {
    std::vector<CompareRow> rows;
    auto proposed = [&](ModelKind kind, const std::string& name) {
        CompareRow row{name, {}, ""};
        try {
            const PipelineResult r = run_pipeline(img, kind, k, gamma, {}, threads);
            row.metrics = evaluate(img, r.remap.quantized, mode, r.elapsed_seconds);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    };
    proposed(ModelKind::kmeans, "proposed-kmeans");
    proposed(ModelKind::gmm, "proposed-gmm");

    auto baseline = [&](const std::string& name, auto&& fit) {
        CompareRow row{name, {}, ""};
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const Histogram hist = compute_histogram(img);
            const ThresholdSet ts = fit(hist);
            const GrayImage out = apply_thresholds(img, ts);
            const double secs = std::chrono::duration<double>(
                std::chrono::steady_clock::now() - t0).count();
            row.metrics = evaluate(img, out, mode, secs);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    };
    baseline("multi-otsu", [&](const Histogram& h) { return multi_otsu(h, k); });
    baseline("recursive-statistical",
             [&](const Histogram& h) { return recursive_statistical(h, k, kappa); });
    return rows;
}

} // namespace povmremap
