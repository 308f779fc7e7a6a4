#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include "povmremap/error.hpp"
#include "povmremap/estimation.hpp"

namespace povmremap {

/// Gaussian response functions G_k(i), stored in the log domain so that
/// far-from-center entries never underflow.
struct ResponseTable {
    int k = 0;
    std::vector<std::array<double, 256>> log_raw;
    std::vector<double> mus;
};

/// Normalized (and possibly sharpened) coefficients E_k(i). Diagonal
/// operators, so the K x 256 table is the full POVM. Every column sums
/// to 1 (completeness) and entries lie in [0,1].
struct PovmTable {
    int k = 0;
    std::vector<std::array<double, 256>> coeffs;
    double gamma = 1.0; // INFINITY means hard argmax
    std::vector<double> mus;
};

/// log G_k(i) = log w_k - (i - mu_k)^2 / (2 sigma_k^2).
/// kmeans models use the shared spread delta and unit weights.
inline ResponseTable gaussian_responses(const IntensityModel& model) {
    ResponseTable rt;
    rt.k = model.k();
    rt.log_raw.resize(rt.k);
    for (int j = 0; j < rt.k; ++j) {
        const auto& c = model.components[j];
        const double sigma = (model.kind == ModelKind::kmeans) ? model.delta.value() : c.sigma;
        const double logw = (model.kind == ModelKind::kmeans) ? 0.0 : std::log(c.weight);
        const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
        for (int i = 0; i < 256; ++i) {
            const double d = i - c.mu;
            rt.log_raw[j][i] = logw - d * d * inv2s2;
        }
        rt.mus.push_back(c.mu);
    }
    return rt;
}

/// Pointwise normalization E_k(i) = G_k(i) / sum_j G_j(i), computed with
/// max-subtraction per column.
inline PovmTable normalize(const ResponseTable& rt) {
    PovmTable p;
    p.k = rt.k;
    p.gamma = 1.0;
    p.mus = rt.mus;
    p.coeffs.resize(p.k);
    for (int i = 0; i < 256; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < p.k; ++j) mx = std::max(mx, rt.log_raw[j][i]);
        double s = 0.0;
        for (int j = 0; j < p.k; ++j) s += std::exp(rt.log_raw[j][i] - mx);
        for (int j = 0; j < p.k; ++j)
            p.coeffs[j][i] = std::exp(rt.log_raw[j][i] - mx) / s;
    }
    return p;
}

/// E_k(i) <- E_k(i)^gamma / sum_j E_j(i)^gamma. gamma = INFINITY places
/// all mass on the lowest-index argmax of each column.
inline PovmTable sharpen(const PovmTable& povm, double gamma) {
    if (std::isnan(gamma) || gamma <= 0.0)
        throw InvalidGamma("sharpen: gamma must be > 0 or INF");
    PovmTable out;
    out.k = povm.k;
    out.mus = povm.mus;
    out.coeffs.resize(out.k);
    if (std::isinf(gamma)) {
        out.gamma = gamma;
        for (int i = 0; i < 256; ++i) {
            int arg = 0;
            for (int j = 1; j < out.k; ++j)
                if (povm.coeffs[j][i] > povm.coeffs[arg][i]) arg = j;
            for (int j = 0; j < out.k; ++j) out.coeffs[j][i] = (j == arg) ? 1.0 : 0.0;
        }
        return out;
    }
    out.gamma = std::isinf(povm.gamma) ? povm.gamma : povm.gamma * gamma;
    for (int i = 0; i < 256; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        std::array<double, 64> buf;
        std::vector<double> dyn;
        double* lg = (out.k <= 64) ? buf.data() : (dyn.resize(out.k), dyn.data());
        for (int j = 0; j < out.k; ++j) {
            lg[j] = gamma * std::log(povm.coeffs[j][i]); // log(0) -> -inf is fine
            mx = std::max(mx, lg[j]);
        }
        double s = 0.0;
        for (int j = 0; j < out.k; ++j) s += std::exp(lg[j] - mx);
        for (int j = 0; j < out.k; ++j)
            out.coeffs[j][i] = std::exp(lg[j] - mx) / s;
    }
    return out;
}

/// lut[i] = sum_k mu_k E_k(i): the diagonal of the observable A in the
/// intensity basis. Each entry is a convex combination of the mus.
inline std::array<double, 256> observable_lut(const PovmTable& povm) {
    std::array<double, 256> lut{};
    for (int i = 0; i < 256; ++i) {
        double v = 0.0;
        for (int j = 0; j < povm.k; ++j) v += povm.mus[j] * povm.coeffs[j][i];
        lut[i] = v;
    }
    return lut;
}

/// Outcome distribution for a pixel of the given intensity: the POVM column.
inline std::vector<double> measure_probabilities(const PovmTable& povm, int intensity) {
    if (intensity < 0 || intensity > 255)
        throw IndexOutOfRange("measure_probabilities: intensity out of range");
    std::vector<double> p(povm.k);
    for (int j = 0; j < povm.k; ++j) p[j] = povm.coeffs[j][intensity];
    return p;
}

/// CSV dump, rows = components, 17 significant digits.
inline void povm_to_csv(const PovmTable& povm, std::ostream& out) {
    char buf[32];
    for (int j = 0; j < povm.k; ++j) {
        for (int i = 0; i < 256; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", povm.coeffs[j][i]);
            out << buf << (i == 255 ? "\n" : ",");
        }
    }
}

} // namespace povmremap
