#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <json.hpp>

#include "povmremap/error.hpp"
#include "povmremap/image.hpp"

namespace povmremap {

/// Piecewise-constant mapping: cut c separates classes at intensity c
/// (pixel < c falls below the cut). class_means are histogram means of
/// each class.
struct ThresholdSet {
    std::vector<int> thresholds;
    std::vector<double> class_means;

    int k() const { return static_cast<int>(class_means.size()); }
};

namespace detail {

struct HistPrefix {
    std::array<double, 257> w{}; // w[i] = mass of [0, i-1]
    std::array<double, 257> m{}; // m[i] = first moment of [0, i-1]

    explicit HistPrefix(const Histogram& h) {
        for (int i = 0; i < 256; ++i) {
            w[i + 1] = w[i] + h.probs[i];
            m[i + 1] = m[i] + h.probs[i] * i;
        }
    }
    double mass(int a, int b) const { return w[b + 1] - w[a]; }     // class [a, b]
    double moment(int a, int b) const { return m[b + 1] - m[a]; }
};

// omega * mu^2 for class [a, b]; -inf when the class carries no mass.
inline double class_score(const HistPrefix& p, int a, int b) {
    const double w = p.mass(a, b);
    if (w <= 0.0) return -std::numeric_limits<double>::infinity();
    const double m = p.moment(a, b);
    return m * m / w;
}

} // namespace detail

/// Between-class variance of a given cut set (Otsu objective).
inline double between_class_variance(const Histogram& hist, const std::vector<int>& cuts) {
    detail::HistPrefix p(hist);
    double score = 0.0;
    int a = 0;
    for (std::size_t j = 0; j <= cuts.size(); ++j) {
        const int b = (j < cuts.size()) ? cuts[j] - 1 : 255;
        score += detail::class_score(p, a, b);
        a = b + 1;
    }
    const double mu_t = p.moment(0, 255) / p.mass(0, 255);
    return score - mu_t * mu_t;
}

/// Multilevel Otsu by dynamic programming over prefix sums. Among equally
/// optimal cut sets the canonical result is the elementwise midpoint of the
/// lexicographically smallest and largest optima (falling back to the
/// smallest if the midpoint leaves the plateau).
inline ThresholdSet multi_otsu(const Histogram& hist, int k) {
    if (k < 2 || k > 8) throw InvalidParams("multi_otsu: k must be in [2, 8]");
    if (hist.distinct_levels() < k)
        throw TooFewDistinctLevels("multi_otsu: fewer distinct intensities than k");

    detail::HistPrefix p(hist);
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    // suf[c][s]: best score covering [s, 255] with c classes
    std::vector<std::vector<double>> suf(k + 1, std::vector<double>(257, kNegInf));
    for (int s = 0; s < 256; ++s) suf[1][s] = detail::class_score(p, s, 255);
    for (int c = 2; c <= k; ++c)
        for (int s = 0; s <= 256 - c; ++s) {
            double best = kNegInf;
            for (int t = s + 1; t <= 256 - (c - 1); ++t) {
                const double head = detail::class_score(p, s, t - 1);
                if (head == kNegInf) continue;
                const double v = head + suf[c - 1][t];
                if (v > best) best = v;
            }
            suf[c][s] = best;
        }
    const double opt = suf[k][0];
    const double tol = 1e-12 * std::max(1.0, std::abs(opt));

    auto reconstruct = [&](bool smallest) {
        std::vector<int> cuts;
        int s = 0;
        double remaining = opt;
        for (int c = k; c >= 2; --c) {
            const int lo = s + 1, hi = 256 - (c - 1);
            int chosen = -1;
            for (int step = 0; step <= hi - lo; ++step) {
                const int t = smallest ? lo + step : hi - step;
                const double head = detail::class_score(p, s, t - 1);
                if (head == kNegInf) continue;
                if (std::abs(head + suf[c - 1][t] - remaining) <= tol) { chosen = t; break; }
            }
            cuts.push_back(chosen);
            remaining -= detail::class_score(p, s, chosen - 1);
            s = chosen;
        }
        return cuts;
    };
    const std::vector<int> lexmin = reconstruct(true);
    const std::vector<int> lexmax = reconstruct(false);

    std::vector<int> cuts(lexmin.size());
    for (std::size_t j = 0; j < cuts.size(); ++j)
        cuts[j] = (lexmin[j] + lexmax[j]) / 2;
    bool mid_ok = true;
    for (std::size_t j = 1; j < cuts.size(); ++j)
        if (cuts[j] <= cuts[j - 1]) mid_ok = false;
    if (mid_ok) {
        int a = 0;
        for (std::size_t j = 0; j <= cuts.size() && mid_ok; ++j) {
            const int b = (j < cuts.size()) ? cuts[j] - 1 : 255;
            if (p.mass(a, b) <= 0.0) mid_ok = false;
            a = b + 1;
        }
    }
    if (mid_ok) {
        double score = 0.0;
        int a = 0;
        for (std::size_t j = 0; j <= cuts.size(); ++j) {
            const int b = (j < cuts.size()) ? cuts[j] - 1 : 255;
            score += detail::class_score(p, a, b);
            a = b + 1;
        }
        if (std::abs(score - opt) > 1e-9 * std::max(1.0, std::abs(opt))) mid_ok = false;
    }
    if (!mid_ok) cuts = lexmin;

    ThresholdSet ts;
    ts.thresholds = cuts;
    int a = 0;
    for (std::size_t j = 0; j <= cuts.size(); ++j) {
        const int b = (j < cuts.size()) ? cuts[j] - 1 : 255;
        ts.class_means.push_back(p.moment(a, b) / p.mass(a, b));
        a = b + 1;
    }
    return ts;
}

namespace detail {

struct RangeStats {
    double mass, mean, sigma;
};

inline RangeStats range_stats(const Histogram& h, int a, int b) {
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = a; i <= b; ++i) {
        const double c = static_cast<double>(h.counts[i]);
        w += c; m1 += c * i; m2 += c * i * i;
    }
    if (w <= 0.0) return {0.0, 0.5 * (a + b), 0.0};
    const double mean = m1 / w;
    return {w, mean, std::sqrt(std::max(0.0, m2 / w - mean * mean))};
}

// Degenerate path: no usable spread left, split the range evenly.
inline void midpoint_split(int a, int b, int need, std::vector<std::pair<int, int>>& out) {
    if (need == 1 || a == b) { out.emplace_back(a, b); return; }
    const int mid = a + (b - a + 1) / 2;
    const int left_need = (need + 1) / 2;
    midpoint_split(a, mid - 1, left_need, out);
    midpoint_split(mid, b, need - left_need, out);
}

inline void recursive_split(const Histogram& h, double kappa, int a, int b, int need,
                            std::vector<std::pair<int, int>>& out) {
    if (need == 1) { out.emplace_back(a, b); return; }
    const RangeStats st = range_stats(h, a, b);
    if (st.sigma <= 0.0 || b - a + 1 < need) { midpoint_split(a, b, need, out); return; }
    if (need == 2) {
        int cut = static_cast<int>(std::floor(st.mean)) + 1;
        cut = std::min(std::max(cut, a + 1), b);
        out.emplace_back(a, cut - 1);
        out.emplace_back(cut, b);
        return;
    }
    // mean +/- kappa*sigma cuts; outer sub-ranges become classes, recurse inside
    int c1 = static_cast<int>(std::floor(st.mean - kappa * st.sigma)) + 1;
    int c2 = static_cast<int>(std::floor(st.mean + kappa * st.sigma)) + 1;
    c1 = std::min(std::max(c1, a + 1), b - need + 2);
    c2 = std::min(std::max(c2, c1 + need - 2), b);
    out.emplace_back(a, c1 - 1);
    recursive_split(h, kappa, c1, c2 - 1, need - 2, out);
    out.emplace_back(c2, b);
}

} // namespace detail

/// Fast statistical recursive thresholding: the range [a,b] is cut at
/// mean +/- kappa*sigma, the outer pieces become classes, and the middle
/// is split recursively. Reimplemented baseline; fidelity to the published
/// method is not guaranteed. Empty classes are merged into their neighbor.
inline ThresholdSet recursive_statistical(const Histogram& hist, int k,
                                          double kappa = 1.0) {
    if (k != 2 && k != 4 && k != 8)
        throw InvalidParams("recursive_statistical: k must be a power of 2 up to 8");
    if (kappa <= 0.0) throw InvalidParams("recursive_statistical: kappa must be > 0");

    std::vector<std::pair<int, int>> ranges;
    detail::recursive_split(hist, kappa, 0, 255, k, ranges);
    std::sort(ranges.begin(), ranges.end());

    // merge zero-mass ranges into the nearest populated neighbor
    std::vector<std::pair<int, int>> merged;
    for (const auto& r : ranges) {
        if (detail::range_stats(hist, r.first, r.second).mass > 0.0 || merged.empty())
            merged.push_back(r);
        else
            merged.back().second = r.second;
    }
    while (merged.size() > 1 &&
           detail::range_stats(hist, merged.front().first, merged.front().second).mass <= 0.0) {
        merged[1].first = merged[0].first;
        merged.erase(merged.begin());
    }

    ThresholdSet ts;
    for (std::size_t j = 0; j < merged.size(); ++j) {
        const auto st = detail::range_stats(hist, merged[j].first, merged[j].second);
        ts.class_means.push_back(st.mass > 0.0 ? st.mean
                                               : 0.5 * (merged[j].first + merged[j].second));
        if (j > 0) ts.thresholds.push_back(merged[j].first);
    }
    return ts;
}

/// Replace each pixel with the (rounded) mean of its class.
inline GrayImage apply_thresholds(const GrayImage& img, const ThresholdSet& t) {
    std::array<std::uint8_t, 256> lut{};
    for (int i = 0; i < 256; ++i) {
        std::size_t c = 0;
        while (c < t.thresholds.size() && i >= t.thresholds[c]) ++c;
        const double m = std::min(255.0, std::max(0.0, t.class_means[c]));
        lut[i] = static_cast<std::uint8_t>(std::llround(m));
    }
    GrayImage out(img.width, img.height);
    for (std::size_t p = 0; p < img.size(); ++p) out.data[p] = lut[img.data[p]];
    return out;
}

inline nlohmann::json thresholds_to_json(const ThresholdSet& t) {
    return nlohmann::json{{"thresholds", t.thresholds}, {"class_means", t.class_means}};
}

} // namespace povmremap
