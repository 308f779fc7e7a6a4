#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "povmremap/error.hpp"
#include "povmremap/image.hpp"

namespace povmremap {

inline constexpr double kSigmaFloor = 0.5;

enum class ModelKind { kmeans, gmm };

struct ModelComponent {
    double mu;
    double sigma;
    double weight;
};

/// Representative intensities with spreads and weights; components are
/// kept sorted by mu.
struct IntensityModel {
    std::vector<ModelComponent> components;
    ModelKind kind = ModelKind::kmeans;
    std::optional<double> delta; // shared spread, kmeans path only

    int k() const { return static_cast<int>(components.size()); }
};

namespace detail {

inline void sort_by_mu(IntensityModel& m) {
    std::sort(m.components.begin(), m.components.end(),
              [](const ModelComponent& a, const ModelComponent& b) { return a.mu < b.mu; });
}

/// delta rule for the kmeans path: adapts coverage to the learned centers,
/// never narrower than 8 levels.
inline double default_delta(const std::vector<ModelComponent>& sorted) {
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < sorted.size(); ++i)
        min_gap = std::min(min_gap, sorted[i].mu - sorted[i - 1].mu);
    if (!std::isfinite(min_gap)) return 8.0;
    return std::max(8.0, 0.5 * min_gap);
}

inline double log_normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * M_PI);
}

} // namespace detail

/// Weighted 1-D Lloyd iteration on the 256-bin histogram. Deterministic:
/// centers start at the (j-0.5)/k quantiles, ties assign to the lower
/// cluster, empty clusters reseed at the bin with the largest
/// distance-weighted count.
inline IntensityModel estimate_kmeans(const Histogram& hist, int k) {
    if (k < 1) throw InvalidParams("estimate_kmeans: k must be >= 1");
    if (hist.distinct_levels() < k)
        throw TooFewDistinctLevels("estimate_kmeans: fewer distinct intensities than k");

    // quantile initialization
    std::vector<double> centers(k);
    for (int j = 0; j < k; ++j) {
        const double q = (j + 0.5) / k;
        double cdf = 0.0;
        int level = 255;
        for (int i = 0; i < 256; ++i) {
            cdf += hist.probs[i];
            if (cdf >= q) { level = i; break; }
        }
        centers[j] = level;
    }
    std::sort(centers.begin(), centers.end());

    std::vector<int> assign(256, 0);
    for (int iter = 0; iter < 300; ++iter) {
        for (int i = 0; i < 256; ++i) {
            int best = 0;
            double bestd = std::abs(i - centers[0]);
            for (int j = 1; j < k; ++j) {
                const double d = std::abs(i - centers[j]);
                if (d < bestd) { bestd = d; best = j; }
            }
            assign[i] = best;
        }
        std::vector<double> mass(k, 0.0), sum(k, 0.0);
        for (int i = 0; i < 256; ++i) {
            if (hist.counts[i] == 0) continue;
            const double c = static_cast<double>(hist.counts[i]);
            mass[assign[i]] += c;
            sum[assign[i]] += c * i;
        }
        double max_move = 0.0;
        for (int j = 0; j < k; ++j) {
            double next;
            if (mass[j] > 0.0) {
                next = sum[j] / mass[j];
            } else {
                // reseed at the intensity with the largest distance-weighted count
                double best_score = -1.0;
                int best_i = 0;
                for (int i = 0; i < 256; ++i) {
                    if (hist.counts[i] == 0) continue;
                    double dmin = std::numeric_limits<double>::infinity();
                    for (int jj = 0; jj < k; ++jj)
                        dmin = std::min(dmin, std::abs(i - centers[jj]));
                    const double score = static_cast<double>(hist.counts[i]) * dmin * dmin;
                    if (score > best_score) { best_score = score; best_i = i; }
                }
                next = best_i;
            }
            max_move = std::max(max_move, std::abs(next - centers[j]));
            centers[j] = next;
        }
        std::sort(centers.begin(), centers.end());
        if (max_move < 1e-4) break;
    }

    // final assignment and within-cluster spreads
    for (int i = 0; i < 256; ++i) {
        int best = 0;
        double bestd = std::abs(i - centers[0]);
        for (int j = 1; j < k; ++j) {
            const double d = std::abs(i - centers[j]);
            if (d < bestd) { bestd = d; best = j; }
        }
        assign[i] = best;
    }
    std::vector<double> mass(k, 0.0), m1(k, 0.0), m2(k, 0.0);
    for (int i = 0; i < 256; ++i) {
        if (hist.counts[i] == 0) continue;
        const double c = static_cast<double>(hist.counts[i]);
        mass[assign[i]] += c;
        m1[assign[i]] += c * i;
        m2[assign[i]] += c * i * i;
    }

    IntensityModel model;
    model.kind = ModelKind::kmeans;
    for (int j = 0; j < k; ++j) {
        const double mu = mass[j] > 0.0 ? m1[j] / mass[j] : centers[j];
        double var = mass[j] > 0.0 ? std::max(0.0, m2[j] / mass[j] - mu * mu) : 0.0;
        model.components.push_back({mu, std::max(kSigmaFloor, std::sqrt(var)), 1.0});
    }
    detail::sort_by_mu(model);
    model.delta = detail::default_delta(model.components);
    return model;
}

/// Log-likelihood of a GMM on the histogram:
/// sum_i counts[i] * log sum_k w_k N(i; mu_k, sigma_k^2).
inline double em_log_likelihood(const Histogram& hist, const IntensityModel& model) {
    if (model.kind != ModelKind::gmm)
        throw InvalidParams("em_log_likelihood: model kind must be gmm");
    double ll = 0.0;
    for (int i = 0; i < 256; ++i) {
        if (hist.counts[i] == 0) continue;
        double mx = -std::numeric_limits<double>::infinity();
        std::vector<double> lg(model.components.size());
        for (std::size_t j = 0; j < model.components.size(); ++j) {
            const auto& c = model.components[j];
            lg[j] = std::log(std::max(c.weight, 1e-300)) +
                    detail::log_normal_pdf(i, c.mu, c.sigma);
            mx = std::max(mx, lg[j]);
        }
        double s = 0.0;
        for (double v : lg) s += std::exp(v - mx);
        ll += static_cast<double>(hist.counts[i]) * (mx + std::log(s));
    }
    return ll;
}

struct GmmFitTrace {
    std::vector<double> log_likelihoods; // one entry per EM iteration
};

/// Histogram-weighted EM, initialized from the kmeans result so the fit is
/// deterministic. Variances are floored at kSigmaFloor^2 every M-step.
inline IntensityModel estimate_gmm(const Histogram& hist, int k,
                                   GmmFitTrace* trace = nullptr) {
    IntensityModel model = estimate_kmeans(hist, k);
    model.kind = ModelKind::gmm;
    model.delta.reset();

    // weights from cluster mass under the kmeans partition
    {
        std::vector<double> mass(k, 0.0);
        for (int i = 0; i < 256; ++i) {
            if (hist.counts[i] == 0) continue;
            int best = 0;
            double bestd = std::abs(i - model.components[0].mu);
            for (int j = 1; j < k; ++j) {
                const double d = std::abs(i - model.components[j].mu);
                if (d < bestd) { bestd = d; best = j; }
            }
            mass[best] += static_cast<double>(hist.counts[i]);
        }
        const double total = static_cast<double>(hist.total);
        for (int j = 0; j < k; ++j)
            model.components[j].weight = mass[j] / total;
    }

    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 200; ++iter) {
        // E-step in log domain
        std::vector<double> nk(k, 0.0), s1(k, 0.0), s2(k, 0.0);
        double ll = 0.0;
        for (int i = 0; i < 256; ++i) {
            if (hist.counts[i] == 0) continue;
            std::vector<double> lg(k);
            double mx = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                const auto& c = model.components[j];
                lg[j] = std::log(std::max(c.weight, 1e-300)) +
                        detail::log_normal_pdf(i, c.mu, c.sigma);
                mx = std::max(mx, lg[j]);
            }
            double s = 0.0;
            for (double v : lg) s += std::exp(v - mx);
            const double cnt = static_cast<double>(hist.counts[i]);
            ll += cnt * (mx + std::log(s));
            for (int j = 0; j < k; ++j) {
                const double r = std::exp(lg[j] - mx) / s;
                nk[j] += cnt * r;
                s1[j] += cnt * r * i;
                s2[j] += cnt * r * i * i;
            }
        }
        if (!std::isfinite(ll)) throw EmDiverged("estimate_gmm: non-finite log-likelihood");
        if (trace) trace->log_likelihoods.push_back(ll);

        // M-step with variance floor
        const double total = static_cast<double>(hist.total);
        for (int j = 0; j < k; ++j) {
            if (nk[j] <= 0.0) continue; // floors keep responsibilities positive
            const double mu = s1[j] / nk[j];
            const double var = std::max(kSigmaFloor * kSigmaFloor,
                                        s2[j] / nk[j] - mu * mu);
            model.components[j] = {mu, std::sqrt(var), nk[j] / total};
        }

        if (std::isfinite(prev_ll) &&
            std::abs(ll - prev_ll) < 1e-6 * std::max(1.0, std::abs(ll)))
            break;
        prev_ll = ll;
    }

    detail::sort_by_mu(model);
    return model;
}

inline nlohmann::json model_to_json(const IntensityModel& m) {
    nlohmann::json j;
    j["kind"] = (m.kind == ModelKind::kmeans) ? "kmeans" : "gmm";
    if (m.delta) j["delta"] = *m.delta; else j["delta"] = nullptr;
    j["components"] = nlohmann::json::array();
    for (const auto& c : m.components)
        j["components"].push_back({{"mu", c.mu}, {"sigma", c.sigma}, {"weight", c.weight}});
    return j;
}

inline IntensityModel model_from_json(const nlohmann::json& j) {
    IntensityModel m;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "kmeans") m.kind = ModelKind::kmeans;
    else if (kind == "gmm") m.kind = ModelKind::gmm;
    else throw FormatError("model_from_json: unknown kind " + kind);
    if (j.contains("delta") && !j["delta"].is_null())
        m.delta = j["delta"].get<double>();
    for (const auto& c : j.at("components"))
        m.components.push_back({c.at("mu").get<double>(), c.at("sigma").get<double>(),
                                c.at("weight").get<double>()});
    detail::sort_by_mu(m);
    return m;
}

} // namespace povmremap
