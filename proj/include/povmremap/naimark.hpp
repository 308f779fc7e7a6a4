#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "povmremap/error.hpp"
#include "povmremap/image.hpp"
#include "povmremap/povm.hpp"
#include "povmremap/rng.hpp"

namespace povmremap {

/// Kraus operators M_k = sqrt(E_k); diagonal in the intensity basis, so
/// only the K x 256 diagonals are stored. Columns of squares sum to 1
/// (sum_k M_k^dag M_k = I).
struct KrausSet {
    int k = 0;
    std::vector<std::array<double, 256>> diag;
};

/// Result of applying the isometry V|psi> = sum_k M_k|psi> (x) |k>.
/// Diagonal operators keep the system index intact, so the state is stored
/// sparsely: one entry per populated intensity, K ancilla amplitudes each.
/// For a pure input there is a single entry of weight 1; a mixed input
/// (histogram) carries one entry per nonzero bin weighted by p(i).
struct DilatedState {
    struct Entry {
        int intensity;
        double weight; // classical mixture weight p(i); 1 for pure inputs
        std::vector<double> amplitudes;
    };
    int k = 0;
    std::vector<Entry> entries;

    double norm_squared() const {
        double s = 0.0;
        for (const auto& e : entries) {
            double a2 = 0.0;
            for (double a : e.amplitudes) a2 += a * a;
            s += e.weight * a2;
        }
        return s;
    }
};

inline KrausSet kraus_from_povm(const PovmTable& povm) {
    KrausSet ks;
    ks.k = povm.k;
    ks.diag.resize(ks.k);
    for (int j = 0; j < ks.k; ++j)
        for (int i = 0; i < 256; ++i)
            ks.diag[j][i] = std::sqrt(povm.coeffs[j][i]);
    return ks;
}

/// V acting on a pure intensity state |i> (x) |0|: amplitudes sqrt(E_k(i)).
inline DilatedState dilate(const KrausSet& kraus, int intensity) {
    if (intensity < 0 || intensity > 255)
        throw IndexOutOfRange("dilate: intensity out of range");
    DilatedState st;
    st.k = kraus.k;
    DilatedState::Entry e{intensity, 1.0, std::vector<double>(kraus.k)};
    for (int j = 0; j < kraus.k; ++j) e.amplitudes[j] = kraus.diag[j][intensity];
    st.entries.push_back(std::move(e));
    return st;
}

/// V applied to each populated basis state of a mixed input rho (the
/// image histogram), weighted by p(i).
inline DilatedState dilate_mixed(const KrausSet& kraus, const Histogram& rho) {
    DilatedState st;
    st.k = kraus.k;
    for (int i = 0; i < 256; ++i) {
        if (rho.probs[i] <= 0.0) continue;
        DilatedState::Entry e{i, rho.probs[i], std::vector<double>(kraus.k)};
        for (int j = 0; j < kraus.k; ++j) e.amplitudes[j] = kraus.diag[j][i];
        st.entries.push_back(std::move(e));
    }
    return st;
}

/// Projective measurement statistics on the ancilla:
/// p_k = sum_i weight(i) * amplitude(i,k)^2 = Tr(E_k rho).
inline std::vector<double> ancilla_distribution(const DilatedState& state) {
    std::vector<double> p(state.k, 0.0);
    for (const auto& e : state.entries)
        for (int j = 0; j < state.k; ++j)
            p[j] += e.weight * e.amplitudes[j] * e.amplitudes[j];
    return p;
}

/// Seeded categorical sampling of ancilla outcomes; counts sum to n.
inline std::vector<std::uint64_t> sample_outcomes(const DilatedState& state,
                                                  std::uint64_t n, std::uint64_t seed) {
    if (n < 1) throw InvalidParams("sample_outcomes: n must be >= 1");
    const std::vector<double> p = ancilla_distribution(state);
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) { acc += p[j]; cdf[j] = acc; }

    CounterRng rng(seed);
    std::vector<std::uint64_t> counts(p.size(), 0);
    for (std::uint64_t s = 0; s < n; ++s) {
        const double u = rng.uniform(s) * acc;
        std::size_t j = 0;
        while (j + 1 < cdf.size() && u >= cdf[j]) ++j;
        ++counts[j];
    }
    return counts;
}

} // namespace povmremap
