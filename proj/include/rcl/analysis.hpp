// Oracle-based metrics: pure ratio, the four-quadrant gradient decomposition,
// and noisy-gradient-norm accumulation.
//
// The decomposition splits the applied mini-batch gradient mass by data
// quality (clean / noisy) and network agreement. "Agreed" means a sample's
// membership status is identical in both selections; samples excluded by both
// networks contribute no gradient and are not counted.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rcl/curriculum.hpp"
#include "rcl/matrix.hpp"

namespace rcl {

struct GradientDecomposition {
    // Quadrant gradient sums over the counted samples, one vector each.
    std::vector<double> agreed_clean;     // I_11
    std::vector<double> disagreed_clean;  // I_10
    std::vector<double> agreed_noisy;     // I_01
    std::vector<double> disagreed_noisy;  // I_00
    std::vector<double> total;            // element-wise sum of the four
    double norm_agreed_clean = 0.0;
    double norm_disagreed_clean = 0.0;
    double norm_agreed_noisy = 0.0;
    double norm_disagreed_noisy = 0.0;
    std::size_t counted = 0;  // samples selected by at least one network
};

namespace detail {

inline double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace detail

// Proportion of truly-clean samples among the selected ones, pooled over the
// given selections (dataset indices). Zero selected samples -> absent.
inline std::optional<double> pure_ratio(const std::vector<SelectionSet>& selections,
                                        const std::vector<std::uint8_t>& clean_mask) {
    std::size_t selected = 0;
    std::size_t clean = 0;
    for (const auto& sel : selections) {
        for (int i : sel.indices) {
            if (i < 0 || static_cast<std::size_t>(i) >= clean_mask.size()) {
                throw std::invalid_argument("pure_ratio: index out of dataset range");
            }
            ++selected;
            clean += clean_mask[static_cast<std::size_t>(i)] ? 1 : 0;
        }
    }
    if (selected == 0) return std::nullopt;
    return static_cast<double>(clean) / static_cast<double>(selected);
}

// Four-way split of per-sample gradient rows by (clean, agreement). Both
// selections index into the same batch; per_sample_grads holds one row per
// batch sample (e.g. last-layer gradients).
inline GradientDecomposition decompose(const std::vector<std::uint8_t>& clean_flags,
                                       const SelectionSet& selection_a,
                                       const SelectionSet& selection_b,
                                       const Matrix& per_sample_grads) {
    const std::size_t n = clean_flags.size();
    if (per_sample_grads.rows != n) {
        throw std::invalid_argument("decompose: gradient rows != batch size");
    }
    const std::size_t width = per_sample_grads.cols;
    GradientDecomposition d;
    d.agreed_clean.assign(width, 0.0);
    d.disagreed_clean.assign(width, 0.0);
    d.agreed_noisy.assign(width, 0.0);
    d.disagreed_noisy.assign(width, 0.0);
    d.total.assign(width, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const bool in_a = selection_a.contains(static_cast<int>(j));
        const bool in_b = selection_b.contains(static_cast<int>(j));
        if (!in_a && !in_b) continue;  // never used in an update
        const bool agreed = in_a == in_b;
        const bool clean = clean_flags[j] != 0;
        std::vector<double>& quadrant = clean ? (agreed ? d.agreed_clean : d.disagreed_clean)
                                              : (agreed ? d.agreed_noisy : d.disagreed_noisy);
        const auto row = per_sample_grads.row(j);
        for (std::size_t i = 0; i < width; ++i) {
            quadrant[i] += row[i];
            d.total[i] += row[i];
        }
        ++d.counted;
    }
    d.norm_agreed_clean = detail::l2_norm(d.agreed_clean);
    d.norm_disagreed_clean = detail::l2_norm(d.disagreed_clean);
    d.norm_agreed_noisy = detail::l2_norm(d.agreed_noisy);
    d.norm_disagreed_noisy = detail::l2_norm(d.disagreed_noisy);
    return d;
}

// Norm of the summed noisy-quadrant gradient (agreed noisy + disagreed noisy).
inline double noisy_grad_norm(const GradientDecomposition& d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.agreed_noisy.size(); ++i) {
        const double x = d.agreed_noisy[i] + d.disagreed_noisy[i];
        s += x * x;
    }
    return std::sqrt(s);
}

// The other reading of "gradient norm of noisy data": sum of the two noisy
// quadrant norms. Logged alongside the primary definition.
inline double noisy_grad_norm_split(const GradientDecomposition& d) {
    return d.norm_agreed_noisy + d.norm_disagreed_noisy;
}

// Prefix sums of a per-epoch norm series -> accumulative series.
inline std::vector<double> accumulate_series(const std::vector<double>& per_epoch) {
    std::vector<double> out(per_epoch.size());
    double running = 0.0;
    for (std::size_t i = 0; i < per_epoch.size(); ++i) {
        running += per_epoch[i];
        out[i] = running;
    }
    return out;
}

}  // namespace rcl
