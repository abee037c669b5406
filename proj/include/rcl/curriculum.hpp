// Schedules and per-network selection primitives.
//
// remember rate  R(T) = 1 - eps * min(T / T_cut, 1)
//   decays from ~1 at T=1 to the clean rate 1-eps at T_cut and stays there.
// fusion rate    r(T) = 1 - (T / (alpha*T_cut))^beta for T < alpha*T_cut, else 0
//   controls how many disagreed samples are admitted next to the agreed set;
//   beta = 0 means no disagreement phase at all (x^0 = 1, so r is 0 from T=1).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcl/csv.hpp"

namespace rcl {

struct ScheduleParams {
    double epsilon = 0.0;  // noise rate driving R(T), in [0, 1)
    int t_cut = 10;        // epoch where R(T) reaches 1 - epsilon
    double alpha = 2.0;    // fusion switch lag: r(T) hits 0 at alpha * t_cut
    double beta = 1.0;     // fusion decay exponent, >= 0
    int t_max = 200;       // total epochs

    void validate() const {
        if (epsilon < 0.0 || epsilon >= 1.0)
            throw std::invalid_argument("schedule: epsilon must be in [0, 1)");
        if (t_cut < 1) throw std::invalid_argument("schedule: t_cut must be >= 1");
        if (alpha <= 0.0) throw std::invalid_argument("schedule: alpha must be > 0");
        if (beta < 0.0) throw std::invalid_argument("schedule: beta must be >= 0");
        if (t_max < 1) throw std::invalid_argument("schedule: t_max must be >= 1");
    }

    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (alpha * t_cut > t_max) {
            w.push_back("alpha * t_cut = " + format_double(alpha * t_cut) + " exceeds t_max = " +
                        std::to_string(t_max) + ": the pure-disagreement phase never ends");
        }
        return w;
    }
};

inline double remember_rate(int epoch, const ScheduleParams& p) {
    if (epoch < 1) throw std::invalid_argument("remember_rate: epoch must be >= 1");
    const double frac = std::min(static_cast<double>(epoch) / p.t_cut, 1.0);
    return 1.0 - p.epsilon * frac;
}

inline double fusion_rate(int epoch, const ScheduleParams& p) {
    if (epoch < 1) throw std::invalid_argument("fusion_rate: epoch must be >= 1");
    const double switch_epoch = p.alpha * p.t_cut;
    if (static_cast<double>(epoch) >= switch_epoch) return 0.0;
    return 1.0 - std::pow(static_cast<double>(epoch) / switch_epoch, p.beta);
}

// Canonical floor(rate * n) used by both selection and fusion quotas. The
// small epsilon absorbs binary representation artifacts (0.7 * 10 is
// 6.999...96 in doubles but the intended count is 7).
inline std::size_t scaled_count(double rate, std::size_t n) {
    const auto k = static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 1e-9));
    return std::min(k, n);
}

// A network's chosen within-batch positions: unique, sorted ascending.
struct SelectionSet {
    std::vector<int> indices;
    int source_epoch = 0;
    int source_batch = 0;

    std::size_t size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }
    bool contains(int i) const { return std::binary_search(indices.begin(), indices.end(), i); }
};

// Top floor(R*n) smallest-loss positions (minimum 1). Ties broken toward the
// smaller index; output sorted.
inline SelectionSet select_small_loss(const std::vector<double>& losses, double remember,
                                      int source_epoch = 0, int source_batch = 0) {
    if (losses.empty()) throw std::invalid_argument("select_small_loss: empty loss vector");
    if (remember <= 0.0 || remember > 1.0) {
        throw std::invalid_argument("select_small_loss: remember rate must be in (0, 1]");
    }
    const std::size_t keep = std::max<std::size_t>(1, scaled_count(remember, losses.size()));
    std::vector<int> order(losses.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return losses[static_cast<std::size_t>(a)] < losses[static_cast<std::size_t>(b)];
    });
    order.resize(keep);
    std::sort(order.begin(), order.end());
    return SelectionSet{std::move(order), source_epoch, source_batch};
}

// Closed-form self-paced weights for g(v, lambda) = -lambda * v:
// v_i = 1 iff loss_i < lambda (strict; the boundary gets 0).
struct SplCurriculum {
    double lambda = 0.0;
    std::vector<int> v;  // binary
};

inline SplCurriculum spl_weights(const std::vector<double>& losses, double lambda) {
    if (lambda <= 0.0) throw std::invalid_argument("spl_weights: lambda must be > 0");
    SplCurriculum out{lambda, std::vector<int>(losses.size(), 0)};
    for (std::size_t i = 0; i < losses.size(); ++i) {
        out.v[i] = losses[i] < lambda ? 1 : 0;
    }
    return out;
}

}  // namespace rcl
