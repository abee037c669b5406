// Aggregate statistics for sweep reports: mean/std, one-sided paired t-test,
// chi-square goodness-of-fit p-values. Distribution CDFs come from Boost.Math.
#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rcl {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double sample_std(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("sample_std: empty input");
    if (v.size() == 1) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct TTestResult {
    double t_stat = 0.0;
    double p_value = 1.0;
    int dof = 0;
};

// One-sided paired t-test of H1: mean(a - b) > 0. Identical inputs give
// p = 0.5 (never significant). A degenerate zero-variance difference gives
// p = 0 or 1 depending on its sign.
inline TTestResult paired_t_test_one_sided(const std::vector<double>& a,
                                           const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw std::invalid_argument("paired_t_test_one_sided: need two equal-length series, n >= 2");
    }
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    const double md = mean(diff);
    const double sd = sample_std(diff);
    TTestResult r;
    r.dof = static_cast<int>(a.size()) - 1;
    if (sd == 0.0) {
        r.t_stat = md > 0.0 ? std::numeric_limits<double>::infinity()
                            : (md < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0);
        r.p_value = md > 0.0 ? 0.0 : (md < 0.0 ? 1.0 : 0.5);
        return r;
    }
    r.t_stat = md / (sd / std::sqrt(static_cast<double>(a.size())));
    boost::math::students_t dist(static_cast<double>(r.dof));
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.t_stat));
    return r;
}

// Upper-tail chi-square p-value for a goodness-of-fit statistic.
inline double chi_squared_p_value(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_squared_p_value: dof must be >= 1");
    boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

// Pearson chi-square statistic of observed counts against uniform expectation.
inline double chi_squared_uniform_stat(const std::vector<std::size_t>& counts) {
    if (counts.size() < 2) throw std::invalid_argument("chi_squared_uniform_stat: need >= 2 bins");
    std::size_t total = 0;
    for (auto c : counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

}  // namespace rcl
