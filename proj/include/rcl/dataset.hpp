// Dataset construction, label-noise injection with a ground-truth clean mask,
// and train/test handling.
//
// Noise is injected with exact per-class counts: for noise rate eps and class
// size n_c, exactly round(eps * n_c) samples are flipped, so the realized
// noise rate matches the nominal one up to rounding. Flip targets follow the
// off-diagonal distribution of the transition matrix: uniform over the other
// classes for symmetric noise, the adjacent class (c+1 mod C) for pair flip.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rcl/csv.hpp"
#include "rcl/matrix.hpp"
#include "rcl/rng.hpp"

namespace rcl {

enum class NoiseKind { symmetric, pair_flip };

inline std::string noise_kind_name(NoiseKind k) {
    return k == NoiseKind::symmetric ? "sym" : "pf";
}

struct NoiseSpec {
    NoiseKind kind = NoiseKind::symmetric;
    double rate = 0.0;  // in [0, 1)
    std::uint64_t seed = 0;

    void validate() const {
        if (rate < 0.0 || rate >= 1.0) {
            throw std::invalid_argument("noise rate must be in [0, 1), got " + format_double(rate));
        }
    }

    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (kind == NoiseKind::pair_flip && rate >= 0.5) {
            w.push_back("pair-flip rate " + format_double(rate) +
                        " >= 0.5: the flipped class dominates its source class");
        }
        return w;
    }
};

struct Dataset {
    Matrix features;  // n x d
    std::vector<int> observed_labels;
    std::vector<int> true_labels;        // oracle only
    std::vector<std::uint8_t> clean_mask;  // observed == true
    int num_classes = 0;
    bool has_oracle = true;  // false when loaded from user data with unknown noise
    std::vector<std::string> feature_names;

    std::size_t size() const { return features.rows; }
    int dim() const { return static_cast<int>(features.cols); }

    double realized_noise_rate() const {
        if (clean_mask.empty()) return 0.0;
        std::size_t noisy = 0;
        for (auto c : clean_mask)
            if (!c) ++noisy;
        return static_cast<double>(noisy) / static_cast<double>(clean_mask.size());
    }

    void recompute_clean_mask() {
        clean_mask.resize(observed_labels.size());
        for (std::size_t i = 0; i < observed_labels.size(); ++i) {
            clean_mask[i] = observed_labels[i] == true_labels[i] ? 1 : 0;
        }
    }

    void default_feature_names() {
        feature_names.resize(features.cols);
        for (std::size_t i = 0; i < features.cols; ++i) feature_names[i] = "f" + std::to_string(i);
    }
};

// Row-stochastic C x C noise transition matrix. Symmetric noise spreads eps
// uniformly over the other C-1 classes; pair flip moves eps to (i+1) mod C.
inline Matrix transition_matrix(NoiseKind kind, double eps, int num_classes) {
    if (num_classes < 2) {
        throw std::invalid_argument("transition_matrix: need at least 2 classes");
    }
    const auto c = static_cast<std::size_t>(num_classes);
    Matrix t(c, c, 0.0);
    for (std::size_t i = 0; i < c; ++i) {
        t(i, i) = 1.0 - eps;
        if (kind == NoiseKind::symmetric) {
            const double off = eps / static_cast<double>(num_classes - 1);
            for (std::size_t j = 0; j < c; ++j)
                if (j != i) t(i, j) = off;
        } else {
            t(i, (i + 1) % c) = eps;
        }
    }
    return t;
}

// Flips exactly round(rate * n_c) labels per class, chosen uniformly without
// replacement; deterministic for a fixed spec.seed. Returns the observed
// labels and the clean mask (observed == true).
inline std::pair<std::vector<int>, std::vector<std::uint8_t>> inject_noise(
    const std::vector<int>& true_labels, const NoiseSpec& spec, int num_classes) {
    spec.validate();
    for (int y : true_labels) {
        if (y < 0 || y >= num_classes) {
            throw std::invalid_argument("inject_noise: label " + std::to_string(y) +
                                        " out of range [0, " + std::to_string(num_classes) + ")");
        }
    }
    std::vector<int> observed = true_labels;
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        by_class[static_cast<std::size_t>(true_labels[i])].push_back(static_cast<int>(i));
    }
    for (int c = 0; c < num_classes; ++c) {
        const auto& members = by_class[static_cast<std::size_t>(c)];
        const auto n_flip =
            static_cast<std::size_t>(std::llround(spec.rate * static_cast<double>(members.size())));
        if (n_flip == 0) continue;
        Rng rng(derive_seed(spec.seed, 0x6E6F6973ull, c));  // per-class stream
        const std::vector<int> victims = rng.sample_without_replacement(members, n_flip);
        for (int idx : victims) {
            int target;
            if (spec.kind == NoiseKind::pair_flip) {
                target = (c + 1) % num_classes;
            } else {
                auto t = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_classes - 1)));
                if (t >= c) ++t;  // skip the true class
                target = t;
            }
            observed[static_cast<std::size_t>(idx)] = target;
        }
    }
    std::vector<std::uint8_t> clean(true_labels.size());
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        clean[i] = observed[i] == true_labels[i] ? 1 : 0;
    }
    return {std::move(observed), std::move(clean)};
}

// Applies noise to a dataset in place, treating its current labels as ground
// truth.
inline void apply_noise(Dataset& ds, const NoiseSpec& spec) {
    ds.true_labels = ds.observed_labels;
    auto [observed, clean] = inject_noise(ds.true_labels, spec, ds.num_classes);
    ds.observed_labels = std::move(observed);
    ds.clean_mask = std::move(clean);
    ds.has_oracle = true;
}

// Synthetic desk-scale classification data: class-conditional unit-variance
// Gaussians. Class centers sit on a circle in the first two feature
// dimensions, scaled so adjacent centers are `separation` apart; remaining
// dimensions are pure noise. separation = 0 makes the classes
// indistinguishable.
inline Dataset gen_blobs(int num_classes, int per_class, int dim, double separation,
                         std::uint64_t seed) {
    if (num_classes < 2) throw std::invalid_argument("gen_blobs: need at least 2 classes");
    if (dim < 2) throw std::invalid_argument("gen_blobs: need dim >= 2");
    if (per_class < 1) throw std::invalid_argument("gen_blobs: need per_class >= 1");
    const double pi = 3.14159265358979323846;
    const double radius = separation / (2.0 * std::sin(pi / num_classes));
    Dataset ds;
    const auto n = static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(per_class);
    ds.features = Matrix(n, static_cast<std::size_t>(dim));
    ds.observed_labels.resize(n);
    ds.true_labels.resize(n);
    ds.num_classes = num_classes;
    Rng rng(seed);
    std::size_t row = 0;
    for (int c = 0; c < num_classes; ++c) {
        const double angle = 2.0 * pi * c / num_classes;
        const double cx = radius * std::cos(angle);
        const double cy = radius * std::sin(angle);
        for (int s = 0; s < per_class; ++s, ++row) {
            ds.features(row, 0) = cx + rng.normal();
            ds.features(row, 1) = cy + rng.normal();
            for (int d = 2; d < dim; ++d) {
                ds.features(row, static_cast<std::size_t>(d)) = rng.normal();
            }
            ds.observed_labels[row] = c;
            ds.true_labels[row] = c;
        }
    }
    ds.recompute_clean_mask();
    ds.default_feature_names();
    return ds;
}

namespace detail {

inline Dataset take_rows(const Dataset& ds, const std::vector<int>& rows) {
    Dataset out;
    out.features = Matrix(rows.size(), ds.features.cols);
    out.observed_labels.resize(rows.size());
    out.true_labels.resize(rows.size());
    out.num_classes = ds.num_classes;
    out.has_oracle = ds.has_oracle;
    out.feature_names = ds.feature_names;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<std::size_t>(rows[i]);
        for (std::size_t j = 0; j < ds.features.cols; ++j) out.features(i, j) = ds.features(r, j);
        out.observed_labels[i] = ds.observed_labels[r];
        out.true_labels[i] = ds.true_labels[r];
    }
    out.recompute_clean_mask();
    return out;
}

inline int parse_label_cell(const std::string& cell, int row, const std::string& what) {
    double v = 0.0;
    if (!parse_double(cell, v)) {
        throw std::runtime_error("dataset: non-numeric " + what + " '" + cell + "' at data row " +
                                 std::to_string(row));
    }
    const double r = std::nearbyint(v);
    if (std::abs(v - r) > 1e-9 || r < 0.0 || r > 1e9) {
        throw std::runtime_error("dataset: " + what + " '" + cell + "' at data row " +
                                 std::to_string(row) + " is not a non-negative integer");
    }
    return static_cast<int>(r);
}

}  // namespace detail

// Seeded permutation partition. The first round(n * test_fraction) entries of
// the permutation form the test set. Splitting happens before any noise
// injection; the test side stays clean.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                         std::uint64_t seed) {
    if (test_fraction < 0.0 || test_fraction >= 1.0) {
        throw std::invalid_argument("split: test_fraction must be in [0, 1)");
    }
    std::vector<int> perm(ds.size());
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(perm);
    const auto n_test =
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(ds.size())));
    std::vector<int> test_rows(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<int> train_rows(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    return {detail::take_rows(ds, train_rows), detail::take_rows(ds, test_rows)};
}

// Writes the dataset snapshot: feature columns, then observed, true, clean.
inline void save_csv(const Dataset& ds, const std::string& path) {
    CsvWriter out(path);
    std::vector<std::string> row = ds.feature_names;
    row.insert(row.end(), {"observed", "true", "clean"});
    out.write_row(row);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        row.clear();
        for (std::size_t j = 0; j < ds.features.cols; ++j) {
            row.push_back(format_double(ds.features(i, j)));
        }
        row.push_back(std::to_string(ds.observed_labels[i]));
        row.push_back(std::to_string(ds.true_labels[i]));
        row.push_back(ds.clean_mask[i] ? "1" : "0");
    }
    out.close();
}

// Loads a rectangular numeric CSV with a header. Two layouts are accepted:
//   - snapshot files produced by save_csv (last three columns observed, true,
//     clean): the oracle information is restored and label_column, when
//     given, must be "observed";
//   - plain files: label_column names the label column, every other column is
//     a feature, and the dataset carries no noise oracle (pure ratio will be
//     reported as unavailable).
inline Dataset load_csv(const std::string& path, const std::string& label_column) {
    const CsvTable table = read_csv(path);
    if (table.rows.empty()) throw std::runtime_error("load_csv: no data rows in " + path);

    const std::size_t ncols = table.header.size();
    const bool snapshot = ncols >= 4 && table.header[ncols - 3] == "observed" &&
                          table.header[ncols - 2] == "true" && table.header[ncols - 1] == "clean";

    Dataset ds;
    if (snapshot) {
        if (!label_column.empty() && label_column != "observed") {
            throw std::runtime_error("load_csv: " + path +
                                     " is a dataset snapshot; label column must be 'observed', got '" +
                                     label_column + "'");
        }
        const std::size_t d = ncols - 3;
        ds.features = Matrix(table.rows.size(), d);
        ds.feature_names.assign(table.header.begin(), table.header.begin() + static_cast<long>(d));
        ds.observed_labels.resize(table.rows.size());
        ds.true_labels.resize(table.rows.size());
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const auto& r = table.rows[i];
            for (std::size_t j = 0; j < d; ++j) {
                if (!parse_double(r[j], ds.features(i, j))) {
                    throw std::runtime_error("load_csv: non-numeric cell '" + r[j] + "' at data row " +
                                             std::to_string(i) + ", column " + table.header[j]);
                }
            }
            ds.observed_labels[i] = detail::parse_label_cell(r[d], static_cast<int>(i), "observed label");
            ds.true_labels[i] = detail::parse_label_cell(r[d + 1], static_cast<int>(i), "true label");
            const int clean = detail::parse_label_cell(r[d + 2], static_cast<int>(i), "clean flag");
            if ((clean != 0 && clean != 1) ||
                (clean == 1) != (ds.observed_labels[i] == ds.true_labels[i])) {
                throw std::runtime_error("load_csv: inconsistent clean flag at data row " +
                                         std::to_string(i));
            }
        }
        ds.has_oracle = true;
    } else {
        const int label_idx = table.column(label_column);
        if (label_idx < 0) {
            std::string cols;
            for (const auto& h : table.header) cols += (cols.empty() ? "" : ", ") + h;
            throw std::runtime_error("load_csv: label column '" + label_column + "' not in " + path +
                                     " (columns: " + cols + ")");
        }
        const std::size_t d = ncols - 1;
        if (d == 0) throw std::runtime_error("load_csv: no feature columns in " + path);
        ds.features = Matrix(table.rows.size(), d);
        ds.observed_labels.resize(table.rows.size());
        for (std::size_t j = 0; j < ncols; ++j) {
            if (static_cast<int>(j) != label_idx) ds.feature_names.push_back(table.header[j]);
        }
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const auto& r = table.rows[i];
            std::size_t k = 0;
            for (std::size_t j = 0; j < ncols; ++j) {
                if (static_cast<int>(j) == label_idx) continue;
                if (!parse_double(r[j], ds.features(i, k))) {
                    throw std::runtime_error("load_csv: non-numeric cell '" + r[j] + "' at data row " +
                                             std::to_string(i) + ", column " + table.header[j]);
                }
                ++k;
            }
            ds.observed_labels[i] = detail::parse_label_cell(r[static_cast<std::size_t>(label_idx)],
                                                             static_cast<int>(i), "label");
        }
        ds.true_labels = ds.observed_labels;
        ds.has_oracle = false;
    }

    int max_label = 0;
    for (std::size_t i = 0; i < ds.observed_labels.size(); ++i) {
        max_label = std::max({max_label, ds.observed_labels[i], ds.true_labels[i]});
    }
    ds.num_classes = max_label + 1;
    ds.recompute_clean_mask();
    return ds;
}

}  // namespace rcl
