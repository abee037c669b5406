// End-to-end training loops over the shared engine: the collaborative
// trainer (per-network small-loss selection -> knowledge fusion -> parallel
// updates), the revise-and-restart variant, and six reference baselines.
//
// Every run is bitwise reproducible from (config, master_seed): the epoch
// shuffle, the per-network initializations, and the per-(epoch, batch,
// network) fusion draws are all independent streams derived from the master
// seed, so results do not depend on execution order or threading.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <execution>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcl/analysis.hpp"
#include "rcl/curriculum.hpp"
#include "rcl/dataset.hpp"
#include "rcl/fusion.hpp"
#include "rcl/nn.hpp"
#include "rcl/rng.hpp"

namespace rcl {

enum class Method {
    standard,
    spl,
    decoupling,
    coteaching,
    lnec,
    self_ensemble,
    rcl,
    rcl_revise_restart,
};

inline const char* method_name(Method m) {
    switch (m) {
        case Method::standard: return "standard";
        case Method::spl: return "spl";
        case Method::decoupling: return "decoupling";
        case Method::coteaching: return "coteaching";
        case Method::lnec: return "lnec";
        case Method::self_ensemble: return "self";
        case Method::rcl: return "rcl";
        case Method::rcl_revise_restart: return "rcl_revise_restart";
    }
    return "?";
}

inline std::optional<Method> parse_method(const std::string& name) {
    for (Method m : {Method::standard, Method::spl, Method::decoupling, Method::coteaching,
                     Method::lnec, Method::self_ensemble, Method::rcl,
                     Method::rcl_revise_restart}) {
        if (name == method_name(m)) return m;
    }
    return std::nullopt;
}

struct TrainerConfig {
    Method method = Method::rcl;
    int networks = 3;  // K
    int batch_size = 128;
    std::vector<int> hidden = {16};
    ScheduleParams schedule;
    AdamParams optimizer;
    std::uint64_t master_seed = 1;
    int t_revise = 0;             // rcl_revise_restart only, in [1, t_max)
    double self_ema_decay = 0.6;  // self only, in [0, 1)
    bool grad_norm_by_batch = false;   // divide gradients by batch size, not selected count
    bool instrument_gradients = true;  // per-epoch noisy-gradient-norm logging
    bool report_best_epoch = false;    // summary accuracy = best epoch instead of final
    bool parallel_networks = false;    // run per-network phases with a parallel policy
    bool tie_network_inits = false;    // diagnostic: initialize every network identically
    bool save_networks = false;        // write final parameter snapshots next to metrics

    void validate() const {
        schedule.validate();
        if (networks < 1) throw std::invalid_argument("trainer: networks must be >= 1");
        if (batch_size < 1) throw std::invalid_argument("trainer: batch_size must be >= 1");
        if (optimizer.learning_rate <= 0.0)
            throw std::invalid_argument("trainer: learning_rate must be > 0");
        for (int h : hidden)
            if (h < 1) throw std::invalid_argument("trainer: hidden sizes must be >= 1");
        switch (method) {
            case Method::standard:
            case Method::spl:
            case Method::self_ensemble:
                if (networks != 1) {
                    throw std::invalid_argument(std::string("trainer: method ") +
                                                method_name(method) + " requires networks = 1");
                }
                break;
            case Method::decoupling:
            case Method::coteaching:
                if (networks != 2) {
                    throw std::invalid_argument(std::string("trainer: method ") +
                                                method_name(method) + " requires networks = 2");
                }
                break;
            case Method::lnec:
            case Method::rcl:
            case Method::rcl_revise_restart:
                if (networks < 2) {
                    throw std::invalid_argument(std::string("trainer: method ") +
                                                method_name(method) + " requires networks >= 2");
                }
                break;
        }
        if (method == Method::rcl_revise_restart) {
            if (t_revise < 1 || t_revise >= schedule.t_max) {
                throw std::invalid_argument(
                    "trainer: t_revise must be in [1, t_max) for rcl_revise_restart");
            }
        }
        if (method == Method::self_ensemble &&
            (self_ema_decay < 0.0 || self_ema_decay >= 1.0)) {
            throw std::invalid_argument("trainer: self_ema_decay must be in [0, 1)");
        }
    }
};

// Absent metric values (no oracle, nothing selected) are NaN; the reporting
// layer writes them as blank / null.
inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();
inline bool is_absent(double x) { return std::isnan(x); }

struct EpochLog {
    int epoch = 0;           // global epoch, 1-based
    int schedule_epoch = 0;  // epoch fed to the schedules (restarts after revision)
    double remember = 1.0;
    double fusion = 0.0;
    std::vector<double> test_accuracy;        // per network
    std::vector<double> pure_ratio;           // per network; NaN when unavailable
    std::vector<long long> trained_count;     // per network, samples used in updates
    // Primary noisy gradient norm: the batch noisy-quadrant gradient vectors
    // are summed across the epoch (as they are summed into the applied
    // updates) and the norm is taken once per epoch, so diversified noisy
    // gradients can cancel. The alternative reading takes norms before any
    // cancellation: per batch, |sum agreed_noisy| + |sum disagreed_noisy|,
    // summed over the epoch.
    double noisy_gn = kAbsent;
    double noisy_gn_split = kAbsent;
    double accum_noisy_gn = kAbsent;  // prefix sum of noisy_gn over epochs
    double noisy_train_accuracy = kAbsent;  // net 0 vs observed labels on noisy rows
    double wall_ms = 0.0;                   // informational; excluded from deterministic outputs
};

struct RevisionInfo {
    int epoch = 0;               // global epoch after which labels were revised
    std::size_t unselected = 0;  // samples put through revision
    std::size_t changed = 0;     // labels actually changed
    double revised_noise_rate = kAbsent;  // wrong-label fraction among revised samples
    double noise_rate_before = kAbsent;
    double noise_rate_after = kAbsent;
};

struct RunMetrics {
    std::vector<EpochLog> epochs;
    int networks = 0;
    double final_accuracy = 0.0;  // reporting network (index 0), last epoch
    double best_accuracy = 0.0;
    int best_epoch = 0;
    double reported_accuracy = 0.0;  // final or best, per config
    double mean_pure_ratio = kAbsent;   // net 0, averaged over epochs with a value
    double final_pure_ratio = kAbsent;
    double train_noise_rate = kAbsent;  // realized, before any revision
    std::optional<RevisionInfo> revision;
    std::vector<NetworkParams> final_networks;  // populated when save_networks is set
};

// Optional per-batch instrumentation, keyed by (epoch, batch, network).
// Selection and update sets hold sorted dataset indices.
struct BatchTrace {
    int epoch = 0;
    int batch = 0;
    int network = 0;
    std::vector<int> selection;
    std::vector<int> update_set;
};

struct TrainTrace {
    std::vector<BatchTrace> entries;
};

// Majority argmax vote across the networks for each listed sample; ties on
// the top vote count keep the original label. The clean mask is recomputed so
// post-revision metrics reflect the revised labels.
inline Dataset revise_labels(const std::vector<NetworkParams>& nets,
                             const std::vector<int>& unselected, const Dataset& ds) {
    if (nets.empty()) throw std::invalid_argument("revise_labels: no networks");
    Dataset out = ds;
    if (unselected.empty()) return out;
    Matrix rows(unselected.size(), ds.features.cols);
    for (std::size_t i = 0; i < unselected.size(); ++i) {
        const auto r = static_cast<std::size_t>(unselected[i]);
        for (std::size_t j = 0; j < ds.features.cols; ++j) rows(i, j) = ds.features(r, j);
    }
    std::vector<std::vector<int>> votes(nets.size());
    for (std::size_t k = 0; k < nets.size(); ++k) votes[k] = predict(nets[k], rows);
    for (std::size_t i = 0; i < unselected.size(); ++i) {
        std::vector<int> counts(static_cast<std::size_t>(ds.num_classes), 0);
        for (std::size_t k = 0; k < nets.size(); ++k) {
            ++counts[static_cast<std::size_t>(votes[k][i])];
        }
        int best = 0;
        bool tie = false;
        for (int c = 1; c < ds.num_classes; ++c) {
            if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) {
                best = c;
                tie = false;
            } else if (counts[static_cast<std::size_t>(c)] ==
                       counts[static_cast<std::size_t>(best)]) {
                tie = true;
            }
        }
        if (!tie) out.observed_labels[static_cast<std::size_t>(unselected[i])] = best;
    }
    out.recompute_clean_mask();
    return out;
}

namespace detail {

constexpr std::uint64_t kInitTag = 0x696E6974;     // network initialization
constexpr std::uint64_t kShuffleTag = 0x73687566;  // epoch shuffle
constexpr std::uint64_t kFusionTag = 0x66757365;   // per-(epoch,batch,network) fusion

template <class Fn>
void for_each_network(bool parallel, int count, Fn&& fn) {
    if (parallel && count > 1) {
        std::vector<int> ids(static_cast<std::size_t>(count));
        std::iota(ids.begin(), ids.end(), 0);
        std::for_each(std::execution::par, ids.begin(), ids.end(), fn);
    } else {
        for (int k = 0; k < count; ++k) fn(k);
    }
}

inline int argmax_row(std::span<const double> row) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
        if (row[c] > row[best]) best = c;
    }
    return static_cast<int>(best);
}

inline double detail_l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

class TrainingSession {
public:
    TrainingSession(const TrainerConfig& cfg, const Dataset& train, const Dataset& test,
                    TrainTrace* trace)
        : cfg_(cfg), train_(train), test_(test), trace_(trace) {
        cfg_.validate();
        if (train_.size() == 0) throw std::invalid_argument("train: empty training set");
        if (test_.size() == 0) throw std::invalid_argument("train: empty test set");
        std::vector<int> dims;
        dims.push_back(train_.dim());
        dims.insert(dims.end(), cfg_.hidden.begin(), cfg_.hidden.end());
        dims.push_back(train_.num_classes);
        nets_.reserve(static_cast<std::size_t>(cfg_.networks));
        opts_.reserve(static_cast<std::size_t>(cfg_.networks));
        for (int k = 0; k < cfg_.networks; ++k) {
            const std::uint64_t init_k = cfg_.tie_network_inits ? 0u : static_cast<std::uint64_t>(k);
            nets_.push_back(init_network(dims, derive_seed(cfg_.master_seed, kInitTag, init_k)));
            opts_.push_back(init_optimizer(nets_.back(), cfg_.optimizer));
        }
        if (cfg_.method == Method::self_ensemble) {
            ema_ = Matrix(train_.size(), static_cast<std::size_t>(train_.num_classes));
        }
        metrics_.networks = cfg_.networks;
        metrics_.train_noise_rate = train_.has_oracle ? train_.realized_noise_rate() : kAbsent;
    }

    RunMetrics run() {
        for (int epoch = 1; epoch <= cfg_.schedule.t_max; ++epoch) {
            run_epoch(epoch);
            if (cfg_.method == Method::rcl_revise_restart && epoch == cfg_.t_revise) {
                revise(epoch);
            }
        }
        finalize();
        return std::move(metrics_);
    }

private:
    int schedule_epoch(int epoch) const {
        return (revised_at_ > 0 && epoch > revised_at_) ? epoch - revised_at_ : epoch;
    }

    bool uses_loss_selection() const {
        switch (cfg_.method) {
            case Method::spl:
            case Method::coteaching:
            case Method::lnec:
            case Method::rcl:
            case Method::rcl_revise_restart:
                return true;
            default:
                return false;
        }
    }

    void run_epoch(int epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const int sched_t = schedule_epoch(epoch);
        const double remember = remember_rate(sched_t, cfg_.schedule);
        const double fusion = fusion_rate(sched_t, cfg_.schedule);
        const auto n = train_.size();
        const auto k_count = static_cast<std::size_t>(cfg_.networks);

        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        {
            Rng shuffle_rng(derive_seed(cfg_.master_seed, kShuffleTag,
                                        static_cast<std::uint64_t>(epoch)));
            shuffle_rng.shuffle(perm);
        }

        const auto batch_size = static_cast<std::size_t>(cfg_.batch_size);
        const std::size_t n_batches = (n + batch_size - 1) / batch_size;

        std::vector<long long> clean_hits(k_count, 0), used(k_count, 0);
        std::vector<double> epoch_noisy_vec(last_layer_param_count(nets_[0]), 0.0);
        double epoch_gn_split = 0.0;
        const bool track_union = cfg_.method == Method::rcl_revise_restart && epoch == cfg_.t_revise;
        if (track_union) selected_union_.assign(n, 0);

        for (std::size_t b = 0; b < n_batches; ++b) {
            const std::size_t lo = b * batch_size;
            const std::size_t hi = std::min(n, lo + batch_size);
            const std::size_t bn = hi - lo;

            Matrix features(bn, train_.features.cols);
            std::vector<int> labels(bn);
            std::vector<std::uint8_t> clean(bn);
            std::vector<int> ds_ids(bn);
            for (std::size_t j = 0; j < bn; ++j) {
                const auto g = static_cast<std::size_t>(perm[lo + j]);
                ds_ids[j] = perm[lo + j];
                for (std::size_t c = 0; c < train_.features.cols; ++c) {
                    features(j, c) = train_.features(g, c);
                }
                labels[j] = train_.observed_labels[g];
                clean[j] = train_.clean_mask[g];
            }

            // phase 1: per-network forward, losses, own selection
            std::vector<ForwardCache> caches(k_count);
            std::vector<LossVector> losses(k_count);
            std::vector<SelectionSet> selections(k_count);
            const bool select = uses_loss_selection();
            for_each_network(cfg_.parallel_networks, cfg_.networks, [&](int k) {
                const auto ku = static_cast<std::size_t>(k);
                caches[ku] = forward(nets_[ku], features);
                losses[ku] = per_sample_loss(caches[ku].logits(), labels);
                for (std::size_t j = 0; j < bn; ++j) {
                    if (!std::isfinite(losses[ku][j])) {
                        throw std::runtime_error(
                            "train: non-finite loss (epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(b) + ", network " + std::to_string(k) + ", sample " +
                            std::to_string(j) + ", loss " + std::to_string(losses[ku][j]) + ")");
                    }
                }
                if (select) {
                    selections[ku] = select_small_loss(losses[ku], remember,
                                                       epoch, static_cast<int>(b));
                }
            });

            // phase 2: combine selections into per-network update sets
            std::vector<SelectionSet> update_sets =
                combine(selections, caches, labels, ds_ids, fusion, epoch, b, bn);

            // phase 3: one optimizer step per network on its update set
            for_each_network(cfg_.parallel_networks, cfg_.networks, [&](int k) {
                const auto ku = static_cast<std::size_t>(k);
                if (update_sets[ku].empty()) return;  // zero-sample gradient is undefined
                std::vector<double> weights(bn, 0.0);
                for (int j : update_sets[ku].indices) weights[static_cast<std::size_t>(j)] = 1.0;
                Gradients grads =
                    backward(nets_[ku], caches[ku], labels, weights, cfg_.grad_norm_by_batch);
                adam_step(nets_[ku], opts_[ku], grads);
            });

            // bookkeeping (serial, deterministic order); pure ratio counts the
            // samples the algorithm picked as clean: the network's own
            // small-loss selection when the method has one, otherwise the set
            // it actually trained on
            for (std::size_t k = 0; k < k_count; ++k) {
                const SelectionSet& picked = select ? selections[k] : update_sets[k];
                if (train_.has_oracle) {
                    for (int j : picked.indices) {
                        clean_hits[k] += clean[static_cast<std::size_t>(j)] ? 1 : 0;
                        ++used[k];
                    }
                } else {
                    used[k] += static_cast<long long>(picked.size());
                }
            }
            if (track_union) {
                for (std::size_t k = 0; k < k_count; ++k) {
                    for (int j : selections[k].indices) {
                        selected_union_[static_cast<std::size_t>(ds_ids[static_cast<std::size_t>(j)])] = 1;
                    }
                }
            }
            if (cfg_.instrument_gradients && train_.has_oracle) {
                const auto [sel_a, sel_b] = decomposition_pair(selections, update_sets, bn);
                const Matrix rows = last_layer_per_sample_grads(nets_[0], caches[0], labels);
                const GradientDecomposition d = decompose(clean, sel_a, sel_b, rows);
                for (std::size_t i = 0; i < epoch_noisy_vec.size(); ++i) {
                    epoch_noisy_vec[i] += d.agreed_noisy[i] + d.disagreed_noisy[i];
                }
                epoch_gn_split += noisy_grad_norm_split(d);
            }
            if (trace_ != nullptr) {
                for (std::size_t k = 0; k < k_count; ++k) {
                    BatchTrace entry;
                    entry.epoch = epoch;
                    entry.batch = static_cast<int>(b);
                    entry.network = static_cast<int>(k);
                    entry.selection = to_dataset_ids(selections[k], ds_ids);
                    entry.update_set = to_dataset_ids(update_sets[k], ds_ids);
                    trace_->entries.push_back(std::move(entry));
                }
            }
        }

        EpochLog log;
        log.epoch = epoch;
        log.schedule_epoch = sched_t;
        log.remember = remember;
        log.fusion = fusion;
        log.test_accuracy.resize(k_count);
        for_each_network(cfg_.parallel_networks, cfg_.networks, [&](int k) {
            const auto ku = static_cast<std::size_t>(k);
            log.test_accuracy[ku] = accuracy(predict(nets_[ku], test_.features), test_.observed_labels);
        });
        log.pure_ratio.resize(k_count, kAbsent);
        log.trained_count.resize(k_count);
        for (std::size_t k = 0; k < k_count; ++k) {
            log.trained_count[k] = used[k];
            if (train_.has_oracle && used[k] > 0) {
                log.pure_ratio[k] = static_cast<double>(clean_hits[k]) / static_cast<double>(used[k]);
            }
        }
        if (cfg_.instrument_gradients && train_.has_oracle) {
            const double epoch_gn = detail_l2(epoch_noisy_vec);
            accum_gn_ += epoch_gn;
            log.noisy_gn = epoch_gn;
            log.noisy_gn_split = epoch_gn_split;
            log.accum_noisy_gn = accum_gn_;
        }
        log.noisy_train_accuracy = noisy_train_accuracy();
        log.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                          .count();
        metrics_.epochs.push_back(std::move(log));
    }

    // Phase 2 policies. Selections and returned sets are batch-local.
    std::vector<SelectionSet> combine(const std::vector<SelectionSet>& selections,
                                      const std::vector<ForwardCache>& caches,
                                      const std::vector<int>& labels,
                                      const std::vector<int>& ds_ids, double fusion, int epoch,
                                      std::size_t batch, std::size_t bn) {
        const auto k_count = static_cast<std::size_t>(cfg_.networks);
        std::vector<SelectionSet> update_sets(k_count);
        switch (cfg_.method) {
            case Method::standard: {
                update_sets[0].indices.resize(bn);
                std::iota(update_sets[0].indices.begin(), update_sets[0].indices.end(), 0);
                break;
            }
            case Method::spl: {
                update_sets[0] = selections[0];
                break;
            }
            case Method::self_ensemble: {
                update_sets[0] = self_filter(caches[0], labels, ds_ids, epoch);
                break;
            }
            case Method::decoupling: {
                // update only where the two argmax predictions disagree
                const Matrix& la = caches[0].logits();
                const Matrix& lb = caches[1].logits();
                SelectionSet disagreement;
                for (std::size_t j = 0; j < bn; ++j) {
                    if (argmax_row(la.row(j)) != argmax_row(lb.row(j))) {
                        disagreement.indices.push_back(static_cast<int>(j));
                    }
                }
                update_sets[0] = disagreement;
                update_sets[1] = std::move(disagreement);
                break;
            }
            case Method::coteaching: {
                update_sets[0] = selections[1];
                update_sets[1] = selections[0];
                break;
            }
            case Method::lnec: {
                // shared consensus: intersection of all K selections
                SelectionSet consensus = selections[0];
                for (std::size_t k = 1; k < k_count; ++k) {
                    consensus.indices =
                        fusion_detail_intersection(consensus.indices, selections[k].indices);
                }
                for (std::size_t k = 0; k < k_count; ++k) update_sets[k] = consensus;
                break;
            }
            case Method::rcl:
            case Method::rcl_revise_restart: {
                std::vector<std::uint64_t> seeds(k_count);
                for (std::size_t k = 0; k < k_count; ++k) {
                    seeds[k] = derive_seed(cfg_.master_seed, kFusionTag,
                                           static_cast<std::uint64_t>(epoch),
                                           static_cast<std::uint64_t>(batch), k);
                }
                update_sets = fuse_all(selections, fusion, seeds, bn);
                break;
            }
        }
        for (auto& s : update_sets) {
            s.source_epoch = epoch;
            s.source_batch = static_cast<int>(batch);
        }
        return update_sets;
    }

    static std::vector<int> fusion_detail_intersection(const std::vector<int>& a,
                                                       const std::vector<int>& b) {
        std::vector<int> out;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return out;
    }

    // Temporal-ensemble filter: keep samples whose EMA-argmax matches the
    // observed label once the warmup ends; train on everything before that.
    SelectionSet self_filter(const ForwardCache& cache, const std::vector<int>& labels,
                             const std::vector<int>& ds_ids, int epoch) {
        const Matrix probs = softmax_probs(cache.logits());
        const auto bn = probs.rows;
        const double d = cfg_.self_ema_decay;
        SelectionSet keep;
        for (std::size_t j = 0; j < bn; ++j) {
            const auto g = static_cast<std::size_t>(ds_ids[j]);
            for (std::size_t c = 0; c < probs.cols; ++c) {
                ema_(g, c) = d * ema_(g, c) + (1.0 - d) * probs(j, c);
            }
            if (epoch < cfg_.schedule.t_cut || argmax_row(ema_.row(g)) == labels[j]) {
                keep.indices.push_back(static_cast<int>(j));
            }
        }
        return keep;
    }

    // Selection pair fed to the gradient decomposition: the first two
    // networks' own selections when there are two, otherwise the single
    // effective selection twice (agreement is then total by construction).
    std::pair<SelectionSet, SelectionSet> decomposition_pair(
        const std::vector<SelectionSet>& selections, const std::vector<SelectionSet>& update_sets,
        std::size_t bn) const {
        switch (cfg_.method) {
            case Method::standard: {
                SelectionSet all;
                all.indices.resize(bn);
                std::iota(all.indices.begin(), all.indices.end(), 0);
                return {all, all};
            }
            case Method::spl:
                return {selections[0], selections[0]};
            case Method::self_ensemble:
            case Method::decoupling:
                return {update_sets[0], update_sets[0]};
            default:
                return {selections[0], selections[1]};
        }
    }

    static std::vector<int> to_dataset_ids(const SelectionSet& s, const std::vector<int>& ds_ids) {
        std::vector<int> out;
        out.reserve(s.size());
        for (int j : s.indices) out.push_back(ds_ids[static_cast<std::size_t>(j)]);
        std::sort(out.begin(), out.end());
        return out;
    }

    double noisy_train_accuracy() {
        if (!train_.has_oracle) return kAbsent;
        std::vector<std::size_t> noisy_rows;
        for (std::size_t i = 0; i < train_.size(); ++i) {
            if (!train_.clean_mask[i]) noisy_rows.push_back(i);
        }
        if (noisy_rows.empty()) return kAbsent;
        Matrix rows(noisy_rows.size(), train_.features.cols);
        std::vector<int> observed(noisy_rows.size());
        for (std::size_t i = 0; i < noisy_rows.size(); ++i) {
            for (std::size_t j = 0; j < train_.features.cols; ++j) {
                rows(i, j) = train_.features(noisy_rows[i], j);
            }
            observed[i] = train_.observed_labels[noisy_rows[i]];
        }
        return accuracy(predict(nets_[0], rows), observed);
    }

    void revise(int epoch) {
        std::vector<int> unselected;
        for (std::size_t i = 0; i < train_.size(); ++i) {
            if (!selected_union_[i]) unselected.push_back(static_cast<int>(i));
        }
        RevisionInfo info;
        info.epoch = epoch;
        info.unselected = unselected.size();
        info.noise_rate_before = train_.has_oracle ? train_.realized_noise_rate() : kAbsent;
        Dataset revised = revise_labels(nets_, unselected, train_);
        std::size_t changed = 0;
        std::size_t wrong = 0;
        for (int i : unselected) {
            const auto iu = static_cast<std::size_t>(i);
            if (revised.observed_labels[iu] != train_.observed_labels[iu]) ++changed;
            if (revised.observed_labels[iu] != revised.true_labels[iu]) ++wrong;
        }
        info.changed = changed;
        if (train_.has_oracle && !unselected.empty()) {
            info.revised_noise_rate =
                static_cast<double>(wrong) / static_cast<double>(unselected.size());
        }
        train_ = std::move(revised);
        info.noise_rate_after = train_.has_oracle ? train_.realized_noise_rate() : kAbsent;
        metrics_.revision = info;
        revised_at_ = epoch;
    }

    void finalize() {
        metrics_.final_accuracy = metrics_.epochs.back().test_accuracy[0];
        metrics_.best_accuracy = 0.0;
        metrics_.best_epoch = 1;
        double pure_sum = 0.0;
        int pure_n = 0;
        for (const EpochLog& log : metrics_.epochs) {
            if (log.test_accuracy[0] > metrics_.best_accuracy) {
                metrics_.best_accuracy = log.test_accuracy[0];
                metrics_.best_epoch = log.epoch;
            }
            if (!is_absent(log.pure_ratio[0])) {
                pure_sum += log.pure_ratio[0];
                ++pure_n;
            }
        }
        metrics_.reported_accuracy =
            cfg_.report_best_epoch ? metrics_.best_accuracy : metrics_.final_accuracy;
        if (pure_n > 0) metrics_.mean_pure_ratio = pure_sum / pure_n;
        metrics_.final_pure_ratio = metrics_.epochs.back().pure_ratio[0];
        if (cfg_.save_networks) metrics_.final_networks = nets_;
    }

    TrainerConfig cfg_;
    Dataset train_;
    Dataset test_;
    TrainTrace* trace_;
    std::vector<NetworkParams> nets_;
    std::vector<OptimizerState> opts_;
    Matrix ema_;
    std::vector<std::uint8_t> selected_union_;
    double accum_gn_ = 0.0;
    int revised_at_ = 0;
    RunMetrics metrics_;
};

}  // namespace detail

inline RunMetrics train(const TrainerConfig& cfg, const Dataset& train_set,
                        const Dataset& test_set, TrainTrace* trace = nullptr) {
    detail::TrainingSession session(cfg, train_set, test_set, trace);
    return session.run();
}

namespace detail {

inline RunMetrics train_as(Method m, const TrainerConfig& cfg, const Dataset& train_set,
                           const Dataset& test_set, TrainTrace* trace) {
    if (cfg.method != m) {
        throw std::invalid_argument(std::string("trainer: config method is ") +
                                    method_name(cfg.method) + ", expected " + method_name(m));
    }
    return train(cfg, train_set, test_set, trace);
}

}  // namespace detail

inline RunMetrics train_rcl(const TrainerConfig& c, const Dataset& tr, const Dataset& te,
                            TrainTrace* trace = nullptr) {
    return detail::train_as(Method::rcl, c, tr, te, trace);
}
inline RunMetrics train_standard(const TrainerConfig& c, const Dataset& tr, const Dataset& te,
                                 TrainTrace* trace = nullptr) {
    return detail::train_as(Method::standard, c, tr, te, trace);
}
inline RunMetrics train_spl(const TrainerConfig& c, const Dataset& tr, const Dataset& te,
                            TrainTrace* trace = nullptr) {
    return detail::train_as(Method::spl, c, tr, te, trace);
}
inline RunMetrics train_coteaching(const TrainerConfig& c, const Dataset& tr, const Dataset& te,
                                   TrainTrace* trace = nullptr) {
    return detail::train_as(Method::coteaching, c, tr, te, trace);
}
inline RunMetrics train_decoupling(const TrainerConfig& c, const Dataset& tr, const Dataset& te,
                                   TrainTrace* trace = nullptr) {
    return detail::train_as(Method::decoupling, c, tr, te, trace);
}
inline RunMetrics train_lnec(const TrainerConfig& c, const Dataset& tr, const Dataset& te,
                             TrainTrace* trace = nullptr) {
    return detail::train_as(Method::lnec, c, tr, te, trace);
}
inline RunMetrics train_self(const TrainerConfig& c, const Dataset& tr, const Dataset& te,
                             TrainTrace* trace = nullptr) {
    return detail::train_as(Method::self_ensemble, c, tr, te, trace);
}
inline RunMetrics train_rcl_revise_restart(const TrainerConfig& c, const Dataset& tr,
                                           const Dataset& te, TrainTrace* trace = nullptr) {
    return detail::train_as(Method::rcl_revise_restart, c, tr, te, trace);
}

}  // namespace rcl
