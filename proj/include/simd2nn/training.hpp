// SPDX-License-Identifier: Apache-2.0
//
// simd2nn - stacked intelligent metasurface diffractive network simulator
// Copyright (C) 2026 The simd2nn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "simd2nn/channel.hpp"
#include "simd2nn/errors.hpp"
#include "simd2nn/metrics.hpp"
#include "simd2nn/network.hpp"
#include "simd2nn/parallel.hpp"
#include "simd2nn/random.hpp"

namespace simd2nn {

/// Learning-rate schedule across all optimizer steps of a run.
enum class LrSchedule { constant, cosine };

struct TrainConfig {
    int epochs = 60;
    int batch_size = 64;
    double learning_rate = 0.01;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double sample_rate = 0.10;
    std::uint64_t master_seed = 1;
    bool train_noise = true;
    double softmax_epsilon = 1e-12;
    LrSchedule lr_schedule = LrSchedule::constant;
    /// 0 selects worker_count().
    unsigned threads = 0;

    unsigned workers() const { return threads == 0 ? worker_count() : threads; }
};

inline void validate(const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("batch must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("lr must be positive");
    if (!(cfg.sample_rate > 0.0 && cfg.sample_rate <= 1.0)) throw ConfigError("sample_rate must be in (0, 1]");
    if (!(cfg.weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
        throw ConfigError("beta1 and beta2 must be in [0, 1)");
    }
    if (!(cfg.adam_eps > 0.0) || !(cfg.softmax_epsilon >= 0.0)) throw ConfigError("epsilons must be positive");
}

/// Rate for optimizer step `step` (0-based) of `total`. Cosine decays to 0.
inline double scheduled_lr(const TrainConfig& cfg, std::uint64_t step, std::uint64_t total) {
    if (cfg.lr_schedule == LrSchedule::constant || total == 0) return cfg.learning_rate;
    const double t = static_cast<double>(step) / static_cast<double>(total);
    return cfg.learning_rate * 0.5 * (1.0 + std::cos(pi * t));
}

// ---------------------------------------------------------------------------
// Loss
//
// Normalized-power cross-entropy. With P_k = |y_k|^2, T = sum P_k and
// q_k = P_k / T, the class probability is p_k = (q_k + eps) / (1 + K eps) and
// loss = -ln p_label. Normalizing by T before adding eps keeps the loss exactly
// invariant to uniform power scaling regardless of the absolute signal level.

inline double loss(const CVector& y, std::size_t label, double eps) {
    if (label >= static_cast<std::size_t>(y.size())) throw ShapeError("label outside the antenna range");
    const double k = static_cast<double>(y.size());
    const double total = y.squaredNorm();
    const double q = total > 0.0 ? std::norm(y(static_cast<Eigen::Index>(label))) / total : 1.0 / k;
    return -std::log((q + eps) / (1.0 + k * eps));
}

/// dloss/d conj(y). Uses dloss/dP_k = -(delta_{k,label} - q_label) / (T (q_label + eps))
/// and dP_k/d conj(y_k) = y_k.
inline CVector loss_output_adjoint(const CVector& y, std::size_t label, double eps) {
    if (label >= static_cast<std::size_t>(y.size())) throw ShapeError("label outside the antenna range");
    const double total = y.squaredNorm();
    CVector g = CVector::Zero(y.size());
    if (!(total > 0.0)) return g;
    const auto l = static_cast<Eigen::Index>(label);
    const double q = std::norm(y(l)) / total;
    const double scale = 1.0 / (total * (q + eps));
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        const double dp = -((k == l ? 1.0 : 0.0) - q) * scale;
        g(k) = dp * y(k);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Reverse-mode gradient
//
// Adjoints are conjugate cogradients g = dloss/d conj(x). Through z = H u the
// adjoint is H^H g; through u = r * a (element-wise) it is conj(r) * g; through
// a = W u it is W^H g. For u_m = exp(j theta_m) a_m the real gradient is
// dloss/dtheta_m = 2 Re(j u_m conj(g_m)) = -2 Im(u_m conj(g_m)). For a free
// complex weight the (d/dRe, d/dIm) pair equals 2 * g_m * conj(a_m).

namespace detail {

inline void check_cache(const ForwardCache& cache, int layers, Eigen::Index atoms, Eigen::Index antennas) {
    const bool ok = cache.fields.size() == static_cast<std::size_t>(layers) + 1 &&
                    cache.incident.size() == static_cast<std::size_t>(layers) && cache.y.size() == antennas &&
                    std::all_of(cache.fields.begin(), cache.fields.end(), [&](const CVector& u) { return u.size() == atoms; });
    if (!ok) throw ShapeError("forward cache does not match the parameters (stale cache)");
}

}  // namespace detail

template <class Params>
typename Params::Gradient backward(const ForwardCache& cache, const Params& params, const Propagation& optics,
                                   const ChannelRealization& channel, std::size_t label, double eps) {
    const int layers = params.layers();
    const Eigen::Index m = params.atoms();
    detail::check_cache(cache, layers, m, channel.h_matrix.rows());
    if (optics.num_layers() != layers || optics.atoms() != m) throw ShapeError("optics do not match the parameters");

    typename Params::Gradient grad(layers, m);
    CVector g = channel.h_matrix.adjoint() * loss_output_adjoint(cache.y, label, eps);
    for (int l = layers - 1; l >= 0; --l) {
        const CVector& u = cache.fields[l + 1];
        const CVector& a = cache.incident[l];
        if constexpr (Params::kind == ModelKind::sim) {
            for (Eigen::Index i = 0; i < m; ++i) grad(l, i) = -2.0 * std::imag(u(i) * std::conj(g(i)));
        } else {
            for (Eigen::Index i = 0; i < m; ++i) grad(l, i) = 2.0 * g(i) * std::conj(a(i));
        }
        if (l > 0) {
            const CVector ga = (params.response(l).array().conjugate() * g.array()).matrix();
            g = optics.layers[l].matrix().adjoint() * ga;
        }
    }
    return grad;
}

// ---------------------------------------------------------------------------
// AdamW

struct OptimizerState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step = 0;
};

/// One decoupled-weight-decay Adam update over flat real parameters (complex
/// weights are passed as interleaved re/im pairs).
inline void adamw_step(std::span<double> params, std::span<const double> grads, OptimizerState& state,
                       const TrainConfig& cfg) {
    if (params.size() != grads.size()) throw ShapeError("gradient size does not match parameters");
    if (state.first_moment.empty()) {
        state.first_moment.assign(params.size(), 0.0);
        state.second_moment.assign(params.size(), 0.0);
    }
    if (state.first_moment.size() != params.size()) throw ShapeError("optimizer state does not match parameters");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        double& mo = state.first_moment[i];
        double& vo = state.second_moment[i];
        mo = cfg.beta1 * mo + (1.0 - cfg.beta1) * grads[i];
        vo = cfg.beta2 * vo + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double m_hat = mo / c1;
        const double v_hat = vo / c2;
        params[i] -= cfg.learning_rate * (m_hat / (std::sqrt(v_hat) + cfg.adam_eps) +
                                          cfg.weight_decay * params[i]);
    }
}

template <class Grad>
std::span<const double> flat_values(const Grad& g) {
    using Scalar = typename Grad::Scalar;
    return {reinterpret_cast<const double*>(g.data()),
            static_cast<std::size_t>(g.size()) * (sizeof(Scalar) / sizeof(double))};
}

// ---------------------------------------------------------------------------
// Training and evaluation loops

/// One patch ready for the network. `index` is the patch's position in the
/// full dataset and keys its noise streams.
struct EncodedSample {
    EncodedInput input;
    std::size_t label = 0;
    std::uint64_t index = 0;
};

struct EpochRecord {
    int epoch = 0;
    double loss = 0.0;
    double accuracy = 0.0;
};

template <class Params>
struct TrainResult {
    Params params;
    std::vector<EpochRecord> history;
    std::vector<std::size_t> training_indices;  // positions in the sample list
};

/// Picks ceil(S * J) positions without replacement, returned in ascending order.
inline std::vector<std::size_t> sample_training_subset(std::size_t count, double sample_rate, std::uint64_t master_seed) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(derive_seed(master_seed, Purpose::train_subset));
    for (std::size_t i = count; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
        std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
    const auto keep = static_cast<std::size_t>(std::ceil(sample_rate * static_cast<double>(count) - 1e-9));
    order.resize(std::min(count, std::max<std::size_t>(keep, 1)));
    std::sort(order.begin(), order.end());
    return order;
}

template <class Params>
TrainResult<Params> train(const std::vector<EncodedSample>& samples, const Propagation& optics,
                          const ChannelRealization& channel, double tx_amplitude, const TrainConfig& cfg,
                          Params initial) {
    validate(cfg);
    if (samples.empty()) throw ConfigError("training split is empty");
    const auto classes = static_cast<std::size_t>(channel.h_matrix.rows());

    TrainResult<Params> result{std::move(initial), {}, sample_training_subset(samples.size(), cfg.sample_rate, cfg.master_seed)};
    std::vector<std::size_t> per_class(classes, 0);
    for (std::size_t i : result.training_indices) {
        if (samples[i].label >= classes) throw ConfigError("label exceeds the number of receive antennas");
        ++per_class[samples[i].label];
    }
    if (std::any_of(per_class.begin(), per_class.end(), [](std::size_t c) { return c == 0; })) {
        throw ConfigError("training split must contain every class");
    }

    Params& params = result.params;
    OptimizerState state;
    const unsigned workers = cfg.workers();
    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    const std::uint64_t steps_per_epoch = (result.training_indices.size() + batch - 1) / batch;
    const std::uint64_t total_steps = steps_per_epoch * static_cast<std::uint64_t>(cfg.epochs);
    TrainConfig step_cfg = cfg;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<std::size_t> order = result.training_indices;
        CounterRng shuffle(derive_seed(cfg.master_seed, Purpose::epoch_shuffle, static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = std::min(i - 1, static_cast<std::size_t>(shuffle.uniform() * static_cast<double>(i)));
            std::swap(order[i - 1], order[j]);
        }

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t n = std::min(batch, order.size() - start);
            std::vector<typename Params::Gradient> grads(n);
            std::vector<double> losses(n);
            std::vector<char> hits(n);
            parallel_for(n, workers, [&](std::size_t b) {
                const EncodedSample& s = samples[order[start + b]];
                CounterRng noise(derive_seed(cfg.master_seed, Purpose::train_noise, static_cast<std::uint64_t>(epoch), s.index));
                const ForwardCache cache =
                    forward(params, s.input, optics, channel, tx_amplitude, cfg.train_noise ? &noise : nullptr);
                losses[b] = loss(cache.y, s.label, cfg.softmax_epsilon);
                hits[b] = classify(cache.y) == s.label;
                grads[b] = backward(cache, params, optics, channel, s.label, cfg.softmax_epsilon);
            });
            typename Params::Gradient mean = grads[0];
            for (std::size_t b = 1; b < n; ++b) mean += grads[b];
            mean /= static_cast<double>(n);
            for (std::size_t b = 0; b < n; ++b) {
                loss_sum += losses[b];
                correct += static_cast<std::size_t>(hits[b]);
            }
            step_cfg.learning_rate = scheduled_lr(cfg, state.step, total_steps);
            adamw_step(params.values(), flat_values(mean), state, step_cfg);
        }
        const double count = static_cast<double>(order.size());
        result.history.push_back({epoch, loss_sum / count, static_cast<double>(correct) / count});
    }
    return result;
}

struct EvalResult {
    std::vector<std::size_t> predictions;
    std::vector<std::size_t> labels;
    MetricsBundle metrics;
};

/// Deployment: forward with fresh evaluation noise per patch, then classify.
template <class Params>
EvalResult evaluate(const Params& params, const std::vector<EncodedSample>& samples, const Propagation& optics,
                    const ChannelRealization& channel, double tx_amplitude, const TrainConfig& cfg,
                    bool noise = true) {
    if (samples.empty()) throw ConfigError("evaluation set is empty");
    EvalResult out;
    out.predictions.resize(samples.size());
    out.labels.resize(samples.size());
    parallel_for(samples.size(), cfg.workers(), [&](std::size_t i) {
        const EncodedSample& s = samples[i];
        CounterRng rng(derive_seed(cfg.master_seed, Purpose::eval_noise, 0, s.index));
        const ForwardCache cache = forward(params, s.input, optics, channel, tx_amplitude, noise ? &rng : nullptr);
        out.predictions[i] = classify(cache.y);
        out.labels[i] = s.label;
    });
    out.metrics = compute_metrics(out.predictions, out.labels, 1, static_cast<std::size_t>(channel.h_matrix.rows()));
    return out;
}

inline EvalResult evaluate(const AnyParams& params, const std::vector<EncodedSample>& samples, const Propagation& optics,
                           const ChannelRealization& channel, double tx_amplitude, const TrainConfig& cfg,
                           bool noise = true) {
    return std::visit([&](const auto& p) { return evaluate(p, samples, optics, channel, tx_amplitude, cfg, noise); },
                      params);
}

}  // namespace simd2nn
