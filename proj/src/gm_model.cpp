#include "oovlex/gm_model.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace oovlex {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kAdagradEps = 1e-8;

// log N(0; mu_w - mu_c, var_w + var_c) for one diagonal component pair.
double log_gaussian_at_zero(std::span<const double> mu_w, std::span<const double> lv_w,
                            std::span<const double> mu_c, std::span<const double> lv_c) {
    double acc = 0.0;
    for (std::size_t d = 0; d < mu_w.size(); ++d) {
        double s = std::exp(lv_w[d]) + std::exp(lv_c[d]);
        double diff = mu_w[d] - mu_c[d];
        acc += std::log(s) + diff * diff / s;
    }
    return -0.5 * (static_cast<double>(mu_w.size()) * kLog2Pi + acc);
}

void softmax_inplace(std::vector<double>& v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    double z = 0.0;
    for (double& x : v) {
        x = std::exp(x - mx);
        z += x;
    }
    for (double& x : v) x /= z;
}

// At most three distinct words take gradient in one hinge step.
struct LocalGrads {
    GmWordGrad slots[3];
    int used = 0;

    GmWordGrad& at(std::uint32_t id, int k, int d) {
        for (int i = 0; i < used; ++i)
            if (slots[i].id == id) return slots[i];
        GmWordGrad& g = slots[used++];
        g.id = id;
        g.means.assign(static_cast<std::size_t>(k) * d, 0.0);
        g.log_vars.assign(static_cast<std::size_t>(k) * d, 0.0);
        g.logits.assign(k, 0.0);
        return g;
    }
};

// Adds sign * d(log E(w,c))/d(theta) into the gradient slots of w and c.
void accumulate_log_energy_grad(const GmEmbedding& m, std::uint32_t w, std::uint32_t c,
                                double sign, LocalGrads& grads) {
    const int K = m.components;
    const int D = m.dims;
    const auto pw = m.weights(w);
    const auto pc = m.weights(c);

    std::vector<double> t(static_cast<std::size_t>(K) * K);
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < K; ++q)
            t[p * K + q] = std::log(pw[p]) + std::log(pc[q]) +
                           log_gaussian_at_zero(m.mean(w, p), m.log_var(w, p), m.mean(c, q),
                                                m.log_var(c, q));
    softmax_inplace(t);  // responsibilities r_pq

    GmWordGrad& gw = grads.at(w, K, D);
    GmWordGrad& gc = grads.at(c, K, D);

    for (int p = 0; p < K; ++p) {
        for (int q = 0; q < K; ++q) {
            double r = t[p * K + q];
            if (r == 0.0) continue;
            auto mu_w = m.mean(w, p);
            auto lv_w = m.log_var(w, p);
            auto mu_c = m.mean(c, q);
            auto lv_c = m.log_var(c, q);
            for (int d = 0; d < D; ++d) {
                double var_w = std::exp(lv_w[d]);
                double var_c = std::exp(lv_c[d]);
                double s = var_w + var_c;
                double diff = mu_w[d] - mu_c[d];
                double dmu = -diff / s;                               // d logN / d mu_w
                double ds = 0.5 * (diff * diff / (s * s) - 1.0 / s);  // d logN / d s
                gw.means[p * D + d] += sign * r * dmu;
                gc.means[q * D + d] -= sign * r * dmu;
                gw.log_vars[p * D + d] += sign * r * ds * var_w;
                gc.log_vars[q * D + d] += sign * r * ds * var_c;
            }
        }
    }

    // d logE / d logit_s = (total responsibility of component s) - p_s
    for (int p = 0; p < K; ++p) {
        double row = 0.0, col = 0.0;
        for (int q = 0; q < K; ++q) {
            row += t[p * K + q];
            col += t[q * K + p];
        }
        gw.logits[p] += sign * (row - pw[p]);
        gc.logits[p] += sign * (col - pc[p]);
    }
}

}  // namespace

void GmTrainConfig::validate() const {
    if (margin <= 0) throw ConfigError("margin must be > 0");
    if (components < 1) throw ConfigError("components must be >= 1");
    if (!(0 < var_min && var_min < var_max)) throw ConfigError("require 0 < var_min < var_max");
    if (mu_max <= 0) throw ConfigError("mu_max must be > 0");
    if (var_init < var_min || var_init > var_max)
        throw ConfigError("var_init must lie in [var_min, var_max]");
    if (lr0 <= 0) throw ConfigError("lr0 must be > 0");
    if (negatives_per_positive < 1) throw ConfigError("negatives_per_positive must be >= 1");
}

std::vector<double> GmEmbedding::weights(std::uint32_t w) const {
    std::vector<double> p(weight_logits.begin() + static_cast<std::size_t>(w) * components,
                          weight_logits.begin() + static_cast<std::size_t>(w + 1) * components);
    softmax_inplace(p);
    return p;
}

std::vector<double> GmEmbedding::expected_mean(std::uint32_t w) const {
    const auto p = weights(w);
    std::vector<double> out(dims, 0.0);
    for (int k = 0; k < components; ++k) {
        auto mu = mean(w, k);
        for (int d = 0; d < dims; ++d) out[d] += p[k] * mu[d];
    }
    return out;
}

GmEmbedding init_gm(const Vocabulary& vocab, const TrainConfig& cfg, const GmTrainConfig& gm_cfg,
                    std::uint64_t seed) {
    if (vocab.size() == 0) throw EmptyVocab();
    gm_cfg.validate();
    GmEmbedding model;
    model.vocab_size = vocab.size();
    model.dims = cfg.dims;
    model.components = gm_cfg.components;
    const std::size_t n =
        static_cast<std::size_t>(vocab.size()) * gm_cfg.components * cfg.dims;
    model.means.resize(n);
    model.log_vars.assign(n, std::log(gm_cfg.var_init));
    model.weight_logits.assign(static_cast<std::size_t>(vocab.size()) * gm_cfg.components, 0.0);

    std::mt19937_64 rng(seed);
    const double half = 0.5 / cfg.dims;
    std::uniform_real_distribution<double> uniform(-half, half);
    for (auto& x : model.means) x = uniform(rng);
    return model;
}

double mixture_density(const GmEmbedding& model, std::uint32_t w, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.dims)
        throw DimensionMismatch("point has " + std::to_string(x.size()) + " dims, model has " +
                                std::to_string(model.dims));
    const auto p = model.weights(w);
    double density = 0.0;
    for (int k = 0; k < model.components; ++k) {
        auto mu = model.mean(w, k);
        auto lv = model.log_var(w, k);
        double log_pdf = 0.0;
        for (int d = 0; d < model.dims; ++d) {
            double var = std::exp(lv[d]);
            double diff = x[d] - mu[d];
            log_pdf += -0.5 * (kLog2Pi + lv[d] + diff * diff / var);
        }
        density += p[k] * std::exp(log_pdf);
    }
    return density;
}

double log_energy_el(const GmEmbedding& model, std::uint32_t w, std::uint32_t c) {
    const int K = model.components;
    const auto pw = model.weights(w);
    const auto pc = model.weights(c);
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> t(static_cast<std::size_t>(K) * K);
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < K; ++q) {
            t[p * K + q] = std::log(pw[p]) + std::log(pc[q]) +
                           log_gaussian_at_zero(model.mean(w, p), model.log_var(w, p),
                                                model.mean(c, q), model.log_var(c, q));
            mx = std::max(mx, t[p * K + q]);
        }
    double z = 0.0;
    for (double x : t) z += std::exp(x - mx);
    return mx + std::log(z);
}

double energy_el(const GmEmbedding& model, std::uint32_t w, std::uint32_t c) {
    return std::exp(log_energy_el(model, w, c));
}

double loss_margin(const GmEmbedding& model, std::uint32_t w, std::uint32_t c,
                   std::uint32_t c_neg, double margin) {
    return std::max(0.0, margin - log_energy_el(model, w, c) + log_energy_el(model, w, c_neg));
}

GmAccumulators GmAccumulators::zeros_like(const GmEmbedding& model) {
    GmAccumulators acc;
    acc.means.assign(model.means.size(), 0.0);
    acc.log_vars.assign(model.log_vars.size(), 0.0);
    acc.weight_logits.assign(model.weight_logits.size(), 0.0);
    return acc;
}

void project_word(GmEmbedding& model, std::uint32_t w, const GmTrainConfig& cfg) {
    const double lv_min = std::log(cfg.var_min);
    const double lv_max = std::log(cfg.var_max);
    for (int k = 0; k < model.components; ++k) {
        auto lv = model.log_var(w, k);
        for (auto& x : lv) x = std::clamp(x, lv_min, lv_max);
        auto mu = model.mean(w, k);
        double norm_sq = 0.0;
        for (double x : mu) norm_sq += x * x;
        if (norm_sq > cfg.mu_max * cfg.mu_max) {
            double scale = cfg.mu_max / std::sqrt(norm_sq);
            for (auto& x : mu) x *= scale;
        }
    }
}

void project_all(GmEmbedding& model, const GmTrainConfig& cfg) {
    for (std::uint32_t w = 0; w < model.vocab_size; ++w) project_word(model, w, cfg);
}

std::vector<GmWordGrad> gm_hinge_gradients(const GmEmbedding& model, std::uint32_t w,
                                           std::uint32_t c, std::uint32_t c_neg, double margin) {
    if (loss_margin(model, w, c, c_neg, margin) <= 0.0) return {};
    LocalGrads grads;
    accumulate_log_energy_grad(model, w, c, -1.0, grads);
    accumulate_log_energy_grad(model, w, c_neg, +1.0, grads);
    return {grads.slots, grads.slots + grads.used};
}

double gm_step(GmEmbedding& model, std::uint32_t w, std::uint32_t c, std::uint32_t c_neg,
               const GmTrainConfig& cfg, GmAccumulators& acc) {
    const double loss = loss_margin(model, w, c, c_neg, cfg.margin);
    if (loss <= 0.0) return 0.0;  // inactive hinge, zero subgradient

    const auto grads = gm_hinge_gradients(model, w, c, c_neg, cfg.margin);

    const int K = model.components;
    const int D = model.dims;
    auto adagrad = [&](double* param, double* accum, const double* grad, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            double g = grad[i];
            if (g == 0.0) continue;
            accum[i] += g * g;
            param[i] -= cfg.lr0 * g / (std::sqrt(accum[i]) + kAdagradEps);
        }
    };

    for (const GmWordGrad& g : grads) {
        const std::size_t base = model.comp_offset(g.id, 0);
        adagrad(model.means.data() + base, acc.means.data() + base, g.means.data(),
                static_cast<std::size_t>(K) * D);
        adagrad(model.log_vars.data() + base, acc.log_vars.data() + base, g.log_vars.data(),
                static_cast<std::size_t>(K) * D);
        if (cfg.train_weights) {
            const std::size_t wbase = static_cast<std::size_t>(g.id) * K;
            adagrad(model.weight_logits.data() + wbase, acc.weight_logits.data() + wbase,
                    g.logits.data(), K);
        }
        project_word(model, g.id, cfg);
    }
    return loss;
}

GmEmbedding train_gm(const Corpus& corpus, const TrainConfig& cfg, const GmTrainConfig& gm_cfg,
                     TrainStats* stats, std::ostream* log) {
    cfg.validate();
    gm_cfg.validate();
    GmEmbedding model = init_gm(corpus.vocab, cfg, gm_cfg, cfg.seed);
    if (stats) *stats = TrainStats{};
    if (cfg.epochs == 0 || corpus.ids.empty()) return model;

    GmAccumulators acc = GmAccumulators::zeros_like(model);
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t total_pairs = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::atomic<std::uint64_t> epoch_pairs{0};
        std::vector<double> worker_loss(cfg.workers, 0.0);

        auto run_shard = [&](int worker) {
            const std::size_t n = corpus.ids.size();
            const std::size_t begin = n * worker / cfg.workers;
            const std::size_t end = n * (worker + 1) / cfg.workers;
            if (begin >= end) return;

            std::uint64_t shard_seed =
                cfg.seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(epoch) * cfg.workers +
                                                    worker + 1);
            std::mt19937_64 rng(shard_seed ^ 0xfeedULL);

            std::vector<std::uint32_t> shard(corpus.ids.begin() + begin, corpus.ids.begin() + end);
            if (cfg.subsample_t > 0) shard = subsample(shard, corpus.vocab, cfg.subsample_t, rng);

            PairStream pairs(shard, cfg.window, /*dynamic=*/true, shard_seed ^ 0x5bf0f1ULL);
            std::uint32_t center, context;
            std::uint64_t local_pairs = 0;
            double loss_sum = 0.0;
            while (pairs.next(center, context)) {
                for (int k = 0; k < gm_cfg.negatives_per_positive; ++k) {
                    std::uint32_t neg = corpus.vocab.sample_negative(rng);
                    loss_sum += gm_step(model, center, context, neg, gm_cfg, acc);
                }
                ++local_pairs;
            }
            worker_loss[worker] = loss_sum;
            epoch_pairs.fetch_add(local_pairs, std::memory_order_relaxed);
        };

        if (cfg.workers == 1) {
            run_shard(0);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(cfg.workers);
            for (int w = 0; w < cfg.workers; ++w) threads.emplace_back(run_shard, w);
            for (auto& t : threads) t.join();
        }

        double loss_sum = 0.0;
        for (double l : worker_loss) loss_sum += l;
        std::uint64_t np = epoch_pairs.load();
        total_pairs += np;
        std::uint64_t updates = np * gm_cfg.negatives_per_positive;
        double mean_loss = updates ? loss_sum / static_cast<double>(updates) : 0.0;
        if (stats) stats->epoch_mean_loss.push_back(mean_loss);
        if (log) {
            auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
            *log << "epoch " << (epoch + 1) << "/" << cfg.epochs << "  mean_loss " << mean_loss
                 << "  pairs " << np << "  pairs/sec "
                 << static_cast<std::uint64_t>(total_pairs / std::max(1e-9, elapsed.count()))
                 << '\n';
        }
    }

    if (stats) {
        stats->pairs = total_pairs;
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
        stats->pairs_per_sec = total_pairs / std::max(1e-9, elapsed.count());
    }
    return model;
}

}  // namespace oovlex
