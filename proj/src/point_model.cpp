#include "oovlex/point_model.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace oovlex {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow; -log s(x) = softplus(-x).
double softplus(double x) {
    if (x > 0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

}  // namespace

PointEmbedding init_point(const Vocabulary& vocab, const TrainConfig& cfg, std::uint64_t seed) {
    if (vocab.size() == 0) throw EmptyVocab();
    PointEmbedding model;
    model.vocab_size = vocab.size();
    model.dims = cfg.dims;
    const std::size_t n = static_cast<std::size_t>(model.vocab_size) * cfg.dims;
    model.word_vecs.resize(n);
    model.ctx_vecs.assign(n, 0.0);

    std::mt19937_64 rng(seed);
    const double half = 0.5 / cfg.dims;
    std::uniform_real_distribution<double> uniform(-half, half);
    for (auto& x : model.word_vecs) x = uniform(rng);
    return model;
}

double softmax_prob(const PointEmbedding& model, std::uint32_t w, std::uint32_t c) {
    auto vw = model.word(w);
    double max_dot = -std::numeric_limits<double>::infinity();
    std::vector<double> dots(model.vocab_size);
    for (std::uint32_t i = 0; i < model.vocab_size; ++i) {
        dots[i] = dot(model.ctx(i), vw);
        max_dot = std::max(max_dot, dots[i]);
    }
    double z = 0.0;
    for (double d : dots) z += std::exp(d - max_dot);
    return std::exp(dots[c] - max_dot) / z;
}

double sgns_loss(const PointEmbedding& model, std::uint32_t center, std::uint32_t context,
                 std::span<const std::uint32_t> negatives) {
    auto vw = model.word(center);
    double loss = softplus(-dot(model.ctx(context), vw));
    for (std::uint32_t neg : negatives) loss += softplus(dot(model.ctx(neg), vw));
    return loss;
}

double sgns_step(PointEmbedding& model, std::uint32_t center, std::uint32_t context,
                 std::span<const std::uint32_t> negatives, double lr) {
    const int d = model.dims;
    auto vw = model.word(center);

    double loss = 0.0;
    std::vector<double> grad_w(d, 0.0);

    // (target id, dL/d(dot)) per term; ctx-row gradients applied after
    // the word gradient is fully accumulated from the current parameters.
    std::vector<std::pair<std::uint32_t, double>> ctx_grads;
    ctx_grads.reserve(negatives.size() + 1);

    double s_pos = sigmoid(dot(model.ctx(context), vw));
    loss += softplus(-dot(model.ctx(context), vw));
    ctx_grads.emplace_back(context, s_pos - 1.0);

    for (std::uint32_t neg : negatives) {
        double x = dot(model.ctx(neg), vw);
        loss += softplus(x);
        ctx_grads.emplace_back(neg, sigmoid(x));
    }

    for (auto [id, g] : ctx_grads) {
        auto vc = model.ctx(id);
        for (int k = 0; k < d; ++k) grad_w[k] += g * vc[k];
    }
    for (auto [id, g] : ctx_grads) {
        auto vc = model.ctx(id);
        for (int k = 0; k < d; ++k) vc[k] -= lr * g * vw[k];
    }
    for (int k = 0; k < d; ++k) vw[k] -= lr * grad_w[k];
    return loss;
}

PointEmbedding train_point(const Corpus& corpus, const TrainConfig& cfg, TrainStats* stats,
                           std::ostream* log) {
    cfg.validate();
    PointEmbedding model = init_point(corpus.vocab, cfg, cfg.seed);
    if (cfg.epochs == 0 || corpus.ids.empty()) {
        if (stats) *stats = TrainStats{};
        return model;
    }

    const double lr_min_frac = 0.01;  // decay floor lr0/100
    const std::uint64_t total_centers =
        static_cast<std::uint64_t>(cfg.epochs) * corpus.ids.size();
    std::atomic<std::uint64_t> centers_done{0};

    if (stats) *stats = TrainStats{};
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
            std::mt19937_64 rng(shard_seed);

            std::vector<std::uint32_t> shard(corpus.ids.begin() + begin, corpus.ids.begin() + end);
            if (cfg.subsample_t > 0) shard = subsample(shard, corpus.vocab, cfg.subsample_t, rng);

            PairStream pairs(shard, cfg.window, /*dynamic=*/true, shard_seed ^ 0x5bf0f1ULL);
            std::vector<std::uint32_t> negatives(cfg.negatives_per_positive);

            std::uint32_t center, context;
            std::uint64_t local_pairs = 0;
            std::size_t reported_pos = 0;
            double loss_sum = 0.0;
            double lr = cfg.lr0;

            while (pairs.next(center, context)) {
                if ((local_pairs & 0xfff) == 0) {
                    std::size_t pos = pairs.position();
                    std::uint64_t done =
                        centers_done.fetch_add(pos - reported_pos, std::memory_order_relaxed) +
                        (pos - reported_pos);
                    reported_pos = pos;
                    double frac = std::min(1.0, static_cast<double>(done) / total_centers);
                    lr = cfg.lr0 * ((1.0 - frac) + lr_min_frac * frac);
                }
                for (auto& n_id : negatives) n_id = corpus.vocab.sample_negative(rng);
                loss_sum += sgns_step(model, center, context, negatives, lr);
                ++local_pairs;
            }
            centers_done.fetch_add(pairs.position() - reported_pos, std::memory_order_relaxed);
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
        double mean_loss = np ? loss_sum / static_cast<double>(np) : 0.0;
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
