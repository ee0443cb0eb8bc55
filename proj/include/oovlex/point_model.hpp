#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "oovlex/corpus.hpp"

namespace oovlex {

// Skip-gram point embedding: one word vector and one context vector per id.
struct PointEmbedding {
    std::uint32_t vocab_size = 0;
    int dims = 0;
    std::vector<double> word_vecs;  // V x D, row-major
    std::vector<double> ctx_vecs;   // V x D, row-major

    std::span<const double> word(std::uint32_t id) const {
        return {word_vecs.data() + static_cast<std::size_t>(id) * dims,
                static_cast<std::size_t>(dims)};
    }
    std::span<double> word(std::uint32_t id) {
        return {word_vecs.data() + static_cast<std::size_t>(id) * dims,
                static_cast<std::size_t>(dims)};
    }
    std::span<const double> ctx(std::uint32_t id) const {
        return {ctx_vecs.data() + static_cast<std::size_t>(id) * dims,
                static_cast<std::size_t>(dims)};
    }
    std::span<double> ctx(std::uint32_t id) {
        return {ctx_vecs.data() + static_cast<std::size_t>(id) * dims,
                static_cast<std::size_t>(dims)};
    }
};

// Word vectors uniform in [-0.5/D, 0.5/D], context vectors zero.
PointEmbedding init_point(const Vocabulary& vocab, const TrainConfig& cfg, std::uint64_t seed);

// Exact softmax P(c|w) over the full vocabulary of context vectors,
// computed with max-shifted exponentials.
double softmax_prob(const PointEmbedding& model, std::uint32_t w, std::uint32_t c);

// Negative-sampling loss -log s(v_c.v_w) - sum_neg log s(-v_neg.v_w)
// at the current parameters; no update.
double sgns_loss(const PointEmbedding& model, std::uint32_t center, std::uint32_t context,
                 std::span<const std::uint32_t> negatives);

// One SGD step on the negative-sampling loss; returns the pre-update loss.
// Gradients are accumulated first and applied simultaneously, so repeated
// ids among negatives/context are handled exactly.
double sgns_step(PointEmbedding& model, std::uint32_t center, std::uint32_t context,
                 std::span<const std::uint32_t> negatives, double lr);

struct TrainStats {
    std::vector<double> epoch_mean_loss;
    std::uint64_t pairs = 0;
    double pairs_per_sec = 0.0;
};

// Epoch loop over PairStream with linear lr decay lr0 -> lr0/100.
// workers == 1 is deterministic; workers > 1 applies unsynchronized
// updates to shared parameters (non-deterministic by contract).
PointEmbedding train_point(const Corpus& corpus, const TrainConfig& cfg,
                           TrainStats* stats = nullptr, std::ostream* log = nullptr);

}  // namespace oovlex
