#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "oovlex/corpus.hpp"
#include "oovlex/point_model.hpp"  // TrainStats

namespace oovlex {

struct GmTrainConfig {
    int components = 2;  // K
    double margin = 1.0;
    double lr0 = 0.05;
    double var_min = 1e-4;
    double var_max = 10.0;
    double mu_max = 10.0;
    double var_init = 0.05;
    int negatives_per_positive = 1;
    bool train_weights = true;  // false freezes uniform mixture weights

    void validate() const;
};

// Gaussian-mixture embedding: per word K weighted diagonal Gaussians.
struct GmEmbedding {
    std::uint32_t vocab_size = 0;
    int dims = 0;
    int components = 0;
    std::vector<double> means;          // V x K x D
    std::vector<double> log_vars;       // V x K x D
    std::vector<double> weight_logits;  // V x K

    std::size_t comp_offset(std::uint32_t w, int k) const {
        return (static_cast<std::size_t>(w) * components + k) * dims;
    }
    std::span<const double> mean(std::uint32_t w, int k) const {
        return {means.data() + comp_offset(w, k), static_cast<std::size_t>(dims)};
    }
    std::span<double> mean(std::uint32_t w, int k) {
        return {means.data() + comp_offset(w, k), static_cast<std::size_t>(dims)};
    }
    std::span<const double> log_var(std::uint32_t w, int k) const {
        return {log_vars.data() + comp_offset(w, k), static_cast<std::size_t>(dims)};
    }
    std::span<double> log_var(std::uint32_t w, int k) {
        return {log_vars.data() + comp_offset(w, k), static_cast<std::size_t>(dims)};
    }

    // softmax of the word's weight logits
    std::vector<double> weights(std::uint32_t w) const;
    // sum_k p_{w,k} mu_{w,k}
    std::vector<double> expected_mean(std::uint32_t w) const;
};

GmEmbedding init_gm(const Vocabulary& vocab, const TrainConfig& cfg, const GmTrainConfig& gm_cfg,
                    std::uint64_t seed);

// Mixture density sum_k p_k N(x; mu_k, Sigma_k) with diagonal covariance.
double mixture_density(const GmEmbedding& model, std::uint32_t w, std::span<const double> x);

// Expected-likelihood energy: sum_{p,q} p_{w,p} p_{c,q} N(0; mu_{w,p}-mu_{c,q},
// Sigma_{w,p}+Sigma_{c,q}).
double energy_el(const GmEmbedding& model, std::uint32_t w, std::uint32_t c);

// log of energy_el, computed as log-sum-exp over component pairs.
double log_energy_el(const GmEmbedding& model, std::uint32_t w, std::uint32_t c);

// Hinge loss max(0, m - log E(w,c) + log E(w,c_neg)).
double loss_margin(const GmEmbedding& model, std::uint32_t w, std::uint32_t c,
                   std::uint32_t c_neg, double margin);

// Hinge-loss subgradients for one word's parameters.
struct GmWordGrad {
    std::uint32_t id = 0;
    std::vector<double> means;     // K x D
    std::vector<double> log_vars;  // K x D
    std::vector<double> logits;    // K
};

// Subgradients of loss_margin for each distinct word among {w, c, c_neg};
// empty when the hinge is inactive.
std::vector<GmWordGrad> gm_hinge_gradients(const GmEmbedding& model, std::uint32_t w,
                                           std::uint32_t c, std::uint32_t c_neg, double margin);

// Per-parameter accumulated squared gradients for the adaptive updates.
struct GmAccumulators {
    std::vector<double> means;
    std::vector<double> log_vars;
    std::vector<double> weight_logits;

    static GmAccumulators zeros_like(const GmEmbedding& model);
};

// One adaptive-gradient step on the hinge loss for (w, c, c_neg), followed
// by projection of the touched words. Zero subgradient when the hinge is
// inactive. Returns the pre-update loss.
double gm_step(GmEmbedding& model, std::uint32_t w, std::uint32_t c, std::uint32_t c_neg,
               const GmTrainConfig& cfg, GmAccumulators& acc);

// Clamp variances to [var_min, var_max] and rescale means onto the
// mu_max ball. Idempotent.
void project_word(GmEmbedding& model, std::uint32_t w, const GmTrainConfig& cfg);
void project_all(GmEmbedding& model, const GmTrainConfig& cfg);

GmEmbedding train_gm(const Corpus& corpus, const TrainConfig& cfg, const GmTrainConfig& gm_cfg,
                     TrainStats* stats = nullptr, std::ostream* log = nullptr);

}  // namespace oovlex
