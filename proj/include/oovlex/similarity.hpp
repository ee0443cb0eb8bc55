#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "oovlex/any_model.hpp"

namespace oovlex {

enum class Metric { Cosine, MaxCosine, ExpectedLikelihood, Kl };

// Kl is asymmetric; this selects which side of the divergence the query
// sits on when ranking neighbors.
enum class KlDirection { QueryFromCandidate, CandidateFromQuery };

Metric metric_from_name(const std::string& name);
const char* metric_name(Metric m);

// Default task metric per model kind: cosine for point models,
// max cosine for Gaussian mixtures.
Metric default_metric(ModelKind kind);

double cosine(std::span<const double> u, std::span<const double> v);

// Max over component pairs of the cosine of the means; mixture weights
// are ignored.
double max_cosine(const GmEmbedding& model, std::uint32_t wi, std::uint32_t wj);
// Raw-vector variant: max over components of the candidate word.
double max_cosine(const GmEmbedding& model, std::span<const double> v, std::uint32_t wj);

// KL(N_{i,p} || N_{j,q}) for diagonal Gaussians, closed form.
double kl_component(const GmEmbedding& model, std::uint32_t i, int p, std::uint32_t j, int q);

// Word-level divergence used for ranking: min over component pairs of
// KL(N_{i,p} || N_{j,q}), mirroring the max-over-pairs of max_cosine.
double kl_min_pairs(const GmEmbedding& model, std::uint32_t wi, std::uint32_t wj);

struct Neighbor {
    std::string token;
    std::uint32_t id;
    double score;
};

using Query = std::variant<std::uint32_t, std::vector<double>>;

// Top-k vocabulary tokens by metric, descending; ties broken by ascending
// id; excluded tokens never returned. Raw-vector queries support Cosine
// (point models) and MaxCosine (mixture models) only.
std::vector<Neighbor> nearest_neighbors(const Model& model, const Query& query, std::size_t k,
                                        Metric metric,
                                        const std::unordered_set<std::string>& exclude = {},
                                        KlDirection direction = KlDirection::CandidateFromQuery);

}  // namespace oovlex
