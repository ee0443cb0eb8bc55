#include "oovlex/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oovlex {

Metric metric_from_name(const std::string& name) {
    if (name == "cosine") return Metric::Cosine;
    if (name == "maxcos" || name == "max_cosine") return Metric::MaxCosine;
    if (name == "el" || name == "expected_likelihood") return Metric::ExpectedLikelihood;
    if (name == "kl") return Metric::Kl;
    throw ConfigError("unknown metric: " + name);
}

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::Cosine: return "cosine";
        case Metric::MaxCosine: return "maxcos";
        case Metric::ExpectedLikelihood: return "el";
        case Metric::Kl: return "kl";
    }
    return "?";
}

Metric default_metric(ModelKind kind) {
    return kind == ModelKind::Point ? Metric::Cosine : Metric::MaxCosine;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw DimensionMismatch("cosine of vectors with dims " + std::to_string(u.size()) +
                                " and " + std::to_string(v.size()));
    double uv = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uv += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) throw ZeroVector();
    return uv / (std::sqrt(uu) * std::sqrt(vv));
}

double max_cosine(const GmEmbedding& model, std::uint32_t wi, std::uint32_t wj) {
    double best = -1.0;
    for (int p = 0; p < model.components; ++p)
        for (int q = 0; q < model.components; ++q)
            best = std::max(best, cosine(model.mean(wi, p), model.mean(wj, q)));
    return best;
}

double max_cosine(const GmEmbedding& model, std::span<const double> v, std::uint32_t wj) {
    double best = -1.0;
    for (int q = 0; q < model.components; ++q)
        best = std::max(best, cosine(v, model.mean(wj, q)));
    return best;
}

double kl_component(const GmEmbedding& model, std::uint32_t i, int p, std::uint32_t j, int q) {
    auto mu_p = model.mean(i, p);
    auto lv_p = model.log_var(i, p);
    auto mu_q = model.mean(j, q);
    auto lv_q = model.log_var(j, q);
    double acc = 0.0;
    for (int d = 0; d < model.dims; ++d) {
        double var_p = std::exp(lv_p[d]);
        double var_q = std::exp(lv_q[d]);
        double diff = mu_q[d] - mu_p[d];
        acc += var_p / var_q + diff * diff / var_q - 1.0 + (lv_q[d] - lv_p[d]);
    }
    return 0.5 * acc;
}

double kl_min_pairs(const GmEmbedding& model, std::uint32_t wi, std::uint32_t wj) {
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p < model.components; ++p)
        for (int q = 0; q < model.components; ++q)
            best = std::min(best, kl_component(model, wi, p, wj, q));
    return best;
}

namespace {

struct Scored {
    double score;
    std::uint32_t id;
};

}  // namespace

std::vector<Neighbor> nearest_neighbors(const Model& model, const Query& query, std::size_t k,
                                        Metric metric,
                                        const std::unordered_set<std::string>& exclude,
                                        KlDirection direction) {
    if (k < 1) throw ConfigError("k must be >= 1");
    const bool is_point = model.kind() == ModelKind::Point;
    const bool raw_query = std::holds_alternative<std::vector<double>>(query);

    switch (metric) {
        case Metric::Cosine:
            if (!is_point)
                throw UnknownMetricForModel("cosine applies to point models only");
            break;
        case Metric::MaxCosine:
            if (is_point)
                throw UnknownMetricForModel("max cosine applies to mixture models only");
            break;
        case Metric::ExpectedLikelihood:
        case Metric::Kl:
            if (is_point)
                throw UnknownMetricForModel(std::string(metric_name(metric)) +
                                            " applies to mixture models only");
            if (raw_query)
                throw UnknownMetricForModel(std::string(metric_name(metric)) +
                                            " requires a vocabulary word query");
            break;
    }

    auto score_of = [&](std::uint32_t cand) -> double {
        if (raw_query) {
            const auto& v = std::get<std::vector<double>>(query);
            return is_point ? cosine(v, model.point().word(cand))
                            : max_cosine(model.gm(), v, cand);
        }
        std::uint32_t q = std::get<std::uint32_t>(query);
        switch (metric) {
            case Metric::Cosine: return cosine(model.point().word(q), model.point().word(cand));
            case Metric::MaxCosine: return max_cosine(model.gm(), q, cand);
            case Metric::ExpectedLikelihood: return log_energy_el(model.gm(), q, cand);
            case Metric::Kl:
                return direction == KlDirection::CandidateFromQuery
                           ? -kl_min_pairs(model.gm(), cand, q)
                           : -kl_min_pairs(model.gm(), q, cand);
        }
        return 0.0;
    };

    std::vector<Scored> scored;
    scored.reserve(model.vocab.size());
    for (std::uint32_t id = 0; id < model.vocab.size(); ++id) {
        if (!exclude.empty() && exclude.count(model.vocab.token_of[id])) continue;
        scored.push_back({score_of(id), id});
    }

    const std::size_t top = std::min(k, scored.size());
    auto better = [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    };
    std::partial_sort(scored.begin(), scored.begin() + top, scored.end(), better);

    std::vector<Neighbor> out;
    out.reserve(top);
    for (std::size_t i = 0; i < top; ++i)
        out.push_back({model.vocab.token_of[scored[i].id], scored[i].id, scored[i].score});
    return out;
}

}  // namespace oovlex
