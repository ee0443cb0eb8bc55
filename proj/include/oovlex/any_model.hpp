#pragma once

#include <variant>

#include "oovlex/corpus.hpp"
#include "oovlex/gm_model.hpp"
#include "oovlex/point_model.hpp"

namespace oovlex {

enum class ModelKind { Point, GaussianMixture };

// A trained embedding together with the vocabulary it indexes into;
// the unit the evaluation tasks and model files operate on.
struct Model {
    Vocabulary vocab;
    std::variant<PointEmbedding, GmEmbedding> emb;

    ModelKind kind() const {
        return std::holds_alternative<PointEmbedding>(emb) ? ModelKind::Point
                                                           : ModelKind::GaussianMixture;
    }
    const PointEmbedding& point() const { return std::get<PointEmbedding>(emb); }
    const GmEmbedding& gm() const { return std::get<GmEmbedding>(emb); }
    int dims() const {
        return kind() == ModelKind::Point ? point().dims : gm().dims;
    }
};

}  // namespace oovlex
