#pragma once

#include <string>

#include "oovlex/any_model.hpp"

namespace oovlex {

// Text vector format: first line `V D`, then one `token v1 ... vD` line per
// id, 6 significant digits. Tokens containing whitespace are rejected.
void export_text(const PointEmbedding& model, const Vocabulary& vocab, const std::string& path);

// Inverse of export_text; context vectors are zeroed (imported models are
// inference-only). Vocabulary ids follow file order, with synthetic
// descending counts standing in for the unknown corpus frequencies.
Model import_text(const std::string& path);

// W2GM binary format: magic `W2GM`, version byte, little-endian u32 V, D, K,
// then weight logits, means, log-variances as little-endian f32 in id-major
// component-minor order, then V length-prefixed UTF-8 tokens.
void save_gm(const GmEmbedding& model, const Vocabulary& vocab, const std::string& path);
Model load_gm(const std::string& path);

// Sniffs the magic bytes and dispatches to load_gm or import_text.
Model load_model(const std::string& path);

}  // namespace oovlex
