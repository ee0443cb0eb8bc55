#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "oovlex/errors.hpp"

namespace oovlex {

// Sentinel emitted for digits-only tokens. Contains non-alphanumeric
// characters, so raw text can never collide with it.
inline constexpr const char* kNumToken = "<num>";

struct TrainConfig {
    int window = 5;
    int dims = 50;
    int min_count = 5;
    int negatives_per_positive = 5;
    int epochs = 5;
    std::uint64_t seed = 1;
    double subsample_t = 0.0;  // 0 disables frequent-word subsampling
    double lr0 = 0.025;
    int workers = 1;

    void validate() const;
};

// Lowercases and splits on non-alphanumeric runs (ASCII); digits-only
// tokens become kNumToken.
std::vector<std::string> tokenize(std::string_view text);

// Incremental tokenizer over a stream; same rules as tokenize().
class TokenReader {
public:
    explicit TokenReader(std::istream& in) : in_(in) {}
    bool next(std::string& token);

private:
    std::istream& in_;
    std::string pending_;
    bool pending_digits_only_ = true;
    bool flush_pending(std::string& token);
};

struct Vocabulary {
    std::unordered_map<std::string, std::uint32_t> id_of;
    std::vector<std::string> token_of;       // id -> token, dense 0..V-1
    std::vector<std::uint64_t> count;        // id -> occurrences
    std::uint64_t total_tokens = 0;          // corpus length after filtering
    std::vector<double> neg_probs;           // normalized count^0.75

    std::uint32_t size() const { return static_cast<std::uint32_t>(token_of.size()); }
    std::optional<std::uint32_t> lookup(std::string_view token) const;
    double frequency(std::uint32_t id) const;

    // O(1) draw from neg_probs via the alias table built in finalize().
    std::uint32_t sample_negative(std::mt19937_64& rng) const;
    void finalize(double exponent = 0.75);

private:
    std::vector<double> alias_threshold_;
    std::vector<std::uint32_t> alias_;
};

Vocabulary build_vocab(const std::vector<std::string>& tokens, const TrainConfig& cfg);
Vocabulary build_vocab_from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                   int min_count);

// Drop probability for one token under threshold t: max(0, 1 - sqrt(t/f)).
double subsample_drop_prob(const Vocabulary& vocab, std::uint32_t id, double t);

std::vector<std::uint32_t> subsample(const std::vector<std::uint32_t>& ids,
                                     const Vocabulary& vocab, double t, std::mt19937_64& rng);

// Maps tokens through the vocabulary; unknown tokens are skipped.
std::vector<std::uint32_t> map_to_ids(const std::vector<std::string>& tokens,
                                      const Vocabulary& vocab);

// Emits (center, context) skip-gram pairs over a mapped token sequence.
// Dynamic mode draws the effective window per center uniformly in 1..window.
class PairStream {
public:
    PairStream(std::span<const std::uint32_t> ids, int window, bool dynamic, std::uint64_t seed);
    bool next(std::uint32_t& center, std::uint32_t& context);

    // Index of the current center; equals ids.size() when exhausted.
    std::size_t position() const { return pos_; }

private:
    std::span<const std::uint32_t> ids_;
    int window_;
    bool dynamic_;
    std::mt19937_64 rng_;
    std::size_t pos_ = 0;
    std::ptrdiff_t offset_ = 0;
    int effective_window_ = 0;
    void start_center();
};

// Convenience for tests: materialize every pair.
std::vector<std::pair<std::uint32_t, std::uint32_t>> collect_pairs(
    std::span<const std::uint32_t> ids, int window, bool dynamic, std::uint64_t seed);

std::vector<std::uint32_t> negative_sample(const Vocabulary& vocab, std::mt19937_64& rng,
                                           std::size_t n);

struct Corpus {
    Vocabulary vocab;
    std::vector<std::uint32_t> ids;  // vocab-mapped token sequence
};

// Two passes over the files: count then map. Throws IoError/EmptyVocab.
Corpus load_corpus(const std::vector<std::string>& paths, const TrainConfig& cfg);
Corpus make_corpus(const std::vector<std::string>& tokens, const TrainConfig& cfg);

// One `token<TAB>count` line per id, in id order.
void save_vocab(const Vocabulary& vocab, const std::string& path);

}  // namespace oovlex
