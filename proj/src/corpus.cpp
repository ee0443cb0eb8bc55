#include "oovlex/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace oovlex {

void TrainConfig::validate() const {
    if (window < 1) throw ConfigError("window must be >= 1");
    if (dims < 1) throw ConfigError("dims must be >= 1");
    if (min_count < 1) throw ConfigError("min_count must be >= 1");
    if (negatives_per_positive < 1) throw ConfigError("negatives_per_positive must be >= 1");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (subsample_t < 0) throw ConfigError("subsample_t must be >= 0");
    if (lr0 <= 0) throw ConfigError("lr0 must be > 0");
    if (workers < 1) throw ConfigError("workers must be >= 1");
}

namespace {

inline bool is_token_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline char lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

inline bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    bool digits_only = true;
    auto flush = [&] {
        if (cur.empty()) return;
        if (digits_only)
            out.emplace_back(kNumToken);
        else
            out.push_back(cur);
        cur.clear();
        digits_only = true;
    };
    for (unsigned char c : text) {
        if (is_token_char(c)) {
            cur.push_back(lower(c));
            digits_only = digits_only && is_digit(c);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

bool TokenReader::flush_pending(std::string& token) {
    if (pending_.empty()) return false;
    token = pending_digits_only_ ? kNumToken : pending_;
    pending_.clear();
    pending_digits_only_ = true;
    return true;
}

bool TokenReader::next(std::string& token) {
    int ch;
    while ((ch = in_.get()) != std::istream::traits_type::eof()) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (is_token_char(c)) {
            pending_.push_back(lower(c));
            pending_digits_only_ = pending_digits_only_ && is_digit(c);
        } else if (flush_pending(token)) {
            return true;
        }
    }
    return flush_pending(token);
}

std::optional<std::uint32_t> Vocabulary::lookup(std::string_view token) const {
    auto it = id_of.find(std::string(token));
    if (it == id_of.end()) return std::nullopt;
    return it->second;
}

double Vocabulary::frequency(std::uint32_t id) const {
    return total_tokens == 0 ? 0.0
                             : static_cast<double>(count[id]) / static_cast<double>(total_tokens);
}

void Vocabulary::finalize(double exponent) {
    const std::size_t v = token_of.size();
    neg_probs.assign(v, 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < v; ++i) {
        neg_probs[i] = std::pow(static_cast<double>(count[i]), exponent);
        z += neg_probs[i];
    }
    for (auto& p : neg_probs) p /= z;

    // Walker alias table.
    alias_threshold_.assign(v, 1.0);
    alias_.assign(v, 0);
    std::vector<double> scaled(v);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < v; ++i) {
        scaled[i] = neg_probs[i] * static_cast<double>(v);
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        std::uint32_t s = small.back();
        small.pop_back();
        std::uint32_t l = large.back();
        alias_threshold_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::uint32_t s : small) alias_threshold_[s] = 1.0;
    for (std::uint32_t l : large) alias_threshold_[l] = 1.0;
}

std::uint32_t Vocabulary::sample_negative(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::uint32_t> slot(0, size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uint32_t i = slot(rng);
    return unit(rng) < alias_threshold_[i] ? i : alias_[i];
}

Vocabulary build_vocab_from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                   int min_count) {
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    kept.reserve(counts.size());
    for (const auto& [token, n] : counts)
        if (n >= static_cast<std::uint64_t>(min_count)) kept.emplace_back(token, n);
    if (kept.empty()) throw EmptyVocab();

    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    vocab.token_of.reserve(kept.size());
    vocab.count.reserve(kept.size());
    for (std::uint32_t id = 0; id < kept.size(); ++id) {
        vocab.id_of.emplace(kept[id].first, id);
        vocab.token_of.push_back(std::move(kept[id].first));
        vocab.count.push_back(kept[id].second);
        vocab.total_tokens += kept[id].second;
    }
    vocab.finalize();
    return vocab;
}

Vocabulary build_vocab(const std::vector<std::string>& tokens, const TrainConfig& cfg) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& t : tokens) ++counts[t];
    return build_vocab_from_counts(counts, cfg.min_count);
}

double subsample_drop_prob(const Vocabulary& vocab, std::uint32_t id, double t) {
    if (t <= 0) return 0.0;
    double f = vocab.frequency(id);
    if (f <= 0) return 0.0;
    return std::max(0.0, 1.0 - std::sqrt(t / f));
}

std::vector<std::uint32_t> subsample(const std::vector<std::uint32_t>& ids,
                                     const Vocabulary& vocab, double t, std::mt19937_64& rng) {
    if (t <= 0) return ids;
    std::vector<std::uint32_t> out;
    out.reserve(ids.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::uint32_t id : ids)
        if (unit(rng) >= subsample_drop_prob(vocab, id, t)) out.push_back(id);
    return out;
}

std::vector<std::uint32_t> map_to_ids(const std::vector<std::string>& tokens,
                                      const Vocabulary& vocab) {
    std::vector<std::uint32_t> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens)
        if (auto id = vocab.lookup(t)) ids.push_back(*id);
    return ids;
}

PairStream::PairStream(std::span<const std::uint32_t> ids, int window, bool dynamic,
                       std::uint64_t seed)
    : ids_(ids), window_(window), dynamic_(dynamic), rng_(seed) {
    start_center();
}

void PairStream::start_center() {
    if (pos_ >= ids_.size()) return;
    if (dynamic_) {
        std::uniform_int_distribution<int> win(1, window_);
        effective_window_ = win(rng_);
    } else {
        effective_window_ = window_;
    }
    offset_ = -effective_window_;
}

bool PairStream::next(std::uint32_t& center, std::uint32_t& context) {
    while (pos_ < ids_.size()) {
        while (offset_ <= effective_window_) {
            std::ptrdiff_t j = static_cast<std::ptrdiff_t>(pos_) + offset_;
            std::ptrdiff_t cur = offset_++;
            if (cur == 0 || j < 0 || j >= static_cast<std::ptrdiff_t>(ids_.size())) continue;
            center = ids_[pos_];
            context = ids_[static_cast<std::size_t>(j)];
            return true;
        }
        ++pos_;
        start_center();
    }
    return false;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> collect_pairs(
    std::span<const std::uint32_t> ids, int window, bool dynamic, std::uint64_t seed) {
    PairStream stream(ids, window, dynamic, seed);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::uint32_t w, c;
    while (stream.next(w, c)) pairs.emplace_back(w, c);
    return pairs;
}

std::vector<std::uint32_t> negative_sample(const Vocabulary& vocab, std::mt19937_64& rng,
                                           std::size_t n) {
    if (vocab.size() == 0) throw EmptyVocab();
    std::vector<std::uint32_t> out(n);
    for (auto& id : out) id = vocab.sample_negative(rng);
    return out;
}

Corpus load_corpus(const std::vector<std::string>& paths, const TrainConfig& cfg) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open corpus file: " + path);
        TokenReader reader(in);
        std::string token;
        while (reader.next(token)) ++counts[token];
    }

    Corpus corpus;
    corpus.vocab = build_vocab_from_counts(counts, cfg.min_count);

    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open corpus file: " + path);
        TokenReader reader(in);
        std::string token;
        while (reader.next(token))
            if (auto id = corpus.vocab.lookup(token)) corpus.ids.push_back(*id);
    }
    return corpus;
}

Corpus make_corpus(const std::vector<std::string>& tokens, const TrainConfig& cfg) {
    Corpus corpus;
    corpus.vocab = build_vocab(tokens, cfg);
    corpus.ids = map_to_ids(tokens, corpus.vocab);
    return corpus;
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    for (std::uint32_t id = 0; id < vocab.size(); ++id)
        out << vocab.token_of[id] << '\t' << vocab.count[id] << '\n';
    if (!out) throw IoError("failed writing vocabulary dump: " + path);
}

}  // namespace oovlex
