#include "oovlex/oov_tasks.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace oovlex {

namespace {

std::string lowercased(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

std::vector<double> token_repr(const Model& model, std::uint32_t id) {
    if (model.kind() == ModelKind::Point) {
        auto v = model.point().word(id);
        return {v.begin(), v.end()};
    }
    return model.gm().expected_mean(id);
}

}  // namespace

CategorySet CategorySet::defaults() {
    return from_labels({"greek_mythology", "locations", "animals", "plants", "technology"});
}

CategorySet CategorySet::from_labels(std::vector<std::string> labels) {
    if (labels.empty()) throw ConfigError("category set must be non-empty");
    std::unordered_set<std::string> seen;
    CategorySet set;
    for (auto& label : labels) {
        if (!seen.insert(label).second) throw ConfigError("duplicate category label: " + label);
        set.label_tokens.push_back(tokenize(label));
        set.labels.push_back(std::move(label));
    }
    return set;
}

int CategorySet::index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

std::vector<OovSample> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);

    std::vector<OovSample> samples;
    std::unordered_set<std::string> seen_words;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(lineno, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ValidationError(lineno, "not a JSON object");

        static const std::vector<std::string> required = {"word", "context", "category",
                                                          "attributes"};
        for (const auto& key : required)
            if (!obj.contains(key)) throw ValidationError(lineno, "missing key: " + key);
        for (const auto& [key, _] : obj.items())
            if (std::find(required.begin(), required.end(), key) == required.end())
                throw ValidationError(lineno, "unexpected key: " + key);

        OovSample sample;
        sample.line = lineno;
        for (const auto& key : {"word", "context", "category"})
            if (!obj[key].is_string() || obj[key].get<std::string>().empty())
                throw ValidationError(lineno, std::string(key) + " must be a non-empty string");
        sample.word = obj["word"].get<std::string>();
        sample.context = obj["context"].get<std::string>();
        sample.category = obj["category"].get<std::string>();

        const auto& attrs = obj["attributes"];
        if (!attrs.is_array() || attrs.empty() || attrs.size() > 5)
            throw ValidationError(lineno, "attributes must be an array of 1 to 5 strings");
        for (const auto& a : attrs) {
            if (!a.is_string() || a.get<std::string>().empty())
                throw ValidationError(lineno, "attributes must be non-empty strings");
            sample.attributes.push_back(a.get<std::string>());
        }

        if (!seen_words.insert(lowercased(sample.word)).second)
            throw ValidationError(lineno, "duplicate OOV word: " + sample.word);
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::vector<double> context_vector(const Model& model, const std::vector<std::string>& tokens,
                                   const StopwordSet& stopwords) {
    std::vector<double> centroid(model.dims(), 0.0);
    std::size_t used = 0;
    for (const auto& token : tokens) {
        if (stopwords.count(token)) continue;
        auto id = model.vocab.lookup(token);
        if (!id) continue;
        auto repr = token_repr(model, *id);
        for (int d = 0; d < model.dims(); ++d) centroid[d] += repr[d];
        ++used;
    }
    if (used == 0) throw NoContextSignal();
    for (auto& x : centroid) x /= static_cast<double>(used);
    return centroid;
}

std::vector<std::size_t> rank_descending(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

std::vector<std::string> predict_category(const Model& model, const OovSample& sample,
                                          const CategorySet& categories,
                                          const StopwordSet& stopwords, GmCategoryMode mode) {
    const auto ctx = context_vector(model, tokenize(sample.context), stopwords);

    std::vector<double> scores;
    scores.reserve(categories.size());
    const StopwordSet no_stopwords;  // label tokens are kept verbatim
    for (std::size_t i = 0; i < categories.size(); ++i) {
        const auto& tokens = categories.label_tokens[i];
        if (mode == GmCategoryMode::MaxCosine && model.kind() == ModelKind::GaussianMixture) {
            double best = -1.0;
            bool any = false;
            for (const auto& token : tokens) {
                if (auto id = model.vocab.lookup(token)) {
                    best = std::max(best, max_cosine(model.gm(), ctx, *id));
                    any = true;
                }
            }
            if (!any) throw LabelNotEmbeddable(categories.labels[i]);
            scores.push_back(best);
        } else {
            std::vector<double> label_centroid;
            try {
                label_centroid = context_vector(model, tokens, no_stopwords);
            } catch (const NoContextSignal&) {
                throw LabelNotEmbeddable(categories.labels[i]);
            }
            scores.push_back(cosine(ctx, label_centroid));
        }
    }

    std::vector<std::string> ranked;
    ranked.reserve(categories.size());
    for (std::size_t idx : rank_descending(scores)) ranked.push_back(categories.labels[idx]);
    return ranked;
}

Task1Scores score_task1(const std::vector<int>& ranks, std::size_t n_labels) {
    if (ranks.empty()) throw EmptyDataset();
    std::uint64_t rank_sum = 0;
    std::uint64_t best = 0;
    for (int r : ranks) {
        if (r < 1 || static_cast<std::size_t>(r) > n_labels)
            throw Error("rank " + std::to_string(r) + " outside [1, " +
                        std::to_string(n_labels) + "]");
        rank_sum += static_cast<std::uint64_t>(r);
        if (r == 1) ++best;
    }
    Task1Scores scores;
    scores.s1 = static_cast<double>(rank_sum) / static_cast<double>(ranks.size());
    scores.accuracy = static_cast<double>(best) / static_cast<double>(ranks.size());
    return scores;
}

std::vector<std::string> predict_attributes(const Model& model, const OovSample& sample,
                                            std::size_t k, const StopwordSet& stopwords) {
    if (k < 1) throw ConfigError("k must be >= 1");
    const auto ctx = context_vector(model, tokenize(sample.context), stopwords);

    StopwordSet exclude = stopwords;
    exclude.insert(lowercased(sample.word));
    auto neighbors =
        nearest_neighbors(model, ctx, k, default_metric(model.kind()), exclude);

    std::vector<std::string> out;
    out.reserve(neighbors.size());
    for (auto& n : neighbors) out.push_back(std::move(n.token));
    return out;
}

double score_task2(const std::vector<std::vector<std::string>>& predictions,
                   const std::vector<std::vector<std::string>>& golds, std::size_t k) {
    if (predictions.size() != golds.size())
        throw LengthMismatch("got " + std::to_string(predictions.size()) + " predictions for " +
                             std::to_string(golds.size()) + " gold sets");
    if (predictions.empty()) throw EmptyDataset();
    if (k < 1) throw ConfigError("k must be >= 1");

    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i].size() > k)
            throw LengthMismatch("sample " + std::to_string(i) + " has more than k predictions");
        std::unordered_set<std::string> gold;
        for (const auto& g : golds[i]) gold.insert(lowercased(g));
        for (const auto& p : predictions[i]) {
            if (gold.count(lowercased(p))) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) /
           (static_cast<double>(k) * static_cast<double>(predictions.size()));
}

EvalReport run_task1(const Model& model, const std::vector<OovSample>& samples,
                     const CategorySet& categories, const StopwordSet& stopwords,
                     GmCategoryMode mode) {
    if (samples.empty()) throw EmptyDataset();
    EvalReport report;
    report.task = 1;
    report.n = samples.size();

    std::vector<int> ranks;
    ranks.reserve(samples.size());
    for (const auto& sample : samples) {
        if (categories.index_of(sample.category) < 0)
            throw ValidationError(sample.line, "category not in the configured label set: " +
                                                   sample.category);
        EvalRow row;
        row.word = sample.word;
        row.gold_category = sample.category;
        row.word_in_vocab = model.vocab.lookup(lowercased(sample.word)).has_value();
        if (row.word_in_vocab) ++report.in_vocab_count;

        try {
            row.ranking = predict_category(model, sample, categories, stopwords, mode);
            auto it = std::find(row.ranking.begin(), row.ranking.end(), sample.category);
            row.rank = static_cast<int>(it - row.ranking.begin()) + 1;
        } catch (const NoContextSignal&) {
            row.no_signal = true;
            row.rank = static_cast<int>(categories.size());  // worst-case penalty
            ++report.no_signal_count;
        }
        row.hit = row.rank == 1;
        ranks.push_back(row.rank);
        report.rows.push_back(std::move(row));
    }

    auto scores = score_task1(ranks, categories.size());
    report.s1 = scores.s1;
    report.accuracy = scores.accuracy;
    return report;
}

EvalReport run_task2(const Model& model, const std::vector<OovSample>& samples, std::size_t k,
                     const StopwordSet& stopwords) {
    if (samples.empty()) throw EmptyDataset();
    EvalReport report;
    report.task = 2;
    report.n = samples.size();
    report.k = k;

    std::vector<std::vector<std::string>> predictions, golds;
    predictions.reserve(samples.size());
    golds.reserve(samples.size());
    for (const auto& sample : samples) {
        EvalRow row;
        row.word = sample.word;
        row.gold_attributes = sample.attributes;
        row.word_in_vocab = model.vocab.lookup(lowercased(sample.word)).has_value();
        if (row.word_in_vocab) ++report.in_vocab_count;

        try {
            row.predictions = predict_attributes(model, sample, k, stopwords);
        } catch (const NoContextSignal&) {
            row.no_signal = true;  // scored as a miss
            ++report.no_signal_count;
        }

        std::unordered_set<std::string> gold;
        for (const auto& g : sample.attributes) gold.insert(lowercased(g));
        for (const auto& p : row.predictions)
            if (gold.count(lowercased(p))) {
                row.hit = true;
                break;
            }

        predictions.push_back(row.predictions);
        golds.push_back(sample.attributes);
        report.rows.push_back(std::move(row));
    }

    report.s2 = score_task2(predictions, golds, k);
    return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json j{{"word", row.word},
                         {"hit", row.hit},
                         {"no_signal", row.no_signal},
                         {"word_in_vocab", row.word_in_vocab}};
        if (report.task == 1) {
            j["gold"] = row.gold_category;
            j["ranking"] = row.ranking;
            j["rank"] = row.rank;
        } else {
            j["gold_attributes"] = row.gold_attributes;
            j["predictions"] = row.predictions;
        }
        rows.push_back(std::move(j));
    }

    nlohmann::json out{{"task", report.task},
                       {"n", report.n},
                       {"no_signal_count", report.no_signal_count},
                       {"in_vocab_count", report.in_vocab_count},
                       {"rows", std::move(rows)}};
    if (report.task == 1) {
        out["s1"] = report.s1;
        out["accuracy"] = report.accuracy;
    } else {
        out["k"] = report.k;
        out["s2"] = report.s2;
    }
    return out;
}

}  // namespace oovlex
