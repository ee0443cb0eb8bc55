#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "oovlex/any_model.hpp"
#include "oovlex/similarity.hpp"
#include "oovlex/stopwords.hpp"

#include "json.hpp"

namespace oovlex {

struct OovSample {
    std::string word;
    std::string context;
    std::string category;
    std::vector<std::string> attributes;  // 1..5 annotated tokens
    std::size_t line = 0;                 // source line, for diagnostics
};

struct CategorySet {
    std::vector<std::string> labels;
    std::vector<std::vector<std::string>> label_tokens;

    static CategorySet defaults();
    static CategorySet from_labels(std::vector<std::string> labels);
    std::size_t size() const { return labels.size(); }
    int index_of(const std::string& label) const;  // -1 when absent
};

// JSON Lines, one object per line with exactly the keys
// word/context/category/attributes. Duplicate words are rejected.
std::vector<OovSample> load_dataset(const std::string& path);

// Centroid of in-vocabulary, non-stopword context tokens; point models use
// word vectors, mixture models the expected mean of each token. Throws
// NoContextSignal when nothing qualifies.
std::vector<double> context_vector(const Model& model, const std::vector<std::string>& tokens,
                                   const StopwordSet& stopwords);

// How mixture models score context-to-label similarity.
enum class GmCategoryMode {
    Centroid,   // cosine of expected-mean centroids (default)
    MaxCosine,  // max over label-token components
};

// Labels ranked by similarity to the context, descending; ties keep the
// CategorySet order.
std::vector<std::string> predict_category(const Model& model, const OovSample& sample,
                                          const CategorySet& categories,
                                          const StopwordSet& stopwords,
                                          GmCategoryMode mode = GmCategoryMode::Centroid);

// Stable descending argsort; the single ranking rule both tasks share.
std::vector<std::size_t> rank_descending(const std::vector<double>& scores);

struct Task1Scores {
    double s1 = 0.0;
    double accuracy = 0.0;
};

// ranks are 1-based gold positions, each in [1, n_labels].
Task1Scores score_task1(const std::vector<int>& ranks, std::size_t n_labels);

// Top-k tokens nearest the context vector; stopwords and the OOV word are
// excluded, context words are not.
std::vector<std::string> predict_attributes(const Model& model, const OovSample& sample,
                                            std::size_t k, const StopwordSet& stopwords);

// Fraction of samples whose predictions intersect the gold attributes,
// scaled by 1/k; matching is on lowercased tokens.
double score_task2(const std::vector<std::vector<std::string>>& predictions,
                   const std::vector<std::vector<std::string>>& golds, std::size_t k);

struct EvalRow {
    std::string word;
    std::string gold_category;
    std::vector<std::string> ranking;
    int rank = 0;
    std::vector<std::string> gold_attributes;
    std::vector<std::string> predictions;
    bool hit = false;
    bool no_signal = false;
    bool word_in_vocab = false;
};

struct EvalReport {
    int task = 0;
    std::size_t n = 0;
    std::size_t k = 0;  // prediction budget, task 2
    double s1 = 0.0;
    double accuracy = 0.0;
    double s2 = 0.0;
    std::size_t no_signal_count = 0;
    std::size_t in_vocab_count = 0;
    std::vector<EvalRow> rows;
};

// Samples failing NoContextSignal score as worst rank (task 1) or miss
// (task 2) and are counted in no_signal_count.
EvalReport run_task1(const Model& model, const std::vector<OovSample>& samples,
                     const CategorySet& categories, const StopwordSet& stopwords,
                     GmCategoryMode mode = GmCategoryMode::Centroid);
EvalReport run_task2(const Model& model, const std::vector<OovSample>& samples, std::size_t k,
                     const StopwordSet& stopwords);

nlohmann::json report_to_json(const EvalReport& report);

}  // namespace oovlex
