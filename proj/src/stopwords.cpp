#include "oovlex/stopwords.hpp"

#include <fstream>

#include "oovlex/corpus.hpp"
#include "oovlex/errors.hpp"

namespace oovlex {

const StopwordSet& builtin_stopwords() {
    static const StopwordSet words = {
        "a",      "about",  "above",   "after",  "again",  "against", "all",    "am",
        "an",     "and",    "any",     "are",    "as",     "at",      "be",     "because",
        "been",   "before", "being",   "below",  "between", "both",   "but",    "by",
        "can",    "cannot", "could",   "did",    "do",     "does",    "doing",  "down",
        "during", "each",   "few",     "for",    "from",   "further", "had",    "has",
        "have",   "having", "he",      "her",    "here",   "hers",    "him",    "his",
        "how",    "i",      "if",      "in",     "into",   "is",      "it",     "its",
        "itself", "just",   "me",      "more",   "most",   "my",      "no",     "nor",
        "not",    "now",    "of",      "off",    "on",     "once",    "only",   "or",
        "other",  "our",    "ours",    "out",    "over",   "own",     "same",   "she",
        "should", "so",     "some",    "such",   "than",   "that",    "the",    "their",
        "theirs", "them",   "then",    "there",  "these",  "they",    "this",   "those",
        "through", "to",    "too",     "under",  "until",  "up",      "upon",   "very",
        "was",    "we",     "were",    "what",   "when",   "where",   "which",  "while",
        "who",    "whom",   "why",     "will",   "with",   "would",   "you",    "your",
        "yours",  "<num>",
    };
    return words;
}

StopwordSet load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stopword file: " + path);
    StopwordSet out;
    std::string line;
    while (std::getline(in, line))
        for (auto& token : tokenize(line)) out.insert(std::move(token));
    return out;
}

}  // namespace oovlex
