#pragma once

#include <string>
#include <unordered_set>

namespace oovlex {

using StopwordSet = std::unordered_set<std::string>;

// Fixed built-in set of English function words (~120 entries).
const StopwordSet& builtin_stopwords();

// One token per line; lines are run through the corpus tokenizer.
StopwordSet load_stopwords(const std::string& path);

}  // namespace oovlex
