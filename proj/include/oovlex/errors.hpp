#pragma once

#include <stdexcept>
#include <string>

namespace oovlex {

// Base class for all toolkit errors. The CLI maps IoError to exit code 1
// and every other Error to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct EmptyVocab : Error {
    EmptyVocab() : Error("no token survives the min-count filter") {}
};

struct EmptyDataset : Error {
    EmptyDataset() : Error("dataset contains no samples") {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct ZeroVector : Error {
    ZeroVector() : Error("cosine is undefined for a zero vector") {}
};

struct UnknownMetricForModel : Error {
    using Error::Error;
};

struct NoContextSignal : Error {
    NoContextSignal() : Error("no in-vocabulary, non-stopword context token") {}
};

struct LabelNotEmbeddable : Error {
    explicit LabelNotEmbeddable(const std::string& label)
        : Error("category label has no in-vocabulary token: " + label), label(label) {}
    std::string label;
};

struct ValidationError : Error {
    ValidationError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line(line) {}
    std::size_t line;
};

struct ParseError : Error {
    ParseError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line(line) {}
    std::size_t line;
};

struct HeaderMismatch : Error {
    using Error::Error;
};

struct EncodingError : Error {
    using Error::Error;
};

struct MagicMismatch : Error {
    MagicMismatch() : Error("file does not start with the W2GM magic bytes") {}
};

struct VersionUnsupported : Error {
    explicit VersionUnsupported(int version)
        : Error("unsupported W2GM format version " + std::to_string(version)) {}
};

struct TruncatedFile : Error {
    TruncatedFile() : Error("file ends before the declared payload") {}
};

struct LengthMismatch : Error {
    using Error::Error;
};

}  // namespace oovlex
