#include "oovlex/model_io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace oovlex {

namespace {

constexpr char kMagic[4] = {'W', '2', 'G', 'M'};
constexpr std::uint8_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void write_f32(std::ostream& out, float f) { write_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw TruncatedFile();
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float read_f32(std::istream& in) { return std::bit_cast<float>(read_u32(in)); }

// File-order vocabulary with synthetic descending counts; model files carry
// tokens only and imported models are inference-only.
Vocabulary vocab_from_tokens(std::vector<std::string> tokens) {
    Vocabulary vocab;
    const std::uint32_t v = static_cast<std::uint32_t>(tokens.size());
    vocab.token_of = std::move(tokens);
    vocab.count.resize(v);
    for (std::uint32_t id = 0; id < v; ++id) {
        vocab.id_of.emplace(vocab.token_of[id], id);
        vocab.count[id] = v - id;
        vocab.total_tokens += v - id;
    }
    vocab.finalize();
    return vocab;
}

}  // namespace

void export_text(const PointEmbedding& model, const Vocabulary& vocab, const std::string& path) {
    if (vocab.size() != model.vocab_size)
        throw DimensionMismatch("vocabulary and model disagree on V");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);

    out << model.vocab_size << ' ' << model.dims << '\n';
    char buf[32];
    for (std::uint32_t id = 0; id < model.vocab_size; ++id) {
        const std::string& token = vocab.token_of[id];
        for (unsigned char c : token)
            if (std::isspace(c) || c < 0x20)
                throw EncodingError("token not representable in text format: " + token);
        out << token;
        for (double x : model.word(id)) {
            std::snprintf(buf, sizeof buf, " %.6g", x);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing model file: " + path);
}

Model import_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty file");
    std::istringstream header(line);
    long long v = 0, d = 0;
    std::string extra;
    if (!(header >> v >> d) || (header >> extra) || v <= 0 || d <= 0)
        throw ParseError(1, "header must be two positive integers `V D`");

    PointEmbedding emb;
    emb.vocab_size = static_cast<std::uint32_t>(v);
    emb.dims = static_cast<int>(d);
    emb.word_vecs.reserve(static_cast<std::size_t>(v) * d);

    std::vector<std::string> tokens;
    tokens.reserve(v);
    std::unordered_map<std::string, std::uint32_t> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string token;
        if (!(row >> token)) throw ParseError(lineno, "missing token");
        if (!seen.emplace(token, 0).second) throw ParseError(lineno, "duplicate token: " + token);

        std::size_t n = 0;
        std::string field;
        while (row >> field) {
            double x = 0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
            if (ec != std::errc() || ptr != field.data() + field.size())
                throw ParseError(lineno, "not a number: " + field);
            emb.word_vecs.push_back(x);
            ++n;
        }
        if (n != static_cast<std::size_t>(d))
            throw HeaderMismatch("line " + std::to_string(lineno) + ": expected " +
                                 std::to_string(d) + " values, got " + std::to_string(n));
        tokens.push_back(std::move(token));
    }
    if (tokens.size() != static_cast<std::size_t>(v))
        throw HeaderMismatch("header declares " + std::to_string(v) + " rows, file has " +
                             std::to_string(tokens.size()));

    emb.ctx_vecs.assign(emb.word_vecs.size(), 0.0);
    Model model;
    model.vocab = vocab_from_tokens(std::move(tokens));
    model.emb = std::move(emb);
    return model;
}

void save_gm(const GmEmbedding& model, const Vocabulary& vocab, const std::string& path) {
    if (vocab.size() != model.vocab_size)
        throw DimensionMismatch("vocabulary and model disagree on V");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);

    out.write(kMagic, 4);
    out.put(static_cast<char>(kVersion));
    write_u32(out, model.vocab_size);
    write_u32(out, static_cast<std::uint32_t>(model.dims));
    write_u32(out, static_cast<std::uint32_t>(model.components));
    for (double x : model.weight_logits) write_f32(out, static_cast<float>(x));
    for (double x : model.means) write_f32(out, static_cast<float>(x));
    for (double x : model.log_vars) write_f32(out, static_cast<float>(x));
    for (std::uint32_t id = 0; id < vocab.size(); ++id) {
        const std::string& token = vocab.token_of[id];
        write_u32(out, static_cast<std::uint32_t>(token.size()));
        out.write(token.data(), static_cast<std::streamsize>(token.size()));
    }
    if (!out) throw IoError("failed writing model file: " + path);
}

Model load_gm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);

    char magic[4];
    if (!in.read(magic, 4)) throw TruncatedFile();
    if (std::memcmp(magic, kMagic, 4) != 0) throw MagicMismatch();
    int version = in.get();
    if (version == std::istream::traits_type::eof()) throw TruncatedFile();
    if (version != kVersion) throw VersionUnsupported(version);

    GmEmbedding emb;
    emb.vocab_size = read_u32(in);
    emb.dims = static_cast<int>(read_u32(in));
    emb.components = static_cast<int>(read_u32(in));
    if (emb.vocab_size == 0 || emb.dims <= 0 || emb.components <= 0)
        throw HeaderMismatch("degenerate W2GM header");

    const std::size_t vk = static_cast<std::size_t>(emb.vocab_size) * emb.components;
    emb.weight_logits.resize(vk);
    emb.means.resize(vk * emb.dims);
    emb.log_vars.resize(vk * emb.dims);
    for (auto& x : emb.weight_logits) x = read_f32(in);
    for (auto& x : emb.means) x = read_f32(in);
    for (auto& x : emb.log_vars) x = read_f32(in);

    std::vector<std::string> tokens;
    tokens.reserve(emb.vocab_size);
    for (std::uint32_t id = 0; id < emb.vocab_size; ++id) {
        std::uint32_t len = read_u32(in);
        std::string token(len, '\0');
        if (len && !in.read(token.data(), len)) throw TruncatedFile();
        tokens.push_back(std::move(token));
    }

    Model model;
    model.vocab = vocab_from_tokens(std::move(tokens));
    model.emb = std::move(emb);
    return model;
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    in.close();
    if (std::memcmp(magic, kMagic, 4) == 0) return load_gm(path);
    return import_text(path);
}

}  // namespace oovlex
