// Command-line front end: corpus -> train -> evaluate -> report.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "oovlex/corpus.hpp"
#include "oovlex/gm_model.hpp"
#include "oovlex/model_io.hpp"
#include "oovlex/oov_tasks.hpp"
#include "oovlex/point_model.hpp"
#include "oovlex/similarity.hpp"
#include "oovlex/stopwords.hpp"

namespace {

using nlohmann::json;
using namespace oovlex;

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct CommonOpts {
    TrainConfig train;
    GmTrainConfig gm;
    std::vector<std::string> corpus;
    std::string model_kind = "sgns";
    std::string out;
    std::string model_file;
    std::string dataset;
    std::string report_path;
    std::string stopword_file;
    std::string categories_csv;
    std::string gm_category_metric = "centroid";
    int task = 1;
    int eval_k = 5;
};

json manifest_json(const std::string& subcommand, const CommonOpts& o) {
    json cfg{{"window", o.train.window},
             {"dims", o.train.dims},
             {"min_count", o.train.min_count},
             {"negatives_per_positive", o.train.negatives_per_positive},
             {"epochs", o.train.epochs},
             {"seed", o.train.seed},
             {"subsample_t", o.train.subsample_t},
             {"lr0", o.train.lr0},
             {"workers", o.train.workers},
             {"gm_components", o.gm.components},
             {"gm_margin", o.gm.margin},
             {"gm_lr0", o.gm.lr0},
             {"gm_var_min", o.gm.var_min},
             {"gm_var_max", o.gm.var_max},
             {"gm_mu_max", o.gm.mu_max},
             {"gm_var_init", o.gm.var_init},
             {"gm_negatives_per_positive", o.gm.negatives_per_positive},
             {"gm_train_weights", o.gm.train_weights}};
    return json{{"subcommand", subcommand},
                {"config", std::move(cfg)},
                {"corpus", o.corpus},
                {"model", o.model_kind},
                {"model_file", o.model_file},
                {"dataset", o.dataset},
                {"categories", o.categories_csv},
                {"gm_category_metric", o.gm_category_metric},
                {"task", o.task},
                {"k", o.eval_k},
                {"seed", o.train.seed},
                {"workers", o.train.workers},
                {"timestamp", utc_timestamp()}};
}

StopwordSet resolve_stopwords(const CommonOpts& o) {
    return o.stopword_file.empty() ? builtin_stopwords() : load_stopwords(o.stopword_file);
}

CategorySet resolve_categories(const CommonOpts& o) {
    return o.categories_csv.empty() ? CategorySet::defaults()
                                    : CategorySet::from_labels(split_csv(o.categories_csv));
}

int cmd_build_vocab(const CommonOpts& o) {
    Corpus corpus = load_corpus(o.corpus, o.train);
    if (!o.out.empty()) save_vocab(corpus.vocab, o.out);
    std::cout << "V=" << corpus.vocab.size() << " total_tokens=" << corpus.vocab.total_tokens
              << '\n';
    return 0;
}

int cmd_train(CommonOpts& o) {
    o.train.validate();
    Corpus corpus = load_corpus(o.corpus, o.train);
    if (o.model_kind == "sgns") {
        TrainStats stats;
        PointEmbedding model = train_point(corpus, o.train, &stats, &std::cout);
        export_text(model, corpus.vocab, o.out);
    } else if (o.model_kind == "w2gm") {
        o.gm.validate();
        TrainStats stats;
        GmEmbedding model = train_gm(corpus, o.train, o.gm, &stats, &std::cout);
        save_gm(model, corpus.vocab, o.out);
    } else {
        throw ConfigError("unknown model kind: " + o.model_kind);
    }
    std::cout << "saved " << o.out << '\n';
    return 0;
}

int cmd_eval(const CommonOpts& o) {
    Model model = load_model(o.model_file);
    auto samples = load_dataset(o.dataset);
    auto stopwords = resolve_stopwords(o);

    EvalReport report;
    if (o.task == 1) {
        auto categories = resolve_categories(o);
        auto mode = o.gm_category_metric == "maxcos" ? GmCategoryMode::MaxCosine
                                                     : GmCategoryMode::Centroid;
        report = run_task1(model, samples, categories, stopwords, mode);
    } else if (o.task == 2) {
        report = run_task2(model, samples, static_cast<std::size_t>(o.eval_k), stopwords);
    } else {
        throw ConfigError("task must be 1 or 2");
    }

    for (const auto& row : report.rows)
        if (row.word_in_vocab)
            std::cerr << "warning: OOV word appears in the training vocabulary: " << row.word
                      << '\n';

    json out = report_to_json(report);
    out["schema_version"] = 1;
    out["manifest"] = manifest_json("eval", o);
    if (!o.report_path.empty()) {
        std::ofstream f(o.report_path, std::ios::binary);
        if (!f) throw IoError("cannot open report file: " + o.report_path);
        f << out.dump(2) << '\n';
    }

    if (o.task == 1)
        std::cout << "task 1: N=" << report.n << " S1=" << report.s1
                  << " accuracy=" << report.accuracy << " no_signal=" << report.no_signal_count
                  << '\n';
    else
        std::cout << "task 2: N=" << report.n << " K=" << report.k << " S2=" << report.s2
                  << " no_signal=" << report.no_signal_count << '\n';
    return 0;
}

int cmd_nn(const CommonOpts& o, const std::string& word, const std::string& context,
           const std::string& metric_name_opt, std::size_t k) {
    Model model = load_model(o.model_file);
    Metric metric = metric_name_opt.empty() ? default_metric(model.kind())
                                            : metric_from_name(metric_name_opt);

    Query query;
    bool have_query = false;
    std::unordered_set<std::string> exclude;
    if (!word.empty()) {
        auto id = model.vocab.lookup(word);
        if (!id) {
            if (context.empty())
                throw ConfigError("word not in vocabulary and no --context given: " + word);
        } else {
            query = *id;
            have_query = true;
            exclude.insert(word);
        }
    }
    if (!have_query) {
        if (context.empty()) throw ConfigError("one of --word or --context is required");
        auto stopwords = resolve_stopwords(o);
        query = context_vector(model, tokenize(context), stopwords);
        for (const auto& s : stopwords) exclude.insert(s);
    }

    auto neighbors = nearest_neighbors(model, query, k, metric, exclude);
    for (const auto& n : neighbors) std::cout << n.token << '\t' << n.score << '\n';
    return 0;
}

int cmd_convert_dataset(const std::string& contexts_path, const std::string& attributes_path,
                        const std::string& category, const std::string& out_path, bool append) {
    auto read_two_column = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open file: " + path);
        std::vector<std::pair<std::string, std::string>> rows;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw ParseError(lineno, "expected `key<TAB>value`");
            std::string value = line.substr(tab + 1);
            if (!value.empty() && value.back() == '\r') value.pop_back();
            rows.emplace_back(line.substr(0, tab), std::move(value));
        }
        return rows;
    };

    auto contexts = read_two_column(contexts_path);
    std::unordered_map<std::string, std::vector<std::string>> attributes;
    for (auto& [word, value] : read_two_column(attributes_path)) {
        std::vector<std::string> attrs;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ','))
            for (auto& tok : tokenize(item)) attrs.push_back(tok);
        attributes[word] = std::move(attrs);
    }

    std::ofstream out(out_path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw IoError("cannot open output file: " + out_path);
    std::size_t written = 0;
    for (auto& [word, context] : contexts) {
        auto it = attributes.find(word);
        if (it == attributes.end())
            throw ValidationError(written + 1, "no attributes for word: " + word);
        json obj{{"word", word},
                 {"context", context},
                 {"category", category},
                 {"attributes", it->second}};
        out << obj.dump() << '\n';
        ++written;
    }
    std::cout << "wrote " << written << " samples to " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"word embedding trainer and OOV evaluation harness"};
    app.set_config("--config", "", "configuration file (key=value, flags take precedence)");
    app.require_subcommand(1);

    CommonOpts o;
    std::string nn_word, nn_context, nn_metric;
    std::size_t nn_k = 10;
    std::string conv_contexts, conv_attributes, conv_category;
    bool conv_append = false;

    auto add_corpus_opts = [&](CLI::App* cmd) {
        cmd->add_option("--corpus", o.corpus, "plain-text corpus file(s)")->required();
        cmd->add_option("--min-count", o.train.min_count, "minimum token frequency");
    };
    auto add_train_opts = [&](CLI::App* cmd) {
        cmd->add_option("--dims", o.train.dims, "embedding dimensions");
        cmd->add_option("--window", o.train.window, "skip-gram window");
        cmd->add_option("--epochs", o.train.epochs, "training epochs");
        cmd->add_option("--negatives", o.train.negatives_per_positive,
                        "negative samples per pair (sgns)");
        cmd->add_option("--lr", o.train.lr0, "initial learning rate (sgns)");
        cmd->add_option("--subsample", o.train.subsample_t,
                        "frequent-word subsampling threshold, 0 disables");
        cmd->add_option("--seed", o.train.seed, "RNG seed");
        cmd->add_option("--workers", o.train.workers, "worker threads")
            ->envname("OOV_EMBED_THREADS");
        cmd->add_option("--k", o.gm.components, "mixture components per word (w2gm)");
        cmd->add_option("--margin", o.gm.margin, "max-margin ranking margin (w2gm)");
        cmd->add_option("--gm-lr", o.gm.lr0, "adaptive-gradient learning rate (w2gm)");
        cmd->add_option("--var-min", o.gm.var_min, "variance clamp lower bound (w2gm)");
        cmd->add_option("--var-max", o.gm.var_max, "variance clamp upper bound (w2gm)");
        cmd->add_option("--mu-max", o.gm.mu_max, "mean norm clamp (w2gm)");
        cmd->add_option("--var-init", o.gm.var_init, "initial spherical variance (w2gm)");
        cmd->add_option("--gm-negatives", o.gm.negatives_per_positive,
                        "negative samples per pair (w2gm)");
        cmd->add_flag("!--freeze-weights", o.gm.train_weights,
                      "freeze mixture weights at uniform (w2gm)");
    };

    CLI::App* build = app.add_subcommand("build-vocab", "build and dump the vocabulary");
    add_corpus_opts(build);
    build->add_option("--out", o.out, "vocabulary dump path (token<TAB>count)");

    CLI::App* train = app.add_subcommand("train", "train a model and save it");
    add_corpus_opts(train);
    add_train_opts(train);
    train->add_option("--model", o.model_kind, "sgns|w2gm")
        ->check(CLI::IsMember({"sgns", "w2gm"}));
    train->add_option("--out", o.out, "output model path")->required();

    CLI::App* eval = app.add_subcommand("eval", "run task 1 or 2 on an OOV dataset");
    eval->add_option("--task", o.task, "1 (category) or 2 (attributes)");
    eval->add_option("--model-file", o.model_file, "trained model path")->required();
    eval->add_option("--dataset", o.dataset, "OOV dataset (JSON Lines)")->required();
    eval->add_option("--k", o.eval_k, "prediction budget for task 2");
    eval->add_option("--categories", o.categories_csv, "comma-separated category labels");
    eval->add_option("--report", o.report_path, "write the JSON report here");
    eval->add_option("--stopwords", o.stopword_file, "stopword file (one word per line)");
    eval->add_option("--gm-category-metric", o.gm_category_metric, "centroid|maxcos")
        ->check(CLI::IsMember({"centroid", "maxcos"}));
    eval->add_option("--workers", o.train.workers, "worker threads")
        ->envname("OOV_EMBED_THREADS");

    CLI::App* nn = app.add_subcommand("nn", "print nearest neighbors");
    nn->add_option("--model-file", o.model_file, "trained model path")->required();
    nn->add_option("--word", nn_word, "query word");
    nn->add_option("--context", nn_context, "query context text");
    nn->add_option("--k", nn_k, "neighbors to print");
    nn->add_option("--metric", nn_metric, "cosine|maxcos|el|kl (default per model)");
    nn->add_option("--stopwords", o.stopword_file, "stopword file (one word per line)");

    CLI::App* conv = app.add_subcommand(
        "convert-dataset", "convert two-column word<TAB>context + word<TAB>attributes files");
    conv->add_option("--contexts", conv_contexts, "word<TAB>context file")->required();
    conv->add_option("--attributes", conv_attributes, "word<TAB>attr1,attr2,... file")
        ->required();
    conv->add_option("--category", conv_category, "category label for every sample")->required();
    conv->add_option("--out", o.out, "output JSONL path")->required();
    conv->add_flag("--append", conv_append, "append instead of truncating");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (build->parsed()) return cmd_build_vocab(o);
        if (train->parsed()) return cmd_train(o);
        if (eval->parsed()) return cmd_eval(o);
        if (nn->parsed()) return cmd_nn(o, nn_word, nn_context, nn_metric, nn_k);
        if (conv->parsed())
            return cmd_convert_dataset(conv_contexts, conv_attributes, conv_category, o.out,
                                       conv_append);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
