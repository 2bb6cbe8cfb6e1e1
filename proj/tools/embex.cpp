/*
 * Copyright 2026 The embex Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "embex/error.hpp"
#include "embex/graphx.hpp"
#include "embex/serialize.hpp"
#include "embex/service/server.hpp"
#include "embex/simquery.hpp"
#include "embex/text.hpp"
#include "embex/trainer.hpp"
#include "embex/tsne.hpp"
#include "embex/vstore.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <csignal>
#include <fstream>
#include <iostream>

namespace {

using namespace embex;

enum Exit { ok = 0, io_error = 1, query_error = 2, usage_error = 3 };

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::malformed_header:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::duplicate_token:
    case ErrorCode::non_finite_value:
    case ErrorCode::truncated_file:
    case ErrorCode::io_failure:
    case ErrorCode::malformed_record:
    case ErrorCode::malformed_json:
        return io_error;
    case ErrorCode::invalid_argument:
    case ErrorCode::perplexity_too_large:
    case ErrorCode::bad_selection:
        return usage_error;
    default:
        return query_error;
    }
}

void write_output(const std::string &path, const std::string &content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path);
}

std::pair<std::string, std::size_t> split_op(const std::string &arg) {
    const auto colon = arg.rfind(':');
    if (colon == std::string::npos || colon == 0) throw_invalid_argument("expected WORD:N, got '" + arg + "'");
    std::size_t n = 0;
    const auto tail = arg.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), n);
    if (ec != std::errc{} || ptr != tail.data() + tail.size()) throw_invalid_argument("bad count in '" + arg + "'");
    return {arg.substr(0, colon), n};
}

QueryOptions query_options(const std::string &fallback) {
    QueryOptions opts;
    if (fallback == "on") opts.case_fallback = true;
    if (fallback == "off") opts.case_fallback = false;
    return opts;
}

std::string print_vector(const std::vector<double> &v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += text::format_fixed(v[i], 6);
    }
    return out;
}

void add_tsne_flags(CLI::App *cmd, tsne::Config &cfg) {
    cmd->add_option("--perplexity", cfg.perplexity, "Target perplexity");
    cmd->add_option("--iterations", cfg.n_iter, "Optimizer iterations");
    cmd->add_option("--learning-rate", cfg.learning_rate, "Gradient step size");
    cmd->add_option("--exaggeration", cfg.early_exaggeration, "Early exaggeration factor");
    cmd->add_option("--exaggeration-iters", cfg.exaggeration_iters, "Iterations with exaggeration");
    cmd->add_option("--theta", cfg.theta, "Barnes-Hut opening angle (0 = exact)");
    cmd->add_option("--seed", cfg.seed, "Random seed");
}

void add_train_flags(CLI::App *cmd, trainer::TrainConfig &cfg, std::string &model_type) {
    cmd->add_option("--model", model_type, "skipgram or cbow")->check(CLI::IsMember({"skipgram", "cbow"}));
    cmd->add_option("--dim", cfg.dim, "Vector dimensionality");
    cmd->add_option("--window", cfg.window, "Context window radius");
    cmd->add_option("--min-count", cfg.min_count, "Frequency threshold");
    cmd->add_option("--negatives", cfg.negatives, "Negative samples per pair");
    cmd->add_option("--epochs", cfg.epochs, "Training epochs");
    cmd->add_option("--lr", cfg.initial_lr, "Initial learning rate");
    cmd->add_option("--subsample", cfg.subsample_t, "Subsampling threshold (0 disables)");
    cmd->add_option("--seed", cfg.seed, "Random seed");
}

trainer::TokenStream read_corpus(const std::string &path, const std::string &format, FeatureKind feature) {
    if (format == "plain") {
        if (feature != FeatureKind::wordform) throw_invalid_argument("plain corpora only support --feature wordform");
        return trainer::load_plain(path);
    }
    return trainer::extract_tokens(trainer::load_annotated(path), feature);
}

service::Server *active_server = nullptr;

void on_signal(int) {
    if (active_server) active_server->stop();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Word embedding exploration toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "embex 0.1.0");

    std::string model_path, word, fallback = "auto", output, feature = "wordform", corpus_format = "annotated";
    std::size_t k = 10;
    bool as_json = false;

    auto *info = app.add_subcommand("info", "Print model metadata and vocabulary size");
    info->add_option("model", model_path)->required();

    auto *similar = app.add_subcommand("similar", "Nearest neighbors of a word");
    similar->add_option("model", model_path)->required();
    similar->add_option("word", word)->required();
    similar->add_option("-k", k, "Number of neighbors")->check(CLI::PositiveNumber);
    similar->add_flag("--json", as_json, "Emit JSON");
    similar->add_option("--case-fallback", fallback)->check(CLI::IsMember({"auto", "on", "off"}));

    std::string a, b, c;
    bool trace = false;
    auto *analogy_cmd = app.add_subcommand("analogy", "Solve A - B + C");
    analogy_cmd->add_option("model", model_path)->required();
    analogy_cmd->add_option("A", a)->required();
    analogy_cmd->add_option("B", b)->required();
    analogy_cmd->add_option("C", c)->required();
    analogy_cmd->add_option("-k", k, "Number of candidates")->check(CLI::PositiveNumber);
    analogy_cmd->add_flag("--trace", trace, "Print the intermediate vectors");
    analogy_cmd->add_flag("--json", as_json, "Emit JSON");
    analogy_cmd->add_option("--case-fallback", fallback)->check(CLI::IsMember({"auto", "on", "off"}));

    tsne::Config tcfg;
    std::size_t top = 0, n = 0;
    std::string similar_to, tsne_format = "json";
    auto *tsne_cmd = app.add_subcommand("tsne", "2D t-SNE layout of a token selection");
    tsne_cmd->add_option("model", model_path)->required();
    auto *top_opt = tsne_cmd->add_option("--top", top, "Most frequent N tokens")->check(CLI::PositiveNumber);
    auto *sim_opt = tsne_cmd->add_option("--similar-to", similar_to, "Query word plus its -n neighbors");
    auto *n_opt = tsne_cmd->add_option("-n", n, "Neighbor count for --similar-to")->check(CLI::PositiveNumber);
    top_opt->excludes(sim_opt);
    sim_opt->needs(n_opt);
    n_opt->needs(sim_opt);
    add_tsne_flags(tsne_cmd, tcfg);
    tsne_cmd->add_option("-o,--output", output, "Output file (default stdout)");
    tsne_cmd->add_option("--format", tsne_format)->check(CLI::IsMember({"json", "tsv"}));

    std::string center;
    std::vector<std::string> expand_ops, add_ops;
    auto *graph_cmd = app.add_subcommand("graph", "Build and expand a similarity graph");
    graph_cmd->add_option("model", model_path)->required();
    graph_cmd->add_option("center", center)->required();
    graph_cmd->add_option("-n", n, "Neighbors of the center")->required();
    auto *expand_opt = graph_cmd->add_option("--expand", expand_ops, "Expand WORD:N (repeatable)");
    auto *add_opt = graph_cmd->add_option("--add", add_ops, "Add seed WORD:N (repeatable)");
    graph_cmd->add_option("-o,--output", output, "Output file (default stdout)");

    trainer::TrainConfig train_cfg;
    std::string model_type = "skipgram", corpus_path;
    auto *train_cmd = app.add_subcommand("train", "Train embeddings with negative sampling");
    train_cmd->add_option("corpus", corpus_path)->required();
    train_cmd->add_option("--feature", feature)->check(CLI::IsMember({"wordform", "lemma_cased", "lemma_lower"}));
    train_cmd->add_option("--corpus-format", corpus_format)->check(CLI::IsMember({"annotated", "plain"}));
    add_train_flags(train_cmd, train_cfg, model_type);
    train_cmd->add_option("-o,--output", output, "Model path (.bin for binary)")->required();

    bool keep_sentences = false;
    auto *prep_cmd = app.add_subcommand("prep", "Extract feature tokens from an annotated corpus");
    prep_cmd->add_option("corpus", corpus_path)->required();
    prep_cmd->add_option("--feature", feature)->check(CLI::IsMember({"wordform", "lemma_cased", "lemma_lower"}));
    prep_cmd->add_flag("--keep-sentences", keep_sentences, "One sentence per line instead of one token per line");
    prep_cmd->add_option("-o,--output", output, "Output file (default stdout)");

    std::string model_b, lemma;
    auto *compare_cmd = app.add_subcommand("compare", "Neighborhoods of a wordform and its lemma side by side");
    compare_cmd->add_option("wordform_model", model_path)->required();
    compare_cmd->add_option("lemma_model", model_b)->required();
    compare_cmd->add_option("wordform", word)->required();
    compare_cmd->add_option("lemma", lemma);
    compare_cmd->add_option("-k", k)->check(CLI::PositiveNumber);
    compare_cmd->add_flag("--json", as_json);

    service::ServiceConfig scfg = service::apply_environment({});
    std::string config_path, graph_dir;
    auto *serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--config", config_path, "models.json startup file");
    serve_cmd->add_option("--host", scfg.host);
    serve_cmd->add_option("--port", scfg.port)->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--data-dir", scfg.data_dir);
    serve_cmd->add_option("--persist-graphs", graph_dir, "Directory for graph snapshots");
    serve_cmd->add_option("--workers", scfg.job_workers)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return usage_error;
    }

    try {
        if (*info) {
            const auto model = load_model(model_path);
            const auto &meta = model.meta();
            std::cout << "vocab_size: " << model.size() << '\n'
                      << "dim: " << model.dim() << '\n'
                      << "feature_kind: " << to_string(meta.feature_kind) << '\n'
                      << "frequency_threshold: " << meta.frequency_threshold << '\n'
                      << "window: " << (meta.window ? std::to_string(*meta.window) : "unknown") << '\n'
                      << "zero_rows: " << model.zero_row_count() << '\n'
                      << "source: " << meta.source << '\n';
        } else if (*similar) {
            const auto model = load_model(model_path);
            const auto result = top_k_similar(model, word, k, query_options(fallback));
            if (as_json) {
                std::cout << json(result).dump() << '\n';
            } else {
                for (const auto &nb : result) std::cout << nb.token << '\t' << text::format_fixed(nb.score, 6) << '\n';
            }
        } else if (*analogy_cmd) {
            const auto model = load_model(model_path);
            const auto result = analogy(model, a, b, c, k, query_options(fallback));
            if (as_json) {
                std::cout << json(result).dump() << '\n';
            } else {
                const auto &t = result.trace;
                std::cout << t.a.token << " - " << t.b.token << " + " << t.c.token << " = " << t.result.token << '\n';
                if (trace) {
                    std::cout << t.a.token << ", " << print_vector(t.a.vector) << '\n'
                              << t.b.token << ", " << print_vector(t.b.vector) << '\n'
                              << t.a.token << "-" << t.b.token << ", " << print_vector(t.a_minus_b) << '\n'
                              << t.c.token << ", " << print_vector(t.c.vector) << '\n'
                              << t.a.token << "-" << t.b.token << "+" << t.c.token << ", " << print_vector(t.query)
                              << '\n'
                              << t.result.token << ", " << print_vector(t.result_vector) << '\n'
                              << "A-B+C-R, " << print_vector(t.residual) << '\n'
                              << "cos(A-B+C;R), " << text::format_fixed(t.cos_query_result, 6) << '\n';
                }
            }
        } else if (*tsne_cmd) {
            if (!*top_opt && !*sim_opt) throw_invalid_argument("one of --top or --similar-to is required");
            if (tcfg.pca) throw_invalid_argument("PCA preprocessing is not supported");
            const auto model = load_model(model_path);
            std::vector<std::string> tokens;
            if (*top_opt) {
                tokens = top_n_frequent(model, top);
            } else {
                tokens.push_back(model.token(resolve_token(model, similar_to)));
                for (auto &nb : top_k_similar(model, similar_to, n)) tokens.push_back(std::move(nb.token));
            }
            tsne::Matrix x(tokens.size(), model.dim());
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                const auto row = lookup(model, tokens[i]);
                std::copy(row.begin(), row.end(), x.row(i).begin());
            }
            tsne::Observer obs;
            obs.on_cost = [](const tsne::CostSample &s) {
                std::cerr << "iteration " << s.iteration << " kl " << text::format_fixed(s.kl, 6) << '\n';
            };
            const auto layout = tsne::run(x, std::move(tokens), tcfg, obs);
            write_output(output, tsne_format == "tsv" ? tsne::to_tsv(layout) : json(layout).dump() + "\n");
        } else if (*graph_cmd) {
            const auto model = load_model(model_path);
            auto graph = build_star(model, center, n);
            std::size_t ei = 0, ai = 0;
            for (const auto *opt : graph_cmd->parse_order()) {
                if (opt == expand_opt) {
                    const auto [w, cnt] = split_op(expand_ops.at(ei++));
                    expand_node(graph, model, w, cnt);
                } else if (opt == add_opt) {
                    const auto [w, cnt] = split_op(add_ops.at(ai++));
                    add_word(graph, model, w, cnt);
                }
            }
            write_output(output, json(graph).dump() + "\n");
        } else if (*train_cmd) {
            train_cfg.feature = parse_feature_kind(feature);
            train_cfg.model_type = trainer::parse_model_type(model_type);
            trainer::validate(train_cfg);
            const auto tokens = read_corpus(corpus_path, corpus_format, train_cfg.feature);
            std::cerr << "corpus: " << trainer::token_count(tokens) << " tokens\n";
            trainer::TrainObserver obs;
            obs.on_progress = [](const trainer::TrainProgress &p) {
                std::cerr << "epoch " << p.epoch << " words " << p.words_processed << "/" << p.words_total << " lr "
                          << text::format_fixed(p.learning_rate, 6) << " loss " << text::format_fixed(p.loss, 4)
                          << '\n';
            };
            const auto model = trainer::train(tokens, train_cfg, obs);
            save_model(model, output);
            std::cerr << "saved " << model.size() << " x " << model.dim() << " to " << output << '\n';
        } else if (*prep_cmd) {
            const auto tokens = trainer::extract_tokens(trainer::load_annotated(corpus_path), parse_feature_kind(feature));
            std::string out;
            for (const auto &sentence : tokens) {
                for (std::size_t i = 0; i < sentence.size(); ++i) {
                    out += sentence[i];
                    out += keep_sentences ? (i + 1 == sentence.size() ? '\n' : ' ') : '\n';
                }
            }
            write_output(output, out);
        } else if (*compare_cmd) {
            const auto wf = load_model(model_path);
            const auto lm = load_model(model_b);
            const auto cmp = trainer::compare_neighborhoods(wf, lm, word, lemma.empty() ? word : lemma, k);
            if (as_json) {
                std::cout << json(cmp).dump() << '\n';
            } else {
                const std::size_t rows = std::max(cmp.wordform_neighbors.size(), cmp.lemma_neighbors.size());
                for (std::size_t i = 0; i < rows; ++i) {
                    if (i < cmp.wordform_neighbors.size())
                        std::cout << cmp.wordform_neighbors[i].token << '\t'
                                  << text::format_fixed(cmp.wordform_neighbors[i].score, 6);
                    else
                        std::cout << '\t';
                    std::cout << '\t';
                    if (i < cmp.lemma_neighbors.size())
                        std::cout << cmp.lemma_neighbors[i].token << '\t'
                                  << text::format_fixed(cmp.lemma_neighbors[i].score, 6);
                    std::cout << '\n';
                }
                std::cout << "overlap:";
                for (const auto &t : cmp.overlap) std::cout << ' ' << t;
                std::cout << '\n';
            }
        } else if (*serve_cmd) {
            if (!graph_dir.empty()) scfg.graph_dir = graph_dir;
            service::Server server(scfg);
            if (!config_path.empty()) server.load_config(config_path);
            for (const auto &e : server.models().list())
                std::cerr << "model " << e.id << ": " << to_string(e.state)
                          << (e.error.empty() ? "" : " (" + e.error + ")") << '\n';
            const int port = server.bind(scfg.host, scfg.port);
            std::cerr << "listening on " << scfg.host << ":" << port << '\n';
            active_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.serve();
            active_server = nullptr;
        }
    } catch (const Error &e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_error;
    }
    return ok;
}
