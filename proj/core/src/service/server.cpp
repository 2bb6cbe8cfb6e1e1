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

#include "embex/service/server.hpp"

#include "embex/error.hpp"
#include "embex/graphx.hpp"
#include "embex/serialize.hpp"
#include "embex/simquery.hpp"
#include "embex/trainer.hpp"
#include "embex/tsne.hpp"

#include <httplib.h>

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <thread>

namespace embex::service {

namespace {

using httplib::Request;
using httplib::Response;

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::out_of_vocabulary:
    case ErrorCode::unknown_model:
    case ErrorCode::unknown_job:
    case ErrorCode::unknown_graph:
    case ErrorCode::unknown_corpus:
    case ErrorCode::node_not_in_graph:
    case ErrorCode::not_found:
        return 404;
    case ErrorCode::graph_cap_exceeded:
    case ErrorCode::job_not_done:
    case ErrorCode::job_failed:
        return 409;
    case ErrorCode::io_failure:
        return 500;
    default:
        return 400;
    }
}

void send_json(Response &res, int status, const json &body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(Response &res, const Error &e) {
    json body{{"error", to_string(e.code())}, {"message", e.what()}};
    if (e.token()) body["token"] = *e.token();
    send_json(res, status_for(e.code()), body);
}

std::string required_param(const Request &req, const char *name) {
    if (!req.has_param(name)) throw_invalid_argument(std::string("missing query parameter '") + name + "'");
    return req.get_param_value(name);
}

std::size_t parse_count(const std::string &text, const char *name) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw_invalid_argument(std::string("parameter '") + name + "' must be an integer");
    if (v < 0) throw_invalid_argument(std::string("parameter '") + name + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

std::size_t count_param(const Request &req, const char *name, std::size_t fallback) {
    if (!req.has_param(name)) return fallback;
    return parse_count(req.get_param_value(name), name);
}

std::optional<bool> bool_param(const Request &req, const char *name) {
    if (!req.has_param(name)) return std::nullopt;
    const auto v = req.get_param_value(name);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw_invalid_argument(std::string("parameter '") + name + "' must be true or false");
}

json parse_body(const Request &req) {
    json body;
    try {
        body = json::parse(req.body);
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::malformed_json, std::string("malformed JSON body: ") + e.what());
    }
    if (!body.is_object()) throw Error(ErrorCode::malformed_json, "request body must be a JSON object");
    return body;
}

template <typename T> T body_field(const json &body, const char *key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) throw_invalid_argument(std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception &) {
        throw_invalid_argument(std::string("field '") + key + "' has the wrong type");
    }
}

std::size_t positive_field(const json &body, const char *key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) throw_invalid_argument(std::string("missing field '") + key + "'");
    if (!it->is_number_integer() || it->get<long long>() < 0)
        throw_invalid_argument(std::string("field '") + key + "' must be a non-negative integer");
    return it->get<std::size_t>();
}

tsne::Matrix gather_rows(const EmbeddingModel &model, const std::vector<std::string> &tokens) {
    tsne::Matrix x(tokens.size(), model.dim());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto row = lookup(model, tokens[i]);
        for (std::size_t d = 0; d < row.size(); ++d) x(i, d) = row[d];
    }
    return x;
}

} // namespace

ServiceConfig apply_environment(ServiceConfig config) {
    if (const char *host = std::getenv("EMBEX_HOST"); host && *host) config.host = host;
    if (const char *port = std::getenv("EMBEX_PORT"); port && *port) {
        int p = 0;
        auto [ptr, ec] = std::from_chars(port, port + std::strlen(port), p);
        if (ec == std::errc{} && p > 0 && p < 65536) config.port = p;
    }
    return config;
}

struct Server::Impl {
    explicit Impl(ServiceConfig cfg)
        : config(std::move(cfg)), jobs(config.job_workers), graphs(config.graph_dir) {
        routes();
    }

    ServiceConfig config;
    ModelRegistry models;
    CorpusRegistry corpora;
    JobManager jobs;
    GraphStore graphs;
    httplib::Server http;
    std::thread thread;
    std::size_t next_upload = 1;
    std::mutex upload_mutex;

    template <typename Fn> auto guarded(Fn fn) {
        return [fn](const Request &req, Response &res) {
            try {
                fn(req, res);
            } catch (const Error &e) {
                send_error(res, e);
            } catch (const json::exception &e) {
                send_error(res, Error(ErrorCode::invalid_argument, e.what()));
            } catch (const std::exception &e) {
                send_json(res, 500, json{{"error", "internal"}, {"message", e.what()}});
            }
        };
    }

    void routes();
    json submit_tsne(const std::string &model_id, const json &body);
    json submit_train(const json &body);
    json register_corpus(const json &body);
};

void Server::Impl::routes() {
    if (config.cors) {
        http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                  {"Access-Control-Allow-Headers", "Content-Type"}});
        http.Options(R"(.*)", [](const Request &, Response &res) { res.status = 204; });
    }
    http.set_error_handler([](const Request &, Response &res) {
        if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
        const char *code = res.status == 404 ? "not_found" : "http_error";
        res.set_content(json{{"error", code}, {"message", "no such route"}}.dump(), "application/json");
        return httplib::Server::HandlerResponse::Handled;
    });

    http.Get("/health", [](const Request &, Response &res) { send_json(res, 200, json{{"status", "ok"}}); });

    http.Get("/models", guarded([this](const Request &req, Response &res) {
        ModelFilter filter;
        if (req.has_param("feature_kind")) filter.feature_kind = parse_feature_kind(req.get_param_value("feature_kind"));
        if (req.has_param("dim")) filter.dim = parse_count(req.get_param_value("dim"), "dim");
        if (req.has_param("min_frequency_threshold"))
            filter.min_frequency_threshold =
                parse_count(req.get_param_value("min_frequency_threshold"), "min_frequency_threshold");
        send_json(res, 200, json(models.list(filter)));
    }));

    http.Post("/models", guarded([this](const Request &req, Response &res) {
        const json body = parse_body(req);
        const auto id = body_field<std::string>(body, "id");
        const auto path = body_field<std::string>(body, "path");
        std::optional<std::filesystem::path> meta_path;
        if (body.contains("meta_path") && !body["meta_path"].is_null())
            meta_path = body_field<std::string>(body, "meta_path");
        const ModelEntry entry = models.register_file(id, path, meta_path);
        if (entry.state == ModelState::failed) {
            send_json(res, 400, json{{"error", "load_failed"}, {"message", entry.error}, {"entry", entry}});
            return;
        }
        send_json(res, 201, json(entry));
    }));

    http.Get(R"(/models/([^/]+))", guarded([this](const Request &req, Response &res) {
        const auto model = models.get(req.matches[1]);
        json body = model_info(*model);
        body["id"] = req.matches[1];
        send_json(res, 200, body);
    }));

    http.Get(R"(/models/([^/]+)/vector)", guarded([this](const Request &req, Response &res) {
        const auto model = models.get(req.matches[1]);
        const auto token = required_param(req, "token");
        send_json(res, 200, json{{"token", token}, {"vector", vector_json(lookup(*model, token))}});
    }));

    http.Get(R"(/models/([^/]+)/similar)", guarded([this](const Request &req, Response &res) {
        const auto model = models.get(req.matches[1]);
        const auto token = required_param(req, "token");
        std::size_t k = count_param(req, "k", 10);
        if (k == 0) throw_invalid_argument("k must be at least 1");
        k = std::min(k, config.max_k);
        send_json(res, 200, json(top_k_similar(*model, token, k, QueryOptions{bool_param(req, "case_fallback")})));
    }));

    http.Get(R"(/models/([^/]+)/analogy)", guarded([this](const Request &req, Response &res) {
        const auto model = models.get(req.matches[1]);
        const auto a = required_param(req, "a");
        const auto b = required_param(req, "b");
        const auto c = required_param(req, "c");
        std::size_t k = count_param(req, "k", 10);
        if (k == 0) throw_invalid_argument("k must be at least 1");
        k = std::min(k, config.max_k);
        send_json(res, 200, json(analogy(*model, a, b, c, k, QueryOptions{bool_param(req, "case_fallback")})));
    }));

    http.Get(R"(/models/([^/]+)/frequent)", guarded([this](const Request &req, Response &res) {
        const auto model = models.get(req.matches[1]);
        const std::size_t n = parse_count(required_param(req, "n"), "n");
        send_json(res, 200, json(top_n_frequent(*model, n)));
    }));

    http.Post(R"(/models/([^/]+)/tsne)", guarded([this](const Request &req, Response &res) {
        send_json(res, 202, submit_tsne(req.matches[1], parse_body(req)));
    }));

    http.Get("/jobs", guarded([this](const Request &, Response &res) { send_json(res, 200, json(jobs.list())); }));

    http.Get(R"(/jobs/([^/]+))", guarded([this](const Request &req, Response &res) {
        send_json(res, 200, json(jobs.get(req.matches[1])));
    }));

    http.Get(R"(/jobs/([^/]+)/result)", guarded([this](const Request &req, Response &res) {
        send_json(res, 200, jobs.result(req.matches[1]));
    }));

    http.Post("/graphs", guarded([this](const Request &req, Response &res) {
        const json body = parse_body(req);
        const auto model_id = body_field<std::string>(body, "model_id");
        const auto center = body_field<std::string>(body, "center");
        const std::size_t n = positive_field(body, "n");
        const auto model = models.get(model_id);
        SimilarityGraph graph = build_star(*model, center, n, model_id);
        const std::string id = graphs.create(graph);
        send_json(res, 201, json{{"graph_id", id}, {"graph", graph}});
    }));

    http.Get(R"(/graphs/([^/]+))", guarded([this](const Request &req, Response &res) {
        send_json(res, 200, json(graphs.snapshot(req.matches[1])));
    }));

    auto graph_op = [this](bool expand) {
        return guarded([this, expand](const Request &req, Response &res) {
            const std::string id = req.matches[1];
            const json body = parse_body(req);
            const auto token = body_field<std::string>(body, "token");
            const std::size_t n = positive_field(body, "n");
            const SimilarityGraph current = graphs.snapshot(id);
            const auto model = models.get(current.model_id());
            const SimilarityGraph updated = graphs.mutate(id, [&](SimilarityGraph &g) {
                if (expand)
                    expand_node(g, *model, token, n);
                else
                    add_word(g, *model, token, n);
            });
            send_json(res, 200, json(updated));
        });
    };
    http.Post(R"(/graphs/([^/]+)/expand)", graph_op(true));
    http.Post(R"(/graphs/([^/]+)/add)", graph_op(false));

    http.Get("/corpora", guarded([this](const Request &, Response &res) { send_json(res, 200, json(corpora.list())); }));
    http.Post("/corpora", guarded([this](const Request &req, Response &res) {
        send_json(res, 201, register_corpus(parse_body(req)));
    }));

    http.Post("/train", guarded([this](const Request &req, Response &res) {
        send_json(res, 202, submit_train(parse_body(req)));
    }));

    http.Get("/compare", guarded([this](const Request &req, Response &res) {
        const auto wf = models.get(required_param(req, "model_a"));
        const auto lm = models.get(required_param(req, "model_b"));
        const auto wordform = required_param(req, "wordform");
        const auto lemma = req.has_param("lemma") ? req.get_param_value("lemma") : wordform;
        std::size_t k = count_param(req, "k", 10);
        if (k == 0) throw_invalid_argument("k must be at least 1");
        k = std::min(k, config.max_k);
        send_json(res, 200, json(trainer::compare_neighborhoods(*wf, *lm, wordform, lemma, k)));
    }));
}

json Server::Impl::submit_tsne(const std::string &model_id, const json &body) {
    const auto model = models.get(model_id);
    const int modes = static_cast<int>(body.contains("tokens")) + static_cast<int>(body.contains("top_frequent_n")) +
                      static_cast<int>(body.contains("similar_to"));
    if (modes != 1) {
        throw Error(ErrorCode::bad_selection,
                    "exactly one of 'tokens', 'top_frequent_n' or 'similar_to' (+ 'n') is required");
    }
    if (body.contains("n") && !body.contains("similar_to"))
        throw Error(ErrorCode::bad_selection, "'n' is only valid together with 'similar_to'");

    std::vector<std::string> tokens;
    if (body.contains("tokens")) {
        if (!body["tokens"].is_array()) throw Error(ErrorCode::bad_selection, "'tokens' must be an array");
        for (const auto &t : body["tokens"]) {
            if (!t.is_string()) throw Error(ErrorCode::bad_selection, "'tokens' must hold strings");
            tokens.push_back(model->token(resolve_token(*model, t.get<std::string>())));
        }
    } else if (body.contains("top_frequent_n")) {
        tokens = top_n_frequent(*model, positive_field(body, "top_frequent_n"));
    } else {
        const auto query = body_field<std::string>(body, "similar_to");
        if (!body.contains("n")) throw Error(ErrorCode::bad_selection, "'similar_to' needs 'n'");
        const std::size_t n = positive_field(body, "n");
        if (n == 0) throw Error(ErrorCode::bad_selection, "'n' must be positive");
        tokens.push_back(model->token(resolve_token(*model, query)));
        for (auto &nb : top_k_similar(*model, query, std::min(n, config.max_k))) tokens.push_back(std::move(nb.token));
    }

    tsne::Config cfg;
    if (body.contains("config")) tsne::from_json(body["config"], cfg);
    tsne::validate(cfg);
    const std::size_t n = tokens.size();
    if (n < 4) throw_invalid_argument("t-SNE needs at least 4 tokens, selection has " + std::to_string(n));
    if (!(cfg.perplexity < static_cast<double>(n - 1) / 3.0)) {
        throw Error(ErrorCode::perplexity_too_large, "perplexity " + std::to_string(cfg.perplexity) +
                                                         " must be below (n - 1) / 3 for " + std::to_string(n) +
                                                         " points");
    }

    auto x = std::make_shared<tsne::Matrix>(gather_rows(*model, tokens));
    const std::string id = jobs.submit(JobKind::tsne, [x, tokens, cfg](std::stop_token stop, const JobContext &ctx) mutable {
        json history = json::array();
        tsne::Observer obs;
        obs.on_cost = [&](const tsne::CostSample &s) {
            history.push_back(s);
            ctx.set_progress(json{{"iteration", s.iteration}, {"n_iter", cfg.n_iter}, {"kl_history", history}});
        };
        obs.should_stop = [&] { return stop.stop_requested(); };
        ctx.set_progress(json{{"iteration", 0}, {"n_iter", cfg.n_iter}, {"kl_history", history}});
        return json(tsne::run(*x, std::move(tokens), cfg, obs));
    });
    return json(jobs.get(id));
}

json Server::Impl::register_corpus(const json &body) {
    CorpusEntry entry;
    entry.id = body_field<std::string>(body, "id");
    entry.format = parse_corpus_format(body.value("format", std::string("annotated")));
    if (body.contains("path")) {
        entry.path = body_field<std::string>(body, "path");
        if (!std::filesystem::exists(entry.path))
            throw Error(ErrorCode::unknown_corpus, "corpus file not found: " + entry.path.string());
    } else if (body.contains("text")) {
        const auto text = body_field<std::string>(body, "text");
        const auto dir = config.data_dir / "corpora";
        std::filesystem::create_directories(dir);
        std::size_t n;
        {
            std::lock_guard lock(upload_mutex);
            n = next_upload++;
        }
        entry.path = dir / ("upload-" + std::to_string(n) + ".txt");
        std::ofstream out(entry.path, std::ios::binary);
        out << text;
        if (!out) throw Error(ErrorCode::io_failure, "cannot store uploaded corpus");
    } else {
        throw_invalid_argument("corpus needs 'path' or 'text'");
    }
    corpora.add(entry);
    return json(entry);
}

json Server::Impl::submit_train(const json &body) {
    const auto corpus_ref = body_field<std::string>(body, "corpus_ref");
    trainer::TrainConfig cfg;
    if (body.contains("config")) trainer::from_json(body["config"], cfg);
    if (body.contains("feature")) cfg.feature = parse_feature_kind(body_field<std::string>(body, "feature"));
    trainer::validate(cfg);
    const CorpusEntry corpus = corpora.get(corpus_ref);
    if (corpus.format == CorpusFormat::plain && cfg.feature != FeatureKind::wordform)
        throw_invalid_argument("plain-text corpora only support the wordform feature");

    std::string model_id = body.value("model_id", std::string());
    if (!model_id.empty() && models.contains(model_id))
        throw_invalid_argument("model id '" + model_id + "' is already registered");

    const auto out_dir = config.data_dir / "models";
    auto *registry = &models;
    auto job_id = std::make_shared<std::string>();
    const std::string id = jobs.submit(JobKind::train, [=](std::stop_token stop, const JobContext &ctx) {
        trainer::TokenStream tokens = corpus.format == CorpusFormat::plain
                                          ? trainer::load_plain(corpus.path)
                                          : trainer::extract_tokens(trainer::load_annotated(corpus.path), cfg.feature);
        trainer::TrainObserver obs;
        obs.on_progress = [&](const trainer::TrainProgress &p) { ctx.set_progress(json(p)); };
        obs.should_stop = [&] { return stop.stop_requested(); };
        EmbeddingModel trained = trainer::train(tokens, cfg, obs);
        const std::string mid = model_id.empty() ? "trained-" + *job_id : model_id;
        std::filesystem::create_directories(out_dir);
        const auto path = out_dir / (mid + ".bin");
        save_binary(trained, path);
        const auto entry = registry->add(mid, std::make_shared<const EmbeddingModel>(std::move(trained)), path.string());
        return json{{"model_id", mid}, {"path", path.string()}, {"entry", entry}};
    });
    *job_id = id;
    return json(jobs.get(id));
}

Server::Server(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Server::~Server() { stop(); }

ModelRegistry &Server::models() { return impl_->models; }
CorpusRegistry &Server::corpora() { return impl_->corpora; }
JobManager &Server::jobs() { return impl_->jobs; }
GraphStore &Server::graphs() { return impl_->graphs; }
const ServiceConfig &Server::config() const { return impl_->config; }

void Server::load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open service config: " + path.string());
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception &e) {
        throw Error(ErrorCode::malformed_json, "invalid service config " + path.string() + ": " + e.what());
    }
    const auto base = path.parent_path();
    auto resolve = [&](const std::string &p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    const json model_list = cfg.is_array() ? cfg : cfg.value("models", json::array());
    for (const auto &m : model_list) {
        std::optional<std::filesystem::path> meta;
        if (m.contains("meta_path") && !m["meta_path"].is_null()) meta = resolve(m["meta_path"].get<std::string>());
        impl_->models.register_file(m.at("id").get<std::string>(), resolve(m.at("path").get<std::string>()), meta);
    }
    if (cfg.is_object() && cfg.contains("corpora")) {
        for (const auto &c : cfg["corpora"]) {
            impl_->corpora.add({c.at("id").get<std::string>(), resolve(c.at("path").get<std::string>()),
                                parse_corpus_format(c.value("format", std::string("annotated")))});
        }
    }
}

int Server::bind(const std::string &host, int port) {
    if (port == 0) {
        const int bound = impl_->http.bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorCode::io_failure, "cannot bind " + host);
        return bound;
    }
    if (!impl_->http.bind_to_port(host, port))
        throw Error(ErrorCode::io_failure, "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void Server::serve() { impl_->http.listen_after_bind(); }

int Server::start(const std::string &host, int port) {
    const int bound = bind(host, port);
    impl_->thread = std::thread([this] { serve(); });
    impl_->http.wait_until_ready();
    return bound;
}

void Server::stop() {
    if (!impl_) return;
    impl_->http.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

} // namespace embex::service
