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

#include "embex/serialize.hpp"

#include "embex/error.hpp"
#include "embex/text.hpp"

namespace embex {

namespace {

template <typename T> void maybe(const json &j, const char *key, T &out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

} // namespace

void to_json(json &j, const ModelMeta &m) {
    j = json{{"dim", m.dim},
             {"feature_kind", to_string(m.feature_kind)},
             {"frequency_threshold", m.frequency_threshold},
             {"window", m.window ? json(*m.window) : json(nullptr)},
             {"source", m.source}};
}

void from_json(const json &j, ModelMeta &m) {
    maybe(j, "dim", m.dim);
    if (auto it = j.find("feature_kind"); it != j.end() && !it->is_null())
        m.feature_kind = parse_feature_kind(it->get<std::string>());
    maybe(j, "frequency_threshold", m.frequency_threshold);
    if (auto it = j.find("window"); it != j.end() && !it->is_null()) m.window = it->get<int>();
    maybe(j, "source", m.source);
}

void to_json(json &j, const ModelInfo &info) {
    j = info.meta;
    j["vocab_size"] = info.vocab_size;
    j["zero_rows"] = info.zero_rows;
}

void to_json(json &j, const Neighbor &n) { j = json{{"token", n.token}, {"score", n.score}}; }

void from_json(const json &j, Neighbor &n) {
    n.token = j.at("token").get<std::string>();
    n.score = j.at("score").get<double>();
}

void to_json(json &j, const TracedWord &w) { j = json{{"token", w.token}, {"vector", w.vector}}; }

void to_json(json &j, const AnalogyTrace &t) {
    j = json{{"a", t.a},
             {"b", t.b},
             {"c", t.c},
             {"a_minus_b", t.a_minus_b},
             {"query", t.query},
             {"result", t.result},
             {"result_vector", t.result_vector},
             {"residual", t.residual},
             {"cos_query_result", t.cos_query_result}};
}

void to_json(json &j, const AnalogyResult &r) { j = json{{"neighbors", r.neighbors}, {"trace", r.trace}}; }

void to_json(json &j, const GraphNode &n) { j = json{{"token", n.token}, {"is_seed", n.is_seed}}; }
void to_json(json &j, const GraphEdge &e) { j = json{{"a", e.a}, {"b", e.b}, {"weight", e.weight}}; }
void to_json(json &j, const ExpansionRecord &r) { j = json{{"op", r.op}, {"token", r.token}, {"n", r.n}}; }

void to_json(json &j, const SimilarityGraph &g) {
    j = json{{"nodes", g.nodes()},
             {"edges", g.edges()},
             {"provenance", {{"model_id", g.model_id()}, {"node_cap", g.node_cap()}, {"expansions", g.log()}}}};
}

void from_json(const json &j, SimilarityGraph &g) {
    const json &prov = j.contains("provenance") ? j.at("provenance") : json::object();
    SimilarityGraph out(prov.value("model_id", std::string()),
                        prov.value("node_cap", SimilarityGraph::kDefaultNodeCap));
    for (const auto &n : j.at("nodes")) out.add_node(n.at("token").get<std::string>(), n.value("is_seed", false));
    for (const auto &e : j.at("edges"))
        out.add_edge(e.at("a").get<std::string>(), e.at("b").get<std::string>(), e.at("weight").get<double>());
    if (prov.contains("expansions")) {
        for (const auto &r : prov.at("expansions"))
            out.record({r.at("op").get<std::string>(), r.at("token").get<std::string>(), r.at("n").get<std::size_t>()});
    }
    g = std::move(out);
}

json vector_json(std::span<const float> v) {
    json arr = json::array();
    for (float x : v) arr.push_back(static_cast<double>(x));
    return arr;
}

namespace tsne {

void to_json(json &j, const Config &c) {
    j = json{{"perplexity", c.perplexity},
             {"n_iter", c.n_iter},
             {"learning_rate", c.learning_rate},
             {"early_exaggeration", c.early_exaggeration},
             {"exaggeration_iters", c.exaggeration_iters},
             {"initial_momentum", c.initial_momentum},
             {"final_momentum", c.final_momentum},
             {"momentum_switch_iter", c.momentum_switch_iter},
             {"theta", c.theta},
             {"seed", c.seed},
             {"pca", c.pca}};
}

void from_json(const json &j, Config &c) {
    if (!j.is_object()) throw_invalid_argument("t-SNE config must be a JSON object");
    maybe(j, "perplexity", c.perplexity);
    maybe(j, "n_iter", c.n_iter);
    maybe(j, "learning_rate", c.learning_rate);
    maybe(j, "early_exaggeration", c.early_exaggeration);
    maybe(j, "exaggeration_iters", c.exaggeration_iters);
    maybe(j, "initial_momentum", c.initial_momentum);
    maybe(j, "final_momentum", c.final_momentum);
    maybe(j, "momentum_switch_iter", c.momentum_switch_iter);
    maybe(j, "theta", c.theta);
    maybe(j, "seed", c.seed);
    maybe(j, "pca", c.pca);
}

void to_json(json &j, const CostSample &s) { j = json{{"iteration", s.iteration}, {"kl", s.kl}}; }

void to_json(json &j, const Layout &l) {
    json coords = json::array();
    for (std::size_t i = 0; i < l.coords.rows; ++i) coords.push_back({l.coords(i, 0), l.coords(i, 1)});
    j = json{{"tokens", l.tokens},
             {"coords", std::move(coords)},
             {"config", l.config},
             {"kl_history", l.kl_history},
             {"method", l.method}};
}

void from_json(const json &j, Layout &l) {
    l.tokens = j.at("tokens").get<std::vector<std::string>>();
    const auto &coords = j.at("coords");
    l.coords = Matrix(coords.size(), 2);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        l.coords(i, 0) = coords[i].at(0).get<double>();
        l.coords(i, 1) = coords[i].at(1).get<double>();
    }
    l.config = Config{};
    if (j.contains("config")) from_json(j.at("config"), l.config);
    l.kl_history.clear();
    if (j.contains("kl_history")) {
        for (const auto &s : j.at("kl_history"))
            l.kl_history.push_back({s.at("iteration").get<int>(), s.at("kl").get<double>()});
    }
    l.method = j.value("method", std::string());
}

std::string to_tsv(const Layout &layout) {
    std::string out;
    for (std::size_t i = 0; i < layout.tokens.size(); ++i) {
        out += layout.tokens[i];
        out += '\t';
        out += text::format_shortest(layout.coords(i, 0));
        out += '\t';
        out += text::format_shortest(layout.coords(i, 1));
        out += '\n';
    }
    return out;
}

} // namespace tsne

namespace trainer {

void to_json(json &j, const TrainConfig &c) {
    j = json{{"model_type", to_string(c.model_type)},
             {"dim", c.dim},
             {"window", c.window},
             {"min_count", c.min_count},
             {"negatives", c.negatives},
             {"epochs", c.epochs},
             {"initial_lr", c.initial_lr},
             {"subsample_t", c.subsample_t},
             {"seed", c.seed},
             {"feature", to_string(c.feature)}};
}

namespace {
// Signed read so that "dim": 0 or -1 reaches validate() instead of wrapping.
template <typename T> void maybe_count(const json &j, const char *key, T &out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
        const auto v = it->get<std::int64_t>();
        if (v < 0) throw_invalid_argument(std::string(key) + " must be non-negative");
        out = static_cast<T>(v);
    }
}
} // namespace

void from_json(const json &j, TrainConfig &c) {
    if (!j.is_object()) throw_invalid_argument("training config must be a JSON object");
    if (auto it = j.find("model_type"); it != j.end() && !it->is_null())
        c.model_type = parse_model_type(it->get<std::string>());
    maybe_count(j, "dim", c.dim);
    maybe_count(j, "window", c.window);
    maybe_count(j, "min_count", c.min_count);
    maybe_count(j, "negatives", c.negatives);
    maybe_count(j, "epochs", c.epochs);
    maybe(j, "initial_lr", c.initial_lr);
    maybe(j, "subsample_t", c.subsample_t);
    maybe_count(j, "seed", c.seed);
    if (auto it = j.find("feature"); it != j.end() && !it->is_null())
        c.feature = parse_feature_kind(it->get<std::string>());
}

void to_json(json &j, const TrainProgress &p) {
    j = json{{"epoch", p.epoch},
             {"learning_rate", p.learning_rate},
             {"loss", p.loss},
             {"words_processed", p.words_processed},
             {"words_total", p.words_total}};
}

void to_json(json &j, const NeighborhoodComparison &c) {
    j = json{{"wf_neighbors", c.wordform_neighbors}, {"lm_neighbors", c.lemma_neighbors}, {"overlap", c.overlap}};
}

} // namespace trainer

} // namespace embex
