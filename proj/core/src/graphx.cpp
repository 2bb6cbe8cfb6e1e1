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

#include "embex/graphx.hpp"

#include "embex/error.hpp"

#include <algorithm>
#include <deque>

namespace embex {

SimilarityGraph::SimilarityGraph(std::string model_id, std::size_t node_cap)
    : model_id_(std::move(model_id)), node_cap_(node_cap) {}

std::pair<std::string, std::string> SimilarityGraph::key(std::string_view a, std::string_view b) {
    if (b < a) std::swap(a, b);
    return {std::string(a), std::string(b)};
}

bool SimilarityGraph::has_node(std::string_view token) const {
    return node_index_.count(std::string(token)) != 0;
}

const GraphNode *SimilarityGraph::node(std::string_view token) const {
    auto it = node_index_.find(std::string(token));
    return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

bool SimilarityGraph::has_edge(std::string_view a, std::string_view b) const {
    return edge_keys_.count(key(a, b)) != 0;
}

bool SimilarityGraph::add_node(std::string token, bool is_seed) {
    if (auto it = node_index_.find(token); it != node_index_.end()) {
        if (is_seed) nodes_[it->second].is_seed = true;
        return false;
    }
    if (nodes_.size() >= node_cap_) {
        throw Error(ErrorCode::graph_cap_exceeded,
                    "graph already holds the maximum of " + std::to_string(node_cap_) + " nodes");
    }
    node_index_.emplace(token, nodes_.size());
    nodes_.push_back({std::move(token), is_seed});
    return true;
}

void SimilarityGraph::mark_seed(std::string_view token) {
    if (auto it = node_index_.find(std::string(token)); it != node_index_.end())
        nodes_[it->second].is_seed = true;
}

bool SimilarityGraph::add_edge(const std::string &a, const std::string &b, double weight) {
    if (a == b) throw_invalid_argument("self-loop on '" + a + "'");
    if (!has_node(a) || !has_node(b)) {
        throw Error(ErrorCode::node_not_in_graph, "edge endpoint missing from graph")
            .with_token(has_node(a) ? b : a);
    }
    if (!edge_keys_.insert(key(a, b)).second) return false;
    edges_.push_back({a, b, weight});
    return true;
}

bool SimilarityGraph::same_topology(const SimilarityGraph &other) const {
    return model_id_ == other.model_id_ && nodes_ == other.nodes_ && edges_ == other.edges_;
}

namespace {

// Applies a neighbor list around `token` atomically with respect to the cap.
void merge_neighbors(SimilarityGraph &graph, const std::string &token,
                     const std::vector<Neighbor> &neighbors) {
    std::size_t fresh = 0;
    for (const auto &nb : neighbors)
        if (!graph.has_node(nb.token)) ++fresh;
    if (graph.nodes().size() + fresh > graph.node_cap()) {
        throw Error(ErrorCode::graph_cap_exceeded,
                    "expanding '" + token + "' would exceed the " + std::to_string(graph.node_cap()) +
                        "-node cap")
            .with_token(token);
    }
    for (const auto &nb : neighbors) {
        graph.add_node(nb.token, false);
        graph.add_edge(token, nb.token, nb.score);
    }
}

std::vector<Neighbor> neighbors_of(const EmbeddingModel &model, const std::string &token, std::size_t n) {
    if (n == 0) return {};
    if (!model.contains(token)) throw_out_of_vocabulary(token);
    return top_k_similar(model, token, n, QueryOptions{false});
}

} // namespace

SimilarityGraph build_star(const EmbeddingModel &model, std::string_view center, std::size_t n,
                           std::string model_id) {
    if (n == 0) throw_invalid_argument("n must be at least 1");
    const std::string token = model.token(resolve_token(model, center));
    SimilarityGraph graph(model_id.empty() ? model.meta().source : std::move(model_id));
    const auto neighbors = neighbors_of(model, token, n);
    graph.add_node(token, true);
    merge_neighbors(graph, token, neighbors);
    graph.record({"build", token, n});
    return graph;
}

SimilarityGraph &expand_node(SimilarityGraph &graph, const EmbeddingModel &model,
                             std::string_view token, std::size_t n) {
    const std::string tok(token);
    if (!graph.has_node(tok)) {
        throw Error(ErrorCode::node_not_in_graph, "'" + tok + "' is not a node of this graph").with_token(tok);
    }
    const auto neighbors = neighbors_of(model, tok, n);
    merge_neighbors(graph, tok, neighbors);
    graph.record({"expand", tok, n});
    return graph;
}

SimilarityGraph &add_word(SimilarityGraph &graph, const EmbeddingModel &model, std::string_view token,
                          std::size_t n) {
    const std::string tok = model.token(resolve_token(model, token));
    const auto neighbors = neighbors_of(model, tok, n);
    std::size_t fresh = graph.has_node(tok) ? 0 : 1;
    for (const auto &nb : neighbors)
        if (!graph.has_node(nb.token) && nb.token != tok) ++fresh;
    if (graph.nodes().size() + fresh > graph.node_cap()) {
        throw Error(ErrorCode::graph_cap_exceeded,
                    "adding '" + tok + "' would exceed the " + std::to_string(graph.node_cap()) + "-node cap")
            .with_token(tok);
    }
    graph.add_node(tok, true);
    merge_neighbors(graph, tok, neighbors);
    graph.record({"add", tok, n});
    return graph;
}

std::vector<std::vector<std::string>> connected_components(const SimilarityGraph &graph) {
    const auto &nodes = graph.nodes();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i].token, i);
    std::vector<std::vector<std::size_t>> adj(nodes.size());
    for (const auto &e : graph.edges()) {
        const std::size_t a = index.at(e.a), b = index.at(e.b);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> comp(nodes.size(), -1);
    std::vector<std::vector<std::string>> out;
    for (std::size_t s = 0; s < nodes.size(); ++s) {
        if (comp[s] >= 0) continue;
        const int id = static_cast<int>(out.size());
        std::vector<std::size_t> members;
        std::deque<std::size_t> queue{s};
        comp[s] = id;
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            members.push_back(u);
            for (std::size_t v : adj[u]) {
                if (comp[v] < 0) {
                    comp[v] = id;
                    queue.push_back(v);
                }
            }
        }
        std::sort(members.begin(), members.end());
        std::vector<std::string> tokens;
        tokens.reserve(members.size());
        for (std::size_t m : members) tokens.push_back(nodes[m].token);
        out.push_back(std::move(tokens));
    }
    return out;
}

} // namespace embex
