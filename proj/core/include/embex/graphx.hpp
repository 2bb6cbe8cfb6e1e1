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

#pragma once

#include "embex/simquery.hpp"
#include "embex/vstore.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace embex {

struct GraphNode {
    std::string token;
    bool is_seed = false;

    bool operator==(const GraphNode &) const = default;
};

/// Undirected; stored with the endpoints in first-insertion orientation.
struct GraphEdge {
    std::string a;
    std::string b;
    double weight = 0.0;

    bool operator==(const GraphEdge &) const = default;
};

struct ExpansionRecord {
    std::string op;   // "build", "expand" or "add"
    std::string token;
    std::size_t n = 0;

    bool operator==(const ExpansionRecord &) const = default;
};

/// Token-unique similarity graph grown by user-driven expansion. Nodes and
/// edges are only ever added; re-deriving an existing pair keeps the
/// original edge.
class SimilarityGraph {
public:
    static constexpr std::size_t kDefaultNodeCap = 5000;

    explicit SimilarityGraph(std::string model_id = {}, std::size_t node_cap = kDefaultNodeCap);

    const std::vector<GraphNode> &nodes() const noexcept { return nodes_; }
    const std::vector<GraphEdge> &edges() const noexcept { return edges_; }
    const std::vector<ExpansionRecord> &log() const noexcept { return log_; }
    const std::string &model_id() const noexcept { return model_id_; }
    std::size_t node_cap() const noexcept { return node_cap_; }

    bool has_node(std::string_view token) const;
    bool has_edge(std::string_view a, std::string_view b) const;
    const GraphNode *node(std::string_view token) const;

    /// Adds the node if absent; returns true when it was inserted.
    bool add_node(std::string token, bool is_seed);
    void mark_seed(std::string_view token);
    /// Rejects self-loops and endpoints that are not nodes; returns false
    /// when the unordered pair already has an edge.
    bool add_edge(const std::string &a, const std::string &b, double weight);
    void record(ExpansionRecord rec) { log_.push_back(std::move(rec)); }

    /// Structural equality (nodes, edges, model id); the log is ignored.
    bool same_topology(const SimilarityGraph &other) const;

private:
    static std::pair<std::string, std::string> key(std::string_view a, std::string_view b);

    std::string model_id_;
    std::size_t node_cap_;
    std::vector<GraphNode> nodes_;
    std::unordered_map<std::string, std::size_t> node_index_;
    std::vector<GraphEdge> edges_;
    std::set<std::pair<std::string, std::string>> edge_keys_;
    std::vector<ExpansionRecord> log_;
};

/// Seed node `center` plus its top-n neighbors, one edge per neighbor
/// weighted by cosine. model_id defaults to the model's source.
SimilarityGraph build_star(const EmbeddingModel &model, std::string_view center, std::size_t n,
                           std::string model_id = {});

/// Merges token's top-n neighbors into the graph. Throws NodeNotInGraph,
/// OutOfVocabulary, or GraphCapExceeded (graph left untouched).
SimilarityGraph &expand_node(SimilarityGraph &graph, const EmbeddingModel &model,
                             std::string_view token, std::size_t n);

/// Inserts token as a seed (if absent) and expands it when n > 0.
SimilarityGraph &add_word(SimilarityGraph &graph, const EmbeddingModel &model, std::string_view token,
                          std::size_t n);

/// Undirected components; components ordered by their earliest node, nodes
/// within a component in insertion order.
std::vector<std::vector<std::string>> connected_components(const SimilarityGraph &graph);

} // namespace embex
