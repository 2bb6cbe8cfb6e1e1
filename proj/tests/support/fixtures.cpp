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

#include "fixtures.hpp"

#include "embex/simquery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unistd.h>

namespace embex::testing {

TempDir::TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "embex-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::vector<std::string> numbered_tokens(std::size_t n, const std::string &prefix) {
    std::vector<std::string> out;
    out.reserve(n);
    char buf[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%04zu", i);
        out.push_back(prefix + buf);
    }
    return out;
}

EmbeddingModel random_model(std::mt19937_64 &rng, std::size_t n, std::size_t dim, std::size_t dup_every) {
    std::normal_distribution<float> g(0.0f, 1.0f);
    std::vector<float> m(n * dim);
    for (auto &v : m) v = g(rng);
    if (dup_every) {
        for (std::size_t i = dup_every; i < n; i += dup_every) {
            const std::size_t src = rng() % i;
            std::copy_n(m.begin() + static_cast<std::ptrdiff_t>(src * dim), dim,
                        m.begin() + static_cast<std::ptrdiff_t>(i * dim));
        }
    }
    // Shuffled names so storage order and tie order disagree.
    auto tokens = numbered_tokens(n);
    std::shuffle(tokens.begin(), tokens.end(), rng);
    return EmbeddingModel(std::move(tokens), std::move(m), dim);
}

std::vector<Neighbor> knn_oracle(const EmbeddingModel &model, const std::string &token, std::size_t k) {
    const std::size_t q = *model.index_of(token);
    const auto qu = model.unit_row(q);
    std::vector<Neighbor> all;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (i == q || model.is_zero_row(i)) continue;
        const auto r = model.unit_row(i);
        double s = 0.0;
        for (std::size_t d = 0; d < model.dim(); ++d) s += static_cast<double>(r[d]) * qu[d];
        all.push_back({model.token(i), std::clamp(s, -1.0, 1.0)});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor &a, const Neighbor &b) {
        if (a.score != b.score) return a.score > b.score;
        return a.token < b.token;
    });
    all.resize(std::min(k, all.size()));
    return all;
}

tsne::Matrix gaussian_matrix(std::mt19937_64 &rng, std::size_t rows, std::size_t cols, double sigma) {
    std::normal_distribution<double> g(0.0, sigma);
    tsne::Matrix x(rows, cols);
    for (auto &v : x.data) v = g(rng);
    return x;
}

tsne::Matrix two_clusters(std::mt19937_64 &rng, std::size_t per, std::size_t dim, double sep) {
    tsne::Matrix x = gaussian_matrix(rng, 2 * per, dim);
    // Centers at 0 and at sep along a random unit direction.
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> dir(dim);
    double norm = 0.0;
    for (auto &v : dir) {
        v = g(rng);
        norm += v * v;
    }
    norm = std::sqrt(norm);
    for (std::size_t i = per; i < 2 * per; ++i)
        for (std::size_t d = 0; d < dim; ++d) x(i, d) += sep * dir[d] / norm;
    return x;
}

double silhouette(const tsne::Matrix &y, const std::vector<int> &labels) {
    const std::size_t n = y.rows;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double same = 0.0, other = 0.0;
        std::size_t ns = 0, no = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double d2 = 0.0;
            for (std::size_t c = 0; c < y.cols; ++c) d2 += (y(i, c) - y(j, c)) * (y(i, c) - y(j, c));
            const double d = std::sqrt(d2);
            if (labels[i] == labels[j]) {
                same += d;
                ++ns;
            } else {
                other += d;
                ++no;
            }
        }
        const double a = ns ? same / ns : 0.0, b = no ? other / no : 0.0;
        const double m = std::max(a, b);
        total += m > 0.0 ? (b - a) / m : 0.0;
    }
    return total / static_cast<double>(n);
}

std::size_t union_find_components(const SimilarityGraph &graph) {
    std::unordered_map<std::string, std::size_t> id;
    for (const auto &node : graph.nodes()) id.emplace(node.token, id.size());
    std::vector<std::size_t> parent(id.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t count = id.size();
    for (const auto &e : graph.edges()) {
        const auto ra = find(id.at(e.a)), rb = find(id.at(e.b));
        if (ra != rb) {
            parent[ra] = rb;
            --count;
        }
    }
    return count;
}

namespace {

// Random sparse transition table: each state has `fanout` successors.
std::vector<std::vector<std::size_t>> transitions(std::mt19937_64 &rng, std::size_t states, std::size_t fanout) {
    std::vector<std::vector<std::size_t>> next(states);
    for (auto &row : next)
        for (std::size_t f = 0; f < fanout; ++f) row.push_back(rng() % states);
    return next;
}

} // namespace

trainer::TokenStream twin_corpus(std::uint64_t seed, std::size_t vocab, std::size_t tokens,
                                 const std::string &twin_a, const std::string &twin_b) {
    std::mt19937_64 rng(seed);
    const auto names = numbered_tokens(vocab, "w");
    const auto next = transitions(rng, vocab, 5);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    trainer::TokenStream out;
    std::size_t emitted = 0;
    while (emitted < tokens) {
        std::vector<std::string> sentence;
        std::size_t state = rng() % vocab;
        for (int t = 0; t < 20; ++t) {
            if (state == 0)
                sentence.push_back(coin(rng) < 0.5 ? twin_a : twin_b);
            else
                sentence.push_back(names[state]);
            state = next[state][rng() % next[state].size()];
        }
        emitted += sentence.size();
        out.push_back(std::move(sentence));
    }
    return out;
}

std::string stem_name(std::size_t i) { return "ș" + std::to_string(i) + "a"; }

std::vector<std::string> inflections(const std::string &stem) {
    return {stem, stem + "ul", stem + "ele", stem + "ului"};
}

trainer::AnnotatedCorpus inflected_corpus(std::uint64_t seed, std::size_t lemmas, std::size_t tokens) {
    std::mt19937_64 rng(seed);
    const auto next = transitions(rng, lemmas, 5);
    trainer::AnnotatedCorpus corpus;
    std::size_t emitted = 0;
    while (emitted < tokens) {
        trainer::AnnotatedSentence sentence;
        std::size_t state = rng() % lemmas;
        for (int t = 0; t < 20; ++t) {
            const std::string stem = stem_name(state);
            const auto forms = inflections(stem);
            // Capital "Ș" lemma; wordforms keep the lowercase stem.
            sentence.push_back({forms[rng() % forms.size()], "Ș" + stem.substr(std::string("ș").size()), "NOUN"});
            state = next[state][rng() % next[state].size()];
        }
        emitted += sentence.size();
        corpus.sentences.push_back(std::move(sentence));
    }
    return corpus;
}

} // namespace embex::testing
