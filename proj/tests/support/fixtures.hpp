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

#include "embex/graphx.hpp"
#include "embex/trainer.hpp"
#include "embex/tsne.hpp"
#include "embex/vstore.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace embex::testing {

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;
    const std::filesystem::path &path() const { return path_; }
    std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Tokens "t0000", "t0001", ... in storage order.
std::vector<std::string> numbered_tokens(std::size_t n, const std::string &prefix = "t");

/// Gaussian entries; every `dup_every`-th row (when non-zero) copies an
/// earlier row so exact score ties occur.
EmbeddingModel random_model(std::mt19937_64 &rng, std::size_t n, std::size_t dim, std::size_t dup_every = 0);

/// Brute-force reference: scores every non-excluded, non-zero row with a
/// plain sequential dot product over the unit rows and fully sorts.
std::vector<Neighbor> knn_oracle(const EmbeddingModel &model, const std::string &token, std::size_t k);

tsne::Matrix gaussian_matrix(std::mt19937_64 &rng, std::size_t rows, std::size_t cols, double sigma = 1.0);

/// Two clusters of `per` points each in `dim` dimensions, centers `sep`
/// sigma apart. Labels are 0 for the first `per` rows, 1 after.
tsne::Matrix two_clusters(std::mt19937_64 &rng, std::size_t per, std::size_t dim, double sep);

/// Mean silhouette coefficient of a 2D layout under the given labels.
double silhouette(const tsne::Matrix &y, const std::vector<int> &labels);

/// Connected-component count by union-find over the graph's edges.
std::size_t union_find_components(const SimilarityGraph &graph);

/// Sentences from a first-order Markov chain over `vocab` words in which
/// every occurrence of `twin_b` is produced by drawing `twin_a` and
/// replacing it with probability one half, so both share one context
/// distribution.
trainer::TokenStream twin_corpus(std::uint64_t seed, std::size_t vocab, std::size_t tokens,
                                 const std::string &twin_a, const std::string &twin_b);

/// Annotated corpus generated from a Markov chain over lemmas; each lemma is
/// realized as one of four inflected forms (stem, stem+"ul", stem+"ele",
/// stem+"ului") chosen independently of context. Lemmas are capitalized so
/// lemma_lower differs from lemma_cased.
trainer::AnnotatedCorpus inflected_corpus(std::uint64_t seed, std::size_t lemmas, std::size_t tokens);

/// The four surface forms of a stem.
std::vector<std::string> inflections(const std::string &stem);

/// Stem of lemma i in inflected_corpus.
std::string stem_name(std::size_t i);

} // namespace embex::testing
