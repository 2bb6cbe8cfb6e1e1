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
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace embex::trainer {

struct AnnotatedToken {
    std::string wordform;
    std::string lemma;
    std::string pos;

    bool operator==(const AnnotatedToken &) const = default;
};

using AnnotatedSentence = std::vector<AnnotatedToken>;

struct AnnotatedCorpus {
    std::vector<AnnotatedSentence> sentences;

    std::size_t token_count() const noexcept;
};

/// Sentences of feature tokens; windows never cross sentence boundaries.
using TokenStream = std::vector<std::vector<std::string>>;

std::size_t token_count(const TokenStream &stream) noexcept;

/// "wordform<TAB>lemma<TAB>pos" per line, blank line between sentences.
/// Throws Error(malformed_record) with the 1-based line number.
AnnotatedCorpus read_annotated(std::istream &in);
AnnotatedCorpus load_annotated(const std::filesystem::path &path);

/// One sentence per line, whitespace-separated wordforms.
TokenStream read_plain(std::istream &in);
TokenStream load_plain(const std::filesystem::path &path);

/// One output token per input token: the wordform, the lemma verbatim, or
/// the Unicode-lowercased lemma.
TokenStream extract_tokens(const AnnotatedCorpus &corpus, FeatureKind feature);

struct VocabEntry {
    std::string token;
    std::uint64_t count = 0;

    bool operator==(const VocabEntry &) const = default;
};

/// Frequency-ordered vocabulary (count descending, then token ascending).
class Vocab {
public:
    Vocab() = default;
    explicit Vocab(std::vector<VocabEntry> entries);

    const std::vector<VocabEntry> &entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    std::uint64_t total() const noexcept { return total_; }
    /// -1 when absent.
    std::int64_t index_of(const std::string &token) const;

private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    std::uint64_t total_ = 0;
};

/// Drops tokens seen fewer than min_count times; throws Error(empty_vocab)
/// when nothing survives.
Vocab build_vocab(const TokenStream &tokens, std::uint64_t min_count);

/// Negative-sampling noise distribution, proportional to count^power.
std::vector<double> noise_distribution(const Vocab &vocab, double power = 0.75);

enum class ModelType { cbow, skipgram };

std::string_view to_string(ModelType type) noexcept;
ModelType parse_model_type(std::string_view name);

struct TrainConfig {
    ModelType model_type = ModelType::skipgram;
    std::size_t dim = 300;
    std::size_t window = 5;
    std::uint64_t min_count = 5;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double initial_lr = 0.025;
    double subsample_t = 1e-3;
    std::uint64_t seed = 1;
    FeatureKind feature = FeatureKind::wordform;

    bool operator==(const TrainConfig &) const = default;
};

/// Throws Error(invalid_argument) for non-positive counts, dim < 2, and
/// similar violations.
void validate(const TrainConfig &config);

struct TrainProgress {
    std::size_t epoch = 0;
    double learning_rate = 0.0;
    double loss = 0.0;   // mean negative log-likelihood per update since the last report
    std::uint64_t words_processed = 0;
    std::uint64_t words_total = 0;
};

struct TrainObserver {
    std::function<void(const TrainProgress &)> on_progress;
    std::function<bool()> should_stop;
};

/// Single-threaded, seed-deterministic negative-sampling training. Returns
/// the input (center-word) embedding matrix with training parameters in
/// the model metadata.
EmbeddingModel train(const TokenStream &tokens, const TrainConfig &config,
                     const TrainObserver &observer = {});

struct NeighborhoodComparison {
    std::vector<Neighbor> wordform_neighbors;
    std::vector<Neighbor> lemma_neighbors;
    std::vector<std::string> overlap;   // sorted ascending
};

/// Top-k lists of `wordform` in the wordform model and `lemma` in the lemma
/// model, with their plain string intersection.
NeighborhoodComparison compare_neighborhoods(const EmbeddingModel &wordform_model,
                                             const EmbeddingModel &lemma_model,
                                             std::string_view wordform, std::string_view lemma,
                                             std::size_t k);

} // namespace embex::trainer
