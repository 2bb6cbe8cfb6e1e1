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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace embex {

/// What the rows of a model were trained on.
enum class FeatureKind { wordform, lemma_cased, lemma_lower };

std::string_view to_string(FeatureKind kind) noexcept;
/// Throws Error(invalid_argument) for anything but the three canonical names.
FeatureKind parse_feature_kind(std::string_view name);

struct ModelMeta {
    std::size_t dim = 0;
    FeatureKind feature_kind = FeatureKind::wordform;
    std::uint64_t frequency_threshold = 0;
    std::optional<int> window;
    std::string source;

    bool operator==(const ModelMeta &) const = default;
};

/// Dense word-vector model: vocabulary in storage order plus a row-major
/// float matrix. Immutable once constructed; the row-normalized copy is
/// computed on first use and shared by copies of the model.
class EmbeddingModel {
public:
    /// Validates shape and token uniqueness (throws DuplicateToken,
    /// DimensionMismatch, NonFiniteValue). meta.dim is overwritten with dim.
    EmbeddingModel(std::vector<std::string> vocab, std::vector<float> matrix, std::size_t dim,
                   ModelMeta meta = {});

    std::size_t size() const noexcept { return vocab_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const ModelMeta &meta() const noexcept { return meta_; }
    const std::vector<std::string> &vocab() const noexcept { return vocab_; }
    const std::string &token(std::size_t row) const { return vocab_.at(row); }

    std::optional<std::size_t> index_of(std::string_view token) const;
    bool contains(std::string_view token) const { return index_of(token).has_value(); }

    std::span<const float> row(std::size_t i) const {
        return {matrix_.data() + i * dim_, dim_};
    }
    std::span<const float> matrix() const noexcept { return matrix_; }

    /// Row i divided by its Euclidean norm; zero rows stay zero.
    std::span<const float> unit_row(std::size_t i) const {
        return {unit_matrix().data() + i * dim_, dim_};
    }
    const std::vector<float> &unit_matrix() const;

    bool is_zero_row(std::size_t i) const { return norms_[i] == 0.0; }
    std::size_t zero_row_count() const noexcept { return zero_rows_; }
    double norm(std::size_t i) const { return norms_[i]; }

    /// Replaces metadata, keeping dim consistent with the matrix.
    EmbeddingModel with_meta(ModelMeta meta) const;

private:
    struct UnitCache {
        std::once_flag once;
        std::vector<float> rows;
    };

    std::vector<std::string> vocab_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<float> matrix_;
    std::vector<double> norms_;
    std::size_t dim_ = 0;
    std::size_t zero_rows_ = 0;
    ModelMeta meta_;
    std::shared_ptr<UnitCache> unit_;
};

struct ModelInfo {
    ModelMeta meta;
    std::size_t vocab_size = 0;
    std::size_t zero_rows = 0;
};

ModelInfo model_info(const EmbeddingModel &model);

/// Exact-match row lookup; throws Error(out_of_vocabulary).
std::span<const float> lookup(const EmbeddingModel &model, std::string_view token);

enum class ModelFormat { text, binary, automatic };

/// "<vocab_size> <dim>" header followed by "<token> <f1> ... <f_dim>" lines.
/// Reads the "<path>.meta.json" sidecar when present.
EmbeddingModel load_text(const std::filesystem::path &path);
/// word2vec binary: ASCII header, then token, 0x20, dim little-endian float32.
EmbeddingModel load_binary(const std::filesystem::path &path);
/// Picks the format from the extension (".bin" is binary, anything else text).
EmbeddingModel load_model(const std::filesystem::path &path,
                          ModelFormat format = ModelFormat::automatic);

EmbeddingModel read_text(std::istream &in, std::string source = {});
EmbeddingModel read_binary(std::istream &in, std::string source = {});

/// Both writers also emit the metadata sidecar.
void save_text(const EmbeddingModel &model, const std::filesystem::path &path);
void save_binary(const EmbeddingModel &model, const std::filesystem::path &path);
void save_model(const EmbeddingModel &model, const std::filesystem::path &path,
                ModelFormat format = ModelFormat::automatic);

void write_text(const EmbeddingModel &model, std::ostream &out);
void write_binary(const EmbeddingModel &model, std::ostream &out);

std::filesystem::path sidecar_path(const std::filesystem::path &model_path);
void save_meta(const ModelMeta &meta, const std::filesystem::path &sidecar);
/// Missing keys fall back to ModelMeta defaults.
ModelMeta load_meta(const std::filesystem::path &sidecar);

} // namespace embex
