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

#include "embex/vstore.hpp"

#include "embex/error.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace embex {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T> bool parse_number(std::string_view s, T &out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

struct Header {
    std::size_t vocab_size = 0;
    std::size_t dim = 0;
};

Header parse_header(std::string_view line) {
    const auto fields = split_ws(line);
    Header h;
    if (fields.size() != 2 || !parse_number(fields[0], h.vocab_size) ||
        !parse_number(fields[1], h.dim) || h.dim == 0) {
        throw Error(ErrorCode::malformed_header,
                    "expected header '<vocab_size> <dim>', got '" + std::string(line) + "'")
            .with_line(1);
    }
    return h;
}

[[noreturn]] void throw_io(const std::string &what, const std::filesystem::path &path) {
    throw Error(ErrorCode::io_failure, what + ": " + path.string());
}

std::uint32_t load_le32(const char *p) {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    if constexpr (std::endian::native == std::endian::big) {
        v = ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
    }
    return v;
}

void store_le32(std::uint32_t v, char *p) {
    if constexpr (std::endian::native == std::endian::big) {
        v = ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
    }
    std::memcpy(p, &v, 4);
}

EmbeddingModel attach_sidecar(EmbeddingModel model, const std::filesystem::path &path) {
    const auto side = sidecar_path(path);
    std::error_code ec;
    if (std::filesystem::exists(side, ec)) {
        ModelMeta meta = load_meta(side);
        if (meta.source.empty()) meta.source = path.string();
        return model.with_meta(std::move(meta));
    }
    return model;
}

bool is_binary_path(const std::filesystem::path &path) { return path.extension() == ".bin"; }

} // namespace

std::string_view to_string(FeatureKind kind) noexcept {
    switch (kind) {
    case FeatureKind::wordform: return "wordform";
    case FeatureKind::lemma_cased: return "lemma_cased";
    case FeatureKind::lemma_lower: return "lemma_lower";
    }
    return "wordform";
}

FeatureKind parse_feature_kind(std::string_view name) {
    if (name == "wordform") return FeatureKind::wordform;
    if (name == "lemma_cased") return FeatureKind::lemma_cased;
    if (name == "lemma_lower") return FeatureKind::lemma_lower;
    throw_invalid_argument("unknown feature kind '" + std::string(name) +
                           "' (expected wordform, lemma_cased or lemma_lower)");
}

EmbeddingModel::EmbeddingModel(std::vector<std::string> vocab, std::vector<float> matrix,
                               std::size_t dim, ModelMeta meta)
    : vocab_(std::move(vocab)), matrix_(std::move(matrix)), dim_(dim), meta_(std::move(meta)),
      unit_(std::make_shared<UnitCache>()) {
    if (dim_ == 0) throw_invalid_argument("model dimension must be positive");
    if (matrix_.size() != vocab_.size() * dim_) {
        throw Error(ErrorCode::dimension_mismatch,
                    "matrix holds " + std::to_string(matrix_.size()) + " values, expected " +
                        std::to_string(vocab_.size()) + " x " + std::to_string(dim_));
    }
    meta_.dim = dim_;
    index_.reserve(vocab_.size());
    norms_.resize(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        if (!index_.emplace(vocab_[i], i).second) {
            throw Error(ErrorCode::duplicate_token, "duplicate token '" + vocab_[i] + "'")
                .with_token(vocab_[i])
                .with_line(i + 2);
        }
        double sq = 0.0;
        for (float v : row(i)) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::non_finite_value, "non-finite value in row of '" + vocab_[i] + "'")
                    .with_token(vocab_[i])
                    .with_line(i + 2);
            }
            sq += static_cast<double>(v) * v;
        }
        norms_[i] = std::sqrt(sq);
        if (norms_[i] == 0.0) ++zero_rows_;
    }
}

std::optional<std::size_t> EmbeddingModel::index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::vector<float> &EmbeddingModel::unit_matrix() const {
    std::call_once(unit_->once, [this] {
        auto &rows = unit_->rows;
        rows.resize(matrix_.size());
        for (std::size_t i = 0; i < vocab_.size(); ++i) {
            const double n = norms_[i];
            const float *src = matrix_.data() + i * dim_;
            float *dst = rows.data() + i * dim_;
            for (std::size_t d = 0; d < dim_; ++d)
                dst[d] = n == 0.0 ? 0.0f : static_cast<float>(src[d] / n);
        }
    });
    return unit_->rows;
}

EmbeddingModel EmbeddingModel::with_meta(ModelMeta meta) const {
    EmbeddingModel copy = *this;
    copy.meta_ = std::move(meta);
    copy.meta_.dim = dim_;
    return copy;
}

ModelInfo model_info(const EmbeddingModel &model) {
    return {model.meta(), model.size(), model.zero_row_count()};
}

std::span<const float> lookup(const EmbeddingModel &model, std::string_view token) {
    const auto idx = model.index_of(token);
    if (!idx) throw_out_of_vocabulary(token);
    return model.row(*idx);
}

EmbeddingModel read_text(std::istream &in, std::string source) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::malformed_header, "empty model file").with_line(1);
    }
    const Header header = parse_header(line);

    std::vector<std::string> vocab;
    std::vector<float> matrix;
    vocab.reserve(header.vocab_size);
    matrix.reserve(header.vocab_size * header.dim);

    std::size_t line_no = 1;
    while (vocab.size() < header.vocab_size) {
        if (!std::getline(in, line)) {
            throw Error(ErrorCode::truncated_file,
                        "expected " + std::to_string(header.vocab_size) + " records, found " +
                            std::to_string(vocab.size()))
                .with_line(line_no + 1);
        }
        ++line_no;
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != header.dim + 1) {
            throw Error(ErrorCode::dimension_mismatch,
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.dim) + " values, found " +
                            std::to_string(fields.size() - 1))
                .with_line(line_no);
        }
        for (std::size_t d = 1; d < fields.size(); ++d) {
            float v = 0.0f;
            if (!parse_number(fields[d], v) || !std::isfinite(v)) {
                throw Error(ErrorCode::non_finite_value,
                            "line " + std::to_string(line_no) + ": bad value '" +
                                std::string(fields[d]) + "'")
                    .with_line(line_no);
            }
            matrix.push_back(v);
        }
        vocab.emplace_back(fields[0]);
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!split_ws(line).empty()) {
            throw Error(ErrorCode::malformed_header,
                        "more records than the header's vocab_size " +
                            std::to_string(header.vocab_size))
                .with_line(line_no);
        }
    }

    ModelMeta meta;
    meta.source = std::move(source);
    return EmbeddingModel(std::move(vocab), std::move(matrix), header.dim, std::move(meta));
}

EmbeddingModel read_binary(std::istream &in, std::string source) {
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t eol = data.find('\n');
    if (eol == std::string::npos) {
        throw Error(ErrorCode::malformed_header, "missing header line").with_line(1);
    }
    const Header header = parse_header(std::string_view(data).substr(0, eol));

    std::vector<std::string> vocab;
    std::vector<float> matrix(header.vocab_size * header.dim);
    vocab.reserve(header.vocab_size);

    const std::size_t vec_bytes = header.dim * 4;
    std::size_t pos = eol + 1;
    for (std::size_t r = 0; r < header.vocab_size; ++r) {
        if (pos < data.size() && data[pos] == '\n') ++pos;
        const std::size_t sep = data.find(' ', pos);
        if (sep == std::string::npos || sep == pos) {
            throw Error(ErrorCode::truncated_file,
                        "record " + std::to_string(r + 1) + ": missing token")
                .with_line(r + 1);
        }
        if (pos + vec_bytes > data.size() || sep + 1 + vec_bytes > data.size()) {
            throw Error(ErrorCode::truncated_file,
                        "record " + std::to_string(r + 1) + ": truncated vector")
                .with_line(r + 1);
        }
        vocab.emplace_back(data, pos, sep - pos);
        const char *p = data.data() + sep + 1;
        float *dst = matrix.data() + r * header.dim;
        for (std::size_t d = 0; d < header.dim; ++d) {
            const float v = std::bit_cast<float>(load_le32(p + 4 * d));
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::non_finite_value,
                            "record " + std::to_string(r + 1) + ": non-finite value")
                    .with_line(r + 1);
            }
            dst[d] = v;
        }
        pos = sep + 1 + vec_bytes;
    }

    ModelMeta meta;
    meta.source = std::move(source);
    return EmbeddingModel(std::move(vocab), std::move(matrix), header.dim, std::move(meta));
}

EmbeddingModel load_text(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open model file", path);
    return attach_sidecar(read_text(in, path.string()), path);
}

EmbeddingModel load_binary(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open model file", path);
    return attach_sidecar(read_binary(in, path.string()), path);
}

EmbeddingModel load_model(const std::filesystem::path &path, ModelFormat format) {
    if (format == ModelFormat::binary || (format == ModelFormat::automatic && is_binary_path(path)))
        return load_binary(path);
    return load_text(path);
}

void write_text(const EmbeddingModel &model, std::ostream &out) {
    out << model.size() << ' ' << model.dim() << '\n';
    char buf[32];
    for (std::size_t i = 0; i < model.size(); ++i) {
        out << model.token(i);
        for (float v : model.row(i)) {
            auto res = std::to_chars(buf, buf + sizeof(buf), v);
            out << ' ';
            out.write(buf, res.ptr - buf);
        }
        out << '\n';
    }
}

void write_binary(const EmbeddingModel &model, std::ostream &out) {
    out << model.size() << ' ' << model.dim() << '\n';
    std::vector<char> buf(model.dim() * 4);
    for (std::size_t i = 0; i < model.size(); ++i) {
        out << model.token(i) << ' ';
        const auto row = model.row(i);
        for (std::size_t d = 0; d < row.size(); ++d)
            store_le32(std::bit_cast<std::uint32_t>(row[d]), buf.data() + 4 * d);
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        out << '\n';
    }
}

void save_text(const EmbeddingModel &model, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) throw_io("cannot create model file", path);
    write_text(model, out);
    out.flush();
    if (!out) throw_io("write failed", path);
    save_meta(model.meta(), sidecar_path(path));
}

void save_binary(const EmbeddingModel &model, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot create model file", path);
    write_binary(model, out);
    out.flush();
    if (!out) throw_io("write failed", path);
    save_meta(model.meta(), sidecar_path(path));
}

void save_model(const EmbeddingModel &model, const std::filesystem::path &path, ModelFormat format) {
    if (format == ModelFormat::binary || (format == ModelFormat::automatic && is_binary_path(path)))
        save_binary(model, path);
    else
        save_text(model, path);
}

std::filesystem::path sidecar_path(const std::filesystem::path &model_path) {
    return std::filesystem::path(model_path.string() + ".meta.json");
}

void save_meta(const ModelMeta &meta, const std::filesystem::path &sidecar) {
    nlohmann::json j = {
        {"dim", meta.dim},
        {"feature_kind", to_string(meta.feature_kind)},
        {"frequency_threshold", meta.frequency_threshold},
        {"window", meta.window ? nlohmann::json(*meta.window) : nlohmann::json(nullptr)},
        {"source", meta.source},
    };
    std::ofstream out(sidecar);
    if (!out) throw_io("cannot create metadata sidecar", sidecar);
    out << j.dump(2) << '\n';
    if (!out) throw_io("write failed", sidecar);
}

ModelMeta load_meta(const std::filesystem::path &sidecar) {
    std::ifstream in(sidecar);
    if (!in) throw_io("cannot open metadata sidecar", sidecar);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::malformed_header,
                    "invalid metadata sidecar " + sidecar.string() + ": " + e.what());
    }
    ModelMeta meta;
    try {
        if (j.contains("dim")) meta.dim = j.at("dim").get<std::size_t>();
        if (j.contains("feature_kind"))
            meta.feature_kind = parse_feature_kind(j.at("feature_kind").get<std::string>());
        if (j.contains("frequency_threshold"))
            meta.frequency_threshold = j.at("frequency_threshold").get<std::uint64_t>();
        if (j.contains("window") && !j.at("window").is_null())
            meta.window = j.at("window").get<int>();
        if (j.contains("source")) meta.source = j.at("source").get<std::string>();
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::malformed_header,
                    "invalid metadata sidecar " + sidecar.string() + ": " + e.what());
    }
    return meta;
}

} // namespace embex
