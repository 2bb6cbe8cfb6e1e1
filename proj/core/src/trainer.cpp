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

#include "embex/trainer.hpp"

#include "embex/error.hpp"
#include "embex/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>

namespace embex::trainer {

namespace {

constexpr std::uint64_t kReportEvery = 10000;

double uniform01(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// -log(sigmoid(x)), stable for large |x|.
double neg_log_sigmoid(double x) {
    return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

} // namespace

std::size_t AnnotatedCorpus::token_count() const noexcept {
    std::size_t n = 0;
    for (const auto &s : sentences) n += s.size();
    return n;
}

std::size_t token_count(const TokenStream &stream) noexcept {
    std::size_t n = 0;
    for (const auto &s : stream) n += s.size();
    return n;
}

AnnotatedCorpus read_annotated(std::istream &in) {
    AnnotatedCorpus corpus;
    AnnotatedSentence current;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = strip_cr(raw);
        if (blank(line)) {
            if (!current.empty()) corpus.sentences.push_back(std::move(current));
            current.clear();
            continue;
        }
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
            throw Error(ErrorCode::malformed_record,
                        "line " + std::to_string(line_no) + ": expected wordform<TAB>lemma<TAB>pos")
                .with_line(line_no);
        }
        AnnotatedToken tok{std::string(line.substr(0, t1)), std::string(line.substr(t1 + 1, t2 - t1 - 1)),
                           std::string(line.substr(t2 + 1))};
        if (tok.wordform.empty() || tok.lemma.empty()) {
            throw Error(ErrorCode::malformed_record,
                        "line " + std::to_string(line_no) + ": empty wordform or lemma")
                .with_line(line_no);
        }
        current.push_back(std::move(tok));
    }
    if (!current.empty()) corpus.sentences.push_back(std::move(current));
    return corpus;
}

AnnotatedCorpus load_annotated(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open corpus: " + path.string());
    return read_annotated(in);
}

TokenStream read_plain(std::istream &in) {
    TokenStream out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<std::string> sentence;
        for (std::string tok; ss >> tok;) sentence.push_back(std::move(tok));
        if (!sentence.empty()) out.push_back(std::move(sentence));
    }
    return out;
}

TokenStream load_plain(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open corpus: " + path.string());
    return read_plain(in);
}

TokenStream extract_tokens(const AnnotatedCorpus &corpus, FeatureKind feature) {
    TokenStream out;
    out.reserve(corpus.sentences.size());
    for (const auto &sentence : corpus.sentences) {
        std::vector<std::string> toks;
        toks.reserve(sentence.size());
        for (const auto &t : sentence) {
            switch (feature) {
            case FeatureKind::wordform: toks.push_back(t.wordform); break;
            case FeatureKind::lemma_cased: toks.push_back(t.lemma); break;
            case FeatureKind::lemma_lower: toks.push_back(text::to_lower(t.lemma)); break;
            }
        }
        out.push_back(std::move(toks));
    }
    return out;
}

Vocab::Vocab(std::vector<VocabEntry> entries) : entries_(std::move(entries)) {
    index_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        index_.emplace(entries_[i].token, i);
        total_ += entries_[i].count;
    }
}

std::int64_t Vocab::index_of(const std::string &token) const {
    auto it = index_.find(token);
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

Vocab build_vocab(const TokenStream &tokens, std::uint64_t min_count) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto &sentence : tokens)
        for (const auto &t : sentence) ++counts[t];
    std::vector<VocabEntry> entries;
    for (auto &[tok, cnt] : counts)
        if (cnt >= min_count) entries.push_back({tok, cnt});
    if (entries.empty()) {
        throw Error(ErrorCode::empty_vocab,
                    "no token occurs at least " + std::to_string(min_count) + " times");
    }
    std::sort(entries.begin(), entries.end(), [](const VocabEntry &a, const VocabEntry &b) {
        return a.count != b.count ? a.count > b.count : a.token < b.token;
    });
    return Vocab(std::move(entries));
}

std::vector<double> noise_distribution(const Vocab &vocab, double power) {
    std::vector<double> p(vocab.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::pow(static_cast<double>(vocab.entries()[i].count), power);
        sum += p[i];
    }
    for (double &v : p) v /= sum;
    return p;
}

std::string_view to_string(ModelType type) noexcept {
    return type == ModelType::cbow ? "cbow" : "skipgram";
}

ModelType parse_model_type(std::string_view name) {
    if (name == "cbow") return ModelType::cbow;
    if (name == "skipgram" || name == "skip-gram" || name == "sg") return ModelType::skipgram;
    throw_invalid_argument("unknown model type '" + std::string(name) + "' (expected cbow or skipgram)");
}

void validate(const TrainConfig &c) {
    if (c.dim < 2) throw_invalid_argument("dim must be at least 2");
    if (c.window == 0) throw_invalid_argument("window must be positive");
    if (c.min_count == 0) throw_invalid_argument("min_count must be positive");
    if (c.negatives == 0) throw_invalid_argument("negatives must be positive");
    if (c.epochs == 0) throw_invalid_argument("epochs must be positive");
    if (!(c.initial_lr > 0.0)) throw_invalid_argument("initial_lr must be positive");
    if (!(c.subsample_t >= 0.0)) throw_invalid_argument("subsample_t must be non-negative");
}

namespace {

class SgnsTrainer {
public:
    SgnsTrainer(const Vocab &vocab, const TrainConfig &config)
        : vocab_(vocab), cfg_(config), dim_(config.dim), rng_(config.seed),
          input_(vocab.size() * config.dim), output_(vocab.size() * config.dim, 0.0f),
          grad_(config.dim), hidden_(config.dim) {
        for (float &v : input_) v = static_cast<float>((uniform01(rng_) - 0.5) / static_cast<double>(dim_));
        const auto noise = noise_distribution(vocab);
        cdf_.resize(noise.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < noise.size(); ++i) cdf_[i] = (acc += noise[i]);
        cdf_.back() = 1.0;
        if (cfg_.subsample_t > 0.0) {
            const double threshold = cfg_.subsample_t * static_cast<double>(vocab.total());
            keep_.resize(vocab.size());
            for (std::size_t i = 0; i < vocab.size(); ++i) {
                const double f = static_cast<double>(vocab.entries()[i].count);
                keep_[i] = (std::sqrt(f / threshold) + 1.0) * threshold / f;
            }
        }
    }

    void run(const std::vector<std::vector<std::uint32_t>> &sentences, std::uint64_t train_words,
             const TrainObserver &observer) {
        const std::uint64_t total = train_words * cfg_.epochs;
        std::uint64_t processed = 0, last_report = 0;
        std::vector<std::uint32_t> kept;
        for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
            for (const auto &sentence : sentences) {
                if (observer.should_stop && observer.should_stop())
                    throw Error(ErrorCode::cancelled, "training cancelled");
                kept.clear();
                for (std::uint32_t w : sentence)
                    if (keep_.empty() || keep_[w] >= uniform01(rng_)) kept.push_back(w);
                for (std::size_t pos = 0; pos < kept.size(); ++pos) {
                    const double progress = static_cast<double>(processed) / static_cast<double>(total + 1);
                    lr_ = cfg_.initial_lr * std::max(1.0 - progress, 1e-4);
                    const std::size_t b = 1 + static_cast<std::size_t>(rng_() % cfg_.window);
                    const std::size_t lo = pos >= b ? pos - b : 0;
                    const std::size_t hi = std::min(kept.size() - 1, pos + b);
                    if (cfg_.model_type == ModelType::skipgram) {
                        for (std::size_t c = lo; c <= hi; ++c)
                            if (c != pos) skipgram_pair(kept[pos], kept[c]);
                    } else {
                        cbow(kept, pos, lo, hi);
                    }
                }
                processed += sentence.size();
                if (observer.on_progress && processed - last_report >= kReportEvery) {
                    report(observer, epoch, processed, total);
                    last_report = processed;
                }
            }
            if (observer.on_progress) report(observer, epoch, processed, total);
        }
    }

    std::vector<float> take_embeddings() { return std::move(input_); }

private:
    void report(const TrainObserver &observer, std::size_t epoch, std::uint64_t processed, std::uint64_t total) {
        TrainProgress p;
        p.epoch = epoch;
        p.learning_rate = lr_;
        p.loss = updates_ ? loss_ / static_cast<double>(updates_) : 0.0;
        p.words_processed = processed;
        p.words_total = total;
        loss_ = 0.0;
        updates_ = 0;
        observer.on_progress(p);
    }

    std::uint32_t sample_noise() {
        const double u = uniform01(rng_);
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                                   static_cast<std::ptrdiff_t>(cdf_.size() - 1)));
    }

    // One positive and `negatives` noise updates of `hidden` against target;
    // accumulates the hidden-layer gradient into grad_.
    void negative_sampling(const float *hidden, std::uint32_t target) {
        for (std::size_t d = 0; d <= cfg_.negatives; ++d) {
            std::uint32_t word;
            double label;
            if (d == 0) {
                word = target;
                label = 1.0;
            } else {
                word = sample_noise();
                if (word == target) continue;
                label = 0.0;
            }
            float *out = output_.data() + static_cast<std::size_t>(word) * dim_;
            double f = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) f += static_cast<double>(hidden[k]) * out[k];
            const double sig = 1.0 / (1.0 + std::exp(-f));
            const float g = static_cast<float>((label - sig) * lr_);
            for (std::size_t k = 0; k < dim_; ++k) grad_[k] += g * out[k];
            for (std::size_t k = 0; k < dim_; ++k) out[k] += g * hidden[k];
            loss_ += neg_log_sigmoid(label > 0.5 ? f : -f);
            ++updates_;
        }
    }

    void skipgram_pair(std::uint32_t center, std::uint32_t context) {
        float *in = input_.data() + static_cast<std::size_t>(center) * dim_;
        std::fill(grad_.begin(), grad_.end(), 0.0f);
        negative_sampling(in, context);
        for (std::size_t k = 0; k < dim_; ++k) in[k] += grad_[k];
    }

    void cbow(const std::vector<std::uint32_t> &kept, std::size_t pos, std::size_t lo, std::size_t hi) {
        std::fill(hidden_.begin(), hidden_.end(), 0.0f);
        std::size_t count = 0;
        for (std::size_t c = lo; c <= hi; ++c) {
            if (c == pos) continue;
            const float *in = input_.data() + static_cast<std::size_t>(kept[c]) * dim_;
            for (std::size_t k = 0; k < dim_; ++k) hidden_[k] += in[k];
            ++count;
        }
        if (count == 0) return;
        for (float &v : hidden_) v /= static_cast<float>(count);
        std::fill(grad_.begin(), grad_.end(), 0.0f);
        negative_sampling(hidden_.data(), kept[pos]);
        for (std::size_t c = lo; c <= hi; ++c) {
            if (c == pos) continue;
            float *in = input_.data() + static_cast<std::size_t>(kept[c]) * dim_;
            for (std::size_t k = 0; k < dim_; ++k) in[k] += grad_[k];
        }
    }

    const Vocab &vocab_;
    const TrainConfig &cfg_;
    std::size_t dim_;
    std::mt19937_64 rng_;
    std::vector<float> input_, output_, grad_, hidden_;
    std::vector<double> cdf_;
    std::vector<double> keep_;
    double lr_ = 0.0;
    double loss_ = 0.0;
    std::uint64_t updates_ = 0;
};

} // namespace

EmbeddingModel train(const TokenStream &tokens, const TrainConfig &config, const TrainObserver &observer) {
    validate(config);
    const Vocab vocab = build_vocab(tokens, config.min_count);

    std::vector<std::vector<std::uint32_t>> sentences;
    sentences.reserve(tokens.size());
    std::uint64_t train_words = 0;
    for (const auto &sentence : tokens) {
        std::vector<std::uint32_t> ids;
        ids.reserve(sentence.size());
        for (const auto &t : sentence) {
            const auto idx = vocab.index_of(t);
            if (idx >= 0) ids.push_back(static_cast<std::uint32_t>(idx));
        }
        train_words += ids.size();
        if (!ids.empty()) sentences.push_back(std::move(ids));
    }

    SgnsTrainer trainer(vocab, config);
    trainer.run(sentences, train_words, observer);

    std::vector<std::string> words;
    words.reserve(vocab.size());
    for (const auto &e : vocab.entries()) words.push_back(e.token);

    ModelMeta meta;
    meta.feature_kind = config.feature;
    meta.frequency_threshold = config.min_count;
    meta.window = static_cast<int>(config.window);
    std::ostringstream src;
    src << "embex train " << to_string(config.model_type) << " dim=" << config.dim
        << " window=" << config.window << " min_count=" << config.min_count
        << " negatives=" << config.negatives << " epochs=" << config.epochs
        << " lr=" << config.initial_lr << " subsample=" << config.subsample_t << " seed=" << config.seed;
    meta.source = src.str();
    return EmbeddingModel(std::move(words), trainer.take_embeddings(), config.dim, std::move(meta));
}

NeighborhoodComparison compare_neighborhoods(const EmbeddingModel &wordform_model,
                                             const EmbeddingModel &lemma_model, std::string_view wordform,
                                             std::string_view lemma, std::size_t k) {
    NeighborhoodComparison out;
    auto query = [&](const EmbeddingModel &m, std::string_view tok, const char *which) {
        try {
            return top_k_similar(m, tok, k);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::out_of_vocabulary) throw;
            throw Error(ErrorCode::out_of_vocabulary,
                        std::string(which) + " model: out of vocabulary: '" + std::string(tok) + "'")
                .with_token(std::string(tok));
        }
    };
    out.wordform_neighbors = query(wordform_model, wordform, "wordform");
    out.lemma_neighbors = query(lemma_model, lemma, "lemma");
    std::vector<std::string> a, b;
    for (const auto &n : out.wordform_neighbors) a.push_back(n.token);
    for (const auto &n : out.lemma_neighbors) b.push_back(n.token);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.overlap));
    return out;
}

} // namespace embex::trainer
