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

// JSON encodings shared by the CLI and the HTTP service (one schema, two
// transports). Doubles are written in shortest round-trip form.

#include "embex/graphx.hpp"
#include "embex/simquery.hpp"
#include "embex/trainer.hpp"
#include "embex/tsne.hpp"
#include "embex/vstore.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace embex {

using json = nlohmann::json;

void to_json(json &j, const ModelMeta &meta);
void from_json(const json &j, ModelMeta &meta);
void to_json(json &j, const ModelInfo &info);
void to_json(json &j, const Neighbor &n);
void from_json(const json &j, Neighbor &n);
void to_json(json &j, const TracedWord &w);
void to_json(json &j, const AnalogyTrace &t);
void to_json(json &j, const AnalogyResult &r);
void to_json(json &j, const GraphNode &n);
void to_json(json &j, const GraphEdge &e);
void to_json(json &j, const ExpansionRecord &r);
void to_json(json &j, const SimilarityGraph &g);
void from_json(const json &j, SimilarityGraph &g);

/// Single row as a JSON array of numbers.
json vector_json(std::span<const float> v);

namespace tsne {
void to_json(json &j, const Config &c);
/// Overrides only the keys present in j.
void from_json(const json &j, Config &c);
void to_json(json &j, const CostSample &s);
void to_json(json &j, const Layout &l);
void from_json(const json &j, Layout &l);

/// "token<TAB>x<TAB>y" lines.
std::string to_tsv(const Layout &layout);
} // namespace tsne

namespace trainer {
void to_json(json &j, const TrainConfig &c);
/// Overrides only the keys present in j.
void from_json(const json &j, TrainConfig &c);
void to_json(json &j, const TrainProgress &p);
void to_json(json &j, const NeighborhoodComparison &c);
} // namespace trainer

} // namespace embex
