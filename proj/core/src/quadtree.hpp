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

#include "embex/tsne.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace embex::tsne::detail {

/// Point-region quadtree over a 2-column layout with per-cell center of mass.
class QuadTree {
public:
    explicit QuadTree(const Matrix &y);

    struct Repulsion {
        double z = 0.0;    // sum_j w_ij
        double fx = 0.0;   // sum_j w_ij^2 (y_i - y_j)
        double fy = 0.0;
    };

    /// Repulsive terms acting on point i; cells whose side / distance to the
    /// center of mass is below theta are summarized by their aggregate.
    Repulsion repulsion(std::size_t i, double theta) const;

    std::size_t node_count() const noexcept { return nodes_.size(); }

private:
    static constexpr int kMaxDepth = 48;

    struct Node {
        double cx = 0.0, cy = 0.0, half = 0.0;
        double mx = 0.0, my = 0.0;
        std::uint32_t count = 0;
        int depth = 0;
        bool leaf = true;
        std::array<std::int32_t, 4> child{-1, -1, -1, -1};
        std::vector<std::uint32_t> points;
    };

    void insert(std::uint32_t p);
    int quadrant(const Node &node, double x, double y) const;
    void split(std::size_t node);

    const Matrix &y_;
    std::vector<Node> nodes_;
};

} // namespace embex::tsne::detail
