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

#include "quadtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace embex::tsne::detail {

QuadTree::QuadTree(const Matrix &y) : y_(y) {
    double lo_x = std::numeric_limits<double>::max(), hi_x = std::numeric_limits<double>::lowest();
    double lo_y = lo_x, hi_y = hi_x;
    for (std::size_t i = 0; i < y.rows; ++i) {
        lo_x = std::min(lo_x, y(i, 0));
        hi_x = std::max(hi_x, y(i, 0));
        lo_y = std::min(lo_y, y(i, 1));
        hi_y = std::max(hi_y, y(i, 1));
    }
    Node root;
    if (y.rows > 0) {
        root.cx = 0.5 * (lo_x + hi_x);
        root.cy = 0.5 * (lo_y + hi_y);
        const double span = std::max(hi_x - lo_x, hi_y - lo_y);
        root.half = 0.5 * span * (1.0 + 1e-9) + 1e-12;
    }
    nodes_.reserve(2 * y.rows + 1);
    nodes_.push_back(std::move(root));
    for (std::size_t i = 0; i < y.rows; ++i) insert(static_cast<std::uint32_t>(i));
}

int QuadTree::quadrant(const Node &node, double x, double y) const {
    return (x >= node.cx ? 1 : 0) + (y >= node.cy ? 2 : 0);
}

void QuadTree::split(std::size_t idx) {
    for (int q = 0; q < 4; ++q) {
        Node child;
        const double h = 0.5 * nodes_[idx].half;
        child.half = h;
        child.cx = nodes_[idx].cx + ((q & 1) ? h : -h);
        child.cy = nodes_[idx].cy + ((q & 2) ? h : -h);
        child.depth = nodes_[idx].depth + 1;
        nodes_.push_back(std::move(child));
        nodes_[idx].child[q] = static_cast<std::int32_t>(nodes_.size() - 1);
    }
    nodes_[idx].leaf = false;
    std::vector<std::uint32_t> moved;
    moved.swap(nodes_[idx].points);
    for (std::uint32_t p : moved) {
        const int q = quadrant(nodes_[idx], y_(p, 0), y_(p, 1));
        Node &c = nodes_[static_cast<std::size_t>(nodes_[idx].child[q])];
        c.mx = (c.mx * c.count + y_(p, 0)) / (c.count + 1);
        c.my = (c.my * c.count + y_(p, 1)) / (c.count + 1);
        ++c.count;
        c.points.push_back(p);
    }
}

void QuadTree::insert(std::uint32_t p) {
    const double px = y_(p, 0), py = y_(p, 1);
    std::size_t idx = 0;
    for (;;) {
        Node &node = nodes_[idx];
        node.mx = (node.mx * node.count + px) / (node.count + 1);
        node.my = (node.my * node.count + py) / (node.count + 1);
        ++node.count;
        if (node.leaf) {
            if (node.points.empty() || node.depth >= kMaxDepth) {
                node.points.push_back(p);
                return;
            }
            // Undo the count on this node: split() redistributes only the
            // existing points, then p descends like any other insert.
            --node.count;
            split(idx);
            Node &again = nodes_[idx];
            ++again.count;
        }
        const Node &cur = nodes_[idx];
        const int q = quadrant(cur, px, py);
        idx = static_cast<std::size_t>(cur.child[q]);
    }
}

QuadTree::Repulsion QuadTree::repulsion(std::size_t i, double theta) const {
    Repulsion r;
    const double px = y_(i, 0), py = y_(i, 1);
    const double theta2 = theta * theta;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const Node &node = nodes_[stack.back()];
        stack.pop_back();
        if (node.count == 0) continue;
        if (node.leaf) {
            for (std::uint32_t p : node.points) {
                if (p == i) continue;
                const double dx = px - y_(p, 0), dy = py - y_(p, 1);
                const double w = 1.0 / (1.0 + dx * dx + dy * dy);
                r.z += w;
                r.fx += w * w * dx;
                r.fy += w * w * dy;
            }
            continue;
        }
        const double dx = px - node.mx, dy = py - node.my;
        const double d2 = dx * dx + dy * dy;
        const double side = 2.0 * node.half;
        if (side * side < theta2 * d2) {
            const double w = 1.0 / (1.0 + d2);
            const double m = static_cast<double>(node.count);
            r.z += m * w;
            r.fx += m * w * w * dx;
            r.fy += m * w * w * dy;
            continue;
        }
        for (std::int32_t c : node.child)
            if (c >= 0) stack.push_back(static_cast<std::size_t>(c));
    }
    return r;
}

} // namespace embex::tsne::detail
