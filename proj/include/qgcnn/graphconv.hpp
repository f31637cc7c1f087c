// Copyright 2026 The qgcnn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qgcnn/errors.hpp"

namespace qgcnn {

/// Undirected simple graph given as an edge list over nodes 0..num_nodes-1.
struct Graph {
    int num_nodes = 0;
    std::vector<std::pair<int, int>> edges;
};

/// Symmetric nonnegative adjacency matrix. Plain dense storage: the graphs
/// here are pixel grids of at most 4096 nodes.
using Adjacency = Eigen::MatrixXd;

/// Binary adjacency matrix of a simple graph: a[i][j] = a[j][i] = 1 for each
/// edge, zero diagonal. Rejects out-of-range endpoints, self loops, and
/// duplicate edges (in either orientation).
inline Adjacency adjacency_from_graph(const Graph& g) {
    if (g.num_nodes < 1) {
        throw UsageError("graph must have at least one node");
    }
    Adjacency a = Adjacency::Zero(g.num_nodes, g.num_nodes);
    std::set<std::pair<int, int>> seen;
    for (const auto& [u, v] : g.edges) {
        if (u < 0 || u >= g.num_nodes || v < 0 || v >= g.num_nodes) {
            throw UsageError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                             ") out of range for " + std::to_string(g.num_nodes) + " nodes");
        }
        if (u == v) {
            throw UsageError("self loop at node " + std::to_string(u));
        }
        const std::pair<int, int> key = u < v ? std::pair{u, v} : std::pair{v, u};
        if (!seen.insert(key).second) {
            throw UsageError("duplicate edge (" + std::to_string(u) + ", " +
                             std::to_string(v) + ")");
        }
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    return a;
}

namespace detail {

inline void check_square(const Adjacency& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw UsageError(std::string(what) + " requires a square matrix, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

} // namespace detail

/// A + I.
inline Adjacency add_self_loops(const Adjacency& a) {
    detail::check_square(a, "add_self_loops");
    return a + Adjacency::Identity(a.rows(), a.cols());
}

/// Symmetric normalization D^{-1/2} A D^{-1/2}, with d(i) = row sum of A.
/// Every degree must be positive; an isolated node has no defined scaling.
inline Adjacency normalize_adjacency(const Adjacency& a) {
    detail::check_square(a, "normalize_adjacency");
    Eigen::VectorXd inv_sqrt(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double d = 0.0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) d += a(i, j);
        if (!(d > 0.0)) {
            throw UsageError("normalize_adjacency: node " + std::to_string(i) +
                             " has degree " + std::to_string(d));
        }
        inv_sqrt[i] = 1.0 / std::sqrt(d);
    }
    Adjacency out(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            out(i, j) = a(i, j) * (inv_sqrt[i] * inv_sqrt[j]);
        }
    }
    return out;
}

/// Fully connected Gaussian affinity over an h x w pixel grid. Pixel centers
/// are placed on the normalized unit square (row r, col c) ->
/// (r/(h-1), c/(w-1)), so image size does not change the length scale. The
/// weight between two distinct pixels at Euclidean distance d is
/// exp(-d / sigma^2); the diagonal is zero.
inline Adjacency gaussian_pixel_adjacency(int height, int width, double sigma) {
    if (height < 1 || width < 1) {
        throw ConfigError("gaussian_pixel_adjacency needs positive dimensions");
    }
    if (!(sigma > 0.0)) {
        throw ConfigError("gaussian_pixel_adjacency needs sigma > 0");
    }
    const Eigen::Index nodes = static_cast<Eigen::Index>(height) * width;
    if (nodes > (Eigen::Index{1} << 12)) {
        throw ConfigError("pixel graph with " + std::to_string(nodes) +
                          " nodes exceeds the 4096-node limit");
    }
    const double row_step = height > 1 ? 1.0 / (height - 1) : 0.0;
    const double col_step = width > 1 ? 1.0 / (width - 1) : 0.0;
    const double inv_sigma_sq = 1.0 / (sigma * sigma);
    Adjacency a = Adjacency::Zero(nodes, nodes);
    for (Eigen::Index i = 0; i < nodes; ++i) {
        const double yi = static_cast<double>(i / width) * row_step;
        const double xi = static_cast<double>(i % width) * col_step;
        for (Eigen::Index j = i + 1; j < nodes; ++j) {
            const double yj = static_cast<double>(j / width) * row_step;
            const double xj = static_cast<double>(j % width) * col_step;
            const double d = std::hypot(yi - yj, xi - xj);
            const double w = std::exp(-d * inv_sigma_sq);
            a(i, j) = w;
            a(j, i) = w;
        }
    }
    return a;
}

/// n rounds of neighborhood aggregation: returns A^n x without ever forming
/// A^n. Each round is a single matvec accumulated column by column (ascending
/// j), which pins the floating-point summation order of every entry.
inline Eigen::VectorXd aggregate(const Adjacency& a, Eigen::VectorXd x, int n) {
    detail::check_square(a, "aggregate");
    if (x.size() != a.rows()) {
        throw UsageError("aggregate: vector length " + std::to_string(x.size()) +
                         " does not match " + std::to_string(a.rows()) + " nodes");
    }
    if (n < 0) {
        throw UsageError("aggregate: hop count must be >= 0");
    }
    Eigen::VectorXd y(x.size());
    for (int round = 0; round < n; ++round) {
        y.setZero();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            y += a.col(j) * x[j];
        }
        x.swap(y);
    }
    return x;
}

/// Plain CSV dump (one row per line, full precision) for offline inspection.
inline void write_adjacency_csv(const Adjacency& a, std::ostream& os) {
    char buf[32];
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
            if (j > 0) os << ',';
            os << buf;
        }
        os << '\n';
    }
}

} // namespace qgcnn
