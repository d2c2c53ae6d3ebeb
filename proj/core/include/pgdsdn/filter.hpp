#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pgdsdn/graph.hpp"

namespace pgdsdn {

struct Triplet {
    Vertex row = 0;
    Vertex col = 0;
    double value = 0.0;
};

/// Vertex-indexed real vector (x(i))_{i in V}.
class Signal {
public:
    Signal(GraphPtr graph, std::vector<double> values);
    static Signal zeros(GraphPtr graph);

    const Graph& graph() const noexcept { return *graph_; }
    const GraphPtr& graph_ptr() const noexcept { return graph_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

private:
    GraphPtr graph_;
    std::vector<double> values_;
};

/// Sparse graph filter in CSR form with cached geodesic-width.
///
/// Rows hold nonzero entries only, columns strictly ascending. The width is
/// the largest hop distance between a row and one of its stored columns and
/// is computed by BFS at construction, so it is always truthful.
class GraphFilter {
public:
    struct Entry {
        Vertex col;
        double value;
    };

    /// Duplicate (row, col) pairs are summed; exact zeros are dropped.
    static GraphFilter from_triplets(GraphPtr graph, std::vector<Triplet> triplets);
    static GraphFilter identity(GraphPtr graph);
    static GraphFilter adjacency(GraphPtr graph);
    static GraphFilter from_dense(GraphPtr graph, const Eigen::MatrixXd& dense);

    const Graph& graph() const noexcept { return *graph_; }
    const GraphPtr& graph_ptr() const noexcept { return graph_; }
    std::size_t size() const noexcept { return offsets_.size() - 1; }
    std::size_t nonzeros() const noexcept { return entries_.size(); }
    unsigned width() const noexcept { return width_; }

    std::span<const Entry> row(Vertex i) const;
    double at(Vertex i, Vertex j) const;

    /// y(i) = sum over stored columns j, ascending, of H(i,j) x(j).
    void apply(std::span<const double> x, std::span<double> y) const;

    GraphFilter transposed() const;
    GraphFilter scaled(double alpha) const;
    std::vector<Triplet> triplets() const;
    Eigen::MatrixXd to_dense() const;

    struct Asymmetry {
        Vertex row;
        Vertex col;
        double gap;
    };
    /// Worst |H(i,j) - H(j,i)| if it exceeds `tol`, nullopt otherwise.
    std::optional<Asymmetry> asymmetry(double tol) const;

private:
    GraphFilter(GraphPtr graph, std::vector<std::size_t> offsets, std::vector<Entry> entries);
    GraphFilter(GraphPtr graph, std::vector<std::size_t> offsets, std::vector<Entry> entries,
                unsigned width);

    GraphPtr graph_;
    std::vector<std::size_t> offsets_;
    std::vector<Entry> entries_;
    unsigned width_ = 0;
};

Signal apply(const GraphFilter& h, const Signal& x);

/// Largest hop distance over the given entries (0 for diagonal-only).
unsigned geodesic_width(std::span<const Triplet> entries, const Graph& g);

/// max(max absolute row sum, max absolute column sum).
double schur_norm(const GraphFilter& h);

/// Sparse product a*b; entries with magnitude below 1e-14 are dropped.
GraphFilter compose(const GraphFilter& a, const GraphFilter& b);

GraphFilter add(const GraphFilter& a, const GraphFilter& b);

inline constexpr double kComposeDropThreshold = 1e-14;

/// Experiment filter H = H_o + (L_sym)^2 on a graph with coordinates.
///
/// H_o(i,j) = exp(-2n |p_i - p_j|^2 - |p_i + p_j|^2 / 2) + (g_ij + g_ji)/2
/// for rho(i,j) <= 2, with g_ij i.i.d. uniform on [-gamma, gamma].
GraphFilter build_experiment_filter_fig1(const GraphPtr& g, double gamma, std::uint64_t seed);

/// I + alpha * L_sym, the graph-Tikhonov denoising filter.
GraphFilter build_denoise_filter(const GraphPtr& g, double alpha);

}  // namespace pgdsdn
