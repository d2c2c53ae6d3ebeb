#include "pgdsdn/filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgdsdn/error.hpp"

namespace pgdsdn {
namespace {

/// Truncated BFS that reuses its buffers across sources.
class HopCounter {
public:
    explicit HopCounter(const Graph& g) : g_(g), dist_(g.size(), -1) {}

    /// Largest hop distance from `source` to any of `targets`.
    unsigned farthest(Vertex source, std::span<const Vertex> targets) {
        std::size_t pending = 0;
        for (Vertex t : targets) {
            if (t != source) ++pending;
        }
        if (pending == 0) return 0;

        want_.assign(g_.size(), 0);
        for (Vertex t : targets) want_[t] = 1;
        want_[source] = 0;

        reset();
        frontier_.assign(1, source);
        dist_[source] = 0;
        touched_.push_back(source);
        unsigned depth = 0;
        while (!frontier_.empty()) {
            ++depth;
            next_.clear();
            for (Vertex u : frontier_) {
                for (Vertex w : g_.neighbors(u)) {
                    if (dist_[w] >= 0) continue;
                    dist_[w] = static_cast<int>(depth);
                    touched_.push_back(w);
                    next_.push_back(w);
                    if (want_[w] && --pending == 0) return depth;
                }
            }
            frontier_.swap(next_);
        }
        throw ArgumentError("filter entry in row " + std::to_string(source) +
                            " links vertices in different components");
    }

private:
    void reset() {
        for (Vertex v : touched_) dist_[v] = -1;
        touched_.clear();
    }

    const Graph& g_;
    std::vector<int> dist_;
    std::vector<char> want_;
    std::vector<Vertex> touched_;
    std::vector<Vertex> frontier_;
    std::vector<Vertex> next_;
};

void require_same_graph(const Graph& a, const Graph& b, const char* op) {
    if (&a != &b) throw ArgumentError(std::string(op) + ": operands live on different graphs");
}

}  // namespace

Signal::Signal(GraphPtr graph, std::vector<double> values)
    : graph_(std::move(graph)), values_(std::move(values)) {
    if (!graph_) throw ArgumentError("signal needs a graph");
    if (values_.size() != graph_->size()) {
        throw ArgumentError("signal length " + std::to_string(values_.size()) +
                            " does not match vertex count " + std::to_string(graph_->size()));
    }
}

Signal Signal::zeros(GraphPtr graph) {
    const auto n = graph->size();
    return Signal(std::move(graph), std::vector<double>(n, 0.0));
}

GraphFilter::GraphFilter(GraphPtr graph, std::vector<std::size_t> offsets, std::vector<Entry> entries)
    : graph_(std::move(graph)), offsets_(std::move(offsets)), entries_(std::move(entries)) {
    HopCounter hops(*graph_);
    std::vector<Vertex> cols;
    for (Vertex i = 0; i < size(); ++i) {
        cols.clear();
        for (const auto& e : row(i)) cols.push_back(e.col);
        width_ = std::max(width_, hops.farthest(i, cols));
    }
}

GraphFilter::GraphFilter(GraphPtr graph, std::vector<std::size_t> offsets, std::vector<Entry> entries,
                         unsigned width)
    : graph_(std::move(graph)),
      offsets_(std::move(offsets)),
      entries_(std::move(entries)),
      width_(width) {}

GraphFilter GraphFilter::from_triplets(GraphPtr graph, std::vector<Triplet> triplets) {
    if (!graph) throw ArgumentError("filter needs a graph");
    const std::size_t n = graph->size();
    for (const auto& t : triplets) {
        if (t.row >= n || t.col >= n) {
            throw ArgumentError("filter entry (" + std::to_string(t.row) + ", " +
                                std::to_string(t.col) + ") outside graph of " + std::to_string(n) +
                                " vertices");
        }
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row < b.row || (a.row == b.row && a.col < b.col);
    });

    std::vector<std::size_t> offsets(n + 1, 0);
    std::vector<Entry> entries;
    entries.reserve(triplets.size());
    for (std::size_t k = 0; k < triplets.size();) {
        const Vertex r = triplets[k].row;
        const Vertex c = triplets[k].col;
        double sum = 0.0;
        for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) {
            sum += triplets[k].value;
        }
        if (sum != 0.0) {
            entries.push_back({c, sum});
            ++offsets[r + 1];
        }
    }
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    return GraphFilter(std::move(graph), std::move(offsets), std::move(entries));
}

GraphFilter GraphFilter::identity(GraphPtr graph) {
    std::vector<Triplet> t;
    for (Vertex i = 0; i < graph->size(); ++i) t.push_back({i, i, 1.0});
    return from_triplets(std::move(graph), std::move(t));
}

GraphFilter GraphFilter::adjacency(GraphPtr graph) {
    std::vector<Triplet> t;
    for (Vertex i = 0; i < graph->size(); ++i) {
        for (Vertex j : graph->neighbors(i)) t.push_back({i, j, 1.0});
    }
    return from_triplets(std::move(graph), std::move(t));
}

GraphFilter GraphFilter::from_dense(GraphPtr graph, const Eigen::MatrixXd& dense) {
    const auto n = static_cast<Eigen::Index>(graph->size());
    if (dense.rows() != n || dense.cols() != n) throw ArgumentError("dense matrix shape mismatch");
    std::vector<Triplet> t;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (dense(i, j) != 0.0) {
                t.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j), dense(i, j)});
            }
        }
    }
    return from_triplets(std::move(graph), std::move(t));
}

std::span<const GraphFilter::Entry> GraphFilter::row(Vertex i) const {
    if (i >= size()) throw ArgumentError("row " + std::to_string(i) + " out of range");
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

double GraphFilter::at(Vertex i, Vertex j) const {
    const auto r = row(i);
    const auto it = std::lower_bound(r.begin(), r.end(), j,
                                     [](const Entry& e, Vertex c) { return e.col < c; });
    return (it != r.end() && it->col == j) ? it->value : 0.0;
}

void GraphFilter::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != size() || y.size() != size()) throw ArgumentError("apply: length mismatch");
    for (std::size_t i = 0; i < size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
            acc += entries_[k].value * x[entries_[k].col];
        }
        y[i] = acc;
    }
}

GraphFilter GraphFilter::transposed() const {
    const std::size_t n = size();
    std::vector<std::size_t> offsets(n + 1, 0);
    for (const auto& e : entries_) ++offsets[e.col + 1];
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    std::vector<Entry> entries(entries_.size());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    // Rows are visited ascending, so every transposed row comes out sorted.
    for (Vertex i = 0; i < n; ++i) {
        for (const auto& e : row(i)) entries[cursor[e.col]++] = {i, e.value};
    }
    // rho is symmetric, so the width carries over.
    return GraphFilter(graph_, std::move(offsets), std::move(entries), width_);
}

GraphFilter GraphFilter::scaled(double alpha) const {
    if (alpha == 0.0) return from_triplets(graph_, {});
    GraphFilter out = *this;
    bool underflow = false;
    for (auto& e : out.entries_) {
        e.value *= alpha;
        underflow |= e.value == 0.0;
    }
    return underflow ? from_triplets(graph_, out.triplets()) : out;
}

std::vector<Triplet> GraphFilter::triplets() const {
    std::vector<Triplet> out;
    out.reserve(nonzeros());
    for (Vertex i = 0; i < size(); ++i) {
        for (const auto& e : row(i)) out.push_back({i, e.col, e.value});
    }
    return out;
}

Eigen::MatrixXd GraphFilter::to_dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Vertex i = 0; i < size(); ++i) {
        for (const auto& e : row(i)) m(i, e.col) = e.value;
    }
    return m;
}

std::optional<GraphFilter::Asymmetry> GraphFilter::asymmetry(double tol) const {
    std::optional<Asymmetry> worst;
    for (Vertex i = 0; i < size(); ++i) {
        for (const auto& e : row(i)) {
            const double gap = std::abs(e.value - at(e.col, i));
            if (gap > tol && (!worst || gap > worst->gap)) worst = Asymmetry{i, e.col, gap};
        }
    }
    return worst;
}

Signal apply(const GraphFilter& h, const Signal& x) {
    require_same_graph(h.graph(), x.graph(), "apply");
    Signal y = Signal::zeros(h.graph_ptr());
    h.apply(x.values(), y.values());
    return y;
}

unsigned geodesic_width(std::span<const Triplet> entries, const Graph& g) {
    HopCounter hops(g);
    unsigned width = 0;
    for (const auto& t : entries) {
        g.check_vertex(t.row);
        g.check_vertex(t.col);
        if (t.value == 0.0 || t.row == t.col) continue;
        const Vertex target[] = {t.col};
        width = std::max(width, hops.farthest(t.row, target));
    }
    return width;
}

double schur_norm(const GraphFilter& h) {
    std::vector<double> col_sums(h.size(), 0.0);
    double best = 0.0;
    for (Vertex i = 0; i < h.size(); ++i) {
        double row_sum = 0.0;
        for (const auto& e : h.row(i)) {
            row_sum += std::abs(e.value);
            col_sums[e.col] += std::abs(e.value);
        }
        best = std::max(best, row_sum);
    }
    for (double c : col_sums) best = std::max(best, c);
    return best;
}

GraphFilter compose(const GraphFilter& a, const GraphFilter& b) {
    require_same_graph(a.graph(), b.graph(), "compose");
    const std::size_t n = a.size();
    std::vector<double> acc(n, 0.0);
    std::vector<char> used(n, 0);
    std::vector<Vertex> cols;
    std::vector<Triplet> out;
    for (Vertex i = 0; i < n; ++i) {
        cols.clear();
        for (const auto& ea : a.row(i)) {
            for (const auto& eb : b.row(ea.col)) {
                if (!used[eb.col]) {
                    used[eb.col] = 1;
                    cols.push_back(eb.col);
                }
                acc[eb.col] += ea.value * eb.value;
            }
        }
        std::sort(cols.begin(), cols.end());
        for (Vertex j : cols) {
            if (std::abs(acc[j]) >= kComposeDropThreshold) out.push_back({i, j, acc[j]});
            acc[j] = 0.0;
            used[j] = 0;
        }
    }
    return GraphFilter::from_triplets(a.graph_ptr(), std::move(out));
}

GraphFilter add(const GraphFilter& a, const GraphFilter& b) {
    require_same_graph(a.graph(), b.graph(), "add");
    auto t = a.triplets();
    const auto tb = b.triplets();
    t.insert(t.end(), tb.begin(), tb.end());
    return GraphFilter::from_triplets(a.graph_ptr(), std::move(t));
}

}  // namespace pgdsdn
