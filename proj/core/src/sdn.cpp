#include "pgdsdn/sdn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgdsdn/error.hpp"
#include "pgdsdn/parallel.hpp"

namespace pgdsdn {

std::string_view to_string(PayloadKind kind) {
    switch (kind) {
        case PayloadKind::d: return "d";
        case PayloadKind::v: return "v";
        case PayloadKind::x: return "x";
        case PayloadKind::p: return "p";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Agent

std::size_t Agent::slot_of(Vertex v) const {
    const auto it = std::lower_bound(neighborhood_.begin(), neighborhood_.end(), v);
    if (it == neighborhood_.end() || *it != v) {
        throw RangeError("agent " + std::to_string(id_) + " has no slot for vertex " + std::to_string(v),
                         v, id_, 0);
    }
    return static_cast<std::size_t>(it - neighborhood_.begin());
}

void Agent::broadcast(PayloadKind kind, double value) {
    for (Vertex k : neighborhood_) {
        if (k != id_) outbox_.push_back({id_, k, kind, value});
    }
}

void Agent::receive(const Message& msg) {
    const std::size_t slot = slot_of(msg.from);
    switch (msg.kind) {
        case PayloadKind::d: d_local_[slot] = msg.value; break;
        case PayloadKind::v: v_local_[slot] = msg.value; break;
        case PayloadKind::x: x_local_[slot] = msg.value; break;
        case PayloadKind::p: break;
    }
}

void Agent::compute_dominance() {
    double row_sum = 0.0;
    for (const auto& e : rows_) row_sum += std::abs(e.value);
    double col_sum = 0.0;
    for (const auto& e : cols_) col_sum += std::abs(e.value);
    d_ = std::max(row_sum, col_sum);
    d_local_[self_slot_] = d_;
    broadcast(PayloadKind::d, d_);
}

void Agent::finish_preconditioner() {
    double best = 0.0;
    for (double d : d_local_) best = std::max(best, d);
    p_ = best;
}

void Agent::prepare_pgda() {
    scaled_.clear();
    for (const auto& e : cols_) scaled_.push_back(e.value / (p_ * p_));
}

void Agent::pgda_residual_step() {
    double acc = 0.0;
    for (const auto& e : rows_) acc += e.value * x_local_[e.slot];
    const double v = y_ - acc;
    v_local_[self_slot_] = v;
    broadcast(PayloadKind::v, v);
}

void Agent::pgda_update_step() {
    double acc = 0.0;
    for (std::size_t k = 0; k < cols_.size(); ++k) acc += scaled_[k] * v_local_[cols_[k].slot];
    x_local_[self_slot_] = x_local_[self_slot_] + acc;
    broadcast(PayloadKind::x, x_local_[self_slot_]);
}

void Agent::setup_spgda() {
    double sum = 0.0;
    for (const auto& e : rows_) sum += std::abs(e.value);
    if (sum == 0.0) throw ArgumentError("agent " + std::to_string(id_) + " holds a zero filter row");
    p_ = sum;
    scaled_.clear();
    for (const auto& e : rows_) scaled_.push_back(e.value / p_);
    y_scaled_ = y_ / p_;
}

void Agent::spgda_step() {
    double acc = 0.0;
    for (std::size_t k = 0; k < rows_.size(); ++k) acc += scaled_[k] * x_local_[rows_[k].slot];
    x_local_[self_slot_] = x_local_[self_slot_] + y_scaled_ - acc;
    broadcast(PayloadKind::x, x_local_[self_slot_]);
}

// ---------------------------------------------------------------------------
// Network

Network::Network(GraphPtr graph, unsigned range) : Network(std::move(graph), range, Options{}) {}

Network::Network(GraphPtr graph, unsigned range, Options options)
    : graph_(std::move(graph)), range_(range), options_(options) {
    if (!graph_) throw ArgumentError("network needs a graph");
    reach_.resize(graph_->size());
    for (Vertex i = 0; i < graph_->size(); ++i) {
        const auto dist = hop_distances(*graph_, i, static_cast<int>(range_));
        for (Vertex v = 0; v < dist.size(); ++v) {
            if (dist[v] >= 0) reach_[i].push_back({v, static_cast<unsigned>(dist[v])});
        }
    }
    agents_.resize(graph_->size());
    for (Vertex i = 0; i < agents_.size(); ++i) agents_[i].id_ = i;
}

const Agent& Network::agent(Vertex v) const {
    graph_->check_vertex(v);
    return agents_[v];
}

void Network::load_filter(const GraphFilter& h) {
    if (&h.graph() != graph_.get()) throw ArgumentError("filter lives on a different graph");
    if (h.width() > range_) {
        throw RangeError("filter geodesic-width " + std::to_string(h.width()) +
                             " exceeds communication range " + std::to_string(range_),
                         0, 0, h.width());
    }
    width_ = h.width();
    const auto balls = all_balls(*graph_, width_);
    const GraphFilter ht = h.transposed();
    for (Vertex i = 0; i < agents_.size(); ++i) {
        Agent& a = agents_[i];
        a.neighborhood_ = balls[i].members;
        a.self_slot_ = a.slot_of(i);
        a.rows_.clear();
        a.cols_.clear();
        for (const auto& e : h.row(i)) a.rows_.push_back({e.col, a.slot_of(e.col), e.value});
        for (const auto& e : ht.row(i)) a.cols_.push_back({e.col, a.slot_of(e.col), e.value});
        const std::size_t m = a.neighborhood_.size();
        a.x_local_.assign(m, 0.0);
        a.v_local_.assign(m, 0.0);
        a.d_local_.assign(m, 0.0);
        a.scaled_.clear();
        a.p_ = a.d_ = 0.0;
        a.outbox_.clear();
    }
    loaded_ = true;
    pgda_ready_ = spgda_ready_ = false;
}

void Network::load_observation(const Signal& y) {
    if (&y.graph() != graph_.get()) throw ArgumentError("observation lives on a different graph");
    for (Vertex i = 0; i < agents_.size(); ++i) agents_[i].y_ = y[i];
}

void Network::reset_iterates(const Signal* initial) {
    require_loaded();
    if (initial && &initial->graph() != graph_.get()) {
        throw ArgumentError("initial iterate lives on a different graph");
    }
    for (auto& a : agents_) {
        for (std::size_t s = 0; s < a.neighborhood_.size(); ++s) {
            a.x_local_[s] = initial ? (*initial)[a.neighborhood_[s]] : 0.0;
        }
    }
}

void Network::begin_epoch() {
    if (!log_.rounds.empty() || round_ > 0) ++epoch_;
    round_ = 0;
}

void Network::require_loaded() const {
    if (!loaded_) throw ArgumentError("no filter has been loaded into the network");
}

template <class Fn>
void Network::compute(Fn&& fn) {
    parallel_for(agents_.size(), options_.threads, [&](std::size_t i) { fn(agents_[i]); });
}

void Network::exchange(PayloadKind kind) {
    RoundSummary summary{epoch_, round_, kind, 0, 0};
    const bool keep = options_.log.keep_messages && round_ < options_.log.max_logged_rounds;
    for (auto& sender : agents_) {
        for (const auto& msg : sender.outbox_) {
            const auto& reach = reach_[msg.from];
            const auto hit = std::lower_bound(reach.begin(), reach.end(), msg.to,
                                              [](const Reach& r, Vertex v) { return r.vertex < v; });
            if (hit == reach.end() || hit->vertex != msg.to) {
                const auto hops = geodesic_distance(*graph_, msg.from, msg.to);
                throw RangeError("message " + std::to_string(msg.from) + " -> " + std::to_string(msg.to) +
                                     " spans " + std::to_string(hops.value_or(0)) + " hops, range is " +
                                     std::to_string(range_),
                                 msg.from, msg.to, hops.value_or(0));
            }
            agents_[msg.to].receive(msg);
            ++summary.messages;
            summary.max_hops = std::max(summary.max_hops, hit->hops);
            if (keep) log_.messages.push_back({epoch_, round_, msg});
        }
        sender.outbox_.clear();
    }
    log_.max_hops = std::max(log_.max_hops, summary.max_hops);
    log_.total_messages += summary.messages;
    log_.rounds.push_back(summary);
    ++round_;
}

void Network::distributed_preconditioner() {
    require_loaded();
    if (width_ > range_) throw RangeError("filter width exceeds communication range", 0, 0, width_);
    compute([](Agent& a) { a.compute_dominance(); });
    exchange(PayloadKind::d);
    compute([](Agent& a) {
        a.finish_preconditioner();
        a.prepare_pgda();
    });
    pgda_ready_ = true;
    spgda_ready_ = false;
}

void Network::distributed_spgda_setup() {
    require_loaded();
    compute([](Agent& a) { a.setup_spgda(); });
    spgda_ready_ = true;
    pgda_ready_ = false;
}

void Network::run_pgda(std::size_t iterations) {
    if (!pgda_ready_) throw ArgumentError("run distributed_preconditioner before PGDA");
    for (std::size_t m = 1; m <= iterations; ++m) {
        compute([](Agent& a) { a.pgda_residual_step(); });
        exchange(PayloadKind::v);
        compute([](Agent& a) { a.pgda_update_step(); });
        exchange(PayloadKind::x);
        if (observer_) observer_(m, *this);
    }
}

void Network::run_spgda(std::size_t iterations) {
    if (!spgda_ready_) throw ArgumentError("run distributed_spgda_setup before SPGDA");
    for (std::size_t m = 1; m <= iterations; ++m) {
        compute([](Agent& a) { a.spgda_step(); });
        exchange(PayloadKind::x);
        if (observer_) observer_(m, *this);
    }
}

Signal Network::gather_x() const {
    Signal x = Signal::zeros(graph_);
    for (Vertex i = 0; i < agents_.size(); ++i) {
        x[i] = agents_[i].x_local_.empty() ? 0.0 : agents_[i].x();
    }
    return x;
}

std::vector<double> Network::p_values() const {
    std::vector<double> p(agents_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = agents_[i].p_;
    return p;
}

std::vector<EpochResult> run_time_varying(Network& net, std::span<const GraphFilter> filters,
                                          std::span<const Signal> observations, std::size_t iterations) {
    if (filters.size() != observations.size()) {
        throw ArgumentError("time-varying run needs one observation per filter");
    }
    std::vector<EpochResult> out;
    for (std::size_t t = 0; t < filters.size(); ++t) {
        net.begin_epoch();
        const std::size_t messages_before = net.log().total_messages;
        const std::size_t rounds_before = net.log().rounds.size();
        try {
            net.load_filter(filters[t]);
        } catch (const RangeError& e) {
            throw RangeError("epoch " + std::to_string(t) + ": " + e.what(), e.from(), e.to(), e.hops());
        }
        net.load_observation(observations[t]);
        net.reset_iterates();
        net.distributed_preconditioner();
        net.run_pgda(iterations);

        EpochResult r;
        const Signal gathered = net.gather_x();
        r.x.assign(gathered.values().begin(), gathered.values().end());
        r.p_values = net.p_values();
        r.messages = net.log().total_messages - messages_before;
        r.rounds = net.log().rounds.size() - rounds_before;
        out.push_back(std::move(r));
    }
    return out;
}

std::size_t exchange_message_count(const Graph& g, unsigned width) {
    std::size_t total = 0;
    for (Vertex i = 0; i < g.size(); ++i) total += ball(g, i, width).members.size() - 1;
    return total;
}

}  // namespace pgdsdn
