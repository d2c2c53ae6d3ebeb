#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "pgdsdn/filter.hpp"
#include "pgdsdn/graph.hpp"

namespace pgdsdn {

enum class PayloadKind { d, v, x, p };

std::string_view to_string(PayloadKind kind);

struct Message {
    Vertex from = 0;
    Vertex to = 0;
    PayloadKind kind = PayloadKind::x;
    double value = 0.0;
};

struct RoundSummary {
    std::size_t epoch = 0;
    std::size_t round = 0;
    PayloadKind kind = PayloadKind::x;
    std::size_t messages = 0;
    unsigned max_hops = 0;
};

struct LoggedMessage {
    std::size_t epoch = 0;
    std::size_t round = 0;
    Message message;
};

struct LogPolicy {
    bool keep_messages = true;
    /// Per epoch, only the first rounds keep individual messages.
    std::size_t max_logged_rounds = std::numeric_limits<std::size_t>::max();
};

/// Every exchange round is summarized; individual messages are kept as the
/// LogPolicy allows.
struct RoundLog {
    std::vector<RoundSummary> rounds;
    std::vector<LoggedMessage> messages;
    std::size_t total_messages = 0;
    unsigned max_hops = 0;
};

/// One SDN agent. Holds only data indexed by its own neighborhood
/// B(i, w(H)); all of its arithmetic runs over that neighborhood in
/// ascending vertex order.
class Agent {
public:
    struct LocalEntry {
        Vertex vertex;
        std::size_t slot;  ///< index into neighborhood()
        double value;
    };

    Vertex id() const noexcept { return id_; }
    std::span<const Vertex> neighborhood() const noexcept { return neighborhood_; }
    /// H(i, j) for j in the neighborhood, nonzero entries only.
    std::span<const LocalEntry> local_rows() const noexcept { return rows_; }
    /// H(j, i) for j in the neighborhood, nonzero entries only.
    std::span<const LocalEntry> local_cols() const noexcept { return cols_; }
    std::span<const double> x_local() const noexcept { return x_local_; }
    double x() const { return x_local_[self_slot_]; }
    double y() const noexcept { return y_; }
    double p_value() const noexcept { return p_; }
    double d_value() const noexcept { return d_; }

private:
    friend class Network;

    std::size_t slot_of(Vertex v) const;
    void broadcast(PayloadKind kind, double value);
    void receive(const Message& msg);

    void compute_dominance();
    void finish_preconditioner();
    void prepare_pgda();
    void pgda_residual_step();
    void pgda_update_step();
    void setup_spgda();
    void spgda_step();

    Vertex id_ = 0;
    std::size_t self_slot_ = 0;
    std::vector<Vertex> neighborhood_;
    std::vector<LocalEntry> rows_;
    std::vector<LocalEntry> cols_;
    double y_ = 0.0;
    double p_ = 0.0;
    double d_ = 0.0;
    double y_scaled_ = 0.0;
    std::vector<double> x_local_;
    std::vector<double> v_local_;
    std::vector<double> d_local_;
    std::vector<double> scaled_;  ///< H~ aligned with rows_ (spgda) or cols_ (pgda)
    std::vector<Message> outbox_;
};

/// Bulk-synchronous simulation of an SDN with communication range L.
///
/// Agents compute from their local state, then one exchange round delivers
/// every outbox in ascending sender order. Each message is checked against
/// the hop range before delivery; a violation throws RangeError.
class Network {
public:
    struct Options {
        /// Worker threads for the per-agent compute phases (0 = hardware).
        std::size_t threads = 1;
        LogPolicy log;
    };

    Network(GraphPtr graph, unsigned range);
    Network(GraphPtr graph, unsigned range, Options options);

    const Graph& graph() const noexcept { return *graph_; }
    unsigned range() const noexcept { return range_; }
    std::size_t size() const noexcept { return agents_.size(); }
    const Agent& agent(Vertex v) const;

    /// Hands each agent its rows and columns of `h`. Throws RangeError when
    /// w(H) exceeds the range, before anything is distributed.
    void load_filter(const GraphFilter& h);
    void load_observation(const Signal& y);
    /// Sets x^(0) on every agent's neighborhood (zero when null).
    void reset_iterates(const Signal* initial = nullptr);
    /// Starts a new epoch; round numbers restart at zero.
    void begin_epoch();

    /// Vertex-level P_H: local d(i), one exchange, local max.
    void distributed_preconditioner();
    /// Vertex-level P_sym, H~ and y~; purely local.
    void distributed_spgda_setup();
    /// PGDA iterations, two exchange rounds each (v, then x).
    void run_pgda(std::size_t iterations);
    /// SPGDA iterations, one exchange round each.
    void run_spgda(std::size_t iterations);

    /// Observer view of x(i) held by each agent; not an agent operation.
    Signal gather_x() const;
    std::vector<double> p_values() const;

    const RoundLog& log() const noexcept { return log_; }
    std::size_t epoch() const noexcept { return epoch_; }

    using Observer = std::function<void(std::size_t iteration, const Network&)>;
    void set_observer(Observer observer) { observer_ = std::move(observer); }

private:
    template <class Fn>
    void compute(Fn&& fn);
    void exchange(PayloadKind kind);
    void require_loaded() const;

    GraphPtr graph_;
    unsigned range_;
    Options options_;
    struct Reach {
        Vertex vertex;
        unsigned hops;
    };
    /// Hop distances within B(i, L) per sender; the simulator's range oracle.
    std::vector<std::vector<Reach>> reach_;
    std::vector<Agent> agents_;
    unsigned width_ = 0;
    bool loaded_ = false;
    bool pgda_ready_ = false;
    bool spgda_ready_ = false;
    std::size_t epoch_ = 0;
    std::size_t round_ = 0;
    RoundLog log_;
    Observer observer_;
};

struct EpochResult {
    std::vector<double> x;
    std::vector<double> p_values;
    std::size_t messages = 0;
    std::size_t rounds = 0;
};

/// Per epoch t: distribute H_t, rebuild P_H at vertex level, then run PGDA
/// from zero. Nothing global about H_t is computed.
std::vector<EpochResult> run_time_varying(Network& net, std::span<const GraphFilter> filters,
                                          std::span<const Signal> observations, std::size_t iterations);

/// sum_i (|B(i, w)| - 1): messages in one neighborhood-wide exchange.
std::size_t exchange_message_count(const Graph& g, unsigned width);

}  // namespace pgdsdn
