#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgdsdn/filter.hpp"
#include "pgdsdn/graph.hpp"
#include "pgdsdn/preconditioner.hpp"
#include "pgdsdn/sdn.hpp"
#include "pgdsdn/solver.hpp"

namespace pgdsdn {

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

/// Writes `content` to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// `id,x,y[,value]`, one vertex per row, ids 0..n-1 contiguous.
struct PointsTable {
    std::vector<Point> points;
    std::optional<std::vector<double>> values;
};

PointsTable read_points_csv(std::istream& in);
void write_points_csv(std::ostream& out, std::span<const Point> points,
                      std::optional<std::span<const double>> values = std::nullopt);

/// `i,j` with i < j.
void write_edges_csv(std::ostream& out, const Graph& g);
std::vector<Edge> read_edges_csv(std::istream& in);

/// `#n=<n>,width=<w>` then `i,j,value`.
void write_filter_csv(std::ostream& out, const GraphFilter& h);
GraphFilter read_filter_csv(std::istream& in, const GraphPtr& g);

/// `id,value`.
void write_signal_csv(std::ostream& out, const Signal& x);
Signal read_signal_csv(std::istream& in, const GraphPtr& g);

/// `#kind=<kind>,source_width=<w>` then `id,value`.
void write_preconditioner_csv(std::ostream& out, const DiagonalPreconditioner& p);
DiagonalPreconditioner read_preconditioner_csv(std::istream& in, const GraphPtr& g);

/// `method,m,residual,rel_error,weighted_error,snr`.
void write_trace_header(std::ostream& out);
void write_trace_rows(std::ostream& out, const SolveTrace& trace);

/// JSON object with status, rate estimate, spectral radius and wall time.
std::string trace_summary_json(const SolveTrace& trace, double spectral_radius, double wall_seconds);

/// `epoch,round,from,to,kind,value`; the value column is left empty when
/// `with_values` is false.
void write_round_log_csv(std::ostream& out, const RoundLog& log, bool with_values = true);

}  // namespace pgdsdn
