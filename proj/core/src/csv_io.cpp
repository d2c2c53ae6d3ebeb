#include "pgdsdn/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "pgdsdn/error.hpp"

namespace pgdsdn {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_real(std::string_view field, std::size_t line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw IoError("line " + std::to_string(line_no) + ": not a finite number: '" + std::string(field) + "'",
                      line_no);
    }
    return v;
}

std::uint64_t parse_index(std::string_view field, std::size_t line_no) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw IoError("line " + std::to_string(line_no) + ": not a vertex id: '" + std::string(field) + "'",
                      line_no);
    }
    return v;
}

/// Iterates data rows, skipping blank lines, '#' comments, and a header row
/// whose first field is not numeric.
template <class Fn>
void for_each_row(std::istream& in, std::size_t expected_min, std::size_t expected_max, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    bool first_data = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto fields = split(t);
        if (first_data) {
            first_data = false;
            const char c = fields[0].empty() ? '\0' : fields[0].front();
            if (!(c >= '0' && c <= '9') && c != '-' && c != '+' && c != '.') continue;
        }
        if (fields.size() < expected_min || fields.size() > expected_max) {
            throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(expected_min) +
                              (expected_max != expected_min ? "-" + std::to_string(expected_max) : "") +
                              " fields, got " + std::to_string(fields.size()),
                          line_no);
        }
        fn(fields, line_no);
    }
    if (in.bad()) throw IoError("read failure");
}

/// Parses `#key=value,key=value` into pairs.
std::vector<std::pair<std::string, std::string>> read_meta(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    const int c = in.peek();
    if (c != '#') return out;
    std::string line;
    std::getline(in, line);
    for (auto field : split(std::string_view(line).substr(1))) {
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) continue;
        out.emplace_back(std::string(trim(field.substr(0, eq))), std::string(trim(field.substr(eq + 1))));
    }
    return out;
}

const std::string* meta_get(const std::vector<std::pair<std::string, std::string>>& meta, std::string_view key) {
    for (const auto& [k, v] : meta) {
        if (k == key) return &v;
    }
    return nullptr;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PointsTable read_points_csv(std::istream& in) {
    PointsTable t;
    std::vector<double> values;
    int has_value = -1;
    for_each_row(in, 3, 4, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
        const auto id = parse_index(f[0], line_no);
        if (id != t.points.size()) {
            throw IoError("line " + std::to_string(line_no) + ": expected id " + std::to_string(t.points.size()) +
                              ", got " + std::to_string(id),
                          line_no);
        }
        const int with = f.size() == 4 ? 1 : 0;
        if (has_value == -1) has_value = with;
        if (has_value != with) {
            throw IoError("line " + std::to_string(line_no) + ": inconsistent value column", line_no);
        }
        t.points.push_back({parse_real(f[1], line_no), parse_real(f[2], line_no)});
        if (with) values.push_back(parse_real(f[3], line_no));
    });
    if (t.points.empty()) throw IoError("no points in input");
    if (has_value == 1) t.values = std::move(values);
    return t;
}

void write_points_csv(std::ostream& out, std::span<const Point> points,
                      std::optional<std::span<const double>> values) {
    if (values && values->size() != points.size()) throw ArgumentError("one value per point required");
    out << (values ? "id,x,y,value\n" : "id,x,y\n");
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << i << ',' << format_double(points[i].x) << ',' << format_double(points[i].y);
        if (values) out << ',' << format_double((*values)[i]);
        out << '\n';
    }
}

void write_edges_csv(std::ostream& out, const Graph& g) {
    out << "i,j\n";
    for (const auto& [i, j] : g.edges()) out << i << ',' << j << '\n';
}

std::vector<Edge> read_edges_csv(std::istream& in) {
    std::vector<Edge> edges;
    for_each_row(in, 2, 2, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
        const auto i = parse_index(f[0], line_no);
        const auto j = parse_index(f[1], line_no);
        if (i >= j) throw IoError("line " + std::to_string(line_no) + ": edges must satisfy i < j", line_no);
        edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(j));
    });
    return edges;
}

void write_filter_csv(std::ostream& out, const GraphFilter& h) {
    out << "#n=" << h.size() << ",width=" << h.width() << '\n';
    out << "i,j,value\n";
    for (const auto& t : h.triplets()) out << t.row << ',' << t.col << ',' << format_double(t.value) << '\n';
}

GraphFilter read_filter_csv(std::istream& in, const GraphPtr& g) {
    const auto meta = read_meta(in);
    if (const auto* n = meta_get(meta, "n"); n && std::to_string(g->size()) != *n) {
        throw IoError("filter is for " + *n + " vertices, graph has " + std::to_string(g->size()), 1);
    }
    const std::size_t offset = meta.empty() ? 0 : 1;
    std::vector<Triplet> triplets;
    for_each_row(in, 3, 3, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
        line_no += offset;
        const auto i = parse_index(f[0], line_no);
        const auto j = parse_index(f[1], line_no);
        if (i >= g->size() || j >= g->size()) {
            throw IoError("line " + std::to_string(line_no) + ": vertex out of range", line_no);
        }
        triplets.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j), parse_real(f[2], line_no)});
    });
    return GraphFilter::from_triplets(g, std::move(triplets));
}

void write_signal_csv(std::ostream& out, const Signal& x) {
    out << "id,value\n";
    for (std::size_t i = 0; i < x.size(); ++i) out << i << ',' << format_double(x[i]) << '\n';
}

Signal read_signal_csv(std::istream& in, const GraphPtr& g) {
    std::vector<double> values;
    for_each_row(in, 2, 2, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
        const auto id = parse_index(f[0], line_no);
        if (id != values.size()) {
            throw IoError("line " + std::to_string(line_no) + ": expected id " + std::to_string(values.size()),
                          line_no);
        }
        values.push_back(parse_real(f[1], line_no));
    });
    if (values.size() != g->size()) {
        throw IoError("signal has " + std::to_string(values.size()) + " entries, graph has " +
                      std::to_string(g->size()));
    }
    return Signal(g, std::move(values));
}

void write_preconditioner_csv(std::ostream& out, const DiagonalPreconditioner& p) {
    out << "#kind=" << to_string(p.kind) << ",source_width=" << p.source_width << '\n';
    out << "id,value\n";
    for (std::size_t i = 0; i < p.size(); ++i) out << i << ',' << format_double(p[i]) << '\n';
}

DiagonalPreconditioner read_preconditioner_csv(std::istream& in, const GraphPtr& g) {
    const auto meta = read_meta(in);
    DiagonalPreconditioner p;
    p.graph = g;
    try {
        if (const auto* k = meta_get(meta, "kind")) p.kind = parse_diagonal_kind(*k);
        if (const auto* w = meta_get(meta, "source_width")) p.source_width = static_cast<unsigned>(std::stoul(*w));
    } catch (const std::exception& e) {
        throw IoError(std::string("line 1: bad preconditioner header: ") + e.what(), 1);
    }
    const Signal s = read_signal_csv(in, g);
    p.diag.assign(s.values().begin(), s.values().end());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p.diag[i] > 0.0)) throw IoError("preconditioner entry " + std::to_string(i) + " is not positive");
    }
    return p;
}

void write_trace_header(std::ostream& out) { out << "method,m,residual,rel_error,weighted_error,snr\n"; }

void write_trace_rows(std::ostream& out, const SolveTrace& trace) {
    for (const auto& r : trace.records) {
        out << to_string(trace.method) << ',' << r.m << ',' << format_double(r.residual) << ','
            << format_double(r.rel_error) << ',' << format_double(r.weighted_error) << ',' << format_double(r.snr)
            << '\n';
    }
}

std::string trace_summary_json(const SolveTrace& trace, double spectral_radius, double wall_seconds) {
    const auto number = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("null"); };
    std::ostringstream ss;
    ss << "{\"method\":\"" << to_string(trace.method) << "\",\"status\":\"" << to_string(trace.status)
       << "\",\"iterations\":" << (trace.records.empty() ? 0 : trace.records.back().m)
       << ",\"estimated_rate\":" << number(trace.estimated_rate)
       << ",\"spectral_radius\":" << number(spectral_radius)
       << ",\"wall_seconds\":" << number(wall_seconds) << '}';
    return ss.str();
}

void write_round_log_csv(std::ostream& out, const RoundLog& log, bool with_values) {
    out << "epoch,round,from,to,kind,value\n";
    for (const auto& m : log.messages) {
        out << m.epoch << ',' << m.round << ',' << m.message.from << ',' << m.message.to << ','
            << to_string(m.message.kind) << ',';
        if (with_values) out << format_double(m.message.value);
        out << '\n';
    }
}

}  // namespace pgdsdn
