#include "tlp/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tlp/errors.hpp"
#include "tlp/rng.hpp"

namespace tlp {

namespace {

constexpr double kSymmetryTol = 1e-9;

std::string format_weight(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Line-counting reader so parse errors can name file and line.
class LineReader {
public:
    LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

    bool next(std::string& line) {
        if (!std::getline(in_, line)) {
            return false;
        }
        ++line_no_;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return true;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(name_ + ":" + std::to_string(line_no_) + ": " + message);
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::string name_;
    std::size_t line_no_ = 0;
};

std::vector<double> parse_row(const std::string& line, std::size_t expected,
                              const LineReader& reader) {
    std::istringstream tokens(line);
    std::vector<double> row;
    row.reserve(expected);
    double v = 0.0;
    while (tokens >> v) {
        row.push_back(v);
    }
    if (!tokens.eof()) {
        reader.fail("invalid numeric value");
    }
    if (row.size() != expected) {
        reader.fail("expected " + std::to_string(expected) + " values per row, got " +
                    std::to_string(row.size()));
    }
    return row;
}

Matrix read_block(LineReader& reader, std::size_t n, std::size_t block_index) {
    std::string line;
    if (!reader.next(line)) {
        reader.fail("unexpected end of file, expected SNAPSHOT " + std::to_string(block_index));
    }
    std::istringstream header(line);
    std::string tag;
    std::size_t t = 0;
    if (!(header >> tag >> t) || tag != "SNAPSHOT" || t != block_index) {
        reader.fail("expected 'SNAPSHOT " + std::to_string(block_index) + "'");
    }
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!reader.next(line)) {
            reader.fail("unexpected end of file inside snapshot " + std::to_string(block_index));
        }
        const auto row = parse_row(line, n, reader);
        std::copy(row.begin(), row.end(), m.data() + i * n);
    }
    return m;
}

// Shared snapshot validation for load and construction. Rounding noise in
// symmetry and on the diagonal is tolerated up to 1e-9 and then removed.
void validate_snapshot(Matrix& m, double max_weight, std::size_t slice_1based,
                       const std::string& context) {
    auto fail = [&](const std::string& message) {
        throw ValidationError(context + ": snapshot " + std::to_string(slice_1based) + ": " +
                              message);
    };
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = m(i, j);
            if (!std::isfinite(v)) {
                fail("non-finite weight at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (v < 0.0) {
                fail("negative weight at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (v > max_weight) {
                fail("weight " + format_weight(v) + " exceeds max_weight " +
                     format_weight(max_weight));
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(m(i, i)) > kSymmetryTol) {
            fail("nonzero diagonal at node " + std::to_string(i));
        }
        m(i, i) = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > kSymmetryTol) {
                fail("asymmetric beyond tolerance at (" + std::to_string(i) + "," +
                     std::to_string(j) + ")");
            }
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = v;
            m(j, i) = v;
        }
    }
}

}  // namespace

SnapshotSequence::SnapshotSequence(std::size_t n_nodes, std::vector<Matrix> snapshots,
                                   double max_weight)
    : n_nodes_(n_nodes), snapshots_(std::move(snapshots)), max_weight_(max_weight) {
    if (n_nodes_ == 0) {
        throw ValidationError("sequence must have at least one node");
    }
    if (snapshots_.empty()) {
        throw ValidationError("sequence must contain at least one snapshot");
    }
    if (!(max_weight_ > 0.0) || !std::isfinite(max_weight_)) {
        throw ValidationError("max_weight must be positive and finite");
    }
    for (std::size_t t = 0; t < snapshots_.size(); ++t) {
        Matrix& m = snapshots_[t];
        if (m.rows() != n_nodes_ || m.cols() != n_nodes_) {
            throw ShapeError("snapshot " + std::to_string(t + 1) + " is " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             ", expected " + std::to_string(n_nodes_) + "x" +
                             std::to_string(n_nodes_));
        }
        validate_snapshot(m, max_weight_, t + 1, "sequence");
    }
}

SnapshotSequence read_sequence(std::istream& in, const std::string& name) {
    LineReader reader(in, name);
    std::string line;
    if (!reader.next(line)) {
        reader.fail("empty file");
    }
    std::istringstream header(line);
    std::string magic;
    int version = 0;
    std::size_t n = 0;
    std::size_t t_count = 0;
    double max_weight = 0.0;
    if (!(header >> magic >> version >> n >> t_count >> max_weight) || magic != "TLPSEQ") {
        reader.fail("malformed header, expected 'TLPSEQ 1 <N> <T> <max_weight>'");
    }
    if (version != 1) {
        reader.fail("unsupported format version " + std::to_string(version));
    }
    if (n == 0) {
        reader.fail("node count must be positive");
    }
    if (t_count == 0) {
        reader.fail("sequence must contain at least one snapshot");
    }
    if (!(max_weight > 0.0)) {
        reader.fail("max_weight must be positive");
    }
    std::vector<Matrix> snapshots;
    snapshots.reserve(t_count);
    for (std::size_t t = 1; t <= t_count; ++t) {
        const std::size_t block_line = reader.line_no() + 1;
        Matrix m = read_block(reader, n, t);
        try {
            validate_snapshot(m, max_weight, t, name + ":" + std::to_string(block_line));
        } catch (const ValidationError& e) {
            throw ParseError(e.what());
        }
        snapshots.push_back(std::move(m));
    }
    return SnapshotSequence(n, std::move(snapshots), max_weight);
}

SnapshotSequence load_sequence(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return read_sequence(in, path);
}

void write_sequence(const SnapshotSequence& seq, std::ostream& out) {
    out << "TLPSEQ 1 " << seq.n_nodes() << ' ' << seq.size() << ' '
        << format_weight(seq.max_weight()) << '\n';
    for (std::size_t t = 0; t < seq.size(); ++t) {
        out << "SNAPSHOT " << (t + 1) << '\n';
        const Matrix& m = seq.snapshot(t);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (j != 0) {
                    out << ' ';
                }
                out << format_weight(m(i, j));
            }
            out << '\n';
        }
    }
}

void save_sequence(const SnapshotSequence& seq, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_sequence(seq, out);
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

std::vector<Matrix> load_distances(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    LineReader reader(in, path);
    std::string line;
    if (!reader.next(line)) {
        reader.fail("empty file");
    }
    std::istringstream header(line);
    std::string magic;
    int version = 0;
    std::size_t n = 0;
    std::size_t t_count = 0;
    if (!(header >> magic >> version >> n >> t_count) || magic != "TLPDIST") {
        reader.fail("malformed header, expected 'TLPDIST 1 <N> <T>'");
    }
    if (version != 1) {
        reader.fail("unsupported format version " + std::to_string(version));
    }
    if (n == 0 || t_count == 0) {
        reader.fail("node and slice counts must be positive");
    }
    std::vector<Matrix> distances;
    distances.reserve(t_count);
    for (std::size_t t = 1; t <= t_count; ++t) {
        const std::size_t block_line = reader.line_no() + 1;
        Matrix m = read_block(reader, n, t);
        for (double v : m.values()) {
            if (!std::isfinite(v) || v < 0.0) {
                throw ParseError(path + ":" + std::to_string(block_line) + ": snapshot " +
                                 std::to_string(t) + ": negative or non-finite distance");
            }
        }
        distances.push_back(std::move(m));
    }
    return distances;
}

void save_distances(const std::vector<Matrix>& distances, const std::string& path) {
    if (distances.empty()) {
        throw ValidationError("distance sequence must contain at least one matrix");
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << "TLPDIST 1 " << distances.front().rows() << ' ' << distances.size() << '\n';
    for (std::size_t t = 0; t < distances.size(); ++t) {
        out << "SNAPSHOT " << (t + 1) << '\n';
        const Matrix& m = distances[t];
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (j != 0) {
                    out << ' ';
                }
                out << format_weight(m(i, j));
            }
            out << '\n';
        }
    }
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

Matrix distances_to_weights(const Matrix& distances, double delta) {
    if (delta <= 0.0) {
        throw ValidationError("distance threshold must be positive");
    }
    if (distances.rows() != distances.cols()) {
        throw ShapeError("distance matrix must be square, got " +
                         std::to_string(distances.rows()) + "x" +
                         std::to_string(distances.cols()));
    }
    const std::size_t n = distances.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(distances(i, j) - distances(j, i)) > kSymmetryTol) {
                throw ValidationError("distance matrix is asymmetric at (" + std::to_string(i) +
                                      "," + std::to_string(j) + ")");
            }
        }
    }
    Matrix weights(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = 0.5 * (distances(i, j) + distances(j, i));
            if (d < 0.0) {
                throw ValidationError("negative distance at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
            }
            const double w = d < delta ? delta - d : 0.0;
            weights(i, j) = w;
            weights(j, i) = w;
        }
        if (distances(i, i) < 0.0) {
            throw ValidationError("negative distance at (" + std::to_string(i) + "," +
                                  std::to_string(i) + ")");
        }
    }
    return weights;
}

SnapshotSequence sequence_from_distances(const std::vector<Matrix>& distances, double delta) {
    if (distances.empty()) {
        throw ValidationError("sequence must contain at least one snapshot");
    }
    std::vector<Matrix> snapshots;
    snapshots.reserve(distances.size());
    for (const Matrix& d : distances) {
        snapshots.push_back(distances_to_weights(d, delta));
    }
    return SnapshotSequence(distances.front().rows(), std::move(snapshots), delta);
}

std::vector<Matrix> normalize(const SnapshotSequence& seq) {
    std::vector<Matrix> out;
    out.reserve(seq.size());
    const double inv = 1.0 / seq.max_weight();
    for (const Matrix& m : seq.snapshots()) {
        out.push_back(scale(m, inv));
    }
    return out;
}

Matrix renormalize(const Matrix& m, double max_weight) {
    if (!(max_weight > 0.0)) {
        throw ValidationError("max_weight must be positive");
    }
    return scale(m, max_weight);
}

double sparsity(const SnapshotSequence& seq) {
    double total = 0.0;
    const double cells = static_cast<double>(seq.n_nodes() * seq.n_nodes());
    for (const Matrix& m : seq.snapshots()) {
        std::size_t zeros = 0;
        for (double v : m.values()) {
            if (v == 0.0) {
                ++zeros;
            }
        }
        total += static_cast<double>(zeros) / cells;
    }
    return total / static_cast<double>(seq.size());
}

WeightHistogram weight_histogram(const SnapshotSequence& seq, std::size_t n_bins) {
    if (n_bins == 0) {
        throw ValidationError("histogram needs at least one bin");
    }
    WeightHistogram hist;
    hist.bin_width = seq.max_weight() / static_cast<double>(n_bins);
    hist.counts.assign(n_bins, 0);
    for (const Matrix& m : seq.snapshots()) {
        for (double v : m.values()) {
            if (v <= 0.0) {
                continue;
            }
            // bin k covers (k*width, (k+1)*width], so a boundary value
            // belongs to the bin it closes
            auto idx = static_cast<std::size_t>(std::ceil(v / hist.bin_width)) - 1;
            if (idx >= n_bins) {
                idx = n_bins - 1;
            }
            hist.counts[idx] += 1;
        }
    }
    return hist;
}

SnapshotSequence generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n_nodes == 0 || spec.n_slices == 0) {
        throw ValidationError("synthetic spec: node and slice counts must be positive");
    }
    if (spec.target_sparsity < 0.0 || spec.target_sparsity > 1.0) {
        throw ValidationError("synthetic spec: target_sparsity must lie in [0,1]");
    }
    if (!(spec.max_weight > 0.0)) {
        throw ValidationError("synthetic spec: max_weight must be positive");
    }
    if (spec.drift_rate < 0.0 || spec.drift_rate > 1.0) {
        throw ValidationError("synthetic spec: drift_rate must lie in [0,1]");
    }

    const std::size_t n = spec.n_nodes;
    Rng rng(spec.seed);

    // The diagonal contributes N structural zeros, so the per-pair edge
    // probability solves  target = (N + (1-p)*N*(N-1)) / N^2.
    double p_edge = 0.0;
    if (n > 1) {
        p_edge = static_cast<double>(n) * (1.0 - spec.target_sparsity) /
                 static_cast<double>(n - 1);
        p_edge = std::clamp(p_edge, 0.0, 1.0);
    }

    struct Edge {
        std::size_t i;
        std::size_t j;
        double weight;
    };
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.next_double() < p_edge) {
                edges.push_back({i, j, 0.0});
            }
        }
    }
    for (Edge& e : edges) {
        e.weight = (1.0 - rng.next_double()) * spec.max_weight;  // (0, max_weight]
    }

    const double floor_weight = spec.max_weight * 1e-12;  // keeps the support fixed
    std::vector<Matrix> snapshots;
    snapshots.reserve(spec.n_slices);
    for (std::size_t t = 0; t < spec.n_slices; ++t) {
        if (t > 0) {
            for (Edge& e : edges) {
                const double u = rng.next_uniform(-1.0, 1.0);
                e.weight *= 1.0 + spec.drift_rate * u;
                e.weight = std::clamp(e.weight, floor_weight, spec.max_weight);
            }
        }
        Matrix m(n, n);
        for (const Edge& e : edges) {
            m(e.i, e.j) = e.weight;
            m(e.j, e.i) = e.weight;
        }
        snapshots.push_back(std::move(m));
    }
    return SnapshotSequence(n, std::move(snapshots), spec.max_weight);
}

}  // namespace tlp
