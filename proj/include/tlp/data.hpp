#ifndef TLP_DATA_HPP_
#define TLP_DATA_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tlp/matrix.hpp"

namespace tlp {

// Ordered adjacency matrices of an undirected weighted dynamic network over a
// fixed node set. Construction validates every snapshot: square, symmetric,
// zero diagonal, entries in [0, max_weight]. Slice indices are 1-based in
// file formats and reports; in-memory access is 0-based.
class SnapshotSequence {
public:
    SnapshotSequence(std::size_t n_nodes, std::vector<Matrix> snapshots, double max_weight);

    std::size_t n_nodes() const { return n_nodes_; }
    std::size_t size() const { return snapshots_.size(); }
    double max_weight() const { return max_weight_; }

    const Matrix& snapshot(std::size_t t) const { return snapshots_[t]; }
    const std::vector<Matrix>& snapshots() const { return snapshots_; }

private:
    std::size_t n_nodes_;
    std::vector<Matrix> snapshots_;
    double max_weight_;
};

// Text format, versioned:
//   TLPSEQ 1 <N> <T> <max_weight>
//   SNAPSHOT <t>            (t = 1..T)
//   N rows of N space-separated weights
// Weights are written with 17 significant digits so a round trip is lossless.
SnapshotSequence load_sequence(const std::string& path);
void save_sequence(const SnapshotSequence& seq, const std::string& path);
SnapshotSequence read_sequence(std::istream& in, const std::string& name);
void write_sequence(const SnapshotSequence& seq, std::ostream& out);

// Distance files use header "TLPDIST 1 <N> <T>" with the same block layout.
std::vector<Matrix> load_distances(const std::string& path);
void save_distances(const std::vector<Matrix>& distances, const std::string& path);

// weight = delta - d when d < delta, else 0; diagonal forced to zero.
Matrix distances_to_weights(const Matrix& distances, double delta);

// Whole-file convenience used by the preprocess command; max_weight = delta.
SnapshotSequence sequence_from_distances(const std::vector<Matrix>& distances, double delta);

// Division by the sequence-global max weight; every entry lands in [0, 1].
std::vector<Matrix> normalize(const SnapshotSequence& seq);
Matrix renormalize(const Matrix& m, double max_weight);

// Mean fraction of zero entries per snapshot, diagonal included.
double sparsity(const SnapshotSequence& seq);

struct WeightHistogram {
    double bin_width;                     // max_weight / n_bins
    std::vector<std::uint64_t> counts;    // nonzero weights only
};

WeightHistogram weight_histogram(const SnapshotSequence& seq, std::size_t n_bins);

// Test fixture generator: a fixed random edge support at the target sparsity,
// base weights uniform in (0, max_weight], then bounded multiplicative drift
// per slice. Deterministic per seed.
struct SyntheticSpec {
    std::size_t n_nodes = 16;
    std::size_t n_slices = 40;
    double target_sparsity = 0.7;
    double max_weight = 10.0;
    double drift_rate = 0.1;
    std::uint64_t seed = 1;
};

SnapshotSequence generate_synthetic(const SyntheticSpec& spec);

}  // namespace tlp

#endif  // TLP_DATA_HPP_
