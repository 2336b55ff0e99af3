#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace potts {

/// Undirected edge between 0-based vertices.
struct Edge {
  int u = 0;
  int v = 0;
};

/// Upper-triangle entry (i < j) of a coupling matrix, 0-based.
struct Triplet {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

/// Symmetric, non-negative interaction matrix with zero diagonal.
///
/// Stored as compressed rows when fewer than a quarter of the off-diagonal
/// entries are non-zero, and as a dense row-major array otherwise. Callers
/// never see the difference: neighbours are visited through
/// for_each_in_row(), which reports only non-zero entries in increasing
/// column order for both layouts. Immutable once built.
class CouplingMatrix {
 public:
  enum class Storage { sparse, dense };

  static constexpr double kDenseThreshold = 0.25;

  CouplingMatrix() = default;

  /// Builds from upper-triangle entries. Zero values are dropped; duplicate
  /// positions, diagonal entries, negative or non-finite values and
  /// out-of-range indices are rejected.
  static CouplingMatrix from_upper_triplets(int n, std::span<const Triplet> entries);

  int size() const { return n_; }
  Storage storage() const { return storage_; }

  /// Number of stored off-diagonal non-zeros, counting both triangles.
  std::size_t nonzeros() const { return nnz_; }

  double at(int i, int j) const;
  double row_sum(int i) const { return row_sums_[static_cast<std::size_t>(i)]; }
  std::span<const double> row_sums() const { return row_sums_; }

  /// Non-zero upper-triangle entries in row-major order.
  std::vector<Triplet> upper_triplets() const;

  /// Calls f(j, a_ij) for every j with a_ij != 0, in increasing j.
  template <class F>
  void for_each_in_row(int i, F&& f) const {
    const auto row = static_cast<std::size_t>(i);
    if (storage_ == Storage::sparse) {
      for (std::size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) f(cols_[k], vals_[k]);
    } else {
      const double* a = dense_.data() + row * static_cast<std::size_t>(n_);
      for (int j = 0; j < n_; ++j) {
        if (a[j] != 0.0) f(j, a[j]);
      }
    }
  }

 private:
  int n_ = 0;
  Storage storage_ = Storage::sparse;
  std::size_t nnz_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<int> cols_;
  std::vector<double> vals_;
  std::vector<double> dense_;
  std::vector<double> row_sums_;
};

struct CouplingStats {
  double gamma = 0.0;             // max_i R_i
  double mean_interaction = 0.0;  // (1/N) sum_ij a_ij
  double non_mean_field = 0.0;    // (1/N) sum_ij a_ij^2
  double irregularity = 0.0;      // (1/N) sum_i (R_i - R_bar)^2
  double r_bar = 0.0;
};

CouplingStats stats(const CouplingMatrix& a);

// Builders. Graph-based builders return the scaled adjacency
// a_ij = N / (2|E|) on edges, so the mean interaction is exactly one.

CouplingMatrix scaled_adjacency(std::span<const Edge> edges, int n);
CouplingMatrix curie_weiss(int n);
CouplingMatrix complete_graph(int n);
CouplingMatrix cycle_graph(int n);
/// Vertex i is joined to i +- d (mod n) for every d in offsets;
/// offsets {1, 2} give the 4-regular circulant.
CouplingMatrix circulant(int n, std::span<const int> offsets);
CouplingMatrix disjoint_cliques(int m, int n_minus_m);
CouplingMatrix complete_bipartite(int m, int n_minus_m);

/// Erdos-Renyi G(n, p) with weights 1/(n p). Pairs (i, j), i < j, are visited
/// row by row and each consumes exactly one uniform draw from Rng(seed).
CouplingMatrix erdos_renyi(int n, double p, std::uint64_t seed);

/// Two-block random graph; the first round(alpha * n) vertices form block 1.
/// Same draw order as erdos_renyi. Returns the scaled adjacency.
CouplingMatrix sbm(int n, double alpha, double p1, double p2, double q_between, std::uint64_t seed);

// Text format: header "potts-coupling v1 <n> <nnz>" followed by nnz lines
// "i j value" (1-based, i < j). Values are written in shortest round-trip
// form, so write/read is exact.
void write_coupling(std::ostream& out, const CouplingMatrix& a);
CouplingMatrix read_coupling(std::istream& in);

}  // namespace potts
