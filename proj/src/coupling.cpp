#include "potts/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "potts/errors.hpp"
#include "potts/format.hpp"
#include "potts/rng.hpp"

namespace potts {

CouplingMatrix CouplingMatrix::from_upper_triplets(int n, std::span<const Triplet> entries) {
  require(n >= 1, "coupling: n must be positive");
  const auto un = static_cast<std::size_t>(n);

  std::vector<Triplet> kept;
  kept.reserve(entries.size());
  for (const Triplet& t : entries) {
    require(t.i >= 0 && t.i < n && t.j >= 0 && t.j < n,
            "coupling: index out of range (" + std::to_string(t.i) + ", " + std::to_string(t.j) + ")");
    require(t.i != t.j, "coupling: diagonal entry at " + std::to_string(t.i));
    require(t.i < t.j, "coupling: entry below the diagonal");
    require(std::isfinite(t.value), "coupling: non-finite value");
    require(t.value >= 0.0, "coupling: negative value");
    if (t.value != 0.0) kept.push_back(t);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Triplet& a, const Triplet& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t k = 1; k < kept.size(); ++k) {
    require(kept[k].i != kept[k - 1].i || kept[k].j != kept[k - 1].j, "coupling: duplicate entry");
  }

  CouplingMatrix a;
  a.n_ = n;
  a.nnz_ = 2 * kept.size();
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  const double density = pairs > 0 ? static_cast<double>(a.nnz_) / pairs : 0.0;
  a.storage_ = density < kDenseThreshold ? Storage::sparse : Storage::dense;

  if (a.storage_ == Storage::sparse) {
    std::vector<std::size_t> degree(un, 0);
    for (const Triplet& t : kept) {
      ++degree[static_cast<std::size_t>(t.i)];
      ++degree[static_cast<std::size_t>(t.j)];
    }
    a.row_ptr_.assign(un + 1, 0);
    for (std::size_t i = 0; i < un; ++i) a.row_ptr_[i + 1] = a.row_ptr_[i] + degree[i];
    a.cols_.resize(a.nnz_);
    a.vals_.resize(a.nnz_);
    // Lower-triangle entries of row i come from triplets (j, i) with j < i and
    // precede the upper ones, so filling in sorted triplet order keeps each
    // row sorted by column.
    std::vector<std::size_t> fill(a.row_ptr_.begin(), a.row_ptr_.end() - 1);
    std::vector<std::vector<std::pair<int, double>>> lower(un);
    for (const Triplet& t : kept) lower[static_cast<std::size_t>(t.j)].emplace_back(t.i, t.value);
    std::size_t next = 0;
    for (std::size_t i = 0; i < un; ++i) {
      for (const auto& [j, v] : lower[i]) {
        a.cols_[fill[i]] = j;
        a.vals_[fill[i]++] = v;
      }
      while (next < kept.size() && static_cast<std::size_t>(kept[next].i) == i) {
        a.cols_[fill[i]] = kept[next].j;
        a.vals_[fill[i]++] = kept[next].value;
        ++next;
      }
    }
  } else {
    a.dense_.assign(un * un, 0.0);
    for (const Triplet& t : kept) {
      const auto i = static_cast<std::size_t>(t.i);
      const auto j = static_cast<std::size_t>(t.j);
      a.dense_[i * un + j] = t.value;
      a.dense_[j * un + i] = t.value;
    }
  }

  a.row_sums_.assign(un, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    a.for_each_in_row(i, [&](int, double v) { s += v; });
    a.row_sums_[static_cast<std::size_t>(i)] = s;
  }
  return a;
}

double CouplingMatrix::at(int i, int j) const {
  require(i >= 0 && i < n_ && j >= 0 && j < n_, "coupling: index out of range");
  const auto row = static_cast<std::size_t>(i);
  if (storage_ == Storage::dense) return dense_[row * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
  auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return vals_[static_cast<std::size_t>(it - cols_.begin())];
}

std::vector<Triplet> CouplingMatrix::upper_triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz_ / 2);
  for (int i = 0; i < n_; ++i) {
    for_each_in_row(i, [&](int j, double v) {
      if (j > i) out.push_back({i, j, v});
    });
  }
  return out;
}

CouplingStats stats(const CouplingMatrix& a) {
  CouplingStats s;
  const int n = a.size();
  if (n == 0) return s;
  double total = 0.0;
  double squares = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = a.row_sum(i);
    s.gamma = std::max(s.gamma, r);
    total += r;
    a.for_each_in_row(i, [&](int, double v) { squares += v * v; });
  }
  s.mean_interaction = total / n;
  s.r_bar = s.mean_interaction;
  s.non_mean_field = squares / n;
  double dev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = a.row_sum(i) - s.r_bar;
    dev += d * d;
  }
  s.irregularity = dev / n;
  return s;
}

namespace {

CouplingMatrix constant_weight(int n, const std::vector<Edge>& edges, double weight) {
  std::vector<Triplet> t;
  t.reserve(edges.size());
  for (const Edge& e : edges) t.push_back({std::min(e.u, e.v), std::max(e.u, e.v), weight});
  return CouplingMatrix::from_upper_triplets(n, t);
}

}  // namespace

CouplingMatrix scaled_adjacency(std::span<const Edge> edges, int n) {
  require(n >= 2, "scaled_adjacency: n must be at least 2");
  std::set<std::pair<int, int>> seen;
  std::vector<Edge> unique;
  unique.reserve(edges.size());
  for (const Edge& e : edges) {
    require(e.u >= 0 && e.u < n && e.v >= 0 && e.v < n,
            "scaled_adjacency: vertex out of range in edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) + ")");
    require(e.u != e.v, "scaled_adjacency: self-loop at vertex " + std::to_string(e.u));
    auto key = std::minmax(e.u, e.v);
    if (seen.insert(key).second) unique.push_back({key.first, key.second});
  }
  require(!unique.empty(), "scaled_adjacency: edge list is empty");
  const double weight = static_cast<double>(n) / (2.0 * static_cast<double>(unique.size()));
  return constant_weight(n, unique, weight);
}

CouplingMatrix curie_weiss(int n) {
  require(n >= 2, "curie_weiss: n must be at least 2");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  return constant_weight(n, edges, 1.0 / n);
}

CouplingMatrix complete_graph(int n) {
  require(n >= 2, "complete_graph: n must be at least 2");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  return scaled_adjacency(edges, n);
}

CouplingMatrix cycle_graph(int n) {
  require(n >= 3, "cycle_graph: n must be at least 3");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return scaled_adjacency(edges, n);
}

CouplingMatrix circulant(int n, std::span<const int> offsets) {
  require(!offsets.empty(), "circulant: no offsets");
  std::vector<Edge> edges;
  for (int d : offsets) {
    require(d >= 1 && 2 * d < n, "circulant: offset " + std::to_string(d) + " must satisfy 1 <= d < n/2");
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + d) % n});
  }
  return scaled_adjacency(edges, n);
}

CouplingMatrix disjoint_cliques(int m, int n_minus_m) {
  require(m >= 2 && n_minus_m >= 2, "disjoint_cliques: both cliques need at least 2 vertices");
  const int n = m + n_minus_m;
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) edges.push_back({i, j});
  for (int i = m; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  return scaled_adjacency(edges, n);
}

CouplingMatrix complete_bipartite(int m, int n_minus_m) {
  require(m >= 1 && n_minus_m >= 1, "complete_bipartite: both parts need at least 1 vertex");
  const int n = m + n_minus_m;
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i)
    for (int j = m; j < n; ++j) edges.push_back({i, j});
  return scaled_adjacency(edges, n);
}

CouplingMatrix erdos_renyi(int n, double p, std::uint64_t seed) {
  require(n >= 2, "erdos_renyi: n must be at least 2");
  require(p > 0.0 && p <= 1.0, "erdos_renyi: p must lie in (0, 1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.push_back({i, j});
  require(!edges.empty(), "erdos_renyi: sampled graph has no edges");
  return constant_weight(n, edges, 1.0 / (static_cast<double>(n) * p));
}

CouplingMatrix sbm(int n, double alpha, double p1, double p2, double q_between, std::uint64_t seed) {
  require(n >= 2, "sbm: n must be at least 2");
  require(alpha > 0.0 && alpha < 1.0, "sbm: block fraction must lie in (0, 1)");
  for (double p : {p1, p2, q_between}) require(p >= 0.0 && p <= 1.0, "sbm: probabilities must lie in [0, 1]");
  const int n1 = static_cast<int>(std::lround(alpha * n));
  require(n1 >= 1 && n1 <= n - 1, "sbm: both blocks must be non-empty");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool bi = i < n1;
      const bool bj = j < n1;
      const double p = bi && bj ? p1 : (!bi && !bj ? p2 : q_between);
      if (rng.uniform() < p) edges.push_back({i, j});
    }
  }
  require(!edges.empty(), "sbm: sampled graph has no edges");
  return scaled_adjacency(edges, n);
}

void write_coupling(std::ostream& out, const CouplingMatrix& a) {
  const auto entries = a.upper_triplets();
  out << "potts-coupling v1 " << a.size() << ' ' << entries.size() << '\n';
  for (const Triplet& t : entries) {
    out << (t.i + 1) << ' ' << (t.j + 1) << ' ' << format_double(t.value) << '\n';
  }
}

CouplingMatrix read_coupling(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "coupling file: missing header");
  std::istringstream header(line);
  std::string magic, version;
  long long n = 0, nnz = 0;
  header >> magic >> version >> n >> nnz;
  require(static_cast<bool>(header) && magic == "potts-coupling" && version == "v1",
          "coupling file: header must be 'potts-coupling v1 <n> <nnz>'");
  require(n >= 1 && nnz >= 0, "coupling file: invalid n or nnz in header");

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    long long i = 0, j = 0;
    std::string value_text;
    row >> i >> j >> value_text;
    require(static_cast<bool>(row), "coupling file: malformed entry on line " + std::to_string(line_no));
    double value = 0.0;
    auto res = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    require(res.ec == std::errc() && res.ptr == value_text.data() + value_text.size(),
            "coupling file: bad value on line " + std::to_string(line_no));
    require(i >= 1 && j >= 1 && i <= n && j <= n, "coupling file: index out of range on line " + std::to_string(line_no));
    require(i < j, "coupling file: entry not in the upper triangle on line " + std::to_string(line_no));
    entries.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), value});
  }
  require(static_cast<long long>(entries.size()) == nnz,
          "coupling file: header announces " + std::to_string(nnz) + " entries, found " + std::to_string(entries.size()));
  return CouplingMatrix::from_upper_triplets(static_cast<int>(n), entries);
}

}  // namespace potts
