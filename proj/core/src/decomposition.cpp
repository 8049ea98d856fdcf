#include "msras/decomposition.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <stdexcept>

namespace msras {

std::vector<std::vector<index_t>> partition_structured(const Grid& grid, index_t px, index_t py) {
  if (px < 1 || py < 1) throw std::invalid_argument("partition_structured: counts must be >= 1");
  if (grid.nx() % px != 0 || grid.ny() % py != 0)
    throw std::invalid_argument("partition_structured: block counts must divide the grid dimensions");
  const index_t bx = grid.nx() / px, by = grid.ny() / py;
  std::vector<std::vector<index_t>> cores(static_cast<std::size_t>(px * py));
  for (index_t cell = 0; cell < grid.cell_count(); ++cell) {
    const index_t jx = grid.cell_ix(cell) / bx;
    const index_t jy = grid.cell_iy(cell) / by;
    cores[static_cast<std::size_t>(jy * px + jx)].push_back(cell);
  }
  return cores;
}

std::vector<std::vector<index_t>> partition_greedy(const DofGraph& graph, int m, std::uint64_t seed) {
  const index_t n = graph.size();
  if (m <= 0) throw std::invalid_argument("partition_greedy: subdomain count must be positive");
  if (static_cast<index_t>(m) > n) throw std::invalid_argument("partition_greedy: more subdomains than cells");

  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<index_t>> cores(static_cast<std::size_t>(m));
  index_t remaining = n;
  index_t first_seed = static_cast<index_t>(seed % static_cast<std::uint64_t>(n));

  for (int j = 0; j < m; ++j) {
    const index_t target = (remaining + static_cast<index_t>(m - j) - 1) / static_cast<index_t>(m - j);
    index_t start = -1;
    if (j == 0) {
      start = first_seed;
    } else {
      for (index_t c = 0; c < n; ++c)
        if (owner[c] < 0) {
          start = c;
          break;
        }
    }
    // Grow a breadth-first region of `target` unassigned cells; frontier
    // neighbors are visited in sorted order so the result is deterministic.
    std::deque<index_t> frontier;
    std::vector<char> queued(static_cast<std::size_t>(n), 0);
    frontier.push_back(start);
    queued[start] = 1;
    index_t taken = 0;
    while (taken < target) {
      if (frontier.empty()) {
        // disconnected remainder: jump to the smallest unassigned cell
        index_t next = -1;
        for (index_t c = 0; c < n; ++c)
          if (owner[c] < 0 && !queued[c]) {
            next = c;
            break;
          }
        if (next < 0) break;
        frontier.push_back(next);
        queued[next] = 1;
        continue;
      }
      const index_t c = frontier.front();
      frontier.pop_front();
      if (owner[c] >= 0) continue;
      owner[c] = j;
      cores[static_cast<std::size_t>(j)].push_back(c);
      ++taken;
      for (index_t nb : graph.adjacent(c))
        if (owner[nb] < 0 && !queued[nb]) {
          frontier.push_back(nb);
          queued[nb] = 1;
        }
    }
    remaining -= taken;
    std::sort(cores[static_cast<std::size_t>(j)].begin(), cores[static_cast<std::size_t>(j)].end());
  }
  return cores;
}

std::vector<index_t> extend_layers(std::span<const index_t> cells, const DofGraph& adjacency, int k) {
  if (k < 0) throw std::invalid_argument("extend_layers: negative layer count");
  std::vector<char> in(static_cast<std::size_t>(adjacency.size()), 0);
  std::vector<index_t> current(cells.begin(), cells.end());
  for (index_t c : current) in[c] = 1;
  std::vector<index_t> frontier = current;
  for (int layer = 0; layer < k; ++layer) {
    std::vector<index_t> next;
    for (index_t c : frontier)
      for (index_t nb : adjacency.adjacent(c))
        if (!in[nb]) {
          in[nb] = 1;
          next.push_back(nb);
        }
    current.insert(current.end(), next.begin(), next.end());
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  std::sort(current.begin(), current.end());
  return current;
}

namespace {

std::vector<index_t> cells_to_dofs(std::span<const index_t> cells, int dofs_per_cell) {
  std::vector<index_t> dofs;
  dofs.reserve(cells.size() * static_cast<std::size_t>(dofs_per_cell));
  for (index_t c : cells)
    for (int k = 0; k < dofs_per_cell; ++k) dofs.push_back(c * dofs_per_cell + k);
  return dofs;
}

/// BFS depth of each overlap cell from the complement of omega_j
/// (cells adjacent to the complement have depth 1). Returns depth capped at
/// `cap`; every cell gets `cap` when omega_j covers the whole mesh.
std::vector<index_t> depth_from_complement(std::span<const index_t> cells, const DofGraph& adjacency, index_t cap) {
  std::vector<index_t> local(static_cast<std::size_t>(adjacency.size()), -1);
  for (std::size_t k = 0; k < cells.size(); ++k) local[cells[k]] = static_cast<index_t>(k);

  std::vector<index_t> depth(cells.size(), cap);
  std::deque<index_t> queue;  // holds local indices
  for (std::size_t k = 0; k < cells.size(); ++k) {
    for (index_t nb : adjacency.adjacent(cells[k]))
      if (local[nb] < 0) {
        depth[k] = 1;
        queue.push_back(static_cast<index_t>(k));
        break;
      }
  }
  while (!queue.empty()) {
    const index_t k = queue.front();
    queue.pop_front();
    if (depth[k] >= cap) continue;
    for (index_t nb : adjacency.adjacent(cells[k])) {
      const index_t lnb = local[nb];
      if (lnb >= 0 && depth[lnb] > depth[k] + 1) {
        depth[lnb] = depth[k] + 1;
        queue.push_back(lnb);
      }
    }
  }
  return depth;
}

}  // namespace

void build_pu(Decomposition& decomp, const DofGraph& adjacency, PuMode mode) {
  const index_t n_cells = adjacency.size();
  const int m = decomp.size();

  std::vector<std::vector<index_t>> raw(static_cast<std::size_t>(m));
  std::vector<double> total(static_cast<std::size_t>(n_cells), 0.0);
  const index_t cap = static_cast<index_t>(decomp.layers.overlap_layers) + 1;

  for (int j = 0; j < m; ++j) {
    const auto& cells = decomp.overlap_cells[static_cast<std::size_t>(j)];
    if (mode == PuMode::Multiplicity) {
      raw[static_cast<std::size_t>(j)].assign(cells.size(), 1);
    } else {
      raw[static_cast<std::size_t>(j)] = depth_from_complement(cells, adjacency, cap);
    }
    for (std::size_t k = 0; k < cells.size(); ++k)
      total[cells[k]] += static_cast<double>(raw[static_cast<std::size_t>(j)][k]);
  }
  for (index_t c = 0; c < n_cells; ++c)
    if (total[c] == 0.0) throw std::runtime_error("build_pu: cell " + std::to_string(c) + " not covered by any subdomain");

  decomp.pu.assign(static_cast<std::size_t>(m), {});
  for (int j = 0; j < m; ++j) {
    const auto& cells = decomp.overlap_cells[static_cast<std::size_t>(j)];
    auto& weights = decomp.pu[static_cast<std::size_t>(j)];
    weights.resize(cells.size() * static_cast<std::size_t>(decomp.dofs_per_cell));
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const double w = static_cast<double>(raw[static_cast<std::size_t>(j)][k]) / total[cells[k]];
      for (int d = 0; d < decomp.dofs_per_cell; ++d) weights[k * static_cast<std::size_t>(decomp.dofs_per_cell) + d] = w;
    }
  }
}

Decomposition make_decomposition(const DofGraph& adjacency, std::vector<std::vector<index_t>> cores,
                                 const LayerConfig& layers, PuMode mode, int dofs_per_cell) {
  if (layers.overlap_layers < 1) throw std::invalid_argument("make_decomposition: overlap_layers must be >= 1");
  if (layers.oversample_layers < 0) throw std::invalid_argument("make_decomposition: negative oversample_layers");

  Decomposition d;
  d.dofs_per_cell = dofs_per_cell;
  d.layers = layers;
  d.core_cells = std::move(cores);

  // cores must partition the cells
  std::vector<char> seen(static_cast<std::size_t>(adjacency.size()), 0);
  for (auto& core : d.core_cells) {
    std::sort(core.begin(), core.end());
    for (index_t c : core) {
      if (c < 0 || c >= adjacency.size() || seen[c]) throw std::invalid_argument("make_decomposition: cores are not a partition");
      seen[c] = 1;
    }
  }
  for (index_t c = 0; c < adjacency.size(); ++c)
    if (!seen[c]) throw std::invalid_argument("make_decomposition: cores are not exhaustive");

  const int m = d.size();
  d.overlap_cells.resize(static_cast<std::size_t>(m));
  d.oversample_cells.resize(static_cast<std::size_t>(m));
  d.overlap_dofs.resize(static_cast<std::size_t>(m));
  d.oversample_dofs.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    auto& core = d.core_cells[static_cast<std::size_t>(j)];
    d.overlap_cells[static_cast<std::size_t>(j)] = extend_layers(core, adjacency, layers.overlap_layers);
    d.oversample_cells[static_cast<std::size_t>(j)] =
        extend_layers(d.overlap_cells[static_cast<std::size_t>(j)], adjacency, layers.oversample_layers);
    d.overlap_dofs[static_cast<std::size_t>(j)] = cells_to_dofs(d.overlap_cells[static_cast<std::size_t>(j)], dofs_per_cell);
    d.oversample_dofs[static_cast<std::size_t>(j)] = cells_to_dofs(d.oversample_cells[static_cast<std::size_t>(j)], dofs_per_cell);
  }
  build_pu(d, adjacency, mode);
  return d;
}

std::vector<double> restriction_apply(std::span<const index_t> dofs, std::span<const double> x) {
  std::vector<double> local(dofs.size());
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    if (dofs[k] < 0 || dofs[k] >= static_cast<index_t>(x.size())) throw std::out_of_range("restriction_apply: index out of range");
    local[k] = x[dofs[k]];
  }
  return local;
}

void prolong_add(std::span<const index_t> dofs, std::span<const double> weights, std::span<const double> local,
                 std::span<double> global) {
  if (local.size() != dofs.size() || (!weights.empty() && weights.size() != dofs.size()))
    throw std::invalid_argument("prolong_add: size mismatch");
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    if (dofs[k] < 0 || dofs[k] >= static_cast<index_t>(global.size())) throw std::out_of_range("prolong_add: index out of range");
    global[dofs[k]] += (weights.empty() ? 1.0 : weights[k]) * local[k];
  }
}

void dump_decomposition(std::ostream& out, const Decomposition& d) {
  for (int j = 0; j < d.size(); ++j) {
    const char* kinds[3] = {"core", "overlap", "oversample"};
    const std::vector<std::vector<index_t>>* sets[3] = {&d.core_cells, &d.overlap_cells, &d.oversample_cells};
    for (int k = 0; k < 3; ++k) {
      out << j << " " << kinds[k] << ":";
      for (index_t c : (*sets[k])[static_cast<std::size_t>(j)]) out << " " << c;
      out << "\n";
    }
  }
}

}  // namespace msras
