#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "msras/grid.hpp"

namespace msras {

enum class PuMode { Multiplicity, Ramp };

struct LayerConfig {
  int overlap_layers = 2;     // core -> omega_j
  int oversample_layers = 2;  // omega_j -> omega_j^*
};

/// Overlapping decomposition: non-overlapping cores, overlap sets omega_j,
/// oversampling sets omega_j^*, block-expanded DOF index maps and discrete
/// partition-of-unity weights (aligned with overlap_dofs). Immutable after
/// construction and read-shared by all subdomain workers.
struct Decomposition {
  int dofs_per_cell = 1;
  LayerConfig layers;
  std::vector<std::vector<index_t>> core_cells;
  std::vector<std::vector<index_t>> overlap_cells;
  std::vector<std::vector<index_t>> oversample_cells;
  std::vector<std::vector<index_t>> overlap_dofs;
  std::vector<std::vector<index_t>> oversample_dofs;
  std::vector<std::vector<double>> pu;

  int size() const { return static_cast<int>(core_cells.size()); }
};

/// px * py equal rectangular blocks; px, py must divide nx, ny.
std::vector<std::vector<index_t>> partition_structured(const Grid& grid, index_t px, index_t py);

/// Deterministic greedy graph-growing partition into M parts with size
/// imbalance <= 10% on connected graphs; `seed` picks the first growth seed.
std::vector<std::vector<index_t>> partition_greedy(const DofGraph& graph, int m, std::uint64_t seed);

/// BFS closure of depth k over face adjacency. Input need not be sorted;
/// output is sorted.
std::vector<index_t> extend_layers(std::span<const index_t> cells, const DofGraph& adjacency, int k);

/// Builds overlap/oversampling sets, DOF lists and PU weights from core sets.
/// Ramp mode: per-cell raw weight min(BFS depth from the complement of
/// omega_j, overlap_layers + 1), normalized over all owning subdomains.
/// All DOFs of a cell share the cell weight.
Decomposition make_decomposition(const DofGraph& adjacency, std::vector<std::vector<index_t>> cores,
                                 const LayerConfig& layers, PuMode mode, int dofs_per_cell);

/// Recomputes the PU weights of an existing decomposition in place.
void build_pu(Decomposition& decomp, const DofGraph& adjacency, PuMode mode);

/// Gather x onto a sorted local index set.
std::vector<double> restriction_apply(std::span<const index_t> dofs, std::span<const double> x);

/// Scatter-add a local vector into the global one, optionally weighted
/// (weights may be empty for plain extension by zero).
void prolong_add(std::span<const index_t> dofs, std::span<const double> weights, std::span<const double> local,
                 std::span<double> global);

/// Line-oriented dump of per-subdomain cell lists for golden tests.
void dump_decomposition(std::ostream& out, const Decomposition& decomp);

}  // namespace msras
