#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "msras/sparse.hpp"

namespace msras {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class CoarseRule { None, Pou, MsgfemFixed, MsgfemThreshold };

/// Experiment configuration. Parsed either from flat key = value text with an
/// optional [sweep] section of space-separated lists, or from a JSON object
/// with the same keys (sweep lists as arrays under "sweep").
struct ExperimentConfig {
  // model
  std::string model = "checkerboard51";
  index_t grid_n = 0;  // 0 = model default
  index_t tiles = 0;
  double a_min = -1.0;  // < 0 = model default
  double a_max = 1.0;

  // discretization
  std::string discretization = "dg";
  double dg_alpha = 3.0;

  // decomposition
  std::string partition = "structured";  // structured | greedy
  index_t px = 0, py = 0;                // 0 = derive from subdomains
  int subdomains = 16;
  int overlap_layers = 2;
  int oversample_layers = 2;
  std::string pu = "ramp";  // ramp | multiplicity

  // coarse space
  CoarseRule coarse = CoarseRule::MsgfemThreshold;
  double lambda_max = 2.0;
  int n_sd = 8;
  int pou_degree = 1;
  int nev = 24;
  double eig_tol = 1e-9;

  // solver
  std::string solver = "gmres";  // gmres | richardson
  double epsilon = 1e-6;
  int restart = 100;
  int max_iters = 1000;

  // run control / outputs
  std::uint64_t seed = 42;
  int workers = 0;  // 0 = hardware concurrency
  bool write_vtk = false;
  bool write_spectra = false;
  bool write_residuals = true;
  bool dump_system = false;

  // sweeps (empty list = single run with the base value)
  std::vector<double> sweep_a_min;
  std::vector<int> sweep_subdomains;
  std::vector<int> sweep_n_sd;
  std::vector<int> sweep_oversample;

  /// Throws ConfigError with a message naming the offending key.
  void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace msras
