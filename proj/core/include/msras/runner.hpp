#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "msras/assembly.hpp"
#include "msras/config.hpp"
#include "msras/coarse.hpp"
#include "msras/krylov.hpp"

namespace msras {

/// One row of the sweep matrix (report.csv). Timing fields are the last
/// columns and are excluded from golden-file comparisons.
struct RunRow {
  int run = 0;
  std::string model;
  std::string discretization;
  int subdomains = 0;
  double a_min = 0.0;
  std::string coarse_rule;
  double rule_value = 0.0;  // n_sd or lambda_max (0 for none/pou degree)
  int oversample_layers = 0;
  index_t n_fine = 0;
  index_t n_coarse = 0;
  double coarse_pct = 0.0;
  int iterations = 0;
  bool converged = false;
  double reduction = 0.0;
  double avg_reduction_exponent = 0.0;  // log10 of the mean per-iteration reduction
  double decay_slope = 0.0;             // interior-subdomain eigenvalue decay fit
  SolveTimings timings;
};

struct ReportBundle {
  std::vector<RunRow> rows;
  std::vector<std::string> files;  // manifest of written outputs
  bool all_converged = true;
};

/// Executes the cartesian sweep described by the config and writes
/// report.csv, summary.json, residuals_run<k>.csv, spectrum_<j>.csv and
/// solution.vtk under out_dir (created if missing). Byte-deterministic for a
/// fixed config apart from the timing columns.
ReportBundle run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

/// Legacy-VTK structured-points file with the per-cell mean of u.
void export_vtk(const DiscreteSystem& system, std::span<const double> u, const std::string& path);

void export_spectra(const std::vector<SubdomainSpectrum>& spectra, const std::string& path);

void write_report_csv(std::ostream& out, const ReportBundle& bundle);

std::string version_string();

}  // namespace msras
