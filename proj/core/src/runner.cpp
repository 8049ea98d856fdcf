#include "msras/runner.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "msras/mmio.hpp"
#include "msras/parallel.hpp"
#include "msras/preconditioner.hpp"

#ifndef MSRAS_VERSION_STRING
#define MSRAS_VERSION_STRING "0.0.0"
#endif

namespace msras {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::ios_base::failure("cannot open output file '" + path + "'");
  return f;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

/// First subdomain whose overlap does not touch the domain boundary.
int interior_subdomain(const Grid& grid, const Decomposition& decomp) {
  for (int j = 0; j < decomp.size(); ++j) {
    bool interior = true;
    for (index_t c : decomp.overlap_cells[static_cast<std::size_t>(j)]) {
      const index_t ix = grid.cell_ix(c), iy = grid.cell_iy(c);
      if (ix == 0 || iy == 0 || ix + 1 == grid.nx() || iy + 1 == grid.ny()) {
        interior = false;
        break;
      }
    }
    if (interior) return j;
  }
  return 0;
}

struct SweepPoint {
  double a_min;
  int subdomains;
  int ell;
  int n_sd;
};

}  // namespace

std::string version_string() { return MSRAS_VERSION_STRING; }

void export_vtk(const DiscreteSystem& system, std::span<const double> u, const std::string& path) {
  if (static_cast<index_t>(u.size()) != system.n_dofs())
    throw std::invalid_argument("export_vtk: coefficient vector length mismatch");
  const Grid& g = *system.grid;
  std::ofstream f = open_out(path);
  f << "# vtk DataFile Version 3.0\n";
  f << "msras solution\n";
  f << "ASCII\n";
  f << "DATASET STRUCTURED_POINTS\n";
  f << "DIMENSIONS " << g.nx() + 1 << " " << g.ny() + 1 << " 1\n";
  f << "ORIGIN " << g.x0() << " " << g.y0() << " 0\n";
  f << "SPACING " << g.hx() << " " << g.hy() << " 1\n";
  f << "CELL_DATA " << g.cell_count() << "\n";
  f << "SCALARS u double 1\n";
  f << "LOOKUP_TABLE default\n";
  for (index_t c = 0; c < g.cell_count(); ++c) {
    double mean = 0.0;
    for (int k = 0; k < system.dofs_per_cell; ++k) mean += u[c * system.dofs_per_cell + k];
    mean /= static_cast<double>(system.dofs_per_cell);
    f << fmt("%.12e\n", mean);
  }
  if (!f) throw std::ios_base::failure("write failed for '" + path + "'");
}

void export_spectra(const std::vector<SubdomainSpectrum>& spectra, const std::string& path) {
  std::ofstream f = open_out(path);
  write_spectra_csv(f, spectra);
  if (!f) throw std::ios_base::failure("write failed for '" + path + "'");
}

void write_report_csv(std::ostream& out, const ReportBundle& bundle) {
  out << "run,model,discretization,M,a_min,coarse_rule,rule_value,ell,n_fine,n_coarse,coarse_pct,"
         "iterations,converged,reduction,avg_reduction_exponent,decay_slope,"
         "setup_assembly_s,setup_eigen_s,setup_factorization_s,solve_s\n";
  for (const RunRow& r : bundle.rows) {
    out << r.run << "," << r.model << "," << r.discretization << "," << r.subdomains << ","
        << fmt("%.6e", r.a_min) << "," << r.coarse_rule << "," << fmt("%.6g", r.rule_value) << "," << r.oversample_layers
        << "," << r.n_fine << "," << r.n_coarse << "," << fmt("%.6f", r.coarse_pct) << "," << r.iterations << ","
        << (r.converged ? 1 : 0) << "," << fmt("%.6e", r.reduction) << "," << fmt("%.6f", r.avg_reduction_exponent)
        << "," << fmt("%.6f", r.decay_slope) << "," << fmt("%.3f", r.timings.assembly_s) << ","
        << fmt("%.3f", r.timings.eigen_s) << "," << fmt("%.3f", r.timings.factorization_s) << ","
        << fmt("%.3f", r.timings.solve_s) << "\n";
  }
}

ReportBundle run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  const int workers = cfg.workers > 0 ? cfg.workers : default_workers();

  ReportBundle bundle;
  const std::vector<double> a_mins = cfg.sweep_a_min.empty() ? std::vector<double>{cfg.a_min} : cfg.sweep_a_min;
  const std::vector<int> m_values = cfg.sweep_subdomains.empty() ? std::vector<int>{cfg.subdomains} : cfg.sweep_subdomains;
  const std::vector<int> ells =
      cfg.sweep_oversample.empty() ? std::vector<int>{cfg.oversample_layers} : cfg.sweep_oversample;
  const std::vector<int> n_sds = cfg.sweep_n_sd.empty() ? std::vector<int>{cfg.n_sd} : cfg.sweep_n_sd;

  int run_id = 0;
  for (double a_min : a_mins) {
    // model + assembly (shared across the inner sweep dimensions)
    ModelParams params;
    params.grid_n = cfg.grid_n;
    params.tiles = cfg.tiles;
    params.a_min = a_min;
    params.a_max = cfg.a_max;
    const Model model = model_catalogue(parse_model_name(cfg.model), params);

    const auto t_asm = Clock::now();
    DGParams dg_params;
    dg_params.alpha = cfg.dg_alpha;
    const DiscreteSystem system = cfg.discretization == "dg" ? assemble_dg(model, dg_params) : assemble_ccfv(model);
    const double assembly_s = seconds_since(t_asm);
    const DofGraph graph = cell_adjacency(*model.grid);

    if (cfg.dump_system) {
      write_matrix_market(out_dir + "/B.mtx", system.B);
      write_matrix_market(out_dir + "/A_a.mtx", system.A_a);
      std::vector<Triplet> ftrip;
      for (index_t i = 0; i < system.n_dofs(); ++i)
        if (system.F[static_cast<std::size_t>(i)] != 0.0) ftrip.push_back({i, 0, system.F[static_cast<std::size_t>(i)]});
      write_matrix_market(out_dir + "/F.mtx", SparseMatrix::from_triplets(system.n_dofs(), 1, std::move(ftrip)));
      bundle.files.insert(bundle.files.end(), {out_dir + "/B.mtx", out_dir + "/A_a.mtx", out_dir + "/F.mtx"});
    }

    for (int m_target : m_values) {
      std::vector<std::vector<index_t>> cores;
      if (cfg.partition == "structured") {
        index_t px = cfg.px, py = cfg.py;
        if (!cfg.sweep_subdomains.empty() || px == 0 || py == 0) {
          const auto root = static_cast<index_t>(std::llround(std::sqrt(static_cast<double>(m_target))));
          if (root * root != m_target)
            throw ConfigError("config: structured partition needs a square subdomain count (got " +
                              std::to_string(m_target) + "); set px/py or use partition = greedy");
          px = py = root;
        }
        cores = partition_structured(*model.grid, px, py);
      } else {
        cores = partition_greedy(graph, m_target, cfg.seed);
      }

      for (int ell : ells) {
        LayerConfig layers{cfg.overlap_layers, ell};
        const PuMode pu_mode = cfg.pu == "ramp" ? PuMode::Ramp : PuMode::Multiplicity;
        const Decomposition decomp = make_decomposition(graph, cores, layers, pu_mode, system.dofs_per_cell);

        // spectra are shared across the n_sd sweep
        std::vector<SubdomainSpectrum> spectra;
        double eigen_s = 0.0;
        double decay_slope = 0.0;
        if (cfg.coarse == CoarseRule::MsgfemFixed || cfg.coarse == CoarseRule::MsgfemThreshold) {
          SelectionRule spectra_rule = cfg.coarse == CoarseRule::MsgfemFixed
                                           ? SelectionRule::fixed(*std::max_element(n_sds.begin(), n_sds.end()))
                                           : SelectionRule::threshold(cfg.lambda_max);
          SpectrumOptions sopts;
          sopts.nev = cfg.nev;
          sopts.lanczos.tol = cfg.eig_tol;
          sopts.lanczos.seed = cfg.seed;
          const auto t_eig = Clock::now();
          spectra = compute_spectra(system, decomp, spectra_rule, sopts, workers);
          eigen_s = seconds_since(t_eig);
          const int j_int = interior_subdomain(*model.grid, decomp);
          const auto& evs = spectra[static_cast<std::size_t>(j_int)].eigenvalues;
          decay_slope = decay_fit(evs, 4, std::min<int>(30, static_cast<int>(evs.size()))).slope;
          if (cfg.write_spectra) {
            for (int j = 0; j < decomp.size(); ++j) {
              const std::string path = out_dir + "/spectrum_" + std::to_string(j) + ".csv";
              export_spectra({spectra[static_cast<std::size_t>(j)]}, path);
              bundle.files.push_back(path);
            }
          }
        }

        for (int n_sd : n_sds) {
          const auto t_fac = Clock::now();
          std::shared_ptr<const CoarseSpace> coarse;
          SelectionRule rule = cfg.coarse == CoarseRule::MsgfemFixed ? SelectionRule::fixed(n_sd)
                                                                     : SelectionRule::threshold(cfg.lambda_max);
          if (cfg.coarse == CoarseRule::MsgfemFixed || cfg.coarse == CoarseRule::MsgfemThreshold)
            coarse = std::make_shared<CoarseSpace>(build_coarse_space(system, decomp, spectra, rule));
          else if (cfg.coarse == CoarseRule::Pou)
            coarse = std::make_shared<CoarseSpace>(build_pou_coarse_space(system, decomp, cfg.pou_degree));

          const PrecMode mode = coarse && coarse->dim() > 0 ? PrecMode::TwoLevelHybrid : PrecMode::OneLevel;
          const Preconditioner prec(system, decomp, mode, coarse, workers);
          const double factorization_s = seconds_since(t_fac);

          KrylovConfig kcfg;
          kcfg.epsilon = cfg.epsilon;
          kcfg.restart = cfg.restart;
          kcfg.max_iters = cfg.max_iters;
          const auto t_solve = Clock::now();
          auto [u, report] = cfg.solver == "gmres" ? gmres(system.B, prec, system.F, kcfg)
                                                   : richardson(system.B, prec, system.F, kcfg);
          report.timings.solve_s = seconds_since(t_solve);
          report.timings.assembly_s = assembly_s;
          report.timings.eigen_s = eigen_s;
          report.timings.factorization_s = factorization_s;

          RunRow row;
          row.run = run_id;
          row.model = cfg.model;
          row.discretization = cfg.discretization;
          row.subdomains = decomp.size();
          row.a_min = a_min >= 0.0 ? a_min : 0.0;
          switch (cfg.coarse) {
            case CoarseRule::None: row.coarse_rule = "none"; break;
            case CoarseRule::Pou: row.coarse_rule = "pou" + std::to_string(cfg.pou_degree); break;
            case CoarseRule::MsgfemFixed: row.coarse_rule = "msgfem_fixed"; row.rule_value = n_sd; break;
            case CoarseRule::MsgfemThreshold: row.coarse_rule = "msgfem_threshold"; row.rule_value = cfg.lambda_max; break;
          }
          row.oversample_layers = ell;
          row.n_fine = system.n_dofs();
          row.n_coarse = coarse ? coarse->dim() : 0;
          row.coarse_pct = 100.0 * static_cast<double>(row.n_coarse) / static_cast<double>(row.n_fine);
          row.iterations = report.iterations;
          row.converged = report.converged;
          row.reduction = report.achieved_reduction;
          row.avg_reduction_exponent =
              report.iterations > 0 ? std::log10(std::max(report.achieved_reduction, 1e-300)) / report.iterations : 0.0;
          row.decay_slope = decay_slope;
          row.timings = report.timings;
          bundle.rows.push_back(row);
          bundle.all_converged = bundle.all_converged && report.converged;

          if (cfg.write_residuals) {
            const std::string path = out_dir + "/residuals_run" + std::to_string(run_id) + ".csv";
            std::ofstream f = open_out(path);
            report.write_csv(f);
            bundle.files.push_back(path);
          }
          if (cfg.write_vtk) {
            const std::string path = out_dir + "/solution_run" + std::to_string(run_id) + ".vtk";
            export_vtk(system, u, path);
            bundle.files.push_back(path);
          }
          ++run_id;
        }
      }
    }
  }

  {
    std::ofstream f = open_out(out_dir + "/report.csv");
    write_report_csv(f, bundle);
    bundle.files.push_back(out_dir + "/report.csv");
  }
  {
    nlohmann::json j;
    j["version"] = version_string();
    j["model"] = cfg.model;
    j["discretization"] = cfg.discretization;
    j["solver"] = cfg.solver;
    j["epsilon"] = cfg.epsilon;
    j["restart"] = cfg.restart;
    j["seed"] = cfg.seed;
    j["workers"] = workers;
    j["runs"] = nlohmann::json::array();
    for (const RunRow& r : bundle.rows) {
      nlohmann::json rj;
      rj["run"] = r.run;
      rj["M"] = r.subdomains;
      rj["a_min"] = r.a_min;
      rj["coarse_rule"] = r.coarse_rule;
      rj["rule_value"] = r.rule_value;
      rj["ell"] = r.oversample_layers;
      rj["n_fine"] = r.n_fine;
      rj["n_coarse"] = r.n_coarse;
      rj["coarse_pct"] = r.coarse_pct;
      rj["iterations"] = r.iterations;
      rj["converged"] = r.converged;
      rj["reduction"] = r.reduction;
      rj["decay_slope"] = r.decay_slope;
      rj["timings"] = {{"assembly_s", r.timings.assembly_s},
                       {"eigen_s", r.timings.eigen_s},
                       {"factorization_s", r.timings.factorization_s},
                       {"solve_s", r.timings.solve_s}};
      j["runs"].push_back(rj);
    }
    j["all_converged"] = bundle.all_converged;
    std::ofstream f = open_out(out_dir + "/summary.json");
    f << j.dump(2) << "\n";
    bundle.files.push_back(out_dir + "/summary.json");
  }
  return bundle;
}

}  // namespace msras
