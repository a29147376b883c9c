#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nmr/harness.hpp"
#include "nmr/minres.hpp"
#include "nmr/spectrum.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& c : split_csv(s)) out.push_back(std::stod(c));
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& c : split_csv(s)) out.push_back(std::stoull(c));
  return out;
}

struct InstanceFlags {
  std::string eigenvalues = "2,1,-0.5";
  std::string weights;  // defaults to all ones
  int dim = 10;
  std::uint64_t seed = 0;
  bool identity = false;
};

void add_instance_flags(CLI::App* cmd, InstanceFlags& f) {
  cmd->add_option("--eigenvalues", f.eigenvalues,
                  "planted eigenvalues, comma separated");
  cmd->add_option("--weights", f.weights,
                  "planted squared projections (default: all ones)");
  cmd->add_option("--dim", f.dim, "ambient dimension");
  cmd->add_option("--seed", f.seed, "rotation/padding seed");
  cmd->add_flag("--identity", f.identity, "axis-aligned instance (no rotation)");
}

nmr::PlantedInstance build_instance(const InstanceFlags& f) {
  const std::vector<double> lam = parse_doubles(f.eigenvalues);
  std::vector<double> w;
  if (f.weights.empty())
    w.assign(lam.size(), 1.0);
  else
    w = parse_doubles(f.weights);
  return nmr::planted_spectrum_instance(lam, w, f.dim, f.seed, f.identity);
}

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix-free Newton-MR optimization toolkit"};
  app.set_config("--config", "", "flat key=value configuration file");
  app.require_subcommand(1);

  // bench ------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "run a solver-by-problem grid");
  bench->set_config("--config", "", "flat key=value configuration file");
  std::string solvers_arg = "newton-mr-1st,newton-mr-2nd,sd,lbfgs,tr-steihaug";
  std::string problems_arg = "analytic";
  std::string seeds_arg = "0,1,2";
  std::string out_dir = "bench_out";
  nmr::Protocol proto;
  int nlls_n = 1000, nlls_d = 50;
  double nlls_lambda = 1e-6;
  bool serial = false, traces = false;
  bench->add_option("--solvers", solvers_arg, "comma-separated solver names");
  bench->add_option("--problems", problems_arg,
                    "'analytic', 'nlls', or a comma list of suite names");
  bench->add_option("--seeds", seeds_arg, "comma-separated seeds");
  bench->add_option("--eps-g", proto.eps_g, "gradient termination tolerance");
  bench->add_option("--eps-h", proto.eps_h, "curvature tolerance (2nd order)");
  bench->add_option("--theta", proto.theta, "inner inexactness scale");
  bench->add_option("--budget", proto.budget, "oracle-call budget");
  bench->add_option("--out", out_dir, "output directory");
  bench->add_option("--nlls-n", nlls_n, "synthetic dataset rows");
  bench->add_option("--nlls-d", nlls_d, "synthetic dataset features");
  bench->add_option("--nlls-lambda", nlls_lambda, "regularization weight");
  bench->add_flag("--serial", serial, "run grid cells sequentially");
  bench->add_flag("--traces", traces, "write per-run iteration traces");

  // profile ----------------------------------------------------------
  auto* profile =
      app.add_subcommand("profile", "performance profiles from a records csv");
  profile->set_config("--config", "", "flat key=value configuration file");
  std::string metric_arg = "oracle_total";
  std::string in_csv, out_csv;
  profile->add_option("--metric", metric_arg,
                      "f_final | grad_norm_final | oracle_total");
  profile->add_option("--in", in_csv, "records csv")->required();
  profile->add_option("--out", out_csv, "profile csv (default: stdout)");

  // spectrum ----------------------------------------------------------
  auto* spectrum = app.add_subcommand(
      "spectrum", "relevant-spectrum report for a planted instance");
  spectrum->set_config("--config", "", "flat key=value configuration file");
  InstanceFlags spec_flags;
  std::string spec_out;
  add_instance_flags(spectrum, spec_flags);
  spectrum->add_option("--out", spec_out, "output file (default: stdout)");

  // minres-trace -------------------------------------------------------
  auto* mtrace =
      app.add_subcommand("minres-trace", "per-iteration trace of one inner solve");
  mtrace->set_config("--config", "", "flat key=value configuration file");
  InstanceFlags mt_flags;
  std::string mt_out;
  double mt_eta = 0.1;
  int mt_max_iters = 1000;
  bool mt_no_sol = false, mt_no_npc = false, mt_reorth = false;
  add_instance_flags(mtrace, mt_flags);
  mtrace->add_option("--eta", mt_eta, "inexactness tolerance");
  mtrace->add_option("--max-iters", mt_max_iters, "iteration cap");
  mtrace->add_flag("--disable-sol", mt_no_sol, "suppress the inexactness test");
  mtrace->add_flag("--disable-npc", mt_no_npc, "suppress the curvature test");
  mtrace->add_flag("--reorth", mt_reorth, "full reorthogonalization");
  mtrace->add_option("--out", mt_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      std::vector<nmr::ProblemSpec> specs;
      for (const auto& name : split_csv(problems_arg)) {
        if (name == "analytic") {
          for (auto& s : nmr::analytic_suite_specs()) specs.push_back(std::move(s));
        } else if (name == "nlls") {
          const int n = nlls_n, d = nlls_d;
          const double lam = nlls_lambda;
          nmr::Problem proto_p =
              nmr::regularized_nlls(nmr::synthetic_dataset(n, d, 0), lam);
          specs.push_back(nmr::ProblemSpec{
              proto_p.name(), d, nmr::InitStyle::standard_normal, [n, d, lam] {
                return nmr::regularized_nlls(nmr::synthetic_dataset(n, d, 0), lam);
              }});
        } else {
          bool found = false;
          for (auto& s : nmr::analytic_suite_specs()) {
            if (s.name == name) {
              specs.push_back(std::move(s));
              found = true;
              break;
            }
          }
          if (!found) {
            std::cerr << "unknown problem: " << name << "\n";
            return 1;
          }
        }
      }
      std::filesystem::create_directories(out_dir);
      const auto records =
          nmr::run_grid(split_csv(solvers_arg), specs, parse_seeds(seeds_arg),
                        proto, !serial, traces ? out_dir : "");
      std::ofstream os(out_dir + "/records.csv");
      nmr::write_records_csv(os, records);
      std::cout << "wrote " << records.size() << " records to " << out_dir
                << "/records.csv\n";
    } else if (*profile) {
      std::ifstream is(in_csv);
      if (!is) {
        std::cerr << "cannot open " << in_csv << "\n";
        return 1;
      }
      const auto records = nmr::read_records_csv(is);
      const auto curves = nmr::performance_profile(
          records, nmr::profile_metric_from_string(metric_arg));
      std::ofstream file;
      nmr::write_profile_csv(open_or_stdout(out_csv, file), curves);
    } else if (*spectrum) {
      const auto inst = build_instance(spec_flags);
      const auto rep = nmr::g_relevant_spectrum(inst.H, inst.g);
      std::ofstream file;
      std::ostream& os = open_or_stdout(spec_out, file);
      os << "# psi_plus=" << rep.psi_plus << " psi_minus=" << rep.psi_minus
         << " psi_zero=" << rep.psi_zero << " grade=" << rep.grade
         << " lambda_max=" << rep.lambda_max_rel
         << " lambda_min=" << rep.lambda_min_rel << "\n";
      os << "lambda,weight\n";
      char buf[80];
      for (const auto& e : rep.relevant) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", e.lambda, e.weight);
        os << buf;
      }
    } else if (*mtrace) {
      const auto inst = build_instance(mt_flags);
      nmr::MinresConfig cfg;
      cfg.eta = mt_eta;
      cfg.max_iters = mt_max_iters;
      cfg.disable_sol_test = mt_no_sol;
      cfg.disable_npc_test = mt_no_npc;
      cfg.full_reorthogonalize = mt_reorth;
      const auto res = nmr::run_minres(inst.H.as_operator(), inst.g, cfg);
      std::ofstream file;
      std::ostream& os = open_or_stdout(mt_out, file);
      os << "t,phi,curvature,hs_norm,hr_norm,flag\n";
      char buf[160];
      for (const auto& row : res.trace) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%c\n", row.t,
                      row.phi, row.curvature, row.hs_norm, row.hr_norm,
                      row.flag == ' ' ? '.' : row.flag);
        os << buf;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
