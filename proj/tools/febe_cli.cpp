// Command-line driver: single solves, convergence sweeps, CSV rate
// summaries, and a quick self-verification pass.
//
// Exit codes: 0 ok, 2 usage/config error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "febe/analysis.hpp"
#include "febe/bem.hpp"
#include "febe/fem.hpp"
#include "febe/solver.hpp"
#include "febe/study.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

febe::ExampleId parse_example(const std::string& s) {
  if (s == "square_smooth") return febe::ExampleId::SquareSmooth;
  if (s == "lshape_config1") return febe::ExampleId::LshapeConfig1;
  if (s == "lshape_config2") return febe::ExampleId::LshapeConfig2;
  throw std::invalid_argument("unknown example '" + s + "'");
}

febe::StudyMode parse_mode(const std::string& s) {
  if (s == "h") return febe::StudyMode::H;
  if (s == "p") return febe::StudyMode::P;
  if (s == "hp") return febe::StudyMode::HP;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

struct Options {
  std::string example = "square_smooth";
  std::string mode = "p";
  double eta0 = 2.0;
  double sigma = 0.5, sigma_fe = -1.0, sigma_be = -1.0;
  double mu = 1.0, mu_fe = -1.0, mu_be = -1.0;
  int layers = 6;
  int max_p = 6;
  int refinements = 4;
  int base_p = 1;
  int base_refine = 0;
  std::string out;
};

febe::StudyConfig to_study_config(const Options& o) {
  febe::StudyConfig cfg;
  cfg.example = parse_example(o.example);
  cfg.mode = parse_mode(o.mode);
  cfg.eta0 = o.eta0;
  cfg.sigma_fe = o.sigma_fe >= 0.0 ? o.sigma_fe : o.sigma;
  cfg.sigma_be = o.sigma_be >= 0.0 ? o.sigma_be : o.sigma;
  cfg.mu_fe = o.mu_fe >= 0.0 ? o.mu_fe : o.mu;
  cfg.mu_be = o.mu_be >= 0.0 ? o.mu_be : o.mu;
  cfg.max_layers = o.layers;
  cfg.max_p = o.max_p;
  cfg.max_refine = o.refinements;
  cfg.base_p = o.base_p;
  cfg.base_refine = o.base_refine;
  return cfg;
}

void add_common_options(CLI::App* app, Options& o) {
  app->add_option("--example", o.example, "square_smooth | lshape_config1 | lshape_config2")
      ->check(CLI::IsMember({"square_smooth", "lshape_config1", "lshape_config2"}));
  app->add_option("--mode", o.mode, "h | p | hp")->check(CLI::IsMember({"h", "p", "hp"}));
  app->add_option("--eta0", o.eta0, "stabilization scale eta0");
  app->add_option("--sigma", o.sigma, "grading factor for both sides");
  app->add_option("--sigma-fe", o.sigma_fe, "FE-side grading factor");
  app->add_option("--sigma-be", o.sigma_be, "BE-side grading factor");
  app->add_option("--mu", o.mu, "degree slope for both sides");
  app->add_option("--mu-fe", o.mu_fe, "FE-side degree slope");
  app->add_option("--mu-be", o.mu_be, "BE-side degree slope");
  app->add_option("--layers", o.layers, "hp mode: maximum grading layers");
  app->add_option("--max-p", o.max_p, "p mode: maximum degree");
  app->add_option("--refinements", o.refinements, "h mode: number of levels");
  app->add_option("--base-p", o.base_p, "h mode: polynomial degree");
  app->add_option("--base-refine", o.base_refine, "p mode: fixed-mesh refinement level");
  app->add_option("--out", o.out, "output file (default stdout)");
  app->set_config("--config", "", "flat key=value configuration file");
}

int write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(path);
  if (!f) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    return kExitConfig;
  }
  f << text;
  return 0;
}

int cmd_solve(const Options& o) {
  febe::StudyConfig cfg = to_study_config(o);
  febe::DecompositionConfig dc;
  dc.example = cfg.example;
  dc.fe_refine = cfg.base_refine;
  dc.be_refine = cfg.base_refine;
  febe::Decomposition dec = febe::build_decomposition(dc);
  febe::set_uniform_degree(dec.mesh, cfg.base_p);
  febe::set_uniform_degree(dec.boundary, cfg.base_p);
  const febe::StepResult r = febe::solve_step(dec, cfg.example, cfg.eta0);
  std::ostringstream os;
  os << "N=" << r.rec.N << " N_FE=" << r.rec.N_FE << " N_BE=" << r.rec.N_BE
     << " h_max=" << r.rec.h_max << " p=" << cfg.base_p << "\n"
     << "err_total=" << r.rec.err.total << " err_fe=" << r.rec.err.fe_energy
     << " err_be=" << r.rec.err.be_energy << " err_jump=" << r.rec.err.jump << "\n"
     << "residual=" << r.residual << " symmetry=" << r.symmetry
     << " spd=" << (r.spd ? "yes" : "no") << "\n";
  return write_output(o.out, os.str());
}

int cmd_study(const Options& o) {
  const febe::StudyConfig cfg = to_study_config(o);
  const std::vector<febe::StepResult> res = febe::run_study(cfg);
  for (const febe::StepResult& r : res) {
    if (r.residual > 1e-8)
      std::cerr << "warning: step " << r.rec.step << " residual " << r.residual << "\n";
  }
  return write_output(o.out, febe::csv_string(res));
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> col(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c] == name) {
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r[c]);
        return v;
      }
    throw std::runtime_error("missing column '" + name + "'");
  }
};

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty file");
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) {
      std::size_t pos = 0;
      const double v = std::stod(cell, &pos);
      if (pos != cell.size()) throw std::runtime_error("bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.columns.size()) throw std::runtime_error("ragged row");
    t.rows.push_back(row);
  }
  if (t.rows.empty()) throw std::runtime_error("no data rows");
  return t;
}

int cmd_summarize(const std::string& path, const std::string& out) {
  CsvTable t;
  try {
    t = read_csv(path);
  } catch (const std::exception& e) {
    std::cerr << "error: malformed CSV: " << e.what() << "\n";
    return kExitConfig;
  }
  std::ostringstream os;
  try {
    const std::vector<double> err = t.col("err_total");
    const std::vector<double> N = t.col("N");
    const std::vector<double> h = t.col("h_max");
    const std::vector<double> p = t.col("p_max");
    os << path << ": " << t.rows.size() << " records, err_total "
       << err.front() << " -> " << err.back() << "\n";
    const auto varies = [](const std::vector<double>& v) {
      for (double x : v)
        if (std::abs(x - v.front()) > 1e-12 * std::abs(v.front())) return true;
      return false;
    };
    if (err.size() >= 3 && varies(h)) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "h-rate %.3f\n", febe::fit_algebraic_rate(h, err));
      os << buf;
    }
    if (err.size() >= 3 && varies(p) && !varies(h)) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "p-rate %.3f\n", -febe::fit_algebraic_rate(p, err));
      os << buf;
    }
    if (err.size() >= 4) {
      for (const double root : {0.5, 1.0 / 3.0}) {
        const auto [b, corr] = febe::fit_exponential_rate(N, err, root);
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "exponential fit exp(-b N^{%.3f}): b %.4f, correlation %.4f\n",
                      root, b, corr);
        os << buf;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return write_output(out, os.str());
}

int cmd_verify() {
  int failures = 0;
  const auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "pass" : "FAIL") << "  " << name << "\n";
    if (!ok) ++failures;
  };

  // constant helper closed form
  const double root3 = std::sqrt(3.0);
  check("quasi-optimality constant minimum",
        std::abs(febe::quasi_optimality_constant(1.0 + root3, 2.0 + root3) -
                 2.0 * (2.0 + root3)) < 1e-9);

  // coupled solve on the coarse smooth example: hygiene properties
  try {
    febe::DecompositionConfig dc;
    febe::Decomposition dec = febe::build_decomposition(dc);
    febe::set_uniform_degree(dec.mesh, 2);
    febe::set_uniform_degree(dec.boundary, 2);
    const febe::StepResult r =
        febe::solve_step(dec, febe::ExampleId::SquareSmooth, 2.0);
    check("system symmetric", r.symmetry < 1e-12);
    check("SPD factorization at eta0=2", r.spd);
    check("relative residual < 1e-10", r.residual < 1e-10);
    check("coarse p=2 energy error < 0.05", r.rec.err.total < 0.05);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return failures == 0 ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* th = std::getenv("FEBE_THREADS")) {
    const int n = std::atoi(th);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"hp FE/BE coupling solver and convergence-study harness"};
  app.require_subcommand(1);

  Options o;
  CLI::App* solve = app.add_subcommand("solve", "one coupled solve");
  add_common_options(solve, o);
  CLI::App* study = app.add_subcommand("study", "convergence sweep, emits CSV");
  add_common_options(study, o);

  std::string csv_path, sum_out;
  CLI::App* summarize = app.add_subcommand("summarize", "fit rates from a study CSV");
  summarize->add_option("csv", csv_path, "CSV file from a study run")->required();
  summarize->add_option("--out", sum_out, "output file (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "quick property self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (study->parsed()) return cmd_study(o);
    if (summarize->parsed()) return cmd_summarize(csv_path, sum_out);
    if (verify->parsed()) return cmd_verify();
  } catch (const febe::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
