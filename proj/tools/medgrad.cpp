// medgrad: command-line front end. Every command writes its outputs and a
// manifest.txt into --out.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "medgrad/analytic.hpp"
#include "medgrad/boundary.hpp"
#include "medgrad/contour.hpp"
#include "medgrad/error.hpp"
#include "medgrad/field.hpp"
#include "medgrad/format.hpp"
#include "medgrad/least_gradient.hpp"
#include "medgrad/level_set.hpp"
#include "medgrad/mvp_solver.hpp"
#include "medgrad/one_laplacian.hpp"
#include "medgrad/parallel.hpp"
#include "medgrad/plot.hpp"

namespace fs = std::filesystem;
using namespace medgrad;

namespace {

constexpr const char* kVersion = "medgrad 1.0.0";
constexpr int kExitValidation = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitUsage = 64;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << v;
  return out.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Common {
  std::string out = ".";
  int threads = 0;
  double tol = -1.0;  // command-specific default when negative
};

// Collects outputs and writes manifest.txt.
class Run {
 public:
  Run(std::string command, const Common& common, std::vector<std::string> argv)
      : command_(std::move(command)), common_(common), argv_(std::move(argv)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(common_.out);
  }

  void input(const std::string& path) { inputs_.emplace_back(path, hex64(fnv1a(slurp(path)))); }

  void write(const std::string& name, const std::string& bytes) {
    const fs::path p = fs::path(common_.out) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + p.string());
    f << bytes;
    outputs_.emplace_back(name, hex64(fnv1a(bytes)));
  }

  void field(const std::string& name, const GridField& field) { write(name, to_sfld(field)); }

  void note(const std::string& key, const std::string& value) { notes_.emplace_back(key, value); }

  void finish(int status) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ostringstream m;
    m << "command: " << command_ << '\n';
    std::string flags;
    for (const auto& a : argv_) flags += (flags.empty() ? "" : " ") + a;
    m << "flags: " << flags << '\n';
    m << "threads: " << thread_count() << '\n';
    for (const auto& [path, digest] : inputs_) m << "input: " << path << " fnv1a64=" << digest << '\n';
    for (const auto& [name, digest] : outputs_) {
      m << "output: " << name << " fnv1a64=" << digest << '\n';
    }
    for (const auto& [k, v] : notes_) m << k << ": " << v << '\n';
    m << "exit_code: " << status << '\n';
    m << "wall_time_s: " << format_double(wall) << '\n';
    m << "version: " << kVersion << '\n';
    std::ofstream f(fs::path(common_.out) / "manifest.txt", std::ios::binary);
    f << m.str();
  }

 private:
  std::string command_;
  Common common_;
  std::vector<std::string> argv_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  std::vector<std::pair<std::string, std::string>> notes_;
};

Domain parse_domain(const std::string& text) {
  if (text == "disk") return Domain::unit_disk();
  std::string s = text;
  for (char& c : s) {
    if (c == ':' || c == ',') c = ' ';
  }
  Domain d = Domain::parse(s);
  if (!d.strictly_convex()) {
    std::cerr << "warning: domain is not convex; the Dirichlet problem may have no solution\n";
  }
  return d;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) out.push_back(parse_double(tok));
  }
  return out;
}

Point2 parse_point(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 2) throw ValidationError("point needs x,y");
  return {v[0], v[1]};
}

BoundaryData load_g(const std::string& name, Run& run) {
  if (name.rfind("file:", 0) == 0) run.input(name.substr(5));
  return BoundaryData::from_name(name);
}

GridField load_field(const std::string& path, Run& run) {
  run.input(path);
  return load_sfld(path);
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (fallback: MEDGRAD_THREADS)");
  app->add_option("--tol", c.tol, "command tolerance");
}

void apply_threads(const Common& c) {
  int n = c.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("MEDGRAD_THREADS")) n = std::atoi(env);
  }
  set_thread_count(n > 0 ? n : 1);
}

std::string residual_line(const ResidualReport& r, double h) {
  return "max " + format_double(r.max_residual) + " (" + format_double(r.max_residual / h) +
         " h), mean " + format_double(r.mean_residual) + ", checked " +
         std::to_string(r.checked_count) + ", skipped " + std::to_string(r.skipped_count);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medgrad: median value property, 1-Laplacian and least-gradient experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::vector<std::string> args(argv + 1, argv + argc);

  // analytic
  Common c_an;
  std::string an_family;
  double an_alpha = std::numbers::sqrt2 / 2;
  int an_grid = 256;
  auto* an = app.add_subcommand("analytic", "closed-form fields: ualpha, tv-curve, paraboloid");
  an->add_option("family", an_family, "ualpha | tv-curve | paraboloid")
      ->required()
      ->check(CLI::IsMember({"ualpha", "tv-curve", "paraboloid"}));
  an->add_option("--alpha", an_alpha, "plateau level in (0,1)");
  an->add_option("--grid", an_grid, "nodes per side")->check(CLI::Range(2, 1 << 14));
  add_common(an, c_an);

  // solve-local
  Common c_sl;
  std::string sl_domain = "disk", sl_g = "abs-sin", sl_seed = "constant-mean";
  int sl_grid = 128, sl_max_iter = 10000, sl_samples = 0;
  double sl_frac = 0.5, sl_radius = 0.0;
  auto* sl = app.add_subcommand("solve-local", "Jacobi median iteration for the Dirichlet problem");
  sl->add_option("--domain", sl_domain);
  sl->add_option("--g", sl_g, "abs-sin | sin | const:c | affine:a,b,c | file:path");
  sl->add_option("--grid", sl_grid)->check(CLI::Range(8, 1 << 14));
  sl->add_option("--radius-frac", sl_frac, "R = c * dist");
  sl->add_option("--radius", sl_radius, "fixed R (overrides --radius-frac)");
  sl->add_option("--seed-init", sl_seed, "constant-mean | harmonic-blend | file:path");
  sl->add_option("--max-iter", sl_max_iter);
  sl->add_option("--samples", sl_samples, "samples per circle (0: default rule)");
  add_common(sl, c_sl);

  // verify-local
  Common c_vl;
  std::string vl_field;
  double vl_frac = 0.5, vl_radius = 0.0;
  auto* vl = app.add_subcommand("verify-local", "local median value residuals of a field");
  vl->add_option("--field", vl_field)->required();
  vl->add_option("--radius-frac", vl_frac);
  vl->add_option("--radius", vl_radius);
  add_common(vl, c_vl);

  // verify-global
  Common c_vg;
  std::string vg_field;
  std::vector<std::string> vg_centers;
  double vg_spacing = 0.25, vg_max_radius = 0.0;
  int vg_radii = 12;
  auto* vg = app.add_subcommand("verify-global", "median identity on circles of many radii");
  vg->add_option("--field", vg_field)->required();
  vg->add_option("--center", vg_centers, "x,y (repeatable); default: lattice");
  vg->add_option("--spacing", vg_spacing, "lattice spacing of centers");
  vg->add_option("--radii", vg_radii, "radii per center");
  vg->add_option("--max-radius", vg_max_radius);
  add_common(vg, c_vg);

  // construct
  Common c_co;
  std::string co_domain = "disk", co_g = "abs-sin";
  double co_lambda = 0.5, co_step = 1e-2;
  int co_grid = 256;
  auto* co = app.add_subcommand("construct", "chord construction from boundary level sets");
  co->add_option("--domain", co_domain);
  co->add_option("--g", co_g);
  co->add_option("--lambda", co_lambda, "base level")->required();
  co->add_option("--level-step", co_step);
  co->add_option("--grid", co_grid)->check(CLI::Range(8, 1 << 14));
  add_common(co, c_co);

  // tv
  Common c_tv;
  std::string tv_field;
  int tv_levels = 0;
  auto* tv = app.add_subcommand("tv", "discrete total variation of a field");
  tv->add_option("--field", tv_field)->required();
  tv->add_option("--coarea-levels", tv_levels, "also sum contour lengths over this many levels");
  add_common(tv, c_tv);

  // least-gradient
  Common c_lg;
  std::string lg_domain = "disk", lg_g = "abs-sin";
  int lg_grid = 128, lg_max_iter = 20000;
  auto* lg = app.add_subcommand("least-gradient", "TV minimization with Dirichlet data");
  lg->add_option("--domain", lg_domain);
  lg->add_option("--g", lg_g);
  lg->add_option("--grid", lg_grid)->check(CLI::Range(8, 1 << 14));
  lg->add_option("--max-iter", lg_max_iter);
  add_common(lg, c_lg);

  // expand-check
  Common c_ex;
  std::string ex_phi = "x2+2y2", ex_point = "1,0", ex_radii = "0.1,0.05,0.025";
  int ex_samples = 1 << 16;
  auto* ex = app.add_subcommand("expand-check", "circle-median expansion on a radius ladder");
  ex->add_option("--phi", ex_phi, "x2+2y2 | x2+2y2+y3 | radial | affine")
      ->check(CLI::IsMember({"x2+2y2", "x2+2y2+y3", "radial", "affine"}));
  ex->add_option("--point", ex_point);
  ex->add_option("--radii", ex_radii);
  ex->add_option("--samples", ex_samples);
  add_common(ex, c_ex);

  // visc-scan
  Common c_vs;
  std::string vs_field;
  int vs_trials = 500;
  std::uint64_t vs_seed = 1;
  auto* vs = app.add_subcommand("visc-scan", "random quadratic touch test");
  vs->add_option("--field", vs_field)->required();
  vs->add_option("--trials", vs_trials);
  vs->add_option("--seed", vs_seed);
  add_common(vs, c_vs);

  // conjecture
  Common c_cj;
  std::string cj_domain = "disk", cj_g = "abs-sin", cj_lambdas, cj_seeds = "constant-mean";
  int cj_grid = 128;
  auto* cj = app.add_subcommand("conjecture", "global median solutions vs least gradient");
  cj->add_option("--domain", cj_domain);
  cj->add_option("--g", cj_g);
  cj->add_option("--grid", cj_grid)->check(CLI::Range(8, 1 << 14));
  cj->add_option("--lambdas", cj_lambdas, "comma list; default: 9 interior levels");
  cj->add_option("--seeds", cj_seeds, "comma list of constant-mean, harmonic-blend, or none");
  add_common(cj, c_cj);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  const std::map<std::string, Common*> commons{
      {"analytic", &c_an}, {"solve-local", &c_sl}, {"verify-local", &c_vl},
      {"verify-global", &c_vg}, {"construct", &c_co}, {"tv", &c_tv},
      {"least-gradient", &c_lg}, {"expand-check", &c_ex}, {"visc-scan", &c_vs},
      {"conjecture", &c_cj}};
  const Common& common = *commons.at(name);
  apply_threads(common);

  int status = 0;
  std::unique_ptr<Run> run;
  try {
    run = std::make_unique<Run>(name, common, args);

    if (name == "analytic") {
      if (an_family == "ualpha") {
        const UAlphaParams p(an_alpha);
        const GridField f =
            from_function(Domain::unit_disk(), an_grid, [&](Point2 x) { return u_alpha_eval(p, x); });
        run->field("ualpha.sfld", f);
        run->write("ualpha.svg", contour_svg(f, even_levels(f, 12)));
        run->write("ualpha.pgm", heatmap_pgm(f));
        std::cout << "tv analytic " << format_double(tv_u_alpha_analytic(p)) << ", discrete "
                  << format_double(discrete_tv(f)) << '\n';
      } else if (an_family == "paraboloid") {
        const GridField f = from_function(Domain::unit_disk(), an_grid,
                                          [](Point2 x) { return x.x * x.x + x.y * x.y; });
        run->field("paraboloid.sfld", f);
      } else {
        std::ostringstream csv;
        csv << "alpha,tv_analytic,tv_discrete\n";
        for (int k = 1; k <= 9; ++k) {
          const UAlphaParams p(0.1 * k);
          const GridField f = from_function(Domain::unit_disk(), an_grid,
                                            [&](Point2 x) { return u_alpha_eval(p, x); });
          csv << format_double(p.alpha) << ',' << format_double(tv_u_alpha_analytic(p)) << ','
              << format_double(discrete_tv(f)) << '\n';
        }
        double best = 0.001;
        for (int k = 1; k < 1000; ++k) {
          if (tv_u_alpha_analytic(UAlphaParams(k * 0.001)) <
              tv_u_alpha_analytic(UAlphaParams(best))) {
            best = k * 0.001;
          }
        }
        run->write("tv_curve.csv", csv.str());
        std::cout << csv.str() << "argmin " << format_double(best) << ", minimum "
                  << format_double(tv_u_alpha_analytic(UAlphaParams(best))) << '\n';
      }

    } else if (name == "solve-local") {
      const Domain domain = parse_domain(sl_domain);
      const BoundaryData g = load_g(sl_g, *run);
      SolverConfig cfg;
      if (sl_radius > 0.0) cfg.radius_rule = FixedRadius{sl_radius};
      else cfg.radius_rule = FractionRadius{sl_frac};
      if (common.tol > 0.0) cfg.tol = common.tol;
      cfg.max_iter = sl_max_iter;
      cfg.samples_per_circle = sl_samples;
      if (sl_seed == "constant-mean") {
        cfg.seed = SeedKind::constant_mean;
      } else if (sl_seed == "harmonic-blend") {
        cfg.seed = SeedKind::boundary_harmonic_blend;
      } else if (sl_seed.rfind("file:", 0) == 0) {
        cfg.seed = SeedKind::provided;
        cfg.seed_field = load_field(sl_seed.substr(5), *run);
      } else {
        throw ValidationError("unknown seed '" + sl_seed + "'");
      }
      const SolveResult res = solve_local_dirichlet(domain, g, sl_grid, cfg);
      run->field("solution.sfld", res.field);
      run->write("iterations.csv", res.log_csv());
      ResidualReport full = local_residual(res.field, cfg, true);
      run->write("residual.csv", full.to_csv());
      run->write("solution.svg", contour_svg(res.field, even_levels(res.field, 12)));
      run->write("solution.pgm", heatmap_pgm(res.field));
      run->note("iterations", std::to_string(res.log.size()));
      run->note("final_update", format_double(res.final_update));
      std::cout << "iterations " << res.log.size() << ", final update "
                << format_double(res.final_update) << "\nlocal residual "
                << residual_line(res.report, res.field.h()) << '\n';
      if (!res.converged) {
        std::cerr << res.diagnostic << '\n';
        status = kExitNoConvergence;
      }

    } else if (name == "verify-local") {
      const GridField f = load_field(vl_field, *run);
      SolverConfig cfg;
      if (vl_radius > 0.0) cfg.radius_rule = FixedRadius{vl_radius};
      else cfg.radius_rule = FractionRadius{vl_frac};
      const ResidualReport r = local_residual(f, cfg, true);
      run->write("residual.csv", r.to_csv());
      const double tol = common.tol > 0.0 ? common.tol : 2.0 * f.h();
      std::cout << "local residual " << residual_line(r, f.h()) << "\n"
                << (r.max_residual <= tol ? "PASS" : "FAIL") << " at tolerance "
                << format_double(tol) << '\n';

    } else if (name == "verify-global") {
      const GridField f = load_field(vg_field, *run);
      CenterPlan plan;
      if (vg_centers.empty()) plan = CenterPlan::lattice(f, vg_spacing);
      for (const auto& c : vg_centers) plan.centers.push_back(parse_point(c));
      const ResidualReport r =
          verify_global(f, plan, vg_radii, vg_max_radius, kDefaultBoundaryBand, true);
      run->write("global.csv", r.to_csv());
      const double tol = common.tol > 0.0 ? common.tol : 3.0 * f.h();
      std::cout << "global residual " << residual_line(r, f.h()) << ", worst at ("
                << format_double(r.worst_point.x) << ", " << format_double(r.worst_point.y)
                << ") r=" << format_double(r.worst_radius) << "\n"
                << (r.max_residual <= tol ? "PASS" : "FAIL") << " at tolerance "
                << format_double(tol) << '\n';

    } else if (name == "construct") {
      const Domain domain = parse_domain(co_domain);
      const BoundaryData g = load_g(co_g, *run);
      BuildOptions opt;
      opt.level_step_control = co_step;
      const ChordSolution sol = build_solution(domain, g, co_lambda, opt);
      const GridField f = rasterize(sol, co_grid);
      run->write("chords.csv", sol.to_csv());
      run->write("chords.svg", sol.to_svg());
      run->field("construct.sfld", f);
      run->write("construct.pgm", heatmap_pgm(f));
      std::cout << "chords " << sol.chord_count() << ", plateaus " << sol.plateaus().size()
                << '\n';

    } else if (name == "tv") {
      const GridField f = load_field(tv_field, *run);
      std::cout << "discrete tv " << format_double(discrete_tv(f)) << '\n';
      if (tv_levels > 0) {
        const auto [lo, hi] = f.range();
        const double dl = (hi - lo) / tv_levels;
        double sum = 0.0;
        for (int k = 0; k < tv_levels; ++k) sum += contour_length(f, lo + (k + 0.5) * dl) * dl;
        std::cout << "coarea level sum " << format_double(sum) << '\n';
      }

    } else if (name == "least-gradient") {
      const Domain domain = parse_domain(lg_domain);
      const BoundaryData g = load_g(lg_g, *run);
      TVConfig cfg;
      cfg.max_iter = lg_max_iter;
      if (common.tol > 0.0) cfg.gap_tol = common.tol;
      const TVResult r = minimize_tv_dirichlet(domain, g, lg_grid, cfg);
      run->field("ustar.sfld", r.field);
      std::ostringstream hist;
      hist << "iter,tv\n";
      for (const auto& [it, v] : r.tv_history) hist << it << ',' << format_double(v) << '\n';
      run->write("tv_history.csv", hist.str());
      run->write("ustar.svg", contour_svg(r.field, even_levels(r.field, 12)));
      std::cout << "iterations " << r.iterations << ", tv " << format_double(r.tv) << '\n';
      if (!r.converged) {
        std::cerr << r.diagnostic << '\n';
        status = kExitNoConvergence;
      }

    } else if (name == "expand-check") {
      const Point2 p = parse_point(ex_point);
      SmoothTestFunction phi = [&] {
        if (ex_phi == "x2+2y2") {
          return SmoothTestFunction::quadratic({0, 0}, 0.0, {0, 0}, {2, 0, 4});
        }
        if (ex_phi == "x2+2y2+y3") {
          return SmoothTestFunction(
              [](Point2 q) { return q.x * q.x + 2 * q.y * q.y + q.y * q.y * q.y; },
              [](Point2 q) { return Point2{2 * q.x, 4 * q.y + 3 * q.y * q.y}; },
              [](Point2 q) { return Sym2{2, 0, 4 + 6 * q.y}; });
        }
        if (ex_phi == "radial") {
          return SmoothTestFunction([](Point2 q) { return norm(q); });
        }
        return SmoothTestFunction::quadratic({0, 0}, 0.5, {1, -2}, {0, 0, 0});
      }();
      std::ostringstream csv;
      csv << "r,lhs,rhs,normalized\n";
      for (double r : parse_list(ex_radii)) {
        const ExpansionResidual e = expansion_residual(phi, p, r, ex_samples);
        csv << format_double(r) << ',' << format_double(e.lhs) << ',' << format_double(e.rhs)
            << ',' << format_double(e.normalized()) << '\n';
      }
      run->write("expansion.csv", csv.str());
      std::cout << "delta1 " << format_double(delta1(phi, p)) << '\n' << csv.str();

    } else if (name == "visc-scan") {
      const GridField f = load_field(vs_field, *run);
      ViscosityOptions opt;
      if (common.tol > 0.0) opt.tol = common.tol;
      const ViscosityReport r = viscosity_touch_scan(f, vs_trials, vs_seed, opt);
      run->write("visc.csv", r.to_csv());
      std::cout << "admissible " << r.admissible << ", inadmissible " << r.inadmissible
                << ", violations " << r.violations << " at tolerance " << format_double(r.tol)
                << '\n';

    } else if (name == "conjecture") {
      const Domain domain = parse_domain(cj_domain);
      const BoundaryData g = load_g(cj_g, *run);
      ConjectureConfig cfg;
      if (!cj_lambdas.empty()) cfg.lambdas = parse_list(cj_lambdas);
      cfg.solver_seeds.clear();
      std::istringstream seeds(cj_seeds);
      for (std::string s; std::getline(seeds, s, ',');) {
        if (s == "constant-mean") cfg.solver_seeds.push_back(SeedKind::constant_mean);
        else if (s == "harmonic-blend") cfg.solver_seeds.push_back(SeedKind::boundary_harmonic_blend);
        else if (s != "none" && !s.empty()) throw ValidationError("unknown seed '" + s + "'");
      }
      if (common.tol > 0.0) cfg.match_tol = common.tol;
      const ConjectureReport rep = conjecture_report(domain, g, cj_grid, cfg);
      run->write("conjecture.csv", rep.to_csv());
      run->write("summary.txt", rep.summary());
      run->field("ustar.sfld", rep.ustar);
      for (std::size_t i = 0; i < rep.candidates.size(); ++i) {
        run->field("candidate_" + std::to_string(i) + ".sfld", rep.candidates[i].field);
      }
      std::cout << rep.summary();
    }
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    status = kExitNoConvergence;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    status = kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    status = kExitValidation;
  }
  if (run) run->finish(status);
  return status;
}
