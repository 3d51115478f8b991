// Command-line front end; everything substantive happens behind the C API of
// the shared library. Exit codes: 0 ok, 1 check failed, 2 config error,
// 3 pull-in/static error, 4 integrator error, 5 solver non-convergence,
// 6 inapplicable check.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "memsdde.h"

namespace {

int exit_code(mdde_status s) {
  switch (s) {
    case MDDE_OK: return 0;
    case MDDE_ERR_CONFIG: return 2;
    case MDDE_ERR_STATIC: return 3;
    case MDDE_ERR_INTEGRATOR: return 4;
    case MDDE_ERR_NO_CONVERGENCE: return 5;
    case MDDE_ERR_INAPPLICABLE: return 6;
    default: return 2;
  }
}

[[noreturn]] void die(mdde_status s) {
  std::fprintf(stderr, "error: %s\n", mdde_last_error());
  std::exit(exit_code(s));
}

struct ConfigHandle {
  mdde_config* cfg = nullptr;
  ~ConfigHandle() { mdde_config_free(cfg); }
};

void load_config(ConfigHandle& h, const std::string& path) {
  const mdde_status s =
      path.empty() ? mdde_config_create(&h.cfg) : mdde_config_from_file(path.c_str(), &h.cfg);
  if (s != MDDE_OK) die(s);
}

void apply_override(ConfigHandle& h, const std::string& key, const std::string& value) {
  const mdde_status s = mdde_config_set(h.cfg, key.c_str(), value.c_str());
  if (s != MDDE_OK) die(s);
}

// CSV files are written to a temporary and renamed so failures never leave a
// partial artifact behind.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : path_(path), tmp_(path + ".tmp") {
    f_ = std::fopen(tmp_.c_str(), "w");
    if (!f_) {
      std::fprintf(stderr, "error: cannot open '%s' for writing\n", tmp_.c_str());
      std::exit(2);
    }
  }
  ~CsvWriter() {
    if (f_) {
      std::fclose(f_);
      std::remove(tmp_.c_str());
    }
  }
  void line(const std::string& s) { std::fprintf(f_, "%s\n", s.c_str()); }
  template <class... Args>
  void row(const char* fmt, Args... args) {
    std::fprintf(f_, fmt, args...);
    std::fputc('\n', f_);
  }
  void commit() {
    std::fclose(f_);
    f_ = nullptr;
    std::filesystem::rename(tmp_, path_);
  }

 private:
  std::string path_;
  std::string tmp_;
  std::FILE* f_ = nullptr;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

const char* class_name(int c) {
  switch (c) {
    case MDDE_EQ_SADDLE: return "saddle";
    case MDDE_EQ_STABLE_SPIRAL: return "stable_spiral";
    case MDDE_EQ_STABLE_NODE: return "stable_node";
    default: return "unknown";
  }
}

int cmd_statics(const ConfigHandle& h) {
  mdde_statics_report r{};
  const mdde_status s = mdde_statics(h.cfg, &r);
  if (s != MDDE_OK) die(s);
  std::printf("pull_in_voltage = %s\n", fmt(r.pull_in_voltage).c_str());
  std::printf("c = %s\n", fmt(r.c).c_str());
  std::printf("e = %s\n", fmt(r.e).c_str());
  std::printf("G1 = %s\n", fmt(r.g1).c_str());
  std::printf("G2 = %s\n", fmt(r.g2).c_str());
  std::printf("time_scale = %s\n", fmt(r.time_scale).c_str());
  std::printf("x1 = %s\n", fmt(r.x1).c_str());
  std::printf("x2 = %s\n", fmt(r.x2).c_str());
  std::printf("xi1 = %s\n", fmt(r.xi1).c_str());
  std::printf("eta1 = %s\n", fmt(r.eta1).c_str());
  std::printf("xi2 = %s\n", fmt(r.xi2).c_str());
  std::printf("eta2 = %s\n", fmt(r.eta2).c_str());
  std::printf("x1_class = %s\n", class_name(r.x1_class));
  std::printf("x2_class = %s\n", class_name(r.x2_class));
  std::printf("x1_eigenvalues = %s %s\n", fmt(r.x1_eig_lo).c_str(), fmt(r.x1_eig_hi).c_str());
  std::printf("x2_eigenvalue = %s + %si\n", fmt(r.x2_eig_re).c_str(), fmt(r.x2_eig_im).c_str());
  return 0;
}

int cmd_d0(const ConfigHandle& h, const std::string& out_path) {
  mdde_d0_report r{};
  mdde_status s = mdde_delay_bound(h.cfg, &r);
  if (s != MDDE_OK) die(s);
  std::printf("a = %s\n", fmt(r.a).c_str());
  std::printf("b = %s\n", fmt(r.b).c_str());
  std::printf("g1hat = %s\n", fmt(r.g1hat).c_str());
  std::printf("g2hat = %s\n", fmt(r.g2hat).c_str());
  std::printf("lambda = %s\n", fmt(r.lambda).c_str());
  std::printf("d0 = %s\n", r.unbounded ? "unbounded" : fmt(r.d0).c_str());

  if (!out_path.empty()) {
    mdde_sweep* sweep = nullptr;
    s = mdde_d0_sweep(h.cfg, 10.0, 120.0, 1.0, &sweep);
    if (s != MDDE_OK) die(s);
    CsvWriter csv(out_path);
    csv.line("v0,d0_linear,d0_squeeze");
    for (size_t i = 0; i < mdde_sweep_size(sweep); ++i) {
      double v0, dl, dsq;
      mdde_sweep_row(sweep, i, &v0, &dl, &dsq);
      csv.row("%.15g,%.15g,%.15g", v0, dl, dsq);
    }
    mdde_sweep_free(sweep);
    csv.commit();
  }
  return 0;
}

int cmd_simulate(const ConfigHandle& h, const std::string& history, const std::string& out_path) {
  double x0, v0;
  if (!history.empty()) {
    if (std::sscanf(history.c_str(), "%lf,%lf", &x0, &v0) != 2) {
      std::fprintf(stderr, "error: --history expects 'x,v'\n");
      return 2;
    }
  } else {
    mdde_statics_report r{};
    const mdde_status s = mdde_statics(h.cfg, &r);
    if (s != MDDE_OK) die(s);
    x0 = r.x2;
    v0 = 0.0;
  }

  mdde_trajectory* traj = nullptr;
  const mdde_status s = mdde_simulate(h.cfg, x0, v0, &traj);
  if (s != MDDE_OK) die(s);

  CsvWriter csv(out_path);
  csv.line("t,x,v");
  for (size_t i = 0; i < mdde_trajectory_size(traj); ++i) {
    double t, x, v;
    mdde_trajectory_sample(traj, i, &t, &x, &v);
    csv.row("%.15g,%.15g,%.15g", t, x, v);
  }
  double t_cross;
  if (mdde_trajectory_pullin(traj, &t_cross)) csv.row("# pullin,t=%.15g", t_cross);
  mdde_trajectory_free(traj);
  csv.commit();
  return 0;
}

int write_orbit_csv(const ConfigHandle& h, mdde_orbit* orbit, int use_dde,
                    const std::string& out_path) {
  CsvWriter csv(out_path);
  csv.line("k,cos,sin");
  const int N = mdde_orbit_harmonics(orbit);
  int last = 0;
  std::vector<double> cs(N + 1), sn(N + 1);
  for (int k = 0; k <= N; ++k) {
    mdde_orbit_coeff(orbit, k, &cs[k], &sn[k]);
    if (std::abs(cs[k]) > 1e-14 || std::abs(sn[k]) > 1e-14) last = k;
  }
  for (int k = 0; k <= last; ++k) csv.row("%d,%.15g,%.15g", k, cs[k], sn[k]);
  csv.row("# residual=%.15g", mdde_orbit_residual(orbit));

  double re[300], im[300];
  int count = 0;
  const mdde_status s = mdde_orbit_multipliers(h.cfg, orbit, use_dde, re, im, 300, &count);
  if (s != MDDE_OK) {
    mdde_orbit_free(orbit);
    die(s);
  }
  std::string line = "# multipliers=";
  for (int i = 0; i < count; ++i) {
    if (i) line += ";";
    line += "(" + fmt(re[i]) + "," + fmt(im[i]) + ")";
  }
  csv.line(line);
  csv.commit();
  return 0;
}

int cmd_orbit(const ConfigHandle& h, const std::string& mode, double guess,
              const std::string& out_path) {
  const int use_dde = mode == "dde" ? 1 : 0;
  mdde_orbit* orbit = nullptr;
  const mdde_status s = mdde_find_orbit(h.cfg, guess, &orbit);
  if (s != MDDE_OK) die(s);
  const int rc = write_orbit_csv(h, orbit, use_dde, out_path);
  mdde_orbit_free(orbit);
  return rc;
}

int cmd_continue(const ConfigHandle& h, const std::string& param, double to, int steps,
                 const std::string& out_path) {
  mdde_branch* branch = nullptr;
  const mdde_status s = mdde_continue(h.cfg, param.c_str(), to, steps, 0.0, &branch);
  if (s != MDDE_OK) die(s);

  CsvWriter csv(out_path);
  csv.line(param + ",mean,residual,mu1_re,mu1_im,mu2_re,mu2_im");
  for (size_t i = 0; i < mdde_branch_size(branch); ++i) {
    double value, mean, residual;
    double re[4] = {0, 0, 0, 0}, im[4] = {0, 0, 0, 0};
    int count = 0;
    mdde_branch_point(branch, i, &value, &mean, &residual, re, im, 2, &count);
    csv.row("%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g", value, mean, residual, re[0], im[0],
            re[1], im[1]);
  }
  csv.row("# truncated=%d", mdde_branch_truncated(branch));
  if (mdde_branch_truncated(branch)) csv.line(std::string("# ") + mdde_branch_diagnostic(branch));
  mdde_branch_free(branch);
  csv.commit();
  return 0;
}

int cmd_check(const ConfigHandle& h, const std::string& which) {
  mdde_check_report r{};
  const mdde_status s = mdde_check(h.cfg, which.c_str(), &r);
  if (s != MDDE_OK) die(s);
  for (int i = 0; i < r.n_lines; ++i)
    std::printf("%-44s margin=%-16.8g %s\n", r.lines[i].name, r.lines[i].margin,
                r.lines[i].pass ? "pass" : "FAIL");
  std::printf("verdict: %s (%s)\n", r.pass ? "pass" : "fail", r.verdict);
  return r.pass ? 0 : 1;
}

// reproduction scenarios always start from the reference defaults
int simulate_to(const std::vector<std::pair<std::string, std::string>>& overrides, double x0,
                double v0, const std::string& out_path) {
  ConfigHandle h;
  load_config(h, "");
  for (const auto& [k, v] : overrides) apply_override(h, k, v);
  mdde_trajectory* traj = nullptr;
  const mdde_status s = mdde_simulate(h.cfg, x0, v0, &traj);
  if (s != MDDE_OK) die(s);
  CsvWriter csv(out_path);
  csv.line("t,x,v");
  for (size_t i = 0; i < mdde_trajectory_size(traj); ++i) {
    double t, x, v;
    mdde_trajectory_sample(traj, i, &t, &x, &v);
    csv.row("%.15g,%.15g,%.15g", t, x, v);
  }
  double t_cross;
  if (mdde_trajectory_pullin(traj, &t_cross)) csv.row("# pullin,t=%.15g", t_cross);
  mdde_trajectory_free(traj);
  csv.commit();
  return 0;
}

int cmd_reproduce(const ConfigHandle& h, const std::string& what, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

  if (what == "table2") {
    mdde_statics_report r{};
    const mdde_status s = mdde_statics(h.cfg, &r);
    if (s != MDDE_OK) die(s);
    CsvWriter csv(path("table2.csv"));
    csv.line("c,e,x1,x2,G1,G2");
    csv.row("%.15g,%.15g,%.15g,%.15g,%.15g,%.15g", r.c, r.e, r.x1, r.x2, r.g1, r.g2);
    csv.commit();
    return 0;
  }
  if (what == "d0-sweep") {
    mdde_sweep* sweep = nullptr;
    const mdde_status s = mdde_d0_sweep(h.cfg, 10.0, 120.0, 1.0, &sweep);
    if (s != MDDE_OK) die(s);
    CsvWriter csv(path("d0_sweep.csv"));
    csv.line("v0,d0_linear,d0_squeeze");
    for (size_t i = 0; i < mdde_sweep_size(sweep); ++i) {
      double v0, dl, dsq;
      mdde_sweep_row(sweep, i, &v0, &dl, &dsq);
      csv.row("%.15g,%.15g,%.15g", v0, dl, dsq);
    }
    mdde_sweep_free(sweep);
    csv.commit();
    return 0;
  }
  if (what == "phase-portraits") {
    // forced runs at delta = 0.1579; the reference initial conditions
    // (0.0625, 0.0092) and (0.07, 0.0091) are displacement coordinates, so
    // they enter the gap-coordinate model as (1 - x, -v)
    const double ic1_x = 1.0 - 0.0625, ic1_v = -0.0092;
    const double ic2_x = 1.0 - 0.07, ic2_v = -0.0091;
    const std::vector<std::pair<std::string, std::string>> common = {
        {"delta", "0.1579"}, {"omega", "1"}};
    auto with = [&](std::initializer_list<std::pair<std::string, std::string>> extra,
                    const std::string& t_end) {
      std::vector<std::pair<std::string, std::string>> o = common;
      o.insert(o.end(), extra.begin(), extra.end());
      o.push_back({"t_end", t_end});
      return o;
    };
    simulate_to(with({{"d", "0"}}, "3000"), ic1_x, ic1_v, path("phase_d0_ic1.csv"));
    simulate_to(with({{"d", "0"}}, "3000"), ic2_x, ic2_v, path("phase_d0_ic2.csv"));
    simulate_to(with({{"d", "80"}, {"g2", "40"}}, "2000"), ic1_x, ic1_v,
                path("phase_d80_g40_ic1.csv"));
    simulate_to(with({{"d", "80"}, {"g2", "40"}}, "2000"), ic2_x, ic2_v,
                path("phase_d80_g40_ic2.csv"));
    simulate_to(with({{"d", "1"}, {"g2", "-8"}}, "2500"), ic1_x, ic1_v,
                path("phase_d1_gm8_ic1.csv"));
    simulate_to(with({{"d", "1"}, {"g2", "-8"}}, "2500"), ic2_x, ic2_v,
                path("phase_d1_gm8_ic2.csv"));
    return 0;
  }
  std::fprintf(stderr, "error: unknown reproduction target '%s'\n", what.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed electrostatic actuator toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON configuration file")->expected(1);
  app.add_option("--set", overrides, "override a configuration key (key=value)");

  auto* statics = app.add_subcommand("statics", "equilibria, pull-in and brackets");

  std::string d0_out;
  auto* d0 = app.add_subcommand("d0", "delay-stability bound and DC sweep");
  d0->add_option("--out", d0_out, "CSV path for the v0 sweep");

  std::string sim_history, sim_out = "trajectory.csv";
  double sim_d = -1.0, sim_t_end = -1.0;
  auto* simulate = app.add_subcommand("simulate", "integrate the delayed system");
  simulate->add_option("--history", sim_history, "constant history 'x,v'");
  simulate->add_option("--d", sim_d, "delay override");
  simulate->add_option("--t-end", sim_t_end, "final time override");
  simulate->add_option("--out", sim_out, "CSV output path");

  std::string orbit_mode = "ode", orbit_out = "orbit.csv";
  double orbit_guess = 0.0;
  auto* orbit = app.add_subcommand("orbit", "locate a periodic solution");
  orbit->add_option("--mode", orbit_mode, "multiplier mode: ode or dde")
      ->check(CLI::IsMember({"ode", "dde"}));
  orbit->add_option("--guess", orbit_guess, "mean-gap seed (default: upper equilibrium)");
  orbit->add_option("--out", orbit_out, "CSV output path");

  std::string cont_param = "d", cont_out = "branch.csv";
  double cont_to = 0.0;
  int cont_steps = 20;
  auto* cont = app.add_subcommand("continue", "continue a periodic solution in a parameter");
  cont->add_option("--param", cont_param, "continuation parameter: g1, g2 or d")
      ->check(CLI::IsMember({"g1", "g2", "d"}));
  cont->add_option("--to", cont_to, "target parameter value")->required();
  cont->add_option("--steps", cont_steps, "number of continuation steps");
  cont->add_option("--out", cont_out, "CSV output path");

  std::string check_which;
  auto* check = app.add_subcommand("check", "evaluate analytic gates with margins");
  check->add_option("--which", check_which, "hill, gains, squeeze or hn")
      ->required()
      ->check(CLI::IsMember({"hill", "gains", "squeeze", "hn"}));

  std::string rep_what, rep_dir = ".";
  auto* reproduce = app.add_subcommand("reproduce", "regenerate the reference data series");
  reproduce->add_option("--what", rep_what, "table2, d0-sweep or phase-portraits")
      ->required()
      ->check(CLI::IsMember({"table2", "d0-sweep", "phase-portraits"}));
  reproduce->add_option("--out-dir", rep_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  ConfigHandle h;
  load_config(h, config_path);
  for (const std::string& kv : overrides) {
    const auto pos = kv.find('=');
    if (pos == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value\n");
      return 2;
    }
    apply_override(h, kv.substr(0, pos), kv.substr(pos + 1));
  }
  if (simulate->parsed()) {
    if (sim_d >= 0.0) apply_override(h, "d", fmt(sim_d));
    if (sim_t_end > 0.0) apply_override(h, "t_end", fmt(sim_t_end));
  }

  if (statics->parsed()) return cmd_statics(h);
  if (d0->parsed()) return cmd_d0(h, d0_out);
  if (simulate->parsed()) return cmd_simulate(h, sim_history, sim_out);
  if (orbit->parsed()) return cmd_orbit(h, orbit_mode, orbit_guess, orbit_out);
  if (cont->parsed()) return cmd_continue(h, cont_param, cont_to, cont_steps, cont_out);
  if (check->parsed()) return cmd_check(h, check_which);
  if (reproduce->parsed()) return cmd_reproduce(h, rep_what, rep_dir);
  return 2;
}
