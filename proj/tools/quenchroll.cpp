// quenchroll: spectral solver pipeline for rolls-to-zero fronts of the
// directionally quenched Swift-Hohenberg equation.

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "quenchroll/io.hpp"
#include "quenchroll/pipeline.hpp"

using namespace quenchroll;
using nlohmann::json;

namespace {

int worker_count(const QuenchConfig& cfg) {
  int n = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QUENCHROLL_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(n, 1);
}

json selection_json(const SelectionResult& s) {
  return json{{"delta", s.delta},
              {"gamma", s.gamma},
              {"Omega_star", s.Omega_star},
              {"omega_star", s.omega_star},
              {"constraint_residual", s.constraint_residual},
              {"H_left", s.H_left},
              {"H_right", s.H_right},
              {"iterations", s.iterations},
              {"U_at_0", s.U_at_0},
              {"eps", s.eps}};
}

json bundle_json(const SolutionBundle& b) {
  json j;
  j["delta"] = b.cfg.delta;
  j["gamma"] = b.cfg.gamma;
  j["omega"] = b.omega;
  j["eps"] = b.eps;
  j["selection"] = selection_json(b.selection);
  j["diagnostics"] = b.diagnostics;
  j["config"] = config_to_string(b.cfg);
  return j;
}

void write_profile_outputs(const SolutionBundle& b, const std::string& prefix) {
  write_field_csv(prefix + "_U.csv", b.U, b.eps, b.cfg.tau);
  write_field_csv(prefix + "_v_near.csv", b.corrector.v_near, b.eps, b.cfg.tau);
  write_field_csv(prefix + "_v_far.csv", b.corrector.v_far, b.eps, b.cfg.tau);
  // profile in the original variable z = x / omega
  {
    std::ofstream os(prefix + "_U_z.csv");
    os.precision(17);
    os << "z,u\n";
    const GridSpec& g = b.grid;
    for (int p = 0; p < g.point_count; ++p)
      os << g.x(p) / b.omega << "," << b.U.samples()[p].real() << "\n";
  }
  write_json(prefix + "_manifest.json", bundle_json(b).dump(2));
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"quenched pattern-front solver"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path;
  QuenchConfig cfg;
  app.add_option("--config", config_path, "flat key = value config file")
      ->check(CLI::ExistingFile);

  double opt_delta = -1.0, opt_gamma = -1e9, opt_Omega = -1e9, opt_tol = -1.0;
  app.add_option("--delta", opt_delta, "bifurcation parameter");
  app.add_option("--gamma", opt_gamma, "roll phase at the quench");
  app.add_option("--Omega", opt_Omega, "pin the wavenumber parameter");
  app.add_option("--tol", opt_tol, "override the stage tolerance");

  auto* c_rolls = app.add_subcommand("rolls", "periodic roll solution");
  int rolls_modes = 0;
  c_rolls->add_option("--modes", rolls_modes, "Galerkin modes");

  auto* c_env = app.add_subcommand("envelope", "front envelope profile");
  double env_c = 0.0, env_S = 0.0, env_shift_arg = 0.0;
  int env_n = 0;
  c_env->add_option("--c", env_c, "front speed");
  c_env->add_option("--S", env_S, "half window");
  c_env->add_option("--n", env_n, "sample count");
  c_env->add_option("--shift", env_shift_arg, "evaluation shift");

  auto* c_corr = app.add_subcommand("corrector", "far-field contraction at fixed parameters");
  auto* c_red = app.add_subcommand("reduced", "reduced envelope fixed point");
  auto* c_sel = app.add_subcommand("select", "wavenumber selection");
  int sweep_gamma = 0;
  c_sel->add_option("--sweep-gamma", sweep_gamma, "number of gamma values over one period");
  auto* c_build = app.add_subcommand("build", "full profile assembly");
  bool pin_omega = false;
  c_build->add_flag("--pin-omega", pin_omega, "skip selection; use the configured Omega");
  auto* c_sim = app.add_subcommand("simulate", "time integration");
  std::string sim_init = "ansatz";
  double sim_T = 0.0, sim_dt = 0.0;
  int snap_every = 0;
  c_sim->add_option("--init", sim_init, "ansatz | noise");
  c_sim->add_option("--T", sim_T, "final time");
  c_sim->add_option("--dt", sim_dt, "time step");
  c_sim->add_option("--snap-every", snap_every, "steps between snapshots");
  auto* c_verify = app.add_subcommand("verify", "invariant suite");
  auto* c_sweep = app.add_subcommand("sweep", "parameter sweep of full builds");
  int sweep_n = 4;
  double sweep_d0 = 0.02, sweep_d1 = 0.05;
  c_sweep->add_option("--delta-min", sweep_d0);
  c_sweep->add_option("--delta-max", sweep_d1);
  c_sweep->add_option("--points", sweep_n);

  std::string out_prefix = "quenchroll_out";
  app.add_option("--out", out_prefix, "output file prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (opt_delta >= 0.0) cfg.delta = opt_delta;
    if (opt_gamma > -1e8) cfg.gamma = opt_gamma;
    if (opt_Omega > -1e8) cfg.Omega = opt_Omega;
    if (rolls_modes > 0) cfg.rolls_modes = rolls_modes;
    if (env_c > 0.0) cfg.env_c = env_c;
    if (env_S > 0.0) cfg.env_S = env_S;
    if (env_n > 0) cfg.env_n = env_n;
    if (env_shift_arg != 0.0) cfg.env_shift = env_shift_arg;
    if (sim_T > 0.0) cfg.sim_T = sim_T;
    if (sim_dt > 0.0) cfg.sim_dt = sim_dt;
    cfg.validate();
    for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  }

  try {
    if (*c_rolls) {
      if (opt_tol > 0.0) cfg.newton_tol = opt_tol;
      const PeriodicProfile r = solve_rolls(cfg.delta, cfg.Omega, cfg.gamma, cfg.rolls_modes,
                                            cfg.newton_tol);
      const HamiltonianValue H = hamiltonian_of_rolls(r);
      json j{{"delta", r.delta},       {"Omega", r.Omega},   {"gamma", r.gamma},
             {"omega", r.omega},       {"eps", r.eps},       {"hamiltonian", H.mean},
             {"hamiltonian_dev", H.max_deviation},           {"residual", r.residual}};
      std::cout << j.dump(2) << "\n";
      std::ofstream os(out_prefix + "_rolls.csv");
      os.precision(17);
      os << "x,u\n";
      for (int q = 0; q < 512; ++q) {
        const double x = kTwoPi * q / 512;
        os << x << "," << r.eval(x) << "\n";
      }
    } else if (*c_env) {
      if (opt_tol > 0.0) cfg.env_tol = opt_tol;
      EnvelopeProfile env = solve_envelope(cfg.env_c, cfg.env_S, cfg.env_n, cfg.env_tol);
      if (cfg.env_shift != 0.0) env = shift_envelope(env, cfg.env_shift);
      if (env.range_warning())
        std::cerr << "warning: envelope leaves [-0.1, 1.1]; min(chi) = " << env.min_chi() << "\n";
      json j{{"c", env.speed()},
             {"energy_lhs", env.speed() * env.gradient_energy()},
             {"energy_rhs", 3.0 * kPi / 16.0},
             {"decay_left", env.decay_rate_left()},
             {"decay_right", env.decay_rate_right()},
             {"fit_r2_left", env.fit_r2_left()},
             {"fit_r2_right", env.fit_r2_right()},
             {"residual", env.residual()},
             {"min_chi", env.min_chi()},
             {"shift", env.shift()}};
      std::cout << j.dump(2) << "\n";
      std::ofstream os(out_prefix + "_envelope.csv");
      os.precision(17);
      os << "x,chi,chi1,chi2\n";
      const int n = cfg.env_n;
      for (int q = 0; q <= n; ++q) {
        const double x = -cfg.env_S + 2.0 * cfg.env_S * q / n;
        os << x << "," << env.value(x) << "," << env.d1(x) << "," << env.d2(x) << "\n";
      }
    } else if (*c_corr || *c_red) {
      if (opt_tol > 0.0) cfg.reduced_tol = opt_tol;
      auto env = make_envelope(cfg);
      QuenchContext ctx(cfg, env);
      CorrectorState st = reduced_fixed_point(ctx);
      json j{{"iterations", st.iterations},
             {"far_iterations", st.far_iterations},
             {"reduced_residual", st.reduced_residual},
             {"h_star_norm", st.h_star_norm},
             {"q_consistency", st.q_consistency},
             {"neumann_ratio", st.neumann_ratio},
             {"v_near_H4", st.v_near.sobolev_norm(4.0)},
             {"v_far_H4", st.v_far.sobolev_norm(4.0)}};
      json log = json::array();
      for (std::size_t k = 0; k < st.update_norms.size(); ++k)
        log.push_back({{"k", k},
                       {"delta_norm", st.update_norms[k]},
                       {"contraction", k > 0 && k - 1 < st.contraction_estimates.size()
                                           ? st.contraction_estimates[k - 1]
                                           : 0.0}});
      j["iteration_log"] = log;
      std::cout << j.dump(2) << "\n";
      write_field_csv(out_prefix + "_v_near.csv", st.v_near, ctx.eps(), cfg.tau);
      write_field_csv(out_prefix + "_v_far.csv", st.v_far, ctx.eps(), cfg.tau);
      write_field_csv(out_prefix + "_g_minus.csv", st.g_minus, ctx.eps(), cfg.tau);
      write_field_csv(out_prefix + "_g_plus.csv", st.g_plus, ctx.eps(), cfg.tau);
    } else if (*c_sel) {
      if (opt_tol > 0.0) cfg.select_tol = opt_tol;
      auto env = make_envelope(cfg);
      json rows = json::array();
      const int ng = std::max(1, sweep_gamma);
      std::ofstream os(out_prefix + "_select.csv");
      os.precision(17);
      os << "delta,gamma,Omega_star,residual\n";
      for (int i = 0; i < ng; ++i) {
        const double gamma = sweep_gamma > 0 ? kTwoPi * i / ng : cfg.gamma;
        const SelectionResult s = select_omega(cfg.delta, gamma, cfg, env);
        rows.push_back(selection_json(s));
        os << s.delta << "," << s.gamma << "," << s.Omega_star << ","
           << s.constraint_residual << "\n";
      }
      std::cout << rows.dump(2) << "\n";
    } else if (*c_build) {
      const SolutionBundle b = build(cfg.delta, cfg.gamma, cfg, pin_omega);
      std::cout << bundle_json(b).dump(2) << "\n";
      write_profile_outputs(b, out_prefix);
    } else if (*c_sim) {
      if (sim_init == "ansatz") {
        const SolutionBundle b = build(cfg.delta, cfg.gamma, cfg, false);
        const DriftResult d = steady_drift(b.grid, cfg.delta, b.omega,
                                           b.U.real_samples(), cfg.sim_T, cfg.sim_dt);
        json j{{"drift_inf", d.inf}, {"drift_l2", d.l2}, {"steps", d.steps},
               {"eps", b.eps},       {"T", cfg.sim_T},   {"dt", cfg.sim_dt}};
        std::cout << j.dump(2) << "\n";
      } else if (sim_init == "noise") {
        const int ell = cfg.grid_ell > 0 ? cfg.grid_ell : 32;
        const int N = cfg.grid_N > 0 ? cfg.grid_N : 4096;
        const GridSpec g = GridSpec::box(ell, N);
        int frame = 0;
        json index = json::array();
        auto on_snap = [&](const SimState& s) {
          const std::string path = out_prefix + "_frame" + std::to_string(frame++) + ".csv";
          std::ofstream fs(path);
          fs.precision(17);
          fs << "x,u\n";
          for (int p = 0; p < g.point_count; ++p) fs << g.x(p) << "," << s.u[p] << "\n";
          index.push_back({{"t", s.t}, {"file", path}});
        };
        std::function<void(const SimState&)> snap_cb;
        if (snap_every > 0) snap_cb = on_snap;
        const InvadeResult r = invade(g, cfg.delta, cfg.sim_T, cfg.sim_dt, cfg.seed, 0.0,
                                      snap_every, snap_cb);
        json j{{"left_amplitude", r.left_amplitude},
               {"right_sup", r.right_sup},
               {"dominant_freq", r.dominant_freq},
               {"snapshots", r.snapshots},
               {"frames", index}};
        std::cout << j.dump(2) << "\n";
        write_json(out_prefix + "_frames.json", index.dump(2));
      } else {
        std::cerr << "config error: --init must be ansatz or noise\n";
        return 3;
      }
    } else if (*c_verify) {
      const auto entries = verify(cfg);
      json j = json::array();
      bool all = true;
      for (const auto& e : entries) {
        j.push_back({{"name", e.name},
                     {"pass", e.pass},
                     {"measured", e.measured},
                     {"threshold", e.threshold},
                     {"note", e.note}});
        all = all && e.pass;
        std::cout << (e.pass ? "PASS " : "FAIL ") << e.name << "  measured=" << e.measured
                  << "  threshold=" << e.threshold << "\n";
      }
      write_json(out_prefix + "_verify.json", j.dump(2));
      std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
    } else if (*c_sweep) {
      auto env = make_envelope(cfg);
      std::vector<double> deltas(sweep_n);
      for (int i = 0; i < sweep_n; ++i)
        deltas[i] = sweep_d0 + (sweep_d1 - sweep_d0) * i / std::max(sweep_n - 1, 1);
      std::vector<json> results(sweep_n);
      std::atomic<int> next{0};
      const int workers = std::min(worker_count(cfg), sweep_n);
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (int i = next.fetch_add(1); i < sweep_n; i = next.fetch_add(1)) {
            const SolutionBundle b = build(deltas[i], cfg.gamma, cfg, false, env);
            results[i] = bundle_json(b);
          }
        });
      for (auto& t : pool) t.join();
      json j = json::array();
      for (auto& r : results) j.push_back(std::move(r));
      std::cout << j.dump(2) << "\n";
      write_json(out_prefix + "_sweep.json", j.dump(2));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
