#include "quenchroll/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace quenchroll {

void write_field_csv(const std::string& path, const SpectralField& f, double eps, double tau) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  os << "x,re_u,im_u\n";
  const GridSpec& g = f.grid();
  for (int p = 0; p < g.point_count; ++p)
    os << g.x(p) << "," << f.samples()[p].real() << "," << f.samples()[p].imag() << "\n";
  nlohmann::json side;
  side["L"] = g.half_length;
  side["N"] = g.point_count;
  side["convention"] = "paper-continuum";
  side["eps"] = eps;
  side["tau"] = tau;
  std::ofstream js(path + ".json");
  js << side.dump(2) << "\n";
}

void write_json(const std::string& path, const std::string& body) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << body << "\n";
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

} // namespace

void apply_config_line(QuenchConfig& cfg, const std::string& key, const std::string& value) {
  auto d = [&] { return std::stod(value); };
  auto i = [&] { return std::stoi(value); };
  if (key == "delta") cfg.delta = d();
  else if (key == "Omega") cfg.Omega = d();
  else if (key == "gamma") cfg.gamma = d();
  else if (key == "tau") cfg.tau = d();
  else if (key == "beta") cfg.beta = d();
  else if (key == "grid_ell") cfg.grid_ell = i();
  else if (key == "grid_N") cfg.grid_N = i();
  else if (key == "slow_N") cfg.slow_N = i();
  else if (key == "rolls_modes") cfg.rolls_modes = i();
  else if (key == "slow_halfwidth_target") cfg.slow_halfwidth_target = d();
  else if (key == "C_multiplier") cfg.C_multiplier = d();
  else if (key == "ball_R") cfg.ball_R = d();
  else if (key == "fixed_point_tol") cfg.fixed_point_tol = d();
  else if (key == "newton_tol") cfg.newton_tol = d();
  else if (key == "reduced_tol") cfg.reduced_tol = d();
  else if (key == "select_tol") cfg.select_tol = d();
  else if (key == "max_far_iter") cfg.max_far_iter = i();
  else if (key == "max_reduced_iter") cfg.max_reduced_iter = i();
  else if (key == "reduced_accel_depth") cfg.reduced_accel_depth = i();
  else if (key == "env_c") cfg.env_c = d();
  else if (key == "env_S") cfg.env_S = d();
  else if (key == "env_n") cfg.env_n = i();
  else if (key == "env_shift") cfg.env_shift = d();
  else if (key == "env_tol") cfg.env_tol = d();
  else if (key == "sim_dt") cfg.sim_dt = d();
  else if (key == "sim_T") cfg.sim_T = d();
  else if (key == "seed") cfg.seed = std::stoul(value);
  else if (key == "threads") cfg.threads = i();
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

QuenchConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  QuenchConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key = value");
    apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

std::string config_to_string(const QuenchConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "delta = " << cfg.delta << "\nOmega = " << cfg.Omega << "\ngamma = " << cfg.gamma
     << "\ntau = " << cfg.tau << "\nbeta = " << cfg.beta << "\ngrid_ell = " << cfg.grid_ell
     << "\ngrid_N = " << cfg.grid_N << "\nslow_N = " << cfg.slow_N
     << "\nrolls_modes = " << cfg.rolls_modes
     << "\nslow_halfwidth_target = " << cfg.slow_halfwidth_target
     << "\nC_multiplier = " << cfg.C_multiplier << "\nball_R = " << cfg.ball_R
     << "\nfixed_point_tol = " << cfg.fixed_point_tol << "\nnewton_tol = " << cfg.newton_tol
     << "\nreduced_tol = " << cfg.reduced_tol << "\nselect_tol = " << cfg.select_tol
     << "\nmax_far_iter = " << cfg.max_far_iter << "\nmax_reduced_iter = " << cfg.max_reduced_iter
     << "\nreduced_accel_depth = " << cfg.reduced_accel_depth
     << "\nenv_c = " << cfg.env_c << "\nenv_S = " << cfg.env_S << "\nenv_n = " << cfg.env_n
     << "\nenv_shift = " << cfg.env_shift << "\nenv_tol = " << cfg.env_tol
     << "\nsim_dt = " << cfg.sim_dt << "\nsim_T = " << cfg.sim_T << "\nseed = " << cfg.seed
     << "\nthreads = " << cfg.threads << "\n";
  return os.str();
}

} // namespace quenchroll
