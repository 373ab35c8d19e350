#include "bai/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bai/acceptance.hpp"
#include "bai/errors.hpp"
#include "bai/finite_sample.hpp"
#include "bai/game.hpp"
#include "bai/policy.hpp"
#include "bai/regret.hpp"

#ifndef BAI_VERSION
#define BAI_VERSION "0.0.0"
#endif

namespace bai::cli {

using json = nlohmann::ordered_json;

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

double parse_double(std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw UsageError("malformed number '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  if (text.empty()) throw UsageError("empty grid");
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("grid '" + std::string(text) + "' must be a:b:step");
    const double a = parse_double(parts[0]);
    const double b = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (!(step > 0.0) || b < a) throw UsageError("grid '" + std::string(text) + "' needs a <= b and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (count > 1000000) throw UsageError("grid '" + std::string(text) + "' has too many points");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = a + static_cast<double>(i) * step;
    return out;
  }
  std::vector<double> out;
  for (auto p : split(text, ',')) out.push_back(parse_double(p));
  return out;
}

std::vector<std::uint64_t> parse_count_grid(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (double v : parse_grid(text)) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e15)
      throw UsageError("grid '" + std::string(text) + "' must hold positive integers");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

namespace {

struct Manifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t master_seed = 0;

  json to_json() const {
    json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["master_seed"] = master_seed;
    j["artifact_version"] = BAI_VERSION;
    j["timestamp"] = timestamp();
    return j;
  }

  // Fixed unless SOURCE_DATE_EPOCH is set, so reruns are byte-identical.
  static std::string timestamp() {
    std::time_t t = 0;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
      char* end = nullptr;
      const long long v = std::strtoll(env, &end, 10);
      if (end != env && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }
};

void add_manifest(json& j, const Manifest& m) {
  const json fields = m.to_json();
  for (const auto& [k, v] : fields.items()) j[k] = v;
}

// Writes `body` to stdout or to `path` plus `path`.manifest.json.
void emit(const std::string& body, const std::string& path, const Manifest& m, std::ostream& out) {
  if (path.empty()) {
    out << body;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << body;
  std::ofstream manifest(path + ".manifest.json", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write " + path + ".manifest.json");
  manifest << m.to_json().dump(2) << "\n";
}

json estimate_json(const RegretEstimate& e) {
  json j;
  j["mean"] = e.mean;
  j["std_error"] = e.std_error;
  j["replications"] = e.replications;
  j["low_replication_warning"] = e.low_replication_warning;
  return j;
}

json mean_pair_json(const MeanPair& p) { return json{{"arm1", p.arm1}, {"arm0", p.arm0}}; }

struct Common {
  unsigned threads = 0;
  std::string output;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--threads", common.threads, "Worker threads (0: machine parallelism)");
  sub->add_option("-o,--output", common.output, "Write to FILE and FILE.manifest.json");
}

void warn_low_reps(std::uint64_t reps, std::ostream& err) {
  if (reps < 1000) err << "warning: fewer than 1000 replications; standard errors are unreliable\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fixed-budget two-arm best-arm identification: minimax game, diffusion and finite-sample simulation", "bai"};
  app.set_version_flag("--version", BAI_VERSION);
  app.require_subcommand(1);

  Common common;
  Manifest manifest;

  struct {
    double sigma1 = 1.0, sigma0 = 1.0, tol = 1e-9;
  } solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the minimax game for (sigma1, sigma0)");
  solve_cmd->add_option("--sigma1", solve.sigma1)->required();
  solve_cmd->add_option("--sigma0", solve.sigma0)->required();
  solve_cmd->add_option("--tol", solve.tol);
  add_common(solve_cmd, common);

  struct {
    double gamma = 0.5, c = 0.0, mu1 = 0.0, mu0 = 0.0, sigma1 = 1.0, sigma0 = 1.0;
    std::uint64_t mc_reps = 0, seed = 0, steps = 1000;
  } regret;
  auto* regret_cmd = app.add_subcommand("regret", "Regret of a fixed-fraction rule in one environment");
  regret_cmd->add_option("--gamma", regret.gamma)->required();
  regret_cmd->add_option("--c", regret.c)->required();
  regret_cmd->add_option("--mu1", regret.mu1)->required();
  regret_cmd->add_option("--mu0", regret.mu0)->required();
  regret_cmd->add_option("--sigma1", regret.sigma1)->required();
  regret_cmd->add_option("--sigma0", regret.sigma0)->required();
  regret_cmd->add_option("--mc-reps", regret.mc_reps, "Monte Carlo replications (0: closed form only)");
  regret_cmd->add_option("--seed", regret.seed);
  add_common(regret_cmd, common);

  struct {
    double sigma1 = 1.0, sigma0 = 1.0;
    std::string gamma_grid, c_grid, delta_grid;
  } sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Nature's best-response regret over a (gamma, c, delta) grid");
  sweep_cmd->add_option("--sigma1", sweep.sigma1)->required();
  sweep_cmd->add_option("--sigma0", sweep.sigma0)->required();
  sweep_cmd->add_option("--gamma-grid", sweep.gamma_grid)->required();
  sweep_cmd->add_option("--c-grid", sweep.c_grid)->required();
  sweep_cmd->add_option("--delta-grid", sweep.delta_grid)->required();
  add_common(sweep_cmd, common);

  struct {
    std::string family = "gaussian", policy = "neyman", n_grid, gap_grid;
    std::uint64_t reps = 10000, seed = 0;
    double rho = 0.5, sigma1 = 1.0, sigma0 = 1.0, c = 0.0;
    int batch = 100;
  } sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Finite-sample scaled regret over (n, gap) grids");
  sim_cmd->add_option("--family", sim.family)->required();
  sim_cmd->add_option("--policy", sim.policy)->required();
  sim_cmd->add_option("--n-grid", sim.n_grid)->required();
  sim_cmd->add_option("--gap-grid", sim.gap_grid)->required();
  sim_cmd->add_option("--reps", sim.reps)->required();
  sim_cmd->add_option("--seed", sim.seed)->required();
  sim_cmd->add_option("--rho", sim.rho, "Two-stage pilot exponent");
  sim_cmd->add_option("--sigma1", sim.sigma1, "Gaussian arm-1 standard deviation");
  sim_cmd->add_option("--sigma0", sim.sigma0, "Gaussian arm-0 standard deviation");
  sim_cmd->add_option("--batch", sim.batch, "Adaptive re-estimation interval");
  sim_cmd->add_option("--c", sim.c, "Decision threshold");
  add_common(sim_cmd, common);

  bool fast = false;
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
  verify_cmd->add_flag("--fast", fast, "10^4 replications, tolerances widened by 2");
  verify_cmd->add_option("--threads", common.threads);

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' && !app.get_subcommand_no_throw(args[0])) {
    err << "error: unknown subcommand '" << args[0] << "'\n\n" << app.help();
    return 2;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << BAI_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*solve_cmd) {
      manifest.command = "solve";
      manifest.parameters = {{"sigma1", format_number(solve.sigma1)},
                             {"sigma0", format_number(solve.sigma0)},
                             {"tol", format_number(solve.tol)}};
      const EquilibriumSolution s = solve_equilibrium(solve.sigma1, solve.sigma0, solve.tol);
      json j;
      j["sigma1"] = s.sigma1;
      j["sigma0"] = s.sigma0;
      j["gamma_star"] = s.gamma_star;
      j["c_star"] = s.c_star;
      j["eta_star"] = s.eta_star;
      j["delta_prior_star"] = s.delta_prior_star;
      j["v_star"] = s.v_star;
      j["lfp"] = {{"state1", mean_pair_json(s.lfp.state1)},
                  {"state0", mean_pair_json(s.lfp.state0)},
                  {"m1", s.lfp.m1}};
      j["exploitability"] = s.exploitability;
      j["nature_gain"] = s.nature_gain;
      j["agent_gain"] = s.agent_gain;
      j["tolerance"] = s.tolerance;
      add_manifest(j, manifest);
      emit(j.dump(2) + "\n", common.output, manifest, out);
      return 0;
    }

    if (*regret_cmd) {
      manifest.command = "regret";
      manifest.master_seed = regret.seed;
      manifest.parameters = {{"gamma", format_number(regret.gamma)},
                             {"c", format_number(regret.c)},
                             {"mu1", format_number(regret.mu1)},
                             {"mu0", format_number(regret.mu0)},
                             {"sigma1", format_number(regret.sigma1)},
                             {"sigma0", format_number(regret.sigma0)},
                             {"mc_reps", std::to_string(regret.mc_reps)}};
      const Environment env{regret.mu1, regret.mu0, regret.sigma1, regret.sigma0};
      json j;
      j["closed_form"] = regret_closed_form(regret.gamma, regret.c, env);
      if (regret.mc_reps > 0) {
        warn_low_reps(regret.mc_reps, err);
        const auto e = regret_monte_carlo(fixed_fraction_policy(regret.gamma, regret.c), env,
                                          regret.mc_reps, regret.seed, {common.threads, regret.steps});
        j["monte_carlo"] = estimate_json(e);
      }
      add_manifest(j, manifest);
      emit(j.dump(2) + "\n", common.output, manifest, out);
      return 0;
    }

    if (*sweep_cmd) {
      manifest.command = "sweep";
      manifest.parameters = {{"sigma1", format_number(sweep.sigma1)},
                             {"sigma0", format_number(sweep.sigma0)},
                             {"gamma_grid", sweep.gamma_grid},
                             {"c_grid", sweep.c_grid},
                             {"delta_grid", sweep.delta_grid}};
      const auto gammas = parse_grid(sweep.gamma_grid);
      const auto cs = parse_grid(sweep.c_grid);
      const auto deltas = parse_grid(sweep.delta_grid);
      std::ostringstream csv;
      csv << "gamma,c,delta,side,regret\n";
      for (double g : gammas) {
        if (!(g >= 0.0 && g <= 1.0)) throw DomainError("gamma grid values must lie in [0, 1]");
        for (double c : cs) {
          for (double d : deltas) {
            for (NatureSide side : {NatureSide::theta1, NatureSide::theta0}) {
              const double v = sup_regret_at_gap(g, c, d, side, sweep.sigma1, sweep.sigma0);
              csv << format_number(g) << ',' << format_number(c) << ',' << format_number(d) << ','
                  << (side == NatureSide::theta1 ? "theta1" : "theta0") << ',' << format_number(v)
                  << '\n';
            }
          }
        }
      }
      emit(csv.str(), common.output, manifest, out);
      return 0;
    }

    if (*sim_cmd) {
      manifest.command = "simulate";
      manifest.master_seed = sim.seed;
      manifest.parameters = {{"family", sim.family},       {"policy", sim.policy},
                             {"n_grid", sim.n_grid},       {"gap_grid", sim.gap_grid},
                             {"reps", std::to_string(sim.reps)},
                             {"rho", format_number(sim.rho)},
                             {"sigma1", format_number(sim.sigma1)},
                             {"sigma0", format_number(sim.sigma0)},
                             {"batch", std::to_string(sim.batch)},
                             {"c", format_number(sim.c)}};
      const Family family = parse_family(sim.family);
      const PolicyName name = parse_policy_name(sim.policy);
      const auto ns = parse_count_grid(sim.n_grid);
      const auto gaps = parse_grid(sim.gap_grid);
      const double s1 = family == Family::bernoulli ? 0.5 : sim.sigma1;
      const double s0 = family == Family::bernoulli ? 0.5 : sim.sigma0;
      const PolicySpec policy = resolve(name, s1, s0, sim.rho, sim.batch, sim.c);
      warn_low_reps(sim.reps, err);
      const CurveTable table = scaled_regret_curve(family, sim.sigma1, sim.sigma0, policy, gaps, ns,
                                                   sim.reps, sim.seed, common.threads);
      std::ostringstream csv;
      csv << "family,policy,n,gap,h1,h0,scaled_regret,std_error,replications,seed\n";
      for (const auto& r : table.rows) {
        csv << to_string(family) << ',' << name.to_string() << ',' << r.n << ','
            << format_number(r.gap) << ',' << format_number(r.h1) << ',' << format_number(r.h0)
            << ',' << format_number(r.estimate.mean) << ',' << format_number(r.estimate.std_error)
            << ',' << r.estimate.replications << ',' << sim.seed << '\n';
      }
      emit(csv.str(), common.output, manifest, out);
      return 0;
    }

    if (*verify_cmd) {
      acceptance::Options options;
      options.fast = fast;
      options.threads = common.threads;
      options.on_result = [&](const acceptance::CriterionResult& r) {
        out << acceptance::format_line(r) << "\n" << std::flush;
      };
      const auto results = acceptance::run_all(options);
      const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; });
      out << passed << "/" << results.size() << " criteria passed" << (fast ? " (fast)" : "") << "\n";
      return passed == static_cast<long>(results.size()) ? 0 : 1;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace bai::cli
