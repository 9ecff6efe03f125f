// mcvlab: mean-field particle Monte Carlo laboratory.
//
// Subcommands:
//   bias        estimate particle-discretization bias against reference values
//   antithetic  estimate the variance of the antithetic coupling difference
//   oracle      print closed-form / recursion reference values
//   selftest    quick internal consistency checks
//
// Exit codes: 0 success, 1 configuration error, 2 divergence abort.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcvlab/engine.hpp"
#include "mcvlab/errors.hpp"
#include "mcvlab/experiment.hpp"
#include "mcvlab/oracles.hpp"
#include "mcvlab/report.hpp"
#include "mcvlab/rng.hpp"
#include "mcvlab/version.hpp"

namespace {

using namespace mcvlab;

// ---------------------------------------------------------------------------
// experiment configuration assembly: defaults < --paper-scale < config file
// < explicit command-line flags
// ---------------------------------------------------------------------------

struct RawOptions {
  std::optional<std::string> model, mode, observables, divergence, out;
  std::optional<double> horizon, reference_value;
  std::optional<double> gamma, beta, v2, coupling, kbt, init_mean, init_var, upsilon, x0;
  std::optional<long> runs;
  std::optional<int> steps, particles_start, iterations, threads;
  std::optional<std::uint64_t> seed;
  std::optional<bool> paper_scale;

  void overlay(const RawOptions& stronger) {
    auto take = [](auto& dst, const auto& src) {
      if (src) dst = src;
    };
    take(model, stronger.model);
    take(mode, stronger.mode);
    take(observables, stronger.observables);
    take(divergence, stronger.divergence);
    take(out, stronger.out);
    take(horizon, stronger.horizon);
    take(reference_value, stronger.reference_value);
    take(gamma, stronger.gamma);
    take(beta, stronger.beta);
    take(v2, stronger.v2);
    take(coupling, stronger.coupling);
    take(kbt, stronger.kbt);
    take(init_mean, stronger.init_mean);
    take(init_var, stronger.init_var);
    take(upsilon, stronger.upsilon);
    take(x0, stronger.x0);
    take(runs, stronger.runs);
    take(steps, stronger.steps);
    take(particles_start, stronger.particles_start);
    take(iterations, stronger.iterations);
    take(threads, stronger.threads);
    take(seed, stronger.seed);
    take(paper_scale, stronger.paper_scale);
  }
};

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof())
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("config key '" + key + "': cannot parse boolean '" + text + "'");
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// flat `key = value` file, '#' comments; keys match the long flag names
RawOptions load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  RawOptions raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "model") raw.model = value;
    else if (key == "mode") raw.mode = value;
    else if (key == "observables") raw.observables = value;
    else if (key == "divergence") raw.divergence = value;
    else if (key == "out") raw.out = value;
    else if (key == "horizon") raw.horizon = parse_number<double>(key, value);
    else if (key == "reference-value") raw.reference_value = parse_number<double>(key, value);
    else if (key == "gamma") raw.gamma = parse_number<double>(key, value);
    else if (key == "beta") raw.beta = parse_number<double>(key, value);
    else if (key == "v2") raw.v2 = parse_number<double>(key, value);
    else if (key == "coupling") raw.coupling = parse_number<double>(key, value);
    else if (key == "kbt") raw.kbt = parse_number<double>(key, value);
    else if (key == "init-mean") raw.init_mean = parse_number<double>(key, value);
    else if (key == "init-var") raw.init_var = parse_number<double>(key, value);
    else if (key == "upsilon") raw.upsilon = parse_number<double>(key, value);
    else if (key == "x0") raw.x0 = parse_number<double>(key, value);
    else if (key == "runs") raw.runs = parse_number<long>(key, value);
    else if (key == "steps") raw.steps = parse_number<int>(key, value);
    else if (key == "particles-start") raw.particles_start = parse_number<int>(key, value);
    else if (key == "iterations") raw.iterations = parse_number<int>(key, value);
    else if (key == "threads") raw.threads = parse_number<int>(key, value);
    else if (key == "seed") raw.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "paper-scale") raw.paper_scale = parse_bool(key, value);
    else throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return raw;
}

std::vector<Observable> parse_observables(const std::string& text) {
  std::vector<Observable> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token == "first") out.push_back(Observable::first_moment());
    else if (token == "second") out.push_back(Observable::second_moment());
    else if (token.rfind("indicator:", 0) == 0)
      out.push_back(Observable::indicator_above(
          parse_number<double>("observables", token.substr(10))));
    else
      throw ConfigError("observable '" + token +
                        "': expected first, second or indicator:<threshold>");
  }
  if (out.empty()) throw ConfigError("observables: empty list");
  return out;
}

ModelSpec build_model(const RawOptions& raw) {
  const std::string name = raw.model.value_or("generalized-ou");
  auto reject = [&](const std::optional<double>& v, const char* flag) {
    if (v) throw ConfigError("parameter --" + std::string(flag) + " does not apply to model '" +
                             name + "'");
  };
  if (name == "generalized-ou" || name == "ou") {
    GeneralizedOu m;
    if (raw.gamma) m.gamma = *raw.gamma;
    if (raw.beta) m.beta = *raw.beta;
    if (raw.v2) m.v2 = *raw.v2;
    if (raw.x0) m.x0 = *raw.x0;
    reject(raw.coupling, "coupling"); reject(raw.kbt, "kbt");
    reject(raw.init_mean, "init-mean"); reject(raw.init_var, "init-var");
    reject(raw.upsilon, "upsilon");
    return m;
  }
  if (name == "rotator" || name == "plane-rotator") {
    PlaneRotator m;
    if (raw.coupling) m.coupling = *raw.coupling;
    if (raw.kbt) m.k_b_t = *raw.kbt;
    if (raw.init_mean) m.init_mean = *raw.init_mean;
    if (raw.init_var) m.init_var = *raw.init_var;
    reject(raw.gamma, "gamma"); reject(raw.beta, "beta"); reject(raw.v2, "v2");
    reject(raw.upsilon, "upsilon"); reject(raw.x0, "x0");
    return m;
  }
  if (name == "polynomial" || name == "polynomial-drift") {
    PolynomialDrift m;
    if (raw.gamma) m.gamma = *raw.gamma;
    if (raw.x0) m.x0 = *raw.x0;
    reject(raw.beta, "beta"); reject(raw.v2, "v2"); reject(raw.coupling, "coupling");
    reject(raw.kbt, "kbt"); reject(raw.init_mean, "init-mean");
    reject(raw.init_var, "init-var"); reject(raw.upsilon, "upsilon");
    return m;
  }
  if (name == "burgers" || name == "viscous-burgers") {
    ViscousBurgers m;
    if (raw.upsilon) m.upsilon = *raw.upsilon;
    if (raw.x0) m.x0 = *raw.x0;
    reject(raw.gamma, "gamma"); reject(raw.beta, "beta"); reject(raw.v2, "v2");
    reject(raw.coupling, "coupling"); reject(raw.kbt, "kbt");
    reject(raw.init_mean, "init-mean"); reject(raw.init_var, "init-var");
    return m;
  }
  throw ConfigError("unknown model '" + name +
                    "' (expected generalized-ou, rotator, polynomial or burgers)");
}

struct PaperScaleDefaults {
  long runs;
  int iterations;
};

PaperScaleDefaults paper_scale_for(const ModelSpec& model) {
  if (std::holds_alternative<PlaneRotator>(model)) return {490000000L, 4};
  if (std::holds_alternative<PolynomialDrift>(model)) return {5000000L, 8};
  return {5000000L, 5};
}

ExperimentConfig build_experiment(const RawOptions& raw, RunMode base_mode) {
  ExperimentConfig config;
  config.model = build_model(raw);

  if (raw.paper_scale.value_or(false)) {
    const PaperScaleDefaults scale = paper_scale_for(config.model);
    config.runs = scale.runs;
    config.iterations = scale.iterations;
  }
  if (std::holds_alternative<ViscousBurgers>(config.model)) config.steps = 500;

  if (raw.observables) config.observables = parse_observables(*raw.observables);
  if (raw.horizon) config.horizon = *raw.horizon;
  if (raw.steps) config.steps = *raw.steps;
  if (raw.runs) config.runs = *raw.runs;
  if (raw.particles_start) config.particles_start = *raw.particles_start;
  if (raw.iterations) config.iterations = *raw.iterations;
  if (raw.seed) config.master_seed = *raw.seed;
  if (raw.threads) config.threads = *raw.threads;
  if (raw.reference_value) config.reference_value = *raw.reference_value;

  config.mode = base_mode;
  if (raw.mode) {
    if (*raw.mode == "bias") config.mode = RunMode::bias;
    else if (*raw.mode == "antithetic") config.mode = RunMode::antithetic;
    else if (*raw.mode == "both") config.mode = RunMode::both;
    else throw ConfigError("mode '" + *raw.mode + "': expected bias, antithetic or both");
  }
  if (raw.divergence) {
    if (*raw.divergence == "abort") config.divergence = DivergencePolicy::abort;
    else if (*raw.divergence == "exclude") config.divergence = DivergencePolicy::exclude;
    else throw ConfigError("divergence '" + *raw.divergence + "': expected abort or exclude");
  }
  return config;
}

void add_experiment_flags(CLI::App* cmd, RawOptions& raw, std::string& config_path) {
  cmd->add_option("--config", config_path, "flat key=value config file");
  cmd->add_option("--model", raw.model, "generalized-ou | rotator | polynomial | burgers");
  cmd->add_option("--observables", raw.observables,
                  "comma list: first, second, indicator:<threshold>");
  cmd->add_option("--runs", raw.runs, "Monte Carlo runs per schedule point");
  cmd->add_option("--particles-start", raw.particles_start, "first particle count");
  cmd->add_option("--iterations", raw.iterations, "doubling iterations");
  cmd->add_option("--steps", raw.steps, "Euler steps");
  cmd->add_option("--horizon", raw.horizon, "time horizon");
  cmd->add_option("--seed", raw.seed, "master seed (default 0)");
  cmd->add_option("--mode", raw.mode, "bias | antithetic | both");
  cmd->add_option("--reference-value", raw.reference_value,
                  "external reference instead of the oracle");
  cmd->add_option("--divergence", raw.divergence, "abort | exclude (default abort)");
  cmd->add_option("--threads", raw.threads, "worker threads (0 = hardware)");
  cmd->add_option("--out", raw.out, "CSV output path");
  cmd->add_flag_callback(
      "--paper-scale", [&raw] { raw.paper_scale = true; },
      "full-size run counts and iteration counts (long-running)");

  cmd->add_option("--gamma", raw.gamma, "ou/polynomial drift coefficient");
  cmd->add_option("--beta", raw.beta, "ou mean-coupling coefficient");
  cmd->add_option("--v2", raw.v2, "ou squared diffusion coefficient");
  cmd->add_option("--coupling", raw.coupling, "rotator coupling K");
  cmd->add_option("--kbt", raw.kbt, "rotator temperature kB*T");
  cmd->add_option("--init-mean", raw.init_mean, "rotator initial mean");
  cmd->add_option("--init-var", raw.init_var, "rotator initial variance");
  cmd->add_option("--upsilon", raw.upsilon, "burgers diffusion coefficient");
  cmd->add_option("--x0", raw.x0, "deterministic initial state");
}

int run_experiment_command(const RawOptions& cli_raw, const std::string& config_path,
                           RunMode base_mode) {
  RawOptions effective;
  if (!config_path.empty()) effective = load_config_file(config_path);
  effective.overlay(cli_raw);

  const ExperimentConfig config = build_experiment(effective, base_mode);
  const ExperimentReport report = run_experiment(config);
  write_text(report, std::cout);
  if (effective.out) {
    const auto written = write_csv(report, *effective.out);
    for (const auto& path : written) std::cerr << "wrote " << path << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// oracle subcommand
// ---------------------------------------------------------------------------

void print_value(const std::string& label, double value) {
  std::cout << label << " " << format_full(value) << "\n";
}

int run_oracle(const std::string& name, const RawOptions& raw, std::optional<double> t,
               std::optional<double> x, std::optional<double> p_in,
               std::optional<long> at_step, std::optional<long> particles) {
  auto need = [](const std::optional<double>& v, const char* flag) -> double {
    if (!v) throw ConfigError(std::string("oracle: missing --") + flag);
    return *v;
  };
  const double horizon = raw.horizon.value_or(1.0);
  const int steps = raw.steps.value_or(50);
  const TimeGrid grid = make_time_grid(horizon, steps);
  const long k = at_step.value_or(steps);

  GeneralizedOu ou;
  if (raw.gamma) ou.gamma = *raw.gamma;
  if (raw.beta) ou.beta = *raw.beta;
  if (raw.v2) ou.v2 = *raw.v2;
  if (raw.x0) ou.x0 = *raw.x0;

  if (name == "normal-cdf") {
    print_value("cdf", oracles::std_normal_cdf(need(x, "x")));
  } else if (name == "inverse-normal-cdf") {
    print_value("quantile", inverse_normal_cdf(need(p_in, "p")));
  } else if (name == "ou-exact-moments") {
    const auto m = oracles::ou_exact_moments(t.value_or(horizon), ou);
    print_value("m1", m.m1);
    print_value("m2", m.m2);
  } else if (name == "ou-discrete-first") {
    print_value("m1", oracles::ou_discretized_first_moment(k, grid.h, ou));
  } else if (name == "ou-discrete-second") {
    if (!particles) throw ConfigError("oracle: missing --particles");
    print_value("m2", oracles::ou_discretized_second_moment(k, grid.h, *particles, ou));
  } else if (name == "ou-recursion-second") {
    if (!particles) throw ConfigError("oracle: missing --particles");
    const auto m = oracles::ou_second_moment_recursion(k, grid.h, *particles, ou);
    print_value("m2", m.second_moment);
    print_value("cross", m.cross_moment);
  } else if (name == "ou-bias-second") {
    if (!particles) throw ConfigError("oracle: missing --particles");
    print_value("bias", oracles::ou_particle_bias_second_moment(k, grid.h, *particles, ou));
  } else if (name == "polynomial-moments") {
    const auto m = oracles::polynomial_moment_recursion(steps, grid.h,
                                                        raw.gamma.value_or(2.0),
                                                        raw.x0.value_or(1.0));
    print_value("m1", m.m1);
    print_value("m2", m.m2);
  } else if (name == "burgers-cole-hopf") {
    print_value("value", oracles::burgers_cole_hopf(t.value_or(horizon), need(x, "x"),
                                                    raw.upsilon.value_or(0.25)));
  } else if (name == "rotator-reference") {
    print_value("value", kRotatorFirstMomentReference);
  } else {
    throw ConfigError(
        "unknown oracle '" + name +
        "'; available: normal-cdf, inverse-normal-cdf, ou-exact-moments, "
        "ou-discrete-first, ou-discrete-second, ou-recursion-second, ou-bias-second, "
        "polynomial-moments, burgers-cole-hopf, rotator-reference");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// selftest subcommand
// ---------------------------------------------------------------------------

int run_selftest() {
  int failures = 0;
  auto check = [&failures](bool ok, const std::string& what) {
    std::cout << (ok ? "ok  " : "FAIL") << "  " << what << "\n";
    if (!ok) ++failures;
  };

  {
    const Counter4x64 out = philox4x64({0, 0, 0, 0}, PhiloxKey{0, 0});
    check(out[0] == 0x16554d9eca36314cull && out[1] == 0xdb20fe9d672d0fdcull &&
              out[2] == 0xd7e772cee186176bull && out[3] == 0x7e68b68aec7ba23bull,
          "philox4x64-10 known-answer block");
  }
  {
    bool ok = true;
    for (double z = -6.0; z <= 6.0; z += 0.37) {
      const double u = oracles::std_normal_cdf(z);
      ok = ok && std::fabs(inverse_normal_cdf(u) - z) < 1e-9 * (1.0 + std::fabs(z));
    }
    check(ok, "inverse normal CDF round-trip");
  }
  {
    const GeneralizedOu ou;
    const double closed = oracles::ou_discretized_second_moment(50, 0.02, 20, ou);
    const double recur = oracles::ou_second_moment_recursion(50, 0.02, 20, ou).second_moment;
    check(std::fabs(closed - recur) <= 1e-12 * std::fabs(closed),
          "ou second moment: closed form vs recursion");
    check(std::fabs(oracles::ou_discretized_first_moment(50, 0.02, ou) - 1.34865) < 5e-6,
          "ou discretized first moment reference");
  }
  {
    const auto m = oracles::polynomial_moment_recursion(50, 0.02, 2.0, 1.0);
    check(std::fabs(m.m1 - 1.3845) < 5e-5 && std::fabs(m.m2 - 3.13743) < 5e-6,
          "polynomial moment recursion references");
  }
  {
    check(std::fabs(oracles::burgers_cole_hopf(1.0, 0.5, 0.25) - 0.5) < 1e-15,
          "burgers Cole-Hopf midpoint value");
  }
  {
    // antithetic coupling of the linear model collapses to rounding noise
    const TimeGrid grid = make_time_grid(1.0, 10);
    const ModelSpec model = GeneralizedOu{};
    const std::vector<Observable> obs{Observable::first_moment()};
    const DriverBlock block = fill_driver_block(derive_stream(7, 0), grid, 16);
    const RunOutput out = simulate_run(model, grid, 16, block, obs);
    check(std::fabs(out.observables[0].antithetic_diff) < 1e-13,
          "ou antithetic difference collapses");
    const RunOutput again = simulate_run(model, grid, 16, block, obs);
    check(out.observables[0].mean_big == again.observables[0].mean_big,
          "simulation reruns bit-identically");
  }
  std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field particle Monte Carlo laboratory"};
  app.set_version_flag("--version", std::string("mcvlab ") + kVersion);
  app.require_subcommand(1);

  RawOptions bias_raw, anti_raw;
  std::string bias_config, anti_config;
  CLI::App* bias_cmd = app.add_subcommand("bias", "particle bias tables");
  add_experiment_flags(bias_cmd, bias_raw, bias_config);
  CLI::App* anti_cmd = app.add_subcommand("antithetic", "antithetic variance tables");
  add_experiment_flags(anti_cmd, anti_raw, anti_config);

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "print reference values");
  std::string oracle_name;
  RawOptions oracle_raw;
  std::optional<double> oracle_t, oracle_x, oracle_p;
  std::optional<long> oracle_at_step, oracle_particles;
  oracle_cmd->add_option("name", oracle_name, "oracle identifier")->required();
  oracle_cmd->add_option("--t", oracle_t, "time");
  oracle_cmd->add_option("--x", oracle_x, "evaluation point");
  oracle_cmd->add_option("--p", oracle_p, "probability");
  oracle_cmd->add_option("--at-step", oracle_at_step, "grid index k (default: steps)");
  oracle_cmd->add_option("--particles", oracle_particles, "particle count N");
  oracle_cmd->add_option("--steps", oracle_raw.steps, "Euler steps (default 50)");
  oracle_cmd->add_option("--horizon", oracle_raw.horizon, "time horizon (default 1)");
  oracle_cmd->add_option("--gamma", oracle_raw.gamma, "drift coefficient");
  oracle_cmd->add_option("--beta", oracle_raw.beta, "ou mean coupling");
  oracle_cmd->add_option("--v2", oracle_raw.v2, "ou squared diffusion");
  oracle_cmd->add_option("--x0", oracle_raw.x0, "initial state");
  oracle_cmd->add_option("--upsilon", oracle_raw.upsilon, "burgers diffusion");

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (bias_cmd->parsed()) return run_experiment_command(bias_raw, bias_config, RunMode::bias);
    if (anti_cmd->parsed())
      return run_experiment_command(anti_raw, anti_config, RunMode::antithetic);
    if (oracle_cmd->parsed())
      return run_oracle(oracle_name, oracle_raw, oracle_t, oracle_x, oracle_p,
                        oracle_at_step, oracle_particles);
    if (selftest_cmd->parsed()) return run_selftest();
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
