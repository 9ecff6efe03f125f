// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with its wall time. Run the binary directly for the full sweep or
// filter single criteria with -tc="criterion 4*". The slow Kuramoto
// reference check (criterion 8c) runs only with MCVLAB_SLOW=1 in the
// environment.

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "mcvlab/engine.hpp"
#include "mcvlab/experiment.hpp"
#include "mcvlab/oracles.hpp"
#include "mcvlab/rng.hpp"
#include "mcvlab/stats.hpp"

using namespace mcvlab;

namespace {

class Criterion {
 public:
  explicit Criterion(std::string id) : id_(std::move(id)), start_(clock::now()) {}

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      failed_ = true;
      notes_ += notes_.empty() ? what : "; " + what;
    }
    CHECK_MESSAGE(ok, id_, ": ", what);
  }

  void note(const std::string& what) { notes_ += notes_.empty() ? what : "; " + what; }

  ~Criterion() {
    const double seconds = std::chrono::duration<double>(clock::now() - start_).count();
    std::printf("[%s] %s (%.1f s)%s%s\n", id_.c_str(), failed_ ? "FAIL" : "PASS", seconds,
                notes_.empty() ? "" : " -- ", notes_.c_str());
    std::fflush(stdout);
  }

 private:
  using clock = std::chrono::steady_clock;
  std::string id_;
  clock::time_point start_;
  bool failed_ = false;
  std::string notes_;
};

ExperimentConfig ou_base() {
  ExperimentConfig config;
  config.model = GeneralizedOu{};
  config.horizon = 1.0;
  config.steps = 50;
  config.particles_start = 20;
  config.master_seed = 0;
  return config;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// criteria 6 and 7 read the same simulation pass
const ExperimentReport& burgers_shared_report() {
  static const ExperimentReport report = [] {
    ExperimentConfig config;
    config.model = ViscousBurgers{};
    config.observables = {Observable::indicator_above(0.5)};
    config.horizon = 1.0;
    config.steps = 500;
    config.runs = 50000;
    config.particles_start = 20;
    config.iterations = 3;
    config.master_seed = 0;
    config.mode = RunMode::both;
    return run_experiment(config);
  }();
  return report;
}

}  // namespace

TEST_CASE("criterion 1: ou first-moment bias against the discretized oracle") {
  Criterion crit("criterion 1");
  const GeneralizedOu params;
  const double oracle = oracles::ou_discretized_first_moment(50, 0.02, params);
  crit.expect(std::fabs(oracle - 1.34865) <= 5e-6,
              "oracle (1+0.3*0.02)^50 = 1.34865 at 5 d.p., got " + fmt(oracle));

  ExperimentConfig config = ou_base();
  config.observables = {Observable::first_moment()};
  config.runs = 100000;
  config.iterations = 5;
  config.mode = RunMode::bias;
  const ExperimentReport report = run_experiment(config);
  for (const BiasRow& row : report.tables[0].bias_rows) {
    crit.expect(std::fabs(row.estimate - oracle) <= 3.0 * row.precision,
                "N=" + std::to_string(row.n_particles) + ": |estimate-oracle| = " +
                    fmt(std::fabs(row.estimate - oracle)) + " <= 3*precision = " +
                    fmt(3.0 * row.precision));
  }
  const double p20 = report.tables[0].bias_rows[0].precision;
  crit.expect(p20 > 0.0007 && p20 < 0.0016,
              "precision at N=20, 1e5 runs near 0.0011, got " + fmt(p20));
  crit.note("runtime target 30 s");
}

TEST_CASE("criterion 2: ou second-moment closed form and recursion oracle") {
  Criterion crit("criterion 2");
  const GeneralizedOu params;
  const struct {
    long n;
    double value;
  } rows[] = {{20, 2.15552}, {40, 2.14648}, {80, 2.14195}, {160, 2.13969}, {320, 2.13856}};
  for (const auto& row : rows) {
    const double got = oracles::ou_discretized_second_moment(50, 0.02, row.n, params);
    crit.expect(std::fabs(got - row.value) <= 5e-6,
                "closed form at N=" + std::to_string(row.n) + " equals " + fmt(row.value) +
                    " at 5 d.p., got " + fmt(got));
  }
  auto rng = testutil::fixed_rng(424242);
  bool all_match = true;
  for (int trial = 0; trial < 50; ++trial) {
    GeneralizedOu p;
    p.gamma = testutil::signed_uniform_away_from_zero(rng, 0.05, 1.5);
    double a = 0.0;
    do {
      p.beta = testutil::uniform(rng, -1.5, 1.5);
      a = p.gamma + p.beta;
    } while (std::fabs(a) < 0.05);
    p.v2 = testutil::uniform(rng, 0.0, 1.0);
    p.x0 = testutil::uniform(rng, -2.0, 2.0);
    const long k = 1 + static_cast<long>(rng() % 100);
    const double h = testutil::uniform(rng, 0.001, 0.05);
    const long n = 2 + static_cast<long>(rng() % 499);
    const double closed = oracles::ou_discretized_second_moment(k, h, n, p);
    const double recur = oracles::ou_second_moment_recursion(k, h, n, p).second_moment;
    all_match = all_match && std::fabs(closed - recur) <= 1e-12 * std::fabs(closed);
  }
  crit.expect(all_match, "closed form == recursion to 1e-12 relative on 50 random draws");
}

TEST_CASE("criterion 3: ou antithetic variance for psi(x)=x is numerically null") {
  Criterion crit("criterion 3");
  ExperimentConfig config = ou_base();
  config.observables = {Observable::first_moment()};
  config.runs = 10000;
  config.iterations = 5;
  config.mode = RunMode::antithetic;
  const ExperimentReport report = run_experiment(config);
  for (const AntitheticRow& row : report.tables[0].antithetic_rows) {
    crit.expect(row.variance <= 1e-25, "N=" + std::to_string(row.n_particles) +
                                           ": variance = " + fmt(row.variance) +
                                           " <= 1e-25");
  }
}

TEST_CASE("criterion 4: ou antithetic variance for psi(x)=x^2 decays like 1/N^2") {
  Criterion crit("criterion 4");
  ExperimentConfig config = ou_base();
  config.observables = {Observable::second_moment()};
  config.runs = 100000;
  config.iterations = 4;  // N = 20,40,80,160 -> ratios at 40,80,160
  config.mode = RunMode::antithetic;
  const ExperimentReport report = run_experiment(config);
  const auto& rows = report.tables[0].antithetic_rows;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = rows[i].ratio_of_decrease.value_or(-1.0);
    crit.expect(ratio >= 3.6 && ratio <= 4.4,
                "variance(" + std::to_string(rows[i - 1].n_particles) + ")/variance(" +
                    std::to_string(rows[i].n_particles) + ") = " + fmt(ratio) +
                    " in [3.6, 4.4]");
  }
}

TEST_CASE("criterion 5: polynomial-drift references and bias decay") {
  Criterion crit("criterion 5");
  const auto moments = oracles::polynomial_moment_recursion(50, 0.02, 2.0, 1.0);
  crit.expect(std::fabs(moments.m1 - 1.3845) <= 5e-5,
              "recursion m1 = 1.3845 at printed precision, got " + fmt(moments.m1));
  crit.expect(std::fabs(moments.m2 - 3.13743) <= 5e-6,
              "recursion m2 = 3.13743 at printed precision, got " + fmt(moments.m2));

  ExperimentConfig config;
  config.model = PolynomialDrift{};
  config.observables = {Observable::first_moment(), Observable::second_moment()};
  config.horizon = 1.0;
  config.steps = 50;
  config.runs = 500000;
  config.particles_start = 40;
  config.iterations = 4;  // N = 40..320
  config.master_seed = 0;
  config.mode = RunMode::bias;
  const ExperimentReport report = run_experiment(config);
  for (const auto& table : report.tables) {
    for (std::size_t i = 1; i < table.bias_rows.size(); ++i) {
      const double ratio = table.bias_rows[i].ratio_of_decrease.value_or(-1.0);
      crit.expect(ratio >= 1.4 && ratio <= 2.4,
                  table.observable.name() + " error ratio at N=" +
                      std::to_string(table.bias_rows[i].n_particles) + " = " + fmt(ratio) +
                      " in [1.4, 2.4]");
    }
  }
}

TEST_CASE("criterion 6: burgers Cole-Hopf oracle and bias decay") {
  Criterion crit("criterion 6");
  crit.expect(oracles::burgers_cole_hopf(1.0, 0.5, 0.25) == 0.5,
              "Cole-Hopf value at (t=1, x=1/2) is exactly one half");

  const ExperimentReport& report = burgers_shared_report();
  const auto& rows = report.tables[0].bias_rows;
  crit.expect(std::fabs(rows[0].difference - 0.0141) <= 0.003,
              "solution error at N=20 = " + fmt(rows[0].difference) + " within 0.0141 +- 0.003");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = rows[i].ratio_of_decrease.value_or(-1.0);
    crit.expect(ratio >= 1.6 && ratio <= 2.4,
                "error ratio at N=" + std::to_string(rows[i].n_particles) + " = " +
                    fmt(ratio) + " in [1.6, 2.4]");
  }
}

TEST_CASE("criterion 7: burgers antithetic variance decay (shared runs)") {
  Criterion crit("criterion 7");
  const ExperimentReport& report = burgers_shared_report();
  const auto& rows = report.tables[0].antithetic_rows;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = rows[i].ratio_of_decrease.value_or(-1.0);
    crit.expect(ratio >= 2.2 && ratio <= 3.1,
                "variance ratio at N=" + std::to_string(rows[i].n_particles) + " = " +
                    fmt(ratio) + " in [2.2, 3.1]");
  }
}

TEST_CASE("criterion 8: plane-rotator substitutes") {
  Criterion crit("criterion 8");

  // (a) the expanded drift equals the subtraction-formula form
  {
    auto rng = testutil::fixed_rng(88);
    PlaneRotator rot;
    bool ok = true;
    for (int i = 0; i < 500; ++i) {
      const double x = testutil::uniform(rng, -10.0, 10.0);
      const double theta = testutil::uniform(rng, -10.0, 10.0);
      const double y[] = {std::sin(theta), std::cos(theta)};
      const double expanded = drift(ModelSpec{rot}, 0.0, y, x);
      const double compact = rot.coupling * std::sin(theta - x) - std::sin(x);
      ok = ok && std::fabs(expanded - compact) <= 1e-12;
    }
    crit.expect(ok, "drift trig identity within 1e-12");
  }

  // (b) zero noise, point mass: the Euler path tracks tan(x/2) = tan(x0/2) e^{-t}
  {
    const double x0 = std::acos(-1.0) / 4.0;
    PlaneRotator frozen;
    frozen.k_b_t = 0.0;
    frozen.init_mean = x0;
    frozen.init_var = 0.0;
    const double target = std::tan(0.5 * x0) * std::exp(-1.0);
    for (const auto& [steps, tol] : {std::pair<int, double>{50, 2e-3}, {500, 2e-4}}) {
      const TimeGrid grid = make_time_grid(1.0, steps);
      DriverBlock block;
      fill_driver_columns(derive_stream(0, 0), grid, 4, block);
      const SingleRunOutput out = simulate_single_run(
          frozen, grid, 4, block, std::vector<Observable>{Observable::first_moment()});
      const double x_final = out.means[0];
      const double residual = std::fabs(std::tan(0.5 * x_final) - target);
      crit.expect(residual <= tol, "K=" + std::to_string(steps) + ": |tan(x_T/2) - " +
                                       "tan(x0/2)e^-1| = " + fmt(residual) +
                                       " <= " + fmt(tol));
      const double x_exact = testutil::kuramoto_zero_noise_ode(x0, 1.0);
      crit.expect(std::fabs(x_final - x_exact) <= 1.5 * tol,
                  "K=" + std::to_string(steps) + ": raw state error " +
                      fmt(std::fabs(x_final - x_exact)) + " <= " + fmt(1.5 * tol));
    }
  }

  // (c) optional slow check against the shipped Monte Carlo reference
  if (std::getenv("MCVLAB_SLOW") != nullptr) {
    ExperimentConfig config;
    config.model = PlaneRotator{};
    config.observables = {Observable::first_moment()};
    config.horizon = 1.0;
    config.steps = 50;
    config.runs = 2000000;
    config.particles_start = 20;
    config.iterations = 1;
    config.master_seed = 0;
    config.mode = RunMode::bias;
    config.reference_value = kRotatorFirstMomentReference;
    const ExperimentReport report = run_experiment(config);
    const double error = report.tables[0].bias_rows[0].difference;
    crit.expect(error > 0.0, "error vs shipped reference is positive, got " + fmt(error));
    crit.expect(error >= 2e-4 && error <= 1.3e-3,
                "error vs shipped reference = " + fmt(error) + " in [2e-4, 1.3e-3]");
  } else {
    crit.note("slow reference check skipped (set MCVLAB_SLOW=1 to enable)");
  }
}

TEST_CASE("criterion 9: property suite") {
  Criterion crit("criterion 9");
  const std::vector<Observable> first{Observable::first_moment()};

  // exchangeability under within-subsystem driver permutations
  {
    const TimeGrid grid = make_time_grid(1.0, 50);
    auto rng = testutil::fixed_rng(91);
    bool ok = true;
    for (const ModelSpec model :
         {ModelSpec{GeneralizedOu{}}, ModelSpec{ViscousBurgers{}}}) {
      const int n = 20;
      DriverBlock block = fill_driver_block(derive_stream(13, 5), grid, n);
      const RunOutput base = simulate_run(model, grid, n, block, first);
      std::vector<int> perm(2 * n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.begin() + n, rng);
      std::shuffle(perm.begin() + n, perm.end(), rng);
      DriverBlock permuted = block;
      for (int i = 0; i < 2 * n; ++i) {
        permuted.initial_draws[i] = block.initial_draws[perm[i]];
        for (int k = 0; k < grid.steps; ++k)
          permuted.increments_row(k)[i] = block.increments_row(k)[perm[i]];
      }
      const RunOutput shuffled = simulate_run(model, grid, n, permuted, first);
      for (const auto& pair :
           {std::pair<double, double>{base.observables[0].mean_big,
                                      shuffled.observables[0].mean_big},
            {base.observables[0].mean_a, shuffled.observables[0].mean_a},
            {base.observables[0].mean_b, shuffled.observables[0].mean_b}})
        ok = ok && std::fabs(pair.first - pair.second) <=
                       1e-12 * (1.0 + std::fabs(pair.first));
    }
    crit.expect(ok, "permutation exchangeability within 1e-12");
  }

  // ou coupling identity at every grid step
  {
    const TimeGrid grid = make_time_grid(1.0, 50);
    SimulateOptions options;
    options.record_mean_paths = true;
    bool ok = true;
    for (int n : {20, 160}) {
      const DriverBlock block = fill_driver_block(derive_stream(14, 6), grid, n);
      const RunOutput out = simulate_run(GeneralizedOu{}, grid, n, block, first, options);
      for (std::size_t k = 0; k < out.mean_path_big.size(); ++k) {
        const double avg = 0.5 * (out.mean_path_a[k] + out.mean_path_b[k]);
        ok = ok && std::fabs(out.mean_path_big[k] - avg) <=
                       1e-12 * (1.0 + std::fabs(out.mean_path_big[k]));
      }
    }
    crit.expect(ok, "ou coupling identity at every grid step within 1e-12");
  }

  // burgers kernel values on distinct states are a permutation of {1/N..1}
  {
    auto rng = testutil::fixed_rng(92);
    bool ok = true;
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = 2 + rng() % 100;
      ParticleEnsemble ens;
      ens.states.resize(n);
      for (auto& x : ens.states) x = testutil::uniform(rng, -4.0, 4.0);
      const InteractionValue iv = interaction(ViscousBurgers{}, ens);
      std::vector<double> sorted = iv.values;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < n; ++i)
        ok = ok && sorted[i] == (i + 1.0) / static_cast<double>(n);
    }
    crit.expect(ok, "burgers kernel values are a permutation of {1/N..1}");
  }

  // accumulator merge equals two-pass statistics
  {
    auto rng = testutil::fixed_rng(93);
    std::vector<double> data(4000);
    for (auto& x : data) x = testutil::uniform(rng, -5.0, 5.0);
    MomentAccumulator left, right;
    for (int i = 0; i < 1500; ++i) left.add(data[i]);
    for (std::size_t i = 1500; i < data.size(); ++i) right.add(data[i]);
    left.merge(right);
    const auto ref = testutil::two_pass_stats(data);
    crit.expect(std::fabs(left.mean() - ref.mean) <= 1e-12 * (1.0 + std::fabs(ref.mean)) &&
                    std::fabs(left.variance() - ref.variance) <= 1e-12 * ref.variance,
                "merged accumulator equals two-pass statistics within 1e-12");
  }

  // bit-identical reruns at a fixed seed and thread count
  {
    ExperimentConfig config = ou_base();
    config.observables = first;
    config.runs = 500;
    config.particles_start = 8;
    config.iterations = 2;
    config.mode = RunMode::both;
    config.threads = 2;
    const ExperimentReport a = run_experiment(config);
    const ExperimentReport b = run_experiment(config);
    bool ok = true;
    for (std::size_t i = 0; i < a.tables[0].bias_rows.size(); ++i)
      ok = ok && a.tables[0].bias_rows[i].estimate == b.tables[0].bias_rows[i].estimate &&
           a.tables[0].antithetic_rows[i].variance == b.tables[0].antithetic_rows[i].variance;
    crit.expect(ok, "reruns at fixed seed and thread count are bit-identical");
  }
}
