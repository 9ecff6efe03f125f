#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "mcvlab/stats.hpp"

using namespace mcvlab;

TEST_SUITE("moment_accumulator") {
  TEST_CASE("constant samples") {
    MomentAccumulator acc;
    for (int i = 0; i < 3; ++i) acc.add(1.0);
    CHECK(acc.count() == 3);
    CHECK(acc.mean() == 1.0);
    CHECK(acc.variance() == 0.0);
  }

  TEST_CASE("hand-checked two-sample variance") {
    MomentAccumulator acc;
    acc.add(0.0);
    acc.add(2.0);
    CHECK(acc.mean() == 1.0);
    CHECK(acc.variance() == 2.0);
  }

  TEST_CASE("split merge equals the full accumulation") {
    auto rng = testutil::fixed_rng(5);
    std::vector<double> data(1000);
    for (auto& x : data) x = testutil::uniform(rng, -3.0, 7.0);

    MomentAccumulator full;
    for (double x : data) full.add(x);
    MomentAccumulator lo, hi;
    for (int i = 0; i < 500; ++i) lo.add(data[i]);
    for (int i = 500; i < 1000; ++i) hi.add(data[i]);
    lo.merge(hi);

    const auto ref = testutil::two_pass_stats(data);
    CHECK(lo.count() == 1000);
    CHECK(std::fabs(lo.mean() - full.mean()) <= 1e-12 * (1.0 + std::fabs(full.mean())));
    CHECK(std::fabs(lo.variance() - full.variance()) <=
          1e-12 * (1.0 + std::fabs(full.variance())));
    CHECK(std::fabs(full.mean() - ref.mean) <= 1e-12 * (1.0 + std::fabs(ref.mean)));
    CHECK(std::fabs(full.variance() - ref.variance) <=
          1e-12 * (1.0 + std::fabs(ref.variance)));
  }

  TEST_CASE("merge is associative and commutative within tolerance") {
    auto rng = testutil::fixed_rng(6);
    std::vector<double> data(900);
    for (auto& x : data) x = testutil::uniform(rng, -1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t cut1 = 1 + rng() % 800;
      const std::size_t cut2 = cut1 + 1 + rng() % (899 - cut1);
      MomentAccumulator a, b, c;
      for (std::size_t i = 0; i < cut1; ++i) a.add(data[i]);
      for (std::size_t i = cut1; i < cut2; ++i) b.add(data[i]);
      for (std::size_t i = cut2; i < data.size(); ++i) c.add(data[i]);

      MomentAccumulator ab = a;
      ab.merge(b);
      ab.merge(c);
      MomentAccumulator bc = b;
      bc.merge(c);
      MomentAccumulator a_bc = a;
      a_bc.merge(bc);
      MomentAccumulator cb = c;
      cb.merge(b);
      cb.merge(a);

      CHECK(ab.count() == 900);
      CHECK(std::fabs(ab.variance() - a_bc.variance()) <=
            1e-12 * (1.0 + std::fabs(ab.variance())));
      CHECK(std::fabs(ab.variance() - cb.variance()) <=
            1e-12 * (1.0 + std::fabs(ab.variance())));
      CHECK(std::fabs(ab.mean() - cb.mean()) <= 1e-12 * (1.0 + std::fabs(ab.mean())));
    }
  }

  TEST_CASE("merging an empty accumulator is the identity") {
    MomentAccumulator acc;
    acc.add(3.0);
    acc.add(5.0);
    MomentAccumulator empty;
    acc.merge(empty);
    CHECK(acc.count() == 2);
    CHECK(acc.mean() == 4.0);
    MomentAccumulator target;
    target.merge(acc);
    CHECK(target.count() == 2);
    CHECK(target.mean() == 4.0);
  }

  TEST_CASE("small-count guards") {
    MomentAccumulator acc;
    CHECK_THROWS_AS((void)acc.mean(), std::logic_error);
    acc.add(1.0);
    CHECK_THROWS_AS((void)acc.variance(), std::logic_error);
    CHECK_THROWS_AS((void)acc.precision(), std::logic_error);
  }
}

TEST_SUITE("precision") {
  TEST_CASE("zero variance gives zero precision") {
    MomentAccumulator acc;
    acc.add(2.0);
    acc.add(2.0);
    CHECK(acc.precision() == 0.0);
  }

  TEST_CASE("direct formula arithmetic") {
    MomentAccumulator acc;
    // 10000 samples alternating +-1 around 0: variance 1.0001... use exact:
    // mean 0, m2 = 10000 -> unbiased variance 10000/9999
    for (int i = 0; i < 5000; ++i) {
      acc.add(1.0);
      acc.add(-1.0);
    }
    const double var = acc.variance();
    CHECK(acc.precision() ==
          doctest::Approx(1.96 * std::sqrt(var / 10000.0)).epsilon(1e-15));
  }

  TEST_CASE("quadrupling the count halves the precision, variance frozen") {
    auto rng = testutil::fixed_rng(20);
    for (int trial = 0; trial < 50; ++trial) {
      const double variance = testutil::uniform(rng, 1e-8, 10.0);
      const double n = std::floor(testutil::uniform(rng, 2.0, 1e6));
      const double p_n = kPrecisionZ * std::sqrt(variance / n);
      const double p_4n = kPrecisionZ * std::sqrt(variance / (4.0 * n));
      CHECK(std::fabs(p_4n - 0.5 * p_n) <= 1e-12 * p_n);
    }
  }
}

TEST_SUITE("antithetic_variance_op") {
  TEST_CASE("constant differences give zero variance") {
    // short-mantissa constant: partial sums stay exact, variance is zero
    const std::vector<double> diffs(128, 0.25);
    const VarianceEstimate est = antithetic_variance(diffs);
    CHECK(est.variance == 0.0);
    CHECK(est.precision == 0.0);

    // arbitrary constant: the mean rounds, the variance stays at noise level
    const std::vector<double> odd(100, 0.1234567);
    const VarianceEstimate est_odd = antithetic_variance(odd);
    CHECK(est_odd.variance <= 1e-29 * odd[0] * odd[0]);
  }

  TEST_CASE("agrees with the accumulator and the two-pass oracle") {
    auto rng = testutil::fixed_rng(21);
    std::vector<double> diffs(5000);
    for (auto& d : diffs) d = testutil::uniform(rng, -2.0, 2.0);
    const VarianceEstimate est = antithetic_variance(diffs);
    const auto ref = testutil::two_pass_stats(diffs);
    CHECK(std::fabs(est.variance - ref.variance) <= 1e-12 * ref.variance);

    MomentAccumulator acc;
    for (double d : diffs) acc.add(d);
    CHECK(std::fabs(est.variance - acc.variance()) <= 1e-12 * acc.variance());
  }

  TEST_CASE("precision follows the fourth-moment formula") {
    // hand-computable sample: {0, 0, 2, 2} -> mean 1, deviations^2 all 1,
    // so the squared deviations have zero spread
    const std::vector<double> flat{0.0, 0.0, 2.0, 2.0};
    const VarianceEstimate est_flat = antithetic_variance(flat);
    CHECK(est_flat.variance == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(est_flat.precision == 0.0);

    // {0, 2, 0, 4}: mean 1.5, deviations {-1.5, .5, -1.5, 2.5},
    // squared {2.25, .25, 2.25, 6.25}, biased mean of squares 2.75,
    // Var[(D-mean)^2] (unbiased) = 19/3, precision = 1.96 sqrt((19/3)/4)
    const std::vector<double> mixed{0.0, 2.0, 0.0, 4.0};
    const VarianceEstimate est = antithetic_variance(mixed);
    CHECK(est.variance == doctest::Approx(11.0 / 3.0).epsilon(1e-15));
    CHECK(est.precision ==
          doctest::Approx(1.96 * std::sqrt(19.0 / 3.0 / 4.0)).epsilon(1e-14));
  }

  TEST_CASE("needs two samples") {
    CHECK_THROWS_AS((void)antithetic_variance(std::vector<double>{1.0}), std::logic_error);
  }
}

TEST_SUITE("bias_table_op") {
  TEST_CASE("difference convention: reference minus estimate") {
    const std::vector<long> ns{20};
    const std::vector<double> est{1.34862};
    const std::vector<double> ref{1.34865};
    const std::vector<double> prec{0.00016};
    const auto rows = bias_table(ns, est, ref, prec);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].difference == doctest::Approx(0.00003).epsilon(1e-9));
    CHECK_FALSE(rows[0].ratio_of_decrease.has_value());
  }

  TEST_CASE("reference ratio values") {
    // solution errors 0.0141425 -> 0.0070329 shrink by 2.01091
    {
      const std::vector<long> ns{20, 40};
      const std::vector<double> est{0.5 - 0.0141425, 0.5 - 0.0070329};
      const std::vector<double> ref{0.5, 0.5};
      const std::vector<double> prec{0.0, 0.0};
      const auto rows = bias_table(ns, est, ref, prec);
      CHECK(rows[1].ratio_of_decrease.value() ==
            doctest::Approx(2.01091).epsilon(1e-5));
    }
    // first-moment errors 0.000725 -> 0.000355 shrink by 2.04225
    {
      const std::vector<long> ns{20, 40};
      const std::vector<double> est{0.737576 - 0.000725, 0.737576 - 0.000355};
      const std::vector<double> ref{0.737576, 0.737576};
      const std::vector<double> prec{0.0, 0.0};
      const auto rows = bias_table(ns, est, ref, prec);
      CHECK(rows[1].ratio_of_decrease.value() ==
            doctest::Approx(2.04225).epsilon(1e-5));
    }
  }

  TEST_CASE("equal errors give ratio one; signs are dropped") {
    const std::vector<long> ns{10, 20, 40};
    const std::vector<double> est{1.2, 0.8, 1.2};  // differences -0.2, +0.2, -0.2
    const std::vector<double> ref{1.0, 1.0, 1.0};
    const std::vector<double> prec{0.0, 0.0, 0.0};
    const auto rows = bias_table(ns, est, ref, prec);
    CHECK(rows[1].ratio_of_decrease.value() == 1.0);
    CHECK(rows[2].ratio_of_decrease.value() == 1.0);
  }

  TEST_CASE("zero denominator omits the ratio") {
    const std::vector<long> ns{10, 20};
    const std::vector<double> est{0.9, 1.0};
    const std::vector<double> ref{1.0, 1.0};
    const std::vector<double> prec{0.0, 0.0};
    const auto rows = bias_table(ns, est, ref, prec);
    CHECK_FALSE(rows[1].ratio_of_decrease.has_value());
  }

  TEST_CASE("schedule must double") {
    const std::vector<long> ns{10, 30};
    const std::vector<double> v{0.0, 0.0};
    CHECK_THROWS_AS((void)bias_table(ns, v, v, v), std::invalid_argument);
  }
}
