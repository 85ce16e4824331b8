#include <doctest.h>

#include <cmath>

#include "mandel/benford.hpp"
#include "mandel/beta_table.hpp"
#include "mandel/specfun.hpp"

using namespace mandel;

namespace {

Dyadic dy(long num, long exp) { return Dyadic::from_parts(BigInt(num), exp); }

ComponentSeries series_of(std::vector<Dyadic> values) {
    ComponentSeries s;
    s.values = std::move(values);
    return s;
}

// Population with digit counts as close to Benford as integers allow.
ComponentSeries near_exact_benford(long n) {
    const auto p = benford_probabilities(10);
    std::vector<Dyadic> values;
    for (int d = 1; d <= 9; ++d) {
        const long count = std::lround(p[static_cast<size_t>(d - 1)] * static_cast<double>(n));
        for (long i = 0; i < count; ++i) values.push_back(Dyadic(d));
    }
    return series_of(std::move(values));
}

}  // namespace

TEST_CASE("benford probabilities") {
    const auto p10 = benford_probabilities(10);
    REQUIRE(p10.size() == 9);
    CHECK(p10[0] == doctest::Approx(0.3010299957).epsilon(1e-9));
    const auto p2 = benford_probabilities(2);
    REQUIRE(p2.size() == 1);
    CHECK(p2[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (int base = 2; base <= 16; ++base) {
        double sum = 0;
        for (const double v : benford_probabilities(base)) sum += v;
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(benford_probabilities(1), std::invalid_argument);
}

TEST_CASE("exact leading digits") {
    CHECK(leading_digit_exact(dy(15, -7), 10) == 1);     // 0.1171875
    CHECK(leading_digit_exact(dy(-47, -10), 10) == 4);   // ~ -0.0459
    CHECK(leading_digit_exact(dy(987, 0), 10) == 9);
    CHECK(leading_digit_exact(dy(1, 10), 10) == 1);      // 1024
    CHECK(leading_digit_exact(dy(1, -10), 10) == 9);     // 1/1024 = 0.000976...
    CHECK(leading_digit_exact(dy(5, 0), 2) == 1);        // every value leads with 1 in base 2
    CHECK_THROWS_AS(leading_digit_exact(Dyadic(), 10), std::domain_error);

    // a thousand-digit numerator stays exact
    BigInt huge(1);
    mpz_mul_2exp(huge.get_mpz_t(), huge.get_mpz_t(), 3000);
    huge += 1;  // odd
    const int d = leading_digit_exact(Dyadic::from_parts(huge, 0), 10);
    // 2^3000 = 1.2302319...e903
    CHECK(d == 1);
}

TEST_CASE("leading digit agrees with floating significand below 2^53") {
    SplitMix64 rng(0xD161u);
    for (int i = 0; i < 100000; ++i) {
        const std::uint64_t p = rng.below(1ull << 53) | 1ull;  // odd
        const long e = static_cast<long>(rng.below(129)) - 64;
        const Dyadic x = Dyadic::from_parts(BigInt(static_cast<unsigned long>(p)), e);
        const double v = std::ldexp(static_cast<double>(p), static_cast<int>(e));
        const int digit = static_cast<int>(significand(v, 10).significand);
        CHECK(leading_digit_exact(x, 10) == digit);
    }
}

TEST_CASE("significand decomposition") {
    auto s = significand(0.00123, 10);
    CHECK(s.significand == doctest::Approx(1.23).epsilon(1e-12));
    CHECK(s.exponent == -3);
    s = significand(5.0, 2);
    CHECK(s.significand == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(s.exponent == 2);
    s = significand(1.0, 10);
    CHECK(s.significand == doctest::Approx(1.0));
    CHECK(s.exponent == 0);
    CHECK_THROWS_AS(significand(0.0, 10), std::domain_error);
    CHECK_THROWS_AS(significand(-3.0, 10), std::domain_error);
}

TEST_CASE("leading-digit chi-squared") {
    // exact expected counts give exactly zero
    const auto p = benford_probabilities(10);
    const double n = 12345.0;
    double chi2 = 0.0;
    for (int d = 1; d <= 9; ++d) {
        const double observed = p[static_cast<size_t>(d - 1)] * n;  // identity case
        const double expected = p[static_cast<size_t>(d - 1)] * n;
        chi2 += (observed - expected) * (observed - expected) / expected;
    }
    CHECK(chi2 == 0.0);

    // uniform counts, evaluated independently of the implementation
    DigitCounts counts(10);
    for (int d = 1; d <= 9; ++d)
        for (int i = 0; i < 100; ++i) counts.add(d);
    double expected_chi2 = 0.0;
    for (int d = 1; d <= 9; ++d) {
        const double e = 900.0 * p[static_cast<size_t>(d - 1)];
        expected_chi2 += (100.0 - e) * (100.0 - e) / e;
    }
    CHECK(chi2_leading_digit(counts, 10) == doctest::Approx(expected_chi2).epsilon(1e-12));
    CHECK(chi2_leading_digit(counts, 10) > 0.0);
}

TEST_CASE("chi-squared distribution functions") {
    CHECK(chi2_quantile(0.95, 8) == doctest::Approx(15.5073).epsilon(1e-5));
    CHECK(chi2_quantile(0.95, 9) == doctest::Approx(16.919).epsilon(1e-4));
    CHECK(chi2_quantile(1.0 - 0.05 / 10045, 8) == doctest::Approx(38.9706).epsilon(3e-6));
    CHECK(chi2_quantile(1.0 - 0.05 / 10046, 8) == doctest::Approx(38.9708).epsilon(3e-6));
    CHECK(chi2_sf(58.054, 8) == doctest::Approx(1.121e-9).epsilon(0.002));
    CHECK(chi2_sf(51.934, 8) == doctest::Approx(1.733e-8).epsilon(0.002));
    CHECK(chi2_sf(5.968, 8) == doctest::Approx(0.651).epsilon(0.002));

    for (const double p : {0.5, 0.9, 0.95, 0.99})
        for (const int k : {1, 8, 9, 20})
            CHECK(chi2_sf(chi2_quantile(p, k), k) == doctest::Approx(1.0 - p).epsilon(1e-8));

    CHECK_THROWS_AS(chi2_quantile(0.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(chi2_sf(1.0, 0), std::invalid_argument);
}

TEST_CASE("noncentral chi-squared power") {
    CHECK(noncentral_chi2_power(0.0, 8, 0.05) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(noncentral_chi2_power(0.0, 9, 0.01) == doctest::Approx(0.01).epsilon(1e-6));

    // published power values
    CHECK(noncentral_chi2_power(5.968, 8, 0.05) == doctest::Approx(0.355).epsilon(0.002));
    CHECK(noncentral_chi2_power(12.785, 8, 0.05) == doctest::Approx(0.718).epsilon(0.002));
    CHECK(noncentral_chi2_power(6.148, 8, 0.05) == doctest::Approx(0.366).epsilon(0.002));
    CHECK(noncentral_chi2_power(3.093, 8, 0.05) == doctest::Approx(0.187).epsilon(0.002));
    CHECK(noncentral_chi2_power(58.054, 8, 0.05) == doctest::Approx(0.999992).epsilon(1e-5));
    CHECK(noncentral_chi2_power(51.934, 8, 0.05) == doctest::Approx(0.999956).epsilon(1e-5));

    double prev = 0.0;
    for (double lam = 0.0; lam <= 40.0; lam += 2.5) {
        const double pw = noncentral_chi2_power(lam, 8, 0.05);
        CHECK(pw >= prev);
        prev = pw;
    }
}

TEST_CASE("log mod 1") {
    const auto fr = log_mod1(series_of({Dyadic(2), dy(1, -3), dy(125, 3)}));
    REQUIRE(fr.size() == 3);
    CHECK(fr[0] == doctest::Approx(0.3010299957).epsilon(1e-9));
    CHECK(fr[1] == doctest::Approx(0.0969100130).epsilon(1e-9));  // frac(log10 1/8)
    CHECK(std::min(fr[2], 1.0 - fr[2]) < 1e-9);                   // 10^3
}

TEST_CASE("denominator logs are exactly e*log10(2) mod 1") {
    const CoefficientTable b = compute_b_recursive(256);
    const ComponentSeries dens = extract_component(b, Component::Denominator);
    const auto fr = log_mod1(dens);
    size_t i = 0;
    for (long m = 0; m <= 256; ++m) {
        if (b.at(m).is_zero()) continue;
        const long e = -b.at(m).valuation();
        const long double v = static_cast<long double>(e) * std::log10(2.0L);
        const double expect = static_cast<double>(v - std::floor(v));
        CHECK(fr[i] == doctest::Approx(expect).epsilon(1e-12));
        ++i;
    }
}

TEST_CASE("uniformity chi-squared") {
    std::vector<double> fracs;
    for (int b = 0; b < 10; ++b)
        for (int i = 0; i < 100; ++i) fracs.push_back((b + 0.5) / 10.0);
    const UniformityResult u = uniformity_chi2(fracs);
    CHECK(u.chi2 == 0.0);
    for (const long c : u.bin_counts) CHECK(c == 100);
    CHECK_THROWS_AS(uniformity_chi2({}), std::invalid_argument);
}

TEST_CASE("running chi-squared bookkeeping") {
    const CoefficientTable b = compute_b_recursive(200);
    const ComponentSeries nums = extract_component(b, Component::Numerator);
    const RunningChi2 run = running_chi2(nums, 10, 0.05);
    CHECK(static_cast<long>(run.sequence.size()) == nums.size());
    CHECK(run.final_chi2 == doctest::Approx(chi2_leading_digit(run.final_counts, 10)));
    CHECK(run.per_test_alpha == doctest::Approx(0.05 / static_cast<double>(nums.size())));
    CHECK(run.threshold ==
          doctest::Approx(chi2_quantile(1.0 - run.per_test_alpha, 8)).epsilon(1e-9));
}

TEST_CASE("first 5000 powers of two pass both base-10 tests") {
    std::vector<Dyadic> values;
    for (long n = 1; n <= 5000; ++n) values.push_back(dy(1, n));
    const ComponentSeries s = series_of(std::move(values));

    DigitCounts counts(10);
    for (const auto& v : s.values) counts.add(leading_digit_exact(v, 10));
    CHECK(chi2_leading_digit(counts, 10) < 15.5073);

    const UniformityResult u = uniformity_chi2(log_mod1(s));
    CHECK(u.chi2 < 16.919);
}

TEST_CASE("bootstrap calibration on a synthetic Benford population") {
    const ComponentSeries s = near_exact_benford(10000);
    const double rate = bootstrap_rejection_rate(s, 1000, 1000, 42, 10, 2);
    CHECK(rate > 0.03);
    CHECK(rate < 0.07);
    // deterministic given the seed
    CHECK(bootstrap_rejection_rate(s, 200, 500, 7, 10, 2) ==
          bootstrap_rejection_rate(s, 200, 500, 7, 10, 4));
}

TEST_CASE("magnitude statistics") {
    const MagnitudeStats c = magnitude_stats(series_of({Dyadic(10), Dyadic(10), Dyadic(10)}));
    CHECK(c.mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.sd == doctest::Approx(0.0));
}

TEST_CASE("component extraction mirrors the table") {
    const CoefficientTable b = compute_b_recursive(10);
    const ComponentSeries nums = extract_component(b, Component::Numerator);
    const ComponentSeries dens = extract_component(b, Component::Denominator);
    const ComponentSeries decs = extract_component(b, Component::Decimal);
    CHECK(nums.size() == 9);  // b_4 = b_8 = 0 drop out
    CHECK(nums.values[0] == Dyadic(1));
    CHECK(dens.values[0] == Dyadic(2));
    CHECK(decs.values[0] == dy(1, -1));
    CHECK(nums.values[3] == Dyadic(15));   // b_3
    CHECK(dens.values[3] == dy(1, 7));     // 128
    CHECK(decs.values[3] == dy(15, -7));
}

TEST_CASE("full benford report on a small table") {
    const CoefficientTable b = compute_b_recursive(300);
    BenfordConfig cfg;
    cfg.seed = 99;
    cfg.bootstrap_trials = 100;
    cfg.bootstrap_samples = 100;
    const BenfordReport rep = run_benford_report(b, Component::Decimal, cfg);
    CHECK(rep.count == static_cast<long>(rep.running.size()));
    CHECK(rep.p_value == doctest::Approx(chi2_sf(rep.final_chi2, 8)));
    const auto j = to_json(rep);
    CHECK(j["component"] == "decimal");
    CHECK(j["leading_digit"]["final_chi2"].get<double>() == rep.final_chi2);
    CHECK(j["running_chi2"].size() == rep.running.size());
}

TEST_CASE("splitmix64 streams are reproducible") {
    SplitMix64 a(123), b(123), c(124);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    CHECK(a.next() != c.next());
}
