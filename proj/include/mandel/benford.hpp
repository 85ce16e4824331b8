#pragma once

#include <cstdint>
#include <json.hpp>
#include <vector>

#include "mandel/coeff_table.hpp"

namespace mandel {

enum class Component { Numerator, Denominator, Decimal };
const char* to_string(Component c);

/// Exact magnitudes of one component of a coefficient table, ascending m,
/// zero coefficients excluded.
struct ComponentSeries {
    Component component = Component::Decimal;
    SeriesKind series = SeriesKind::B;
    std::vector<Dyadic> values;
    long size() const { return static_cast<long>(values.size()); }
};
ComponentSeries extract_component(const CoefficientTable& table, Component component);

/// p_d = log_base((d+1)/d) for d = 1..base-1 (index d-1).
std::vector<double> benford_probabilities(int base);

/// First digit of |x| in the given base by integer-only scaling of the
/// numerator against the power of two; exact for numerators of any size.
int leading_digit_exact(const Dyadic& x, int base);

struct SignificandParts {
    double significand;  // in [1, base)
    long exponent;
    int base;
};
SignificandParts significand(double x, int base);

struct DigitCounts {
    int base = 10;
    std::vector<long> counts;  // observations of digit d at [d-1]
    long total = 0;
    explicit DigitCounts(int b = 10) : base(b), counts(static_cast<size_t>(b - 1), 0) {}
    void add(int digit);
};

double chi2_leading_digit(const DigitCounts& counts, int base);

/// Fractional parts of log10|x|, computed from the dyadic form; the leading
/// 53 bits of the numerator bound the absolute error well below 1e-9.
double log10_abs(const Dyadic& x);
std::vector<double> log_mod1(const ComponentSeries& series);

struct UniformityResult {
    std::vector<long> bin_counts;
    double chi2 = 0.0;
};
UniformityResult uniformity_chi2(const std::vector<double>& fracs, int bins = 10);

struct RunningChi2 {
    std::vector<double> sequence;  // statistic after each added value
    double final_chi2 = 0.0;
    double per_test_alpha = 0.0;
    double threshold = 0.0;  // Bonferroni-corrected critical value
    long exceed_count = 0;
    bool any_exceeds = false;
    DigitCounts final_counts;
};
RunningChi2 running_chi2(const ComponentSeries& series, int base, double alpha);

/// Fraction of resampling trials whose leading-digit statistic lands in the
/// uncorrected alpha = 0.05 rejection region. Deterministic given the seed;
/// trial t draws from a generator seeded by (seed, t).
double bootstrap_rejection_rate(const ComponentSeries& series, long trials, long sample_size,
                                std::uint64_t seed, int base = 10, int threads = 1);

struct MagnitudeStats {
    double mean = 0.0;
    double sd = 0.0;  // population convention (divide by N)
};
MagnitudeStats magnitude_stats(const ComponentSeries& series);

struct BenfordConfig {
    int base = 10;
    double alpha = 0.05;
    long bootstrap_trials = 1000;
    long bootstrap_samples = 1000;
    std::uint64_t seed = 1;
    int log_bins = 10;
    int threads = 1;
};

struct BenfordReport {
    SeriesKind series = SeriesKind::B;
    Component component = Component::Decimal;
    int base = 10;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    long count = 0;

    std::vector<double> running;  // chi^2 after each added value
    double final_chi2 = 0.0;
    double per_test_alpha = 0.0;
    double bonferroni_threshold = 0.0;
    long running_exceed_count = 0;
    bool any_exceeds = false;
    double p_value = 0.0;
    double power = 0.0;
    std::vector<long> digit_counts;

    std::vector<double> log_values;  // kept for plot emission, not serialized
    std::vector<long> log_bin_counts;
    double log_chi2 = 0.0;
    double log_p_value = 0.0;
    double log_power = 0.0;

    double bootstrap_rate = 0.0;
    long bootstrap_trials = 0;
    long bootstrap_samples = 0;

    double magnitude_mean = 0.0;
    double magnitude_sd = 0.0;
};

BenfordReport run_benford_report(const CoefficientTable& table, Component component,
                                 const BenfordConfig& config);

nlohmann::ordered_json to_json(const BenfordReport& report);

/// SplitMix64; the project-wide seedable generator for resampling.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    /// Uniform draw from [0, n) by 128-bit multiply-shift.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

  private:
    std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace mandel
