#include "mandel/benford.hpp"

#include <atomic>
#include <cmath>

#include "mandel/parallel.hpp"
#include "mandel/specfun.hpp"

namespace mandel {

const char* to_string(Component c) {
    switch (c) {
        case Component::Numerator: return "numerator";
        case Component::Denominator: return "denominator";
        default: return "decimal";
    }
}

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

ComponentSeries extract_component(const CoefficientTable& table, Component component) {
    ComponentSeries s;
    s.component = component;
    s.series = table.kind;
    s.values.reserve(table.entries.size());
    for (const auto& c : table.entries) {
        if (c.is_zero()) continue;
        switch (component) {
            case Component::Numerator: {
                BigInt p = c.numerator();
                mpz_abs(p.get_mpz_t(), p.get_mpz_t());
                s.values.push_back(Dyadic::from_parts(std::move(p), 0));
                break;
            }
            case Component::Denominator: {
                const long e = -c.valuation();
                s.values.push_back(Dyadic::from_parts(BigInt(1), e > 0 ? e : 0));
                break;
            }
            case Component::Decimal:
                s.values.push_back(c.abs());
                break;
        }
    }
    return s;
}

std::vector<double> benford_probabilities(int base) {
    if (base < 2) throw std::invalid_argument("base must be >= 2");
    std::vector<double> p(static_cast<size_t>(base - 1));
    const double logb = std::log(static_cast<double>(base));
    for (int d = 1; d < base; ++d)
        p[static_cast<size_t>(d - 1)] = std::log((d + 1.0) / d) / logb;
    return p;
}

int leading_digit_exact(const Dyadic& x, int base) {
    if (x.is_zero()) throw std::domain_error("leading digit undefined at zero");
    if (base < 2) throw std::invalid_argument("base must be >= 2");
    BigInt p = x.numerator();
    mpz_abs(p.get_mpz_t(), p.get_mpz_t());
    const long e = x.exponent();

    // t ~ floor(log_base(p 2^e)); exact adjustment below.
    const long bits = static_cast<long>(mpz_sizeinbase(p.get_mpz_t(), 2));
    long t = static_cast<long>(std::floor(static_cast<double>(bits - 1 + e) /
                                          std::log2(static_cast<double>(base)))) -
             1;

    const auto digit_at = [&](long tt) {
        BigInt num = p, den = 1;
        if (e >= 0)
            mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        else
            mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
        BigInt bp;
        mpz_ui_pow_ui(bp.get_mpz_t(), static_cast<unsigned long>(base),
                      static_cast<unsigned long>(tt >= 0 ? tt : -tt));
        if (tt >= 0)
            den *= bp;
        else
            num *= bp;
        BigInt q = num / den;
        return q;
    };

    BigInt d = digit_at(t);
    while (mpz_sgn(d.get_mpz_t()) == 0) d = digit_at(--t);
    while (mpz_cmp_ui(d.get_mpz_t(), static_cast<unsigned long>(base)) >= 0) d = digit_at(++t);
    return static_cast<int>(mpz_get_ui(d.get_mpz_t()));
}

SignificandParts significand(double x, int base) {
    if (!(x > 0.0)) throw std::domain_error("significand needs x > 0");
    if (base < 2) throw std::invalid_argument("base must be >= 2");
    const double b = static_cast<double>(base);
    long k = static_cast<long>(std::floor(std::log(x) / std::log(b)));
    double s = x / std::pow(b, static_cast<double>(k));
    while (s < 1.0) {
        --k;
        s *= b;
    }
    while (s >= b) {
        ++k;
        s /= b;
    }
    return {s, k, base};
}

void DigitCounts::add(int digit) {
    if (digit < 1 || digit >= base) throw std::invalid_argument("digit outside [1, base)");
    ++counts[static_cast<size_t>(digit - 1)];
    ++total;
}

double chi2_leading_digit(const DigitCounts& counts, int base) {
    if (counts.base != base || counts.total <= 0)
        throw std::invalid_argument("digit counts do not match base or are empty");
    const auto p = benford_probabilities(base);
    double chi2 = 0.0;
    for (int d = 1; d < base; ++d) {
        const double expected = p[static_cast<size_t>(d - 1)] * static_cast<double>(counts.total);
        const double diff = static_cast<double>(counts.counts[static_cast<size_t>(d - 1)]) - expected;
        chi2 += diff * diff / expected;
    }
    return chi2;
}

double log10_abs(const Dyadic& x) {
    if (x.is_zero()) throw std::domain_error("log undefined at zero");
    static const long double log10_2 = std::log10(2.0L);
    long e2 = 0;
    const double mant = std::fabs(mpz_get_d_2exp(&e2, x.numerator().get_mpz_t()));
    const long double lg = std::log10(static_cast<long double>(mant)) +
                           static_cast<long double>(e2 + x.exponent()) * log10_2;
    return static_cast<double>(lg);
}

std::vector<double> log_mod1(const ComponentSeries& series) {
    static const long double log10_2 = std::log10(2.0L);
    std::vector<double> out;
    out.reserve(series.values.size());
    for (const auto& v : series.values) {
        long e2 = 0;
        const double mant = std::fabs(mpz_get_d_2exp(&e2, v.numerator().get_mpz_t()));
        const long double lg = std::log10(static_cast<long double>(mant)) +
                               static_cast<long double>(e2 + v.exponent()) * log10_2;
        long double frac = lg - std::floor(lg);
        if (frac >= 1.0L) frac -= 1.0L;
        if (frac < 0.0L) frac += 1.0L;
        out.push_back(static_cast<double>(frac));
    }
    return out;
}

UniformityResult uniformity_chi2(const std::vector<double>& fracs, int bins) {
    if (fracs.empty()) throw std::invalid_argument("empty sample");
    if (bins < 2) throw std::invalid_argument("bins must be >= 2");
    UniformityResult r;
    r.bin_counts.assign(static_cast<size_t>(bins), 0);
    for (const double f : fracs) {
        int b = static_cast<int>(f * bins);
        if (b >= bins) b = bins - 1;
        if (b < 0) b = 0;
        ++r.bin_counts[static_cast<size_t>(b)];
    }
    const double expected = static_cast<double>(fracs.size()) / bins;
    for (const long c : r.bin_counts) {
        const double diff = static_cast<double>(c) - expected;
        r.chi2 += diff * diff / expected;
    }
    return r;
}

RunningChi2 running_chi2(const ComponentSeries& series, int base, double alpha) {
    if (series.values.empty()) throw std::invalid_argument("empty component series");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
    const auto p = benford_probabilities(base);
    const long total = series.size();

    RunningChi2 r;
    r.final_counts = DigitCounts(base);
    r.sequence.reserve(static_cast<size_t>(total));
    r.per_test_alpha = alpha / static_cast<double>(total);
    r.threshold = chi2_quantile(1.0 - r.per_test_alpha, base - 2);

    for (const auto& v : series.values) {
        r.final_counts.add(leading_digit_exact(v, base));
        const double n = static_cast<double>(r.final_counts.total);
        double chi2 = 0.0;
        for (int d = 1; d < base; ++d) {
            const double expected = p[static_cast<size_t>(d - 1)] * n;
            const double diff =
                static_cast<double>(r.final_counts.counts[static_cast<size_t>(d - 1)]) - expected;
            chi2 += diff * diff / expected;
        }
        r.sequence.push_back(chi2);
        if (chi2 > r.threshold) ++r.exceed_count;
    }
    r.final_chi2 = r.sequence.back();
    r.any_exceeds = r.exceed_count > 0;
    return r;
}

double bootstrap_rejection_rate(const ComponentSeries& series, long trials, long sample_size,
                                std::uint64_t seed, int base, int threads) {
    if (series.values.empty()) throw std::invalid_argument("empty component series");
    if (trials < 1 || sample_size < 1) throw std::invalid_argument("trials and sample_size must be >= 1");

    std::vector<int> digits;
    digits.reserve(series.values.size());
    for (const auto& v : series.values) digits.push_back(leading_digit_exact(v, base));
    const std::uint64_t n = digits.size();

    const auto p = benford_probabilities(base);
    const double cutoff = chi2_quantile(0.95, base - 2);

    std::atomic<long> rejections{0};
    parallel_chunks(0, trials, threads, [&](long lo, long hi) {
        long local = 0;
        std::vector<long> counts(static_cast<size_t>(base - 1));
        for (long t = lo; t < hi; ++t) {
            SplitMix64 rng(mix64(seed ^ mix64(static_cast<std::uint64_t>(t) + 1)));
            std::fill(counts.begin(), counts.end(), 0L);
            for (long i = 0; i < sample_size; ++i)
                ++counts[static_cast<size_t>(digits[static_cast<size_t>(rng.below(n))] - 1)];
            double chi2 = 0.0;
            for (int d = 1; d < base; ++d) {
                const double expected = p[static_cast<size_t>(d - 1)] * static_cast<double>(sample_size);
                const double diff = static_cast<double>(counts[static_cast<size_t>(d - 1)]) - expected;
                chi2 += diff * diff / expected;
            }
            if (chi2 > cutoff) ++local;
        }
        rejections += local;
    });
    return static_cast<double>(rejections.load()) / static_cast<double>(trials);
}

MagnitudeStats magnitude_stats(const ComponentSeries& series) {
    if (series.values.empty()) throw std::invalid_argument("empty component series");
    double mean = 0.0;
    std::vector<double> logs;
    logs.reserve(series.values.size());
    for (const auto& v : series.values) {
        logs.push_back(log10_abs(v));
        mean += logs.back();
    }
    mean /= static_cast<double>(logs.size());
    double var = 0.0;
    for (const double l : logs) var += (l - mean) * (l - mean);
    var /= static_cast<double>(logs.size());
    return {mean, std::sqrt(var)};
}

BenfordReport run_benford_report(const CoefficientTable& table, Component component,
                                 const BenfordConfig& config) {
    const ComponentSeries series = extract_component(table, component);
    if (series.values.empty()) throw std::invalid_argument("no nonzero coefficients in table");

    BenfordReport rep;
    rep.series = table.kind;
    rep.component = component;
    rep.base = config.base;
    rep.alpha = config.alpha;
    rep.seed = config.seed;
    rep.count = series.size();

    RunningChi2 run = running_chi2(series, config.base, config.alpha);
    rep.running = std::move(run.sequence);
    rep.final_chi2 = run.final_chi2;
    rep.per_test_alpha = run.per_test_alpha;
    rep.bonferroni_threshold = run.threshold;
    rep.running_exceed_count = run.exceed_count;
    rep.any_exceeds = run.any_exceeds;
    rep.digit_counts = run.final_counts.counts;
    rep.p_value = chi2_sf(rep.final_chi2, config.base - 2);
    rep.power = noncentral_chi2_power(rep.final_chi2, config.base - 2, config.alpha);

    rep.log_values = log_mod1(series);
    UniformityResult uni = uniformity_chi2(rep.log_values, config.log_bins);
    rep.log_bin_counts = std::move(uni.bin_counts);
    rep.log_chi2 = uni.chi2;
    rep.log_p_value = chi2_sf(rep.log_chi2, config.log_bins - 1);
    rep.log_power = noncentral_chi2_power(rep.log_chi2, config.log_bins - 1, config.alpha);

    rep.bootstrap_trials = config.bootstrap_trials;
    rep.bootstrap_samples = config.bootstrap_samples;
    rep.bootstrap_rate = bootstrap_rejection_rate(series, config.bootstrap_trials,
                                                  config.bootstrap_samples, config.seed,
                                                  config.base, config.threads);

    const MagnitudeStats mag = magnitude_stats(series);
    rep.magnitude_mean = mag.mean;
    rep.magnitude_sd = mag.sd;
    return rep;
}

nlohmann::ordered_json to_json(const BenfordReport& r) {
    using json = nlohmann::ordered_json;
    json j;
    j["series"] = to_string(r.series);
    j["component"] = to_string(r.component);
    j["base"] = r.base;
    j["alpha"] = r.alpha;
    j["seed"] = r.seed;
    j["count"] = r.count;
    j["leading_digit"] = {{"counts", r.digit_counts},
                          {"final_chi2", r.final_chi2},
                          {"per_test_alpha", r.per_test_alpha},
                          {"bonferroni_threshold", r.bonferroni_threshold},
                          {"running_exceed_count", r.running_exceed_count},
                          {"any_exceeds", r.any_exceeds},
                          {"p_value", r.p_value},
                          {"power", r.power}};
    j["log_mod1"] = {{"bin_counts", r.log_bin_counts},
                     {"chi2", r.log_chi2},
                     {"p_value", r.log_p_value},
                     {"power", r.log_power}};
    j["bootstrap"] = {{"trials", r.bootstrap_trials},
                      {"sample_size", r.bootstrap_samples},
                      {"rejection_rate", r.bootstrap_rate}};
    j["magnitude"] = {{"mean", r.magnitude_mean}, {"sd", r.magnitude_sd}};
    j["running_chi2"] = r.running;
    return j;
}

}  // namespace mandel
