#include "mandel/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "mandel/benford.hpp"
#include "mandel/beta_table.hpp"
#include "mandel/coeff_table.hpp"
#include "mandel/direct.hpp"
#include "mandel/mandelbrot.hpp"
#include "mandel/parallel.hpp"
#include "mandel/valuation.hpp"

namespace mandel {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string file_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::uint64_t h = 0xCBF29CE484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ull;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + hex;
}

namespace {

struct Progress {
    explicit Progress(std::string label)
        : label(std::move(label)), start(std::chrono::steady_clock::now()) {}

    void report(long done, long total) {
        if (done % 128 != 0 && done != total) return;
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "%s: %ld/%ld (%.1fs elapsed)\n", label.c_str(), done, total, secs);
    }

    // For parallel loops: every worker ticks, one of them prints.
    void tick(long total) {
        const long done = ++counter;
        report(done, total);
    }

    std::string label;
    std::chrono::steady_clock::time_point start;
    std::atomic<long> counter{0};
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_report(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json provenance(const std::string& subcommand, json config) {
    json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["config"] = std::move(config);
    return j;
}

SeriesKind parse_series(const std::string& s) {
    return s == "a" ? SeriesKind::A : SeriesKind::B;
}

Component parse_component(const std::string& s) {
    if (s == "numerator") return Component::Numerator;
    if (s == "denominator") return Component::Denominator;
    return Component::Decimal;
}

// ---- coeffs ----------------------------------------------------------------

struct CoeffsArgs {
    std::string series = "b";
    long max_m = 0;
    std::string method = "recursive";
    int degree = 2;
    std::string out;
    long direct_cap = 512;
    int threads = default_threads();
};

// Exact d-adic CSV rows for the general-degree direct path (export only).
std::string direct_csv_general(const CoeffsArgs& a) {
    std::string out = "m,numerator,denom_exponent\n";
    const bool is_b = a.series == "b";
    const long first = is_b ? 0 : 2;
    for (long m = first; m <= a.max_m; ++m) {
        Rational v;
        if (is_b && m == 0) {
            v = -compute_a_direct_rational(a.degree, min_valid_n_a(a.degree, 2), 2);
            v.canonicalize();
        } else {
            v = is_b ? compute_b_direct_rational(a.degree, min_valid_n_b(a.degree, m), m)
                     : compute_a_direct_rational(a.degree, min_valid_n_a(a.degree, m), m);
        }
        out += std::to_string(m);
        if (mpq_sgn(v.get_mpq_t()) == 0) {
            out += ",0,\n";
            continue;
        }
        // denominator must be a pure power of the degree
        BigInt den = v.get_den();
        long e = 0;
        while (mpz_cmp_ui(den.get_mpz_t(), 1) != 0) {
            if (!mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(a.degree)))
                throw std::runtime_error("coefficient at m=" + std::to_string(m) +
                                         " is not " + std::to_string(a.degree) + "-adic");
            mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(),
                            static_cast<unsigned long>(a.degree));
            ++e;
        }
        out += ',' + v.get_num().get_str() + ',' + std::to_string(e) + '\n';
    }
    return out;
}

int cmd_coeffs(const CoeffsArgs& args) {
    const SeriesKind kind = parse_series(args.series);
    const bool direct = args.method == "direct";
    const fs::path out_path(args.out);

    if (kind == SeriesKind::A && args.max_m < 2) {
        std::fprintf(stderr, "error: a-series tables start at m = 2\n");
        return 1;
    }
    if (!direct && args.degree != 2) {
        std::fprintf(stderr, "error: the recursive method is defined for degree 2 only\n");
        return 1;
    }
    if (direct && args.max_m > args.direct_cap) {
        std::fprintf(stderr,
                     "error: direct method capped at m <= %ld (it is an oracle, not a "
                     "production path); raise --direct-cap to override\n",
                     args.direct_cap);
        return 1;
    }
    if (out_path.has_parent_path() && !out_path.parent_path().empty() &&
        !fs::exists(out_path.parent_path())) {
        std::fprintf(stderr, "error: output directory %s does not exist\n",
                     out_path.parent_path().string().c_str());
        return 1;
    }

    if (args.degree != 2) {
        write_text(out_path, direct_csv_general(args));
        return 0;
    }

    // Resume from a cached table when the output already holds a prefix.
    CoefficientTable cached;
    bool have_cache = false;
    if (fs::exists(out_path)) {
        cached = load_table(out_path);
        if (cached.kind != kind) {
            std::fprintf(stderr, "error: %s already holds the other series; remove it first\n",
                         args.out.c_str());
            return 1;
        }
        if (direct) {
            std::fprintf(stderr, "error: refusing to overwrite %s (resume supports the "
                                 "recursive method only); remove it first\n",
                         args.out.c_str());
            return 1;
        }
        if (cached.max_index() >= args.max_m) {
            std::fprintf(stderr, "%s already covers m <= %ld; nothing to do\n", args.out.c_str(),
                         args.max_m);
            return 0;
        }
        have_cache = true;
    }

    CoefficientTable table;
    if (direct) {
        Progress prog("direct coefficients");
        table = kind == SeriesKind::B ? compute_b_direct_table(args.max_m, args.threads)
                                      : compute_a_direct_table(args.max_m, args.threads);
        prog.report(args.max_m, args.max_m);
    } else if (kind == SeriesKind::B) {
        Progress prog("beta columns");
        table = compute_b_recursive(args.max_m, args.threads,
                                    [&prog](long d, long t) { prog.report(d, t); });
        if (have_cache) {
            for (long m = 0; m <= cached.max_index(); ++m)
                if (table.at(m) != cached.at(m))
                    throw std::runtime_error("cached table disagrees with recomputation at m=" +
                                             std::to_string(m));
        }
    } else {
        Progress bprog("beta columns");
        CoefficientTable b = compute_b_recursive(args.max_m - 2, args.threads,
                                                 [&bprog](long d, long t) { bprog.report(d, t); });
        if (have_cache) {
            // Re-derive the cache's frontier entry as an integrity check,
            // then extend; the verified prefix itself is reused untouched.
            const long frontier = cached.max_index();
            const CoefficientTable probe =
                extend_a_from_b(cached.truncated(frontier - 1), b.truncated(frontier - 2),
                                args.threads);
            if (probe.at(frontier) != cached.at(frontier))
                throw std::runtime_error("cached table disagrees with recomputation at m=" +
                                         std::to_string(frontier));
            table = extend_a_from_b(std::move(cached), b, args.threads);
        } else {
            Progress aprog("a coefficients");
            table = compute_a_from_b(b, args.threads);
            aprog.report(args.max_m, args.max_m);
        }
    }
    save_table(table, out_path);
    return 0;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
    std::string a_path, b_path;
    long max_direct = 256;
    int threads = default_threads();
    std::string out;  // optional JSON diagnostics path; stdout otherwise
};

int cmd_verify(const VerifyArgs& args) {
    const CoefficientTable a = load_table(args.a_path);
    const CoefficientTable b = load_table(args.b_path);
    if (a.kind != SeriesKind::A || b.kind != SeriesKind::B)
        throw std::runtime_error("--a/--b paths hold the wrong series");

    json diag = provenance("verify", {{"a", args.a_path},
                                      {"b", args.b_path},
                                      {"max_direct", args.max_direct},
                                      {"threads", args.threads}});
    diag["inputs"] = {{"a_hash", file_hash(args.a_path)}, {"b_hash", file_hash(args.b_path)}};
    bool pass = true;

    // Recursive vs direct oracle equivalence (and Theorem-14 dyadicity of
    // every direct value, which to_dyadic enforces).
    {
        const long bmax = std::min(args.max_direct, b.max_index());
        const long amax = std::min(args.max_direct, a.max_index());
        std::atomic<long> mismatches{0};
        std::atomic<bool> not_dyadic{false};
        Progress prog("direct cross-check");
        const long total = (bmax + 1) + (amax - 1);
        // m = 0 sits outside the direct formula's range; the series relation
        // a_2 = -b_0 covers it on the direct path.
        if (-compute_a_direct(2) != b.at(0)) ++mismatches;
        prog.tick(total);
        parallel_chunks(1, bmax + 1, args.threads, [&](long lo, long hi) {
            for (long m = lo; m < hi; ++m) {
                try {
                    if (compute_b_direct(m) != b.at(m)) ++mismatches;
                } catch (const NotDyadicError&) {
                    not_dyadic = true;
                }
                prog.tick(total);
            }
        });
        parallel_chunks(2, amax + 1, args.threads, [&](long lo, long hi) {
            for (long m = lo; m < hi; ++m) {
                try {
                    if (compute_a_direct(m) != a.at(m)) ++mismatches;
                } catch (const NotDyadicError&) {
                    not_dyadic = true;
                }
                prog.tick(total);
            }
        });
        diag["oracle_equivalence"] = {{"b_checked", bmax + 1},
                                      {"a_checked", amax - 1},
                                      {"mismatches", mismatches.load()},
                                      {"not_dyadic", not_dyadic.load()}};
        pass = pass && mismatches == 0 && !not_dyadic;
    }

    // Zero sets must match the closed-form predictions exactly.
    {
        const ZeroPatternCheck za = check_zero_pattern(a);
        const ZeroPatternCheck zb = check_zero_pattern(b);
        diag["zero_pattern"] = {
            {"a",
             {{"predicted", za.predicted},
              {"prediction_failures", za.prediction_failures},
              {"unpredicted_zeros", za.unpredicted_zeros},
              {"offenders", za.offenders}}},
            {"b",
             {{"predicted", zb.predicted},
              {"prediction_failures", zb.prediction_failures},
              {"unpredicted_zeros", zb.unpredicted_zeros},
              {"offenders", zb.offenders}}}};
        pass = pass && za.pass() && za.converse_holds() && zb.pass() && zb.converse_holds();
    }

    // a_{2^n} = 2^{-n} wherever 2^n is in range.
    {
        long checked = 0, bad = 0;
        for (long n = 1; (1L << n) <= a.max_index(); ++n) {
            ++checked;
            if (a.at(1L << n) != Dyadic::from_parts(BigInt(1), -n)) ++bad;
        }
        diag["power_of_two_law"] = {{"checked", checked}, {"mismatches", bad}};
        pass = pass && bad == 0;
    }

    // 0 < |b_m| < 1/m monitor: flagged, never fatal.
    {
        std::vector<long> flagged;
        for (long m = 1; m <= b.max_index(); ++m) {
            const Dyadic& c = b.at(m);
            if (c.is_zero()) continue;
            // |p|*2^e < 1/m  <=>  m*|p| < 2^-e
            BigInt lhs = c.numerator() * m;
            mpz_abs(lhs.get_mpz_t(), lhs.get_mpz_t());
            bool ok = false;
            if (c.exponent() < 0) {
                BigInt rhs(1);
                mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(),
                             static_cast<mp_bitcnt_t>(-c.exponent()));
                ok = lhs < rhs;
            }
            if (!ok && flagged.size() < 100) flagged.push_back(m);
        }
        diag["magnitude_monitor"] = {{"flagged", flagged}};
    }

    diag["pass"] = pass;
    const std::string text = diag.dump(2) + "\n";
    if (args.out.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_text(args.out, text);
    return pass ? 0 : 1;
}

// ---- valuations ------------------------------------------------------------

struct ValuationsArgs {
    std::string input, out;
    std::vector<int> slopes = {0, 1, 2};
    int threads = default_threads();
};

int cmd_valuations(const ValuationsArgs& args) {
    const CoefficientTable table = load_table(args.input);
    const ValuationReport report = run_valuation_report(table, args.slopes);

    json j = provenance("valuations", {{"input", args.input},
                                       {"slopes", args.slopes}});
    j["input_hash"] = file_hash(args.input);
    j["report"] = to_json(report);
    write_report(args.out, j);
    return report.pass ? 0 : 1;
}

// ---- benford ---------------------------------------------------------------

struct BenfordArgs {
    std::string input, out, component = "decimal";
    long max_m = -1;  // truncate input table when >= 0
    int base = 10;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    long trials = 1000;
    long samples = 1000;
    std::string plot_dir;
    int threads = default_threads();
};

int cmd_benford(const BenfordArgs& args) {
    CoefficientTable table = load_table(args.input);
    if (args.max_m >= 0) table = table.truncated(args.max_m);

    BenfordConfig cfg;
    cfg.base = args.base;
    cfg.alpha = args.alpha;
    cfg.seed = args.seed;
    cfg.bootstrap_trials = args.trials;
    cfg.bootstrap_samples = args.samples;
    cfg.threads = args.threads;
    const BenfordReport report = run_benford_report(table, parse_component(args.component), cfg);

    json j = provenance("benford", {{"input", args.input},
                                    {"component", args.component},
                                    {"max_m", args.max_m},
                                    {"base", args.base},
                                    {"alpha", args.alpha},
                                    {"seed", args.seed},
                                    {"trials", args.trials},
                                    {"samples", args.samples}});
    j["input_hash"] = file_hash(args.input);
    j["report"] = to_json(report);
    write_report(args.out, j);

    if (!args.plot_dir.empty()) {
        fs::create_directories(args.plot_dir);
        char row[64];
        std::string chi = "index,chi2\n";
        for (size_t i = 0; i < report.running.size(); ++i) {
            std::snprintf(row, sizeof row, "%zu,%.12g\n", i + 1, report.running[i]);
            chi += row;
        }
        write_text(fs::path(args.plot_dir) / "running_chi2.csv", chi);
        std::string logs = "index,log10_mod1\n";
        for (size_t i = 0; i < report.log_values.size(); ++i) {
            std::snprintf(row, sizeof row, "%zu,%.12g\n", i + 1, report.log_values[i]);
            logs += row;
        }
        write_text(fs::path(args.plot_dir) / "log_mod1.csv", logs);
    }
    return 0;
}

// ---- render ----------------------------------------------------------------

struct RenderArgs {
    std::string out, csv;
    int width = 800, height = 800;
    std::vector<double> bounds = {-2.0, 0.5, -1.25, 1.25};
    int max_iter = 500;
    double radius = 2.0;
    int threads = default_threads();
};

int cmd_render(const RenderArgs& args) {
    const Bounds b{args.bounds[0], args.bounds[1], args.bounds[2], args.bounds[3]};
    const RenderGrid grid =
        render(b, args.width, args.height, args.max_iter, args.radius, args.threads);
    write_ppm(grid, args.out);
    if (!args.csv.empty()) write_escape_csv(grid, args.csv);
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Exact Mandelbrot uniformization coefficients, their 2-adic valuation "
                 "structure, and Benford's-law statistics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    CoeffsArgs coeffs;
    auto* c = app.add_subcommand("coeffs", "compute a coefficient table and write it as CSV");
    c->add_option("--series", coeffs.series, "series to compute")
        ->required()
        ->check(CLI::IsMember({"a", "b"}));
    c->add_option("--max-m", coeffs.max_m, "largest index to compute")->required();
    c->add_option("--method", coeffs.method, "computation path")
        ->check(CLI::IsMember({"recursive", "direct"}));
    c->add_option("--degree", coeffs.degree, "multibrot degree d (direct method only for d != 2)")
        ->check(CLI::Range(2, 64));
    c->add_option("--out", coeffs.out, "output CSV path")->required();
    c->add_option("--direct-cap", coeffs.direct_cap, "largest m allowed on the direct path");
    c->add_option("--threads", coeffs.threads, "worker pool size");

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "cross-check recursive vs direct paths and the "
                                           "dyadic/zero-pattern invariants");
    v->add_option("--a", verify.a_path, "a-series CSV")->required();
    v->add_option("--b", verify.b_path, "b-series CSV")->required();
    v->add_option("--max-direct", verify.max_direct, "largest index for the direct cross-check");
    v->add_option("--out", verify.out, "write JSON diagnostics here instead of stdout");
    v->add_option("--threads", verify.threads, "worker pool size");

    ValuationsArgs valuations;
    auto* l = app.add_subcommand("valuations", "run every valuation theorem/conjecture check");
    l->add_option("--input", valuations.input, "coefficient CSV")->required();
    l->add_option("--out", valuations.out, "report JSON path")->required();
    l->add_option("--slopes", valuations.slopes, "subsequence n values to fit")
        ->delimiter(',');
    l->add_option("--threads", valuations.threads, "worker pool size");

    BenfordArgs benford;
    auto* bf = app.add_subcommand("benford", "leading-digit and log-mod-1 testing pipeline");
    bf->add_option("--input", benford.input, "coefficient CSV")->required();
    bf->add_option("--component", benford.component, "which component to test")
        ->check(CLI::IsMember({"numerator", "denominator", "decimal"}));
    bf->add_option("--max-m", benford.max_m, "truncate the table to m <= this before testing");
    bf->add_option("--base", benford.base, "digit base")->check(CLI::Range(2, 64));
    bf->add_option("--alpha", benford.alpha, "overall significance level")
        ->check(CLI::Range(1e-12, 1.0));
    bf->add_option("--seed", benford.seed, "bootstrap seed");
    bf->add_option("--trials", benford.trials, "bootstrap trial count");
    bf->add_option("--samples", benford.samples, "bootstrap sample size");
    bf->add_option("--out", benford.out, "report JSON path")->required();
    bf->add_option("--plot-data", benford.plot_dir, "directory for plot-data CSVs");
    bf->add_option("--threads", benford.threads, "worker pool size");

    RenderArgs rnd;
    auto* r = app.add_subcommand("render", "escape-time image of the Mandelbrot set");
    r->add_option("--out", rnd.out, "PPM output path")->required();
    r->add_option("--width", rnd.width)->check(CLI::PositiveNumber);
    r->add_option("--height", rnd.height)->check(CLI::PositiveNumber);
    r->add_option("--bounds", rnd.bounds, "XMIN,XMAX,YMIN,YMAX")
        ->delimiter(',')
        ->expected(4);
    r->add_option("--max-iter", rnd.max_iter)->check(CLI::PositiveNumber);
    r->add_option("--radius", rnd.radius, "escape radius (>= 2)");
    r->add_option("--csv", rnd.csv, "also write escape counts as CSV");
    r->add_option("--threads", rnd.threads, "worker pool size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c->parsed()) return cmd_coeffs(coeffs);
        if (v->parsed()) return cmd_verify(verify);
        if (l->parsed()) return cmd_valuations(valuations);
        if (bf->parsed()) return cmd_benford(benford);
        if (r->parsed()) return cmd_render(rnd);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

}  // namespace mandel
