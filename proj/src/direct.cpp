#include "mandel/direct.hpp"

#include <cmath>
#include <stdexcept>

#include "mandel/parallel.hpp"

namespace mandel {

namespace {

void check_dn(int d, int n) {
    if (d < 2) throw std::invalid_argument("degree d must be >= 2");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if ((n + 1) * std::log2(static_cast<double>(d)) > 62)
        throw std::invalid_argument("d^(n+1) overflows the index range");
}

long ipow(int d, int e) {
    long r = 1;
    while (e-- > 0) r *= d;
    return r;
}

// Weights d^n - 1, d^(n-1) - 1, ..., d - 1.
std::vector<long> weights(int d, int n) {
    std::vector<long> w(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] = ipow(d, n - i) - 1;
    return w;
}

// Depth-first walk of the solution tree. The binomial-product prefix is
// carried down so each node costs one incremental C_j update, and zero
// prefixes prune their whole subtree.
class DirectSum {
  public:
    DirectSum(int d, int n, long m) : d_(d), n_(n), first_arg_(m, ipow(d, n)) {
        first_arg_.canonicalize();
        w_ = weights(d, n);
    }

    Rational run(long target) {
        total_ = 0;
        descend(0, target, first_arg_, Rational(1));
        return total_;
    }

  private:
    void descend(int depth, long rem, const Rational& arg, const Rational& prefix) {
        const long w = w_[static_cast<size_t>(depth)];
        const bool last = depth == n_ - 1;
        if (last) {
            if (rem % w != 0) return;
            const long j = rem / w;
            total_ += prefix * gen_binomial(arg, static_cast<unsigned long>(j));
            return;
        }
        // C_{j+1}(a) = C_j(a) (a - j) / (j + 1)
        Rational binom(1);
        Rational next_arg;
        for (long j = 0; w * j <= rem; ++j) {
            if (j > 0) {
                binom *= (arg - (j - 1)) / Rational(j);
                if (mpq_sgn(binom.get_mpq_t()) == 0) break;  // zero for every larger j too
            }
            next_arg = (arg - j) * d_;
            descend(depth + 1, rem - w * j, next_arg, prefix * binom);
        }
    }

    int d_, n_;
    Rational first_arg_;
    std::vector<long> w_;
    Rational total_;
};

Rational direct_sum(int d, int n, long m, long target) {
    return DirectSum(d, n, m).run(target);
}

}  // namespace

std::vector<std::vector<long>> solve_diophantine(int d, int n, long target) {
    check_dn(d, n);
    if (target < 0) return {};
    const auto w = weights(d, n);
    std::vector<std::vector<long>> out;
    std::vector<long> cur(static_cast<size_t>(n));
    const auto rec = [&](auto&& self, int depth, long rem) -> void {
        if (depth == n - 1) {
            if (rem % w[static_cast<size_t>(depth)] == 0) {
                cur[static_cast<size_t>(depth)] = rem / w[static_cast<size_t>(depth)];
                out.push_back(cur);
            }
            return;
        }
        const long wd = w[static_cast<size_t>(depth)];
        for (long j = 0; wd * j <= rem; ++j) {
            cur[static_cast<size_t>(depth)] = j;
            self(self, depth + 1, rem - wd * j);
        }
    };
    rec(rec, 0, target);
    return out;
}

Rational compute_b_direct_rational(int d, int n, long m) {
    check_dn(d, n);
    if (m < 1 || m > ipow(d, n + 1) - 3)
        throw std::domain_error("b: m=" + std::to_string(m) + " outside [1, d^(n+1)-3] for n=" +
                                std::to_string(n));
    Rational r = direct_sum(d, n, m, m + 1) / Rational(-m);
    r.canonicalize();
    return r;
}

Rational compute_a_direct_rational(int d, int n, long m) {
    check_dn(d, n);
    if (m < 2 || m > ipow(d, n + 1) - 1)
        throw std::domain_error("a: m=" + std::to_string(m) + " outside [2, d^(n+1)-1] for n=" +
                                std::to_string(n));
    Rational r = direct_sum(d, n, m, m - 1) / Rational(m);
    r.canonicalize();
    return r;
}

int min_valid_n_b(int d, long m) {
    int n = 1;
    while (ipow(d, n + 1) - 3 < m) ++n;
    return n;
}

int min_valid_n_a(int d, long m) {
    int n = 1;
    while (ipow(d, n + 1) - 1 < m) ++n;
    return n;
}

Dyadic compute_b_direct(int n, long m) { return to_dyadic(compute_b_direct_rational(2, n, m)); }
Dyadic compute_a_direct(int n, long m) { return to_dyadic(compute_a_direct_rational(2, n, m)); }
Dyadic compute_b_direct(long m) { return compute_b_direct(min_valid_n_b(2, m), m); }
Dyadic compute_a_direct(long m) { return compute_a_direct(min_valid_n_a(2, m), m); }

CoefficientTable compute_b_direct_table(long max_m, int threads) {
    if (max_m < 0) throw std::invalid_argument("max_m must be >= 0");
    CoefficientTable t;
    t.kind = SeriesKind::B;
    t.method = Method::Direct;
    t.entries.resize(static_cast<size_t>(max_m) + 1);
    // Theorem-range starts at m = 1; the constant term comes from the series
    // relation a_2 = -b_0, itself evaluated on the direct path.
    t.entries[0] = -compute_a_direct(2);
    parallel_chunks(1, max_m + 1, threads, [&](long lo, long hi) {
        for (long m = lo; m < hi; ++m) t.entries[static_cast<size_t>(m)] = compute_b_direct(m);
    });
    return t;
}

CoefficientTable compute_a_direct_table(long max_m, int threads) {
    if (max_m < 2) throw std::invalid_argument("a-series tables start at m = 2");
    CoefficientTable t;
    t.kind = SeriesKind::A;
    t.method = Method::Direct;
    t.entries.resize(static_cast<size_t>(max_m) - 1);
    parallel_chunks(2, max_m + 1, threads, [&](long lo, long hi) {
        for (long m = lo; m < hi; ++m) t.entries[static_cast<size_t>(m - 2)] = compute_a_direct(m);
    });
    return t;
}

}  // namespace mandel
