#include "mandel/beta_table.hpp"

#include <stdexcept>

#include "mandel/parallel.hpp"

namespace mandel {

namespace {

const Dyadic kZero{};
const Dyadic kOne{1};

Dyadic halve(Dyadic x) {
    if (x.is_zero()) return x;
    return Dyadic::from_parts(x.numerator(), x.exponent() - 1);
}

// Parallelizing a short convolution costs more in thread spawns than it saves.
constexpr long kParallelCutoff = 768;

}  // namespace

BetaTable::BetaTable(long max_m, int threads, const ProgressFn& progress) {
    if (max_m < 0) throw std::invalid_argument("max_m must be >= 0");
    if (threads < 1) threads = 1;
    max_index_ = max_m + 1;  // b_max_m lives at column max_m + 1
    depth_ = 1;
    while ((2L << depth_) - 2 < max_index_) ++depth_;

    levels_.assign(static_cast<size_t>(depth_),
                   std::vector<Dyadic>(static_cast<size_t>(max_index_ + 1)));
    for (int lvl = 0; lvl < depth_; ++lvl) levels_[static_cast<size_t>(lvl)][0] = kOne;

    for (long m = 1; m <= max_index_; ++m) {
        for (int lvl = depth_ - 1; lvl >= 0; --lvl) {
            auto& row = levels_[static_cast<size_t>(lvl)];
            if (lvl >= 1 && m <= (2L << lvl) - 2) continue;  // base-case zero band

            const long pow2n = 1L << (lvl + 1);  // 2^n with n = lvl + 1
            const Dyadic& upper = at(lvl + 1, m);

            // Symmetric self-convolution over k in [2^n - 1, m - 2^n + 1].
            const long lo = pow2n - 1;
            const long half = (m - 1) / 2;  // largest k with k < m - k
            Dyadic conv;
            if (half >= lo) {
                const long count = half - lo + 1;
                auto term = [&row, m](long k) {
                    return row[static_cast<size_t>(k)] * row[static_cast<size_t>(m - k)];
                };
                Dyadic sum = (count >= kParallelCutoff && threads > 1)
                                 ? parallel_sum<Dyadic>(lo, half + 1, threads, term)
                                 : [&] {
                                       Dyadic acc;
                                       for (long k = lo; k <= half; ++k) acc += term(k);
                                       return acc;
                                   }();
                if (!sum.is_zero())
                    conv = Dyadic::from_parts(sum.numerator(), sum.exponent() + 1);
            }
            if (m % 2 == 0 && m / 2 >= lo) {
                const Dyadic& mid = row[static_cast<size_t>(m / 2)];
                conv += mid * mid;
            }

            const long tail_idx = m - pow2n + 1;
            const Dyadic& tail = tail_idx >= 0 ? at(0, tail_idx) : kZero;

            row[static_cast<size_t>(m)] = halve(upper - conv - tail);
        }
        if (progress) progress(m, max_index_);
    }
}

const Dyadic& BetaTable::at(int level, long m) const {
    if (m == 0) return kOne;
    if (level >= 1 && 1 <= m && m <= (2L << level) - 2) return kZero;
    if (level >= depth_ || level < 0 || m < 0 || m > max_index_)
        throw std::out_of_range("beta table index out of range");
    return levels_[static_cast<size_t>(level)][static_cast<size_t>(m)];
}

CoefficientTable compute_b_recursive(long max_m, int threads, const ProgressFn& progress) {
    BetaTable beta(max_m, threads, progress);
    CoefficientTable table;
    table.kind = SeriesKind::B;
    table.method = Method::Recursive;
    table.entries.reserve(static_cast<size_t>(max_m) + 1);
    for (long m = 0; m <= max_m; ++m) table.entries.push_back(beta.at(0, m + 1));
    return table;
}

}  // namespace mandel
