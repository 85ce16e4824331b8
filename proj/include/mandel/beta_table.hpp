#pragma once

#include <functional>

#include "mandel/coeff_table.hpp"

namespace mandel {

/// Called as work proceeds: (columns done, columns total).
using ProgressFn = std::function<void(long, long)>;

/// Triangular workspace beta_{n,m} with b_m = beta_{0,m+1}.
///
/// Depth is the smallest N with 2^(N+1) - 2 >= max_m + 1, which makes the
/// top level identically given by base cases. Levels are filled column by
/// column, level N-1 down to 0, so every reference lands on an entry that is
/// either a base case or already computed.
class BetaTable {
  public:
    explicit BetaTable(long max_m, int threads = 1, const ProgressFn& progress = {});

    int depth() const { return depth_; }
    long max_index() const { return max_index_; }

    /// beta_{level,m}; base cases (column 0, the zero band of levels >= 1)
    /// are resolved without storage.
    const Dyadic& at(int level, long m) const;

  private:
    long max_index_;  // columns 0..max_index_
    int depth_;
    std::vector<std::vector<Dyadic>> levels_;  // levels 0..depth_-1, dense
};

/// b_0..b_max_m read off level 0 of the beta table.
CoefficientTable compute_b_recursive(long max_m, int threads = 1, const ProgressFn& progress = {});

}  // namespace mandel
