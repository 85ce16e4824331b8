#pragma once

#include <vector>

#include "mandel/coeff_table.hpp"

namespace mandel {

/// All nonnegative tuples (j_1..j_n) with sum_i (d^{n-i+1} - 1) j_i = target,
/// enumerated depth-first over j_1 (largest weight) downward.
std::vector<std::vector<long>> solve_diophantine(int d, int n, long target);

/// Exact b_{d,m} and a_{d,m} from the Diophantine-sum formulas.
/// Valid ranges: 1 <= m <= d^(n+1) - 3 (b), 2 <= m <= d^(n+1) - 1 (a).
Rational compute_b_direct_rational(int d, int n, long m);
Rational compute_a_direct_rational(int d, int n, long m);

/// Smallest n whose range admits m.
int min_valid_n_b(int d, long m);
int min_valid_n_a(int d, long m);

/// d = 2 entry points returning normal-form dyadics. The single-argument
/// forms use the smallest valid n.
Dyadic compute_b_direct(int n, long m);
Dyadic compute_a_direct(int n, long m);
Dyadic compute_b_direct(long m);
Dyadic compute_a_direct(long m);

/// Whole d = 2 tables on the direct path; rows are independent, so work is
/// partitioned across threads by index.
CoefficientTable compute_b_direct_table(long max_m, int threads = 1);
CoefficientTable compute_a_direct_table(long max_m, int threads = 1);

}  // namespace mandel
