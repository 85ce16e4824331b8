#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "mandel/dyadic.hpp"

namespace mandel {

enum class SeriesKind { A, B };
enum class Method { Recursive, Direct };

inline const char* to_string(SeriesKind k) { return k == SeriesKind::A ? "a" : "b"; }
inline const char* to_string(Method m) { return m == Method::Recursive ? "recursive" : "direct"; }

/// Indexed sequence of a_m (m >= 2) or b_m (m >= 0) values.
struct CoefficientTable {
    SeriesKind kind = SeriesKind::B;
    int degree = 2;
    Method method = Method::Recursive;
    std::vector<Dyadic> entries;  // entries[i] holds the coefficient at m = first_index() + i

    long first_index() const { return kind == SeriesKind::A ? 2 : 0; }
    long max_index() const { return first_index() + static_cast<long>(entries.size()) - 1; }
    bool covers(long m) const { return m >= first_index() && m <= max_index(); }

    const Dyadic& at(long m) const;
    long size() const { return static_cast<long>(entries.size()); }

    /// View restricted to indices <= max_m (metadata preserved).
    CoefficientTable truncated(long max_m) const;
};

/// a_m = -b_{m-2} - sum_{j=2}^{m-1} a_j b_{m-1-j}, computed in increasing m.
CoefficientTable compute_a_from_b(const CoefficientTable& b_table, int threads = 1);

/// Same recurrence, but entries already present in `a_prefix` are reused
/// untouched; only indices above its range are computed (through
/// b_table.max_index() + 2).
CoefficientTable extend_a_from_b(CoefficientTable a_prefix, const CoefficientTable& b_table,
                                 int threads = 1);

/// Floating-point partial sum of the series: z + sum b_m z^{-m} (b) or
/// z + sum a_m z^m (a), using `terms` coefficients from the first index.
std::complex<double> evaluate_series(const CoefficientTable& table, std::complex<double> z,
                                     long terms);

/// CSV with header "m,numerator,denom_exponent"; zero rows carry numerator 0
/// and an empty exponent field. UTF-8, LF, ascending m.
void save_table(const CoefficientTable& table, const std::filesystem::path& path);
CoefficientTable load_table(const std::filesystem::path& path);

std::string table_to_csv(const CoefficientTable& table);
CoefficientTable table_from_csv(std::string_view text);

}  // namespace mandel
