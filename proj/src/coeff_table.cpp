#include "mandel/coeff_table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mandel/parallel.hpp"

namespace mandel {

const Dyadic& CoefficientTable::at(long m) const {
    if (!covers(m))
        throw std::out_of_range("coefficient index " + std::to_string(m) + " outside table range");
    return entries[static_cast<size_t>(m - first_index())];
}

CoefficientTable CoefficientTable::truncated(long max_m) const {
    CoefficientTable t;
    t.kind = kind;
    t.degree = degree;
    t.method = method;
    if (max_m >= first_index()) {
        const size_t n = std::min(entries.size(), static_cast<size_t>(max_m - first_index() + 1));
        t.entries.assign(entries.begin(), entries.begin() + static_cast<long>(n));
    }
    return t;
}

CoefficientTable compute_a_from_b(const CoefficientTable& b_table, int threads) {
    CoefficientTable empty;
    empty.kind = SeriesKind::A;
    empty.degree = b_table.degree;
    empty.method = b_table.method;
    return extend_a_from_b(std::move(empty), b_table, threads);
}

CoefficientTable extend_a_from_b(CoefficientTable a_prefix, const CoefficientTable& b_table,
                                 int threads) {
    if (b_table.kind != SeriesKind::B)
        throw std::invalid_argument("compute_a_from_b needs a b-series table");
    if (a_prefix.kind != SeriesKind::A)
        throw std::invalid_argument("prefix must be an a-series table");
    if (threads < 1) threads = 1;
    const long max_m = b_table.max_index() + 2;

    CoefficientTable a = std::move(a_prefix);
    a.entries.reserve(static_cast<size_t>(max_m - 1));

    // a_m = -b_{m-2} - sum_{j=2}^{m-1} a_j b_{m-1-j}; increasing m keeps every
    // a_j on the right-hand side already computed.
    for (long m = a.max_index() + 1; m <= max_m; ++m) {
        auto term = [&](long j) { return a.at(j) * b_table.at(m - 1 - j); };
        const long count = m - 2;
        Dyadic sum = (count >= 768 && threads > 1)
                         ? parallel_sum<Dyadic>(2, m, threads, term)
                         : [&] {
                               Dyadic acc;
                               for (long j = 2; j < m; ++j) acc += term(j);
                               return acc;
                           }();
        a.entries.push_back(-b_table.at(m - 2) - sum);
    }
    return a;
}

std::complex<double> evaluate_series(const CoefficientTable& table, std::complex<double> z,
                                     long terms) {
    if (terms < 0 || terms > table.size())
        throw std::invalid_argument("terms exceeds table range");
    if (table.kind == SeriesKind::B && z == std::complex<double>(0.0, 0.0))
        throw std::domain_error("b-series partial sum undefined at z = 0");

    std::complex<double> acc = z;
    std::complex<double> zpow = 1.0;  // z^0 for b; multiplied up to z^2 for a below
    if (table.kind == SeriesKind::A) zpow = z * z;
    const std::complex<double> step = table.kind == SeriesKind::A ? z : 1.0 / z;
    for (long i = 0; i < terms; ++i) {
        acc += table.entries[static_cast<size_t>(i)].to_double() * zpow;
        zpow *= step;
    }
    return acc;
}

std::string table_to_csv(const CoefficientTable& table) {
    std::string out = "m,numerator,denom_exponent\n";
    long m = table.first_index();
    for (const auto& c : table.entries) {
        out += std::to_string(m);
        if (c.is_zero()) {
            out += ",0,";
        } else {
            out += ',';
            out += c.numerator().get_str();
            out += ',';
            out += std::to_string(-c.valuation());
        }
        out += '\n';
        ++m;
    }
    return out;
}

namespace {

[[noreturn]] void parse_fail(size_t line_no, const std::string& why) {
    throw std::runtime_error("csv parse error at line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

CoefficientTable table_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    size_t line_no = 1;
    if (!std::getline(in, line) || line != "m,numerator,denom_exponent")
        parse_fail(1, "expected header 'm,numerator,denom_exponent'");

    CoefficientTable table;
    bool first = true;
    long expect_m = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) parse_fail(line_no, "empty row");
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) parse_fail(line_no, "expected 3 fields");

        long m = 0;
        const auto mres = std::from_chars(line.data(), line.data() + c1, m);
        if (mres.ec != std::errc() || mres.ptr != line.data() + c1)
            parse_fail(line_no, "bad index field");
        if (first) {
            if (m == 0)
                table.kind = SeriesKind::B;
            else if (m == 2)
                table.kind = SeriesKind::A;
            else
                parse_fail(line_no, "first index must be 0 (b-series) or 2 (a-series)");
            expect_m = m;
            first = false;
        }
        if (m != expect_m) parse_fail(line_no, "indices must ascend without gaps");
        ++expect_m;

        const std::string num_str = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string exp_str = line.substr(c2 + 1);
        if (num_str == "0") {
            if (!exp_str.empty()) parse_fail(line_no, "zero rows carry an empty exponent");
            table.entries.emplace_back();
            continue;
        }
        BigInt p;
        if (num_str.empty() || p.set_str(num_str, 10) != 0)
            parse_fail(line_no, "bad numerator '" + num_str + "'");
        if (mpz_even_p(p.get_mpz_t())) parse_fail(line_no, "numerator must be odd");
        long e = 0;
        const auto eres = std::from_chars(exp_str.data(), exp_str.data() + exp_str.size(), e);
        if (eres.ec != std::errc() || eres.ptr != exp_str.data() + exp_str.size())
            parse_fail(line_no, "bad exponent field '" + exp_str + "'");
        table.entries.push_back(Dyadic::from_parts(std::move(p), -e));
    }
    if (first) parse_fail(line_no, "no coefficient rows");
    return table;
}

void save_table(const CoefficientTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF line endings everywhere
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << table_to_csv(table);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

CoefficientTable load_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return table_from_csv(buf.str());
}

}  // namespace mandel
