#pragma once

#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cfsched {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using IntMatrix = std::vector<std::vector<long long>>;

namespace detail {

struct Int64Overflow {};

inline long long checked_mul(long long a, long long b) {
    long long out;
    if (__builtin_mul_overflow(a, b, &out)) throw Int64Overflow{};
    return out;
}

inline long long checked_sub(long long a, long long b) {
    long long out;
    if (__builtin_sub_overflow(a, b, &out)) throw Int64Overflow{};
    return out;
}

// Fraction-free elimination (Bareiss): every intermediate entry is a minor of
// the input, all divisions are exact.
template <class T>
std::size_t bareiss_rank(std::vector<std::vector<T>> m) {
    const std::size_t rows = m.size();
    if (rows == 0) return 0;
    const std::size_t cols = m[0].size();
    std::size_t rank = 0;
    T prev = 1;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && m[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(m[rank], m[pivot]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            for (std::size_t j = col + 1; j < cols; ++j) {
                if constexpr (std::is_same_v<T, long long>) {
                    const long long num = checked_sub(checked_mul(m[rank][col], m[i][j]),
                                                      checked_mul(m[i][col], m[rank][j]));
                    m[i][j] = num / prev;
                } else {
                    m[i][j] = (m[rank][col] * m[i][j] - m[i][col] * m[rank][j]) / prev;
                }
            }
            m[i][col] = 0;
        }
        prev = m[rank][col];
        ++rank;
    }
    return rank;
}

}  // namespace detail

// Exact rank over the rationals.  Machine integers with overflow detection;
// a detected overflow escalates the whole elimination to big integers.
inline std::size_t rank_int(const IntMatrix& m) {
    try {
        return detail::bareiss_rank<long long>(m);
    } catch (const detail::Int64Overflow&) {
        std::vector<std::vector<BigInt>> big(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) big[i].assign(m[i].begin(), m[i].end());
        return detail::bareiss_rank<BigInt>(std::move(big));
    }
}

// Rank of the entrywise mod-2 reduction over GF(2).
inline std::size_t rank_mod2(const IntMatrix& m) {
    if (m.empty()) return 0;
    const std::size_t cols = m[0].size();
    const std::size_t words = (cols + 63) / 64;
    std::vector<std::vector<std::uint64_t>> bits(m.size(), std::vector<std::uint64_t>(words, 0));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (m[i][j] % 2 != 0) bits[i][j / 64] |= std::uint64_t(1) << (j % 64);

    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < m.size(); ++col) {
        const std::size_t w = col / 64;
        const std::uint64_t mask = std::uint64_t(1) << (col % 64);
        std::size_t pivot = rank;
        while (pivot < m.size() && !(bits[pivot][w] & mask)) ++pivot;
        if (pivot == m.size()) continue;
        std::swap(bits[rank], bits[pivot]);
        for (std::size_t i = rank + 1; i < m.size(); ++i)
            if (bits[i][w] & mask)
                for (std::size_t k = w; k < words; ++k) bits[i][k] ^= bits[rank][k];
        ++rank;
    }
    return rank;
}

// Decoding matrix with incremental exact rank.  Rows are appended as given;
// an integer row-echelon basis (gcd-normalized, positive pivots) carries the
// independence state between updates.
class DecodingMatrix {
  public:
    explicit DecodingMatrix(std::size_t cols) : cols_(cols) {
        if (cols == 0) throw std::invalid_argument("DecodingMatrix: zero columns");
    }

    std::size_t cols() const { return cols_; }
    std::size_t rank() const { return basis_.size(); }
    const IntMatrix& rows() const { return rows_; }

    // Appends v; returns true iff the rank increased.
    bool add_row_if_independent(std::span<const long long> v) {
        if (v.size() != cols_) throw std::invalid_argument("add_row_if_independent: bad width");
        rows_.emplace_back(v.begin(), v.end());
        std::vector<BigInt> r(v.begin(), v.end());
        reduce(r);
        const std::size_t piv = leading(r);
        if (piv == cols_) return false;
        normalize(r, piv);
        insert_sorted(std::move(r), piv);
        return true;
    }

    // True iff e_i lies in the row space of the appended rows.
    bool spans_unit(std::size_t i) const {
        if (i >= cols_) throw std::invalid_argument("spans_unit: index out of range");
        std::vector<BigInt> r(cols_, 0);
        r[i] = 1;
        reduce(r);
        return leading(r) == cols_;
    }

  private:
    void reduce(std::vector<BigInt>& r) const {
        for (std::size_t b = 0; b < basis_.size(); ++b) {
            const std::size_t p = pivot_[b];
            if (r[p] == 0) continue;
            const BigInt scale_r = basis_[b][p];
            const BigInt scale_b = r[p];
            for (std::size_t j = 0; j < cols_; ++j) r[j] = scale_r * r[j] - scale_b * basis_[b][j];
        }
    }

    std::size_t leading(const std::vector<BigInt>& r) const {
        for (std::size_t j = 0; j < cols_; ++j)
            if (r[j] != 0) return j;
        return cols_;
    }

    static void normalize(std::vector<BigInt>& r, std::size_t piv) {
        BigInt g = 0;
        for (const BigInt& x : r) g = boost::multiprecision::gcd(g, x);
        if (g > 1)
            for (BigInt& x : r) x /= g;
        if (r[piv] < 0)
            for (BigInt& x : r) x = -x;
    }

    void insert_sorted(std::vector<BigInt> r, std::size_t piv) {
        std::size_t pos = 0;
        while (pos < pivot_.size() && pivot_[pos] < piv) ++pos;
        basis_.insert(basis_.begin() + pos, std::move(r));
        pivot_.insert(pivot_.begin() + pos, piv);
    }

    std::size_t cols_;
    IntMatrix rows_;
    std::vector<std::vector<BigInt>> basis_;  // echelon, pivots strictly increasing
    std::vector<std::size_t> pivot_;
};

// Smallest i such that e_i is independent of D's row space.  Exists whenever
// rank < cols: a basis of unit vectors cannot all be spanned by fewer rows.
inline std::size_t find_completing_unit(const DecodingMatrix& d) {
    if (d.rank() >= d.cols()) throw std::logic_error("find_completing_unit: already full rank");
    for (std::size_t i = 0; i < d.cols(); ++i)
        if (!d.spans_unit(i)) return i;
    throw std::logic_error("find_completing_unit: no completing unit found");
}

// Exact recovery map: weights per appended row such that message x_u equals
// sum_r weights[r] * y_r.  Codebook arithmetic is modulo a prime; rational
// solvability is the proxy checked here.
struct LinearExpression {
    std::vector<BigRational> weights;  // one per appended row of D
};

inline std::vector<LinearExpression> solve_exact(const DecodingMatrix& d) {
    const std::size_t n = d.rows().size();
    const std::size_t l = d.cols();
    if (d.rank() != l) throw std::runtime_error("solve_exact: matrix rank below full");

    // Gauss-Jordan on [A | I_n] over the rationals.
    std::vector<std::vector<BigRational>> m(n, std::vector<BigRational>(l + n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < l; ++j) m[i][j] = d.rows()[i][j];
        m[i][l + i] = 1;
    }
    std::size_t row = 0;
    std::vector<std::size_t> pivot_row(l);
    for (std::size_t col = 0; col < l; ++col) {
        std::size_t p = row;
        while (p < n && m[p][col] == 0) ++p;
        if (p == n) throw std::runtime_error("solve_exact: elimination lost rank");
        std::swap(m[row], m[p]);
        const BigRational inv = m[row][col];
        for (std::size_t j = col; j < l + n; ++j) m[row][j] /= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || m[i][col] == 0) continue;
            const BigRational factor = m[i][col];
            for (std::size_t j = col; j < l + n; ++j) m[i][j] -= factor * m[row][j];
        }
        pivot_row[col] = row;
        ++row;
    }
    std::vector<LinearExpression> out(l);
    for (std::size_t u = 0; u < l; ++u) {
        out[u].weights.assign(m[pivot_row[u]].begin() + l, m[pivot_row[u]].end());
    }
    return out;
}

// Pretty form for CLI output: "x0 = 1/2*y0 + 1/2*y1".
inline std::string expression_to_string(const LinearExpression& e, const std::string& rhs_name = "y") {
    std::string s;
    for (std::size_t r = 0; r < e.weights.size(); ++r) {
        if (e.weights[r] == 0) continue;
        if (!s.empty()) s += " + ";
        s += e.weights[r].str() + "*" + rhs_name + std::to_string(r);
    }
    return s.empty() ? "0" : s;
}

}  // namespace cfsched
