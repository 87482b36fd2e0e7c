#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "canonic/matrix.hpp"

namespace canonic {

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

enum class IndexOrder { DiagFirst, RowMajor };

/// Bijection between flat indices 1..M_n and nondecreasing n-tuples over
/// {1..g}, with the multiplicity weights chi_i = prod_k (count of k in tuple i)!.
///
/// DiagFirst starts with the diagonal tuples (11,...,gg) and, for n=2,
/// continues (12,...,1g,23,...). For n=3 the first 6g-8 entries follow the
/// same published prefix; the remainder is lexicographic. RowMajor (n=2
/// only) lists pairs (i,j), i<=j, in row-major order so the pairs with
/// min(i,j)<=n' fill an initial segment for every n'.
struct SymIndexTable {
    int g = 0;
    int n = 0;
    IndexOrder order = IndexOrder::DiagFirst;
    std::vector<std::vector<int>> entries;  // nondecreasing n-tuples, 1-based values
    std::vector<std::uint64_t> chi;

    std::size_t size() const { return entries.size(); }

    /// Flat index (0-based) of a tuple given in any order.
    std::size_t flat(std::vector<int> tuple) const {
        std::sort(tuple.begin(), tuple.end());
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (entries[i] == tuple) return i;
        throw std::out_of_range("tuple not in table");
    }
};

namespace detail {

inline std::uint64_t tuple_chi(const std::vector<int>& t, int g) {
    std::uint64_t c = 1;
    for (int k = 1; k <= g; ++k) {
        std::uint64_t mult = std::count(t.begin(), t.end(), k);
        for (std::uint64_t i = 2; i <= mult; ++i) c *= i;
    }
    return c;
}

inline std::vector<std::vector<int>> nondecreasing_tuples(int g, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n, 1);
    while (true) {
        out.push_back(cur);
        int k = n - 1;
        while (k >= 0 && cur[k] == g) --k;
        if (k < 0) break;
        ++cur[k];
        for (int j = k + 1; j < n; ++j) cur[j] = cur[k];
    }
    return out;
}

}  // namespace detail

inline SymIndexTable build_sym_table(int g, int n, IndexOrder order) {
    if (g < 2) throw std::invalid_argument("sym table requires g >= 2");
    if (order == IndexOrder::RowMajor && n != 2)
        throw std::invalid_argument("RowMajor order is defined for n = 2 only");
    if (order == IndexOrder::DiagFirst && (n < 1 || n > 3))
        throw std::invalid_argument("DiagFirst order supports n in {1,2,3}");

    SymIndexTable t;
    t.g = g;
    t.n = n;
    t.order = order;

    if (order == IndexOrder::RowMajor) {
        for (int i = 1; i <= g; ++i)
            for (int j = i; j <= g; ++j) t.entries.push_back({i, j});
    } else if (n == 1) {
        for (int i = 1; i <= g; ++i) t.entries.push_back({i});
    } else if (n == 2) {
        for (int i = 1; i <= g; ++i) t.entries.push_back({i, i});
        for (int i = 1; i <= g; ++i)
            for (int j = i + 1; j <= g; ++j) t.entries.push_back({i, j});
    } else {
        // Published prefix of length 6g-8, then lexicographic remainder.
        for (int i = 1; i <= g; ++i) t.entries.push_back({i, i, i});
        for (int k = 3; k <= g; ++k) t.entries.push_back({1, 1, k});
        for (int k = 3; k <= g; ++k) t.entries.push_back({2, 2, k});
        for (int k = 1; k <= g; ++k) t.entries.push_back({1, 2, k});
        for (int k = 3; k <= g; ++k) t.entries.push_back({1, k, k});
        for (int k = 3; k <= g; ++k) t.entries.push_back({2, k, k});
        for (auto& e : t.entries) std::sort(e.begin(), e.end());
        auto all = detail::nondecreasing_tuples(g, 3);
        for (const auto& tup : all)
            if (std::find(t.entries.begin(), t.entries.end(), tup) == t.entries.end())
                t.entries.push_back(tup);
    }

    const std::uint64_t m_n = binomial(static_cast<std::uint64_t>(g + n - 1), n);
    if (t.entries.size() != m_n) throw std::logic_error("sym table size mismatch");
    for (const auto& e : t.entries) t.chi.push_back(detail::tuple_chi(e, g));
    return t;
}

/// Symmetrized n-th power of a g x g matrix:
///   (B...B)_{ij} = sum_{s in P_n} prod_m B[tuple_i[m]][tuple_j[s(m)]].
template <class F>
Matrix<F> sym_power(const Matrix<F>& b, const SymIndexTable& t) {
    if (b.rows() != static_cast<std::size_t>(t.g) || b.cols() != static_cast<std::size_t>(t.g))
        throw std::invalid_argument("sym_power: matrix does not match table genus");
    const std::size_t m = t.size();
    const int n = t.n;
    F zero = field_traits<F>::zero(b(0, 0));
    Matrix<F> out(m, m, zero);
    std::vector<int> perm(n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            std::iota(perm.begin(), perm.end(), 0);
            F acc = zero;
            do {
                F term = field_traits<F>::one(b(0, 0));
                for (int k = 0; k < n; ++k)
                    term *= b(t.entries[i][k] - 1, t.entries[j][perm[k]] - 1);
                acc += term;
            } while (std::next_permutation(perm.begin(), perm.end()));
            out(i, j) = acc;
        }
    return out;
}

/// Checks the index-sum identity: sum over I_g^n of f equals
/// sum_i chi_i^{-1} sum_{s in P_n} f(s-permuted tuple i); when f is
/// completely symmetric the inner sum collapses to n! f(tuple i).
/// f is a full table in row-major order over I_g^n (0-based lookup).
template <class F>
bool index_sum_check(int g, int n, const std::vector<F>& f_table, bool assume_symmetric = false) {
    SymIndexTable t = build_sym_table(g, n, IndexOrder::DiagFirst);
    F zero = field_traits<F>::zero(f_table.at(0));
    auto lookup = [&](const std::vector<int>& idx) {
        std::size_t flat = 0;
        for (int k = 0; k < n; ++k) flat = flat * g + (idx[k] - 1);
        return f_table.at(flat);
    };

    F lhs = zero;
    std::vector<int> idx(n, 1);
    while (true) {
        lhs += lookup(idx);
        int k = n - 1;
        while (k >= 0 && idx[k] == g) --k;
        if (k < 0) break;
        ++idx[k];
        for (int j = k + 1; j < n; ++j) idx[j] = 1;
    }

    F rhs = zero;
    std::vector<int> perm(n);
    for (std::size_t i = 0; i < t.size(); ++i) {
        F inner = zero;
        if (assume_symmetric) {
            std::uint64_t nfact = 1;
            for (int k = 2; k <= n; ++k) nfact *= k;
            F term = lookup(t.entries[i]);
            for (std::uint64_t k = 0; k < nfact; ++k) inner += term;
        } else {
            std::iota(perm.begin(), perm.end(), 0);
            do {
                std::vector<int> permuted(n);
                for (int k = 0; k < n; ++k) permuted[k] = t.entries[i][perm[k]];
                inner += lookup(permuted);
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        F chi_inv = field_traits<F>::one(zero);
        {
            F chi = zero;
            for (std::uint64_t k = 0; k < t.chi[i]; ++k) chi += field_traits<F>::one(zero);
            chi_inv = field_traits<F>::one(zero) / chi;
        }
        rhs += chi_inv * inner;
    }
    if constexpr (field_traits<F>::exact) {
        return lhs == rhs;
    } else {
        return field_traits<F>::pivot_weight(lhs - rhs) <=
               1e-10 * (1.0 + field_traits<F>::pivot_weight(lhs));
    }
}

/// Determinant identities of the symmetrized power: the chi-weighted powers
/// of B and B^{-1} have reciprocal determinants, and for n=2
/// det((BB) chi^{-1}) = (det B)^{g+1}. More generally the exponent is
/// (n/g) M_n, which is what the n=3 branch checks.
template <class F>
bool det_power_identity_check(const Matrix<F>& b, const SymIndexTable& t) {
    Matrix<F> binv = inverse(b);
    Matrix<F> p = sym_power(b, t);
    Matrix<F> q = sym_power(binv, t);
    const std::size_t m = t.size();
    F one = field_traits<F>::one(b(0, 0));
    auto chi_scale = [&](Matrix<F>& x) {
        for (std::size_t j = 0; j < m; ++j) {
            F chi = field_traits<F>::zero(one);
            for (std::uint64_t k = 0; k < t.chi[j]; ++k) chi += one;
            for (std::size_t i = 0; i < m; ++i) x(i, j) /= chi;
        }
    };
    chi_scale(p);
    chi_scale(q);
    F dp = det(p), dq = det(q);
    F db = det(b);
    const std::uint64_t exponent = static_cast<std::uint64_t>(t.n) * t.size() / t.g;
    F db_pow = one;
    for (std::uint64_t k = 0; k < exponent; ++k) db_pow *= db;
    if constexpr (field_traits<F>::exact) {
        return dp * dq == one && dp == db_pow;
    } else {
        double s = field_traits<F>::pivot_weight(db_pow);
        return field_traits<F>::pivot_weight(dp * dq - one) <= 1e-9 &&
               field_traits<F>::pivot_weight(dp - db_pow) <= 1e-9 * (1.0 + s);
    }
}

}  // namespace canonic
