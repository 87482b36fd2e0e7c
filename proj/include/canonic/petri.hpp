#pragma once

#include <stdexcept>
#include <vector>

#include "canonic/curvemodel.hpp"
#include "canonic/symidx.hpp"

namespace canonic::petri {

struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// det of the submatrix of m given by (rows, cols).
template <class F>
F det_at(const Matrix<F>& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix<F> sub(rows.size(), cols.size(), field_traits<F>::zero(m(0, 0)));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) sub(r, c) = m(rows[r], cols[c]);
    return det(sub);
}

/// Normalize a basis against its values at the chosen columns:
/// out = block^{-1} * evals, so that out_i(col_j) = delta_ij.
template <class F>
Matrix<F> gamma_basis(const Matrix<F>& evals, const std::vector<int>& cols,
                      double tol = 1e-12) {
    const std::size_t n = evals.rows();
    if (cols.size() != n) throw std::invalid_argument("gamma_basis: need N columns");
    Matrix<F> block(n, n, field_traits<F>::zero(evals(0, 0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) block(i, j) = evals(i, cols[j]);
    return inverse(block, tol) * evals;
}

/// Constant ratio det(replacement at cols)/det(reference at cols), checked
/// for agreement between two disjoint column sets in the approximate field.
template <class F>
F ratio_det(const Matrix<F>& reference, const Matrix<F>& replacement,
            const std::vector<int>& colsA, const std::vector<int>& colsB,
            double rel_tol = 1e-8) {
    std::vector<int> all_rows(reference.rows());
    for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = static_cast<int>(i);
    F da = det_at(reference, all_rows, colsA);
    if (field_traits<F>::is_zero(da, rel_tol)) throw ConditioningError("reference determinant too small");
    F ra = det_at(replacement, all_rows, colsA) / da;
    if constexpr (!field_traits<F>::exact) {
        F db = det_at(reference, all_rows, colsB);
        if (field_traits<F>::is_zero(db, rel_tol)) throw ConditioningError("reference determinant too small");
        F rb = det_at(replacement, all_rows, colsB) / db;
        double scale = field_traits<F>::pivot_weight(ra) + field_traits<F>::pivot_weight(rb) + 1.0;
        if (field_traits<F>::pivot_weight(ra - rb) > rel_tol * scale)
            throw ConditioningError("constant-ratio check failed between column sets");
    }
    return ra;
}

/// psi-tilde: the N x M matrix of row-replacement determinant ratios of the
/// candidate rows against the leading N basis rows, computed at colsA and
/// cross-checked at colsB.
template <class F>
Matrix<F> psi_tilde(const Matrix<F>& v, std::size_t N, const std::vector<int>& colsA,
                    const std::vector<int>& colsB, double rel_tol = 1e-8) {
    const std::size_t M = v.rows();
    auto solve_at = [&](const std::vector<int>& cols) {
        // column j of the result solves (V_S^T) c = v_j(S): Cramer gives the
        // row-replacement ratios
        Matrix<F> vs_t(N, N, field_traits<F>::zero(v(0, 0)));
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) vs_t(i, j) = v(j, cols[i]);
        Matrix<F> rhs(N, M, field_traits<F>::zero(v(0, 0)));
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < M; ++j) rhs(i, j) = v(j, cols[i]);
        return inverse(vs_t, 1e-13) * rhs;
    };
    Matrix<F> psi = solve_at(colsA);
    if constexpr (!field_traits<F>::exact) {
        Matrix<F> psi_b = solve_at(colsB);
        double scale = psi.max_weight() + psi_b.max_weight() + 1.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < M; ++j)
                if (field_traits<F>::pivot_weight(psi(i, j) - psi_b(i, j)) > rel_tol * scale)
                    throw ConditioningError("psi-tilde disagrees between column sets");
    }
    return psi;
}

/// Coefficient matrix of the normalized basis in an arbitrary one:
/// X_{ji} = chi_j^{-1} (sym_power of [eta]^{-1})_{ij}, so that the
/// normalized products expand as w_i = sum_j X_{ji} (eta products)_j.
template <class F>
Matrix<F> coef_matrix(const Matrix<F>& eta_p, const SymIndexTable& t, double tol = 1e-12) {
    auto sp = sym_power(inverse(eta_p, tol), t);
    Matrix<F> x(t.size(), t.size(), field_traits<F>::zero(eta_p(0, 0)));
    for (std::size_t j = 0; j < t.size(); ++j) {
        F chi = field_traits<F>::zero(eta_p(0, 0));
        for (std::uint64_t k = 0; k < t.chi[j]; ++k) chi += field_traits<F>::one(eta_p(0, 0));
        for (std::size_t i = 0; i < t.size(); ++i) x(j, i) = sp(i, j) / chi;
    }
    return x;
}

/// Relation rows by determinant contraction. prods holds the eta-product
/// samples (M_t x K) and coef the expansion matrix (w_c = sum_m coef(m,c)
/// prods_m). For each label i in rel_idx the output row j runs over I_{M_t}:
///   det [ w_c(xcols) over c in basis+{i} ; coef(j, c) ] / det w_basis(xcols).
/// Equals the multi-index minor sum (see minor_relations_naive) divided
/// by N_b! via Cauchy-Binet.
template <class F>
Matrix<F> minor_relations(const Matrix<F>& prods, const Matrix<F>& coef,
                          const std::vector<int>& basis_idx, const std::vector<int>& rel_idx,
                          const std::vector<int>& xcols) {
    const std::size_t Mt = prods.rows(), Nb = basis_idx.size();
    if (xcols.size() != Nb) throw std::invalid_argument("minor_relations: need N_b columns");
    F zero = field_traits<F>::zero(prods(0, 0));
    // w values at the sample columns: w(c, r) = sum_m coef(m, c) prods(m, xcols[r])
    Matrix<F> w(Mt, Nb, zero);
    for (std::size_t c = 0; c < Mt; ++c)
        for (std::size_t r = 0; r < Nb; ++r)
            for (std::size_t m = 0; m < Mt; ++m)
                w(c, r) += coef(m, c) * prods(m, xcols[r]);
    std::vector<int> wcols(Nb);
    for (std::size_t r = 0; r < Nb; ++r) wcols[r] = static_cast<int>(r);
    F denom = det_at(w, basis_idx, wcols);
    if (field_traits<F>::is_zero(denom, 1e-10)) throw ConditioningError("basis determinant too small");

    Matrix<F> out(rel_idx.size(), Mt, zero);
    for (std::size_t ri = 0; ri < rel_idx.size(); ++ri) {
        std::vector<int> top = basis_idx;
        top.push_back(rel_idx[ri]);
        Matrix<F> h(Nb + 1, Nb + 1, zero);
        for (std::size_t q = 0; q <= Nb; ++q)
            for (std::size_t r = 0; r < Nb; ++r) h(r, q) = w(top[q], r);
        for (std::size_t j = 0; j < Mt; ++j) {
            for (std::size_t q = 0; q <= Nb; ++q) h(Nb, q) = coef(j, top[q]);
            out(ri, j) = det(h) / denom;
        }
    }
    return out;
}

/// Reference expansion of the same relations: the sum over all ordered
/// N_b-tuples (k_1..k_N) of minor(coef; rows k+{j}, cols basis+{i}) times
/// det(prods at k rows, xcols) / det w_basis(xcols). Exponential cost; for
/// oracle tests on small shapes only.
template <class F>
Matrix<F> minor_relations_naive(const Matrix<F>& prods, const Matrix<F>& coef,
                                const std::vector<int>& basis_idx,
                                const std::vector<int>& rel_idx,
                                const std::vector<int>& xcols) {
    const std::size_t Mt = prods.rows(), Nb = basis_idx.size();
    F zero = field_traits<F>::zero(prods(0, 0));
    Matrix<F> w(Mt, Nb, zero);
    for (std::size_t c = 0; c < Mt; ++c)
        for (std::size_t r = 0; r < Nb; ++r)
            for (std::size_t m = 0; m < Mt; ++m)
                w(c, r) += coef(m, c) * prods(m, xcols[r]);
    std::vector<int> wcols(Nb);
    for (std::size_t r = 0; r < Nb; ++r) wcols[r] = static_cast<int>(r);
    F denom = det_at(w, basis_idx, wcols);

    Matrix<F> out(rel_idx.size(), Mt, zero);
    std::vector<int> k(Nb, 0);
    for (std::size_t ri = 0; ri < rel_idx.size(); ++ri) {
        std::vector<int> top = basis_idx;
        top.push_back(rel_idx[ri]);
        for (std::size_t j = 0; j < Mt; ++j) {
            F acc = zero;
            std::fill(k.begin(), k.end(), 0);
            while (true) {
                // minor of coef with rows (k_1..k_N, j) and columns top
                Matrix<F> mi(Nb + 1, Nb + 1, zero);
                for (std::size_t q = 0; q <= Nb; ++q) {
                    for (std::size_t r = 0; r < Nb; ++r) mi(r, q) = coef(k[r], top[q]);
                    mi(Nb, q) = coef(j, top[q]);
                }
                std::vector<int> krows(k.begin(), k.end());
                acc += det(mi) * det_at(prods, krows, xcols);
                std::size_t d = 0;
                while (d < Nb && ++k[d] == static_cast<int>(Mt)) k[d++] = 0;
                if (d == Nb) break;
            }
            out(ri, j) = acc / denom;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Curve pipeline (complex samples).
// ---------------------------------------------------------------------------

/// Product rows of a basis along a symmetric index table (pointwise).
Matrix<Cplx> product_rows(const Matrix<Cplx>& basis, const SymIndexTable& t);

/// Greedy well-conditioned column selection (QR with column pivoting),
/// skipping the excluded columns.
std::vector<int> pivot_columns(const Matrix<Cplx>& m, int count,
                               const std::vector<int>& exclude = {});

/// All distinguished-basis and relation data for a genus-4 sample set.
struct CurvePetri {
    std::vector<int> p_cols;        // g normalization points (sample columns)
    std::vector<int> colsA, colsB;  // N-column determinant sets (disjoint)
    std::vector<int> cols3;         // N_3-column set for the cubic step
    Matrix<Cplx> sigma;             // g x K normalized basis
    Matrix<Cplx> v;                 // M x K sigma-products
    Matrix<Cplx> omega2;            // M x K omega-products
    Matrix<Cplx> omega3;            // M_3 x K
    Matrix<Cplx> phi;               // N_3 x K cubic basis rows
    Matrix<Cplx> psi;               // N x M
    Matrix<Cplx> X;                 // M x M, eta = omega
    Matrix<Cplx> Y;                 // M_3 x M_3, eta = omega
    Matrix<Cplx> C;                 // (M-N) x M quadric relations
    Matrix<Cplx> D;                 // (g-3) x M_3 cubic relations
    Matrix<Cplx> B;                 // M x N expansion of omega-products in v
    bool basis_ok = false;          // rank of the leading N v-rows
    bool cubic_fallback = false;    // pivot fallback was needed for phi
    std::vector<int> phi_rows;      // table-row indices of the cubic basis
};

CurvePetri build_curve_petri(const curvemodel::SampleSet& set);

/// Structure constants of the multiplication maps between the distinguished
/// bases of weights p, q, p+q (least-squares / minimum-norm over all sample
/// columns). For p == q the product index set is symmetrized (i <= j).
struct StructureConstants {
    int p = 0, q = 0;
    std::vector<std::pair<int, int>> pairs;  // product index set
    Matrix<Cplx> B;  // |pairs| x N_{p+q}
    Matrix<Cplx> D;  // N_{p+q} x |pairs| (minimum-norm)
    Matrix<Cplx> C;  // (|pairs| - N_{p+q}) x |pairs| product-kernel rows
};

StructureConstants structure_constants(int p, int q, const Matrix<Cplx>& basis_p,
                                       const Matrix<Cplx>& basis_q,
                                       const Matrix<Cplx>& basis_pq);

}  // namespace canonic::petri
