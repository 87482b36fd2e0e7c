#include "canonic/petri.hpp"

#include <Eigen/Dense>

#include <algorithm>

namespace canonic::petri {

namespace {

Eigen::MatrixXcd to_eigen(const Matrix<Cplx>& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

Matrix<Cplx> from_eigen(const Eigen::MatrixXcd& e) {
    Matrix<Cplx> m(e.rows(), e.cols(), Cplx{});
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

const SymIndexTable& table2() {
    static const SymIndexTable t = build_sym_table(4, 2, IndexOrder::DiagFirst);
    return t;
}

const SymIndexTable& table3() {
    static const SymIndexTable t = build_sym_table(4, 3, IndexOrder::DiagFirst);
    return t;
}

Matrix<Cplx> submatrix_rows(const Matrix<Cplx>& m, const std::vector<int>& rows) {
    Matrix<Cplx> out(rows.size(), m.cols(), Cplx{});
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(rows[r], c);
    return out;
}

Matrix<Cplx> submatrix_cols(const Matrix<Cplx>& m, const std::vector<int>& cols) {
    Matrix<Cplx> out(m.rows(), cols.size(), Cplx{});
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(r, cols[c]);
    return out;
}

}  // namespace

Matrix<Cplx> product_rows(const Matrix<Cplx>& basis, const SymIndexTable& t) {
    const std::size_t K = basis.cols();
    Matrix<Cplx> out(t.size(), K, Cplx{});
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t c = 0; c < K; ++c) {
            Cplx prod(1.0, 0.0);
            for (int e : t.entries[i]) prod *= basis(e - 1, c);
            out(i, c) = prod;
        }
    return out;
}

std::vector<int> pivot_columns(const Matrix<Cplx>& m, int count, const std::vector<int>& exclude) {
    std::vector<int> allowed;
    for (std::size_t c = 0; c < m.cols(); ++c)
        if (std::find(exclude.begin(), exclude.end(), static_cast<int>(c)) == exclude.end())
            allowed.push_back(static_cast<int>(c));
    if (static_cast<int>(allowed.size()) < count)
        throw ConditioningError("not enough sample columns available");
    Eigen::MatrixXcd sub(m.rows(), allowed.size());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < allowed.size(); ++c) sub(r, c) = m(r, allowed[c]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(sub);
    auto perm = qr.colsPermutation().indices();
    std::vector<int> out;
    for (int k = 0; k < count; ++k) out.push_back(allowed[perm[k]]);
    std::sort(out.begin(), out.end());
    return out;
}

CurvePetri build_curve_petri(const curvemodel::SampleSet& set) {
    const auto& t2 = table2();
    const auto& t3 = table3();
    const int g = 4, N = 9, N3 = 15;
    const std::size_t K = set.size();
    if (K < 30) throw ConditioningError("need at least 30 sample points");

    CurvePetri out;
    const Matrix<Cplx>& omega = set.omega_evals;
    out.p_cols = pivot_columns(omega, g);
    out.sigma = gamma_basis(omega, out.p_cols);
    out.v = product_rows(out.sigma, t2);
    out.omega2 = product_rows(omega, t2);
    out.omega3 = product_rows(omega, t3);

    // leading-N rank verdict (quadric products of the normalized basis)
    std::vector<int> firstN(N);
    for (int i = 0; i < N; ++i) firstN[i] = i;
    Matrix<Cplx> v_lead = submatrix_rows(out.v, firstN);
    out.basis_ok = rank_nullspace(v_lead, 1e-8).rank == static_cast<std::size_t>(N);
    if (!out.basis_ok) return out;

    std::vector<int> used = out.p_cols;
    out.colsA = pivot_columns(v_lead, N, used);
    used.insert(used.end(), out.colsA.begin(), out.colsA.end());
    out.colsB = pivot_columns(v_lead, N, used);

    out.psi = psi_tilde(out.v, N, out.colsA, out.colsB);

    Matrix<Cplx> omega_p(g, g, Cplx{});
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) omega_p(i, j) = omega(i, out.p_cols[j]);
    out.X = coef_matrix(omega_p, t2);
    out.Y = coef_matrix(omega_p, t3);

    out.C = minor_relations(out.omega2, out.X, firstN, {N}, out.colsA);

    // expansion of the omega-products in the v rows, solved at colsA
    {
        Matrix<Cplx> v9 = submatrix_cols(v_lead, out.colsA);
        Matrix<Cplx> rhs = submatrix_cols(out.omega2, out.colsA);
        out.B = rhs * inverse(v9, 1e-12);
    }

    // cubic basis: first N3 triple-product rows of sigma; pivot fallback when
    // that block is rank deficient
    Matrix<Cplx> v3 = product_rows(out.sigma, t3);
    out.phi_rows.assign(N3, 0);
    for (int i = 0; i < N3; ++i) out.phi_rows[i] = i;
    {
        Matrix<Cplx> cand = submatrix_rows(v3, out.phi_rows);
        if (rank_nullspace(cand, 1e-8).rank != static_cast<std::size_t>(N3)) {
            out.cubic_fallback = true;
            // select well-conditioned rows by pivoting on the transpose
            Matrix<Cplx> v3t(v3.cols(), v3.rows(), Cplx{});
            for (std::size_t i = 0; i < v3.rows(); ++i)
                for (std::size_t j = 0; j < v3.cols(); ++j) v3t(j, i) = v3(i, j);
            out.phi_rows = pivot_columns(v3t, N3);
        }
    }
    out.phi = submatrix_rows(v3, out.phi_rows);
    out.cols3 = pivot_columns(out.phi, N3, out.p_cols);

    // relation labels: the designated extra row when available, otherwise the
    // complement of the selected basis
    std::vector<int> rel3;
    for (std::size_t i = 0; i < t3.size() && rel3.empty(); ++i) {
        int cand = out.cubic_fallback ? static_cast<int>(i) : N3;
        if (std::find(out.phi_rows.begin(), out.phi_rows.end(), cand) == out.phi_rows.end())
            rel3.push_back(cand);
    }
    out.D = minor_relations(out.omega3, out.Y, out.phi_rows, rel3, out.cols3);
    return out;
}

StructureConstants structure_constants(int p, int q, const Matrix<Cplx>& basis_p,
                                       const Matrix<Cplx>& basis_q,
                                       const Matrix<Cplx>& basis_pq) {
    const std::size_t K = basis_p.cols();
    if (basis_q.cols() != K || basis_pq.cols() != K)
        throw std::invalid_argument("structure_constants: column counts differ");

    StructureConstants out;
    out.p = p;
    out.q = q;
    for (std::size_t i = 0; i < basis_p.rows(); ++i)
        for (std::size_t j = (p == q ? i : 0); j < basis_q.rows(); ++j)
            out.pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));

    Matrix<Cplx> prods(out.pairs.size(), K, Cplx{});
    for (std::size_t r = 0; r < out.pairs.size(); ++r)
        for (std::size_t c = 0; c < K; ++c)
            prods(r, c) = basis_p(out.pairs[r].first, c) * basis_q(out.pairs[r].second, c);

    Eigen::MatrixXcd prods_t = to_eigen(prods).transpose();
    Eigen::MatrixXcd bpq_t = to_eigen(basis_pq).transpose();

    // least-squares expansion of each product in the weight-(p+q) basis
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod_b(bpq_t);
    out.B = from_eigen(Eigen::MatrixXcd(cod_b.solve(prods_t).transpose()));

    // minimum-norm expansion of the basis in the products
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod_d(prods_t);
    out.D = from_eigen(Eigen::MatrixXcd(cod_d.solve(bpq_t).transpose()));

    // product-kernel rows: left nullspace of the product sample matrix
    Matrix<Cplx> pt(prods.cols(), prods.rows(), Cplx{});
    for (std::size_t i = 0; i < prods.rows(); ++i)
        for (std::size_t j = 0; j < prods.cols(); ++j) pt(j, i) = prods(i, j);
    auto rn = rank_nullspace(pt, 1e-8);
    out.C = Matrix<Cplx>(rn.nullspace.size(), out.pairs.size(), Cplx{});
    for (std::size_t r = 0; r < rn.nullspace.size(); ++r)
        for (std::size_t c = 0; c < out.pairs.size(); ++c) out.C(r, c) = rn.nullspace[r][c];
    return out;
}

}  // namespace canonic::petri
