#include "vsflow/linalg.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vsflow {

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (col[k] == j) return val[k];
    return 0.0;
}

void SparseBuilder::add(std::size_t i, std::size_t j, double v) {
    if (i >= n_ || j >= n_) throw std::out_of_range("SparseBuilder::add: index out of range");
    entries_.push_back({i, j, v});
}

SparseMatrix SparseBuilder::compress() const {
    std::vector<Entry> sorted = entries_;
    std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.n = n_;
    m.row_ptr.assign(n_ + 1, 0);
    m.col.reserve(sorted.size());
    m.val.reserve(sorted.size());
    for (std::size_t k = 0; k < sorted.size();) {
        std::size_t i = sorted[k].row, j = sorted[k].col;
        double s = 0.0;
        while (k < sorted.size() && sorted[k].row == i && sorted[k].col == j) s += sorted[k++].val;
        m.col.push_back(j);
        m.val.push_back(s);
        m.row_ptr[i + 1] = m.col.size();
    }
    // rows with no entries keep the previous offset
    for (std::size_t i = 1; i <= n_; ++i)
        m.row_ptr[i] = std::max(m.row_ptr[i], m.row_ptr[i - 1]);
    return m;
}

void matvec(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
    if (x.size() != a.n || y.size() != a.n) throw std::invalid_argument("matvec: size mismatch");
    for (std::size_t i = 0; i < a.n; ++i) {
        double s = 0.0;
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
        y[i] = s;
    }
}

void transpose_matvec(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
    if (x.size() != a.n || y.size() != a.n) throw std::invalid_argument("transpose_matvec: size mismatch");
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) y[a.col[k]] += a.val[k] * x[i];
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

LinearSolveReport solve(const SparseMatrix& a, std::span<const double> b,
                        std::vector<double>& x, double rel_tol) {
    LinearSolveReport rep;
    if (b.size() != a.n) throw std::invalid_argument("solve: rhs size mismatch");

    using Sp = Eigen::SparseMatrix<double>;
    Sp m(static_cast<Eigen::Index>(a.n), static_cast<Eigen::Index>(a.n));
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(a.nnz());
        for (std::size_t i = 0; i < a.n; ++i)
            for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
                trip.emplace_back(static_cast<int>(i), static_cast<int>(a.col[k]), a.val[k]);
        m.setFromTriplets(trip.begin(), trip.end());
    }
    m.makeCompressed();

    Eigen::SparseLU<Sp> lu;
    lu.analyzePattern(m);
    lu.factorize(m);
    if (lu.info() != Eigen::Success) {
        rep.message = "factorization failed (singular or structurally deficient matrix)";
        return rep;
    }

    Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd xv = lu.solve(bv);
    if (lu.info() != Eigen::Success) {
        rep.message = "back substitution failed";
        return rep;
    }

    const double bn = bv.norm();
    const double rn = (m * xv - bv).norm();
    rep.rel_residual = bn > 0.0 ? rn / bn : rn;
    if (!std::isfinite(rep.rel_residual) || rep.rel_residual > rel_tol) {
        rep.message = "residual bound not met (near-singular matrix)";
        return rep;
    }

    x.assign(xv.data(), xv.data() + xv.size());
    rep.ok = true;
    return rep;
}

}  // namespace vsflow
