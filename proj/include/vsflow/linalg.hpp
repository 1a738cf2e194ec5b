#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vsflow {

/// Square sparse matrix in compressed row storage. Column indices are
/// sorted and duplicate-free within each row.
struct SparseMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;  // size n+1
    std::vector<std::size_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return col.size(); }

    // Entry lookup, zero if absent. Linear scan within the row.
    double at(std::size_t i, std::size_t j) const;
};

/// Triplet accumulator. Duplicate (i,j) contributions are summed when
/// the matrix is compressed.
class SparseBuilder {
public:
    explicit SparseBuilder(std::size_t n) : n_(n) {}

    void add(std::size_t i, std::size_t j, double v);
    SparseMatrix compress() const;

    std::size_t size() const { return n_; }

private:
    struct Entry {
        std::size_t row, col;
        double val;
    };
    std::size_t n_;
    std::vector<Entry> entries_;
};

struct LinearSolveReport {
    bool ok = false;
    double rel_residual = 0.0;  // ||Ax-b|| / ||b||
    std::string message;
};

/// Direct sparse solve of A x = b. The contract is the residual bound
/// ||Ax - b||_2 <= rel_tol * ||b||_2; failure to reach it (singular or
/// near-singular factorization) is reported, not thrown. Handles the
/// indefinite saddle-point systems of the mixed discretization.
LinearSolveReport solve(const SparseMatrix& a, std::span<const double> b,
                        std::vector<double>& x, double rel_tol = 1e-10);

void matvec(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
void transpose_matvec(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

double norm2(std::span<const double> v);

}  // namespace vsflow
