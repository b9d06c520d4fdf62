#pragma once
#include <gmpxx.h>

#include <vector>

namespace bridged {

using Q = mpq_class;
using QVec = std::vector<Q>;
using QMat = std::vector<QVec>;  // row-major, rectangular

QMat qmat(size_t rows, size_t cols);
QMat transpose(const QMat& a);
QMat matmul(const QMat& a, const QMat& b);
QVec matvec(const QMat& a, const QVec& x);

size_t rank(QMat a);
// Basis of the right kernel {x : a x = 0}; each entry is one basis vector.
std::vector<QVec> kernel_basis(const QMat& a);
// One solution of a x = b; returns false if inconsistent.
bool solve(QMat a, QVec b, QVec& x);
// Signature (positives minus negatives) of a symmetric rational matrix,
// computed by exact congruence pivoting. Degenerate input is fine; the
// radical contributes nothing.
int signature(QMat s);

}  // namespace bridged
