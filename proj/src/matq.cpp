#include "bridged/matq.hpp"

#include <cassert>
#include <cstddef>

namespace bridged {

QMat qmat(size_t rows, size_t cols) { return QMat(rows, QVec(cols, Q(0))); }

QMat transpose(const QMat& a) {
  if (a.empty()) return {};
  QMat t = qmat(a[0].size(), a.size());
  for (size_t i = 0; i < a.size(); i++)
    for (size_t j = 0; j < a[i].size(); j++) t[j][i] = a[i][j];
  return t;
}

QMat matmul(const QMat& a, const QMat& b) {
  size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  QMat c = qmat(n, m);
  for (size_t i = 0; i < n; i++) {
    assert(a[i].size() == k);
    for (size_t t = 0; t < k; t++) {
      if (a[i][t] == 0) continue;
      for (size_t j = 0; j < m; j++) c[i][j] += a[i][t] * b[t][j];
    }
  }
  return c;
}

QVec matvec(const QMat& a, const QVec& x) {
  QVec y(a.size(), Q(0));
  for (size_t i = 0; i < a.size(); i++) {
    assert(a[i].size() == x.size());
    for (size_t j = 0; j < x.size(); j++)
      if (a[i][j] != 0) y[i] += a[i][j] * x[j];
  }
  return y;
}

// Row-reduce in place; returns pivot column per pivot row.
static std::vector<size_t> rref(QMat& a) {
  std::vector<size_t> pivots;
  if (a.empty()) return pivots;
  size_t rows = a.size(), cols = a[0].size(), r = 0;
  for (size_t c = 0; c < cols && r < rows; c++) {
    size_t p = r;
    while (p < rows && a[p][c] == 0) p++;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    Q inv = 1 / a[r][c];
    for (size_t j = c; j < cols; j++) a[r][j] *= inv;
    for (size_t i = 0; i < rows; i++) {
      if (i == r || a[i][c] == 0) continue;
      Q f = a[i][c];
      for (size_t j = c; j < cols; j++) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    r++;
  }
  return pivots;
}

size_t rank(QMat a) { return rref(a).size(); }

std::vector<QVec> kernel_basis(const QMat& a) {
  if (a.empty()) return {};
  size_t cols = a[0].size();
  QMat m = a;
  std::vector<size_t> pivots = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (size_t c : pivots) is_pivot[c] = true;
  std::vector<QVec> basis;
  for (size_t f = 0; f < cols; f++) {
    if (is_pivot[f]) continue;
    QVec v(cols, Q(0));
    v[f] = 1;
    for (size_t r = 0; r < pivots.size(); r++) v[pivots[r]] = -m[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

bool solve(QMat a, QVec b, QVec& x) {
  size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  for (size_t i = 0; i < rows; i++) a[i].push_back(b[i]);
  QMat m = a;
  std::vector<size_t> pivots = rref(m);
  // Inconsistent iff some pivot landed in the appended column.
  for (size_t c : pivots)
    if (c == cols) return false;
  x.assign(cols, Q(0));
  for (size_t r = 0; r < pivots.size(); r++) x[pivots[r]] = m[r][cols];
  return true;
}

int signature(QMat s) {
  size_t n = s.size();
  std::vector<bool> done(n, false);
  int sig = 0;
  auto clear_against = [&](size_t i) {
    // Congruence-eliminate row/col i against every not-yet-split index.
    for (size_t k = 0; k < n; k++) {
      if (done[k] || k == i || s[k][i] == 0) continue;
      Q f = s[k][i] / s[i][i];
      for (size_t j = 0; j < n; j++) s[k][j] -= f * s[i][j];
      for (size_t j = 0; j < n; j++) s[j][k] -= f * s[j][i];
    }
  };
  for (;;) {
    // Prefer a nonzero diagonal pivot.
    size_t i = n;
    for (size_t k = 0; k < n; k++)
      if (!done[k] && s[k][k] != 0) { i = k; break; }
    if (i < n) {
      clear_against(i);
      sig += sgn(s[i][i]) > 0 ? 1 : -1;
      done[i] = true;
      continue;
    }
    // All remaining diagonal entries vanish: find an off-diagonal coupling;
    // it splits off a hyperbolic pair (contributes +1 and -1, i.e. nothing).
    size_t a = n, b = n;
    for (size_t p = 0; p < n && a == n; p++) {
      if (done[p]) continue;
      for (size_t q = p + 1; q < n; q++)
        if (!done[q] && s[p][q] != 0) { a = p; b = q; break; }
    }
    if (a == n) break;  // remaining block is zero
    Q t = s[a][b];
    for (size_t k = 0; k < n; k++) {
      if (done[k] || k == a || k == b) continue;
      Q fa = s[k][b] / t, fb = s[k][a] / t;
      for (size_t j = 0; j < n; j++) s[k][j] -= fa * s[a][j] + fb * s[b][j];
      for (size_t j = 0; j < n; j++) s[j][k] -= fa * s[j][a] + fb * s[j][b];
    }
    done[a] = done[b] = true;
  }
  return sig;
}

}  // namespace bridged
