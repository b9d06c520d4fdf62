#include "bridged/modular.hpp"

#include <cassert>
#include <stdexcept>

namespace bridged {

bool cyc_solve(CMat a, CVec b, CVec& x) {
  size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  for (size_t i = 0; i < rows; i++) a[i].push_back(b[i]);
  size_t r = 0;
  std::vector<size_t> pivots;
  for (size_t c = 0; c <= cols && r < rows; c++) {
    size_t p = r;
    while (p < rows && a[p][c].is_zero()) p++;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    Cyc inv = a[r][c].inv();
    for (size_t j = c; j <= cols; j++) a[r][j] = a[r][j] * inv;
    for (size_t i = 0; i < rows; i++) {
      if (i == r || a[i][c].is_zero()) continue;
      Cyc f = a[i][c];
      for (size_t j = c; j <= cols; j++) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    r++;
  }
  for (size_t c : pivots)
    if (c == cols) return false;
  x.assign(cols, Cyc());
  for (size_t i = 0; i < pivots.size(); i++) x[pivots[i]] = a[i][cols];
  return true;
}

bool cyc_invertible(CMat a) {
  size_t n = a.size(), r = 0;
  for (size_t c = 0; c < n && r < n; c++) {
    size_t p = r;
    while (p < n && a[p][c].is_zero()) p++;
    if (p == n) continue;
    std::swap(a[p], a[r]);
    Cyc inv = a[r][c].inv();
    for (size_t j = c; j < n; j++) a[r][j] = a[r][j] * inv;
    for (size_t i = 0; i < n; i++) {
      if (i == r || a[i][c].is_zero()) continue;
      Cyc f = a[i][c];
      for (size_t j = c; j < n; j++) a[i][j] -= f * a[r][j];
    }
    r++;
  }
  return r == n;
}

CMat cyc_mul(const CMat& a, const CMat& b) {
  size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  CMat c(n, CVec(m, Cyc()));
  for (size_t i = 0; i < n; i++)
    for (size_t t = 0; t < k; t++) {
      if (a[i][t].is_zero()) continue;
      for (size_t j = 0; j < m; j++)
        if (!b[t][j].is_zero()) c[i][j] += a[i][t] * b[t][j];
    }
  return c;
}

namespace {

void finish(ModularData& m) {
  // Lift everything to the common conductor and derive the Gauss sums.
  for (auto& t : m.theta) t = t.lift(m.conductor);
  for (auto& d : m.dim) d = d.lift(m.conductor);
  for (auto& row : m.S)
    for (auto& e : row) e = e.lift(m.conductor);
  m.D2 = Cyc::zero(m.conductor);
  m.delta_plus = Cyc::zero(m.conductor);
  m.delta_minus = Cyc::zero(m.conductor);
  for (int j = 0; j < m.r; j++) {
    Cyc d2 = m.dim[j] * m.dim[j];
    m.D2 += d2;
    m.delta_plus += m.theta[j] * d2;
    m.delta_minus += m.theta[j].inv() * d2;
  }
  if (m.D * m.D != m.D2)
    throw std::runtime_error("fixture " + m.name + ": D^2 mismatch");
  if (m.D.approx().real() <= 0)
    throw std::runtime_error("fixture " + m.name + ": D not positive");
  for (int i = 0; i < m.r; i++) {
    if (m.S[0][i] != m.dim[i])
      throw std::runtime_error("fixture " + m.name + ": S row 0 != dim");
    for (int j = 0; j < m.r; j++)
      if (m.S[i][j] != m.S[j][i])
        throw std::runtime_error("fixture " + m.name + ": S not symmetric");
  }
}

}  // namespace

QForm cyclic_qform(long n, const Q& coef) {
  // Well-definedness on Z/n: coef*2n and coef*n^2 must be integers.
  if (Q(coef * 2 * n).get_den() != 1 || Q(coef * n * n).get_den() != 1)
    throw std::runtime_error("q-form coefficient " + coef.get_str() +
                             " is not well defined on Z/" + std::to_string(n));
  QForm f;
  f.A.mods = {n};
  f.name = "q=" + coef.get_str() + "*a2";
  f.qv.resize(n);
  for (long a = 0; a < n; a++) f.qv[a] = mod1(coef * a * a);
  return f;
}

QForm default_qform(const AbGroup& A) {
  // Orthogonal sum of the default cyclic forms on each factor.
  QForm f;
  f.A = A;
  f.name = "default";
  long n = A.order();
  f.qv.resize(n);
  for (long i = 0; i < n; i++) {
    auto e = A.element(i);
    Q s = 0;
    for (size_t k = 0; k < A.mods.size(); k++) {
      long m = A.mods[k];
      s += (m % 2 == 0) ? Q(e[k] * e[k], 2 * m) : Q(e[k] * e[k], m);
    }
    f.qv[i] = mod1(s);
  }
  return f;
}

QForm semion_qform() { return cyclic_qform(2, Q(1, 4)); }

QForm hyperbolic_qform(long n) {
  QForm f;
  f.A.mods = {n, n};
  f.name = "hyperbolic";
  f.qv.resize(n * n);
  for (long a = 0; a < n; a++)
    for (long b = 0; b < n; b++) f.qv[a * n + b] = mod1(Q(a * b, n));
  return f;
}

ModularData make_pointed(const QForm& qf, const std::string& name) {
  if (!qf.is_quadratic())
    throw std::runtime_error("q-form is not quadratic on " + qf.A.str());
  ModularData m;
  m.name = name;
  long n = qf.A.order();
  if (n > 64) throw std::runtime_error("pointed group order above 64");
  m.r = (int)n;
  // Conductor: hosts all q- and b-phases plus sqrt(|A|).
  long N = 1;
  for (long i = 0; i < n; i++)
    N = lcm_long(N, qf.qv[i].get_den().get_si());
  for (long i = 0; i < n; i++)
    for (long j = 0; j < n; j++)
      N = lcm_long(N, qf.b(qf.A.element(i), qf.A.element(j)).get_den().get_si());
  N = lcm_long(N, sqrt_conductor(n));
  m.conductor = (int)N;
  m.dual.resize(n);
  m.theta.resize(n);
  m.dim.assign(n, Cyc::one(m.conductor));
  m.S.assign(n, CVec(n, Cyc()));
  for (long i = 0; i < n; i++) {
    auto x = qf.A.element(i);
    m.dual[i] = (int)qf.A.index_of(qf.A.neg(x));
    m.theta[i] = Cyc::phase(qf.qv[i], m.conductor);
    for (long j = 0; j < n; j++)
      m.S[i][j] = Cyc::phase(qf.b(x, qf.A.element(j)), m.conductor);
  }
  m.fusion.assign(n, std::vector<std::vector<long>>(n, std::vector<long>(n, 0)));
  for (long i = 0; i < n; i++)
    for (long j = 0; j < n; j++)
      m.fusion[i][j][qf.A.index_of(qf.A.add(qf.A.element(i), qf.A.element(j)))] = 1;
  m.D = sqrt_int(n, m.conductor);
  m.pointed = qf;
  finish(m);
  return m;
}

ModularData make_fibonacci() {
  // Labels {1, t}, dims (1, phi), theta = (1, zeta_5^2); conductor 20 so the
  // positive root D = 2 sin(2 pi / 5) is available.
  ModularData m;
  m.name = "fib";
  m.conductor = 20;
  m.r = 2;
  m.dual = {0, 1};
  Cyc phi = -(Cyc::root(5, 2) + Cyc::root(5, 3));
  m.dim = {Cyc::one(20), phi.lift(20)};
  m.theta = {Cyc::one(20), Cyc::root(5, 2).lift(20)};
  m.S = {{m.dim[0], m.dim[1]}, {m.dim[1], -Cyc::one(20)}};
  m.fusion.assign(2, std::vector<std::vector<long>>(2, std::vector<long>(2, 0)));
  m.fusion[0][0][0] = m.fusion[0][1][1] = m.fusion[1][0][1] = 1;
  m.fusion[1][1][0] = m.fusion[1][1][1] = 1;  // t*t = 1 + t
  // D = -i (zeta_5 - zeta_5^4) = 2 sin(2 pi / 5) > 0
  m.D = Cyc::root(20, 15) * (Cyc::root(20, 4) - Cyc::root(20, 16));
  finish(m);
  return m;
}

ModularData make_ising() {
  // Labels {1, s, psi}, dims (1, sqrt 2, 1), theta = (1, zeta_16, -1).
  ModularData m;
  m.name = "ising";
  m.conductor = 16;
  m.r = 3;
  m.dual = {0, 1, 2};
  Cyc rt2 = Cyc::root(16, 2) + Cyc::root(16, 14);
  Cyc one = Cyc::one(16);
  m.dim = {one, rt2, one};
  m.theta = {one, Cyc::root(16, 1), -one};
  m.S = {{one, rt2, one}, {rt2, Cyc::zero(16), -rt2}, {one, -rt2, one}};
  m.fusion.assign(3, std::vector<std::vector<long>>(3, std::vector<long>(3, 0)));
  m.fusion[0][0][0] = m.fusion[0][1][1] = m.fusion[0][2][2] = 1;
  m.fusion[1][0][1] = m.fusion[2][0][2] = 1;
  m.fusion[1][1][0] = m.fusion[1][1][2] = 1;  // s*s = 1 + psi
  m.fusion[1][2][1] = m.fusion[2][1][1] = 1;  // s*psi = s
  m.fusion[2][2][0] = 1;                      // psi*psi = 1
  m.D = Cyc(Q(2), 16);
  finish(m);
  return m;
}

std::optional<CVec> solve_dhat(const ModularData& m) {
  CVec e0(m.r, Cyc::zero(m.conductor)), x;
  e0[0] = Cyc::one(m.conductor);
  // S is symmetric, so sum_j dhat(j) S[j][i] = (S dhat)(i).
  if (!cyc_solve(m.S, e0, x)) return std::nullopt;
  return x;
}

ModularityReport modularity_report(const ModularData& m) {
  ModularityReport rep;
  auto dhat = solve_dhat(m);
  rep.has_dhat = dhat.has_value();
  rep.s_invertible = cyc_invertible(m.S);
  rep.dim_column = true;
  for (int i = 0; i < m.r && rep.dim_column; i++) {
    Cyc col = Cyc::zero(m.conductor);
    for (int j = 0; j < m.r; j++) col += m.dim[j] * m.S[j][i];
    if (col != (i == 0 ? m.D2 : Cyc::zero(m.conductor))) rep.dim_column = false;
  }
  if (rep.has_dhat) {
    CMat y(m.r, CVec(m.r, Cyc::zero(m.conductor)));
    for (int k = 0; k < m.r; k++) y[k][k] = (*dhat)[k] * m.dim[k].inv();
    CMat sys = cyc_mul(cyc_mul(m.S, y), m.S);
    rep.sys_c = true;
    for (int i = 0; i < m.r && rep.sys_c; i++)
      for (int j = 0; j < m.r; j++) {
        Cyc want = (j == m.dual[i]) ? Cyc::one(m.conductor) : Cyc::zero(m.conductor);
        if (sys[i][j] != want) { rep.sys_c = false; break; }
      }
  }
  return rep;
}

bool verlinde_holds(const ModularData& m) {
  for (int k = 0; k < m.r; k++) {
    if (m.dim[k].is_zero()) return false;
    Cyc dk = m.dim[k].inv();
    for (int i = 0; i < m.r; i++)
      for (int j = 0; j < m.r; j++) {
        Cyc lhs = dk * m.S[i][k] * m.S[j][k];
        Cyc rhs = Cyc::zero(m.conductor);
        for (int p = 0; p < m.r; p++)
          if (m.fusion[i][j][p])
            rhs += Cyc(Q(m.fusion[i][j][p]), 1) * m.S[p][k];
        if (lhs != rhs) return false;
      }
  }
  return true;
}

CVec xi_vector(const ModularData& m) {
  if (!m.is_pointed())
    throw std::runtime_error("xi_vector needs a pointed datum");
  const QForm& qf = *m.pointed;
  CVec xi(m.r, Cyc::zero(m.conductor));
  Cyc dinv = m.D.inv();
  for (int a = 0; a < m.r; a++) {
    if (m.dual[a] != a) continue;  // only 2a = 0 contributes
    Cyc rho = m.theta[a] * m.theta[a];
    Q rv = rho.rational();  // theta^2 in {+1,-1} when 2a = 0
    assert(rv == 1 || rv == -1);
    (void)qf;
    xi[a] = dinv * rho;
  }
  return xi;
}

}  // namespace bridged
