#include "bridged/cyclotomic.hpp"

#include <cassert>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bridged/matq.hpp"

namespace bridged {

int phi_of(int n) {
  assert(n >= 1);
  int r = n;
  for (int p = 2; p * p <= n; p++) {
    if (n % p) continue;
    r -= r / p;
    while (n % p == 0) n /= p;
  }
  if (n > 1) r -= r / n;
  return r;
}

long lcm_long(long a, long b) { return std::lcm(a, b); }

namespace {

// Quotient of integer polynomials (exact, used for cyclotomic polynomials).
std::vector<Q> poldiv(std::vector<Q> num, const std::vector<Q>& den) {
  int dn = (int)num.size() - 1, dd = (int)den.size() - 1;
  std::vector<Q> q(dn - dd + 1, Q(0));
  for (int k = dn - dd; k >= 0; k--) {
    Q f = num[k + dd] / den[dd];
    q[k] = f;
    if (f == 0) continue;
    for (int j = 0; j <= dd; j++) num[k + j] -= f * den[j];
  }
  for (const Q& c : num) assert(c == 0);
  return q;
}

std::vector<Q> cyclotomic_poly(int n) {
  // Phi_1, then successively Phi_d for every divisor d of n.
  std::map<int, std::vector<Q>> phi;
  for (int d = 1; d <= n; d++) {
    if (n % d) continue;
    std::vector<Q> num(d + 1, Q(0));  // x^d - 1
    num[0] = -1;
    num[d] = 1;
    std::vector<Q> cur = num;
    for (auto& [e, pe] : phi)
      if (d % e == 0) cur = poldiv(cur, pe);
    phi[d] = cur;
  }
  return phi[n];
}

struct CycTable {
  int n = 1, phi = 1;
  // red[k] = coefficients of zeta^k on the power basis, k in [0, maxk].
  std::vector<QVec> red;
};

const CycTable& table(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<CycTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  auto t = std::make_unique<CycTable>();
  t->n = n;
  t->phi = phi_of(n);
  std::vector<Q> minpoly = cyclotomic_poly(n);
  int maxk = std::max(n - 1, 2 * t->phi - 2);
  t->red.resize(maxk + 1);
  for (int k = 0; k < t->phi; k++) {
    t->red[k].assign(t->phi, Q(0));
    t->red[k][k] = 1;
  }
  for (int k = t->phi; k <= maxk; k++) {
    if (k == t->phi) {
      // zeta^phi = -(lower coefficients), minpoly is monic.
      t->red[k].assign(t->phi, Q(0));
      for (int j = 0; j < t->phi; j++) t->red[k][j] = -minpoly[j];
    } else {
      // Multiply the previous row by zeta and fold the overflow term.
      const QVec& prev = t->red[k - 1];
      QVec row(t->phi, Q(0));
      for (int j = 1; j < t->phi; j++) row[j] = prev[j - 1];
      if (prev[t->phi - 1] != 0)
        for (int j = 0; j < t->phi; j++)
          row[j] += prev[t->phi - 1] * t->red[t->phi][j];
      t->red[k] = std::move(row);
    }
  }
  const CycTable& ref = *t;
  cache[n] = std::move(t);
  return ref;
}

}  // namespace

Cyc::Cyc(const Q& r, int n) : n_(n), c_(table(n).phi, Q(0)) { c_[0] = r; }

Cyc Cyc::root(int n, long k) {
  k %= n;
  if (k < 0) k += n;
  const CycTable& t = table(n);
  Cyc z = Cyc::zero(n);
  z.c_ = t.red[k];
  return z;
}

Cyc Cyc::phase(const Q& x, int n) {
  Q scaled = x * n;
  if (scaled.get_den() != 1)
    throw std::runtime_error("phase " + x.get_str() +
                             " does not live in conductor " + std::to_string(n));
  long k = mpz_class(scaled.get_num() % n).get_si();
  return root(n, k);
}

Cyc Cyc::from_coeffs(int n, std::vector<Q> c) {
  Cyc z = Cyc::zero(n);
  assert((int)c.size() == table(n).phi);
  z.c_ = std::move(c);
  return z;
}

bool Cyc::is_zero() const {
  for (const Q& x : c_)
    if (x != 0) return false;
  return true;
}

bool Cyc::is_rational() const {
  for (size_t k = 1; k < c_.size(); k++)
    if (c_[k] != 0) return false;
  return true;
}

Q Cyc::rational() const {
  if (!is_rational())
    throw std::runtime_error("cyclotomic value is not rational: " + str());
  return c_[0];
}

Cyc Cyc::lift(int m) const {
  if (m == n_) return *this;
  assert(m % n_ == 0);
  long t = m / n_;
  Cyc r = Cyc::zero(m);
  for (size_t k = 0; k < c_.size(); k++) {
    if (c_[k] == 0) continue;
    Cyc z = root(m, (long)k * t);
    for (size_t j = 0; j < r.c_.size(); j++) r.c_[j] += c_[k] * z.c_[j];
  }
  return r;
}

Cyc Cyc::galois(long j) const {
  j %= n_;
  if (j < 0) j += n_;
  if (std::gcd(j, (long)n_) != 1)
    throw std::runtime_error("galois exponent not coprime to conductor");
  Cyc r = Cyc::zero(n_);
  for (size_t k = 0; k < c_.size(); k++) {
    if (c_[k] == 0) continue;
    Cyc z = root(n_, (long)k * j);
    for (size_t t = 0; t < r.c_.size(); t++) r.c_[t] += c_[k] * z.c_[t];
  }
  return r;
}

Cyc Cyc::conj() const { return n_ == 1 ? *this : galois(n_ - 1); }

Cyc Cyc::operator-() const {
  Cyc r = *this;
  for (Q& x : r.c_) x = -x;
  return r;
}

Cyc& Cyc::operator+=(const Cyc& o) {
  if (n_ != o.n_) {
    int m = (int)lcm_long(n_, o.n_);
    *this = lift(m);
    return *this += o.lift(m);
  }
  for (size_t k = 0; k < c_.size(); k++) c_[k] += o.c_[k];
  return *this;
}

Cyc& Cyc::operator-=(const Cyc& o) { return *this += -o; }

Cyc& Cyc::operator*=(const Cyc& o) {
  if (n_ != o.n_) {
    int m = (int)lcm_long(n_, o.n_);
    *this = lift(m);
    return *this *= o.lift(m);
  }
  const CycTable& t = table(n_);
  std::vector<Q> conv(2 * t.phi - 1, Q(0));
  for (size_t i = 0; i < c_.size(); i++) {
    if (c_[i] == 0) continue;
    for (size_t j = 0; j < o.c_.size(); j++)
      if (o.c_[j] != 0) conv[i + j] += c_[i] * o.c_[j];
  }
  QVec out(t.phi, Q(0));
  for (int k = 0; k < (int)conv.size(); k++) {
    if (conv[k] == 0) continue;
    if (k < t.phi)
      out[k] += conv[k];
    else
      for (int j = 0; j < t.phi; j++) out[j] += conv[k] * t.red[k][j];
  }
  c_ = std::move(out);
  return *this;
}

bool operator==(const Cyc& a, const Cyc& b) {
  if (a.n_ == b.n_) return a.c_ == b.c_;
  int m = (int)lcm_long(a.n_, b.n_);
  return a.lift(m).c_ == b.lift(m).c_;
}

Cyc Cyc::inv() const {
  if (is_zero()) throw std::runtime_error("cyclotomic division by zero");
  if (is_rational()) return Cyc(Q(1) / c_[0], n_);
  // Solve (this) * x = 1 via the multiplication matrix on the power basis.
  int phi = (int)c_.size();
  QMat m = qmat(phi, phi);
  for (int k = 0; k < phi; k++) {
    Cyc col = *this * root(n_, k);
    for (int i = 0; i < phi; i++) m[i][k] = col.c_[i];
  }
  QVec e0(phi, Q(0)), x;
  e0[0] = 1;
  if (!solve(m, e0, x))
    throw std::runtime_error("cyclotomic inverse failed (zero divisor?)");
  return from_coeffs(n_, x);
}

Cyc Cyc::pow(long e) const {
  if (e < 0) return inv().pow(-e);
  Cyc r = Cyc::one(n_), base = *this;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

std::complex<double> Cyc::approx() const {
  std::complex<double> s = 0;
  for (size_t k = 0; k < c_.size(); k++) {
    if (c_[k] == 0) continue;
    double ang = 2.0 * std::numbers::pi * (double)k / (double)n_;
    s += c_[k].get_d() * std::polar(1.0, ang);
  }
  return s;
}

std::string Cyc::str() const {
  std::ostringstream os;
  bool first = true;
  for (size_t k = 0; k < c_.size(); k++) {
    if (c_[k] == 0) continue;
    Q a = c_[k];
    if (!first) os << (sgn(a) < 0 ? " - " : " + ");
    else if (sgn(a) < 0) os << "-";
    first = false;
    Q mag = abs(a);
    if (k == 0) os << mag.get_str();
    else {
      if (mag != 1) os << mag.get_str() << "*";
      os << "z" << (n_ > 1 ? std::to_string(n_) : "");
      if (k > 1) os << "^" << k;
    }
  }
  if (first) os << "0";
  return os.str();
}

namespace {

long legendre(long a, long p) {
  a %= p;
  if (a < 0) a += p;
  long r = 1, b = a, e = (p - 1) / 2;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r == 1 ? 1 : (r == 0 ? 0 : -1);
}

// sqrt(p) for odd prime p, via the quadratic Gauss sum, positive embedding.
Cyc sqrt_odd_prime(long p, int n) {
  int w = (p % 4 == 1) ? (int)p : (int)(4 * p);
  if (n % w != 0)
    throw std::runtime_error("conductor " + std::to_string(n) +
                             " too small for sqrt(" + std::to_string(p) + ")");
  Cyc g = Cyc::zero(w);
  for (long a = 1; a < p; a++)
    g += Cyc(Q(legendre(a, p)), 1) * Cyc::root(w, a * (w / p));
  if (p % 4 == 3) g *= Cyc::root(w, 3L * (w / 4));  // divide by i
  if (g.approx().real() < 0) g = -g;
  if (g * g != Cyc(Q(p), 1))
    throw std::runtime_error("gauss sum sanity check failed");
  return g.lift(n);
}

}  // namespace

long sqrt_conductor(long m) {
  assert(m >= 0);
  long c = 1, rem = m;
  for (long p = 2; p * p <= rem; p++) {
    if (rem % p) continue;
    int e = 0;
    while (rem % p == 0) { rem /= p; e++; }
    if (e % 2 == 0) continue;
    if (p == 2) c = lcm_long(c, 8);
    else c = lcm_long(c, p % 4 == 1 ? p : 4 * p);
  }
  if (rem > 1) c = lcm_long(c, rem % 4 == 1 ? rem : (rem == 2 ? 8 : 4 * rem));
  return c;
}

Cyc sqrt_int(long m, int n) {
  assert(m >= 0);
  if (m == 0) return Cyc::zero(n);
  long sq = 1, rem = m;
  std::vector<long> odd_primes;
  bool even_part = false;
  for (long p = 2; p * p <= rem; p++) {
    if (rem % p) continue;
    int e = 0;
    while (rem % p == 0) { rem /= p; e++; }
    for (int i = 0; i < e / 2; i++) sq *= p;
    if (e % 2) {
      if (p == 2) even_part = true;
      else odd_primes.push_back(p);
    }
  }
  if (rem > 1) { if (rem == 2) even_part = true; else odd_primes.push_back(rem); }
  Cyc r = Cyc(Q(sq), n);
  if (even_part) {
    if (n % 8 != 0)
      throw std::runtime_error("conductor too small for sqrt(2)");
    r *= (Cyc::root(8, 1) + Cyc::root(8, 7)).lift(n);
  }
  for (long p : odd_primes) r *= sqrt_odd_prime(p, n);
  return r;
}

}  // namespace bridged
