#pragma once
#include <gmpxx.h>

#include <complex>
#include <string>
#include <vector>

namespace bridged {

using Q = mpq_class;

// Element of the cyclotomic field Q(zeta_n), zeta_n = exp(2*pi*i/n), stored as
// a dense rational vector on the power basis 1, zeta, ..., zeta^{phi(n)-1}.
// Arithmetic between different conductors lifts both operands to the lcm.
class Cyc {
public:
  Cyc() : n_(1), c_(1, Q(0)) {}
  explicit Cyc(const Q& r, int n = 1);
  explicit Cyc(long r, int n = 1) : Cyc(Q(r), n) {}

  static Cyc zero(int n) { return Cyc(Q(0), n); }
  static Cyc one(int n) { return Cyc(Q(1), n); }
  static Cyc root(int n, long k);  // zeta_n^k
  // e^{2*pi*i*x} for rational x; denominator of x must divide n.
  static Cyc phase(const Q& x, int n);
  static Cyc from_coeffs(int n, std::vector<Q> c);

  int conductor() const { return n_; }
  const std::vector<Q>& coeffs() const { return c_; }

  bool is_zero() const;
  bool is_rational() const;
  Q rational() const;  // requires is_rational()

  Cyc lift(int m) const;       // re-embed into Q(zeta_m); n_ must divide m
  Cyc galois(long j) const;    // zeta -> zeta^j, gcd(j, n_) = 1
  Cyc conj() const;            // complex conjugation, zeta -> zeta^{-1}
  Cyc inv() const;             // multiplicative inverse; element must be nonzero
  Cyc pow(long e) const;       // integer powers, negative allowed for units

  std::complex<double> approx() const;
  std::string str() const;     // e.g. "1/2 + 3*z^2  [z = zeta_8]"

  Cyc operator-() const;
  Cyc& operator+=(const Cyc& o);
  Cyc& operator-=(const Cyc& o);
  Cyc& operator*=(const Cyc& o);

  friend Cyc operator+(Cyc a, const Cyc& b) { return a += b; }
  friend Cyc operator-(Cyc a, const Cyc& b) { return a -= b; }
  friend Cyc operator*(Cyc a, const Cyc& b) { return a *= b; }
  friend Cyc operator/(Cyc a, const Cyc& b) { return a *= b.inv(); }
  friend bool operator==(const Cyc& a, const Cyc& b);
  friend bool operator!=(const Cyc& a, const Cyc& b) { return !(a == b); }

private:
  int n_;                // conductor
  std::vector<Q> c_;     // coefficients, size phi(n_)
};

int phi_of(int n);
long lcm_long(long a, long b);

// Exact square root of a nonnegative integer m as the positive real element of
// Q(zeta_n); n must be a multiple of sqrt_conductor(m).
Cyc sqrt_int(long m, int n);
// Smallest-style conductor our embedding needs: per odd prime p in the
// squarefree part, p if p = 1 mod 4 else 4p; times 8 if the part is even.
long sqrt_conductor(long m);

}  // namespace bridged
