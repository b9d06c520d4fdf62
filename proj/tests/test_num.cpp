#include <complex>

#include "bridged/cyclotomic.hpp"
#include "bridged/matq.hpp"
#include "doctest.h"

using namespace bridged;

TEST_CASE("cyclotomic basics") {
  Cyc z = Cyc::root(5, 1);
  CHECK(z.pow(5) == Cyc::one(5));
  Cyc s = Cyc::zero(5);
  for (int k = 0; k < 5; k++) s += Cyc::root(5, k);
  CHECK(s.is_zero());
  CHECK(Cyc::root(5, 7) == Cyc::root(5, 2));
  CHECK(Cyc::root(2, 1) == Cyc(Q(-1)));
  CHECK(Cyc::root(1, 0) == Cyc(Q(1)));
}

TEST_CASE("cyclotomic cross-conductor arithmetic") {
  // zeta_8^2 = zeta_4
  CHECK(Cyc::root(8, 1) * Cyc::root(8, 1) == Cyc::root(4, 1));
  // i^2 = -1 mixing conductors 4 and 1
  CHECK(Cyc::root(4, 1) * Cyc::root(4, 1) + Cyc(Q(1)) == Cyc::zero(1));
  CHECK(Cyc::phase(Q(1, 2), 8) == Cyc(Q(-1)));
  CHECK(Cyc::phase(Q(-1, 4), 8) == Cyc::root(4, 3));
}

TEST_CASE("cyclotomic conj, galois, inverse") {
  Cyc z = Cyc::root(7, 1);
  CHECK(z.conj() == Cyc::root(7, 6));
  CHECK((z + z.conj()).approx().imag() == doctest::Approx(0.0));
  Cyc a = Cyc(Q(1)) + Cyc::root(5, 1);
  CHECK(a * a.inv() == Cyc::one(5));
  CHECK(a.galois(2).galois(3) == a.galois(6 % 5));
  // galois permutes roots: product over the orbit is the field norm, rational
  Cyc norm = Cyc::one(5);
  for (long j = 1; j < 5; j++) norm *= a.galois(j);
  CHECK(norm.is_rational());
}

TEST_CASE("exact integer square roots") {
  for (long m : {2L, 3L, 5L, 6L, 7L, 8L, 10L, 12L, 15L}) {
    int n = (int)sqrt_conductor(m);
    Cyc r = sqrt_int(m, n);
    CHECK(r * r == Cyc(Q(m)));
    CHECK(r.approx().real() > 0);
    CHECK(r.approx().imag() == doctest::Approx(0.0));
  }
  CHECK(sqrt_int(4, 1) == Cyc(Q(2)));
  CHECK(sqrt_int(9, 1) == Cyc(Q(3)));
  CHECK(sqrt_int(18, 8) == Cyc(Q(3)) * sqrt_int(2, 8));
  CHECK(sqrt_conductor(2) == 8);
  CHECK(sqrt_conductor(5) == 5);
  CHECK(sqrt_conductor(3) == 12);
  CHECK(sqrt_conductor(4) == 1);
}

TEST_CASE("rational linear algebra") {
  QMat a = {{Q(1), Q(2), Q(3)}, {Q(2), Q(4), Q(6)}};
  CHECK(rank(a) == 1);
  auto ker = kernel_basis(a);
  CHECK(ker.size() == 2);
  for (const auto& v : ker) {
    QVec y = matvec(a, v);
    for (const Q& e : y) CHECK(e == 0);
  }
  QVec x;
  QMat b = {{Q(2), Q(1)}, {Q(1), Q(3)}};
  CHECK(solve(b, {Q(5), Q(10)}, x));
  CHECK(x[0] == Q(1));
  CHECK(x[1] == Q(3));
  QMat c = {{Q(1), Q(1)}, {Q(2), Q(2)}};
  CHECK_FALSE(solve(c, {Q(1), Q(3)}, x));
}

TEST_CASE("signature by congruence") {
  CHECK(signature({{Q(2), Q(1)}, {Q(1), Q(3)}}) == 2);
  CHECK(signature({{Q(0), Q(1)}, {Q(1), Q(0)}}) == 0);
  CHECK(signature({{Q(1), Q(0), Q(0)},
                   {Q(0), Q(-2), Q(0)},
                   {Q(0), Q(0), Q(3)}}) == 1);
  CHECK(signature(qmat(4, 4)) == 0);
  // degenerate: rank-1 positive plus radical
  CHECK(signature({{Q(1), Q(1)}, {Q(1), Q(1)}}) == 1);
  // hyperbolic pair coupled to a positive diagonal
  CHECK(signature({{Q(0), Q(5), Q(1)},
                   {Q(5), Q(0), Q(2)},
                   {Q(1), Q(2), Q(7)}}) == 1);
  CHECK(signature({{Q(-1), Q(-1)}, {Q(-1), Q(-1)}}) == -1);
}
