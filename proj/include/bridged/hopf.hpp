#pragma once
#include <string>
#include <vector>

#include "bridged/cyclotomic.hpp"
#include "bridged/diagram.hpp"
#include "bridged/matq.hpp"
#include "bridged/modular.hpp"

namespace bridged {

// Multiplication table of a finite group. Elements are 0..n-1 with 0 the
// identity; inv[a] is the inverse of a.
struct GroupTable {
  std::string name;
  int n = 0;
  std::vector<std::vector<int>> mul;
  std::vector<int> inv;

  int op(int a, int b) const { return mul[a][b]; }
};

GroupTable make_cyclic(int n);
GroupTable make_symmetric3();
GroupTable make_trivial();

// #{g : g^p = e}; the classical closed-form for the lens-space ratios.
long count_order_divisors(const GroupTable& g, long p);

// A finite-dimensional ribbon Hopf algebra with every structure map stored as
// a dense rational tensor in a fixed basis e_0..e_{dim-1}.
struct HopfData {
  std::string name;
  int dim = 0;
  // e_i e_j = sum_k mult[i][j][k] e_k
  std::vector<std::vector<QVec>> mult;
  QVec unit;  // coefficients of 1
  // Delta(e_i) = sum_{j,k} comult[i][j][k] e_j (x) e_k
  std::vector<std::vector<QVec>> comult;
  QVec counit;    // eps(e_i)
  QMat antipode;  // S(e_i) = sum_j antipode[i][j] e_j
  // R = sum_{i,j} rmat[i][j] e_i (x) e_j, and its two-sided inverse
  QMat rmat, rinv;
  QVec ribbon, ribbon_inv;  // v and v^{-1}
};

// The Drinfeld double D(G) with basis delta_a (x) x at index a*|G| + x:
// multiplication (delta_a x)(delta_b y) = [a = x b x^{-1}] delta_a xy,
// R = sum_g (delta_g (x) e) (x) (1 (x) g), ribbon v = sum_g delta_g (x) g^{-1}.
HopfData drinfeld_double(const GroupTable& g);

struct HopfReport {
  bool ok = true;
  std::vector<std::string> failures;
};

// Checks every defining identity: bialgebra axioms, antipode, S^2 = id,
// R-inverse, quasitriangularity, the ribbon equations, and the coherence of
// the four kink contraction routes with the ribbon element.
HopfReport verify_hopf(const HopfData& h);

struct IntegralPair {
  QVec mu;         // right integral as a functional, mu(e_i) = mu[i]
  QVec lambda;     // two-sided cointegral, normalized to mu(lambda) = 1
  Q rtr_scalar;    // (mu (x) 1)(R21 R) = rtr_scalar * lambda
  bool lambda_s_fixed = false;   // S(lambda) == lambda
  bool trace_symmetric = false;  // mu(xy) == mu(yx) on the basis
};

// Solves the one-dimensional integral and cointegral systems and normalizes:
// mu is scaled so that mu(v) mu(v^{-1}) = mu(1) (scale-independent), lambda
// so that mu(lambda) = 1. Throws when a solution space is not one-dimensional
// or a normalization is degenerate.
IntegralPair solve_integrals(const HopfData& h);

struct HenningsResult {
  Q value;             // the bracket {L}
  long components = 0;
};

// Evaluates the diagram bracket by the Hennings procedure: walk each closed
// component along its canonical orientation, collect an R- or R^{-1}-factor
// at every crossing (antipode on downward passes), a ribbon factor per curl,
// a comultiplied-cointegral leg per coupon passage, and close each component
// with the integral.
HenningsResult hennings_bracket(const Diagram& d, const HopfData& h);

struct TauHResult {
  Cyc tau;          // exact value (rational, embedded for comparisons)
  Q bracket;
  long chi = 0;
  int sigma = 0;
  Q d2, droot;      // D^2 = {0-framed unknot} and its exact square root
  Q delta_minus;    // {-1-framed unknot}
  Q delta_plus;     // {+1-framed unknot}
};

// tau(L) = D^{-chi-sigma} * delta_minus^{sigma} * {L}, with the
// normalizations computed as brackets of the 0- and (+/-1)-framed unknots.
TauHResult tau_hennings(const Diagram& d, const HopfData& h);

struct SelfconjResult {
  QVec rho;                 // central element of H
  std::string convention;   // accepted choice in the convention search
  CVec scalars;             // block scalar per irreducible (a, chi_b), index
                            // a*|G| + b; abelian G only (else empty)
};

// The selfconjugate projector rho = D^{-1} sum Lambda' f_j u-hat Lambda'' e_j
// built from the integral dual bases. The u-hat factor and the dual-base
// pairing order are fixed by searching the small convention set for the
// candidate that is central and, for abelian G, has block scalars matching
// the xi-vector of the hyperbolic pointed category on G x G.
SelfconjResult selfconjugate_projector(const HopfData& h, const GroupTable& g);

}  // namespace bridged
