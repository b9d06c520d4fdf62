#pragma once
#include <optional>
#include <string>
#include <vector>

#include "bridged/abgroup.hpp"
#include "bridged/cyclotomic.hpp"

namespace bridged {

using CVec = std::vector<Cyc>;
using CMat = std::vector<CVec>;

// Semisimple category data used by the evaluators: label set with duals,
// twists, dimensions, unnormalized S-matrix, fusion multiplicities, and the
// derived Gauss sums. Everything lives in Q(zeta_conductor).
struct ModularData {
  std::string name;
  int conductor = 1;
  int r = 0;             // number of simple objects; unit has index 0
  std::vector<int> dual;
  CVec theta, dim;
  CMat S;                // S[i][j], symmetric, S[0][j] = dim(j)
  // fusion[i][j][p] = multiplicity of p in i (x) j
  std::vector<std::vector<std::vector<long>>> fusion;
  Cyc D2, D;             // global dimension squared and its chosen root
  Cyc delta_plus, delta_minus;  // sum theta^{+/-1} dim^2
  std::optional<QForm> pointed;

  bool is_pointed() const { return pointed.has_value(); }
};

ModularData make_pointed(const QForm& qf, const std::string& name);
ModularData make_fibonacci();
ModularData make_ising();

// Default nondegenerate form on Z/n: a^2/(2n) for even n, a^2/n for odd n.
QForm default_qform(const AbGroup& A);
QForm semion_qform();                 // Z/2, q(a) = a^2/4
QForm hyperbolic_qform(long n);       // Z/n x Z/n, q(a,b) = ab/n
QForm cyclic_qform(long n, const Q& coef);  // Z/n, q(a) = coef * a^2

// Solve sum_j dhat(j) S[j][i] = delta_{i,0}; empty if 1 is not in im(S).
std::optional<CVec> solve_dhat(const ModularData& m);

struct ModularityReport {
  bool has_dhat = false;      // 1 in im(S)
  bool dim_column = false;    // sum_j dim(j) S[j][i] = D^2 delta_{i,0}
  bool s_invertible = false;
  bool sys_c = false;         // S Y S = C with Y = diag(dhat/dim), meaningful
                              // only when has_dhat
  bool modular() const { return has_dhat && dim_column && s_invertible; }
};
ModularityReport modularity_report(const ModularData& m);

// Verlinde identity dim(k)^{-1} S[i][k] S[j][k] = sum_p N_{ij,p} S[p][k].
bool verlinde_holds(const ModularData& m);

// xi(j) = D^{-1} dim(j)^{-1} rho_j for self-dual j, else 0; pointed data only
// (rho_a = theta_a^2 for 2a = 0).
CVec xi_vector(const ModularData& m);

// Exact linear algebra over a cyclotomic field.
bool cyc_solve(CMat a, CVec b, CVec& x);
bool cyc_invertible(CMat a);
CMat cyc_mul(const CMat& a, const CMat& b);

}  // namespace bridged
