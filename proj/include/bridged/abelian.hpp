#pragma once
#include <string>
#include <vector>

#include "bridged/homology.hpp"
#include "bridged/modular.hpp"

namespace bridged {

// Gauss-sum evaluation of the bracket {L} for pointed data: the sum over
// admissible colorings of theta- and linking-phases. Factorizes over clusters
// of components that interact through crossings or shared coupon rows.
Cyc bracket(const SurgeryData& sd, const ModularData& m);
Cyc bracket(const Diagram& d, const ModularData& m);

// Independent recomputation straight from the matrices: plain enumeration of
// every coloring with no clustering or pruning. Exponential; test-sized
// inputs only.
Cyc bracket_from_matrices(const QMat& B, const QMat& d2, const ModularData& m);

struct TauResult {
  Cyc tau;
  Cyc bracket;
  long chi = 0;
  int sigma = 0;
};
// tau = D^{-chi-sigma} * (Delta^-)^sigma * {L}.
TauResult tau(const Diagram& d, const ModularData& m);

// Transformation rules for unions with the three standard configurations:
// a cancelling ribbon, a 0-0 clasp ring pair, and a -1-framed unknot.
struct TrsfReport {
  bool ok = true;
  std::vector<std::string> failures;
};
TrsfReport verify_trsf(const Diagram& d, const ModularData& m);

// Bracket with one component carrying the xi weight instead of its plain
// dim-contribution: the sum restricts to self-dual colors on it.
Cyc eval_with_insertion(const Diagram& d, const ModularData& m, int comp);

}  // namespace bridged
