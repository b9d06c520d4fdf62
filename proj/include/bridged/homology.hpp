#pragma once
#include <vector>

#include "bridged/diagram.hpp"
#include "bridged/matq.hpp"

namespace bridged {

// Chain complex of the bounding four-fold read off a closed presentation:
// 0-cells are panels, 1-cells are coupon pairs, 2-cells are surgery ribbons.
struct SurgeryComplex {
  int n_ribbons = 0, n_pairs = 0, n_panels = 0;
  QMat d2;  // n_pairs x n_ribbons: signed passage counts
  QMat d1;  // n_panels x n_pairs: +1 at the '+' panel, -1 at the '-' panel
};

// Requires a valid closed diagram (tangles normalize through their closure).
SurgeryComplex build_complex(const Diagram& d);
SurgeryComplex build_complex(const Traced& tr, int n_panels);

long euler_number(const SurgeryComplex& cx);
long euler_number(const Diagram& d);

// Symmetric linking matrix over the closed components, in traced order:
// framings on the diagonal, linking numbers off it.
QMat linking_matrix(const Traced& tr);
QMat linking_matrix(const Diagram& d);

// Signature of x^T B x restricted to ker(d2), exactly over the rationals.
int signature_on_kernel(const QMat& B, const QMat& d2);

// Everything the evaluators need from one pass over a closed diagram.
struct SurgeryData {
  Traced tr;
  SurgeryComplex cx;
  QMat B;
  long chi = 0;
  int sigma = 0;
};
SurgeryData surgery_data(const Diagram& d);

struct ConnectivityReport {
  int pieces = 0;
  bool connected = true;
  std::vector<int> panel_piece;  // piece id per panel
};
ConnectivityReport connectivity_check(const Diagram& d);

}  // namespace bridged
