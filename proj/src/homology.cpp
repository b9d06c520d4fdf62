#include "bridged/homology.hpp"

#include <functional>
#include <numeric>
#include <stdexcept>

namespace bridged {

namespace {

void require_closed(const Diagram& d) {
  if (d.tangle)
    throw std::runtime_error(
        "surgery complex needs a closed presentation; close the tangle first");
}

}  // namespace

SurgeryComplex build_complex(const Traced& tr, int n_panels) {
  SurgeryComplex cx;
  cx.n_ribbons = (int)tr.comps.size();
  cx.n_pairs = (int)tr.coupons.size();
  cx.n_panels = n_panels;
  for (const auto& c : tr.comps)
    if (!c.closed)
      throw std::runtime_error("surgery complex with an open strand");
  cx.d2 = qmat(cx.n_pairs, cx.n_ribbons);
  for (const auto& p : tr.passages) cx.d2[p.pair][p.comp] += p.sign;
  cx.d1 = qmat(cx.n_panels, cx.n_pairs);
  for (const auto& cp : tr.coupons) {
    cx.d1[cp.in_panel][cp.pair] += 1;
    cx.d1[cp.out_panel][cp.pair] -= 1;
  }
  return cx;
}

SurgeryComplex build_complex(const Diagram& d) {
  require_closed(d);
  return build_complex(trace_components(d), (int)d.panels.size());
}

long euler_number(const SurgeryComplex& cx) {
  return (long)cx.n_ribbons - cx.n_pairs + cx.n_panels;
}

long euler_number(const Diagram& d) { return euler_number(build_complex(d)); }

QMat linking_matrix(const Traced& tr) {
  size_t n = tr.comps.size();
  QMat B = qmat(n, n);
  // Signed inter-component crossing sums; every pair meets an even number of
  // times so the half below is an integer.
  QMat twice = qmat(n, n);
  for (const auto& x : tr.crossings) {
    if (x.comp_a == x.comp_b)
      B[x.comp_a][x.comp_a] += x.sign;
    else {
      twice[x.comp_a][x.comp_b] += x.sign;
      twice[x.comp_b][x.comp_a] += x.sign;
    }
  }
  for (size_t i = 0; i < n; i++)
    for (size_t j = 0; j < n; j++) {
      if (i == j) continue;
      Q half = twice[i][j] / 2;
      if (half.get_den() != 1)
        throw std::logic_error("odd inter-component crossing sum");
      B[i][j] = half;
    }
  return B;
}

QMat linking_matrix(const Diagram& d) {
  require_closed(d);
  return linking_matrix(trace_components(d));
}

int signature_on_kernel(const QMat& B, const QMat& d2) {
  size_t n = B.size();
  std::vector<QVec> ker;
  if (d2.empty()) {
    for (size_t i = 0; i < n; i++) {
      QVec e(n, 0);
      e[i] = 1;
      ker.push_back(std::move(e));
    }
  } else {
    if (!d2.front().empty() && d2.front().size() != n)
      throw std::invalid_argument("signature_on_kernel: dimension mismatch");
    ker = kernel_basis(d2);
  }
  if (ker.empty()) return 0;
  // Gram matrix of B on the kernel basis.
  size_t k = ker.size();
  QMat gram = qmat(k, k);
  std::vector<QVec> bk;
  for (const auto& v : ker) bk.push_back(matvec(B, v));
  for (size_t i = 0; i < k; i++)
    for (size_t j = 0; j < k; j++) {
      Q s = 0;
      for (size_t t = 0; t < n; t++) s += ker[i][t] * bk[j][t];
      gram[i][j] = s;
    }
  return signature(gram);
}

SurgeryData surgery_data(const Diagram& d) {
  require_closed(d);
  SurgeryData out;
  out.tr = trace_components(d);
  out.cx = build_complex(out.tr, (int)d.panels.size());
  out.B = linking_matrix(out.tr);
  out.chi = euler_number(out.cx);
  out.sigma = signature_on_kernel(out.B, out.cx.d2);
  return out;
}

ConnectivityReport connectivity_check(const Diagram& d) {
  require_valid(d);
  ConnectivityReport rep;
  int n = (int)d.panels.size();
  std::vector<int> pa(n);
  std::iota(pa.begin(), pa.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return pa[x] == x ? x : pa[x] = find(pa[x]);
  };
  // Coupon pairs bridge the panel containing '+' to the one containing '-'.
  std::vector<int> in_panel(d.pair_count(), -1), out_panel(d.pair_count(), -1);
  for (int pi = 0; pi < n; pi++)
    for (const Tile& t : d.panels[pi].word) {
      if (t.kind == TileKind::CouponIn) in_panel[t.pair] = pi;
      if (t.kind == TileKind::CouponOut) out_panel[t.pair] = pi;
    }
  for (int p = 0; p < d.pair_count(); p++)
    pa[find(in_panel[p])] = find(out_panel[p]);
  std::vector<int> label(n, -1);
  for (int i = 0; i < n; i++) {
    int r = find(i);
    if (label[r] == -1) label[r] = rep.pieces++;
    rep.panel_piece.push_back(label[r]);
  }
  rep.connected = rep.pieces <= 1;
  return rep;
}

}  // namespace bridged
