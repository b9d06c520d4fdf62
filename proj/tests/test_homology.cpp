#include "bridged/homology.hpp"
#include "doctest.h"

using namespace bridged;

namespace {

bool is_zero(const QMat& m) {
  for (const auto& r : m)
    for (const auto& x : r)
      if (x != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("surgery complex dimensions and differentials") {
  SurgeryComplex empty = build_complex(parse_diagram("panel { }"));
  CHECK(empty.n_ribbons == 0);
  CHECK(empty.n_pairs == 0);
  CHECK(empty.n_panels == 1);
  CHECK(euler_number(empty) == 1);

  // Cancellation configuration: one ribbon passing once through one pair
  // whose coupons share the panel.
  SurgeryComplex canc =
      build_complex(parse_diagram("panel { coupon- f 0 1; coupon+ f 0 1 }"));
  CHECK(canc.n_ribbons == 1);
  CHECK(canc.n_pairs == 1);
  CHECK(canc.n_panels == 1);
  CHECK(canc.d2[0][0] == 1);
  CHECK(canc.d1[0][0] == 0);
  CHECK(euler_number(canc) == 1);

  // Two panels joined by one bare pair.
  SurgeryComplex join = build_complex(
      parse_diagram("panel { coupon+ f 0 0 } panel { coupon- f 0 0 }"));
  CHECK(join.n_ribbons == 0);
  CHECK(join.n_pairs == 1);
  CHECK(join.n_panels == 2);
  CHECK(join.d1[0][0] == 1);
  CHECK(join.d1[1][0] == -1);
  CHECK(euler_number(join) == 1);

  CHECK_THROWS(build_complex(parse_diagram("tangle in=(1) out=(1) { }")));
}

TEST_CASE("d1 d2 composes to zero across panels") {
  // One ribbon leaving its panel through pair f and returning through pair g.
  Diagram d = parse_diagram(
      "panel { cup 0 lr; coupon+ f 0 1; coupon- g 0 1; cap 0 }\n"
      "panel { coupon- f 0 1; coupon+ g 0 1 }");
  SurgeryComplex cx = build_complex(d);
  CHECK(cx.n_ribbons == 1);
  CHECK(cx.n_pairs == 2);
  CHECK(cx.n_panels == 2);
  CHECK(is_zero(matmul(cx.d1, cx.d2)));
  CHECK(euler_number(cx) == 1);
  CHECK(connectivity_check(d).connected);
}

TEST_CASE("linking matrices") {
  // 0-0 clasp ring pair.
  Diagram hopf = parse_diagram(
      "panel { cup 0 lr; cup 2 lr; xn 1; xn 1; cap 0; cap 0 }");
  QMat B = linking_matrix(hopf);
  REQUIRE(B.size() == 2);
  CHECK(B[0][0] == 0);
  CHECK(B[1][1] == 0);
  CHECK(B[0][1] == 1);
  CHECK(B[1][0] == 1);
  CHECK(signature_on_kernel(B, {}) == 0);

  // Chain with framings (2,3): curls appended before each cap.
  Diagram chain = parse_diagram(
      "panel { cup 0 lr; cup 2 lr; xn 1; xn 1; xn 0; xn 0; cap 0;"
      " xn 0; xn 0; xn 0; cap 0 }");
  QMat Bc = linking_matrix(chain);
  REQUIRE(Bc.size() == 2);
  CHECK(Bc[0][0] == 2);
  CHECK(Bc[1][1] == 3);
  CHECK(Bc[0][1] == 1);
  CHECK(signature_on_kernel(Bc, {}) == 2);

  // Split unknots: diagonal of framings.
  Diagram split = parse_diagram(
      "panel { cup 0 lr; xn 0; cap 0; cup 0 lr; xp 0; xp 0; cap 0 }");
  QMat Bs = linking_matrix(split);
  REQUIRE(Bs.size() == 2);
  CHECK(Bs[0][0] == 1);
  CHECK(Bs[1][1] == -2);
  CHECK(Bs[0][1] == 0);
  CHECK(signature_on_kernel(Bs, {}) == 0);

  // Reversing one component flips linking signs but never the signature.
  Diagram rev = parse_diagram(
      "panel { cup 0 rl; cup 2 lr; xn 1; xn 1; cap 0; cap 0 }");
  QMat Br = linking_matrix(rev);
  CHECK(Br[0][1] == -1);
  CHECK(signature_on_kernel(Br, {}) == signature_on_kernel(B, {}));
}

TEST_CASE("signature restricted to the kernel") {
  CHECK(signature_on_kernel(QMat{{1}}, {}) == 1);
  CHECK(signature_on_kernel(QMat{{0, 1}, {1, 0}}, qmat(1, 2)) == 0);
  CHECK(signature_on_kernel(QMat{{2, 1}, {1, 3}}, qmat(1, 2)) == 2);
  // d2 row [1, -1] restricts to the diagonal: B restricted = [x,x;x,x]-form.
  QMat B{{1, 0}, {0, -1}};
  QMat d2{{1, -1}};
  CHECK(signature_on_kernel(B, d2) == 0);
  QMat d2b{{1, 0}};  // kernel = second axis only
  CHECK(signature_on_kernel(B, d2b) == -1);
  // Full-rank d2: kernel trivial.
  QMat d2f{{1, 0}, {0, 1}};
  CHECK(signature_on_kernel(B, d2f) == 0);
}

TEST_CASE("surgery data and additivity") {
  Diagram kink = parse_diagram("panel { cup 0 lr; xn 0; cap 0 }");
  SurgeryData k = surgery_data(kink);
  CHECK(k.chi == 2);
  CHECK(k.sigma == 1);

  Diagram two = parse_diagram(
      "panel { cup 0 lr; xn 0; cap 0 }\npanel { cup 0 lr; xn 0; cap 0 }");
  SurgeryData t = surgery_data(two);
  CHECK(t.chi == 4);
  CHECK(t.sigma == 2);
  CHECK(connectivity_check(two).pieces == 2);
  CHECK(!connectivity_check(two).connected);

  // S1 x S2: 0-framed unknot.
  SurgeryData s1s2 = surgery_data(parse_diagram("panel { cup 0 lr; cap 0 }"));
  CHECK(s1s2.chi == 2);
  CHECK(s1s2.sigma == 0);

  // Cancellation configuration: chi 1, trivial kernel.
  SurgeryData canc =
      surgery_data(parse_diagram("panel { coupon- f 0 1; coupon+ f 0 1 }"));
  CHECK(canc.chi == 1);
  CHECK(canc.sigma == 0);
}
