#include "bridged/abelian.hpp"
#include "doctest.h"

using namespace bridged;

namespace {

ModularData semion() { return make_pointed(semion_qform(), "semion"); }

ModularData zn(long n) {
  return make_pointed(default_qform(AbGroup{{n}}),
                      "Z/" + std::to_string(n));
}

ModularData z4_eighth() {
  return make_pointed(cyclic_qform(4, Q(1, 8)), "Z/4:q=1/8a2");
}

ModularData hyper(long n) {
  return make_pointed(hyperbolic_qform(n), "hyperbolic");
}

Diagram dia(const std::string& s) { return parse_diagram(s); }

}  // namespace

TEST_CASE("bracket anchor values") {
  ModularData m = semion();
  CHECK(bracket(dia("panel { }"), m) == Cyc::one(m.conductor));
  // 0-framed unknot: both colors contribute 1.
  CHECK(bracket(dia("panel { cup 0 lr; cap 0 }"), m) == Cyc(Q(2), 1));
  // +1-framed unknot: theta sum 1 + i.
  Cyc i4 = Cyc::root(4, 1);
  CHECK(bracket(dia("panel { cup 0 lr; xn 0; cap 0 }"), m) ==
        Cyc::one(4) + i4);
  // 2-framed unknot: 1 + e^{pi i} = 0.
  CHECK(bracket(dia("panel { cup 0 lr; xn 0; xn 0; cap 0 }"), m).is_zero());
  // -1-framed unknot is the Delta^- configuration.
  CHECK(bracket(dia("panel { cup 0 lr; xp 0; cap 0 }"), m) == m.delta_minus);
  // Ring pair evaluates to the global dimension squared.
  CHECK(bracket(dia("panel { cup 0 lr; cup 2 lr; xn 1; xn 1; cap 0; cap 0 }"),
                m) == m.D2);
}

TEST_CASE("tau anchors: S3 and S1xS2 in every presentation") {
  for (const ModularData& m :
       {semion(), zn(3), zn(5), z4_eighth(), hyper(3)}) {
    Cyc s3 = m.D.inv();
    CHECK(tau(dia("panel { }"), m).tau == s3);
    CHECK(tau(dia("panel { cup 0 lr; xn 0; cap 0 }"), m).tau == s3);
    CHECK(tau(dia("panel { cup 0 lr; xp 0; cap 0 }"), m).tau == s3);
    CHECK(tau(dia("panel { coupon- f 0 1; coupon+ f 0 1 }"), m).tau == s3);
    CHECK(tau(dia("panel { coupon+ f 0 0 } panel { coupon- f 0 0 }"), m).tau ==
          s3);
    CHECK(tau(dia("panel { cup 0 lr; cap 0 }"), m).tau == Cyc::one(1));
  }
}

TEST_CASE("lens space values from the chain presentation") {
  // L(2,1) at the semion: theta-sum cancels.
  ModularData m = semion();
  TauResult r = tau(dia("panel { cup 0 lr; xn 0; xn 0; cap 0 }"), m);
  CHECK(r.chi == 2);
  CHECK(r.sigma == 1);
  CHECK(r.tau.is_zero());
  // L(3,1) on Z/3: {L} = 3, and |tau/tau(S3)|^2 = 9/D^2 = 3.
  ModularData z3 = zn(3);
  TauResult l3 = tau(dia("panel { cup 0 lr; xn 0; xn 0; xn 0; cap 0 }"), z3);
  CHECK(l3.bracket == Cyc(Q(3), 1));
  Cyc ratio = l3.tau / tau(dia("panel { }"), z3).tau;
  CHECK(ratio * ratio.conj() == Cyc(Q(3), 1));
}

TEST_CASE("two-path check: bracket equals recomputation from matrices") {
  std::vector<std::string> words = {
      "panel { cup 0 lr; cup 2 lr; xn 1; xn 1; cap 0; cap 0 }",
      "panel { cup 0 lr; cup 2 lr; xn 1; xn 1; xn 0; xn 0; cap 0;"
      " xn 0; xn 0; xn 0; cap 0 }",
      "panel { coupon- f 0 1; coupon+ f 0 1 }",
      "panel { coupon- g 0 2; xp 0; coupon+ g 0 2 }",
      "panel { cup 0 lr; coupon+ f 0 1; coupon- g 0 1; cap 0 }\n"
      "panel { coupon- f 0 1; coupon+ g 0 1 }",
      "panel { cup 0 lr; xn 0; cap 0; cup 0 lr; xp 0; xp 0; cap 0 }",
  };
  for (const ModularData& m : {semion(), z4_eighth(), hyper(2)}) {
    for (const auto& w : words) {
      SurgeryData sd = surgery_data(dia(w));
      CHECK(bracket(sd, m) == bracket_from_matrices(sd.B, sd.cx.d2, m));
    }
  }
}

TEST_CASE("transformation rules hold on a spread of base diagrams") {
  std::vector<std::string> bases = {
      "panel { }",
      "panel { cup 0 lr; cap 0 }",
      "panel { cup 0 lr; xn 0; cap 0 }",
      "panel { cup 0 lr; cup 2 lr; xn 1; xn 1; cap 0; cap 0 }",
      "panel { coupon- f 0 1; coupon+ f 0 1 }",
  };
  for (const ModularData& m : {semion(), zn(3), z4_eighth()})
    for (const auto& b : bases) {
      TrsfReport rep = verify_trsf(dia(b), m);
      if (!rep.ok)
        for (const auto& f : rep.failures) MESSAGE(f);
      CHECK(rep.ok);
    }
}

TEST_CASE("multiplicativity over split unions") {
  ModularData m = z4_eighth();
  Diagram d1 = dia("panel { cup 0 lr; xn 0; cap 0 }");
  Diagram d2 = dia("panel { cup 0 lr; cup 2 lr; xn 1; xn 1; cap 0; cap 0 }");
  // Same-panel split union multiplies brackets and adds chi-1 / sigma.
  Diagram both = dia(
      "panel { cup 0 lr; xn 0; cap 0;"
      " cup 0 lr; cup 2 lr; xn 1; xn 1; cap 0; cap 0 }");
  CHECK(bracket(both, m) == bracket(d1, m) * bracket(d2, m));
  SurgeryData s1 = surgery_data(d1), s2 = surgery_data(d2),
              sb = surgery_data(both);
  CHECK(sb.chi == s1.chi + s2.chi - 1);
  CHECK(sb.sigma == s1.sigma + s2.sigma);
  // Separate panels: chi and sigma strictly additive, tau multiplies.
  Diagram sep = dia(
      "panel { cup 0 lr; xn 0; cap 0 }\n"
      "panel { cup 0 lr; cup 2 lr; xn 1; xn 1; cap 0; cap 0 }");
  SurgeryData ss = surgery_data(sep);
  CHECK(ss.chi == s1.chi + s2.chi);
  CHECK(ss.sigma == s1.sigma + s2.sigma);
  CHECK(tau(sep, m).tau == tau(d1, m).tau * tau(d2, m).tau);
}

TEST_CASE("conjugating the form conjugates tau") {
  QForm qf = cyclic_qform(4, Q(1, 8));
  QForm neg = qf;
  for (auto& v : neg.qv) v = mod1(-v);
  ModularData m = make_pointed(qf, "q");
  ModularData mc = make_pointed(neg, "-q");
  for (const std::string& w :
       {"panel { cup 0 lr; xn 0; cap 0 }",
        "panel { cup 0 lr; cup 2 lr; xn 1; xn 1; xn 0; cap 0; cap 0 }"}) {
    Cyc a = tau(dia(w), m).tau;
    Cyc b = tau(dia(w), mc).tau;
    int n = lcm_long(a.conductor(), b.conductor());
    CHECK(a.lift(n).conj() == b.lift(n));
  }
}

TEST_CASE("xi insertion on an unknot") {
  // Z/4: both self-dual colors weigh in with rho = +1.
  ModularData m = z4_eighth();
  Cyc v = eval_with_insertion(dia("panel { cup 0 lr; cap 0 }"), m, 0);
  CHECK(v == Cyc(Q(2), 1) * m.D.inv());
  // Z/3: only the zero color is self-dual.
  ModularData z3 = zn(3);
  Cyc w = eval_with_insertion(dia("panel { cup 0 lr; cap 0 }"), z3, 0);
  CHECK(w == z3.D.inv());
  // A +1-framed unknot picks up theta phases on the surviving colors:
  // theta(0)=1 and theta(2)=-1 cancel exactly.
  Cyc k = eval_with_insertion(dia("panel { cup 0 lr; xn 0; cap 0 }"), m, 0);
  CHECK(k.is_zero());
}
