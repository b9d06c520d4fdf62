#include "bridged/moves.hpp"

#include <map>
#include <set>

#include "bridged/abelian.hpp"
#include "bridged/homology.hpp"
#include "doctest.h"

using namespace bridged;

namespace {

Diagram dia(const std::string& s) { return parse_diagram(s); }

ModularData semion() { return make_pointed(semion_qform(), "semion"); }

ModularData hyper2() { return make_pointed(hyperbolic_qform(2), "hyp2"); }

ModularData zn(long n) {
  return make_pointed(default_qform(AbGroup{{n}}), "Z/" + std::to_string(n));
}

// Chain of two unknots with framings 2 and 3 and one clasp: the plumbing
// presentation of the (2,3) lens space.
const char* kLensChain =
    "panel { cup 0 lr; xn 0; xn 0; cup 2 lr; xn 2; xn 2; xn 2; xp 1; xp 1; "
    "cap 2; cap 0 }";

// One strand threaded through a coupon pair.
const char* kThreaded =
    "panel { cup 0 rl; coupon+ f 0 1; coupon- f 0 1; cap 0 }";

// Three strands through an arity-3 pair.
const char* kTriple =
    "panel { cup 0 lr; cup 0 lr; cup 0 lr; coupon+ g 0 3; coupon- g 0 3; "
    "cap 0; cap 0; cap 0 }";

// Two nested pairs ready for a one-slide: h's absorber sits directly below
// l's, and l's coupons live in different panels.
const char* kNested =
    "panel { cup 0 lr; cup 0 lr; coupon+ h 0 1; coupon+ l 0 1; cap 0 }\n"
    "panel { coupon- h 0 1; coupon- l 0 1; cap 0 }";

// Isolated cancellation component.
const char* kCancel = "panel { coupon- r 0 1; coupon+ r 0 1 }";

std::string rich_text() {
  return std::string(kLensChain) + "\n" + kThreaded + "\n" + kTriple + "\n" +
         kNested + "\n" + kCancel;
}

std::pair<long, int> chi_sigma(const Diagram& d) {
  SurgeryData sd = surgery_data(d);
  return {sd.chi, sd.sigma};
}

// Applies the first enumerated site and checks the round trip lands back on
// the identical word, then returns the moved-to diagram.
Diagram roundtrip_first(const Diagram& d, MoveKind k, bool fwd,
                        const MoveOptions& opt = {}) {
  auto sites = enumerate_sites(d, k, fwd, opt);
  REQUIRE_FALSE(sites.empty());
  Applied a = apply_move(d, sites[0], opt);
  Applied back = apply_move(a.diagram, a.inverse, opt);
  CHECK(serialize_diagram(back.diagram) == serialize_diagram(d));
  return a.diagram;
}

}  // namespace

TEST_CASE("move inventory") {
  CHECK(all_move_kinds(false).size() == 20);
  CHECK(all_move_kinds(true).size() == 22);
  std::set<std::string> names;
  for (MoveKind k : all_move_kinds(true)) names.insert(move_kind_name(k));
  CHECK(names.size() == 22);
}

TEST_CASE("enumeration is deterministic and sites apply cleanly") {
  Diagram d = dia(rich_text());
  for (MoveKind k : all_move_kinds(false))
    for (bool fwd : {true, false}) {
      auto a = enumerate_sites(d, k, fwd);
      auto b = enumerate_sites(d, k, fwd);
      REQUIRE(a.size() == b.size());
      for (size_t i = 0; i < a.size(); i++) {
        CHECK(a[i].desc == b[i].desc);
        CHECK(a[i].locs == b[i].locs);
        CHECK(a[i].redex_hash == b[i].redex_hash);
      }
      // every advertised site must apply and validate
      for (const MoveSite& s : a) {
        Applied ap = apply_move(d, s);
        CHECK(validate(ap.diagram).empty());
      }
    }
}

TEST_CASE("planar move round trips") {
  Diagram lens = dia(kLensChain);
  roundtrip_first(lens, MoveKind::M1Commute, true);
  roundtrip_first(lens, MoveKind::M1Zig1, false);
  roundtrip_first(lens, MoveKind::M1Zig2, false);
  roundtrip_first(lens, MoveKind::M1R2, false);

  // a cup-cap zigzag that straightens
  Diagram zz = dia("panel { cup 0 lr; cup 0 lr; cap 1; cap 0 }");
  Diagram straight = roundtrip_first(zz, MoveKind::M1Zig1, true);
  CHECK(serialize_diagram(straight) ==
        serialize_diagram(dia("panel { cup 0 lr; cap 0 }")));

  // crossings that cancel
  Diagram r2 = dia("panel { cup 0 lr; cup 0 lr; xp 1; xn 1; cap 1; cap 0 }");
  Diagram flat = roundtrip_first(r2, MoveKind::M1R2, true);
  CHECK(serialize_diagram(flat) ==
        serialize_diagram(dia("panel { cup 0 lr; cup 0 lr; cap 1; cap 0 }")));

  // braid relation on three strands (a braid word followed by its inverse)
  Diagram r3 = dia(
      "panel { cup 0 lr; cup 1 lr; cup 2 lr; xp 1; xp 2; xp 1; "
      "xn 1; xn 2; xn 1; cap 2; cap 1; cap 0 }");
  roundtrip_first(r3, MoveKind::M1R3Same, true);
  Diagram r3x = dia(
      "panel { cup 0 lr; cup 1 lr; cup 2 lr; xp 1; xn 2; xn 1; "
      "xp 1; xp 2; xn 1; cap 2; cap 1; cap 0 }");
  roundtrip_first(r3x, MoveKind::M1R3Mixed, true);

  // crossings sliding past extrema
  Diagram cs = dia("panel { cup 0 lr; cup 1 lr; xp 0; cap 1; cap 0 }");
  roundtrip_first(cs, MoveKind::M1CapSlide, true);
  Diagram cu = dia("panel { cup 0 lr; cup 0 lr; xp 1; cap 1; cap 0 }");
  roundtrip_first(cu, MoveKind::M1CupSlide, true);
}

TEST_CASE("coupon move round trips") {
  MoveOptions opt;
  roundtrip_first(dia(kTriple), MoveKind::M2, true);
  roundtrip_first(dia(kThreaded), MoveKind::M3, true);
  roundtrip_first(dia(kThreaded), MoveKind::M4, true);
  roundtrip_first(dia(kTriple), MoveKind::M4, true);
  roundtrip_first(dia("panel { coupon+ e 0 0; coupon- e 0 0 }"),
                  MoveKind::M4, true);
  roundtrip_first(dia(kNested), MoveKind::M6, true);
  roundtrip_first(dia(kThreaded), MoveKind::M7, true);
  roundtrip_first(dia(kCancel), MoveKind::M8, true);

  // M5 needs a loop already sitting under the absorber
  Diagram m5 = dia(
      "panel { cup 0 rl; cup 1 lr; xp 0; xn 1; cap 0; "
      "coupon+ f 0 1; coupon- f 0 1; cap 0 }");
  roundtrip_first(m5, MoveKind::M5, true);
  Diagram pushed = apply_move(m5, enumerate_sites(m5, MoveKind::M5, true)[0],
                              opt)
                       .diagram;
  // after the push the loop sits above the emitter, ready to come back
  REQUIRE_FALSE(enumerate_sites(pushed, MoveKind::M5, false).empty());
}

TEST_CASE("ring and kink insertions round trip") {
  Diagram lens = dia(kLensChain);
  roundtrip_first(lens, MoveKind::M9, true);
  roundtrip_first(lens, MoveKind::M10, true);
  roundtrip_first(lens, MoveKind::M11, true);
  roundtrip_first(lens, MoveKind::M13, true);
}

TEST_CASE("spec'd site counts") {
  // arity-3 pair: one site per adjacent leg transposition
  Diagram tri = dia(kTriple);
  CHECK(enumerate_sites(tri, MoveKind::M2, true).size() == 2);

  // isolated cancellation component: exactly one site
  Diagram cc = dia(kCancel);
  CHECK(enumerate_sites(cc, MoveKind::M8, true).size() == 1);

  // no isolated kink unknot anywhere: backward M9 has nothing to remove
  CHECK(enumerate_sites(dia(rich_text()), MoveKind::M9, false).empty());
  CHECK(enumerate_sites(dia("panel { cup 0 lr; cap 0 }"), MoveKind::M9, false)
            .empty());
}

TEST_CASE("surgery effects per kind") {
  auto effect = [](const Diagram& d, MoveKind k, bool fwd,
                   int which = 0) -> std::pair<long, int> {
    auto sites = enumerate_sites(d, k, fwd);
    REQUIRE((int)sites.size() > which);
    auto [c0, s0] = chi_sigma(d);
    Applied a = apply_move(d, sites[which]);
    auto [c1, s1] = chi_sigma(a.diagram);
    return {c1 - c0, s1 - s0};
  };
  Diagram lens = dia(kLensChain);
  Diagram threaded = dia(kThreaded);

  CHECK(effect(lens, MoveKind::M1Commute, true) == std::pair{0L, 0});
  CHECK(effect(lens, MoveKind::M1Zig1, false) == std::pair{0L, 0});
  CHECK(effect(lens, MoveKind::M1R2, false) == std::pair{0L, 0});
  CHECK(effect(dia(kTriple), MoveKind::M2, true) == std::pair{0L, 0});
  CHECK(effect(threaded, MoveKind::M3, true) == std::pair{0L, 0});
  CHECK(effect(threaded, MoveKind::M4, true) == std::pair{0L, 0});
  CHECK(effect(dia(kNested), MoveKind::M6, true) == std::pair{0L, 0});
  CHECK(effect(threaded, MoveKind::M7, true) == std::pair{2L, 0});
  CHECK(effect(dia(kCancel), MoveKind::M8, true) == std::pair{0L, 0});
  // kink insertions shift the signature by their sign
  CHECK(effect(lens, MoveKind::M9, true, 0) == std::pair{1L, 1});
  CHECK(effect(lens, MoveKind::M9, true, 1) == std::pair{1L, -1});
  CHECK(effect(lens, MoveKind::M10, true) == std::pair{2L, 0});
  CHECK(effect(lens, MoveKind::M11, true) == std::pair{2L, 0});
  CHECK(effect(lens, MoveKind::M13, true) == std::pair{0L, 0});

  // M8 trades one pair for one fewer ribbon: both counts drop together
  Diagram cc = dia(kCancel);
  SurgeryData before = surgery_data(cc);
  Applied gone = apply_move(cc, enumerate_sites(cc, MoveKind::M8, true)[0]);
  SurgeryData after = surgery_data(gone.diagram);
  CHECK(before.cx.n_pairs - after.cx.n_pairs == 1);
  CHECK(before.cx.n_ribbons - after.cx.n_ribbons == 1);
  CHECK((int)gone.diagram.panels.size() == (int)cc.panels.size());
}

TEST_CASE("tau is unchanged move by move") {
  ModularData ms = semion();
  ModularData mh = hyper2();
  Diagram rich = dia(rich_text());
  Cyc ts = tau(rich, ms).tau;
  Cyc th = tau(rich, mh).tau;
  int exercised = 0;
  for (MoveKind k : all_move_kinds(false))
    for (bool fwd : {true, false}) {
      auto sites = enumerate_sites(rich, k, fwd);
      if (sites.empty()) continue;
      for (int which : {0, (int)sites.size() - 1}) {
        Applied a = apply_move(rich, sites[which]);
        CHECK_MESSAGE(tau(a.diagram, ms).tau == ts,
                      move_kind_name(k), " fwd=", fwd, " semion");
        CHECK_MESSAGE(tau(a.diagram, mh).tau == th,
                      move_kind_name(k), " fwd=", fwd, " hyp2");
        exercised++;
      }
    }
  CHECK(exercised >= 20);
}

TEST_CASE("kappa rewrite for one, two and three strands") {
  ModularData ms = semion();
  ModularData m3 = zn(3);
  std::vector<std::string> fixtures = {
      // one strand
      "panel { cup 0 lr; cup 1 lr; xn 1; xp 0; xn 1; cap 0; cap 0 }",
      // two strands
      "panel { cup 0 lr; cup 0 lr; cup 2 lr; xn 2; xp 1; xp 0; xn 2; xn 1; "
      "cap 0; cap 1; cap 0 }",
      // three strands
      "panel { cup 0 lr; cup 0 lr; cup 0 lr; cup 3 lr; xn 3; xp 2; xp 1; "
      "xp 0; xn 3; xn 2; xn 1; cap 0; cap 2; cap 1; cap 0 }"};
  for (int n = 1; n <= 3; n++) {
    Diagram d = dia(fixtures[n - 1]);
    REQUIRE(validate(d).empty());
    auto sites = enumerate_sites(d, MoveKind::M12, true);
    // the widest match is the full ring around all n strands
    REQUIRE_FALSE(sites.empty());
    MoveSite s = sites.back();
    CHECK(s.locs[3] == n);
    CHECK(s.locs[4] == 1);  // the ring carries a +1 kink
    auto [c0, s0] = chi_sigma(d);
    Applied a = apply_move(d, s);
    auto [c1, s1] = chi_sigma(a.diagram);
    CHECK(c1 - c0 == -1);
    CHECK(s1 - s0 == -1);
    CHECK(tau(a.diagram, ms).tau == tau(d, ms).tau);
    CHECK(tau(a.diagram, m3).tau == tau(d, m3).tau);
    // the blown-down word is itself a backward redex
    Applied back = apply_move(a.diagram, a.inverse);
    CHECK(serialize_diagram(back.diagram) == serialize_diagram(d));
    bool found = false;
    for (const MoveSite& b :
         enumerate_sites(a.diagram, MoveKind::M12, false))
      if (b.locs == s.locs) found = true;
    CHECK(found);
  }
}

TEST_CASE("eta macro agrees with its primitive expansion") {
  Diagram bases[] = {dia("panel { cup 0 lr; cap 0 }"), dia(kLensChain)};
  for (const Diagram& d : bases) {
    auto sites = enumerate_sites(d, MoveKind::M11, true);
    REQUIRE_FALSE(sites.empty());
    for (int which : {0, (int)sites.size() / 2}) {
      const MoveSite& s = sites[which];
      Applied direct = apply_move(d, s);
      auto parts = expand_macro(d, s);
      REQUIRE(parts.size() == 2);
      CHECK(parts[0].kind == MoveKind::M10);
      CHECK(parts[1].kind == MoveKind::M13);
      Diagram step = d;
      for (const MoveSite& p : parts) step = apply_move(step, p).diagram;
      CHECK(serialize_diagram(step) == serialize_diagram(direct.diagram));
    }
  }
  // only the eta macro expands
  Diagram lens = dia(kLensChain);
  auto m9 = enumerate_sites(lens, MoveKind::M9, true);
  CHECK_THROWS_AS(expand_macro(lens, m9[0]), MoveError);
}

TEST_CASE("stale sites are rejected") {
  Diagram d = dia(kLensChain);
  auto sites = enumerate_sites(d, MoveKind::M1Commute, true);
  REQUIRE_FALSE(sites.empty());
  Diagram moved =
      apply_move(d, enumerate_sites(d, MoveKind::M9, true)[0]).diagram;
  CHECK_THROWS_AS(apply_move(moved, sites[0]), MoveError);
}

TEST_CASE("one-slide needs separated panels") {
  // both coupons of the slid-through pair in one panel
  Diagram d = dia(
      "panel { cup 0 rl; coupon+ h 0 1; coupon+ l 0 1; "
      "coupon- l 0 1; coupon- h 0 1; cap 0 }");
  REQUIRE(validate(d).empty());
  CHECK(enumerate_sites(d, MoveKind::M6, true).empty());
  MoveOptions macro;
  macro.macro_mode = true;
  auto sites = enumerate_sites(d, MoveKind::M6, true, macro);
  REQUIRE_FALSE(sites.empty());
  Applied a = apply_move(d, sites[0], macro);
  Applied back = apply_move(a.diagram, a.inverse, macro);
  CHECK(serialize_diagram(back.diagram) == serialize_diagram(d));
}

TEST_CASE("boundary moves on an admissible tangle") {
  Diagram id2 = dia("tangle in=(1) out=(1) { }");
  REQUIRE(validate(id2).empty());
  REQUIRE(check_admissible(id2).ok);
  auto sites = enumerate_sites(id2, MoveKind::M14, true);
  // one strip below, one above
  CHECK(sites.size() == 2);
  for (const MoveSite& s : sites) {
    Applied a = apply_move(id2, s);
    CHECK(validate(a.diagram).empty());
    CHECK(check_admissible(a.diagram).ok);
    Applied back = apply_move(a.diagram, a.inverse);
    CHECK(serialize_diagram(back.diagram) == serialize_diagram(id2));
  }

  Diagram sweep = dia("tangle in=(1,1) out=(1,1) { xn 1; xn 0 }");
  REQUIRE(validate(sweep).empty());
  REQUIRE(check_admissible(sweep).ok);
  auto s15 = enumerate_sites(sweep, MoveKind::M15, true);
  REQUIRE_FALSE(s15.empty());
  Applied a = apply_move(sweep, s15[0]);
  CHECK(serialize_diagram(a.diagram) ==
        serialize_diagram(dia("tangle in=(1,1) out=(1,1) { xp 1; xp 0 }")));
  Applied back = apply_move(a.diagram, a.inverse);
  CHECK(serialize_diagram(back.diagram) == serialize_diagram(sweep));

  // closed diagrams expose no boundary moves
  CHECK(enumerate_sites(dia(kLensChain), MoveKind::M14, true).empty());
  CHECK(enumerate_sites(dia(kLensChain), MoveKind::M15, true).empty());
}

TEST_CASE("random walks replay bit for bit") {
  // growing from nothing with kink and ring insertions
  Diagram empty = dia("panel { }");
  std::vector<MoveKind> grow = {MoveKind::M9, MoveKind::M10};
  WalkResult w1 = random_walk(empty, 42, 10, grow);
  WalkResult w2 = random_walk(empty, 42, 10, grow);
  CHECK(serialize_diagram(w1.diagram) == serialize_diagram(w2.diagram));
  REQUIRE(w1.log.size() == 10);
  REQUIRE(w2.log.size() == 10);
  for (int i = 0; i < 10; i++) {
    CHECK(w1.log[i].site == w2.log[i].site);
    CHECK(w1.log[i].diagram_hash == w2.log[i].diagram_hash);
    CHECK(w1.log[i].kind == w2.log[i].kind);
  }
  CHECK(w1.applied + w1.skipped == 10);
  CHECK(w1.applied > 0);

  // zero steps change nothing
  Diagram unknot = dia("panel { cup 0 lr; cap 0 }");
  WalkResult w0 = random_walk(unknot, 0, 0, all_move_kinds(false));
  CHECK(serialize_diagram(w0.diagram) == serialize_diagram(unknot));
  CHECK(w0.log.empty());

  // a kind with no sites anywhere just logs skips
  WalkResult ws = random_walk(unknot, 5, 4, {MoveKind::M5});
  CHECK(ws.applied == 0);
  CHECK(ws.skipped == 4);
  CHECK(serialize_diagram(ws.diagram) == serialize_diagram(unknot));
}

TEST_CASE("long walk preserves tau on the lens chain") {
  ModularData ms = semion();
  ModularData m3 = zn(3);
  Diagram lens = dia(kLensChain);
  Cyc ts = tau(lens, ms).tau;
  Cyc t3 = tau(lens, m3).tau;
  WalkResult w =
      random_walk(lens, 7, 200, all_move_kinds(false), MoveOptions{}, 100);
  CHECK(w.applied > 50);
  CHECK(validate(w.diagram).empty());
  CHECK(tau(w.diagram, ms).tau == ts);
  CHECK(tau(w.diagram, m3).tau == t3);
}
