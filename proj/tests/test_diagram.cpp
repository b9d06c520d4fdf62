#include <algorithm>

#include "bridged/diagram.hpp"
#include "doctest.h"

using namespace bridged;

namespace {

int count_kind(const ComponentInfo& c, CompEvent::Kind k) {
  int n = 0;
  for (const auto& e : c.events) n += e.kind == k ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("parsing and canonical serialization") {
  std::string canon =
      "panel {\n"
      "  cup 0 lr\n"
      "  xn 0\n"
      "  cap 0\n"
      "}\n";
  Diagram d = parse_diagram(canon);
  CHECK(d.panels.size() == 1);
  CHECK(d.panels[0].word.size() == 3);
  CHECK(!d.tangle);
  CHECK(serialize_diagram(d) == canon);

  // Semicolons and comments are whitespace; layout does not matter.
  Diagram d2 = parse_diagram("panel { cup 0 lr; xn 0; cap 0 } # a kink\n");
  CHECK(d2 == d);
  CHECK(diagram_hash(d2) == diagram_hash(d));

  Diagram other = parse_diagram("panel { cup 0 lr; cap 0 }");
  CHECK(diagram_hash(other) != diagram_hash(d));

  Diagram t = parse_diagram(
      "tangle in=(1) out=(0,2) {\n  coupon- f 0 2\n  coupon+ f 0 2\n}\n");
  CHECK(t.tangle);
  CHECK(t.in_groups == std::vector<int>{1});
  CHECK(t.out_groups == std::vector<int>{0, 2});
  CHECK(t.bottom_arity() == 2);
  CHECK(t.top_arity() == 4);
  CHECK(parse_diagram(serialize_diagram(t)) == t);

  CHECK_THROWS_AS(parse_diagram(""), ParseError);
  CHECK_THROWS_AS(parse_diagram("panel { cup 0 xx }"), ParseError);
  CHECK_THROWS_AS(parse_diagram("panel { twist 0 }"), ParseError);
  CHECK_THROWS_AS(parse_diagram("panel { cup 0 lr } tangle in=() out=() { }"),
                  ParseError);
  try {
    parse_diagram("panel {\n  cup 0 qq\n}");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("structural validation") {
  CHECK(validate(parse_diagram("panel { }")).empty());
  CHECK(validate(parse_diagram("panel { cup 0 lr; cap 0 }")).empty());

  auto errs = validate(parse_diagram("panel { cap 0 }"));
  REQUIRE(!errs.empty());
  CHECK(errs[0].msg.find("past the current strand count") != std::string::npos);

  errs = validate(parse_diagram("panel { cup 0 lr }"));
  REQUIRE(!errs.empty());
  CHECK(errs[0].msg.find("not closed") != std::string::npos);

  errs = validate(parse_diagram("panel { coupon- p1 0 2; cap 0 }"));
  REQUIRE(!errs.empty());
  CHECK(errs[0].msg == "unpaired coupon p1 (0 '+', 1 '-')");

  errs = validate(
      parse_diagram("panel { coupon- p 0 2; cap 0; coupon+ p 0 0 }"));
  REQUIRE(!errs.empty());
  CHECK(errs[0].msg.find("mismatched arities") != std::string::npos);

  // A cap cannot join two strands running the same way.
  errs = validate(parse_diagram("panel { cup 0 lr; cup 1 lr; cap 0; cap 0 }"));
  REQUIRE(!errs.empty());
  CHECK(errs[0].msg.find("conflicting cup orientations") != std::string::npos);
  CHECK(errs[0].msg.find("->") != std::string::npos);  // cycle witness

  CHECK_THROWS_AS(require_valid(parse_diagram("panel { cap 0 }")),
                  std::runtime_error);
}

TEST_CASE("tracing unknots and kinks") {
  Traced empty = trace_components(parse_diagram("panel { }"));
  CHECK(empty.comps.empty());
  CHECK(empty.closed_count() == 0);

  Traced unk = trace_components(parse_diagram("panel { cup 0 lr; cap 0 }"));
  REQUIRE(unk.comps.size() == 1);
  CHECK(unk.comps[0].closed);
  CHECK(unk.comps[0].framing == 0);
  CHECK(unk.comps[0].events.empty());
  CHECK(unk.crossings.empty());

  // One negative tile on an lr cup makes the positive kink.
  Traced kink =
      trace_components(parse_diagram("panel { cup 0 lr; xn 0; cap 0 }"));
  REQUIRE(kink.comps.size() == 1);
  CHECK(kink.comps[0].framing == 1);
  REQUIRE(kink.crossings.size() == 1);
  CHECK(kink.crossings[0].sign == 1);
  CHECK(kink.crossings[0].curl);
  REQUIRE(kink.comps[0].events.size() == 1);
  CHECK(kink.comps[0].events[0].kind == CompEvent::Curl);
  CHECK(kink.comps[0].events[0].sign == 1);
  CHECK(framing_vector(parse_diagram("panel { cup 0 lr; xn 0; cap 0 }")) ==
        std::vector<long>{1});

  // Two positive tiles on the same strand give two negative curls.
  Traced dneg =
      trace_components(parse_diagram("panel { cup 0 lr; xp 0; xp 0; cap 0 }"));
  REQUIRE(dneg.comps.size() == 1);
  CHECK(dneg.comps[0].framing == -2);
  CHECK(count_kind(dneg.comps[0], CompEvent::Curl) == 2);
  for (const auto& x : dneg.crossings) {
    CHECK(x.curl);
    CHECK(x.sign == -1);
  }
}

TEST_CASE("tracing the Hopf link") {
  Diagram d = parse_diagram(
      "panel { cup 0 lr; cup 2 lr; xp 1; xp 1; cap 0; cap 0 }");
  Traced tr = trace_components(d);
  REQUIRE(tr.comps.size() == 2);
  for (const auto& c : tr.comps) {
    CHECK(c.closed);
    CHECK(c.framing == 0);
    CHECK(c.events.size() == 2);
    CHECK(count_kind(c, CompEvent::Over) == 1);
    CHECK(count_kind(c, CompEvent::Under) == 1);
  }
  REQUIRE(tr.crossings.size() == 2);
  for (const auto& x : tr.crossings) {
    CHECK(x.comp_a != x.comp_b);
    CHECK(!x.curl);
    CHECK(x.sign == tr.crossings[0].sign);  // coherent linking signs
  }
  // The two strands are oppositely oriented here, so xp links negatively.
  CHECK(tr.crossings[0].sign == -1);

  Diagram m = parse_diagram(
      "panel { cup 0 lr; cup 2 lr; xn 1; xn 1; cap 0; cap 0 }");
  CHECK(trace_components(m).crossings[0].sign == 1);
}

TEST_CASE("retiming leaves the traced data unchanged") {
  Diagram seq = parse_diagram("panel { cup 0 lr; cap 0; cup 0 lr; cap 0 }");
  Diagram par = parse_diagram("panel { cup 0 lr; cup 2 lr; cap 2; cap 0 }");
  Traced a = trace_components(seq), b = trace_components(par);
  CHECK(a.comps.size() == 2);
  CHECK(b.comps.size() == 2);
  for (const auto& tr : {a, b})
    for (const auto& c : tr.comps) {
      CHECK(c.closed);
      CHECK(c.framing == 0);
      CHECK(c.events.empty());
    }
}

TEST_CASE("coupon passages") {
  // A closed loop threaded once through a coupon pair, running upward.
  Diagram up = parse_diagram("panel { coupon- f 0 1; coupon+ f 0 1 }");
  Traced tr = trace_components(up);
  REQUIRE(tr.comps.size() == 1);
  CHECK(tr.comps[0].closed);
  REQUIRE(tr.passages.size() == 1);
  CHECK(tr.passages[0].pair == 0);
  CHECK(tr.passages[0].slot == 0);
  CHECK(tr.passages[0].sign == 1);
  REQUIRE(tr.coupons.size() == 1);
  CHECK(tr.coupons[0].arity == 1);
  CHECK(tr.coupons[0].in_slice == 1);
  CHECK(tr.coupons[0].out_slice == 0);

  // The rl cup sends the strand downward into the '+' coupon.
  Diagram down = parse_diagram(
      "panel { cup 0 rl; coupon+ f 0 1; coupon- f 0 1; cap 0 }");
  Traced td = trace_components(down);
  REQUIRE(td.passages.size() == 1);
  CHECK(td.passages[0].sign == -1);

  // Arity-0 pairs are legal and carry no strands.
  Diagram nul = parse_diagram("panel { coupon+ e 0 0; coupon- e 0 0 }");
  Traced tn = trace_components(nul);
  CHECK(tn.comps.empty());
  CHECK(tn.passages.empty());
  CHECK(tn.coupons[0].arity == 0);

  // One strand threading both slots of a pair: the legs swap between the
  // '-' and the '+', so the walk passes the handle twice.
  Diagram two = parse_diagram("panel { coupon- g 0 2; xp 0; coupon+ g 0 2 }");
  Traced t2 = trace_components(two);
  REQUIRE(t2.comps.size() == 1);
  CHECK(t2.passages.size() == 2);
  for (const auto& p : t2.passages) CHECK(p.sign == 1);
  CHECK(t2.comps[0].framing == 1);  // the swap is a genuine self-crossing
  CHECK(!t2.crossings[0].curl);
}

TEST_CASE("tangle boundaries and admissibility") {
  Diagram id1 = parse_diagram("tangle in=(1) out=(1) { }");
  CHECK(validate(id1).empty());
  Traced tr = trace_components(id1);
  CHECK(tr.comps.size() == 2);
  CHECK(tr.closed_count() == 0);
  CHECK(tr.comp_of_bottom == std::vector<int>{0, 1});
  CHECK(tr.comp_of_top == std::vector<int>{0, 1});
  REQUIRE(tr.comps[0].ends.size() == 2);
  CHECK(tr.comps[0].ends[0] == std::pair<int, int>{0, 0});
  CHECK(tr.comps[0].ends[1] == std::pair<int, int>{1, 0});
  CHECK(check_admissible(id1).ok);

  // Boundary legs crossing over each other stay admissible.
  Diagram braided = parse_diagram("tangle in=(1) out=(1) { xp 0 }");
  CHECK(check_admissible(braided).ok);

  // Interface mismatch: the word leaves nothing at the top.
  Diagram mism = parse_diagram("tangle in=(0) out=(1) { }");
  CHECK(validate(mism).empty());
  Admissibility bad = check_admissible(mism);
  CHECK(!bad.ok);
  REQUIRE(!bad.problems.empty());
  CHECK(bad.problems[0].find("boundary interface mismatch") !=
        std::string::npos);

  // Folding a handle pair onto itself co-directed is non-orientable: the
  // diagram is valid but fails admissibility with a cycle witness.
  Diagram mob = parse_diagram(
      "tangle in=(1) out=(1) { cup 1 rl; cap 0; cup 2 rl; cap 1 }");
  CHECK(validate(mob).empty());
  CHECK_NOTHROW(trace_components(mob));
  Admissibility rep = check_admissible(mob);
  CHECK(!rep.ok);
  REQUIRE(!rep.problems.empty());
  CHECK(rep.problems[0].find("non-orientable") != std::string::npos);
  CHECK(rep.problems[0].find("->") != std::string::npos);

  // Closed diagrams are vacuously admissible.
  CHECK(check_admissible(parse_diagram("panel { }")).ok);

  // A genus-2 group: four legs, pairs (0,1) and (2,3) must anti-align.
  Diagram g2 = parse_diagram("tangle in=(2) out=(2) { }");
  CHECK(check_admissible(g2).ok);
  CHECK(trace_components(g2).comps.size() == 4);
}

TEST_CASE("boundary directions resolve from cups across the word") {
  // Bottom leg 0 is forced downward: it feeds the left leg of an rl cap
  // partner... build: leg0 joined by cap to an lr cup's left (up) leg.
  Diagram d = parse_diagram(
      "tangle in=(1) out=(1) { cup 1 lr; cap 0; cup 1 rl; cap 2 }");
  // live: [b0 b1] -> cup1 lr: [b0 L+ R- b1]; cap0 joins b0,L+ so b0 runs down;
  // cup1 rl: [R- L2- R2+ b1]; cap2 joins R2+,b1 so b1 runs down as well.
  CHECK(validate(d).empty());
  Traced tr = trace_components(d);
  REQUIRE(tr.bottom_dir.size() == 2);
  CHECK(tr.bottom_dir[0] == -1);
  CHECK(tr.bottom_dir[1] == -1);
  REQUIRE(tr.top_dir.size() == 2);
  // Top ends continue the cups that were left open.
  CHECK(tr.top_dir[0] == -1);
  CHECK(tr.top_dir[1] == -1);
}
