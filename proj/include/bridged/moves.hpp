#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bridged/diagram.hpp"

namespace bridged {

// Local rewrite rules on slice-word diagrams.  Every kind comes in a
// forward and a backward direction and each application produces the
// site that undoes it exactly (syntactic identity after canonical
// serialization).  All rules preserve the evaluation of the diagram;
// the ones that change the surgery data do so by the documented
// (delta chi, delta sigma) below.
//
//   M1Commute   swap two adjacent tiles with disjoint support   (0, 0)
//   M1Zig1      straighten [cup p; cap p+1] / insert a zig      (0, 0)
//   M1Zig2      straighten [cup p; cap p-1] / insert a zag      (0, 0)
//   M1R2        cancel [x+- p; x-+ p] / insert such a pair      (0, 0)
//   M1R3Same    braid relation, equal signs                     (0, 0)
//   M1R3Mixed   braid relation, mixed signs                     (0, 0)
//   M1CapSlide  slide a cap across a crossing                   (0, 0)
//   M1CupSlide  slide a cup across a crossing                   (0, 0)
//   M2          cancelling braidings across a coupon pair       (0, 0)
//   M3          cancelling full twists across a coupon pair     (0, 0)
//   M4          flip a coupon pair (swap '+'/'-', fold legs)    (0, 0)
//   M5          transfer an encircling loop across a pair       (0, 0)
//   M6          slide one coupon pair through another           (0, 0)
//   M7          coupon pair <-> 0-framed encircling ring        (+2, 0)
//   M8          cancel an isolated arity-1 pair and its loop    (0, 0)
//   M9          remove/insert an isolated +-1-kinked unknot     (+1, +-1)
//   M10         remove/insert an isolated clasped ring pair     (+2, 0)
//   M11         ring pair clasped around a strand (macro)       (+2, 0)
//   M12         kinked ring around a bundle <-> full twist      (-1, -kink)
//   M13         slide a component over a closed component      (0, 0)
//   M14         pinch a boundary pair through a 0-ring (tangle) --
//   M15         sweep a strand across a boundary group (tangle) --
//
// The deltas are for the forward direction; backward negates them.
// M14/M15 apply only to diagrams with boundary, all other kinds only
// enumerate sites that keep the diagram valid.
enum class MoveKind {
  M1Commute,
  M1Zig1,
  M1Zig2,
  M1R2,
  M1R3Same,
  M1R3Mixed,
  M1CapSlide,
  M1CupSlide,
  M2,
  M3,
  M4,
  M5,
  M6,
  M7,
  M8,
  M9,
  M10,
  M11,
  M12,
  M13,
  M14,
  M15,
};

const char* move_kind_name(MoveKind k);

// All kinds applicable to a diagram (M14/M15 need a boundary).
std::vector<MoveKind> all_move_kinds(bool tangle);

// One applicable rewrite.  `locs` is kind-specific bookkeeping (panel,
// slice, position, pair ids, signs...), `payload` carries extra state
// for induced inverses that cannot be reconstructed from the result
// (an original pair name, or the pre-slide diagram for M11/M13).
// `redex_hash` fingerprints the matched pattern so that applying a
// site to a diagram it was not enumerated on is rejected.
struct MoveSite {
  MoveKind kind = MoveKind::M1Commute;
  bool forward = true;
  std::vector<int> locs;
  std::string payload;
  uint64_t redex_hash = 0;
  std::string desc;
};

struct MoveOptions {
  // Allow M6 to slide through a pair whose two coupons share a panel,
  // and M11/M12 expansions to run their inner slides unrestricted.
  bool macro_mode = false;
};

struct MoveError : std::runtime_error {
  explicit MoveError(const std::string& m) : std::runtime_error(m) {}
};

// Deterministic enumeration of every site where `kind` applies in the
// given direction.  The order is stable under re-enumeration.
std::vector<MoveSite> enumerate_sites(const Diagram& d, MoveKind kind,
                                      bool forward,
                                      const MoveOptions& opt = {});

struct Applied {
  Diagram diagram;
  MoveSite inverse;  // applying this to `diagram` restores the input
};

// Apply a site produced by enumerate_sites (or an induced inverse) to
// the diagram it was enumerated on.  Throws MoveError when the site is
// stale (the diagram changed under it) and logic_error if a rewrite
// ever produces an invalid word.
Applied apply_move(const Diagram& d, const MoveSite& site,
                   const MoveOptions& opt = {});

// Expand a macro move (M11, M12) into the primitive applications that
// realize it.  The composite of the returned steps equals the direct
// apply_move result; used to cross-check the macros.
std::vector<MoveSite> expand_macro(const Diagram& d, const MoveSite& site,
                                   const MoveOptions& opt = {});

struct MoveLogEntry {
  int step = 0;
  MoveKind kind = MoveKind::M1Commute;
  bool forward = true;
  bool applied = false;  // false: no site was available, step skipped
  std::string site;
  uint64_t diagram_hash = 0;
};

struct WalkResult {
  Diagram diagram;
  std::vector<MoveLogEntry> log;
  int applied = 0;
  int skipped = 0;
};

// Seeded random walk: `steps` draws over `kinds` (uniform kind, then
// uniform direction, then uniform site).  Steps without a site are
// logged and skipped.  Identical seeds replay identical walks.  When
// the diagram outgrows `tile_budget`, only shrinking directions are
// drawn for size-changing kinds until it fits again.
WalkResult random_walk(const Diagram& d, uint64_t seed, int steps,
                       const std::vector<MoveKind>& kinds,
                       const MoveOptions& opt = {}, int tile_budget = 160);

}  // namespace bridged
