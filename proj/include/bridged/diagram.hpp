#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace bridged {

enum class TileKind : uint8_t { Cup, Cap, XP, XN, CouponIn, CouponOut };

struct Tile {
  TileKind kind = TileKind::Cup;
  int pos = 0;
  bool left_up = true;  // cup only: "lr" = left leg directed up
  int pair = -1;        // coupon only: index into Diagram::pair_names
  int arity = 0;        // coupon only
  bool operator==(const Tile&) const = default;
};

// Strand-count delta of a tile: how many ends it consumes / produces.
int tile_in(const Tile& t);
int tile_out(const Tile& t);

Tile cup(int pos, bool left_up = true);
Tile cap(int pos);
Tile xp(int pos);
Tile xn(int pos);
Tile coupon_in(int pair, int pos, int arity);
Tile coupon_out(int pair, int pos, int arity);

struct Panel {
  std::vector<Tile> word;  // one tile per slice, bottom to top
  bool operator==(const Panel&) const = default;
};

struct Diagram {
  std::vector<Panel> panels;
  std::vector<std::string> pair_names;  // coupon pair id -> name
  bool tangle = false;
  std::vector<int> in_groups, out_groups;  // boundary group genera
  bool operator==(const Diagram&) const = default;

  int bottom_arity() const;
  int top_arity() const;
  int pair_count() const { return (int)pair_names.size(); }
  int ensure_pair(const std::string& name);  // index, adding if new
  std::string fresh_pair_name(const std::string& stem = "p");
};

struct ParseError {
  int line = 0, col = 0;
  std::string msg;
};

Diagram parse_diagram(const std::string& text);  // throws ParseError
std::string serialize_diagram(const Diagram& d);
uint64_t diagram_hash(const Diagram& d);

struct ValidationError {
  int panel = -1, slice = -1;
  std::string msg;
};

std::vector<ValidationError> validate(const Diagram& d);
void require_valid(const Diagram& d);  // throws std::runtime_error

// ---- component tracing ----

struct CrossingInfo {
  int id = 0, panel = 0, slice = 0, pos = 0;
  int tile_sign = +1;  // +1 for xp, -1 for xn
  int comp_a = -1;     // strand entering bottom-left (leaves top-right)
  int comp_b = -1;     // strand entering bottom-right
  int sign = +1;       // geometric sign: tile_sign * dir(a) * dir(b)
  bool curl = false;   // the two legs of one strand join via one extremum
};

struct CompEvent {
  enum Kind : uint8_t { Over, Under, Curl, Pass } kind = Over;
  int ref = -1;   // crossing id, or pair id for Pass
  int slot = 0;   // coupon slot for Pass
  int dir = +1;   // strand direction at the event, +1 = upward
  int sign = 0;   // geometric crossing / curl / passage sign
};

struct ComponentInfo {
  int id = 0;
  bool closed = true;
  long framing = 0;                             // signed self-crossings
  std::vector<CompEvent> events;                // traversal order along the
                                                // canonical orientation
  std::vector<std::pair<int, int>> ends;        // open arcs: (0=bottom/1=top, pos)
};

struct PassageInfo {
  int pair = 0, slot = 0, comp = 0;
  int sign = +1;  // +1 iff the strand runs into the '+' coupon
};

struct CouponLoc {
  int pair = -1;
  int in_panel = -1, in_slice = -1, in_pos = -1, arity = 0;
  int out_panel = -1, out_slice = -1, out_pos = -1;
};

struct Traced {
  std::vector<ComponentInfo> comps;
  std::vector<CrossingInfo> crossings;
  std::vector<PassageInfo> passages;   // component-major, traversal order
  std::vector<CouponLoc> coupons;      // indexed by pair id
  std::vector<int> comp_of_bottom, comp_of_top;  // per boundary position
  std::vector<int> bottom_dir, top_dir;          // resolved direction, +1 up

  int closed_count() const;
};

Traced trace_components(const Diagram& d);  // throws if d is invalid
std::vector<long> framing_vector(const Diagram& d);

struct Admissibility {
  bool ok = true;
  std::vector<std::string> problems;  // first violating cycle, counts, ...
};
Admissibility check_admissible(const Diagram& d);

}  // namespace bridged
