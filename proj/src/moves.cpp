#include "bridged/moves.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "portgraph.hpp"

namespace bridged {
namespace {

using detail::PortGraph;

Tile xt(int tsign, int pos) { return tsign > 0 ? xp(pos) : xn(pos); }

bool is_x(const Tile& t) {
  return t.kind == TileKind::XP || t.kind == TileKind::XN;
}
int xsign(const Tile& t) { return t.kind == TileKind::XP ? +1 : -1; }

std::vector<Tile>& word_of(Diagram& d, int p) { return d.panels[p].word; }

void insert_tiles(Diagram& d, int p, int s, const std::vector<Tile>& ts) {
  auto& w = word_of(d, p);
  w.insert(w.begin() + s, ts.begin(), ts.end());
}

void erase_tiles(Diagram& d, int p, int s, int count) {
  auto& w = word_of(d, p);
  w.erase(w.begin() + s, w.begin() + s + count);
}

std::string fmt(const char* f, ...) {
  char buf[160];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- stale-site fingerprints -------------------------------------------

uint64_t mix(uint64_t h, uint64_t x) {
  h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

uint64_t panel_fingerprint(const Diagram& d, int pi) {
  uint64_t h = 1469598103934665603ull;
  h = mix(h, (uint64_t)pi);
  if (pi < 0 || pi >= (int)d.panels.size()) return h;
  for (const Tile& t : d.panels[pi].word) {
    h = mix(h, (uint64_t)t.kind);
    h = mix(h, (uint64_t)(t.pos + 1));
    h = mix(h, t.left_up ? 7 : 11);
    h = mix(h, (uint64_t)(t.pair + 2));
    h = mix(h, (uint64_t)t.arity);
  }
  return h;
}

uint64_t pair_fingerprint(const Diagram& d, int pr) {
  uint64_t h = 14695981039346656037ull;
  h = mix(h, (uint64_t)pr);
  if (pr >= 0 && pr < d.pair_count())
    for (char c : d.pair_names[pr]) h = mix(h, (uint64_t)(unsigned char)c);
  return h;
}

uint64_t neighborhood_hash(const Diagram& d, const std::vector<int>& panels,
                           const std::vector<int>& pairs) {
  uint64_t h = mix(0x6d6f7665ull, (uint64_t)d.pair_count());
  h = mix(h, (uint64_t)d.panels.size());
  for (int p : panels) h = mix(h, panel_fingerprint(d, p));
  for (int q : pairs) h = mix(h, pair_fingerprint(d, q));
  return h;
}

// ---- local pattern generators ------------------------------------------

// Meridian ring around the n strands at positions [p, p+n): one arc passes
// under the bundle, the return arc over it; framing 0, one linking with
// each encircled strand.
std::vector<Tile> ring_tiles(int p, int n) {
  std::vector<Tile> w;
  w.push_back(cup(p + n, true));
  for (int k = p + n - 1; k >= p; k--) w.push_back(xp(k));
  for (int k = p + n; k >= p + 1; k--) w.push_back(xn(k));
  w.push_back(cap(p));
  return w;
}

// Same ring carrying one kink of geometric sign eps on its own band.
std::vector<Tile> kappa_tiles(int p, int n, int eps) {
  std::vector<Tile> w;
  w.push_back(cup(p + n, true));
  w.push_back(xt(-eps, p + n));  // curl on the ring's own legs
  for (int k = p + n - 1; k >= p; k--) w.push_back(xp(k));
  for (int k = p + n; k >= p + 1; k--) w.push_back(xn(k));
  w.push_back(cap(p));
  return w;
}

// One curl of geometric sign s on the strand at position p whose resolved
// direction is `bit`.
std::vector<Tile> curl_tiles(int p, int s, int bit) {
  return {cup(p + 1, bit > 0), xt(s, p), cap(p + 1)};
}

// Full ribbon twist of sign s on the n strands at [base, base+n): one curl
// per strand plus the pure braid full twist, crossing letters chosen so
// that every pair of strands picks up linking s and every strand framing s.
std::vector<Tile> theta_tiles(int base, int n, int s,
                              const std::vector<int>& bits) {
  std::vector<Tile> w;
  for (int k = 0; k < n; k++) {
    auto c = curl_tiles(base + k, s, bits[k]);
    w.insert(w.end(), c.begin(), c.end());
  }
  // a full twist: n rounds of the (n-1)-crossing staircase, every crossing
  // of the same handedness as the curls.  The tile letter is constant; the
  // signed contribution of each crossing then scales with the product of
  // the two direction bits, which is exactly how a twist region counts.
  for (int round = 0; round < n; round++)
    for (int i = 0; i + 1 < n; i++) w.push_back(xt(s, base + i));
  return w;
}

bool match_range(const std::vector<Tile>& w, int s,
                 const std::vector<Tile>& pat) {
  if (s < 0 || s + (int)pat.size() > (int)w.size()) return false;
  for (int k = 0; k < (int)pat.size(); k++)
    if (!(w[s + k] == pat[k])) return false;
  return true;
}

// ---- resolved-direction scan -------------------------------------------

struct Scan {
  PortGraph pg;
  bool ok = false;
  explicit Scan(const Diagram& d, bool with_strips = false) {
    std::vector<ValidationError> errs;
    if (!pg.build(d, errs)) return;
    if (!pg.solve_dirs(with_strips, errs)) return;
    ok = true;
  }
  int width(int p, int s) const { return (int)pg.levels[p][s].size(); }
  int bit(int p, int s, int q) const { return pg.bit[pg.levels[p][s][q]]; }
};

struct PairLoc {
  int in_panel = -1, in_slice = -1, in_pos = -1;
  int out_panel = -1, out_slice = -1, out_pos = -1;
  int arity = -1;
  bool ok() const { return in_panel >= 0 && out_panel >= 0; }
};

PairLoc locate_pair(const Diagram& d, int pr) {
  PairLoc L;
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    const auto& w = d.panels[pi].word;
    for (int si = 0; si < (int)w.size(); si++) {
      if (w[si].pair != pr) continue;
      if (w[si].kind == TileKind::CouponIn) {
        L.in_panel = pi;
        L.in_slice = si;
        L.in_pos = w[si].pos;
        L.arity = w[si].arity;
      } else if (w[si].kind == TileKind::CouponOut) {
        L.out_panel = pi;
        L.out_slice = si;
        L.out_pos = w[si].pos;
        L.arity = w[si].arity;
      }
    }
  }
  return L;
}

// Removes pair index pr from the diagram's name table, renumbering tiles.
void drop_pair(Diagram& d, int pr) {
  d.pair_names.erase(d.pair_names.begin() + pr);
  for (auto& pan : d.panels)
    for (auto& t : pan.word)
      if (t.pair > pr) t.pair--;
}

// Re-introduces a pair name at index pr, shifting tile ids up.
void revive_pair(Diagram& d, int pr, const std::string& name) {
  for (auto& pan : d.panels)
    for (auto& t : pan.word)
      if (t.pair >= pr) t.pair++;
  d.pair_names.insert(d.pair_names.begin() + pr, name);
}

[[noreturn]] void stale(const MoveSite& s) {
  throw MoveError(fmt("stale move site: %s no longer matches the diagram",
                      s.desc.empty() ? move_kind_name(s.kind) : s.desc.c_str()));
}

void check_locs(const MoveSite& s, size_t n) {
  if (s.locs.size() < n)
    throw MoveError(fmt("malformed %s site: expected %zu location fields",
                        move_kind_name(s.kind), n));
}

}  // namespace

const char* move_kind_name(MoveKind k) {
  switch (k) {
    case MoveKind::M1Commute: return "M1.commute";
    case MoveKind::M1Zig1: return "M1.zig1";
    case MoveKind::M1Zig2: return "M1.zig2";
    case MoveKind::M1R2: return "M1.r2";
    case MoveKind::M1R3Same: return "M1.r3";
    case MoveKind::M1R3Mixed: return "M1.r3x";
    case MoveKind::M1CapSlide: return "M1.capslide";
    case MoveKind::M1CupSlide: return "M1.cupslide";
    case MoveKind::M2: return "M2";
    case MoveKind::M3: return "M3";
    case MoveKind::M4: return "M4";
    case MoveKind::M5: return "M5";
    case MoveKind::M6: return "M6";
    case MoveKind::M7: return "M7";
    case MoveKind::M8: return "M8";
    case MoveKind::M9: return "M9";
    case MoveKind::M10: return "M10";
    case MoveKind::M11: return "M11";
    case MoveKind::M12: return "M12";
    case MoveKind::M13: return "M13";
    case MoveKind::M14: return "M14";
    case MoveKind::M15: return "M15";
  }
  return "?";
}

std::vector<MoveKind> all_move_kinds(bool tangle) {
  std::vector<MoveKind> ks = {
      MoveKind::M1Commute, MoveKind::M1Zig1,    MoveKind::M1Zig2,
      MoveKind::M1R2,      MoveKind::M1R3Same,  MoveKind::M1R3Mixed,
      MoveKind::M1CapSlide, MoveKind::M1CupSlide,
      MoveKind::M2,        MoveKind::M3,        MoveKind::M4,
      MoveKind::M5,        MoveKind::M6,        MoveKind::M7,
      MoveKind::M8,        MoveKind::M9,        MoveKind::M10,
      MoveKind::M11,       MoveKind::M12,       MoveKind::M13};
  if (tangle) {
    ks.push_back(MoveKind::M14);
    ks.push_back(MoveKind::M15);
  }
  return ks;
}

// =========================================================================
// Enumeration
// =========================================================================

namespace {

MoveSite mk(MoveKind k, bool fwd, std::vector<int> locs, uint64_t h,
            std::string desc) {
  MoveSite s;
  s.kind = k;
  s.forward = fwd;
  s.locs = std::move(locs);
  s.redex_hash = h;
  s.desc = std::move(desc);
  return s;
}

uint64_t h_panel(const Diagram& d, int p) { return neighborhood_hash(d, {p}, {}); }

uint64_t h_pair(const Diagram& d, int pr) {
  PairLoc L = locate_pair(d, pr);
  return neighborhood_hash(d, {L.in_panel, L.out_panel}, {pr});
}

uint64_t h_global(const Diagram& d) {
  std::vector<int> ps(d.panels.size());
  for (int i = 0; i < (int)ps.size(); i++) ps[i] = i;
  std::vector<int> qs(d.pair_count());
  for (int i = 0; i < (int)qs.size(); i++) qs[i] = i;
  return neighborhood_hash(d, ps, qs);
}

void enum_commute(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    const auto& w = d.panels[pi].word;
    for (int s = 0; s + 1 < (int)w.size(); s++) {
      const Tile &a = w[s], &b = w[s + 1];
      bool left = b.pos + tile_in(b) <= a.pos;
      bool right = b.pos >= a.pos + tile_out(a);
      if (left || right)
        out.push_back(mk(MoveKind::M1Commute, fwd, {pi, s}, h_panel(d, pi),
                         fmt("M1.commute panel %d slice %d", pi, s)));
    }
  }
}

void enum_zig(const Diagram& d, MoveKind k, bool fwd,
              std::vector<MoveSite>& out) {
  int off = k == MoveKind::M1Zig1 ? +1 : -1;  // cap position minus cup position
  if (fwd) {
    for (int pi = 0; pi < (int)d.panels.size(); pi++) {
      const auto& w = d.panels[pi].word;
      for (int s = 0; s + 1 < (int)w.size(); s++)
        if (w[s].kind == TileKind::Cup && w[s + 1].kind == TileKind::Cap &&
            w[s + 1].pos == w[s].pos + off && w[s].pos + off >= 0)
          out.push_back(mk(k, true, {pi, s}, h_panel(d, pi),
                           fmt("%s panel %d slice %d", move_kind_name(k), pi, s)));
    }
    return;
  }
  Scan sc(d);
  if (!sc.ok) return;
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    int nb = (int)sc.pg.levels[pi].size();
    for (int s = 0; s < nb; s++)
      for (int q = 0; q < sc.width(pi, s); q++) {
        // zig1 straightens with the strand entering from the right of the
        // cup, zig2 from the left; the cup flag is forced by its direction.
        int b = sc.bit(pi, s, q);
        int flag = k == MoveKind::M1Zig1 ? (b > 0) : (b < 0);
        out.push_back(mk(k, false, {pi, s, q, flag}, h_panel(d, pi),
                         fmt("%s insert panel %d slice %d pos %d",
                             move_kind_name(k), pi, s, q)));
      }
  }
}

void enum_r2(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  if (fwd) {
    for (int pi = 0; pi < (int)d.panels.size(); pi++) {
      const auto& w = d.panels[pi].word;
      for (int s = 0; s + 1 < (int)w.size(); s++)
        if (is_x(w[s]) && is_x(w[s + 1]) && w[s].pos == w[s + 1].pos &&
            xsign(w[s]) == -xsign(w[s + 1]))
          out.push_back(mk(MoveKind::M1R2, true, {pi, s}, h_panel(d, pi),
                           fmt("M1.r2 panel %d slice %d", pi, s)));
    }
    return;
  }
  Scan sc(d);
  if (!sc.ok) return;
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    int nb = (int)sc.pg.levels[pi].size();
    for (int s = 0; s < nb; s++)
      for (int q = 0; q + 1 < sc.width(pi, s); q++)
        for (int t : {+1, -1})
          out.push_back(mk(MoveKind::M1R2, false, {pi, s, q, t},
                           h_panel(d, pi),
                           fmt("M1.r2 insert panel %d slice %d pos %d sign %+d",
                               pi, s, q, t)));
  }
}

void enum_r3(const Diagram& d, MoveKind k, bool fwd,
             std::vector<MoveSite>& out) {
  bool mixed = k == MoveKind::M1R3Mixed;
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    const auto& w = d.panels[pi].word;
    for (int s = 0; s + 2 < (int)w.size(); s++) {
      if (!is_x(w[s]) || !is_x(w[s + 1]) || !is_x(w[s + 2])) continue;
      int p = w[s].pos;
      bool shape;
      if (fwd)  // [a p][b p+1][c p]
        shape = w[s + 1].pos == p + 1 && w[s + 2].pos == p;
      else  // [a p][b p-1][c p]
        shape = p >= 1 && w[s + 1].pos == p - 1 && w[s + 2].pos == p;
      if (!shape) continue;
      int a = xsign(w[s]), b = xsign(w[s + 1]), c = xsign(w[s + 2]);
      bool match = mixed ? c == -a : (a == b && b == c);
      (void)b;
      if (match)
        out.push_back(mk(k, fwd, {pi, s}, h_panel(d, pi),
                         fmt("%s panel %d slice %d", move_kind_name(k), pi, s)));
    }
  }
}

void enum_extremum_slide(const Diagram& d, MoveKind k, bool fwd,
                         std::vector<MoveSite>& out) {
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    const auto& w = d.panels[pi].word;
    for (int s = 0; s + 1 < (int)w.size(); s++) {
      bool hit = false;
      if (k == MoveKind::M1CapSlide) {
        if (!is_x(w[s]) || w[s + 1].kind != TileKind::Cap) continue;
        hit = fwd ? w[s + 1].pos == w[s].pos + 1
                  : w[s].pos >= 1 && w[s + 1].pos == w[s].pos - 1;
      } else {
        if (w[s].kind != TileKind::Cup || !is_x(w[s + 1])) continue;
        hit = fwd ? w[s + 1].pos == w[s].pos + 1
                  : w[s].pos >= 1 && w[s + 1].pos == w[s].pos - 1;
      }
      if (hit)
        out.push_back(mk(k, fwd, {pi, s}, h_panel(d, pi),
                         fmt("%s panel %d slice %d", move_kind_name(k), pi, s)));
    }
  }
}

void enum_m2(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  for (int pr = 0; pr < d.pair_count(); pr++) {
    PairLoc L = locate_pair(d, pr);
    if (!L.ok() || L.arity < 2) continue;
    if (fwd) {
      for (int i = 0; i + 1 < L.arity; i++)
        out.push_back(mk(MoveKind::M2, true, {pr, i, +1}, h_pair(d, pr),
                         fmt("M2 pair %s legs %d,%d",
                             d.pair_names[pr].c_str(), i, i + 1)));
      continue;
    }
    const auto& wi = d.panels[L.in_panel].word;
    const auto& wo = d.panels[L.out_panel].word;
    for (int i = 0; i + 1 < L.arity; i++)
      for (int t : {+1, -1}) {
        if (L.in_slice < 1) continue;
        if (!(wi[L.in_slice - 1] == xt(t, L.in_pos + i))) continue;
        if (L.out_slice + 1 >= (int)wo.size()) continue;
        if (!(wo[L.out_slice + 1] == xt(-t, L.out_pos + i))) continue;
        out.push_back(mk(MoveKind::M2, false, {pr, i, t}, h_pair(d, pr),
                         fmt("M2 cancel pair %s legs %d,%d",
                             d.pair_names[pr].c_str(), i, i + 1)));
      }
  }
}

std::vector<int> bits_below_in(const Scan& sc, const PairLoc& L) {
  std::vector<int> b;
  for (int k = 0; k < L.arity; k++)
    b.push_back(sc.bit(L.in_panel, L.in_slice, L.in_pos + k));
  return b;
}

std::vector<int> bits_above_out(const Scan& sc, const PairLoc& L) {
  std::vector<int> b;
  for (int k = 0; k < L.arity; k++)
    b.push_back(sc.bit(L.out_panel, L.out_slice + 1, L.out_pos + k));
  return b;
}

void enum_m3(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  Scan sc(d);
  if (!sc.ok) return;
  for (int pr = 0; pr < d.pair_count(); pr++) {
    PairLoc L = locate_pair(d, pr);
    if (!L.ok() || L.arity < 1) continue;
    for (int s : {+1, -1}) {
      if (fwd) {
        out.push_back(mk(MoveKind::M3, true, {pr, s}, h_pair(d, pr),
                         fmt("M3 pair %s twist %+d", d.pair_names[pr].c_str(),
                             s)));
        continue;
      }
      auto below = theta_tiles(L.in_pos, L.arity, s, bits_below_in(sc, L));
      auto above =
          theta_tiles(L.out_pos, L.arity, -s, bits_above_out(sc, L));
      int lb = (int)below.size();
      if (L.in_slice - lb < 0) continue;
      if (!match_range(d.panels[L.in_panel].word, L.in_slice - lb, below))
        continue;
      if (!match_range(d.panels[L.out_panel].word, L.out_slice + 1, above))
        continue;
      out.push_back(mk(MoveKind::M3, false, {pr, s}, h_pair(d, pr),
                       fmt("M3 cancel pair %s twist %+d",
                           d.pair_names[pr].c_str(), s)));
    }
  }
}

void enum_m4(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  for (int pr = 0; pr < d.pair_count(); pr++) {
    PairLoc L = locate_pair(d, pr);
    if (!L.ok()) continue;
    if (fwd) {
      out.push_back(mk(MoveKind::M4, true, {pr}, h_pair(d, pr),
                       fmt("M4 flip pair %s", d.pair_names[pr].c_str())));
      continue;
    }
    // A flipped pair: emitter followed by its rainbow of caps, and the
    // rainbow of cups feeding the absorber.
    int n = L.arity;
    const auto& wo = d.panels[L.out_panel].word;  // emitter side
    const auto& wi = d.panels[L.in_panel].word;   // absorber side
    bool good = L.out_slice + n < (int)wo.size() && L.in_slice - n >= 0;
    for (int k = 0; good && k < n; k++)
      if (!(wo[L.out_slice + 1 + k] == cap(L.out_pos + n - 1 - k))) good = false;
    for (int j = 0; good && j < n; j++) {
      const Tile& t = wi[L.in_slice - n + j];
      if (t.kind != TileKind::Cup || t.pos != L.in_pos + j) good = false;
    }
    if (good)
      out.push_back(mk(MoveKind::M4, false, {pr}, h_pair(d, pr),
                       fmt("M4 unflip pair %s", d.pair_names[pr].c_str())));
  }
}

void enum_m5(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  for (int pr = 0; pr < d.pair_count(); pr++) {
    PairLoc L = locate_pair(d, pr);
    if (!L.ok() || L.arity < 1) continue;
    auto ring_in = ring_tiles(L.in_pos, L.arity);
    auto ring_out = ring_tiles(L.out_pos, L.arity);
    int len = (int)ring_in.size();
    if (fwd) {
      if (L.in_slice - len >= 0 &&
          match_range(d.panels[L.in_panel].word, L.in_slice - len, ring_in))
        out.push_back(mk(MoveKind::M5, true, {pr}, h_pair(d, pr),
                         fmt("M5 push loop up through pair %s",
                             d.pair_names[pr].c_str())));
    } else {
      if (match_range(d.panels[L.out_panel].word, L.out_slice + 1, ring_out))
        out.push_back(mk(MoveKind::M5, false, {pr}, h_pair(d, pr),
                         fmt("M5 push loop down through pair %s",
                             d.pair_names[pr].c_str())));
    }
  }
}

void enum_m6(const Diagram& d, bool fwd, const MoveOptions& opt,
             std::vector<MoveSite>& out) {
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    const auto& w = d.panels[pi].word;
    for (int s = 0; s + 1 < (int)w.size(); s++) {
      if (fwd) {
        // hi-in immediately below lo-in, flush left at the same position
        if (w[s].kind != TileKind::CouponIn ||
            w[s + 1].kind != TileKind::CouponIn)
          continue;
        if (w[s].pos != w[s + 1].pos || w[s].arity < 1) continue;
        int hi = w[s].pair, lo = w[s + 1].pair;
        if (hi == lo) continue;
        PairLoc Llo = locate_pair(d, lo);
        if (!opt.macro_mode && Llo.in_panel == Llo.out_panel) continue;
        out.push_back(mk(MoveKind::M6, true, {hi, lo},
                         neighborhood_hash(d, {pi, Llo.out_panel}, {hi, lo}),
                         fmt("M6 slide pair %s through %s",
                             d.pair_names[hi].c_str(),
                             d.pair_names[lo].c_str())));
      } else {
        // lo emitter immediately followed by the hi absorber taking the
        // first re-emitted legs
        if (w[s].kind != TileKind::CouponOut ||
            w[s + 1].kind != TileKind::CouponIn)
          continue;
        if (w[s].pos != w[s + 1].pos) continue;
        int lo = w[s].pair, hi = w[s + 1].pair;
        if (hi == lo) continue;
        int n = w[s + 1].arity;
        if (n < 1 || n > w[s].arity) continue;
        PairLoc Llo = locate_pair(d, lo);
        if (!opt.macro_mode && Llo.in_panel == Llo.out_panel) continue;
        out.push_back(mk(MoveKind::M6, false, {hi, lo},
                         neighborhood_hash(d, {pi, Llo.in_panel}, {hi, lo}),
                         fmt("M6 unslide pair %s out of %s",
                             d.pair_names[hi].c_str(),
                             d.pair_names[lo].c_str())));
      }
    }
  }
}

void enum_m7(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  if (fwd) {
    for (int pr = 0; pr < d.pair_count(); pr++) {
      PairLoc L = locate_pair(d, pr);
      if (!L.ok()) continue;
      if (L.in_panel != L.out_panel || L.out_slice != L.in_slice + 1) continue;
      if (L.in_pos != L.out_pos) continue;
      out.push_back(mk(MoveKind::M7, true, {pr}, h_pair(d, pr),
                       fmt("M7 trade pair %s for a ring",
                           d.pair_names[pr].c_str())));
    }
    return;
  }
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    const auto& w = d.panels[pi].word;
    for (int s = 0; s < (int)w.size(); s++) {
      if (w[s].kind != TileKind::Cup || !w[s].left_up) continue;
      for (int n = 0; n <= w[s].pos; n++) {
        int p = w[s].pos - n;
        if (match_range(w, s, ring_tiles(p, n)))
          out.push_back(mk(MoveKind::M7, false, {pi, s, p, n, d.pair_count()},
                           h_panel(d, pi),
                           fmt("M7 trade ring at panel %d slice %d for a pair",
                               pi, s)));
      }
    }
  }
}

void enum_m8(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  if (fwd) {
    for (int pi = 0; pi < (int)d.panels.size(); pi++) {
      const auto& w = d.panels[pi].word;
      for (int s = 0; s + 1 < (int)w.size(); s++)
        if (w[s].kind == TileKind::CouponOut && w[s].arity == 1 &&
            w[s + 1].kind == TileKind::CouponIn &&
            w[s + 1].pair == w[s].pair && w[s + 1].pos == w[s].pos)
          out.push_back(mk(MoveKind::M8, true, {w[s].pair}, h_pair(d, w[s].pair),
                           fmt("M8 cancel pair %s",
                               d.pair_names[w[s].pair].c_str())));
    }
    return;
  }
  Scan sc(d);
  if (!sc.ok) return;
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    int nb = (int)sc.pg.levels[pi].size();
    for (int s = 0; s < nb; s++)
      for (int q = 0; q <= sc.width(pi, s); q++)
        out.push_back(mk(MoveKind::M8, false, {pi, s, q, d.pair_count()},
                         h_panel(d, pi),
                         fmt("M8 insert pair panel %d slice %d pos %d", pi, s,
                             q)));
  }
}

void enum_m9(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  if (fwd) {
    for (int pi = 0; pi < (int)d.panels.size(); pi++)
      for (int sign : {+1, -1})
        out.push_back(mk(MoveKind::M9, true,
                         {pi, (int)d.panels[pi].word.size(), 0, sign, 1},
                         h_panel(d, pi),
                         fmt("M9 insert %+d-kink unknot panel %d", sign, pi)));
    return;
  }
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    const auto& w = d.panels[pi].word;
    for (int s = 0; s + 2 < (int)w.size(); s++)
      if (w[s].kind == TileKind::Cup && is_x(w[s + 1]) &&
          w[s + 1].pos == w[s].pos && w[s + 2].kind == TileKind::Cap &&
          w[s + 2].pos == w[s].pos)
        out.push_back(mk(MoveKind::M9, false,
                         {pi, s, w[s].pos, -xsign(w[s + 1]), w[s].left_up},
                         h_panel(d, pi),
                         fmt("M9 remove %+d-kink unknot panel %d slice %d",
                             -xsign(w[s + 1]), pi, s)));
  }
}

std::vector<Tile> ring_pair_tiles(int p, int t, bool f1, bool f2) {
  return {cup(p, f1), cup(p + 2, f2), xt(t, p + 1), xt(t, p + 1),
          cap(p),     cap(p)};
}

void enum_m10(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  if (fwd) {
    for (int pi = 0; pi < (int)d.panels.size(); pi++)
      for (int sign : {+1, -1})
        out.push_back(mk(MoveKind::M10, true,
                         {pi, (int)d.panels[pi].word.size(), 0, sign, 1, 1},
                         h_panel(d, pi),
                         fmt("M10 insert %+d-clasped ring pair panel %d", sign,
                             pi)));
    return;
  }
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    const auto& w = d.panels[pi].word;
    for (int s = 0; s + 5 < (int)w.size(); s++) {
      if (w[s].kind != TileKind::Cup || !is_x(w[s + 2])) continue;
      int p = w[s].pos, t = xsign(w[s + 2]);
      if (match_range(w, s,
                      ring_pair_tiles(p, t, w[s].left_up, w[s + 1].left_up)))
        out.push_back(mk(MoveKind::M10, false,
                         {pi, s, p, t, w[s].left_up, w[s + 1].left_up},
                         h_panel(d, pi),
                         fmt("M10 remove ring pair panel %d slice %d", pi, s)));
    }
  }
}

void enum_m11(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  if (!fwd) return;  // undone only through the induced inverse
  Scan sc(d);
  if (!sc.ok) return;
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    int nb = (int)sc.pg.levels[pi].size();
    for (int s = 0; s < nb; s++)
      for (int q = 0; q < sc.width(pi, s); q++)
        for (int t : {+1, -1})
          out.push_back(mk(MoveKind::M11, true, {pi, s, q, t}, h_global(d),
                           fmt("M11 clasp ring pair around panel %d slice %d "
                               "pos %d sign %+d",
                               pi, s, q, t)));
  }
}

void enum_m12(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  Scan sc(d);
  if (!sc.ok) return;
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    const auto& w = d.panels[pi].word;
    if (fwd) {
      for (int s = 0; s < (int)w.size(); s++) {
        if (w[s].kind != TileKind::Cup || !w[s].left_up) continue;
        if (s + 1 >= (int)w.size() || !is_x(w[s + 1])) continue;
        if (w[s + 1].pos != w[s].pos) continue;
        int eps = -xsign(w[s + 1]);
        for (int n = 1; n <= w[s].pos; n++) {
          int p = w[s].pos - n;
          if (match_range(w, s, kappa_tiles(p, n, eps)))
            out.push_back(
                mk(MoveKind::M12, true, {pi, s, p, n, eps}, h_panel(d, pi),
                   fmt("M12 blow down %+d-kinked ring panel %d slice %d", eps,
                       pi, s)));
        }
      }
    } else {
      int nb = (int)sc.pg.levels[pi].size();
      for (int s = 0; s < nb; s++) {
        int wd = sc.width(pi, s);
        for (int p = 0; p < wd; p++)
          for (int n = 1; n + p <= wd; n++)
            for (int eps : {+1, -1}) {
              std::vector<int> bits;
              for (int k = 0; k < n; k++) bits.push_back(sc.bit(pi, s, p + k));
              if (match_range(w, s, theta_tiles(p, n, -eps, bits)))
                out.push_back(mk(MoveKind::M12, false, {pi, s, p, n, eps},
                                 h_panel(d, pi),
                                 fmt("M12 blow up a %+d-kinked ring panel %d "
                                     "slice %d",
                                     eps, pi, s)));
            }
      }
    }
  }
}

std::vector<int> port_comps(const PortGraph& pg) {
  std::vector<int> comp(pg.nports, -1);
  int c = 0;
  for (int p = 0; p < pg.nports; p++) {
    if (comp[p] >= 0) continue;
    std::vector<int> stack{p};
    comp[p] = c;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (int r : {pg.wire[q], pg.mate[q]})
        if (r >= 0 && comp[r] < 0) {
          comp[r] = c;
          stack.push_back(r);
        }
    }
    c++;
  }
  return comp;
}

void enum_m13(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  if (!fwd) return;  // undone only through the induced inverse
  Scan sc(d);
  if (!sc.ok) return;
  auto comp = port_comps(sc.pg);
  std::vector<char> open_comp;
  for (int p = 0; p < sc.pg.nports; p++) {
    if ((int)open_comp.size() <= comp[p]) open_comp.resize(comp[p] + 1, 0);
    if (sc.pg.meta[p].role == detail::PBottom ||
        sc.pg.meta[p].role == detail::PTop)
      open_comp[comp[p]] = 1;
  }
  uint64_t hg = h_global(d);
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    int nb = (int)sc.pg.levels[pi].size();
    for (int s = 0; s < nb; s++)
      for (int j = 0; j + 1 < sc.width(pi, s); j++) {
        int ca = comp[sc.pg.levels[pi][s][j]];
        int cb = comp[sc.pg.levels[pi][s][j + 1]];
        if (ca == cb) continue;
        if (!open_comp[cb])
          out.push_back(mk(MoveKind::M13, true, {pi, s, j, 0}, hg,
                           fmt("M13 slide panel %d slice %d pos %d over the "
                               "component to its right",
                               pi, s, j)));
        if (!open_comp[ca])
          out.push_back(mk(MoveKind::M13, true, {pi, s, j, 1}, hg,
                           fmt("M13 slide panel %d slice %d pos %d over the "
                               "component to its left",
                               pi, s, j + 1)));
      }
  }
}

int group_base(const std::vector<int>& groups, int gi) {
  int base = 0;
  for (int k = 0; k < gi; k++) base += 2 * groups[k];
  return base;
}

void enum_m14(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  if (!d.tangle) return;
  Scan strips(d, true);
  if (!strips.ok) return;
  const auto& w = d.panels[0].word;
  for (int side = 0; side < 2; side++) {
    const auto& groups = side == 0 ? d.in_groups : d.out_groups;
    for (int gi = 0; gi < (int)groups.size(); gi++) {
      int base = group_base(groups, gi);
      for (int s = 0; s < groups[gi]; s++) {
        int P = base + 2 * s;
        if (fwd) {
          out.push_back(mk(MoveKind::M14, true, {side, gi, s},
                           h_panel(d, 0),
                           fmt("M14 pinch %s group %d strip %d",
                               side == 0 ? "bottom" : "top", gi, s)));
          continue;
        }
        int bit = side == 0 ? strips.pg.bit[strips.pg.bottom_ports[P]]
                            : strips.pg.bit[strips.pg.top_ports[P]];
        std::vector<Tile> pat;
        if (side == 0) {
          pat = {cap(P), cup(P, bit > 0)};
          auto r = ring_tiles(P, 2);
          pat.insert(pat.end(), r.begin(), r.end());
          if (match_range(w, 0, pat))
            out.push_back(mk(MoveKind::M14, false, {side, gi, s},
                             h_panel(d, 0),
                             fmt("M14 unpinch bottom group %d strip %d", gi,
                                 s)));
        } else {
          pat = ring_tiles(P, 2);
          pat.push_back(cap(P));
          pat.push_back(cup(P, bit > 0));
          if ((int)w.size() >= (int)pat.size() &&
              match_range(w, (int)w.size() - (int)pat.size(), pat))
            out.push_back(mk(MoveKind::M14, false, {side, gi, s},
                             h_panel(d, 0),
                             fmt("M14 unpinch top group %d strip %d", gi, s)));
        }
      }
    }
  }
}

void enum_m15(const Diagram& d, bool fwd, std::vector<MoveSite>& out) {
  if (!d.tangle) return;
  {
    Scan strips(d, true);
    if (!strips.ok) return;
  }
  const auto& w = d.panels[0].word;
  int want = fwd ? -1 : +1;  // forward rewrites an under-sweep to an over-sweep
  for (int side = 0; side < 2; side++) {
    const auto& groups = side == 0 ? d.in_groups : d.out_groups;
    for (int gi = 0; gi < (int)groups.size(); gi++) {
      int base = group_base(groups, gi), g2 = 2 * groups[gi];
      if (g2 < 1 || (int)w.size() < g2) continue;
      int start = side == 0 ? 0 : (int)w.size() - g2;
      for (int variant = 0; variant < 2; variant++) {
        bool good = true;
        for (int k = 0; good && k < g2; k++) {
          const Tile& t = w[start + k];
          int pos;
          if (side == 0)
            pos = variant == 0 ? base + g2 - 1 - k : base - 1 + k;
          else
            pos = variant == 0 ? base + k : base + g2 - 2 - k;
          if (pos < 0 || !is_x(t) || t.pos != pos || xsign(t) != want)
            good = false;
        }
        if (good)
          out.push_back(mk(MoveKind::M15, fwd, {side, gi, variant},
                           h_panel(d, 0),
                           fmt("M15 sweep %s group %d across the boundary",
                               side == 0 ? "bottom" : "top", gi)));
      }
    }
  }
}

}  // namespace

std::vector<MoveSite> enumerate_sites(const Diagram& d, MoveKind kind,
                                      bool forward, const MoveOptions& opt) {
  std::vector<MoveSite> out;
  switch (kind) {
    case MoveKind::M1Commute: enum_commute(d, forward, out); break;
    case MoveKind::M1Zig1:
    case MoveKind::M1Zig2: enum_zig(d, kind, forward, out); break;
    case MoveKind::M1R2: enum_r2(d, forward, out); break;
    case MoveKind::M1R3Same:
    case MoveKind::M1R3Mixed: enum_r3(d, kind, forward, out); break;
    case MoveKind::M1CapSlide:
    case MoveKind::M1CupSlide: enum_extremum_slide(d, kind, forward, out); break;
    case MoveKind::M2: enum_m2(d, forward, out); break;
    case MoveKind::M3: enum_m3(d, forward, out); break;
    case MoveKind::M4: enum_m4(d, forward, out); break;
    case MoveKind::M5: enum_m5(d, forward, out); break;
    case MoveKind::M6: enum_m6(d, forward, opt, out); break;
    case MoveKind::M7: enum_m7(d, forward, out); break;
    case MoveKind::M8: enum_m8(d, forward, out); break;
    case MoveKind::M9: enum_m9(d, forward, out); break;
    case MoveKind::M10: enum_m10(d, forward, out); break;
    case MoveKind::M11: enum_m11(d, forward, out); break;
    case MoveKind::M12: enum_m12(d, forward, out); break;
    case MoveKind::M13: enum_m13(d, forward, out); break;
    case MoveKind::M14: enum_m14(d, forward, out); break;
    case MoveKind::M15: enum_m15(d, forward, out); break;
  }
  return out;
}

// =========================================================================
// Application
// =========================================================================

namespace {

Diagram checked(Diagram nd, const MoveSite& s) {
  auto errs = validate(nd);
  if (!errs.empty())
    throw std::logic_error(fmt("%s produced an invalid diagram: %s",
                               move_kind_name(s.kind), errs[0].msg.c_str()));
  return nd;
}

Applied apply_commute(const Diagram& d, const MoveSite& s) {
  check_locs(s, 2);
  int pi = s.locs[0], sl = s.locs[1];
  Diagram nd = d;
  auto& w = word_of(nd, pi);
  if (sl < 0 || sl + 1 >= (int)w.size()) stale(s);
  Tile a = w[sl], b = w[sl + 1];
  bool left = b.pos + tile_in(b) <= a.pos;
  bool right = b.pos >= a.pos + tile_out(a);
  if (!left && !right) stale(s);
  Tile a2 = a, b2 = b;
  if (left)
    a2.pos = a.pos - tile_in(b) + tile_out(b);
  else
    b2.pos = b.pos - tile_out(a) + tile_in(a);
  w[sl] = b2;
  w[sl + 1] = a2;
  MoveSite inv = s;
  inv.forward = !s.forward;
  inv.redex_hash = h_panel(nd, pi);
  inv.desc = fmt("M1.commute panel %d slice %d", pi, sl);
  return {checked(std::move(nd), s), inv};
}

Applied apply_zig(const Diagram& d, const MoveSite& s) {
  int off = s.kind == MoveKind::M1Zig1 ? +1 : -1;
  Diagram nd = d;
  MoveSite inv;
  inv.kind = s.kind;
  inv.forward = !s.forward;
  if (s.forward) {
    check_locs(s, 2);
    int pi = s.locs[0], sl = s.locs[1];
    auto& w = word_of(nd, pi);
    if (sl + 1 >= (int)w.size() || w[sl].kind != TileKind::Cup ||
        w[sl + 1].kind != TileKind::Cap || w[sl + 1].pos != w[sl].pos + off)
      stale(s);
    int pos = s.kind == MoveKind::M1Zig1 ? w[sl].pos : w[sl].pos - 1;
    int flag = w[sl].left_up;
    erase_tiles(nd, pi, sl, 2);
    inv.locs = {pi, sl, pos, flag};
    inv.desc = fmt("%s insert panel %d slice %d pos %d", move_kind_name(s.kind),
                   pi, sl, pos);
    inv.redex_hash = h_panel(nd, pi);
  } else {
    check_locs(s, 4);
    int pi = s.locs[0], sl = s.locs[1], pos = s.locs[2];
    bool flag = s.locs[3];
    auto& w = word_of(nd, pi);
    if (sl < 0 || sl > (int)w.size()) stale(s);
    std::vector<Tile> pat =
        s.kind == MoveKind::M1Zig1
            ? std::vector<Tile>{cup(pos, flag), cap(pos + 1)}
            : std::vector<Tile>{cup(pos + 1, flag), cap(pos)};
    insert_tiles(nd, pi, sl, pat);
    (void)w;
    inv.locs = {pi, sl};
    inv.desc = fmt("%s panel %d slice %d", move_kind_name(s.kind), pi, sl);
    inv.redex_hash = h_panel(nd, pi);
  }
  return {checked(std::move(nd), s), inv};
}

Applied apply_r2(const Diagram& d, const MoveSite& s) {
  Diagram nd = d;
  MoveSite inv;
  inv.kind = MoveKind::M1R2;
  inv.forward = !s.forward;
  if (s.forward) {
    check_locs(s, 2);
    int pi = s.locs[0], sl = s.locs[1];
    auto& w = word_of(nd, pi);
    if (sl + 1 >= (int)w.size() || !is_x(w[sl]) || !is_x(w[sl + 1]) ||
        w[sl].pos != w[sl + 1].pos || xsign(w[sl]) != -xsign(w[sl + 1]))
      stale(s);
    int pos = w[sl].pos, t = xsign(w[sl]);
    erase_tiles(nd, pi, sl, 2);
    inv.locs = {pi, sl, pos, t};
    inv.desc = fmt("M1.r2 insert panel %d slice %d pos %d sign %+d", pi, sl,
                   pos, t);
  } else {
    check_locs(s, 4);
    int pi = s.locs[0], sl = s.locs[1], pos = s.locs[2], t = s.locs[3];
    insert_tiles(nd, pi, sl, {xt(t, pos), xt(-t, pos)});
    inv.locs = {pi, sl};
    inv.desc = fmt("M1.r2 panel %d slice %d", pi, sl);
  }
  inv.redex_hash = h_panel(nd, s.locs[0]);
  return {checked(std::move(nd), s), inv};
}

Applied apply_r3(const Diagram& d, const MoveSite& s) {
  check_locs(s, 2);
  int pi = s.locs[0], sl = s.locs[1];
  Diagram nd = d;
  auto& w = word_of(nd, pi);
  if (sl + 2 >= (int)w.size() || !is_x(w[sl]) || !is_x(w[sl + 1]) ||
      !is_x(w[sl + 2]))
    stale(s);
  int p = w[sl].pos;
  int a = xsign(w[sl]), b = xsign(w[sl + 1]), c = xsign(w[sl + 2]);
  bool mixed = s.kind == MoveKind::M1R3Mixed;
  if (s.forward) {
    if (w[sl + 1].pos != p + 1 || w[sl + 2].pos != p) stale(s);
    if (mixed ? c != -a : !(a == b && b == c)) stale(s);
    w[sl] = xt(mixed ? -a : a, p + 1);
    w[sl + 1] = xt(b, p);
    w[sl + 2] = xt(mixed ? a : c, p + 1);
  } else {
    if (p < 1 || w[sl + 1].pos != p - 1 || w[sl + 2].pos != p) stale(s);
    if (mixed ? c != -a : !(a == b && b == c)) stale(s);
    w[sl] = xt(mixed ? -a : a, p - 1);
    w[sl + 1] = xt(b, p);
    w[sl + 2] = xt(mixed ? a : c, p - 1);
  }
  MoveSite inv = s;
  inv.forward = !s.forward;
  inv.redex_hash = h_panel(nd, pi);
  return {checked(std::move(nd), s), inv};
}

Applied apply_extremum_slide(const Diagram& d, const MoveSite& s) {
  check_locs(s, 2);
  int pi = s.locs[0], sl = s.locs[1];
  Diagram nd = d;
  auto& w = word_of(nd, pi);
  if (sl + 1 >= (int)w.size()) stale(s);
  int delta = s.forward ? +1 : -1;
  if (s.kind == MoveKind::M1CapSlide) {
    if (!is_x(w[sl]) || w[sl + 1].kind != TileKind::Cap ||
        w[sl + 1].pos != w[sl].pos + delta)
      stale(s);
    // the crossing trades places with the cap; its letter flips so the
    // geometric sign of the remaining strand's passage is preserved
    int p = w[sl].pos, t = xsign(w[sl]);
    w[sl] = xt(-t, p + delta);
    w[sl + 1] = cap(p);
  } else {
    if (w[sl].kind != TileKind::Cup || !is_x(w[sl + 1]) ||
        w[sl + 1].pos != w[sl].pos + delta)
      stale(s);
    int p = w[sl].pos, t = xsign(w[sl + 1]);
    bool f = w[sl].left_up;
    w[sl] = cup(p + delta, f);
    w[sl + 1] = xt(-t, p);
  }
  MoveSite inv = s;
  inv.forward = !s.forward;
  inv.redex_hash = h_panel(nd, pi);
  return {checked(std::move(nd), s), inv};
}

Applied apply_m2(const Diagram& d, const MoveSite& s) {
  check_locs(s, 3);
  int pr = s.locs[0], i = s.locs[1], t = s.locs[2];
  Diagram nd = d;
  PairLoc L = locate_pair(nd, pr);
  if (!L.ok() || i + 1 >= L.arity) stale(s);
  MoveSite inv;
  inv.kind = MoveKind::M2;
  inv.forward = !s.forward;
  inv.locs = {pr, i, t};
  if (s.forward) {
    insert_tiles(nd, L.in_panel, L.in_slice, {xt(t, L.in_pos + i)});
    L = locate_pair(nd, pr);
    insert_tiles(nd, L.out_panel, L.out_slice + 1, {xt(-t, L.out_pos + i)});
    inv.desc = fmt("M2 cancel pair %s legs %d,%d", nd.pair_names[pr].c_str(),
                   i, i + 1);
  } else {
    const auto& wi = nd.panels[L.in_panel].word;
    const auto& wo = nd.panels[L.out_panel].word;
    if (L.in_slice < 1 || !(wi[L.in_slice - 1] == xt(t, L.in_pos + i)) ||
        L.out_slice + 1 >= (int)wo.size() ||
        !(wo[L.out_slice + 1] == xt(-t, L.out_pos + i)))
      stale(s);
    erase_tiles(nd, L.out_panel, L.out_slice + 1, 1);
    L = locate_pair(nd, pr);
    erase_tiles(nd, L.in_panel, L.in_slice - 1, 1);
    inv.desc =
        fmt("M2 pair %s legs %d,%d", nd.pair_names[pr].c_str(), i, i + 1);
  }
  inv.redex_hash = h_pair(nd, pr);
  return {checked(std::move(nd), s), inv};
}

Applied apply_m3(const Diagram& d, const MoveSite& s) {
  check_locs(s, 2);
  int pr = s.locs[0], tw = s.locs[1];
  Diagram nd = d;
  Scan sc(nd);
  if (!sc.ok) stale(s);
  PairLoc L = locate_pair(nd, pr);
  if (!L.ok() || L.arity < 1) stale(s);
  auto below = theta_tiles(L.in_pos, L.arity, tw, bits_below_in(sc, L));
  auto above = theta_tiles(L.out_pos, L.arity, -tw, bits_above_out(sc, L));
  MoveSite inv;
  inv.kind = MoveKind::M3;
  inv.forward = !s.forward;
  inv.locs = {pr, tw};
  if (s.forward) {
    insert_tiles(nd, L.in_panel, L.in_slice, below);
    L = locate_pair(nd, pr);
    insert_tiles(nd, L.out_panel, L.out_slice + 1, above);
    inv.desc = fmt("M3 cancel pair %s twist %+d", nd.pair_names[pr].c_str(), tw);
  } else {
    int lb = (int)below.size();
    if (L.in_slice - lb < 0 ||
        !match_range(nd.panels[L.in_panel].word, L.in_slice - lb, below) ||
        !match_range(nd.panels[L.out_panel].word, L.out_slice + 1, above))
      stale(s);
    erase_tiles(nd, L.out_panel, L.out_slice + 1, (int)above.size());
    L = locate_pair(nd, pr);
    erase_tiles(nd, L.in_panel, L.in_slice - lb, lb);
    inv.desc = fmt("M3 pair %s twist %+d", nd.pair_names[pr].c_str(), tw);
  }
  inv.redex_hash = h_pair(nd, pr);
  return {checked(std::move(nd), s), inv};
}

Applied apply_m4(const Diagram& d, const MoveSite& s) {
  check_locs(s, 1);
  int pr = s.locs[0];
  Diagram nd = d;
  PairLoc L = locate_pair(nd, pr);
  if (!L.ok()) stale(s);
  int n = L.arity;
  MoveSite inv;
  inv.kind = MoveKind::M4;
  inv.forward = !s.forward;
  inv.locs = {pr};
  if (s.forward) {
    Scan sc(nd);
    if (!sc.ok) stale(s);
    // directions of the handle's strands, indexed by slot
    std::vector<int> beta = bits_below_in(sc, L);
    // absorber side: emitter followed by a rainbow of caps folding the old
    // legs onto the fresh ones in reversed slot order
    std::vector<Tile> in_side{coupon_out(pr, L.in_pos, n)};
    for (int k = 0; k < n; k++) in_side.push_back(cap(L.in_pos + n - 1 - k));
    // emitter side: a rainbow of cups feeding the fresh absorber
    std::vector<Tile> out_side;
    for (int j = 0; j < n; j++)
      out_side.push_back(cup(L.out_pos + j, beta[n - 1 - j] < 0));
    out_side.push_back(coupon_in(pr, L.out_pos, n));
    auto replace = [&](int panel, int slice, const std::vector<Tile>& blk) {
      erase_tiles(nd, panel, slice, 1);
      insert_tiles(nd, panel, slice, blk);
    };
    // edit the higher slice first so the lower site keeps its index
    if (L.in_panel == L.out_panel && L.out_slice > L.in_slice) {
      replace(L.out_panel, L.out_slice, out_side);
      replace(L.in_panel, L.in_slice, in_side);
    } else {
      replace(L.in_panel, L.in_slice, in_side);
      replace(L.out_panel, L.out_slice, out_side);
    }
    inv.desc = fmt("M4 unflip pair %s", nd.pair_names[pr].c_str());
  } else {
    const auto& wo = d.panels[L.out_panel].word;
    const auto& wi = d.panels[L.in_panel].word;
    bool good = L.out_slice + n < (int)wo.size() && L.in_slice - n >= 0;
    for (int k = 0; good && k < n; k++)
      if (!(wo[L.out_slice + 1 + k] == cap(L.out_pos + n - 1 - k)))
        good = false;
    for (int j = 0; good && j < n; j++) {
      const Tile& t = wi[L.in_slice - n + j];
      if (t.kind != TileKind::Cup || t.pos != L.in_pos + j) good = false;
    }
    if (!good) stale(s);
    auto undo = [&](int panel, int slice, int count, const Tile& coupon) {
      erase_tiles(nd, panel, slice, count);
      insert_tiles(nd, panel, slice, {coupon});
    };
    // the emitter site becomes the absorber again and vice versa
    if (L.in_panel == L.out_panel && L.in_slice > L.out_slice) {
      undo(L.in_panel, L.in_slice - n, n + 1, coupon_out(pr, L.in_pos, n));
      undo(L.out_panel, L.out_slice, n + 1, coupon_in(pr, L.out_pos, n));
    } else {
      undo(L.out_panel, L.out_slice, n + 1, coupon_in(pr, L.out_pos, n));
      undo(L.in_panel, L.in_slice - n, n + 1, coupon_out(pr, L.in_pos, n));
    }
    inv.desc = fmt("M4 flip pair %s", nd.pair_names[pr].c_str());
  }
  inv.redex_hash = h_pair(nd, pr);
  return {checked(std::move(nd), s), inv};
}

Applied apply_m5(const Diagram& d, const MoveSite& s) {
  check_locs(s, 1);
  int pr = s.locs[0];
  Diagram nd = d;
  PairLoc L = locate_pair(nd, pr);
  if (!L.ok() || L.arity < 1) stale(s);
  auto ring_in = ring_tiles(L.in_pos, L.arity);
  auto ring_out = ring_tiles(L.out_pos, L.arity);
  int len = (int)ring_in.size();
  MoveSite inv;
  inv.kind = MoveKind::M5;
  inv.forward = !s.forward;
  inv.locs = {pr};
  if (s.forward) {
    if (L.in_slice - len < 0 ||
        !match_range(nd.panels[L.in_panel].word, L.in_slice - len, ring_in))
      stale(s);
    erase_tiles(nd, L.in_panel, L.in_slice - len, len);
    L = locate_pair(nd, pr);
    insert_tiles(nd, L.out_panel, L.out_slice + 1, ring_out);
    inv.desc = fmt("M5 push loop down through pair %s",
                   nd.pair_names[pr].c_str());
  } else {
    if (!match_range(nd.panels[L.out_panel].word, L.out_slice + 1, ring_out))
      stale(s);
    erase_tiles(nd, L.out_panel, L.out_slice + 1, len);
    L = locate_pair(nd, pr);
    insert_tiles(nd, L.in_panel, L.in_slice, ring_in);
    inv.desc =
        fmt("M5 push loop up through pair %s", nd.pair_names[pr].c_str());
  }
  inv.redex_hash = h_pair(nd, pr);
  return {checked(std::move(nd), s), inv};
}

Applied apply_m6(const Diagram& d, const MoveSite& s, const MoveOptions& opt) {
  check_locs(s, 2);
  int hi = s.locs[0], lo = s.locs[1];
  Diagram nd = d;
  PairLoc Lhi = locate_pair(nd, hi), Llo = locate_pair(nd, lo);
  if (!Lhi.ok() || !Llo.ok()) stale(s);
  if (!opt.macro_mode && Llo.in_panel == Llo.out_panel)
    throw MoveError(
        "M6 requires the slid-through pair's coupons in different panels");
  MoveSite inv;
  inv.kind = MoveKind::M6;
  inv.forward = !s.forward;
  inv.locs = {hi, lo};
  if (s.forward) {
    int P = Lhi.in_panel, sl = Lhi.in_slice;
    auto& w = word_of(nd, P);
    if (sl + 1 >= (int)w.size() || !(w[sl] == coupon_in(hi, Lhi.in_pos,
                                                        Lhi.arity)))
      stale(s);
    const Tile& lot = w[sl + 1];
    if (lot.kind != TileKind::CouponIn || lot.pair != lo ||
        lot.pos != Lhi.in_pos)
      stale(s);
    int n = Lhi.arity, m = lot.arity, K = Lhi.in_pos;
    erase_tiles(nd, P, sl, 2);
    insert_tiles(nd, P, sl, {coupon_in(lo, K, n + m)});
    Llo = locate_pair(nd, lo);
    erase_tiles(nd, Llo.out_panel, Llo.out_slice, 1);
    insert_tiles(nd, Llo.out_panel, Llo.out_slice,
                 {coupon_out(lo, Llo.out_pos, n + m),
                  coupon_in(hi, Llo.out_pos, n)});
    inv.desc = fmt("M6 unslide pair %s out of %s", nd.pair_names[hi].c_str(),
                   nd.pair_names[lo].c_str());
  } else {
    int P = Llo.out_panel, sl = Llo.out_slice;
    auto& w = word_of(nd, P);
    if (sl + 1 >= (int)w.size()) stale(s);
    const Tile& hit = w[sl + 1];
    int n = Lhi.arity, A = Llo.arity, m = A - n, klo = Llo.out_pos;
    if (hit.kind != TileKind::CouponIn || hit.pair != hi || hit.pos != klo ||
        n < 1 || m < 0)
      stale(s);
    erase_tiles(nd, P, sl, 2);
    insert_tiles(nd, P, sl, {coupon_out(lo, klo, m)});
    Llo = locate_pair(nd, lo);
    erase_tiles(nd, Llo.in_panel, Llo.in_slice, 1);
    insert_tiles(nd, Llo.in_panel, Llo.in_slice,
                 {coupon_in(hi, Llo.in_pos, n),
                  coupon_in(lo, Llo.in_pos, m)});
    inv.desc = fmt("M6 slide pair %s through %s", nd.pair_names[hi].c_str(),
                   nd.pair_names[lo].c_str());
  }
  Llo = locate_pair(nd, lo);
  // the primary redex panel of the reverse direction comes first
  inv.redex_hash =
      s.forward
          ? neighborhood_hash(nd, {Llo.out_panel, Llo.in_panel}, {hi, lo})
          : neighborhood_hash(nd, {Llo.in_panel, Llo.out_panel}, {hi, lo});
  return {checked(std::move(nd), s), inv};
}

Applied apply_m7(const Diagram& d, const MoveSite& s) {
  Diagram nd = d;
  MoveSite inv;
  inv.kind = MoveKind::M7;
  inv.forward = !s.forward;
  if (s.forward) {
    check_locs(s, 1);
    int pr = s.locs[0];
    PairLoc L = locate_pair(nd, pr);
    if (!L.ok() || L.in_panel != L.out_panel ||
        L.out_slice != L.in_slice + 1 || L.in_pos != L.out_pos)
      stale(s);
    std::string name = nd.pair_names[pr];
    int P = L.in_panel, sl = L.in_slice, pos = L.in_pos, n = L.arity;
    erase_tiles(nd, P, sl, 2);
    insert_tiles(nd, P, sl, ring_tiles(pos, n));
    drop_pair(nd, pr);
    inv.locs = {P, sl, pos, n, pr};
    inv.payload = name;
    inv.desc = fmt("M7 trade ring at panel %d slice %d for a pair", P, sl);
    inv.redex_hash = h_panel(nd, P);
  } else {
    check_locs(s, 5);
    int P = s.locs[0], sl = s.locs[1], pos = s.locs[2], n = s.locs[3],
        pr = s.locs[4];
    auto ring = ring_tiles(pos, n);
    if (!match_range(nd.panels[P].word, sl, ring)) stale(s);
    std::string name =
        s.payload.empty() ? nd.fresh_pair_name("q") : s.payload;
    if (pr < 0 || pr > nd.pair_count()) stale(s);
    revive_pair(nd, pr, name);
    erase_tiles(nd, P, sl, (int)ring.size());
    insert_tiles(nd, P, sl,
                 {coupon_in(pr, pos, n), coupon_out(pr, pos, n)});
    inv.locs = {pr};
    inv.desc = fmt("M7 trade pair %s for a ring", name.c_str());
    inv.redex_hash = h_pair(nd, pr);
  }
  return {checked(std::move(nd), s), inv};
}

Applied apply_m8(const Diagram& d, const MoveSite& s) {
  Diagram nd = d;
  MoveSite inv;
  inv.kind = MoveKind::M8;
  inv.forward = !s.forward;
  if (s.forward) {
    check_locs(s, 1);
    int pr = s.locs[0];
    PairLoc L = locate_pair(nd, pr);
    if (!L.ok() || L.arity != 1 || L.in_panel != L.out_panel ||
        L.in_slice != L.out_slice + 1 || L.in_pos != L.out_pos)
      stale(s);
    std::string name = nd.pair_names[pr];
    int P = L.out_panel, sl = L.out_slice, pos = L.out_pos;
    erase_tiles(nd, P, sl, 2);
    drop_pair(nd, pr);
    inv.locs = {P, sl, pos, pr};
    inv.payload = name;
    inv.desc = fmt("M8 insert pair panel %d slice %d pos %d", P, sl, pos);
    inv.redex_hash = h_panel(nd, P);
  } else {
    check_locs(s, 4);
    int P = s.locs[0], sl = s.locs[1], pos = s.locs[2], pr = s.locs[3];
    if (P < 0 || P >= (int)nd.panels.size() || sl < 0 ||
        sl > (int)nd.panels[P].word.size() || pr < 0 || pr > nd.pair_count())
      stale(s);
    std::string name =
        s.payload.empty() ? nd.fresh_pair_name("r") : s.payload;
    revive_pair(nd, pr, name);
    insert_tiles(nd, P, sl,
                 {coupon_out(pr, pos, 1), coupon_in(pr, pos, 1)});
    inv.locs = {pr};
    inv.desc = fmt("M8 cancel pair %s", name.c_str());
    inv.redex_hash = h_pair(nd, pr);
  }
  return {checked(std::move(nd), s), inv};
}

Applied apply_m9(const Diagram& d, const MoveSite& s) {
  check_locs(s, 5);
  int P = s.locs[0], sl = s.locs[1], pos = s.locs[2], sign = s.locs[3];
  bool flag = s.locs[4];
  Diagram nd = d;
  std::vector<Tile> pat{cup(pos, flag), xt(-sign, pos), cap(pos)};
  MoveSite inv = s;
  inv.forward = !s.forward;
  if (s.forward) {
    if (sl < 0 || sl > (int)nd.panels[P].word.size()) stale(s);
    insert_tiles(nd, P, sl, pat);
    inv.desc = fmt("M9 remove %+d-kink unknot panel %d slice %d", sign, P, sl);
  } else {
    if (!match_range(nd.panels[P].word, sl, pat)) stale(s);
    erase_tiles(nd, P, sl, 3);
    inv.desc = fmt("M9 insert %+d-kink unknot panel %d", sign, P);
  }
  inv.redex_hash = h_panel(nd, P);
  return {checked(std::move(nd), s), inv};
}

Applied apply_m10(const Diagram& d, const MoveSite& s) {
  check_locs(s, 6);
  int P = s.locs[0], sl = s.locs[1], pos = s.locs[2], t = s.locs[3];
  bool f1 = s.locs[4], f2 = s.locs[5];
  Diagram nd = d;
  auto pat = ring_pair_tiles(pos, t, f1, f2);
  MoveSite inv = s;
  inv.forward = !s.forward;
  if (s.forward) {
    if (sl < 0 || sl > (int)nd.panels[P].word.size()) stale(s);
    insert_tiles(nd, P, sl, pat);
    inv.desc = fmt("M10 remove ring pair panel %d slice %d", P, sl);
  } else {
    if (!match_range(nd.panels[P].word, sl, pat)) stale(s);
    erase_tiles(nd, P, sl, 6);
    inv.desc = fmt("M10 insert %+d-clasped ring pair panel %d", t, P);
  }
  inv.redex_hash = h_panel(nd, P);
  return {checked(std::move(nd), s), inv};
}

// ---- M13: slide a component over a closed component ---------------------

struct SlideCtx {
  const Diagram* d;
  Scan sc;
  std::vector<int> comp;
  int lo = -1;
  int side_rule = +1;  // +1: copy left of upward strands; -1: mirrored
  int rho = +1;        // +1: copy keeps lo's orientation; -1: reversed
  std::vector<std::vector<std::vector<int>>> ports_at;  // [panel][slice] ids

  explicit SlideCtx(const Diagram& dia) : d(&dia), sc(dia) {}

  bool lo_at(int P, int s, int q) const {
    const auto& L = sc.pg.levels[P][s];
    return q >= 0 && q < (int)L.size() && comp[L[q]] == lo;
  }
  int bit_at(int P, int s, int q) const { return sc.bit(P, s, q); }
  bool copy_left(int b) const { return side_rule > 0 ? b > 0 : b < 0; }
  int newpos(int P, int s, int q) const {
    int c = 0;
    for (int i = 0; i < q; i++)
      if (lo_at(P, s, i)) c++;
    int extra = (lo_at(P, s, q) && copy_left(bit_at(P, s, q))) ? 1 : 0;
    return q + c + extra;
  }
  int insertpos(int P, int s, int q) const {
    int c = 0;
    for (int i = 0; i < q && i < (int)sc.pg.levels[P][s].size(); i++)
      if (lo_at(P, s, i)) c++;
    return q + c;
  }
};

Applied apply_m13(const Diagram& d, const MoveSite& s) {
  if (!s.forward) {  // literal undo of a recorded slide
    if (s.payload.empty()) throw MoveError("M13 backward needs its payload");
    if (s.redex_hash != h_global(d)) stale(s);
    Diagram nd = parse_diagram(s.payload);
    MoveSite inv = s;
    inv.forward = true;
    inv.payload.clear();
    inv.redex_hash = h_global(nd);
    return {std::move(nd), inv};
  }
  check_locs(s, 4);
  int SP = s.locs[0], SS = s.locs[1], j = s.locs[2], cfg = s.locs[3];
  SlideCtx cx(d);
  if (!cx.sc.ok) stale(s);
  cx.comp = port_comps(cx.sc.pg);
  if (SP < 0 || SP >= (int)d.panels.size() || SS < 0 ||
      SS >= (int)cx.sc.pg.levels[SP].size() || j < 0 ||
      j + 1 >= cx.sc.width(SP, SS))
    stale(s);
  int lo_q = cfg == 0 ? j + 1 : j;
  int hi_q = cfg == 0 ? j : j + 1;
  cx.lo = cx.comp[cx.sc.pg.levels[SP][SS][lo_q]];
  int hi_comp = cx.comp[cx.sc.pg.levels[SP][SS][hi_q]];
  if (cx.lo == hi_comp) stale(s);
  for (int p = 0; p < cx.sc.pg.nports; p++)
    if (cx.comp[p] == cx.lo && (cx.sc.pg.meta[p].role == detail::PBottom ||
                                cx.sc.pg.meta[p].role == detail::PTop))
      stale(s);
  int lo_bit = cx.bit_at(SP, SS, lo_q), hi_bit = cx.bit_at(SP, SS, hi_q);
  // place the copy on the side facing the spliced strand
  if (cfg == 0)
    cx.side_rule = lo_bit > 0 ? +1 : -1;
  else
    cx.side_rule = lo_bit > 0 ? -1 : +1;
  cx.rho = -hi_bit * lo_bit;

  // comp id per (panel, slice) for tiles whose strands are not on the
  // boundary below them (cups, coupon emitters)
  cx.ports_at.assign(d.panels.size(), {});
  for (int pi = 0; pi < (int)d.panels.size(); pi++)
    cx.ports_at[pi].assign(d.panels[pi].word.size(), {});
  for (int p = 0; p < cx.sc.pg.nports; p++) {
    const auto& m = cx.sc.pg.meta[p];
    if (m.slice >= 0) cx.ports_at[m.panel][m.slice].push_back(p);
  }

  Diagram nd = d;
  for (auto& pan : nd.panels) pan.word.clear();
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    const auto& w = d.panels[pi].word;
    auto& out = nd.panels[pi].word;
    for (int si = 0; si <= (int)w.size(); si++) {
      if (pi == SP && si == SS) {
        // band splice joining the slid strand with the fresh copy
        int J;
        if (cfg == 0)
          J = cx.newpos(SP, SS, j);
        else
          J = cx.newpos(SP, SS, j) + 1;
        bool f = (cfg == 0 ? hi_bit : -hi_bit) > 0;
        out.push_back(cap(J));
        out.push_back(cup(J, f));
      }
      if (si == (int)w.size()) break;
      const Tile& t = w[si];
      switch (t.kind) {
        case TileKind::Cup: {
          int Lport = -1;
          for (int p : cx.ports_at[pi][si])
            if (cx.sc.pg.meta[p].role == detail::PCupL) Lport = p;
          bool in_lo = Lport >= 0 && cx.comp[Lport] == cx.lo;
          int q = cx.insertpos(pi, si, t.pos);
          if (!in_lo) {
            out.push_back(cup(q, t.left_up));
            break;
          }
          int bL = t.left_up ? +1 : -1;
          bool cflag = cx.rho > 0 ? t.left_up : !t.left_up;
          if (cx.copy_left(bL)) {
            out.push_back(cup(q, cflag));
            out.push_back(cup(q + 1, t.left_up));
          } else {
            out.push_back(cup(q, t.left_up));
            out.push_back(cup(q + 1, cflag));
          }
          break;
        }
        case TileKind::Cap: {
          bool in_lo = cx.lo_at(pi, si, t.pos);
          if (!in_lo) {
            out.push_back(cap(cx.newpos(pi, si, t.pos)));
            break;
          }
          int x = cx.newpos(pi, si, t.pos) -
                  (cx.copy_left(cx.bit_at(pi, si, t.pos)) ? 1 : 0);
          out.push_back(cap(x + 1));
          out.push_back(cap(x));
          break;
        }
        case TileKind::XP:
        case TileKind::XN: {
          bool a = cx.lo_at(pi, si, t.pos), b = cx.lo_at(pi, si, t.pos + 1);
          int base = cx.newpos(pi, si, t.pos) -
                     ((a && cx.copy_left(cx.bit_at(pi, si, t.pos))) ? 1 : 0);
          TileKind k = t.kind;
          auto push = [&](int p) { out.push_back(Tile{k, p, true, -1, 0}); };
          if (!a && !b)
            push(cx.newpos(pi, si, t.pos));
          else if (a && !b) {
            push(base + 1);
            push(base);
          } else if (!a && b) {
            push(base);
            push(base + 1);
          } else {
            push(base + 1);
            push(base);
            push(base + 2);
            push(base + 1);
          }
          break;
        }
        case TileKind::CouponIn: {
          int extra = 0;
          for (int k = 0; k < t.arity; k++)
            if (cx.lo_at(pi, si, t.pos + k)) extra++;
          int pos = t.arity > 0
                        ? cx.newpos(pi, si, t.pos) -
                              ((cx.lo_at(pi, si, t.pos) &&
                                cx.copy_left(cx.bit_at(pi, si, t.pos)))
                                   ? 1
                                   : 0)
                        : cx.insertpos(pi, si, t.pos);
          out.push_back(coupon_in(t.pair, pos, t.arity + extra));
          break;
        }
        case TileKind::CouponOut: {
          int extra = 0;
          for (int p : cx.ports_at[pi][si])
            if (cx.sc.pg.meta[p].role == detail::PCoutSlot &&
                cx.comp[p] == cx.lo)
              extra++;
          out.push_back(
              coupon_out(t.pair, cx.insertpos(pi, si, t.pos), t.arity + extra));
          break;
        }
      }
    }
  }
  MoveSite inv = s;
  inv.forward = false;
  inv.payload = serialize_diagram(d);
  inv.redex_hash = h_global(nd);
  inv.desc = fmt("M13 undo slide panel %d slice %d pos %d", SP, SS, j);
  return {checked(std::move(nd), s), inv};
}

// ---- M11: clasped ring pair around a strand (macro over M10 + M13) ------

std::vector<MoveSite> m11_parts(const Diagram& d, const MoveSite& s) {
  check_locs(s, 4);
  int P = s.locs[0], sl = s.locs[1], q = s.locs[2], t = s.locs[3];
  MoveSite ring;
  ring.kind = MoveKind::M10;
  ring.forward = true;
  ring.locs = {P, sl, q + 1, t, 1, 1};
  ring.redex_hash = h_panel(d, P);
  ring.desc = fmt("M10 insert %+d-clasped ring pair panel %d", t, P);
  return {ring};
}

Applied apply_m11(const Diagram& d, const MoveSite& s,
                  const MoveOptions& opt) {
  if (!s.forward) {
    if (s.payload.empty()) throw MoveError("M11 backward needs its payload");
    if (s.redex_hash != h_global(d)) stale(s);
    Diagram nd = parse_diagram(s.payload);
    MoveSite inv = s;
    inv.forward = true;
    inv.payload.clear();
    inv.redex_hash = h_global(nd);
    return {std::move(nd), inv};
  }
  if (s.redex_hash != h_global(d)) stale(s);
  auto parts = m11_parts(d, s);
  Applied a1 = apply_move(d, parts[0], opt);
  MoveSite slide;
  slide.kind = MoveKind::M13;
  slide.forward = true;
  // boundary above the two fresh cups: the strand, then the inner ring
  slide.locs = {s.locs[0], s.locs[1] + 2, s.locs[2], 0};
  slide.redex_hash = h_global(a1.diagram);
  slide.desc = "M13 slide onto the fresh ring";
  Applied a2 = apply_move(a1.diagram, slide, opt);
  MoveSite inv = s;
  inv.forward = false;
  inv.payload = serialize_diagram(d);
  inv.redex_hash = h_global(a2.diagram);
  inv.desc = fmt("M11 undo clasp at panel %d slice %d pos %d", s.locs[0],
                 s.locs[1], s.locs[2]);
  return {std::move(a2.diagram), inv};
}

Applied apply_m12(const Diagram& d, const MoveSite& s) {
  check_locs(s, 5);
  int P = s.locs[0], sl = s.locs[1], pos = s.locs[2], n = s.locs[3],
      eps = s.locs[4];
  Diagram nd = d;
  Scan sc(nd);
  if (!sc.ok) stale(s);
  if (P < 0 || P >= (int)nd.panels.size() || n < 1) stale(s);
  std::vector<int> bits;
  if (sl < 0 || sl >= (int)sc.pg.levels[P].size() ||
      pos + n > sc.width(P, sl))
    stale(s);
  for (int k = 0; k < n; k++) bits.push_back(sc.bit(P, sl, pos + k));
  auto kap = kappa_tiles(pos, n, eps);
  auto the = theta_tiles(pos, n, -eps, bits);
  MoveSite inv = s;
  inv.forward = !s.forward;
  if (s.forward) {
    if (!match_range(nd.panels[P].word, sl, kap)) stale(s);
    erase_tiles(nd, P, sl, (int)kap.size());
    insert_tiles(nd, P, sl, the);
    inv.desc = fmt("M12 blow up a %+d-kinked ring panel %d slice %d", eps, P,
                   sl);
  } else {
    if (!match_range(nd.panels[P].word, sl, the)) stale(s);
    erase_tiles(nd, P, sl, (int)the.size());
    insert_tiles(nd, P, sl, kap);
    inv.desc =
        fmt("M12 blow down %+d-kinked ring panel %d slice %d", eps, P, sl);
  }
  inv.redex_hash = h_panel(nd, P);
  return {checked(std::move(nd), s), inv};
}

Applied apply_m14(const Diagram& d, const MoveSite& s) {
  check_locs(s, 3);
  int side = s.locs[0], gi = s.locs[1], ss = s.locs[2];
  Diagram nd = d;
  if (!nd.tangle) stale(s);
  Scan strips(nd, true);
  if (!strips.ok) stale(s);
  const auto& groups = side == 0 ? nd.in_groups : nd.out_groups;
  if (gi < 0 || gi >= (int)groups.size() || ss < 0 || ss >= groups[gi])
    stale(s);
  int P = group_base(groups, gi) + 2 * ss;
  int bit = side == 0 ? strips.pg.bit[strips.pg.bottom_ports[P]]
                      : strips.pg.bit[strips.pg.top_ports[P]];
  std::vector<Tile> pat;
  if (side == 0) {
    pat = {cap(P), cup(P, bit > 0)};
    auto r = ring_tiles(P, 2);
    pat.insert(pat.end(), r.begin(), r.end());
  } else {
    pat = ring_tiles(P, 2);
    pat.push_back(cap(P));
    pat.push_back(cup(P, bit > 0));
  }
  auto& w = word_of(nd, 0);
  MoveSite inv = s;
  inv.forward = !s.forward;
  if (s.forward) {
    if (side == 0)
      w.insert(w.begin(), pat.begin(), pat.end());
    else
      w.insert(w.end(), pat.begin(), pat.end());
    inv.desc = fmt("M14 unpinch %s group %d strip %d",
                   side == 0 ? "bottom" : "top", gi, ss);
  } else {
    int start = side == 0 ? 0 : (int)w.size() - (int)pat.size();
    if (start < 0 || !match_range(w, start, pat)) stale(s);
    w.erase(w.begin() + start, w.begin() + start + (int)pat.size());
    inv.desc = fmt("M14 pinch %s group %d strip %d",
                   side == 0 ? "bottom" : "top", gi, ss);
  }
  inv.redex_hash = h_panel(nd, 0);
  return {checked(std::move(nd), s), inv};
}

Applied apply_m15(const Diagram& d, const MoveSite& s) {
  check_locs(s, 3);
  int side = s.locs[0], gi = s.locs[1], variant = s.locs[2];
  Diagram nd = d;
  if (!nd.tangle) stale(s);
  const auto& groups = side == 0 ? nd.in_groups : nd.out_groups;
  if (gi < 0 || gi >= (int)groups.size()) stale(s);
  int base = group_base(groups, gi), g2 = 2 * groups[gi];
  auto& w = word_of(nd, 0);
  if ((int)w.size() < g2) stale(s);
  int start = side == 0 ? 0 : (int)w.size() - g2;
  int want = s.forward ? -1 : +1;
  for (int k = 0; k < g2; k++) {
    const Tile& t = w[start + k];
    int pos;
    if (side == 0)
      pos = variant == 0 ? base + g2 - 1 - k : base - 1 + k;
    else
      pos = variant == 0 ? base + k : base + g2 - 2 - k;
    if (pos < 0 || !is_x(t) || t.pos != pos || xsign(t) != want) stale(s);
  }
  for (int k = 0; k < g2; k++) w[start + k] = xt(-want, w[start + k].pos);
  MoveSite inv = s;
  inv.forward = !s.forward;
  inv.redex_hash = h_panel(nd, 0);
  return {checked(std::move(nd), s), inv};
}

}  // namespace

Applied apply_move(const Diagram& d, const MoveSite& site,
                   const MoveOptions& opt) {
  // verify the fingerprint taken at enumeration time
  uint64_t now = 0;
  switch (site.kind) {
    case MoveKind::M1Commute:
    case MoveKind::M1Zig1:
    case MoveKind::M1Zig2:
    case MoveKind::M1R2:
    case MoveKind::M1R3Same:
    case MoveKind::M1R3Mixed:
    case MoveKind::M1CapSlide:
    case MoveKind::M1CupSlide:
    case MoveKind::M9:
    case MoveKind::M10:
    case MoveKind::M12:
      now = h_panel(d, site.locs.empty() ? -1 : site.locs[0]);
      break;
    case MoveKind::M2:
    case MoveKind::M3:
    case MoveKind::M4:
    case MoveKind::M5:
      now = h_pair(d, site.locs.empty() ? -1 : site.locs[0]);
      break;
    case MoveKind::M6: {
      check_locs(site, 2);
      PairLoc Llo = locate_pair(d, site.locs[1]);
      // the primary redex panel differs by direction; hash both coupons
      now = neighborhood_hash(
          d,
          {site.forward
               ? (Llo.in_panel >= 0 ? locate_pair(d, site.locs[0]).in_panel
                                    : -1)
               : Llo.out_panel,
           site.forward ? Llo.out_panel : Llo.in_panel},
          {site.locs[0], site.locs[1]});
      break;
    }
    case MoveKind::M7:
    case MoveKind::M8:
      now = site.forward
                ? h_pair(d, site.locs.empty() ? -1 : site.locs[0])
                : h_panel(d, site.locs.empty() ? -1 : site.locs[0]);
      break;
    case MoveKind::M11:
    case MoveKind::M13:
      now = h_global(d);
      break;
    case MoveKind::M14:
    case MoveKind::M15:
      now = h_panel(d, 0);
      break;
  }
  if (now != site.redex_hash) stale(site);

  switch (site.kind) {
    case MoveKind::M1Commute: return apply_commute(d, site);
    case MoveKind::M1Zig1:
    case MoveKind::M1Zig2: return apply_zig(d, site);
    case MoveKind::M1R2: return apply_r2(d, site);
    case MoveKind::M1R3Same:
    case MoveKind::M1R3Mixed: return apply_r3(d, site);
    case MoveKind::M1CapSlide:
    case MoveKind::M1CupSlide: return apply_extremum_slide(d, site);
    case MoveKind::M2: return apply_m2(d, site);
    case MoveKind::M3: return apply_m3(d, site);
    case MoveKind::M4: return apply_m4(d, site);
    case MoveKind::M5: return apply_m5(d, site);
    case MoveKind::M6: return apply_m6(d, site, opt);
    case MoveKind::M7: return apply_m7(d, site);
    case MoveKind::M8: return apply_m8(d, site);
    case MoveKind::M9: return apply_m9(d, site);
    case MoveKind::M10: return apply_m10(d, site);
    case MoveKind::M11: return apply_m11(d, site, opt);
    case MoveKind::M12: return apply_m12(d, site);
    case MoveKind::M13: return apply_m13(d, site);
    case MoveKind::M14: return apply_m14(d, site);
    case MoveKind::M15: return apply_m15(d, site);
  }
  throw MoveError("unknown move kind");
}

std::vector<MoveSite> expand_macro(const Diagram& d, const MoveSite& site,
                                   const MoveOptions& opt) {
  if (site.kind != MoveKind::M11 || !site.forward)
    throw MoveError("only forward M11 expands into primitive moves");
  if (site.redex_hash != h_global(d)) stale(site);
  auto parts = m11_parts(d, site);
  Applied a1 = apply_move(d, parts[0], opt);
  MoveSite slide;
  slide.kind = MoveKind::M13;
  slide.forward = true;
  slide.locs = {site.locs[0], site.locs[1] + 2, site.locs[2], 0};
  slide.redex_hash = h_global(a1.diagram);
  slide.desc = "M13 slide onto the fresh ring";
  parts.push_back(slide);
  return parts;
}

// =========================================================================
// Random walk
// =========================================================================

namespace {

// +1 when the direction tends to grow the diagram, -1 when it shrinks
int growth(MoveKind k, bool fwd) {
  switch (k) {
    case MoveKind::M1Zig1:
    case MoveKind::M1Zig2:
    case MoveKind::M1R2: return fwd ? -1 : +1;
    case MoveKind::M2:
    case MoveKind::M3:
    case MoveKind::M4:
    case MoveKind::M7:
    case MoveKind::M9:
    case MoveKind::M10:
    case MoveKind::M11:
    case MoveKind::M13:
    case MoveKind::M14: return fwd ? +1 : -1;
    case MoveKind::M8: return fwd ? -1 : +1;
    default: return 0;
  }
}

int tile_count(const Diagram& d) {
  int n = 0;
  for (const auto& p : d.panels) n += (int)p.word.size();
  return n;
}

}  // namespace

WalkResult random_walk(const Diagram& d, uint64_t seed, int steps,
                       const std::vector<MoveKind>& kinds,
                       const MoveOptions& opt, int tile_budget) {
  if (kinds.empty()) throw MoveError("random_walk needs at least one kind");
  WalkResult res;
  res.diagram = d;
  std::mt19937_64 rng(seed);
  for (int step = 0; step < steps; step++) {
    MoveKind k = kinds[rng() % kinds.size()];
    bool over = tile_count(res.diagram) > tile_budget;
    std::vector<bool> dirs;
    for (bool f : {true, false})
      if (!over || growth(k, f) <= 0) dirs.push_back(f);
    MoveLogEntry ent;
    ent.step = step;
    ent.kind = k;
    if (dirs.empty()) {
      ent.forward = true;
      ent.applied = false;
      ent.site = "over budget, no shrinking direction";
      ent.diagram_hash = diagram_hash(res.diagram);
      res.log.push_back(ent);
      res.skipped++;
      continue;
    }
    bool fwd = dirs[rng() % dirs.size()];
    auto sites = enumerate_sites(res.diagram, k, fwd, opt);
    if (sites.empty() && dirs.size() > 1) {
      fwd = !fwd;
      sites = enumerate_sites(res.diagram, k, fwd, opt);
    }
    ent.forward = fwd;
    if (sites.empty()) {
      ent.applied = false;
      ent.site = "no site";
      ent.diagram_hash = diagram_hash(res.diagram);
      res.log.push_back(ent);
      res.skipped++;
      continue;
    }
    const MoveSite& pick = sites[rng() % sites.size()];
    Applied ap = apply_move(res.diagram, pick, opt);
    res.diagram = std::move(ap.diagram);
    ent.applied = true;
    ent.site = pick.desc;
    ent.diagram_hash = diagram_hash(res.diagram);
    res.log.push_back(ent);
    res.applied++;
  }
  return res;
}

}  // namespace bridged
