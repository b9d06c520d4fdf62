#include "bridged/diagram.hpp"

#include <cassert>
#include <map>
#include <sstream>
#include <stdexcept>

#include "portgraph.hpp"

namespace bridged {

int tile_in(const Tile& t) {
  switch (t.kind) {
    case TileKind::Cup: return 0;
    case TileKind::Cap: return 2;
    case TileKind::XP:
    case TileKind::XN: return 2;
    case TileKind::CouponIn: return t.arity;
    case TileKind::CouponOut: return 0;
  }
  return 0;
}

int tile_out(const Tile& t) {
  switch (t.kind) {
    case TileKind::Cup: return 2;
    case TileKind::Cap: return 0;
    case TileKind::XP:
    case TileKind::XN: return 2;
    case TileKind::CouponIn: return 0;
    case TileKind::CouponOut: return t.arity;
  }
  return 0;
}

Tile cup(int pos, bool left_up) {
  Tile t;
  t.kind = TileKind::Cup;
  t.pos = pos;
  t.left_up = left_up;
  return t;
}
Tile cap(int pos) {
  Tile t;
  t.kind = TileKind::Cap;
  t.pos = pos;
  return t;
}
Tile xp(int pos) {
  Tile t;
  t.kind = TileKind::XP;
  t.pos = pos;
  return t;
}
Tile xn(int pos) {
  Tile t;
  t.kind = TileKind::XN;
  t.pos = pos;
  return t;
}
Tile coupon_in(int pair, int pos, int arity) {
  Tile t;
  t.kind = TileKind::CouponIn;
  t.pos = pos;
  t.pair = pair;
  t.arity = arity;
  return t;
}
Tile coupon_out(int pair, int pos, int arity) {
  Tile t;
  t.kind = TileKind::CouponOut;
  t.pos = pos;
  t.pair = pair;
  t.arity = arity;
  return t;
}

int Diagram::bottom_arity() const {
  int s = 0;
  for (int g : in_groups) s += 2 * g;
  return s;
}

int Diagram::top_arity() const {
  int s = 0;
  for (int g : out_groups) s += 2 * g;
  return s;
}

int Diagram::ensure_pair(const std::string& name) {
  for (size_t i = 0; i < pair_names.size(); i++)
    if (pair_names[i] == name) return (int)i;
  pair_names.push_back(name);
  return (int)pair_names.size() - 1;
}

std::string Diagram::fresh_pair_name(const std::string& stem) {
  for (int k = 1;; k++) {
    std::string cand = stem + std::to_string(k);
    bool taken = false;
    for (const auto& n : pair_names)
      if (n == cand) { taken = true; break; }
    if (!taken) return cand;
  }
}

// ---------------- parsing ----------------

namespace {

struct Tok {
  std::string s;
  int line, col;
};

std::vector<Tok> lex(const std::string& text) {
  std::vector<Tok> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto step = [&](char c) {
    if (c == '\n') { line++; col = 1; }
    else col++;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') { step(text[i]); i++; }
      continue;
    }
    if (isspace((unsigned char)c) || c == ';') { step(c); i++; continue; }
    if (std::string("{}()=,").find(c) != std::string::npos) {
      out.push_back({std::string(1, c), line, col});
      step(c); i++;
      continue;
    }
    int sl = line, sc = col;
    std::string w;
    while (i < text.size()) {
      char d = text[i];
      if (isspace((unsigned char)d) || d == ';' || d == '#' ||
          std::string("{}()=,").find(d) != std::string::npos)
        break;
      w += d;
      step(d); i++;
    }
    out.push_back({w, sl, sc});
  }
  return out;
}

struct Parser {
  std::vector<Tok> toks;
  size_t at = 0;

  [[noreturn]] void fail(const std::string& msg) {
    int l = 0, c = 0;
    if (at < toks.size()) { l = toks[at].line; c = toks[at].col; }
    else if (!toks.empty()) { l = toks.back().line; c = toks.back().col; }
    throw ParseError{l, c, msg};
  }
  bool done() const { return at >= toks.size(); }
  const std::string& peek() {
    if (done()) fail("unexpected end of input");
    return toks[at].s;
  }
  std::string next() {
    if (done()) fail("unexpected end of input");
    return toks[at++].s;
  }
  void expect(const std::string& s) {
    if (next() != s) { at--; fail("expected '" + s + "'"); }
  }
  long number() {
    std::string s = next();
    try {
      size_t used = 0;
      long v = std::stol(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (...) {
      at--;
      fail("expected a number, got '" + s + "'");
    }
  }

  std::vector<int> genus_list() {
    expect("(");
    std::vector<int> gs;
    if (peek() != ")") {
      for (;;) {
        long g = number();
        if (g < 0) { at--; fail("negative genus"); }
        gs.push_back((int)g);
        if (peek() == ",") { next(); continue; }
        break;
      }
    }
    expect(")");
    return gs;
  }

  void tiles(Diagram& d, Panel& p) {
    while (peek() != "}") {
      std::string k = next();
      Tile t;
      if (k == "cup") {
        t.kind = TileKind::Cup;
        t.pos = (int)number();
        std::string dir = next();
        if (dir != "lr" && dir != "rl") { at--; fail("cup direction must be lr or rl"); }
        t.left_up = dir == "lr";
      } else if (k == "cap") {
        t.kind = TileKind::Cap;
        t.pos = (int)number();
      } else if (k == "xp" || k == "xn") {
        t.kind = k == "xp" ? TileKind::XP : TileKind::XN;
        t.pos = (int)number();
      } else if (k == "coupon+" || k == "coupon-") {
        t.kind = k == "coupon+" ? TileKind::CouponIn : TileKind::CouponOut;
        std::string name = next();
        t.pair = d.ensure_pair(name);
        t.pos = (int)number();
        long n = number();
        if (n < 0) { at--; fail("negative coupon arity"); }
        t.arity = (int)n;
      } else {
        at--;
        fail("unknown tile '" + k + "'");
      }
      if (t.pos < 0) fail("negative position");
      p.word.push_back(t);
    }
    next();  // consume }
  }
};

}  // namespace

Diagram parse_diagram(const std::string& text) {
  Parser ps{lex(text)};
  Diagram d;
  while (!ps.done()) {
    std::string head = ps.next();
    if (head == "tangle") {
      if (d.tangle) { ps.at--; ps.fail("only one tangle block is allowed"); }
      if (!d.panels.empty()) { ps.at--; ps.fail("tangle block must come first"); }
      d.tangle = true;
      ps.expect("in");
      ps.expect("=");
      d.in_groups = ps.genus_list();
      ps.expect("out");
      ps.expect("=");
      d.out_groups = ps.genus_list();
      ps.expect("{");
      Panel p;
      ps.tiles(d, p);
      d.panels.push_back(std::move(p));
    } else if (head == "panel") {
      ps.expect("{");
      Panel p;
      ps.tiles(d, p);
      d.panels.push_back(std::move(p));
    } else {
      ps.at--;
      ps.fail("expected 'panel' or 'tangle', got '" + head + "'");
    }
  }
  if (d.panels.empty()) {
    throw ParseError{1, 1, "no panels"};
  }
  return d;
}

std::string serialize_diagram(const Diagram& d) {
  std::ostringstream os;
  for (size_t pi = 0; pi < d.panels.size(); pi++) {
    if (pi == 0 && d.tangle) {
      os << "tangle in=(";
      for (size_t i = 0; i < d.in_groups.size(); i++)
        os << (i ? "," : "") << d.in_groups[i];
      os << ") out=(";
      for (size_t i = 0; i < d.out_groups.size(); i++)
        os << (i ? "," : "") << d.out_groups[i];
      os << ") {\n";
    } else {
      os << "panel {\n";
    }
    for (const Tile& t : d.panels[pi].word) {
      os << "  ";
      switch (t.kind) {
        case TileKind::Cup:
          os << "cup " << t.pos << (t.left_up ? " lr" : " rl");
          break;
        case TileKind::Cap: os << "cap " << t.pos; break;
        case TileKind::XP: os << "xp " << t.pos; break;
        case TileKind::XN: os << "xn " << t.pos; break;
        case TileKind::CouponIn:
          os << "coupon+ " << d.pair_names[t.pair] << " " << t.pos << " "
             << t.arity;
          break;
        case TileKind::CouponOut:
          os << "coupon- " << d.pair_names[t.pair] << " " << t.pos << " "
             << t.arity;
          break;
      }
      os << "\n";
    }
    os << "}\n";
  }
  return os.str();
}

uint64_t diagram_hash(const Diagram& d) {
  std::string s = serialize_diagram(d);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<ValidationError> validate(const Diagram& d) {
  std::vector<ValidationError> errs;
  if (d.panels.empty()) {
    errs.push_back({-1, -1, "diagram has no panels"});
    return errs;
  }
  if (!d.tangle && (!d.in_groups.empty() || !d.out_groups.empty()))
    errs.push_back({-1, -1, "boundary groups on a non-tangle diagram"});
  // Structural simulation of every panel.
  std::map<int, std::pair<int, int>> seen_in, seen_out;  // pair -> (count, arity)
  for (int pi = 0; pi < (int)d.panels.size(); pi++) {
    long width = (pi == 0 && d.tangle) ? d.bottom_arity() : 0;
    const auto& word = d.panels[pi].word;
    for (int si = 0; si < (int)word.size(); si++) {
      const Tile& t = word[si];
      if (t.pos < 0) {
        errs.push_back({pi, si, "negative position"});
        return errs;
      }
      int need = tile_in(t);
      if (need > 0 && t.pos + need > width) {
        errs.push_back({pi, si, "tile reaches past the current strand count (" +
                                    std::to_string(width) + ")"});
        return errs;
      }
      if (need == 0 && t.pos > width) {
        errs.push_back({pi, si, "tile inserted past the current strand count (" +
                                    std::to_string(width) + ")"});
        return errs;
      }
      if (t.kind == TileKind::CouponIn || t.kind == TileKind::CouponOut) {
        if (t.pair < 0 || t.pair >= d.pair_count()) {
          errs.push_back({pi, si, "coupon with unregistered pair id"});
          return errs;
        }
        auto& slot =
            t.kind == TileKind::CouponIn ? seen_in[t.pair] : seen_out[t.pair];
        slot.first++;
        slot.second = t.arity;
      }
      width += tile_out(t) - need;
    }
    bool open_top = pi == 0 && d.tangle;
    if (!open_top && width != 0)
      errs.push_back({pi, (int)word.size() - 1,
                      "panel not closed (" + std::to_string(width) +
                          " dangling strands)"});
  }
  for (int p = 0; p < d.pair_count(); p++) {
    int ci = seen_in.count(p) ? seen_in[p].first : 0;
    int co = seen_out.count(p) ? seen_out[p].first : 0;
    if (ci != 1 || co != 1) {
      errs.push_back({-1, -1, "unpaired coupon " + d.pair_names[p] + " (" +
                                  std::to_string(ci) + " '+', " +
                                  std::to_string(co) + " '-')"});
    } else if (seen_in[p].second != seen_out[p].second) {
      errs.push_back({-1, -1, "coupon pair " + d.pair_names[p] +
                                  " has mismatched arities"});
    }
  }
  if (!errs.empty()) return errs;
  // Direction constraints (cap on co-directed strands, cup flag conflicts...)
  auto dir_errs = detail::direction_errors(d);
  errs.insert(errs.end(), dir_errs.begin(), dir_errs.end());
  return errs;
}

void require_valid(const Diagram& d) {
  auto errs = validate(d);
  if (errs.empty()) return;
  std::ostringstream os;
  os << "invalid diagram:";
  for (const auto& e : errs) {
    os << " [panel " << e.panel << " slice " << e.slice << "] " << e.msg << ";";
  }
  throw std::runtime_error(os.str());
}

std::vector<long> framing_vector(const Diagram& d) {
  Traced tr = trace_components(d);
  std::vector<long> fr;
  for (const auto& c : tr.comps)
    if (c.closed) fr.push_back(c.framing);
  return fr;
}

int Traced::closed_count() const {
  int n = 0;
  for (const auto& c : comps) n += c.closed ? 1 : 0;
  return n;
}

}  // namespace bridged
