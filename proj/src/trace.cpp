#include <algorithm>
#include <cassert>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "portgraph.hpp"

namespace bridged::detail {

namespace {

bool up_facing(uint8_t role) {
  // Ports whose strand continues upward out of the tile / boundary.
  return role == PBottom || role == PCupL || role == PCupR ||
         role == PXOutL || role == PXOutR || role == PCoutSlot;
}

std::string port_desc(const PortGraph& pg, int q) {
  const PortMeta& m = pg.meta[q];
  std::ostringstream os;
  if (m.role == PBottom) os << "bottom end " << m.pos;
  else if (m.role == PTop) os << "top end " << m.pos;
  else {
    os << "panel " << m.panel << " slice " << m.slice << " ";
    switch (m.role) {
      case PCupL: case PCupR: os << "cup"; break;
      case PCapL: case PCapR: os << "cap"; break;
      case PXInL: case PXInR: case PXOutL: case PXOutR: os << "crossing"; break;
      case PCinSlot: os << "coupon+ slot " << pg.slot_of[q]; break;
      case PCoutSlot: os << "coupon- slot " << pg.slot_of[q]; break;
      default: os << "?";
    }
  }
  return os.str();
}

// Union-find with a parity bit relative to the parent.
struct ParityDSU {
  std::vector<int> pa;
  std::vector<uint8_t> rel;
  explicit ParityDSU(int n) : pa(n), rel(n, 0) {
    for (int i = 0; i < n; i++) pa[i] = i;
  }
  std::pair<int, uint8_t> find(int x) {
    if (pa[x] == x) return {x, 0};
    auto [r, pr] = find(pa[x]);
    pa[x] = r;
    rel[x] ^= pr;
    return {r, rel[x]};
  }
  // Enforce dir(a) = dir(b) xor r. Returns false on contradiction.
  bool unite(int a, int b, uint8_t r) {
    auto [ra, qa] = find(a);
    auto [rb, qb] = find(b);
    if (ra == rb) return (uint8_t)(qa ^ qb) == r;
    pa[ra] = rb;
    rel[ra] = qa ^ qb ^ r;
    return true;
  }
};

struct Edge {
  int to;
  const char* how;
};

// Cycle witness: shortest path between two ports in the constraint graph.
std::string witness_path(const PortGraph& pg,
                         const std::vector<std::vector<Edge>>& adj, int from,
                         int to) {
  std::vector<int> prev(pg.nports, -2);
  std::vector<const char*> how(pg.nports, nullptr);
  std::queue<int> bfs;
  bfs.push(from);
  prev[from] = -1;
  while (!bfs.empty()) {
    int q = bfs.front();
    bfs.pop();
    if (q == to) break;
    for (const Edge& e : adj[q]) {
      if (prev[e.to] != -2) continue;
      prev[e.to] = q;
      how[e.to] = e.how;
      bfs.push(e.to);
    }
  }
  std::ostringstream os;
  std::vector<int> path;
  for (int q = to; q != -1; q = prev[q]) {
    path.push_back(q);
    if (q == from) break;
  }
  std::reverse(path.begin(), path.end());
  for (size_t i = 0; i < path.size(); i++) {
    if (i) os << " -> ";
    os << port_desc(pg, path[i]);
  }
  return os.str();
}

}  // namespace

bool PortGraph::build(const Diagram& dia, std::vector<ValidationError>& errs) {
  d = &dia;
  coupons.assign(dia.pair_count(), CouponLoc{});
  for (int p = 0; p < dia.pair_count(); p++) coupons[p].pair = p;
  cin_ports.assign(dia.pair_count(), {});
  cout_ports.assign(dia.pair_count(), {});
  auto add_port = [&](int panel, int slice, int pos, PortRole role) {
    wire.push_back(-1);
    mate.push_back(-1);
    mate_rel.push_back(0);
    pin.push_back(0);
    meta.push_back({panel, slice, pos, (uint8_t)role});
    slot_of.push_back(-1);
    cross_of.push_back(-1);
    pair_of.push_back(-1);
    return nports++;
  };
  auto connect = [&](int below, int above) {
    wire[below] = above;
    wire[above] = below;
  };
  levels.assign(dia.panels.size(), {});
  for (int pi = 0; pi < (int)dia.panels.size(); pi++) {
    std::vector<int> live;
    if (pi == 0 && dia.tangle)
      for (int j = 0; j < dia.bottom_arity(); j++) {
        int b = add_port(pi, -1, j, PBottom);
        bottom_ports.push_back(b);
        live.push_back(b);
      }
    const auto& word = dia.panels[pi].word;
    for (int si = 0; si < (int)word.size(); si++) {
      levels[pi].push_back(live);
      const Tile& t = word[si];
      int need = tile_in(t);
      if (t.pos < 0 || (need > 0 && t.pos + need > (int)live.size()) ||
          (need == 0 && t.pos > (int)live.size())) {
        errs.push_back({pi, si, "tile out of range during tracing"});
        return false;
      }
      switch (t.kind) {
        case TileKind::Cup: {
          int L = add_port(pi, si, t.pos, PCupL);
          int R = add_port(pi, si, t.pos + 1, PCupR);
          mate[L] = R;
          mate[R] = L;
          mate_rel[L] = mate_rel[R] = 1;
          pin[L] = t.left_up ? +1 : -1;
          pin[R] = (int8_t)-pin[L];
          live.insert(live.begin() + t.pos, L);
          live.insert(live.begin() + t.pos + 1, R);
          break;
        }
        case TileKind::Cap: {
          int L = add_port(pi, si, t.pos, PCapL);
          int R = add_port(pi, si, t.pos + 1, PCapR);
          mate[L] = R;
          mate[R] = L;
          mate_rel[L] = mate_rel[R] = 1;
          connect(live[t.pos], L);
          connect(live[t.pos + 1], R);
          live.erase(live.begin() + t.pos, live.begin() + t.pos + 2);
          break;
        }
        case TileKind::XP:
        case TileKind::XN: {
          int xid = (int)xs.size();
          int inL = add_port(pi, si, t.pos, PXInL);
          int inR = add_port(pi, si, t.pos + 1, PXInR);
          int outL = add_port(pi, si, t.pos, PXOutL);
          int outR = add_port(pi, si, t.pos + 1, PXOutR);
          mate[inL] = outR;
          mate[outR] = inL;
          mate[inR] = outL;
          mate[outL] = inR;
          connect(live[t.pos], inL);
          connect(live[t.pos + 1], inR);
          live[t.pos] = outL;
          live[t.pos + 1] = outR;
          for (int q : {inL, inR, outL, outR}) cross_of[q] = xid;
          xs.push_back({pi, si, t.pos, t.kind == TileKind::XP ? +1 : -1, inL,
                        inR, outL, outR});
          break;
        }
        case TileKind::CouponIn: {
          auto& loc = coupons[t.pair];
          loc.in_panel = pi;
          loc.in_slice = si;
          loc.in_pos = t.pos;
          loc.arity = t.arity;
          for (int k = 0; k < t.arity; k++) {
            int q = add_port(pi, si, t.pos + k, PCinSlot);
            slot_of[q] = k;
            pair_of[q] = t.pair;
            connect(live[t.pos + k], q);
            cin_ports[t.pair].push_back(q);
          }
          live.erase(live.begin() + t.pos, live.begin() + t.pos + t.arity);
          break;
        }
        case TileKind::CouponOut: {
          auto& loc = coupons[t.pair];
          loc.out_panel = pi;
          loc.out_slice = si;
          loc.out_pos = t.pos;
          loc.arity = t.arity;
          for (int k = 0; k < t.arity; k++) {
            int q = add_port(pi, si, t.pos + k, PCoutSlot);
            slot_of[q] = k;
            pair_of[q] = t.pair;
            cout_ports[t.pair].push_back(q);
            live.insert(live.begin() + t.pos + k, q);
          }
          break;
        }
      }
    }
    levels[pi].push_back(live);
    if (pi == 0 && dia.tangle) {
      for (int j = 0; j < (int)live.size(); j++) {
        int tp = add_port(pi, -1, j, PTop);
        top_ports.push_back(tp);
        connect(live[j], tp);
      }
    } else if (!live.empty()) {
      errs.push_back({pi, (int)word.size() - 1, "panel not closed"});
      return false;
    }
  }
  for (int p = 0; p < dia.pair_count(); p++) {
    if ((int)cin_ports[p].size() != coupons[p].arity ||
        (int)cout_ports[p].size() != coupons[p].arity) {
      errs.push_back({-1, -1, "coupon pair " + dia.pair_names[p] +
                                  " is unpaired or arity-mismatched"});
      return false;
    }
    for (int k = 0; k < coupons[p].arity; k++) {
      int a = cin_ports[p][k], b = cout_ports[p][k];
      mate[a] = b;
      mate[b] = a;  // slot i to slot i, same vertical direction
    }
  }
  return true;
}

bool PortGraph::solve_dirs(bool with_bstrips,
                           std::vector<ValidationError>& errs) {
  ParityDSU dsu(nports);
  std::vector<std::vector<Edge>> adj(nports);
  auto link = [&](int a, int b, uint8_t r, const char* how) -> bool {
    adj[a].push_back({b, how});
    adj[b].push_back({a, how});
    return dsu.unite(a, b, r);
  };
  for (int q = 0; q < nports; q++) {
    if (wire[q] > q)
      if (!link(q, wire[q], 0, "strand")) {
        errs.push_back({meta[q].panel, meta[q].slice,
                        "direction conflict along " + port_desc(*this, q)});
        return false;
      }
    if (mate[q] > q)
      if (!link(q, mate[q], mate_rel[q], "tile")) {
        // A contradiction here closes a cycle; describe it.
        errs.push_back(
            {meta[q].panel, meta[q].slice,
             "inconsistent strand orientation around a cycle: " +
                 witness_path(*this, adj, q, mate[q]) +
                 (mate_rel[q] ? " (ends must run in opposite directions)"
                              : " (ends must run in the same direction)")});
        return false;
      }
  }
  if (with_bstrips) {
    auto add_group_strips = [&](const std::vector<int>& groups,
                                const std::vector<int>& ports,
                                const char* side) -> bool {
      int base = 0;
      for (int g : groups) {
        for (int s = 0; s < g; s++) {
          int a = ports[base + 2 * s], b = ports[base + 2 * s + 1];
          if (!link(a, b, 1, "b-strip")) {
            errs.push_back(
                {-1, -1,
                 std::string("closure cycle through a b-strip (") + side +
                     "): " + witness_path(*this, adj, a, b)});
            return false;
          }
        }
        base += 2 * g;
      }
      return true;
    };
    if (!add_group_strips(d->in_groups, bottom_ports, "bottom")) return false;
    if (!add_group_strips(d->out_groups, top_ports, "top")) return false;
  }
  // Apply cup pins class by class; first pinned port wins, conflicts reported.
  bit.assign(nports, 0);
  std::vector<int> pin_port(nports, -1);   // per root
  std::vector<int8_t> root_val(nports, 0);
  for (int q = 0; q < nports; q++) {
    if (pin[q] == 0) continue;
    auto [r, rq] = dsu.find(q);
    int8_t want = rq ? (int8_t)-pin[q] : pin[q];
    if (root_val[r] == 0) {
      root_val[r] = want;
      pin_port[r] = q;
    } else if (root_val[r] != want) {
      errs.push_back(
          {meta[q].panel, meta[q].slice,
           "conflicting cup orientations around a cycle: " +
               witness_path(*this, adj, pin_port[r], q)});
      return false;
    }
  }
  // Free classes: orient the first-encountered segment upward.
  for (int q = 0; q < nports; q++) {
    auto [r, rq] = dsu.find(q);
    if (root_val[r] == 0) root_val[r] = rq ? -1 : +1;
    bit[q] = rq ? (int8_t)-root_val[r] : root_val[r];
  }
  return true;
}

std::vector<ValidationError> direction_errors(const Diagram& d) {
  std::vector<ValidationError> errs;
  PortGraph pg;
  if (!pg.build(d, errs)) return errs;
  pg.solve_dirs(false, errs);
  return errs;
}

}  // namespace bridged::detail

namespace bridged {

using detail::PortGraph;
using detail::up_facing;

Traced trace_components(const Diagram& d) {
  require_valid(d);
  std::vector<ValidationError> errs;
  PortGraph pg;
  if (!pg.build(d, errs) || !pg.solve_dirs(false, errs))
    throw std::runtime_error("trace_components on invalid diagram");
  Traced tr;
  tr.coupons = pg.coupons;

  // Component membership: connected classes of the wire+mate graph, labeled
  // in order of their smallest port.
  std::vector<int> comp(pg.nports, -1);
  int ncomp = 0;
  for (int q0 = 0; q0 < pg.nports; q0++) {
    if (comp[q0] != -1) continue;
    int id = ncomp++;
    std::vector<int> stack{q0};
    comp[q0] = id;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (int nb : {pg.wire[q], pg.mate[q]})
        if (nb >= 0 && comp[nb] == -1) {
          comp[nb] = id;
          stack.push_back(nb);
        }
    }
  }

  // Crossing records with geometric signs, plus curl detection.
  tr.crossings.resize(pg.xs.size());
  for (size_t k = 0; k < pg.xs.size(); k++) {
    const auto& x = pg.xs[k];
    CrossingInfo& ci = tr.crossings[k];
    ci.id = (int)k;
    ci.panel = x.panel;
    ci.slice = x.slice;
    ci.pos = x.pos;
    ci.tile_sign = x.tsign;
    ci.comp_a = comp[x.inL];
    ci.comp_b = comp[x.inR];
    ci.sign = x.tsign * pg.bit[x.inL] * pg.bit[x.inR];
    int bl = pg.wire[x.inL], br = pg.wire[x.inR];
    bool curl_below = bl >= 0 && br >= 0 &&
                      (pg.meta[bl].role == detail::PCupL ||
                       pg.meta[bl].role == detail::PCupR) &&
                      pg.mate[bl] == br;
    int al = pg.wire[x.outL], ar = pg.wire[x.outR];
    bool curl_above = al >= 0 && ar >= 0 &&
                      (pg.meta[al].role == detail::PCapL ||
                       pg.meta[al].role == detail::PCapR) &&
                      pg.mate[al] == ar;
    ci.curl = curl_below || curl_above;
  }

  // Walk each component along its canonical orientation, recording events.
  std::vector<std::vector<int>> members(ncomp);
  for (int q = 0; q < pg.nports; q++) members[comp[q]].push_back(q);
  for (int id = 0; id < ncomp; id++) {
    ComponentInfo info;
    info.id = id;
    std::vector<int> endpoints;
    for (int q : members[id])
      if (pg.mate[q] == -1) endpoints.push_back(q);
    info.closed = endpoints.empty();

    int start = -1;
    bool wire_first = true;
    if (info.closed) {
      start = members[id][0];  // members are sorted by construction
      // First step follows orientation: go along the wire iff that moves the
      // way the strand points; otherwise cross the tile first.
      bool wire_up = up_facing(pg.meta[start].role);
      wire_first = (pg.bit[start] == +1) == wire_up;
    } else {
      // Start at the endpoint whose direction points into the arc.
      for (int e : endpoints) {
        bool into_up = pg.meta[e].role == detail::PBottom;
        if ((pg.bit[e] == +1) == into_up) { start = e; break; }
      }
      assert(start != -1);
    }

    auto record_end = [&](int q) {
      info.ends.push_back({pg.meta[q].role == detail::PBottom ? 0 : 1,
                           pg.meta[q].pos});
    };
    if (!info.closed) record_end(start);

    int q = start;
    bool via_wire = wire_first;
    size_t steps = 0;
    for (;;) {
      if (++steps > (size_t)2 * pg.nports + 4)
        throw std::runtime_error("component walk did not terminate");
      if (via_wire) {
        int nxt = pg.wire[q];
        assert(nxt >= 0);
        q = nxt;
      } else {
        int nxt = pg.mate[q];
        if (nxt < 0) {  // open arc finished
          record_end(q);
          break;
        }
        // Record the tile traversal as an event where it matters.
        uint8_t role = pg.meta[q].role;
        if (pg.cross_of[q] >= 0) {
          const CrossingInfo& ci = tr.crossings[pg.cross_of[q]];
          bool strand_a = q == pg.xs[ci.id].inL || q == pg.xs[ci.id].outR;
          bool over = strand_a == (ci.tile_sign == +1);
          CompEvent ev;
          ev.kind = over ? CompEvent::Over : CompEvent::Under;
          ev.ref = ci.id;
          ev.dir = pg.bit[q];
          ev.sign = ci.sign;
          info.events.push_back(ev);
        } else if (role == detail::PCinSlot || role == detail::PCoutSlot) {
          int cin = role == detail::PCinSlot ? q : nxt;
          CompEvent ev;
          ev.kind = CompEvent::Pass;
          ev.ref = pg.pair_of[q];
          ev.slot = pg.slot_of[q];
          ev.dir = pg.bit[q];
          ev.sign = pg.bit[cin];
          info.events.push_back(ev);
        }
        q = nxt;
      }
      via_wire = !via_wire;
      if (info.closed && q == start && via_wire == wire_first) break;
    }

    // Fold curl crossings: their two events contract to a single Curl event.
    std::vector<CompEvent> folded;
    std::vector<bool> seen_curl(tr.crossings.size(), false);
    for (const CompEvent& ev : info.events) {
      if ((ev.kind == CompEvent::Over || ev.kind == CompEvent::Under) &&
          tr.crossings[ev.ref].curl) {
        if (seen_curl[ev.ref]) continue;
        seen_curl[ev.ref] = true;
        CompEvent c = ev;
        c.kind = CompEvent::Curl;
        folded.push_back(c);
      } else {
        folded.push_back(ev);
      }
    }
    info.events = std::move(folded);
    tr.comps.push_back(std::move(info));
  }

  // Framings: signed self-crossings.
  for (const auto& ci : tr.crossings)
    if (ci.comp_a == ci.comp_b) tr.comps[ci.comp_a].framing += ci.sign;

  // Passage table, component-major in traversal order.
  for (const auto& c : tr.comps)
    for (const auto& ev : c.events)
      if (ev.kind == CompEvent::Pass)
        tr.passages.push_back({ev.ref, ev.slot, c.id, ev.sign});

  for (int b : pg.bottom_ports) {
    tr.comp_of_bottom.push_back(comp[b]);
    tr.bottom_dir.push_back(pg.bit[b]);
  }
  for (int t : pg.top_ports) {
    tr.comp_of_top.push_back(comp[t]);
    tr.top_dir.push_back(pg.bit[t]);
  }
  return tr;
}

Admissibility check_admissible(const Diagram& d) {
  Admissibility rep;
  auto verrs = validate(d);
  if (!verrs.empty()) {
    rep.ok = false;
    for (const auto& e : verrs) rep.problems.push_back(e.msg);
    return rep;
  }
  if (!d.tangle) return rep;  // closed presentations are vacuously admissible
  std::vector<ValidationError> errs;
  PortGraph pg;
  if (!pg.build(d, errs)) {
    rep.ok = false;
    for (const auto& e : errs) rep.problems.push_back(e.msg);
    return rep;
  }
  if ((int)pg.top_ports.size() != d.top_arity()) {
    rep.ok = false;
    rep.problems.push_back(
        "boundary interface mismatch: word leaves " +
        std::to_string(pg.top_ports.size()) +
        " ends at the top but the out groups declare " +
        std::to_string(d.top_arity()));
    return rep;
  }
  if (!pg.solve_dirs(true, errs)) {
    // Plain validation passed, so any conflict here involves the closure
    // strips: the glued-up surface would be non-orientable.
    rep.ok = false;
    for (const auto& e : errs)
      rep.problems.push_back("inadmissible (non-orientable closure): " +
                             e.msg);
  }
  return rep;
}

}  // namespace bridged
