#include "bridged/abelian.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

namespace bridged {

namespace {

long to_long(const Q& x) {
  if (x.get_den() != 1) throw std::logic_error("expected an integer entry");
  return (long)x.get_num().get_si();
}

struct PointedTables {
  const QForm* qf = nullptr;
  long order = 0;
  std::vector<std::vector<long>> elems;
  std::vector<Q> qtab;
  std::vector<std::vector<Q>> btab;

  explicit PointedTables(const ModularData& m) {
    if (!m.pointed)
      throw std::invalid_argument("pointed modular datum required");
    qf = &*m.pointed;
    order = qf->A.order();
    for (long a = 0; a < order; a++) {
      elems.push_back(qf->A.element(a));
      qtab.push_back(qf->q(elems.back()));
    }
    btab.assign(order, std::vector<Q>(order));
    for (long a = 0; a < order; a++)
      for (long b = a; b < order; b++)
        btab[a][b] = btab[b][a] = qf->b(elems[a], elems[b]);
  }
};

// Phase histogram: exponent in [0,1) -> multiplicity. Exact sums stay cheap
// because the number of distinct exponents is bounded by the conductor.
using Hist = std::map<Q, mpz_class>;

Cyc hist_value(const Hist& h, int conductor) {
  Cyc total = Cyc::zero(conductor);
  for (const auto& [x, n] : h)
    total = total + Cyc(Q(n), conductor) * Cyc::phase(x, conductor);
  return total;
}

struct Cluster {
  std::vector<int> members;  // component ids, ascending
};

// Components interact when a crossing links them or a coupon row constrains
// them together; the bracket factorizes over the resulting clusters.
std::vector<Cluster> find_clusters(size_t n,
                                   const std::vector<std::vector<long>>& B,
                                   const std::vector<std::vector<long>>& d2) {
  std::vector<int> pa(n);
  for (size_t i = 0; i < n; i++) pa[i] = (int)i;
  std::function<int(int)> find = [&](int x) {
    return pa[x] == x ? x : pa[x] = find(pa[x]);
  };
  for (size_t i = 0; i < n; i++)
    for (size_t l = i + 1; l < n; l++)
      if (B[i][l] != 0) pa[find((int)i)] = find((int)l);
  for (const auto& row : d2) {
    int first = -1;
    for (size_t i = 0; i < n; i++) {
      if (row[i] == 0) continue;
      if (first == -1) first = (int)i;
      else pa[find(first)] = find((int)i);
    }
  }
  std::map<int, Cluster> by_root;
  for (size_t i = 0; i < n; i++) by_root[find((int)i)].members.push_back((int)i);
  std::vector<Cluster> out;
  for (auto& [r, c] : by_root) out.push_back(std::move(c));
  return out;
}

// One cluster's colorings are summed by dynamic programming over an
// elimination order rather than by plain enumeration.  Because b is
// bilinear, a colored prefix acts on the remaining components only through
// the accumulated elements sum_i B_ij x_i, and on the coupon constraints
// only through the partial row sums, so the state carries one group element
// per uncolored component adjacent to the prefix plus one per open row.
// The linking graphs met in practice are chain-like, which keeps that
// boundary a handful of slots where enumeration would cost |A|^k.
// `track` designates a member whose color keys the histogram (for the xi
// insertion); -1 keys everything to color 0.
std::map<long, Hist> cluster_hists(const Cluster& cl,
                                   const std::vector<std::vector<long>>& B,
                                   const std::vector<std::vector<long>>& d2,
                                   const PointedTables& pt, int track) {
  const size_t k = cl.members.size();
  std::vector<int> pos_of(B.size(), -1);
  for (size_t p = 0; p < k; p++) pos_of[cl.members[p]] = (int)p;

  // Rows touching this cluster, with their in-cluster support.
  std::vector<std::vector<std::pair<int, long>>> rows;  // (position, coeff)
  for (const auto& r : d2) {
    std::vector<std::pair<int, long>> sup;
    for (size_t p = 0; p < k; p++)
      if (r[cl.members[p]] != 0) sup.push_back({(int)p, r[cl.members[p]]});
    if (!sup.empty()) rows.push_back(std::move(sup));
  }
  const size_t nr = rows.size();

  // Positions interact when a crossing links them or a row joins them.
  std::vector<std::vector<char>> adj(k, std::vector<char>(k, 0));
  for (size_t p = 0; p < k; p++)
    for (size_t q = 0; q < k; q++)
      if (p != q && B[cl.members[p]][cl.members[q]] != 0) adj[p][q] = 1;
  for (const auto& sup : rows)
    for (auto& [p, wp] : sup)
      for (auto& [q, wq] : sup)
        if (p != q) adj[p][q] = 1;

  // Greedy ordering that keeps the prefix boundary small, preferring to
  // finish components the prefix already touches before opening new ones.
  std::vector<int> order, when(k, 0);
  {
    std::vector<char> done(k, 0);
    std::set<int> bnd;
    for (size_t step = 0; step < k; step++) {
      int best = -1;
      size_t bestc = 0;
      bool bestb = false;
      for (size_t v = 0; v < k; v++) {
        if (done[v]) continue;
        std::set<int> nb = bnd;
        nb.erase((int)v);
        for (size_t u = 0; u < k; u++)
          if (!done[u] && u != v && adj[v][u]) nb.insert((int)u);
        bool inb = bnd.count((int)v) > 0;
        if (best < 0 || nb.size() < bestc ||
            (nb.size() == bestc && inb && !bestb)) {
          best = (int)v;
          bestc = nb.size();
          bestb = inb;
        }
      }
      done[best] = 1;
      bnd.erase(best);
      for (size_t u = 0; u < k; u++)
        if (!done[u] && adj[best][u]) bnd.insert((int)u);
      order.push_back(best);
      when[best] = (int)step;
    }
  }

  // A row is live from its first supported step until its last, where the
  // accumulated sum must come back to zero.
  std::vector<int> rfirst(nr, (int)k), rlast(nr, -1);
  std::vector<std::vector<std::pair<int, long>>> row_at(k);  // (row, coeff)
  for (size_t ri = 0; ri < nr; ri++)
    for (auto& [p, w] : rows[ri]) {
      int s = when[p];
      rfirst[ri] = std::min(rfirst[ri], s);
      rlast[ri] = std::max(rlast[ri], s);
      row_at[s].push_back({(int)ri, w});
    }

  // State layout after each step: boundary positions, then open rows, then
  // the tracked color once known.  The layout is a function of the step
  // alone, so colorings meeting the same sums share one table entry.
  const int tpos = track >= 0 ? pos_of[track] : -1;
  const int tstep = tpos >= 0 ? when[tpos] : -1;
  std::vector<std::vector<int>> bslots(k + 1), rslots(k + 1);
  {
    std::vector<char> done(k, 0), inb(k, 0);
    for (size_t t = 0; t < k; t++) {
      int v = order[t];
      done[v] = 1;
      inb[v] = 0;
      for (size_t u = 0; u < k; u++)
        if (!done[u] && adj[v][u]) inb[u] = 1;
      for (size_t u = 0; u < k; u++)
        if (inb[u]) bslots[t + 1].push_back((int)u);
      for (size_t ri = 0; ri < nr; ri++)
        if (rfirst[ri] <= (int)t && (int)t < rlast[ri])
          rslots[t + 1].push_back((int)ri);
    }
  }

  // Index-level group tables so states hold plain element indices.
  const AbGroup& A = pt.qf->A;
  const long n = pt.order;
  const long zi = A.index_of(A.zero());
  std::vector<std::vector<long>> addtab(n, std::vector<long>(n));
  for (long a = 0; a < n; a++)
    for (long b = 0; b < n; b++)
      addtab[a][b] = A.index_of(A.add(pt.elems[a], pt.elems[b]));
  std::map<long, std::vector<long>> scale_memo;
  auto scaled = [&](long w) -> const std::vector<long>& {
    auto it = scale_memo.find(w);
    if (it != scale_memo.end()) return it->second;
    std::vector<long> tab(n);
    for (long a = 0; a < n; a++) tab[a] = A.index_of(A.smul(w, pt.elems[a]));
    return scale_memo.emplace(w, std::move(tab)).first->second;
  };

  using State = std::vector<long>;
  std::map<State, Hist> cur;
  cur[{}][Q(0)] = 1;

  for (size_t t = 0; t < k; t++) {
    const int v = order[t];
    const long cv = cl.members[v];
    const auto& bin = bslots[t];
    const auto& rin = rslots[t];
    const auto& bout = bslots[t + 1];
    const auto& rout = rslots[t + 1];
    const bool tin = tpos >= 0 && tstep < (int)t;
    const bool tout = tpos >= 0 && tstep <= (int)t;

    // Where this component's own pairing sum sits, if the prefix has one.
    int vslot = -1;
    for (size_t s = 0; s < bin.size(); s++)
      if (bin[s] == v) vslot = (int)s;

    auto row_in = [&](int ri) {
      for (size_t s = 0; s < rin.size(); s++)
        if (rin[s] == ri) return (int)(bin.size() + s);
      return -1;
    };
    std::map<int, long> wat;  // row -> coefficient of this component
    for (auto& [ri, w] : row_at[t]) wat[ri] = w;

    // Outgoing boundary slots: source index in the incoming state (or a
    // fresh zero) and the scaling table for this component's contribution.
    std::vector<int> bfrom(bout.size(), -1);
    std::vector<const std::vector<long>*> bsc(bout.size(), nullptr);
    for (size_t s = 0; s < bout.size(); s++) {
      for (size_t s0 = 0; s0 < bin.size(); s0++)
        if (bin[s0] == bout[s]) bfrom[s] = (int)s0;
      long w = B[cv][cl.members[bout[s]]];
      if (w != 0) bsc[s] = &scaled(w);
    }
    std::vector<int> rfrom(rout.size(), -1);
    std::vector<const std::vector<long>*> rsc(rout.size(), nullptr);
    for (size_t s = 0; s < rout.size(); s++) {
      rfrom[s] = row_in(rout[s]);
      auto it = wat.find(rout[s]);
      if (it != wat.end()) rsc[s] = &scaled(it->second);
    }
    std::vector<std::pair<int, const std::vector<long>*>> rclose;
    for (auto& [ri, w] : wat)
      if (rlast[ri] == (int)t) rclose.push_back({row_in(ri), &scaled(w)});

    std::map<State, Hist> next;
    for (const auto& [st, hist] : cur) {
      const long sv = vslot >= 0 ? st[vslot] : zi;
      for (long a = 0; a < n; a++) {
        bool ok = true;
        for (auto& [s0, sc] : rclose) {
          long base = s0 >= 0 ? st[s0] : zi;
          if (addtab[base][(*sc)[a]] != zi) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        Q add = Q(B[cv][cv]) * pt.qtab[a] + pt.btab[a][sv];
        State ns(bout.size() + rout.size() + (tout ? 1 : 0));
        for (size_t s = 0; s < bout.size(); s++) {
          long base = bfrom[s] >= 0 ? st[bfrom[s]] : zi;
          ns[s] = bsc[s] ? addtab[base][(*bsc[s])[a]] : base;
        }
        for (size_t s = 0; s < rout.size(); s++) {
          long base = rfrom[s] >= 0 ? st[rfrom[s]] : zi;
          ns[bout.size() + s] = rsc[s] ? addtab[base][(*rsc[s])[a]] : base;
        }
        if (tout) ns.back() = tin ? st.back() : a;
        Hist& nh = next[ns];
        for (const auto& [ph, cnt] : hist) nh[mod1(ph + add)] += cnt;
      }
    }
    cur = std::move(next);
  }

  std::map<long, Hist> out;
  for (const auto& [st, hist] : cur) {
    long key = tpos >= 0 ? st[0] : 0;
    for (const auto& [ph, cnt] : hist) out[key][ph] += cnt;
  }
  return out;
}

std::vector<std::vector<long>> to_long_mat(const QMat& m) {
  std::vector<std::vector<long>> out;
  for (const auto& r : m) {
    std::vector<long> row;
    for (const auto& x : r) row.push_back(to_long(x));
    out.push_back(std::move(row));
  }
  return out;
}

int thread_budget() {
  const char* e = std::getenv("BRIDGED_THREADS");
  if (!e) return 1;
  int n = std::atoi(e);
  return n > 1 ? n : 1;
}

Cyc bracket_impl(const QMat& Bq, const QMat& d2q, const ModularData& m,
                 int track) {
  PointedTables pt(m);
  auto B = to_long_mat(Bq);
  auto d2 = to_long_mat(d2q);
  size_t n = B.size();
  auto clusters = find_clusters(n, B, d2);

  std::vector<Cyc> values(clusters.size(), Cyc::one(m.conductor));
  auto eval_cluster = [&](size_t ci) {
    const Cluster& cl = clusters[ci];
    bool tracks = track >= 0 &&
                  std::find(cl.members.begin(), cl.members.end(), track) !=
                      cl.members.end();
    auto hists = cluster_hists(cl, B, d2, pt, tracks ? track : -1);
    if (!tracks) {
      values[ci] = hist_value(hists[0], m.conductor);
      return;
    }
    // Weight the tracked component by xi instead of its dim-contribution:
    // only self-dual colors survive.
    CVec xi = xi_vector(m);
    Cyc total = Cyc::zero(m.conductor);
    for (const auto& [color, h] : hists) {
      if (xi[color].is_zero()) continue;
      total = total + xi[color] * hist_value(h, m.conductor);
    }
    values[ci] = total;
  };

  int threads = thread_budget();
  if (threads > 1 && clusters.size() > 1) {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < threads; t++)
      pool.emplace_back([&] {
        for (size_t ci; (ci = next.fetch_add(1)) < clusters.size();)
          eval_cluster(ci);
      });
    for (auto& th : pool) th.join();
  } else {
    for (size_t ci = 0; ci < clusters.size(); ci++) eval_cluster(ci);
  }

  Cyc total = Cyc::one(m.conductor);
  for (const auto& v : values) total = total * v;
  return total;
}

}  // namespace

Cyc bracket(const SurgeryData& sd, const ModularData& m) {
  return bracket_impl(sd.B, sd.cx.d2, m, -1);
}

Cyc bracket(const Diagram& d, const ModularData& m) {
  return bracket(surgery_data(d), m);
}

Cyc bracket_from_matrices(const QMat& B, const QMat& d2,
                          const ModularData& m) {
  PointedTables pt(m);
  auto Bl = to_long_mat(B);
  auto d2l = to_long_mat(d2);
  size_t n = Bl.size();
  Hist hist;
  std::vector<long> color(n, 0);
  for (;;) {
    bool ok = true;
    for (const auto& row : d2l) {
      auto sum = pt.qf->A.zero();
      for (size_t i = 0; i < n; i++)
        if (row[i] != 0)
          sum = pt.qf->A.add(sum, pt.qf->A.smul(row[i], pt.elems[color[i]]));
      if (!pt.qf->A.is_zero(sum)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      Q phase = 0;
      for (size_t i = 0; i < n; i++) {
        phase += Q(Bl[i][i]) * pt.qtab[color[i]];
        for (size_t l = i + 1; l < n; l++)
          if (Bl[i][l] != 0) phase += Q(Bl[i][l]) * pt.btab[color[i]][color[l]];
      }
      hist[mod1(phase)] += 1;
    }
    size_t j = 0;
    while (j < n && ++color[j] == pt.order) color[j++] = 0;
    if (j == n) break;
  }
  return hist_value(hist, m.conductor);
}

TauResult tau(const Diagram& d, const ModularData& m) {
  SurgeryData sd = surgery_data(d);
  TauResult r;
  r.chi = sd.chi;
  r.sigma = sd.sigma;
  r.bracket = bracket(sd, m);
  r.tau = m.D.pow(-r.chi - r.sigma) * m.delta_minus.pow(r.sigma) * r.bracket;
  return r;
}

TrsfReport verify_trsf(const Diagram& d, const ModularData& m) {
  TrsfReport rep;
  SurgeryData base = surgery_data(d);
  Cyc bl = bracket(base, m);
  auto check = [&](const std::string& name, const std::string& tiles,
                   const Cyc& expect_bracket, long dchi, int dsig) {
    Diagram u = d;
    Diagram extra = parse_diagram("panel { " + tiles + " }");
    // Disjoint union on the first panel; remap pair ids to fresh names.
    std::vector<int> remap(extra.pair_count(), -1);
    for (Tile t : extra.panels[0].word) {
      if (t.kind == TileKind::CouponIn || t.kind == TileKind::CouponOut) {
        if (remap[t.pair] == -1)
          remap[t.pair] = u.ensure_pair(u.fresh_pair_name("_trsf"));
        t.pair = remap[t.pair];
      }
      u.panels[0].word.push_back(t);
    }
    SurgeryData su = surgery_data(u);
    if (!(bracket(su, m) == expect_bracket))
      rep.failures.push_back(name + ": bracket identity failed");
    if (su.chi != base.chi + dchi)
      rep.failures.push_back(name + ": chi shift " +
                             std::to_string(su.chi - base.chi) + " != " +
                             std::to_string(dchi));
    if (su.sigma != base.sigma + dsig)
      rep.failures.push_back(name + ": sigma shift " +
                             std::to_string(su.sigma - base.sigma) + " != " +
                             std::to_string(dsig));
  };
  // The fresh-pair renaming above needs the coupon tiles to share one pair.
  check("cancelling ribbon", "coupon- zz 0 1; coupon+ zz 0 1", bl, 0, 0);
  check("ring pair", "cup 0 lr; cup 2 lr; xn 1; xn 1; cap 0; cap 0",
        m.D2 * bl, 2, 0);
  check("-1-framed unknot", "cup 0 lr; xp 0; cap 0", m.delta_minus * bl, 1,
        -1);
  rep.ok = rep.failures.empty();
  return rep;
}

Cyc eval_with_insertion(const Diagram& d, const ModularData& m, int comp) {
  SurgeryData sd = surgery_data(d);
  if (comp < 0 || comp >= (int)sd.tr.comps.size())
    throw std::invalid_argument("insertion component out of range");
  return bracket_impl(sd.B, sd.cx.d2, m, comp);
}

}  // namespace bridged
