#include "bridged/hopf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "bridged/homology.hpp"

namespace bridged {

namespace {

// ---------------------------------------------------------------------------
// group tables
// ---------------------------------------------------------------------------

void check_group(const GroupTable& g) {
  if (g.n < 1 || (int)g.mul.size() != g.n || (int)g.inv.size() != g.n)
    throw std::invalid_argument("malformed group table");
}

// ---------------------------------------------------------------------------
// sparse views of the structure tensors
// ---------------------------------------------------------------------------

struct Alg {
  const HopfData* h = nullptr;
  int n = 0;
  // tri[i][j] = nonzero outputs of e_i e_j as (k, coeff)
  std::vector<std::vector<std::vector<std::pair<int, Q>>>> tri;
  // cotri[i] = nonzero terms of Delta(e_i) as (j, k, coeff)
  std::vector<std::vector<std::array<long, 2>>> cotri_idx;
  std::vector<std::vector<Q>> cotri_val;

  explicit Alg(const HopfData& hd) : h(&hd), n(hd.dim) {
    tri.assign(n, {});
    for (int i = 0; i < n; i++) {
      tri[i].assign(n, {});
      for (int j = 0; j < n; j++)
        for (int k = 0; k < n; k++)
          if (hd.mult[i][j][k] != 0) tri[i][j].push_back({k, hd.mult[i][j][k]});
    }
    cotri_idx.assign(n, {});
    cotri_val.assign(n, {});
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++)
        for (int k = 0; k < n; k++)
          if (hd.comult[i][j][k] != 0) {
            cotri_idx[i].push_back({j, k});
            cotri_val[i].push_back(hd.comult[i][j][k]);
          }
  }

  QVec mul(const QVec& x, const QVec& y) const {
    QVec out(n, Q(0));
    for (int i = 0; i < n; i++) {
      if (x[i] == 0) continue;
      for (int j = 0; j < n; j++) {
        if (y[j] == 0) continue;
        Q c = x[i] * y[j];
        for (const auto& [k, w] : tri[i][j]) out[k] += c * w;
      }
    }
    return out;
  }

  QVec smap(const QVec& x) const {
    QVec out(n, Q(0));
    for (int i = 0; i < n; i++) {
      if (x[i] == 0) continue;
      for (int j = 0; j < n; j++)
        if (h->antipode[i][j] != 0) out[j] += x[i] * h->antipode[i][j];
    }
    return out;
  }

  Q eps(const QVec& x) const {
    Q out(0);
    for (int i = 0; i < n; i++) out += x[i] * h->counit[i];
    return out;
  }

  QVec basis(int i) const {
    QVec out(n, Q(0));
    out[i] = 1;
    return out;
  }
};

bool vec_eq(const QVec& a, const QVec& b) { return a == b; }

// dense H (x) H elements, index i*n + j
using T2 = std::vector<Q>;

T2 t2_of(const QMat& m, int n) {
  T2 out((size_t)n * n, Q(0));
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) out[(size_t)i * n + j] = m[i][j];
  return out;
}

T2 t2_flip(const T2& x, int n) {
  T2 out((size_t)n * n, Q(0));
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) out[(size_t)j * n + i] = x[(size_t)i * n + j];
  return out;
}

T2 t2_mul(const Alg& A, const T2& x, const T2& y) {
  int n = A.n;
  T2 out((size_t)n * n, Q(0));
  for (int a = 0; a < n; a++)
    for (int b = 0; b < n; b++) {
      const Q& xc = x[(size_t)a * n + b];
      if (xc == 0) continue;
      for (int c = 0; c < n; c++)
        for (int dd = 0; dd < n; dd++) {
          const Q& yc = y[(size_t)c * n + dd];
          if (yc == 0) continue;
          Q w = xc * yc;
          for (const auto& [k1, c1] : A.tri[a][c])
            for (const auto& [k2, c2] : A.tri[b][dd])
              out[(size_t)k1 * n + k2] += w * c1 * c2;
        }
    }
  return out;
}

T2 t2_outer(const QVec& x, const QVec& y) {
  int n = (int)x.size();
  T2 out((size_t)n * n, Q(0));
  for (int i = 0; i < n; i++) {
    if (x[i] == 0) continue;
    for (int j = 0; j < n; j++) out[(size_t)i * n + j] = x[i] * y[j];
  }
  return out;
}

T2 t2_comult(const Alg& A, const QVec& x) {
  int n = A.n;
  T2 out((size_t)n * n, Q(0));
  for (int i = 0; i < n; i++) {
    if (x[i] == 0) continue;
    for (size_t t = 0; t < A.cotri_idx[i].size(); t++)
      out[(size_t)A.cotri_idx[i][t][0] * n + A.cotri_idx[i][t][1]] +=
          x[i] * A.cotri_val[i][t];
  }
  return out;
}

// ---------------------------------------------------------------------------
// rank factorization R = sum_t f1[t] (x) f2[t] (Gaussian column-pivot CR)
// ---------------------------------------------------------------------------

struct Fact {
  int rank = 0;
  std::vector<QVec> f1, f2;
};

Fact cr_factor(const QMat& m) {
  int n = (int)m.size();
  QMat red = m;  // row-reduce a copy; pivot columns index the factor columns
  Fact f;
  std::vector<int> pivot_cols;
  int row = 0;
  for (int col = 0; col < n && row < n; col++) {
    int pr = -1;
    for (int r = row; r < n; r++)
      if (red[r][col] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(red[row], red[pr]);
    Q inv = Q(1) / red[row][col];
    for (int c = 0; c < n; c++) red[row][c] *= inv;
    for (int r = 0; r < n; r++) {
      if (r == row || red[r][col] == 0) continue;
      Q fac = red[r][col];
      for (int c = 0; c < n; c++) red[r][c] -= fac * red[row][c];
    }
    pivot_cols.push_back(col);
    row++;
  }
  f.rank = row;
  for (int t = 0; t < f.rank; t++) {
    QVec col(n, Q(0));
    for (int i = 0; i < n; i++) col[i] = m[i][pivot_cols[t]];
    f.f1.push_back(std::move(col));
    f.f2.push_back(red[t]);
  }
  return f;
}

// ---------------------------------------------------------------------------
// cached evaluator context per algebra
// ---------------------------------------------------------------------------

struct Ctx {
  HopfData h;  // owned copy; the cache survives caller fixtures
  std::unique_ptr<Alg> alg;
  IntegralPair ip;
  QMat rm_v, rm_vinv;  // multiplication by the central ribbon element
  // per crossing sign (0: positive/R, 1: negative/R^{-1}), factor slot
  // (0: first tensor factor, 1: second), antipode flag: one right-mult
  // matrix per rank index, plus the left-mult family for backward walks
  std::vector<QMat> xmats[2][2][2], xmats_l[2][2][2];
  int xrank[2] = {0, 0};
  std::vector<QMat> cp_m, cp_ms;    // right mult by e_j and S(e_j)
  std::vector<QMat> cp_lm, cp_lms;  // left mult by e_j and S(e_j)
  std::map<int, std::vector<Q>> coupon_tensors;
  bool have_anchors = false;
  Q d2, dminus, dplus, droot;
  bool have_droot = false;
  std::mutex lock;
};

QMat right_mult_matrix(const Alg& A, const QVec& z) {
  int n = A.n;
  QMat m = qmat(n, n);
  for (int j = 0; j < n; j++) {
    if (z[j] == 0) continue;
    for (int i = 0; i < n; i++)
      for (const auto& [k, w] : A.tri[i][j]) m[i][k] += z[j] * w;
  }
  return m;
}

QMat left_mult_matrix(const Alg& A, const QVec& z) {
  int n = A.n;
  QMat m = qmat(n, n);
  for (int j = 0; j < n; j++) {
    if (z[j] == 0) continue;
    for (int i = 0; i < n; i++)
      for (const auto& [k, w] : A.tri[j][i]) m[i][k] += z[j] * w;
  }
  return m;
}

std::shared_ptr<Ctx> build_ctx(const HopfData& h) {
  auto c = std::make_shared<Ctx>();
  c->h = h;
  c->alg = std::make_unique<Alg>(c->h);
  const Alg& A = *c->alg;
  c->ip = solve_integrals(c->h);
  if (!c->ip.trace_symmetric)
    throw std::runtime_error(
        "basepoint independence requires a symmetric integral");
  c->rm_v = right_mult_matrix(A, c->h.ribbon);
  c->rm_vinv = right_mult_matrix(A, c->h.ribbon_inv);
  Fact fs[2] = {cr_factor(c->h.rmat), cr_factor(c->h.rinv)};
  for (int s = 0; s < 2; s++) {
    c->xrank[s] = fs[s].rank;
    for (int t = 0; t < fs[s].rank; t++) {
      const QVec& a = fs[s].f1[t];
      const QVec& b = fs[s].f2[t];
      const QVec sa = A.smap(a);
      const QVec sb = A.smap(b);
      c->xmats[s][0][0].push_back(right_mult_matrix(A, a));
      c->xmats[s][0][1].push_back(right_mult_matrix(A, sa));
      c->xmats[s][1][0].push_back(right_mult_matrix(A, b));
      c->xmats[s][1][1].push_back(right_mult_matrix(A, sb));
      c->xmats_l[s][0][0].push_back(left_mult_matrix(A, a));
      c->xmats_l[s][0][1].push_back(left_mult_matrix(A, sa));
      c->xmats_l[s][1][0].push_back(left_mult_matrix(A, b));
      c->xmats_l[s][1][1].push_back(left_mult_matrix(A, sb));
    }
  }
  int n = c->h.dim;
  for (int j = 0; j < n; j++) {
    c->cp_m.push_back(right_mult_matrix(A, A.basis(j)));
    c->cp_ms.push_back(right_mult_matrix(A, A.smap(A.basis(j))));
    c->cp_lm.push_back(left_mult_matrix(A, A.basis(j)));
    c->cp_lms.push_back(left_mult_matrix(A, A.smap(A.basis(j))));
  }
  return c;
}

std::shared_ptr<Ctx> get_ctx(const HopfData& h) {
  static std::mutex cache_lock;
  static std::map<std::pair<std::string, int>, std::shared_ptr<Ctx>> cache;
  std::lock_guard<std::mutex> g(cache_lock);
  auto key = std::make_pair(h.name, h.dim);
  auto it = cache.find(key);
  if (it != cache.end()) {
    const HopfData& c = it->second->h;
    if (c.rmat == h.rmat && c.ribbon == h.ribbon && c.antipode == h.antipode &&
        c.mult == h.mult)
      return it->second;
  }
  auto c = build_ctx(h);
  cache[key] = c;
  return c;
}

// ---------------------------------------------------------------------------
// contraction state: a flat tensor over named axes.  Crossing axes carry the
// rank index of the factored R-matrix, coupon axes carry cointegral legs,
// and each component being walked owns a running-product axis of dimension
// dim(H).
// ---------------------------------------------------------------------------

constexpr size_t kBudget = (size_t)1 << 22;  // entries

struct AxKey {
  int type = 0;  // 0 crossing, 1 coupon slot, 2 component product
  int node = -1, slot = -1;
  bool operator==(const AxKey&) const = default;
};

struct Ten {
  std::vector<Q> a{Q(1)};
  std::vector<int> dims;
  std::vector<AxKey> keys;

  size_t volume() const {
    size_t v = 1;
    for (int d : dims) v *= (size_t)d;
    return v;
  }
  int axis(AxKey key) const {
    for (size_t i = 0; i < keys.size(); i++)
      if (keys[i] == key) return (int)i;
    throw std::logic_error("contraction axis not found");
  }
  size_t stride(int ax) const {
    size_t s = 1;
    for (size_t i = ax + 1; i < dims.size(); i++) s *= (size_t)dims[i];
    return s;
  }
  static void budget(size_t entries) {
    if (entries > kBudget)
      throw std::runtime_error("hennings contraction exceeded the size budget");
  }

  // append an axis holding the coefficients of `vec`
  void open_vec(AxKey key, const QVec& vec) {
    size_t v = volume();
    budget(v * vec.size());
    std::vector<Q> na(v * vec.size(), Q(0));
    for (size_t r = 0; r < v; r++) {
      if (a[r] == 0) continue;
      for (size_t h = 0; h < vec.size(); h++)
        if (vec[h] != 0) na[r * vec.size() + h] = a[r] * vec[h];
    }
    a = std::move(na);
    dims.push_back((int)vec.size());
    keys.push_back(key);
  }

  // contract an axis against a covector
  void close_vec(AxKey key, const QVec& vec) {
    int ax = axis(key);
    int kdim = dims[ax];
    size_t post = stride(ax), pre = volume() / (post * (size_t)kdim);
    std::vector<Q> na(pre * post, Q(0));
    for (size_t p = 0; p < pre; p++)
      for (int s = 0; s < kdim; s++) {
        if (vec[s] == 0) continue;
        for (size_t q = 0; q < post; q++) {
          const Q& x = a[(p * (size_t)kdim + (size_t)s) * post + q];
          if (x != 0) na[p * post + q] += vec[s] * x;
        }
      }
    a = std::move(na);
    dims.erase(dims.begin() + ax);
    keys.erase(keys.begin() + ax);
  }

  // right-multiply the running product on axis T: x <- x * m
  void apply(AxKey tkey, const QMat& m) {
    int ax = axis(tkey);
    int n = dims[ax];
    size_t post = stride(ax), pre = volume() / (post * (size_t)n);
    std::vector<Q> na(volume(), Q(0));
    for (int h = 0; h < n; h++)
      for (int h2 = 0; h2 < n; h2++) {
        const Q& w = m[h][h2];
        if (w == 0) continue;
        for (size_t p = 0; p < pre; p++)
          for (size_t q = 0; q < post; q++) {
            const Q& x = a[(p * (size_t)n + (size_t)h) * post + q];
            if (x != 0) na[(p * (size_t)n + (size_t)h2) * post + q] += w * x;
          }
      }
    a = std::move(na);
  }

  // right-multiply axis T by ms[s], opening a new axis recording s
  void apply_open(AxKey tkey, AxKey skey, const std::vector<QMat>& ms) {
    int ax = axis(tkey);
    int n = dims[ax];
    size_t post = stride(ax), pre = volume() / (post * (size_t)n);
    int kdim = (int)ms.size();
    budget(volume() * (size_t)kdim);
    std::vector<Q> na(volume() * (size_t)kdim, Q(0));
    for (int s = 0; s < kdim; s++)
      for (int h = 0; h < n; h++)
        for (int h2 = 0; h2 < n; h2++) {
          const Q& w = ms[s][h][h2];
          if (w == 0) continue;
          for (size_t p = 0; p < pre; p++)
            for (size_t q = 0; q < post; q++) {
              const Q& x = a[(p * (size_t)n + (size_t)h) * post + q];
              if (x != 0)
                na[((p * (size_t)n + (size_t)h2) * post + q) * kdim +
                   (size_t)s] += w * x;
            }
        }
    a = std::move(na);
    dims.push_back(kdim);
    keys.push_back(skey);
  }

  // right-multiply axis T by ms[s] where s is the existing axis S, then
  // sum S out
  void apply_close(AxKey tkey, AxKey skey, const std::vector<QMat>& ms) {
    int sax = axis(skey);
    int kdim = dims[sax];
    size_t spost = stride(sax);
    size_t spre = volume() / (spost * (size_t)kdim);
    // move S to the back first so the close is a contiguous sum
    if (sax != (int)dims.size() - 1) {
      std::vector<Q> nb(volume());
      for (size_t p = 0; p < spre; p++)
        for (int s = 0; s < kdim; s++)
          for (size_t q = 0; q < spost; q++)
            nb[(p * spost + q) * (size_t)kdim + (size_t)s] =
                a[(p * (size_t)kdim + (size_t)s) * spost + q];
      a = std::move(nb);
      AxKey sk = keys[sax];
      dims.erase(dims.begin() + sax);
      keys.erase(keys.begin() + sax);
      dims.push_back(kdim);
      keys.push_back(sk);
    }
    int tax = axis(tkey);
    int n = dims[tax];
    size_t tpost = stride(tax) / (size_t)kdim;  // S sits innermost
    size_t tpre = volume() / (tpost * (size_t)kdim * (size_t)n);
    std::vector<Q> na(volume() / (size_t)kdim, Q(0));
    for (int s = 0; s < kdim; s++)
      for (int h = 0; h < n; h++)
        for (int h2 = 0; h2 < n; h2++) {
          const Q& w = ms[s][h][h2];
          if (w == 0) continue;
          for (size_t p = 0; p < tpre; p++)
            for (size_t q = 0; q < tpost; q++) {
              const Q& x = a[((p * (size_t)n + (size_t)h) * tpost + q) *
                                 (size_t)kdim +
                             (size_t)s];
              if (x != 0)
                na[(p * (size_t)n + (size_t)h2) * tpost + q] += w * x;
            }
        }
    a = std::move(na);
    dims.pop_back();
    keys.pop_back();
  }

  // first passage through a coupon: right-multiply axis T by the slot leg of
  // the comultiplied cointegral and open one axis per remaining leg
  void open_coupon(AxKey tkey, const std::vector<Q>& tensor, int arity,
                   int slot, const std::vector<QMat>& ms, int pair) {
    int tax = axis(tkey);
    int n = dims[tax];
    size_t post = stride(tax), pre = volume() / (post * (size_t)n);
    size_t other = 1;
    for (int i = 0; i + 1 < arity; i++) other *= (size_t)n;
    budget(volume() * other);
    std::vector<Q> na(volume() * other, Q(0));
    std::vector<int> ji(arity, 0);
    for (size_t flat = 0; flat < tensor.size(); flat++) {
      const Q& c = tensor[flat];
      if (c == 0) continue;
      size_t rem = flat;  // row-major leg indices
      for (int i = arity - 1; i >= 0; i--) {
        ji[i] = (int)(rem % (size_t)n);
        rem /= (size_t)n;
      }
      size_t o = 0;
      for (int i = 0; i < arity; i++)
        if (i != slot) o = o * (size_t)n + (size_t)ji[i];
      const QMat& m = ms[ji[slot]];
      for (int h = 0; h < n; h++)
        for (int h2 = 0; h2 < n; h2++) {
          const Q& wm = m[h][h2];
          if (wm == 0) continue;
          for (size_t p = 0; p < pre; p++)
            for (size_t q = 0; q < post; q++) {
              const Q& x = a[(p * (size_t)n + (size_t)h) * post + q];
              if (x != 0)
                na[((p * (size_t)n + (size_t)h2) * post + q) * other + o] +=
                    c * wm * x;
            }
        }
    }
    a = std::move(na);
    for (int i = 0; i < arity; i++)
      if (i != slot) {
        dims.push_back(n);
        keys.push_back({1, pair, i});
      }
  }
};

// ---------------------------------------------------------------------------
// contraction schedule: components are walked one event at a time and may be
// paused, resumed, or traversed backwards (accumulating their word by left
// multiplication, which the trace form makes equivalent).  Anything that
// closes an open axis or costs nothing runs immediately; when only opening
// moves remain, every candidate is simulated together with the closures it
// unlocks and the one leaving the smallest running tensor wins.
// ---------------------------------------------------------------------------

struct SchedStep {
  enum K { Start, Event, Finish } k = Start;
  int comp = -1;
  int ev = -1;
  bool back = false;  // walk direction, fixed when the component starts
};

struct Scheduler {
  const Traced& tr;
  double lh = 0, lx = 0;  // log dims of product and crossing axes

  explicit Scheduler(const Traced& t) : tr(t) {}

  struct State {
    std::vector<int> pos;   // events already walked per component
    std::vector<char> run;  // 0 idle, 1 forward, 2 backward, 3 finished
    std::vector<char> xopen;
    std::vector<int> passes;
    int wh = 0, wx = 0;  // open product/leg axes and crossing axes
    double peak = 0;
  };

  double width(const State& s) const { return s.wh * lh + s.wx * lx; }

  int next_index(const State& s, int c) const {
    int n = (int)tr.comps[c].events.size();
    return s.run[c] == 2 ? n - 1 - s.pos[c] : s.pos[c];
  }

  // change in (product axes, crossing axes) from the next event of c
  std::pair<int, int> delta(const State& s, const CompEvent& ev) const {
    switch (ev.kind) {
      case CompEvent::Curl:
        return {0, 0};
      case CompEvent::Over:
      case CompEvent::Under:
        if (s.xopen[ev.ref]) return {0, -1};
        return {0, 1};
      default:  // Pass
        if (s.passes[ev.ref] > 0) return {-1, 0};
        return {tr.coupons[ev.ref].arity - 1, 0};
    }
  }

  void bump(State& s) const {
    double w = width(s);
    if (w > s.peak) s.peak = w;
  }

  void step_event(State& s, int c, std::vector<SchedStep>* out) const {
    int i = next_index(s, c);
    const CompEvent& ev = tr.comps[c].events[i];
    auto [dh, dx] = delta(s, ev);
    s.wh += dh;
    s.wx += dx;
    if (ev.kind == CompEvent::Over || ev.kind == CompEvent::Under)
      s.xopen[ev.ref] ^= 1;
    else if (ev.kind == CompEvent::Pass)
      s.passes[ev.ref]++;
    s.pos[c]++;
    bump(s);
    if (out) out->push_back({SchedStep::Event, c, i, s.run[c] == 2});
  }

  void start(State& s, int c, bool back, std::vector<SchedStep>* out) const {
    s.run[c] = back ? 2 : 1;
    s.wh++;
    bump(s);
    if (out) out->push_back({SchedStep::Start, c, -1, back});
  }

  void finish(State& s, int c, std::vector<SchedStep>* out) const {
    s.run[c] = 3;
    s.wh--;
    if (out) out->push_back({SchedStep::Finish, c, -1, false});
  }

  // run everything that cannot grow the tensor: pending finishes, closing
  // events, and free events
  void drain(State& s, std::vector<SchedStep>* out) const {
    bool again = true;
    while (again) {
      again = false;
      for (const ComponentInfo& comp : tr.comps) {
        int c = comp.id;
        if (s.run[c] == 0 || s.run[c] == 3) continue;
        if (s.pos[c] == (int)comp.events.size()) {
          finish(s, c, out);
          again = true;
          continue;
        }
        auto [dh, dx] = delta(s, tr.comps[c].events[next_index(s, c)]);
        if (dh + dx <= 0) {
          step_event(s, c, out);
          again = true;
        }
      }
    }
  }

  State init_state() const {
    State s;
    s.pos.assign(tr.comps.size(), 0);
    s.run.assign(tr.comps.size(), 0);
    s.xopen.assign(tr.crossings.size(), 0);
    s.passes.assign(tr.coupons.size(), 0);
    return s;
  }

  bool all_done(const State& s) const {
    for (char r : s.run)
      if (r != 3) return false;
    return true;
  }

  // myopic pass: repeatedly take the opening action that leaves the
  // smallest running tensor after the closures it unlocks
  std::vector<SchedStep> greedy(State& s) const {
    std::vector<SchedStep> out;
    drain(s, &out);
    while (!all_done(s)) {
      struct Cand {
        bool is_start;
        int comp;
        bool back;
      };
      std::vector<Cand> cands;
      for (const ComponentInfo& comp : tr.comps) {
        int c = comp.id;
        if (s.run[c] == 3) continue;
        if (s.run[c] == 0) {
          cands.push_back({true, c, false});
          if (comp.events.size() > 1) cands.push_back({true, c, true});
        } else {
          cands.push_back({false, c, false});
        }
      }
      int best = -1;
      double bw = 0, bp = 0;
      for (int i = 0; i < (int)cands.size(); i++) {
        State t = s;
        t.peak = width(t);
        if (cands[i].is_start)
          start(t, cands[i].comp, cands[i].back, nullptr);
        else
          step_event(t, cands[i].comp, nullptr);
        drain(t, nullptr);
        double w = width(t);
        if (best < 0 || w < bw - 1e-9 ||
            (w < bw + 1e-9 && t.peak < bp - 1e-9)) {
          best = i;
          bw = w;
          bp = t.peak;
        }
      }
      if (cands[best].is_start)
        start(s, cands[best].comp, cands[best].back, &out);
      else
        step_event(s, cands[best].comp, &out);
      drain(s, &out);
    }
    return out;
  }

  // beam pass: every schedule opens the same multiset of axes, so walking
  // one opening action per level keeps all candidates aligned; candidates
  // are ranked by (peak, width) and merged when they reach the same state
  std::pair<std::vector<SchedStep>, double> beam(int kbeam) const {
    struct Node {
      State s;
      std::vector<SchedStep> steps;
    };
    std::vector<Node> cur(1);
    cur[0].s = init_state();
    drain(cur[0].s, &cur[0].steps);
    std::vector<SchedStep> best;
    double best_peak = 0;
    bool have = false;
    while (!cur.empty()) {
      std::vector<Node> next;
      for (Node& b : cur) {
        if (all_done(b.s)) {
          if (!have || b.s.peak < best_peak - 1e-9) {
            best = std::move(b.steps);
            best_peak = b.s.peak;
            have = true;
          }
          continue;
        }
        if (have && b.s.peak > best_peak - 1e-9) continue;
        for (const ComponentInfo& comp : tr.comps) {
          int c = comp.id;
          if (b.s.run[c] == 3) continue;
          int nvars = b.s.run[c] == 0 ? (comp.events.size() > 1 ? 2 : 1) : 1;
          for (int v = 0; v < nvars; v++) {
            Node nb = b;
            if (nb.s.run[c] == 0)
              start(nb.s, c, v == 1, &nb.steps);
            else
              step_event(nb.s, c, &nb.steps);
            drain(nb.s, &nb.steps);
            next.push_back(std::move(nb));
          }
        }
      }
      std::map<std::pair<std::vector<char>, std::vector<int>>, int> seen;
      std::vector<Node> ded;
      for (Node& b : next) {
        auto key = std::make_pair(b.s.run, b.s.pos);
        auto it = seen.find(key);
        if (it == seen.end()) {
          seen.emplace(std::move(key), (int)ded.size());
          ded.push_back(std::move(b));
        } else {
          Node& o = ded[it->second];
          if (b.s.peak < o.s.peak - 1e-9 ||
              (b.s.peak < o.s.peak + 1e-9 && width(b.s) < width(o.s)))
            o = std::move(b);
        }
      }
      std::sort(ded.begin(), ded.end(), [&](const Node& a, const Node& b) {
        if (a.s.peak != b.s.peak) return a.s.peak < b.s.peak;
        return width(a.s) < width(b.s);
      });
      if ((int)ded.size() > kbeam) ded.resize(kbeam);
      cur = std::move(ded);
    }
    return {std::move(best), best_peak};
  }

  std::vector<SchedStep> plan(int hdim, int xrank) {
    lh = std::log((double)std::max(hdim, 2));
    lx = std::log((double)std::max(xrank, 2));
    double blog = std::log((double)kBudget);
    State s = init_state();
    std::vector<SchedStep> out = greedy(s);
    if (s.peak <= blog + 1e-9) return out;
    double out_peak = s.peak;
    for (int kb : {48, 320}) {
      auto [steps, peak] = beam(kb);
      if (!steps.empty() && peak < out_peak - 1e-9) {
        out = std::move(steps);
        out_peak = peak;
      }
      if (out_peak <= blog + 1e-9) return out;
    }
    return out;  // over budget either way; the executor reports it
  }
};


const std::vector<Q>& coupon_tensor(Ctx& c, int arity) {
  auto it = c.coupon_tensors.find(arity);
  if (it != c.coupon_tensors.end()) return it->second;
  const Alg& A = *c.alg;
  int n = c.h.dim;
  std::vector<Q> t = c.ip.lambda;  // arity 1
  for (int legs = 1; legs < arity; legs++) {
    size_t nv = t.size() * (size_t)n;
    if (nv > kBudget)
      throw std::runtime_error("hennings contraction exceeded the size budget");
    std::vector<Q> nt(nv, Q(0));
    // apply Delta to the last leg: t[..., i] -> sum comult[i][a][b] t[..., a, b]
    size_t prefix = t.size() / (size_t)n;
    for (size_t p = 0; p < prefix; p++)
      for (int i = 0; i < n; i++) {
        const Q& x = t[p * (size_t)n + i];
        if (x == 0) continue;
        for (size_t u = 0; u < A.cotri_idx[i].size(); u++)
          nt[(p * (size_t)n + (size_t)A.cotri_idx[i][u][0]) * (size_t)n +
             (size_t)A.cotri_idx[i][u][1]] += x * A.cotri_val[i][u];
      }
    t = std::move(nt);
  }
  return c.coupon_tensors[arity] = std::move(t);
}

HenningsResult bracket_with_ctx(Ctx& c, const Diagram& d) {
  Traced tr = trace_components(d);
  if (d.tangle || !tr.comp_of_bottom.empty() || !tr.comp_of_top.empty())
    throw std::invalid_argument("hennings bracket requires a closed diagram");

  Scheduler sched(tr);
  std::vector<SchedStep> steps =
      sched.plan(c.h.dim, std::max({c.xrank[0], c.xrank[1], 1}));

  Ten st;
  std::vector<char> xopen(tr.crossings.size(), 0);
  std::vector<int> ppass(tr.coupons.size(), 0);
  std::vector<char> backward(tr.comps.size(), 0);

  for (const SchedStep& sp : steps) {
    AxKey tkey{2, sp.comp, 0};
    if (sp.k == SchedStep::Start) {
      backward[sp.comp] = sp.back ? 1 : 0;
      st.open_vec(tkey, c.h.unit);
      continue;
    }
    if (sp.k == SchedStep::Finish) {
      st.close_vec(tkey, c.ip.mu);
      continue;
    }
    // a backward walk prepends beads, so it uses the left-mult families
    bool back = backward[sp.comp];
    const CompEvent& ev = tr.comps[sp.comp].events[sp.ev];
    switch (ev.kind) {
      case CompEvent::Curl:
        // framing +1 consumes v^{-1}, framing -1 consumes v; the ribbon
        // element is central, so the side does not matter
        st.apply(tkey, ev.sign > 0 ? c.rm_vinv : c.rm_v);
        break;
      case CompEvent::Over:
      case CompEvent::Under: {
        const CrossingInfo& ci = tr.crossings[ev.ref];
        int rsel = ci.tile_sign > 0 ? 0 : 1;
        bool over = ev.kind == CompEvent::Over;
        // the over strand always carries the first tensor factor (of R at a
        // positive tile, of R^{-1} at a negative one); downward strands pick
        // up the antipode below, which is what turns R into R^{-1} when a
        // crossing is traversed against the page
        int fac = over ? 0 : 1;
        int sflag = ev.dir < 0 ? 1 : 0;
        const std::vector<QMat>& ms =
            back ? c.xmats_l[rsel][fac][sflag] : c.xmats[rsel][fac][sflag];
        AxKey key{0, ev.ref, 0};
        if (!xopen[ev.ref]) {
          xopen[ev.ref] = 1;
          st.apply_open(tkey, key, ms);
        } else {
          st.apply_close(tkey, key, ms);
        }
        break;
      }
      case CompEvent::Pass: {
        const std::vector<QMat>& ms = back ? (ev.dir < 0 ? c.cp_lms : c.cp_lm)
                                           : (ev.dir < 0 ? c.cp_ms : c.cp_m);
        if (ppass[ev.ref] == 0) {
          int arity = tr.coupons[ev.ref].arity;
          st.open_coupon(tkey, coupon_tensor(c, arity), arity, ev.slot, ms,
                         ev.ref);
        } else {
          st.apply_close(tkey, {1, ev.ref, ev.slot}, ms);
        }
        ppass[ev.ref]++;
        break;
      }
    }
  }
  if (!st.dims.empty())
    throw std::logic_error("unbalanced contraction state after all walks");
  HenningsResult res;
  res.value = st.a[0];
  res.components = (long)tr.comps.size();
  return res;
}

void ensure_anchors(Ctx& c) {
  if (c.have_anchors) return;
  c.d2 = bracket_with_ctx(c, parse_diagram("panel { cup 0 lr; cap 0 }")).value;
  c.dminus =
      bracket_with_ctx(c, parse_diagram("panel { cup 0 lr; xp 0; cap 0 }"))
          .value;
  c.dplus =
      bracket_with_ctx(c, parse_diagram("panel { cup 0 lr; xn 0; cap 0 }"))
          .value;
  c.have_anchors = true;
}

Q exact_sqrt(const Q& x) {
  if (x < 0) throw std::runtime_error("normalization undefined for this algebra");
  mpz_class num = x.get_num(), den = x.get_den();
  if (mpz_perfect_square_p(num.get_mpz_t()) == 0 ||
      mpz_perfect_square_p(den.get_mpz_t()) == 0)
    throw std::runtime_error("normalization undefined for this algebra");
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  return Q(rn) / Q(rd);
}

Q qpow(const Q& base, long e) {
  if (e == 0) return Q(1);
  Q b = base;
  if (e < 0) {
    if (base == 0)
      throw std::runtime_error("normalization undefined for this algebra");
    b = Q(1) / base;
    e = -e;
  }
  Q out(1);
  for (long i = 0; i < e; i++) out *= b;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// groups
// ---------------------------------------------------------------------------

GroupTable make_cyclic(int n) {
  if (n < 1) throw std::invalid_argument("cyclic group order must be positive");
  GroupTable g;
  g.name = "Z/" + std::to_string(n);
  g.n = n;
  g.mul.assign(n, std::vector<int>(n, 0));
  g.inv.assign(n, 0);
  for (int a = 0; a < n; a++) {
    for (int b = 0; b < n; b++) g.mul[a][b] = (a + b) % n;
    g.inv[a] = (n - a) % n;
  }
  return g;
}

GroupTable make_symmetric3() {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto index_of = [](const std::array<int, 3>& p) {
    for (int i = 0; i < 6; i++)
      if (perms[i][0] == p[0] && perms[i][1] == p[1] && perms[i][2] == p[2])
        return i;
    return -1;
  };
  GroupTable g;
  g.name = "S3";
  g.n = 6;
  g.mul.assign(6, std::vector<int>(6, 0));
  g.inv.assign(6, 0);
  for (int a = 0; a < 6; a++)
    for (int b = 0; b < 6; b++) {
      std::array<int, 3> comp{};
      for (int i = 0; i < 3; i++) comp[i] = perms[a][perms[b][i]];
      g.mul[a][b] = index_of(comp);
    }
  for (int a = 0; a < 6; a++)
    for (int b = 0; b < 6; b++)
      if (g.mul[a][b] == 0) g.inv[a] = b;
  return g;
}

GroupTable make_trivial() {
  GroupTable g;
  g.name = "1";
  g.n = 1;
  g.mul = {{0}};
  g.inv = {0};
  return g;
}

long count_order_divisors(const GroupTable& g, long p) {
  check_group(g);
  long count = 0;
  for (int a = 0; a < g.n; a++) {
    int x = 0;
    for (long i = 0; i < p; i++) x = g.op(x, a);
    if (x == 0) count++;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Drinfeld double
// ---------------------------------------------------------------------------

HopfData drinfeld_double(const GroupTable& g) {
  check_group(g);
  if (g.n > 24)
    throw std::invalid_argument("group order exceeds the supported bound (24)");
  int m = g.n;
  HopfData h;
  h.name = "D(" + g.name + ")";
  h.dim = m * m;
  int n = h.dim;
  auto idx = [m](int a, int x) { return a * m + x; };

  h.mult.assign(n, std::vector<QVec>(n, QVec(n, Q(0))));
  for (int b = 0; b < m; b++)
    for (int x = 0; x < m; x++) {
      int a = g.op(g.op(x, b), g.inv[x]);
      for (int y = 0; y < m; y++)
        h.mult[idx(a, x)][idx(b, y)][idx(a, g.op(x, y))] = 1;
    }

  h.unit.assign(n, Q(0));
  for (int a = 0; a < m; a++) h.unit[idx(a, 0)] = 1;

  h.comult.assign(n, std::vector<QVec>(n, QVec(n, Q(0))));
  for (int a = 0; a < m; a++)
    for (int x = 0; x < m; x++)
      for (int b = 0; b < m; b++)
        h.comult[idx(a, x)][idx(b, x)][idx(g.op(g.inv[b], a), x)] = 1;

  h.counit.assign(n, Q(0));
  for (int x = 0; x < m; x++) h.counit[idx(0, x)] = 1;

  h.antipode = qmat(n, n);
  for (int a = 0; a < m; a++)
    for (int x = 0; x < m; x++) {
      int ai = g.op(g.op(g.inv[x], g.inv[a]), x);
      h.antipode[idx(a, x)][idx(ai, g.inv[x])] = 1;
    }

  h.rmat = qmat(n, n);
  h.rinv = qmat(n, n);
  for (int gg = 0; gg < m; gg++)
    for (int b = 0; b < m; b++) {
      h.rmat[idx(gg, 0)][idx(b, gg)] = 1;
      h.rinv[idx(g.inv[gg], 0)][idx(b, gg)] = 1;
    }

  h.ribbon.assign(n, Q(0));
  h.ribbon_inv.assign(n, Q(0));
  for (int x = 0; x < m; x++) {
    h.ribbon[idx(g.inv[x], x)] = 1;
    h.ribbon_inv[idx(x, x)] = 1;
  }
  return h;
}

// ---------------------------------------------------------------------------
// axiom verification
// ---------------------------------------------------------------------------

HopfReport verify_hopf(const HopfData& h) {
  HopfReport rep;
  auto fail = [&](const std::string& msg) {
    rep.ok = false;
    rep.failures.push_back(msg);
  };
  int n = h.dim;
  if (n <= 0 || (int)h.mult.size() != n || (int)h.comult.size() != n ||
      (int)h.unit.size() != n || (int)h.counit.size() != n ||
      (int)h.antipode.size() != n || (int)h.rmat.size() != n ||
      (int)h.rinv.size() != n || (int)h.ribbon.size() != n ||
      (int)h.ribbon_inv.size() != n) {
    fail("structure tensors have inconsistent dimensions");
    return rep;
  }
  Alg A(h);

  // unit and associativity
  for (int i = 0; i < n && rep.ok; i++) {
    if (!vec_eq(A.mul(h.unit, A.basis(i)), A.basis(i)) ||
        !vec_eq(A.mul(A.basis(i), h.unit), A.basis(i)))
      fail("unit axiom fails on basis element " + std::to_string(i));
  }
  for (int i = 0; i < n; i++) {
    bool bad = false;
    for (int j = 0; j < n && !bad; j++) {
      QVec ij(n, Q(0));
      for (const auto& [k, w] : A.tri[i][j]) ij[k] += w;
      for (int k = 0; k < n && !bad; k++) {
        QVec lhs = A.mul(ij, A.basis(k));
        QVec jk(n, Q(0));
        for (const auto& [k2, w] : A.tri[j][k]) jk[k2] += w;
        QVec rhs = A.mul(A.basis(i), jk);
        if (!vec_eq(lhs, rhs)) {
          fail("associativity fails at (" + std::to_string(i) + "," +
               std::to_string(j) + "," + std::to_string(k) + ")");
          bad = true;
        }
      }
    }
    if (bad) break;
  }

  // counit and coassociativity
  for (int i = 0; i < n; i++) {
    QVec left(n, Q(0)), right(n, Q(0));
    for (size_t t = 0; t < A.cotri_idx[i].size(); t++) {
      long j = A.cotri_idx[i][t][0], k = A.cotri_idx[i][t][1];
      const Q& w = A.cotri_val[i][t];
      left[k] += w * h.counit[j];
      right[j] += w * h.counit[k];
    }
    if (!vec_eq(left, A.basis(i)) || !vec_eq(right, A.basis(i))) {
      fail("counit axiom fails on basis element " + std::to_string(i));
      break;
    }
  }
  for (int i = 0; i < n; i++) {
    std::map<std::array<long, 3>, Q> lhs, rhs;
    for (size_t t = 0; t < A.cotri_idx[i].size(); t++) {
      long j = A.cotri_idx[i][t][0], k = A.cotri_idx[i][t][1];
      const Q& w = A.cotri_val[i][t];
      for (size_t u = 0; u < A.cotri_idx[j].size(); u++)
        lhs[{A.cotri_idx[j][u][0], A.cotri_idx[j][u][1], k}] +=
            w * A.cotri_val[j][u];
      for (size_t u = 0; u < A.cotri_idx[k].size(); u++)
        rhs[{j, A.cotri_idx[k][u][0], A.cotri_idx[k][u][1]}] +=
            w * A.cotri_val[k][u];
    }
    for (auto& [key, val] : lhs)
      if (!(rhs.count(key) ? rhs[key] == val : val == 0)) {
        fail("coassociativity fails on basis element " + std::to_string(i));
        break;
      }
    for (auto& [key, val] : rhs)
      if (!(lhs.count(key) ? true : val == 0)) {
        fail("coassociativity fails on basis element " + std::to_string(i));
        break;
      }
    if (!rep.ok) break;
  }

  // bialgebra compatibility
  {
    T2 dunit = t2_comult(A, h.unit);
    if (!(dunit == t2_outer(h.unit, h.unit)))
      fail("comultiplication of the unit is not unit (x) unit");
    if (A.eps(h.unit) != 1) fail("counit of the unit is not 1");
  }
  for (int i = 0; i < n && rep.ok; i++)
    for (int j = 0; j < n; j++) {
      QVec prod(n, Q(0));
      for (const auto& [k, w] : A.tri[i][j]) prod[k] += w;
      T2 lhs = t2_comult(A, prod);
      T2 rhs = t2_mul(A, t2_comult(A, A.basis(i)), t2_comult(A, A.basis(j)));
      if (!(lhs == rhs)) {
        fail("comultiplication is not an algebra map at (" + std::to_string(i) +
             "," + std::to_string(j) + ")");
        break;
      }
      if (A.eps(prod) != A.eps(A.basis(i)) * A.eps(A.basis(j))) {
        fail("counit is not an algebra map at (" + std::to_string(i) + "," +
             std::to_string(j) + ")");
        break;
      }
    }

  // antipode
  for (int i = 0; i < n; i++) {
    QVec left(n, Q(0)), right(n, Q(0));
    for (size_t t = 0; t < A.cotri_idx[i].size(); t++) {
      long j = A.cotri_idx[i][t][0], k = A.cotri_idx[i][t][1];
      const Q& w = A.cotri_val[i][t];
      QVec sj = A.smap(A.basis(j));
      QVec l = A.mul(sj, A.basis(k));
      QVec sk = A.smap(A.basis(k));
      QVec r = A.mul(A.basis(j), sk);
      for (int q = 0; q < n; q++) {
        left[q] += w * l[q];
        right[q] += w * r[q];
      }
    }
    QVec want(n, Q(0));
    for (int q = 0; q < n; q++) want[q] = h.counit[i] * h.unit[q];
    if (!vec_eq(left, want) || !vec_eq(right, want)) {
      fail("antipode axiom fails on basis element " + std::to_string(i));
      break;
    }
  }
  for (int i = 0; i < n; i++) {
    if (!vec_eq(A.smap(A.smap(A.basis(i))), A.basis(i))) {
      fail("antipode is not involutory (S^2 != id)");
      break;
    }
  }

  // R-matrix
  T2 r = t2_of(h.rmat, n), ri = t2_of(h.rinv, n);
  T2 unit2 = t2_outer(h.unit, h.unit);
  if (!(t2_mul(A, r, ri) == unit2) || !(t2_mul(A, ri, r) == unit2))
    fail("R^{-1} is not a two-sided inverse of R");

  {
    // (Delta x 1)R = R13 R23 and (1 x Delta)R = R13 R12
    std::map<std::array<long, 3>, Q> lhs, rhs;
    for (int a = 0; a < n; a++)
      for (int b = 0; b < n; b++) {
        const Q& w = h.rmat[a][b];
        if (w == 0) continue;
        for (size_t t = 0; t < A.cotri_idx[a].size(); t++)
          lhs[{A.cotri_idx[a][t][0], A.cotri_idx[a][t][1], b}] +=
              w * A.cotri_val[a][t];
      }
    for (int a = 0; a < n; a++)
      for (int b = 0; b < n; b++) {
        const Q& w1 = h.rmat[a][b];
        if (w1 == 0) continue;
        for (int c = 0; c < n; c++)
          for (int dd = 0; dd < n; dd++) {
            const Q& w2 = h.rmat[c][dd];
            if (w2 == 0) continue;
            for (const auto& [k, w3] : A.tri[b][dd])
              rhs[{a, c, k}] += w1 * w2 * w3;
          }
      }
    if (!(lhs == rhs)) fail("(Delta x 1)R != R13 R23");

    lhs.clear();
    rhs.clear();
    for (int a = 0; a < n; a++)
      for (int b = 0; b < n; b++) {
        const Q& w = h.rmat[a][b];
        if (w == 0) continue;
        for (size_t t = 0; t < A.cotri_idx[b].size(); t++)
          lhs[{a, A.cotri_idx[b][t][0], A.cotri_idx[b][t][1]}] +=
              w * A.cotri_val[b][t];
      }
    for (int a = 0; a < n; a++)
      for (int b = 0; b < n; b++) {
        const Q& w1 = h.rmat[a][b];
        if (w1 == 0) continue;
        for (int c = 0; c < n; c++)
          for (int dd = 0; dd < n; dd++) {
            const Q& w2 = h.rmat[c][dd];
            if (w2 == 0) continue;
            for (const auto& [k, w3] : A.tri[a][c]) rhs[{k, dd, b}] += w1 * w2 * w3;
          }
      }
    if (!(lhs == rhs)) fail("(1 x Delta)R != R13 R12");
  }
  for (int i = 0; i < n; i++) {
    T2 di = t2_comult(A, A.basis(i));
    T2 lhs = t2_mul(A, r, di);
    T2 rhs = t2_mul(A, t2_flip(di, n), r);
    if (!(lhs == rhs)) {
      fail("R Delta(x) != Delta-op(x) R on basis element " + std::to_string(i));
      break;
    }
  }

  // ribbon element
  if (!vec_eq(A.mul(h.ribbon, h.ribbon_inv), h.unit) ||
      !vec_eq(A.mul(h.ribbon_inv, h.ribbon), h.unit))
    fail("ribbon_inv is not inverse to the ribbon element");
  for (int i = 0; i < n; i++)
    if (!vec_eq(A.mul(h.ribbon, A.basis(i)), A.mul(A.basis(i), h.ribbon))) {
      fail("ribbon element is not central");
      break;
    }
  if (A.eps(h.ribbon) != 1) fail("counit of the ribbon element is not 1");
  if (!vec_eq(A.smap(h.ribbon), h.ribbon))
    fail("ribbon element is not antipode-fixed");
  {
    // Drinfeld element u = m(S x 1)R21
    QVec u(n, Q(0));
    for (int a = 0; a < n; a++)
      for (int b = 0; b < n; b++) {
        const Q& w = h.rmat[a][b];
        if (w == 0) continue;
        QVec p = A.mul(A.smap(A.basis(b)), A.basis(a));
        for (int q = 0; q < n; q++) u[q] += w * p[q];
      }
    QVec v2 = A.mul(h.ribbon, h.ribbon);
    QVec usu = A.mul(u, A.smap(u));
    if (!vec_eq(v2, usu)) fail("v^2 != u S(u)");

    T2 r21r = t2_mul(A, t2_flip(r, n), r);
    T2 inv = t2_mul(A, ri, t2_flip(ri, n));
    if (!(t2_mul(A, r21r, inv) == unit2))
      fail("(R21 R)^{-1} computation is inconsistent");
    T2 dv = t2_comult(A, h.ribbon);
    T2 want = t2_mul(A, inv, t2_outer(h.ribbon, h.ribbon));
    if (!(dv == want)) fail("Delta(v) != (R21 R)^{-1} (v x v)");
  }

  // kink-route coherence: every contraction route of one self-crossing
  // must equal the ribbon element consumed by the curl rule
  {
    auto routes = [&](const QMat& rm) {
      std::array<QVec, 4> out;
      for (auto& v : out) v.assign(n, Q(0));
      for (int a = 0; a < n; a++)
        for (int b = 0; b < n; b++) {
          const Q& w = rm[a][b];
          if (w == 0) continue;
          QVec sa = A.smap(A.basis(a)), sb = A.smap(A.basis(b));
          QVec p0 = A.mul(A.basis(a), sb);
          QVec p1 = A.mul(sb, A.basis(a));
          QVec p2 = A.mul(A.basis(b), sa);
          QVec p3 = A.mul(sa, A.basis(b));
          for (int q = 0; q < n; q++) {
            out[0][q] += w * p0[q];
            out[1][q] += w * p1[q];
            out[2][q] += w * p2[q];
            out[3][q] += w * p3[q];
          }
        }
      return out;
    };
    auto rr = routes(h.rmat);
    for (const auto& v : rr)
      if (!vec_eq(v, h.ribbon)) {
        fail("kink-route coherence fails: an R contraction route differs from "
             "the ribbon element");
        break;
      }
    auto rri = routes(h.rinv);
    for (const auto& v : rri)
      if (!vec_eq(v, h.ribbon_inv)) {
        fail("kink-route coherence fails: an R^{-1} contraction route differs "
             "from the inverse ribbon element");
        break;
      }
  }

  return rep;
}

// ---------------------------------------------------------------------------
// integrals
// ---------------------------------------------------------------------------

IntegralPair solve_integrals(const HopfData& h) {
  Alg A(h);
  int n = h.dim;

  // right integral mu: for all i, k:  sum_j comult[i][j][k] mu_j = mu_i unit_k
  QMat m1 = qmat(n * n, n);
  for (int i = 0; i < n; i++) {
    for (size_t t = 0; t < A.cotri_idx[i].size(); t++)
      m1[i * n + A.cotri_idx[i][t][1]][A.cotri_idx[i][t][0]] +=
          A.cotri_val[i][t];
    for (int k = 0; k < n; k++) m1[i * n + k][i] -= h.unit[k];
  }
  auto ker1 = kernel_basis(m1);
  if (ker1.size() != 1)
    throw std::runtime_error("integral solution space dimension != 1 (got " +
                             std::to_string(ker1.size()) + ")");
  QVec mu0 = ker1[0];

  // two-sided cointegral: x L = eps(x) L = L x for all basis x
  QMat m2 = qmat(2 * n * n, n);
  for (int i = 0; i < n; i++) {
    for (int j = 0; j < n; j++)
      for (const auto& [k, w] : A.tri[i][j]) {
        m2[i * n + k][j] += w;          // e_i L
        m2[n * n + j * n + k][i] += w;  // L e_j
      }
    for (int k = 0; k < n; k++) {
      m2[i * n + k][k] -= h.counit[i];
      m2[n * n + i * n + k][k] -= h.counit[i];
    }
  }
  auto ker2 = kernel_basis(m2);
  if (ker2.size() != 1)
    throw std::runtime_error("cointegral solution space dimension != 1 (got " +
                             std::to_string(ker2.size()) + ")");
  QVec lam0 = ker2[0];

  auto pair_with = [&](const QVec& f, const QVec& x) {
    Q out(0);
    for (int i = 0; i < n; i++) out += f[i] * x[i];
    return out;
  };

  Q m_one = pair_with(mu0, h.unit);
  Q m_v = pair_with(mu0, h.ribbon);
  Q m_vi = pair_with(mu0, h.ribbon_inv);
  if (m_one == 0 || m_v * m_vi == 0)
    throw std::runtime_error("normalization undefined for this algebra");
  Q scale = m_one / (m_v * m_vi);

  IntegralPair out;
  out.mu.assign(n, Q(0));
  for (int i = 0; i < n; i++) out.mu[i] = scale * mu0[i];

  Q ml = pair_with(out.mu, lam0);
  if (ml == 0)
    throw std::runtime_error(
        "cointegral normalization undefined: mu(lambda) = 0");
  out.lambda.assign(n, Q(0));
  for (int i = 0; i < n; i++) out.lambda[i] = lam0[i] / ml;

  // cross-check: (mu x 1)(R21 R) is proportional to the cointegral
  T2 r = t2_of(h.rmat, n);
  T2 r21r = t2_mul(A, t2_flip(r, n), r);
  QVec w(n, Q(0));
  for (int i = 0; i < n; i++)
    for (int k = 0; k < n; k++) w[k] += out.mu[i] * r21r[(size_t)i * n + k];
  int l0 = -1;
  for (int i = 0; i < n; i++)
    if (out.lambda[i] != 0) {
      l0 = i;
      break;
    }
  Q s = w[l0] / out.lambda[l0];
  for (int i = 0; i < n; i++)
    if (w[i] != s * out.lambda[i])
      throw std::runtime_error(
          "integral cross-check failed: (mu x 1)(R21 R) is not proportional "
          "to the cointegral");
  out.rtr_scalar = s;

  out.lambda_s_fixed = vec_eq(A.smap(out.lambda), out.lambda);
  out.trace_symmetric = true;
  for (int i = 0; i < n && out.trace_symmetric; i++)
    for (int j = i + 1; j < n; j++) {
      Q ij(0), ji(0);
      for (const auto& [k, c] : A.tri[i][j]) ij += c * out.mu[k];
      for (const auto& [k, c] : A.tri[j][i]) ji += c * out.mu[k];
      if (ij != ji) {
        out.trace_symmetric = false;
        break;
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

HenningsResult hennings_bracket(const Diagram& d, const HopfData& h) {
  auto ctx = get_ctx(h);
  std::lock_guard<std::mutex> g(ctx->lock);
  return bracket_with_ctx(*ctx, d);
}

TauHResult tau_hennings(const Diagram& d, const HopfData& h) {
  auto ctx = get_ctx(h);
  std::lock_guard<std::mutex> g(ctx->lock);
  ensure_anchors(*ctx);
  if (!ctx->have_droot) {
    ctx->droot = exact_sqrt(ctx->d2);
    ctx->have_droot = true;
  }
  SurgeryData sd = surgery_data(d);
  HenningsResult br = bracket_with_ctx(*ctx, d);
  TauHResult res;
  res.bracket = br.value;
  res.chi = sd.chi;
  res.sigma = sd.sigma;
  res.d2 = ctx->d2;
  res.droot = ctx->droot;
  res.delta_minus = ctx->dminus;
  res.delta_plus = ctx->dplus;
  Q t = qpow(ctx->droot, -sd.chi - sd.sigma) * qpow(ctx->dminus, sd.sigma) *
        br.value;
  res.tau = Cyc(t, 1);
  return res;
}

// ---------------------------------------------------------------------------
// selfconjugate projector
// ---------------------------------------------------------------------------

SelfconjResult selfconjugate_projector(const HopfData& h, const GroupTable& g) {
  check_group(g);
  if (h.dim != g.n * g.n)
    throw std::invalid_argument(
        "selfconjugate projector requires the Drinfeld double of the group");
  auto ctx = get_ctx(h);
  std::lock_guard<std::mutex> lk(ctx->lock);
  ensure_anchors(*ctx);
  if (!ctx->have_droot) {
    ctx->droot = exact_sqrt(ctx->d2);
    ctx->have_droot = true;
  }
  const Alg& A = *ctx->alg;
  int n = h.dim;
  int m = g.n;
  const QVec& mu = ctx->ip.mu;
  const QVec& lam = ctx->ip.lambda;

  // pairing P[i][j] = mu(e_i e_j) and its inverse
  QMat P = qmat(n, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++)
      for (const auto& [k, c] : A.tri[i][j]) P[i][j] += c * mu[k];
  QMat pinv = qmat(n, n);
  {
    QMat work = P;
    for (int i = 0; i < n; i++) pinv[i][i] = 1;
    for (int col = 0; col < n; col++) {
      int pr = -1;
      for (int r = col; r < n; r++)
        if (work[r][col] != 0) {
          pr = r;
          break;
        }
      if (pr < 0)
        throw std::runtime_error("integral pairing is degenerate");
      std::swap(work[col], work[pr]);
      std::swap(pinv[col], pinv[pr]);
      Q inv = Q(1) / work[col][col];
      for (int c = 0; c < n; c++) {
        work[col][c] *= inv;
        pinv[col][c] *= inv;
      }
      for (int r = 0; r < n; r++) {
        if (r == col || work[r][col] == 0) continue;
        Q fac = work[r][col];
        for (int c = 0; c < n; c++) {
          work[r][c] -= fac * work[col][c];
          pinv[r][c] -= fac * pinv[col][c];
        }
      }
    }
  }

  // Sweedler terms of Delta(lambda)
  std::vector<std::array<long, 2>> sw_idx;
  std::vector<Q> sw_val;
  for (int i = 0; i < n; i++) {
    if (lam[i] == 0) continue;
    for (size_t t = 0; t < A.cotri_idx[i].size(); t++) {
      sw_idx.push_back(A.cotri_idx[i][t]);
      sw_val.push_back(lam[i] * A.cotri_val[i][t]);
    }
  }

  QVec vone = h.unit;
  struct Cand {
    const QVec* uhat;
    std::string uname;
  };
  std::array<Cand, 3> uhats = {Cand{&vone, "1"}, Cand{&h.ribbon, "v"},
                               Cand{&h.ribbon_inv, "v^{-1}"}};

  // expected block scalars for abelian G: the xi-vector of the hyperbolic
  // pointed category on G x G under (a, chi_b) <-> (a, b)
  bool abelian = true;
  for (int a = 0; a < m && abelian; a++)
    for (int b = 0; b < m; b++)
      if (g.op(a, b) != g.op(b, a)) {
        abelian = false;
        break;
      }
  CVec expected;
  if (abelian) {
    ModularData md = make_pointed(hyperbolic_qform(m), "hyper");
    CVec xi = xi_vector(md);
    expected.assign(n, Cyc::zero(1));
    for (int i = 0; i < md.r; i++) {
      auto coords = md.pointed->A.element(i);
      expected[(int)coords[0] * m + (int)coords[1]] = xi[i];
    }
  }

  auto scalars_of = [&](const QVec& rho) {
    // character of the irrep (a, chi_b): delta_g x -> [g == a] zeta^{b x}
    CVec out;
    for (int a = 0; a < m; a++)
      for (int b = 0; b < m; b++) {
        Cyc val = Cyc::zero(m == 1 ? 1 : m);
        for (int x = 0; x < m; x++) {
          const Q& cq = rho[a * m + x];
          if (cq != 0)
            val = val + Cyc(cq, 1) * Cyc::root(m == 1 ? 1 : m, (b * x) % m);
        }
        out.push_back(val);
      }
    return out;
  };

  for (const Cand& cand : uhats)
    for (int dual = 0; dual < 2; dual++)
      for (int order = 0; order < 2; order++) {
        // dual base: f_j paired as mu(e_i f_j) = delta (dual 0) or
        // mu(f_j e_i) = delta (dual 1)
        auto fvec = [&](int j) {
          QVec f(n, Q(0));
          for (int k = 0; k < n; k++) f[k] = dual == 0 ? pinv[k][j] : pinv[j][k];
          return f;
        };
        QVec rho(n, Q(0));
        for (int t = 0; t < n; t++) {
          QVec left = fvec(t), right = A.basis(t);
          if (order == 1) std::swap(left, right);
          QVec mid = A.mul(left, *cand.uhat);
          for (size_t s = 0; s < sw_idx.size(); s++) {
            QVec term = A.mul(A.basis((int)sw_idx[s][0]), mid);
            term = A.mul(term, A.basis((int)sw_idx[s][1]));
            term = A.mul(term, right);
            for (int q = 0; q < n; q++) rho[q] += sw_val[s] * term[q];
          }
        }
        for (int q = 0; q < n; q++) rho[q] /= ctx->droot;

        bool central = true;
        for (int i = 0; i < n && central; i++)
          if (!vec_eq(A.mul(rho, A.basis(i)), A.mul(A.basis(i), rho)))
            central = false;
        if (!central) continue;

        SelfconjResult res;
        res.rho = rho;
        res.convention = "uhat=" + cand.uname +
                         (dual == 0 ? ", duals=mu(e f)" : ", duals=mu(f e)") +
                         (order == 0 ? ", order=(f, e)" : ", order=(e, f)");
        if (abelian) {
          res.scalars = scalars_of(rho);
          bool match = true;
          for (int i = 0; i < n && match; i++)
            if (!(res.scalars[i] == expected[i])) match = false;
          if (!match) continue;
        }
        return res;
      }
  throw std::runtime_error(
      "convention mismatch: no candidate in the convention search is central "
      "with the expected block scalars");
}

}  // namespace bridged
