#include "bridged/abgroup.hpp"

#include <cassert>
#include <sstream>

namespace bridged {

Q mod1(const Q& x) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  Q r = x - Q(fl);
  return r;
}

long AbGroup::order() const {
  long n = 1;
  for (long m : mods) n *= m;
  return n;
}

std::vector<long> AbGroup::add(const std::vector<long>& a,
                               const std::vector<long>& b) const {
  std::vector<long> r(mods.size());
  for (size_t i = 0; i < mods.size(); i++) r[i] = (a[i] + b[i]) % mods[i];
  return r;
}

std::vector<long> AbGroup::neg(const std::vector<long>& a) const {
  std::vector<long> r(mods.size());
  for (size_t i = 0; i < mods.size(); i++) r[i] = (mods[i] - a[i]) % mods[i];
  return r;
}

std::vector<long> AbGroup::smul(long k, const std::vector<long>& a) const {
  std::vector<long> r(mods.size());
  for (size_t i = 0; i < mods.size(); i++) {
    long v = (a[i] * (k % mods[i])) % mods[i];
    r[i] = v < 0 ? v + mods[i] : v;
  }
  return r;
}

bool AbGroup::is_zero(const std::vector<long>& a) const {
  for (long x : a)
    if (x) return false;
  return true;
}

long AbGroup::index_of(const std::vector<long>& a) const {
  long idx = 0;
  for (size_t i = 0; i < mods.size(); i++) {
    assert(a[i] >= 0 && a[i] < mods[i]);
    idx = idx * mods[i] + a[i];
  }
  return idx;
}

std::vector<long> AbGroup::element(long idx) const {
  std::vector<long> a(mods.size());
  for (size_t i = mods.size(); i-- > 0;) {
    a[i] = idx % mods[i];
    idx /= mods[i];
  }
  return a;
}

std::string AbGroup::str() const {
  std::ostringstream os;
  for (size_t i = 0; i < mods.size(); i++)
    os << (i ? "x" : "") << "Z/" << mods[i];
  return os.str();
}

Q QForm::q(const std::vector<long>& a) const { return qv[A.index_of(a)]; }

Q QForm::b(const std::vector<long>& x, const std::vector<long>& y) const {
  return mod1(q(A.add(x, y)) - q(x) - q(y));
}

bool QForm::is_quadratic() const {
  long n = A.order();
  for (long i = 0; i < n; i++) {
    auto x = A.element(i);
    if (q(A.neg(x)) != q(x)) return false;
  }
  // b(x+y, z) = b(x,z) + b(y,z) for all triples.
  for (long i = 0; i < n; i++)
    for (long j = 0; j < n; j++) {
      auto x = A.element(i), y = A.element(j), xy = A.add(x, y);
      for (long k = 0; k < n; k++) {
        auto z = A.element(k);
        if (mod1(b(xy, z) - b(x, z) - b(y, z)) != 0) return false;
      }
    }
  return true;
}

bool QForm::nondegenerate() const {
  long n = A.order();
  for (long i = 1; i < n; i++) {
    auto x = A.element(i);
    bool radical = true;
    for (long j = 0; j < n && radical; j++)
      if (b(x, A.element(j)) != 0) radical = false;
    if (radical) return false;
  }
  return true;
}

}  // namespace bridged
