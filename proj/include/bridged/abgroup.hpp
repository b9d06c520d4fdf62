#pragma once
#include <string>
#include <vector>

#include "bridged/cyclotomic.hpp"

namespace bridged {

// Finite abelian group Z/m1 x ... x Z/mk; elements are residue vectors.
struct AbGroup {
  std::vector<long> mods;

  long order() const;
  int rank() const { return (int)mods.size(); }
  std::vector<long> zero() const { return std::vector<long>(mods.size(), 0); }
  std::vector<long> add(const std::vector<long>& a,
                        const std::vector<long>& b) const;
  std::vector<long> neg(const std::vector<long>& a) const;
  std::vector<long> smul(long k, const std::vector<long>& a) const;
  bool is_zero(const std::vector<long>& a) const;
  long index_of(const std::vector<long>& a) const;  // mixed-radix index
  std::vector<long> element(long idx) const;
  std::string str() const;  // "Z/2xZ/8"
};

// Quadratic form q : A -> Q/Z, stored as a value table; the associated
// bilinear form is b(x,y) = q(x+y) - q(x) - q(y) mod 1.
struct QForm {
  AbGroup A;
  std::vector<Q> qv;  // indexed by element index, values in [0,1)
  std::string name;   // how it was specified, for reports

  Q q(const std::vector<long>& a) const;
  Q b(const std::vector<long>& x, const std::vector<long>& y) const;
  // q(-x) = q(x) and b bilinear in each slot (exhaustive exact check).
  bool is_quadratic() const;
  // b(x,.) = 0 only for x = 0.
  bool nondegenerate() const;
};

Q mod1(const Q& x);  // representative in [0,1)

}  // namespace bridged
