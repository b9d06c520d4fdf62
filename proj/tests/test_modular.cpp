#include "bridged/modular.hpp"
#include "doctest.h"

using namespace bridged;

TEST_CASE("abelian groups and quadratic forms") {
  AbGroup A{{2, 8}};
  CHECK(A.order() == 16);
  CHECK(A.str() == "Z/2xZ/8");
  for (long i = 0; i < 16; i++) CHECK(A.index_of(A.element(i)) == i);
  auto x = A.element(5);
  CHECK(A.is_zero(A.add(x, A.neg(x))));
  CHECK(mod1(Q(-3, 4)) == Q(1, 4));
  CHECK(mod1(Q(9, 4)) == Q(1, 4));

  QForm dflt = default_qform(AbGroup{{4}});
  CHECK(dflt.is_quadratic());
  CHECK(dflt.nondegenerate());
  CHECK(dflt.q({1}) == Q(1, 8));

  QForm degen = cyclic_qform(4, Q(1, 4));
  CHECK(degen.is_quadratic());
  CHECK_FALSE(degen.nondegenerate());

  QForm hyp = hyperbolic_qform(3);
  CHECK(hyp.is_quadratic());
  CHECK(hyp.nondegenerate());
  CHECK(hyp.b({1, 0}, {0, 1}) == Q(1, 3));

  CHECK_THROWS(cyclic_qform(4, Q(1, 16)));  // not well defined on Z/4
}

TEST_CASE("pointed fixtures: dhat, gauss sums, report") {
  ModularData z5 = make_pointed(default_qform(AbGroup{{5}}), "pointed:Z/5");
  CHECK(z5.D2 == Cyc(Q(5)));
  auto dhat = solve_dhat(z5);
  REQUIRE(dhat.has_value());
  for (const Cyc& v : *dhat) CHECK(v == Cyc(Q(1, 5)));
  auto rep = modularity_report(z5);
  CHECK(rep.has_dhat);
  CHECK(rep.dim_column);
  CHECK(rep.s_invertible);
  CHECK(rep.sys_c);
  CHECK(verlinde_holds(z5));
  CHECK(z5.delta_plus * z5.delta_minus == z5.D2);

  ModularData sem = make_pointed(semion_qform(), "pointed:Z/2:semion");
  CHECK(sem.delta_plus == Cyc(Q(1)) + Cyc::root(4, 1));
  CHECK(sem.delta_plus * sem.delta_minus == Cyc(Q(2)));
  CHECK(modularity_report(sem).modular());
}

TEST_CASE("degenerate Z/4 datum fails all three conditions") {
  ModularData bad = make_pointed(cyclic_qform(4, Q(1, 4)), "degenerate");
  auto rep = modularity_report(bad);
  CHECK_FALSE(rep.has_dhat);
  CHECK_FALSE(rep.dim_column);
  CHECK_FALSE(rep.s_invertible);
  CHECK_FALSE(rep.modular());
  CHECK(bad.delta_plus * bad.delta_minus != bad.D2);
}

TEST_CASE("fibonacci fixture") {
  ModularData fib = make_fibonacci();
  Cyc phi = fib.dim[1];
  CHECK(phi * phi == phi + Cyc(Q(1)));
  CHECK(fib.D2 == phi + Cyc(Q(2)));
  auto dhat = solve_dhat(fib);
  REQUIRE(dhat.has_value());
  CHECK((*dhat)[0] * fib.D2 == Cyc(Q(1)));
  CHECK((*dhat)[1] == phi * (*dhat)[0]);
  auto rep = modularity_report(fib);
  CHECK(rep.modular());
  CHECK(rep.sys_c);
  CHECK(verlinde_holds(fib));
  CHECK(fib.delta_plus * fib.delta_minus == fib.D2);
}

TEST_CASE("ising fixture") {
  ModularData is = make_ising();
  CHECK(is.D2 == Cyc(Q(4)));
  CHECK(is.D == Cyc(Q(2)));
  CHECK(is.delta_plus == Cyc(Q(2)) * Cyc::root(16, 1));
  CHECK(is.delta_plus * is.delta_minus == Cyc(Q(4)));
  auto rep = modularity_report(is);
  CHECK(rep.modular());
  CHECK(rep.sys_c);
  CHECK(verlinde_holds(is));
}

TEST_CASE("dhat solvability implies the whole report, on every fixture") {
  std::vector<ModularData> fixtures = {
      make_pointed(default_qform(AbGroup{{2}}), "z2"),
      make_pointed(default_qform(AbGroup{{3}}), "z3"),
      make_pointed(default_qform(AbGroup{{4}}), "z4"),
      make_pointed(default_qform(AbGroup{{5}}), "z5"),
      make_pointed(semion_qform(), "semion"),
      make_pointed(hyperbolic_qform(2), "hyp2"),
      make_pointed(hyperbolic_qform(3), "hyp3"),
      make_pointed(default_qform(AbGroup{{2, 8}}), "z2z8"),
      make_pointed(cyclic_qform(4, Q(1, 4)), "degenerate-z4"),
      make_fibonacci(),
      make_ising(),
  };
  for (const auto& m : fixtures) {
    auto rep = modularity_report(m);
    if (rep.has_dhat) {
      CHECK(rep.dim_column);
      CHECK(rep.s_invertible);
      CHECK(rep.sys_c);
    }
    CHECK(m.D * m.D == m.D2);
  }
}

TEST_CASE("xi vector on pointed data") {
  ModularData z4 = make_pointed(default_qform(AbGroup{{4}}), "z4");
  CVec xi = xi_vector(z4);
  CHECK(xi[0] == Cyc(Q(1, 2)));
  CHECK(xi[1].is_zero());
  CHECK(xi[2] == Cyc(Q(1, 2)));  // theta_2 = -1, rho = +1
  CHECK(xi[3].is_zero());

  ModularData sem = make_pointed(semion_qform(), "semion");
  CVec xs = xi_vector(sem);
  CHECK(xs[1] == -xs[0]);
  CHECK(xs[0] * xs[0] == Cyc(Q(1, 2)));

  CHECK_THROWS(xi_vector(make_fibonacci()));
}
