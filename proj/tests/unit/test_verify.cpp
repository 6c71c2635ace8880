#include "fkbe/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace fkbe;

TEST_CASE("Halton radical inverse") {
  CHECK(radical_inverse(1, 2) == 0.5);
  CHECK(radical_inverse(2, 2) == 0.25);
  CHECK(radical_inverse(3, 2) == 0.75);
  CHECK(radical_inverse(1, 3) == doctest::Approx(1.0 / 3));
  CHECK(radical_inverse(5, 3) == doctest::Approx(7.0 / 9));
}

TEST_CASE("default grid layout") {
  const auto g = default_grid();
  REQUIRE(g.size() == 48);
  for (int i = 0; i < 48; ++i) {
    const auto& p = g[i];
    CHECK((i < 24 ? p.x > 0 : p.x < 0));
    CHECK(std::abs(p.x) >= 0.2);
    CHECK(std::abs(p.x) <= 2.0);
    CHECK(std::abs(p.t) <= 1.0);
    CHECK(std::abs(p.y) <= 1.0);
  }
  const auto h = default_grid();
  for (int i = 0; i < 48; ++i) CHECK((g[i].t == h[i].t && g[i].x == h[i].x && g[i].y == h[i].y));

  const auto other = default_grid({24, 43});
  bool differs = false;
  for (int i = 0; i < 48; ++i) differs = differs || other[i].t != g[i].t;
  CHECK(differs);
  CHECK(default_grid({5, 1}).size() == 10);
}

TEST_CASE("filtered grid") {
  const auto g = filtered_grid({10, 42}, [](const GridPoint& p) { return p.y > 0 ? 1 : 0; }, {1});
  REQUIRE(g.size() == 10);
  for (const auto& p : g) CHECK(p.y > 0);
}

TEST_CASE("seed grammar") {
  auto e = parse_seed("kernel(1.5, x0=-0.25)");
  CHECK(e.name == "kernel");
  REQUIRE(e.positional.size() == 1);
  CHECK(e.positional[0] == 1.5);
  REQUIRE(e.named.size() == 1);
  CHECK(e.named[0].first == "x0");
  CHECK(e.named[0].second == -0.25);

  CHECK(parse_seed("radialpoly()").positional.empty());
  CHECK(parse_seed("poly(3)").positional[0] == 3);
  CHECK(parse_seed("expmode(2e-1)").positional[0] == doctest::Approx(0.2));

  const auto column_of = [](const std::string& text) -> std::string {
    try {
      parse_seed(text);
    } catch (const ParseError& err) {
      return err.what();
    }
    return "";
  };
  CHECK(column_of("kernel(1,").find("column 10") != std::string::npos);
  CHECK(column_of("kernel 1)").find("column") != std::string::npos);
  CHECK(column_of("kernel(1))").find("column") != std::string::npos);
  CHECK(column_of("(1)").find("column 1") != std::string::npos);
}

TEST_CASE("argument binding") {
  using P = std::vector<std::pair<std::string, std::optional<double>>>;
  const P params{{"s0", 1.0}, {"x0", 0.0}};
  auto a = bind_args(parse_seed("kernel(x0=2)"), params);
  CHECK(a["s0"] == 1.0);
  CHECK(a["x0"] == 2.0);
  CHECK_THROWS_AS(bind_args(parse_seed("kernel(1,2,3)"), params), ParseError);
  CHECK_THROWS_AS(bind_args(parse_seed("kernel(z=1)"), params), ParseError);
  CHECK_THROWS_AS(bind_args(parse_seed("kernel(2, s0=1)"), params), ParseError);
  CHECK_THROWS_AS(bind_args(parse_seed("poly()"), P{{"k", std::nullopt}}), ParseError);
}

TEST_CASE("plane seeds") {
  CHECK(make_plane_seed("poly(2)").value(0.5, 3.0) == doctest::Approx(10.0));
  CHECK(make_plane_seed("kernel()").value(0.2, 0.3) == doctest::Approx(heat_kernel(1, 0).value(0.2, 0.3)));
  CHECK(make_plane_seed("expmode(0.5)").value(0.2, 0.3) == doctest::Approx(heat_expmode(0.5).value(0.2, 0.3)));
  CHECK(make_plane_seed("power(0.75)").value(0.0, 2.0) ==
        doctest::Approx(stationary_power(0.75, 1).value(0.0, 2.0)));
  CHECK_NOTHROW(make_plane_seed("invsq(2, s0=1.5, branch=-1)"));
  CHECK_NOTHROW(make_plane_seed("darboux()"));
  CHECK_NOTHROW(make_plane_seed("darboux(2)"));
  CHECK_THROWS_AS(make_plane_seed("poly(1.5)"), ParseError);
  CHECK_THROWS_AS(make_plane_seed("power(1, branch=0)"), ParseError);
  CHECK_THROWS_AS(make_plane_seed("mode(1)"), ParseError);
  CHECK_THROWS_AS(make_plane_seed("gauss(1)"), ParseError);
}

TEST_CASE("family specs") {
  CHECK(family_names().size() == 8);
  const double t = 0.3, x = -0.7, y = 0.4;
  CHECK(make_family("sol-heat2").value(t, x, y) ==
        doctest::Approx(sol_heat2(heat_kernel(1, 0)).value(t, x, y)).epsilon(1e-14));
  CHECK(make_family("gensol1[n=3]:poly(3)").value(t, x, y) ==
        doctest::Approx(gen_solution1(3, heat_poly(3)).value(t, x, y)).epsilon(1e-14));
  FamilyDefaults d;
  d.n = 3;
  CHECK(make_family("gensol1:poly(3)", d).value(t, x, y) ==
        doctest::Approx(gen_solution1(3, heat_poly(3)).value(t, x, y)).epsilon(1e-14));
  CHECK(make_family("const[value=2.5]").value(t, x, y) == 2.5);
  CHECK(make_family("coord-x").value(t, x, y) == x);
  CHECK(make_family("witness-y").value(t, x, y) == y);
  CHECK(make_family("sol-invsq[mu=0.5]").value(t, 1.1, y) ==
        doctest::Approx(sol_invsq(0.5, stationary_power(2.75, 1)).value(t, 1.1, y)).epsilon(1e-14));

  CHECK_THROWS_AS(make_family("sol-heat3"), ParseError);
  CHECK_THROWS_AS(make_family("const:kernel(1,0)"), ParseError);
  CHECK_THROWS_AS(make_family("gensol1[m=2]"), ParseError);
  CHECK_THROWS_AS(make_family("gensol1[n=2.5]"), ParseError);
  CHECK_THROWS_AS(make_family("sol-heat1:"), ParseError);
  CHECK_THROWS_AS(make_family("sol-heat1 extra"), ParseError);
}

TEST_CASE("group element grammar") {
  CHECK(parse_group_element("identity").approx_equal(GroupElement::identity()));
  CHECK(parse_group_element("K(0.3)").approx_equal(one_param(OneParam::K, 0.3)));
  CHECK(parse_group_element("Qplus(0.2)").approx_equal(one_param(OneParam::Qplus, 0.2)));
  CHECK(parse_group_element("I'").approx_equal(discrete(Discrete::Iprime)));
  CHECK(parse_group_element("J'").approx_equal(discrete(Discrete::Jprime)));
  // The leftmost factor is applied last.
  CHECK(parse_group_element("Py(0.5)*D(0.2)")
            .approx_equal(compose(one_param(OneParam::Py, 0.5), one_param(OneParam::D, 0.2))));
  CHECK_FALSE(parse_group_element("Py(0.5)*D(0.2)").approx_equal(parse_group_element("D(0.2)*Py(0.5)")));

  Mat2d M;
  M << 1, 0.5, 0, 1;
  CHECK(parse_group_element("elem(b=0.5, lambda=0.1)").approx_equal(GroupElement::make(0.1, 1, M)));
  CHECK_THROWS_AS(parse_group_element("Q(0.1)"), ParseError);
  CHECK_THROWS_AS(parse_group_element("K()"), ParseError);
  CHECK_THROWS_AS(parse_group_element("K(0.1)*"), ParseError);
  CHECK_THROWS_AS(parse_group_element("elem(a=1, b=0, c=0, d=0)"), std::invalid_argument);
}

TEST_CASE("verification reports") {
  const auto grid = default_grid({6, 42});
  const auto good = verify_solution(make_family("sol-heat2"), grid, 1e-9);
  CHECK(good.pass);
  CHECK(good.points_evaluated == 12);
  CHECK(good.points_skipped == 0);
  CHECK(good.max_relative_residual <= 1e-9);

  const auto bad = verify_solution(make_family("witness-y"), grid, 1e-9);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_abs_residual > 0.1);

  // Singular points are skipped, never evaluated.
  const auto sk = run_verification(
      "half", [](const GridPoint& p) -> Residual {
        if (p.x < 0) throw DomainError("negative x");
        return make_residual(0, 1);
      },
      grid, 1e-9);
  CHECK(sk.points_evaluated == 6);
  CHECK(sk.points_skipped == 6);
  CHECK(sk.pass);

  const auto none = run_verification(
      "none", [](const GridPoint&) -> Residual { throw DomainError("nowhere"); }, grid, 1e-9);
  CHECK_FALSE(none.pass);
}

TEST_CASE("report serialization") {
  auto r = verify_solution(make_family("const"), default_grid({3, 42}), 1e-9);
  r.wall_time_ms = 12.5;
  const auto j = to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  const std::vector<std::string> expect{"schema",           "subject",         "parameters",
                                        "grid",             "seed",            "points_evaluated",
                                        "points_skipped",   "max_abs_residual", "max_relative_residual",
                                        "tolerance",        "pass"};
  CHECK(keys == expect);
  CHECK(to_json(r, true).contains("wall_time_ms"));
  CHECK(to_json(r).dump() == to_json(r).dump());

  std::ostringstream csv;
  write_csv(r, csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x,y,raw,relative");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 6);
}
