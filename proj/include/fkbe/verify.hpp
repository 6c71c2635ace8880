// Verification runs: quasi-random grids, residual reports, and the text
// grammars used on the command line (seeds, families, group elements).
#pragma once

#include "fkbe/group.hpp"
#include "fkbe/solutions.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace fkbe {

struct GridPoint {
  double t = 0, x = 0, y = 0;
};

struct GridSpec {
  int per_branch = 24;
  std::uint64_t seed = 42;
};

// Halton points in t, y in [-1, 1], |x| in [0.2, 2]: per_branch with x > 0,
// then per_branch with x < 0.
std::vector<GridPoint> default_grid(const GridSpec& g = {});

// Keeps drawing Halton points until every listed side has per_branch points;
// side_of returns 0 to reject a point.
std::vector<GridPoint> filtered_grid(const GridSpec& g, const std::function<int(const GridPoint&)>& side_of,
                                     const std::vector<int>& sides);

double radical_inverse(std::uint64_t i, int base);

struct PointRecord {
  double t = 0, x = 0, y = 0, raw = 0, relative = 0;
};

struct VerificationReport {
  std::string subject;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  GridSpec grid;
  int points_evaluated = 0, points_skipped = 0;
  double max_abs_residual = 0, max_relative_residual = 0, tolerance = 1e-9;
  bool pass = false;
  double wall_time_ms = 0;
  std::vector<PointRecord> points;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  void add(const PointRecord& p);
  void finish();  // pass = points_evaluated > 0 and max relative <= tolerance
};

using PointResidual = std::function<Residual(const GridPoint&)>;

// Points where the evaluator throws DomainError are skipped and counted.
VerificationReport run_verification(const std::string& subject, const PointResidual& f,
                                    const std::vector<GridPoint>& pts, double tol);
VerificationReport verify_solution(const SolutionExpr& u, const std::vector<GridPoint>& pts, double tol);

// wall_time_ms is emitted only on request so reports stay byte-identical.
nlohmann::ordered_json to_json(const VerificationReport& r, bool with_timing = false);
void write_csv(const VerificationReport& r, std::ostream& out);

struct ParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// family := name "(" [arg {"," arg}] ")" ; arg := ident "=" number | number
struct SeedExpr {
  std::string name;
  std::vector<double> positional;
  std::vector<std::pair<std::string, double>> named;
  std::string text;
};
SeedExpr parse_seed(const std::string& text);

// Binds a seed's arguments to the ordered parameter list, filling defaults;
// missing required arguments (no default) and unknown names are errors.
std::map<std::string, double> bind_args(const SeedExpr& e, const std::vector<std::pair<std::string, std::optional<double>>>& params);

// kernel, poly, expmode, power, invsq, darboux, radial, radialpoly.
PlaneSolution make_plane_seed(const SeedExpr& e);
PlaneSolution make_plane_seed(const std::string& text);

struct FamilyDefaults {
  int n = 2;
  double mu = 0;
  double value = 1;
};

// name ["[" key=value {"," key=value} "]"] [":" seed], e.g.
// "sol-heat2:kernel(1,0)", "gensol1[n=3]:poly(3)", "sol-invsq[mu=0.5]".
SolutionExpr make_family(const std::string& spec, const FamilyDefaults& d = {});
const std::vector<std::string>& family_names();

// Product of factors, leftmost applied last: Py(e), D(e), K(e), Pt(e), I(e),
// Qplus(e), I', J', identity, elem(lambda=,sigma=,a=,b=,c=,d=).
GroupElement parse_group_element(const std::string& text);

}  // namespace fkbe
