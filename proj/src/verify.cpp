#include "fkbe/verify.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fkbe {

double radical_inverse(std::uint64_t i, int base) {
  double f = 1, r = 0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

namespace {

GridPoint halton_point(std::uint64_t i, int sign) {
  GridPoint p;
  p.t = -1 + 2 * radical_inverse(i, 2);
  p.x = sign * (0.2 + 1.8 * radical_inverse(i, 3));
  p.y = -1 + 2 * radical_inverse(i, 5);
  return p;
}

}  // namespace

std::vector<GridPoint> default_grid(const GridSpec& g) {
  std::vector<GridPoint> pts;
  for (int sign : {1, -1})
    for (int k = 0; k < g.per_branch; ++k) pts.push_back(halton_point(g.seed + 1 + k, sign));
  return pts;
}

std::vector<GridPoint> filtered_grid(const GridSpec& g, const std::function<int(const GridPoint&)>& side_of,
                                     const std::vector<int>& sides) {
  std::map<int, std::vector<GridPoint>> got;
  for (int s : sides) got[s];
  const std::uint64_t budget = 4000 + 200ull * g.per_branch;
  for (std::uint64_t k = 0; k < budget; ++k) {
    bool done = true;
    for (int s : sides) done = done && static_cast<int>(got[s].size()) >= g.per_branch;
    if (done) break;
    for (int sign : {1, -1}) {
      const GridPoint p = halton_point(g.seed + 1 + k, sign);
      const int s = side_of(p);
      auto it = got.find(s);
      if (s != 0 && it != got.end() && static_cast<int>(it->second.size()) < g.per_branch) it->second.push_back(p);
    }
  }
  std::vector<GridPoint> pts;
  for (int s : sides) pts.insert(pts.end(), got[s].begin(), got[s].end());
  return pts;
}

void VerificationReport::add(const PointRecord& p) {
  points.push_back(p);
  ++points_evaluated;
  max_abs_residual = std::max(max_abs_residual, std::abs(p.raw));
  max_relative_residual = std::max(max_relative_residual, p.relative);
  if (std::isnan(p.relative)) max_relative_residual = p.relative;
}

void VerificationReport::finish() { pass = points_evaluated > 0 && max_relative_residual <= tolerance; }

VerificationReport run_verification(const std::string& subject, const PointResidual& f,
                                    const std::vector<GridPoint>& pts, double tol) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r;
  r.subject = subject;
  r.tolerance = tol;
  for (const auto& p : pts) {
    try {
      const Residual res = f(p);
      r.add({p.t, p.x, p.y, res.raw, res.relative});
    } catch (const DomainError&) {
      ++r.points_skipped;
    }
  }
  r.finish();
  r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

VerificationReport verify_solution(const SolutionExpr& u, const std::vector<GridPoint>& pts, double tol) {
  return run_verification(u.name, [&](const GridPoint& p) { return residual(u, p.t, p.x, p.y); }, pts, tol);
}

nlohmann::ordered_json to_json(const VerificationReport& r, bool with_timing) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["subject"] = r.subject;
  j["parameters"] = r.parameters;
  j["grid"] = {{"kind", "halton"},
               {"points_per_branch", r.grid.per_branch},
               {"box", "t,y in [-1,1], |x| in [0.2,2]"}};
  j["seed"] = r.grid.seed;
  j["points_evaluated"] = r.points_evaluated;
  j["points_skipped"] = r.points_skipped;
  j["max_abs_residual"] = r.max_abs_residual;
  j["max_relative_residual"] = r.max_relative_residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  if (with_timing) j["wall_time_ms"] = r.wall_time_ms;
  for (const auto& [k, v] : r.extra.items()) j[k] = v;
  return j;
}

void write_csv(const VerificationReport& r, std::ostream& out) {
  out << "t,x,y,raw,relative\n";
  char buf[160];
  for (const auto& p : r.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.t, p.x, p.y, p.raw, p.relative);
    out << buf;
  }
}

// ---------------------------------------------------------------- grammars

namespace {

class Lexer {
 public:
  explicit Lexer(std::string s) : s_(std::move(s)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("parse error at column " + std::to_string(i_ + 1) + ": " + what + " in '" + s_ + "'");
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool done() {
    skip();
    return i_ >= s_.size();
  }
  char peek() {
    skip();
    return i_ < s_.size() ? s_[i_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++i_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident(bool allow_dash = false) {
    skip();
    const std::size_t start = i_;
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || (allow_dash && s_[i_] == '-')))
      ++i_;
    if (i_ == start || std::isdigit(static_cast<unsigned char>(s_[start]))) {
      i_ = start;
      fail("expected a name");
    }
    return s_.substr(start, i_ - start);
  }
  bool at_number() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
  }
  double number() {
    skip();
    const std::size_t start = i_;
    auto digits = [&] {
      const std::size_t b = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      return i_ > b;
    };
    if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
    bool any = digits();
    if (i_ < s_.size() && s_[i_] == '.') {
      ++i_;
      any = digits() || any;
    }
    if (!any) {
      i_ = start;
      fail("expected a number");
    }
    if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
      ++i_;
      if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
      if (!digits()) fail("malformed exponent");
    }
    return std::strtod(s_.substr(start, i_ - start).c_str(), nullptr);
  }
  std::size_t pos() const { return i_; }
  const std::string& text() const { return s_; }
  std::string rest() const { return s_.substr(i_); }

 private:
  std::string s_;
  std::size_t i_ = 0;
};

// "(" [arg {"," arg}] ")" into e
void parse_args(Lexer& lx, SeedExpr& e) {
  lx.expect('(');
  if (lx.accept(')')) return;
  do {
    if (lx.at_number()) {
      if (!e.named.empty()) lx.fail("positional argument after a named one");
      e.positional.push_back(lx.number());
    } else {
      std::string k = lx.ident();
      lx.expect('=');
      e.named.emplace_back(k, lx.number());
    }
  } while (lx.accept(','));
  lx.expect(')');
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SeedExpr parse_seed(const std::string& text) {
  Lexer lx(text);
  SeedExpr e;
  e.text = text;
  e.name = lx.ident();
  parse_args(lx, e);
  if (!lx.done()) lx.fail("trailing input");
  return e;
}

std::map<std::string, double> bind_args(const SeedExpr& e,
                                        const std::vector<std::pair<std::string, std::optional<double>>>& params) {
  if (e.positional.size() > params.size())
    throw ParseError(e.name + ": takes at most " + std::to_string(params.size()) + " arguments");
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < e.positional.size(); ++i) out[params[i].first] = e.positional[i];
  for (const auto& [k, v] : e.named) {
    auto it = std::find_if(params.begin(), params.end(), [&](const auto& p) { return p.first == k; });
    if (it == params.end()) throw ParseError(e.name + ": unknown argument '" + k + "'");
    if (out.count(k)) throw ParseError(e.name + ": argument '" + k + "' given twice");
    out[k] = v;
  }
  for (const auto& [k, def] : params)
    if (!out.count(k)) {
      if (!def) throw ParseError(e.name + ": missing argument '" + k + "'");
      out[k] = *def;
    }
  return out;
}

namespace {

int as_int(const std::string& what, double v) {
  if (v != std::round(v) || std::abs(v) > 1e6) throw ParseError(what + " must be an integer, got " + fmt(v));
  return static_cast<int>(v);
}

int as_branch(double v) {
  if (v != 1 && v != -1) throw ParseError("branch must be 1 or -1, got " + fmt(v));
  return static_cast<int>(v);
}

}  // namespace

PlaneSolution make_plane_seed(const SeedExpr& e) {
  using P = std::vector<std::pair<std::string, std::optional<double>>>;
  if (e.name == "kernel") {
    auto a = bind_args(e, P{{"s0", 1.0}, {"x0", 0.0}});
    return heat_kernel(a["s0"], a["x0"]);
  }
  if (e.name == "poly") {
    auto a = bind_args(e, P{{"k", std::nullopt}});
    return heat_poly(as_int("poly degree", a["k"]));
  }
  if (e.name == "expmode") {
    auto a = bind_args(e, P{{"lambda", std::nullopt}});
    return heat_expmode(a["lambda"]);
  }
  if (e.name == "power") {
    auto a = bind_args(e, P{{"mu_tilde", std::nullopt}, {"branch", 1.0}});
    return stationary_power(a["mu_tilde"], as_branch(a["branch"]));
  }
  if (e.name == "invsq") {
    auto a = bind_args(e, P{{"mu_tilde", std::nullopt}, {"s0", 1.0}, {"branch", 1.0}});
    return invsq_kernel(a["mu_tilde"], a["s0"], as_branch(a["branch"]));
  }
  if (e.name == "radial") {
    auto a = bind_args(e, P{{"s0", 1.0}});
    return radial(a["s0"]);
  }
  if (e.name == "radialpoly") {
    bind_args(e, P{});
    return radialpoly();
  }
  if (e.name == "darboux") {
    if (e.positional.empty() && e.named.empty()) return darboux_from(radialpoly());
    auto a = bind_args(e, P{{"s0", 1.0}});
    return darboux_from(radial(a["s0"]));
  }
  if (e.name == "mode") throw ParseError("mode(...) seeds live on a canonical map; use them with 'reduce'");
  throw ParseError("unknown seed '" + e.name +
                   "' (expected kernel, poly, expmode, power, invsq, darboux, radial, radialpoly)");
}

PlaneSolution make_plane_seed(const std::string& text) { return make_plane_seed(parse_seed(text)); }

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {"sol-heat1", "sol-heat2", "sol-invsq", "gensol1",
                                                 "gensol2",   "const",     "coord-x",   "witness-y"};
  return names;
}

SolutionExpr make_family(const std::string& spec, const FamilyDefaults& d) {
  Lexer lx(spec);
  const std::string name = lx.ident(true);
  if (std::find(family_names().begin(), family_names().end(), name) == family_names().end())
    throw ParseError("unknown family '" + name + "'");
  FamilyDefaults p = d;
  if (lx.accept('[')) {
    do {
      const std::string k = lx.ident();
      lx.expect('=');
      const double v = lx.number();
      if (k == "n") p.n = as_int("n", v);
      else if (k == "mu") p.mu = v;
      else if (k == "value") p.value = v;
      else lx.fail("unknown family parameter '" + k + "'");
    } while (lx.accept(','));
    lx.expect(']');
  }
  std::optional<PlaneSolution> seed;
  if (lx.accept(':')) {
    const std::string rest = lx.rest();
    if (rest.empty()) lx.fail("missing seed after ':'");
    seed = make_plane_seed(rest);
  } else if (!lx.done()) {
    lx.fail("trailing input");
  }
  auto need_seed = [&](const std::string& fallback) { return seed ? *seed : make_plane_seed(fallback); };
  auto no_seed = [&] {
    if (seed) throw ParseError("family '" + name + "' takes no seed");
  };
  if (name == "sol-heat1") return sol_heat1(need_seed("kernel(1,0)"));
  if (name == "sol-heat2") return sol_heat2(need_seed("kernel(1,0)"));
  if (name == "sol-invsq") return sol_invsq(p.mu, need_seed("power(" + fmt(4 * p.mu + 0.75) + ",1)"));
  if (name == "gensol1") return gen_solution1(p.n, need_seed("kernel(1,0)"));
  if (name == "gensol2") return gen_solution2(need_seed("radial(1)"));
  if (name == "const") {
    no_seed();
    return constant_solution(p.value);
  }
  if (name == "coord-x") {
    no_seed();
    return coordinate_solution(1);
  }
  no_seed();
  return coordinate_solution(2);  // witness-y
}

GroupElement parse_group_element(const std::string& text) {
  Lexer lx(text);
  std::vector<GroupElement> factors;
  do {
    std::string name = lx.ident();
    if (lx.peek() == '+') {
      lx.accept('+');
      name += "+";
    }
    if (lx.accept('\'')) name += "'";
    if (name == "I'") {
      factors.push_back(discrete(Discrete::Iprime));
    } else if (name == "J'") {
      factors.push_back(discrete(Discrete::Jprime));
    } else if (name == "identity") {
      if (lx.peek() == '(') {
        SeedExpr e{name, {}, {}, text};
        parse_args(lx, e);
        bind_args(e, {});
      }
      factors.push_back(GroupElement::identity());
    } else if (name == "elem") {
      SeedExpr e{name, {}, {}, text};
      parse_args(lx, e);
      auto a = bind_args(e, {{"lambda", 0.0}, {"sigma", 1.0}, {"a", 1.0}, {"b", 0.0}, {"c", 0.0}, {"d", 1.0}});
      Mat2d M;
      M << a["a"], a["b"], a["c"], a["d"];
      factors.push_back(GroupElement::make(a["lambda"], a["sigma"], M));
    } else {
      OneParam id;
      try {
        id = parse_one_param(name);
      } catch (const std::invalid_argument& err) {
        lx.fail(err.what());
      }
      SeedExpr e{name, {}, {}, text};
      parse_args(lx, e);
      factors.push_back(one_param(id, bind_args(e, {{"eps", std::nullopt}})["eps"]));
    }
  } while (lx.accept('*'));
  if (!lx.done()) lx.fail("trailing input");
  GroupElement g = factors.back();
  for (int i = static_cast<int>(factors.size()) - 2; i >= 0; --i) g = compose(factors[i], g);
  return g;
}

}  // namespace fkbe
