// fkbe: command-line verification of solutions, operator identities,
// subalgebra data and reductions of u_t + x u_y = x^2 u_xx.
//
// Exit codes: 0 pass, 1 fail, 2 usage or parse error.

#include "fkbe/group.hpp"
#include "fkbe/lie_algebra.hpp"
#include "fkbe/op_algebra.hpp"
#include "fkbe/reductions.hpp"
#include "fkbe/solutions.hpp"
#include "fkbe/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

using namespace fkbe;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GridOptions {
  int points = 24;
  std::uint64_t seed = 42;
  double tol = 1e-9;
  std::string csv;
  bool timing = false;

  void attach(CLI::App* app) {
    app->add_option("--tol", tol, "relative residual tolerance")->capture_default_str();
    app->add_option("--points", points, "grid points per sign branch")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--grid-seed", seed, "seed of the quasi-random grid")->capture_default_str();
    app->add_option("--csv", csv, "write per-point residuals to this file");
    app->add_flag("--timing", timing, "include wall_time_ms in the report");
  }
  GridSpec spec() const { return {points, seed}; }
};

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

int emit(const json& j, bool pass) {
  std::cout << j.dump(2) << "\n";
  return pass ? 0 : 1;
}

void dump_csv(const GridOptions& g, const VerificationReport& r) {
  if (g.csv.empty()) return;
  std::ofstream out(g.csv);
  if (!out) throw std::runtime_error("cannot open " + g.csv);
  write_csv(r, out);
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string family, seed;
  FamilyDefaults d;
  GridOptions g;
};

int cmd_verify(const VerifyArgs& a) {
  std::string spec = a.family;
  if (!a.seed.empty()) spec += ":" + a.seed;
  SolutionExpr u = make_family(spec, a.d);
  VerificationReport r = verify_solution(u, default_grid(a.g.spec()), a.g.tol);
  r.grid = a.g.spec();
  r.parameters = {{"family", a.family}, {"seed", a.seed}, {"n", a.d.n}, {"mu", a.d.mu}, {"value", a.d.value}};
  dump_csv(a.g, r);
  return emit(to_json(r, a.g.timing), r.pass);
}

// ---------------------------------------------------------------- algebra

int cmd_algebra(const std::string& sub, const std::vector<std::string>& exprs, int n, int degree, int samples,
                std::uint64_t seed) {
  if (sub == "normal-order") {
    if (exprs.size() != 1) throw UsageError("normal-order takes one expression");
    std::cout << to_string(parse_op(exprs[0])) << "\n";
    return 0;
  }
  if (sub == "commutator") {
    if (exprs.size() != 2) throw UsageError("commutator takes two expressions");
    std::cout << to_string(commutator(parse_op(exprs[0]), parse_op(exprs[1]))) << "\n";
    return 0;
  }
  if (sub == "casimir-check") {
    const OpPoly c = casimir();
    int checked = 0;
    for (const auto& m : monomials_up_to(degree)) {
      if (!commutator(c, OpPoly(m)).is_zero()) {
        std::cout << "central: false (fails against " << to_string(OpPoly(m)) << ")\n";
        return 1;
      }
      ++checked;
    }
    std::cout << "central: true (" << checked << " monomials of degree <= " << degree << ")\n";
    return 0;
  }
  if (sub == "lemma-check") {
    if (n < 0) throw UsageError("--n must be >= 0");
    const bool ok = lemma_product(n) == lemma_rhs(n);
    std::cout << (ok ? "identity holds (exact)" : "identity fails") << "\n";
    return ok ? 0 : 1;
  }
  if (sub == "independence") {
    const IndependenceReport r = symbol_independence_test(degree, samples, seed);
    json j = {{"schema", 1},          {"degree", degree},         {"samples", r.samples},
              {"monomials", r.monomials}, {"min_singular", r.min_singular}, {"max_singular", r.max_singular},
              {"independent", r.independent}};
    return emit(j, r.independent);
  }
  throw UsageError("unknown algebra subcommand '" + sub + "'");
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string by, by_op, seed, compare;
  double compare_tol = 1e-8;
  FamilyDefaults d;
  GridOptions g;
};

json compare_solutions(const SolutionExpr& a, const SolutionExpr& b, const std::vector<GridPoint>& pts, double tol,
                       bool& pass) {
  double pos = 0, neg = 0, neg_flipped = 0;
  int used = 0;
  auto rel = [](double p, double q) {
    const double s = std::max(std::abs(p), std::abs(q));
    return s == 0 ? 0.0 : std::abs(p - q) / s;
  };
  for (const auto& p : pts) {
    double va, vb;
    try {
      va = a.value(p.t, p.x, p.y);
      vb = b.value(p.t, p.x, p.y);
    } catch (const DomainError&) {
      continue;
    }
    ++used;
    if (p.x > 0) {
      pos = std::max(pos, rel(va, vb));
    } else {
      neg = std::max(neg, rel(va, vb));
      neg_flipped = std::max(neg_flipped, rel(va, -vb));
    }
  }
  pass = used > 0 && pos <= tol && std::min(neg, neg_flipped) <= tol;
  return {{"against", b.name},
          {"points", used},
          {"x_pos_max_rel_diff", pos},
          {"x_neg_max_rel_diff", neg},
          {"x_neg_max_rel_diff_sign_flipped", neg_flipped},
          {"tolerance", tol},
          {"equal", pass && neg <= tol},
          {"equal_up_to_sign_on_x_neg", pass}};
}

int cmd_generate(const GenerateArgs& a) {
  if (a.by.empty() == a.by_op.empty()) throw UsageError("give exactly one of --by or --by-op");
  const SolutionExpr seed = make_family(a.seed, a.d);
  SolutionExpr gen;
  json how;
  if (!a.by.empty()) {
    const GroupElement g = parse_group_element(a.by);
    gen = act_solution(g, seed);
    how = {{"by", a.by}, {"element", describe(g)}};
  } else {
    const OpPoly op = parse_op(a.by_op);
    gen = apply_to_solution(realize(op), seed, "(" + to_string(op) + ")(" + seed.name + ")");
    how = {{"by_op", a.by_op}, {"normal_form", to_string(op)}};
  }
  const auto pts = default_grid(a.g.spec());
  VerificationReport rs = verify_solution(seed, pts, a.g.tol);
  VerificationReport rg = verify_solution(gen, pts, a.g.tol);
  rs.grid = rg.grid = a.g.spec();
  dump_csv(a.g, rg);
  bool pass = rs.pass && rg.pass;
  json j = {{"schema", 1}, {"subject", gen.name}, {"generation", how}, {"seed_report", to_json(rs, a.g.timing)},
            {"generated_report", to_json(rg, a.g.timing)}};
  if (!a.compare.empty()) {
    bool ok = false;
    j["compare"] = compare_solutions(gen, make_family(a.compare, a.d), pts, a.compare_tol, ok);
    pass = pass && ok;
  }
  j["pass"] = pass;
  return emit(j, pass);
}

// ---------------------------------------------------------------- classify

json span_json(const SubalgebraSpan& s) {
  json basis = json::array();
  for (const auto& v : s.basis) basis.push_back(format_vector(v));
  return {{"label", s.label}, {"basis", basis}};
}

int cmd_classify(const std::string& sub, const std::string& id, std::optional<int> dim, const std::string& mu,
                 const std::string& mu2) {
  if (sub == "list") {
    json out = json::array();
    for (const CatalogFamily* f : catalog(dim)) {
      json params = json::array();
      for (const auto& p : f->params) params.push_back(p.name);
      out.push_back({{"id", f->id}, {"label", f->label}, {"dim", f->dim}, {"params", params}});
    }
    return emit({{"schema", 1}, {"count", out.size()}, {"families", out}}, true);
  }
  if (id.empty()) throw UsageError(sub + " needs a subalgebra id");
  if (sub == "normalizer") {
    const SubalgebraSpan s = instantiate(id);
    return emit({{"schema", 1}, {"subalgebra", span_json(s)}, {"normalizer", span_json(normalizer(s))}}, true);
  }
  if (sub == "quadruple") {
    const Quadruple q = invariant_quadruple(instantiate(id));
    return emit({{"schema", 1}, {"subalgebra", id}, {"quadruple", {q.n, q.n_hat, q.n_check, q.m}}}, true);
  }
  if (sub == "witness") {
    const EquivalenceWitness w = equivalence_witness(id, parse_rational(mu), parse_rational(mu2));
    json m = json::array();
    for (int i = 0; i < 2; ++i)
      m.push_back({format_rational(w.matrix(i, 0)), format_rational(w.matrix(i, 1))});
    return emit({{"schema", 1},
                 {"pair", w.pair_id},
                 {"transform", w.transform},
                 {"matrix", m},
                 {"source", span_json(w.source)},
                 {"target", span_json(w.target)},
                 {"verified", w.verified}},
                w.verified);
  }
  throw UsageError("unknown classify subcommand '" + sub + "'");
}

// ---------------------------------------------------------------- reduce

struct ReduceArgs {
  std::string case_id, seed, branch, form = "display";
  GridOptions g;
};

int cmd_reduce(const ReduceArgs& a) {
  const ReductionCase c = parse_case(a.case_id);
  const auto maps = canonical_maps(c);
  if (a.branch.empty() && maps.size() > 1) {
    std::string avail;
    for (const auto& m : maps) avail += (avail.empty() ? "" : ", ") + m.branch;
    throw UsageError("case " + c.label() + " needs --branch (" + avail + ")");
  }
  const CanonicalMap m = canonical_map(c, a.branch);
  if (a.form != "display" && a.form != "corrected") throw UsageError("--form must be display or corrected");
  const MapForm f = a.form == "display" ? MapForm::Display : MapForm::Corrected;

  const SeedExpr se = parse_seed(a.seed);
  CanonicalSeed seed;
  if (se.name == "mode") {
    const double lambda = bind_args(se, {{"lambda", 0.5}})["lambda"];
    if (!m.form(f).autonomous)
      throw UsageError(m.id() + ": the " + a.form + " potential depends on z~1; mode seeds need an autonomous potential");
    seed = [m, f, lambda](int side) { return canonical_mode(m, f, lambda, side); };
  } else {
    const PlaneSolution p = make_plane_seed(se);
    const bool heat_ok = m.is_free_heat() && p.mu_tilde == 0;
    const bool invsq_ok = c.id == CaseId::C11 && p.mu_tilde == 4 * c.mu + 0.75;
    if (!heat_ok && !invsq_ok)
      throw UsageError("seed " + p.name + " solves the inverse-square equation with mu~ = " + fmt_num(p.mu_tilde) +
                       ", which is not the canonical equation of " + m.id() + " (" + m.form(f).text + ")");
    seed = [p](int) { return p; };
  }

  const SolutionExpr u = ansatz_lift(c, canonical_pull(m, seed, f));
  auto side_of = [&](const GridPoint& p) {
    if (!c.regular(p.t, p.x, p.y)) return 0;
    const Jetd T = Jetd::constant(3, 0, p.t), X = Jetd::constant(3, 0, p.x), Y = Jetd::constant(3, 0, p.y);
    const double z2 = c.z2(T, X, Y).value();
    if (!m.in_branch(z2) || m.margin(z2) < 0.05) return 0;
    return z2 > 0 ? 1 : -1;
  };
  const auto pts = filtered_grid(a.g.spec(), side_of, m.sides);
  VerificationReport r = verify_solution(u, pts, a.g.tol);
  r.grid = a.g.spec();

  // the seed against its own canonical equation, at the images of the grid
  double canon = 0, reduced = 0, inv = 0;
  for (const auto& p : pts) {
    const Jetd T = Jetd::constant(3, 0, p.t), X = Jetd::constant(3, 0, p.x), Y = Jetd::constant(3, 0, p.y);
    const double z1 = c.z1(T, X, Y).value(), z2 = c.z2(T, X, Y).value();
    const int side = z2 > 0 ? 1 : -1;
    const double zt2 = m.forward(z2);
    try {
      canon = std::max(canon, canonical_residual(m, f, seed(side), m.z1_factor(f, side) * z1, zt2, side).relative);
      reduced = std::max(reduced, reduced_residual(c, canonical_pull(m, seed, f), z1, z2).relative);
    } catch (const DomainError&) {
      continue;
    }
    inv = std::max(inv, std::abs(m.forward(m.inverse(zt2, side)) - zt2));
  }
  json notes = json::array();
  if (m.is_free_heat()) notes.push_back("free heat");
  if (!m.anomaly.empty())
    notes.push_back(std::string(f == MapForm::Display ? "display anomaly: " : "corrected form used; display anomaly: ") +
                    m.anomaly);
  r.parameters = {{"case", c.label()}, {"branch", m.branch}, {"form", a.form}, {"canonical_seed", a.seed}};
  r.extra["potential"] = m.form(f).text;
  r.extra["canonical_max_relative_residual"] = canon;
  r.extra["reduced_max_relative_residual"] = reduced;
  r.extra["inverse_max_abs_error"] = inv;
  r.extra["notes"] = notes;
  r.pass = r.pass && canon <= a.g.tol && reduced <= a.g.tol && inv <= 1e-12;
  dump_csv(a.g, r);
  return emit(to_json(r, a.g.timing), r.pass);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fkbe: symmetry-based verification for u_t + x u_y = x^2 u_xx"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "residual report of a solution family on the default grid");
  verify->add_option("--family", va.family, "sol-heat1, sol-heat2, sol-invsq, gensol1, gensol2, const, coord-x, witness-y")
      ->required();
  verify->add_option("--seed", va.seed, "seed, e.g. kernel(s0=1,x0=0)");
  verify->add_option("--n", va.d.n, "order n of gensol1")->capture_default_str();
  verify->add_option("--mu", va.d.mu, "mu of sol-invsq")->capture_default_str();
  verify->add_option("--value", va.d.value, "value of const")->capture_default_str();
  va.g.attach(verify);

  std::string alg_sub;
  std::vector<std::string> alg_exprs;
  int alg_n = 3, alg_degree = 4, alg_samples = 200;
  std::uint64_t alg_seed = 20240611;
  auto* algebra = app.add_subcommand("algebra", "enveloping-algebra identities");
  algebra->add_option("subcommand", alg_sub, "normal-order, commutator, casimir-check, lemma-check, independence")
      ->required();
  algebra->add_option("exprs", alg_exprs, "operator expressions");
  algebra->add_option("--n", alg_n, "lemma order")->capture_default_str();
  auto* deg_opt = algebra->add_option("--degree", alg_degree, "degree bound")->capture_default_str();
  algebra->add_option("--samples", alg_samples, "independence samples")->capture_default_str();
  algebra->add_option("--seed", alg_seed, "independence sampling seed")->capture_default_str();

  GenerateArgs ga;
  auto* generate = app.add_subcommand("generate", "new solutions from a seed by a group element or an operator");
  generate->add_option("--by", ga.by, "group element, e.g. Py(0.5)*K(-0.2)*I'");
  generate->add_option("--by-op", ga.by_op, "operator in Py, D, K, e.g. K^2 + D");
  generate->add_option("--seed", ga.seed, "family spec, e.g. sol-heat2:kernel(1,0)")->required();
  generate->add_option("--compare", ga.compare, "family spec compared pointwise with the result");
  generate->add_option("--compare-tol", ga.compare_tol, "pointwise relative tolerance")->capture_default_str();
  generate->add_option("--n", ga.d.n, "default n for gensol1 specs")->capture_default_str();
  generate->add_option("--mu", ga.d.mu, "default mu for sol-invsq specs")->capture_default_str();
  ga.g.attach(generate);

  std::string cls_sub, cls_id, cls_mu = "7/10", cls_mu2 = "-3/10";
  std::optional<int> cls_dim;
  auto* classify = app.add_subcommand("classify", "subalgebra catalog, normalizers, invariants, witnesses");
  classify->add_option("subcommand", cls_sub, "list, normalizer, quadruple, witness")->required();
  classify->add_option("id", cls_id, "subalgebra id, e.g. s1.4:0, or witness pair");
  classify->add_option("--dim", cls_dim, "restrict list to a dimension");
  classify->add_option("--mu", cls_mu, "witness parameter mu")->capture_default_str();
  classify->add_option("--mu2", cls_mu2, "witness parameter mu'")->capture_default_str();

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "pull a canonical-form solution back through a Lie reduction");
  reduce->add_option("case", ra.case_id, "case id, e.g. 1.1:mu=-0.1875 or 1.5:nu=1,mu=0.5")->required();
  reduce->add_option("--canonical-seed", ra.seed, "kernel(..), poly(..), power(..), mode(lambda), ...")->required();
  reduce->add_option("--branch", ra.branch, "lo, hi or nu0 where the case has several");
  reduce->add_option("--form", ra.form, "display or corrected")->capture_default_str();
  ra.g.attach(reduce);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*verify) return cmd_verify(va);
    if (*algebra) {
      if (alg_sub == "independence" && deg_opt->count() == 0) alg_degree = 3;
      return cmd_algebra(alg_sub, alg_exprs, alg_n, alg_degree, alg_samples, alg_seed);
    }
    if (*generate) return cmd_generate(ga);
    if (*classify) return cmd_classify(cls_sub, cls_id, cls_dim, cls_mu, cls_mu2);
    if (*reduce) return cmd_reduce(ra);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
