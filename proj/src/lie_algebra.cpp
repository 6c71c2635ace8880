#include "fkbe/lie_algebra.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fkbe {

Rational parse_rational(const std::string& text) {
  std::string s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  if (s.empty()) throw std::invalid_argument("empty number");
  auto bad = [&] { return std::invalid_argument("not a number: '" + text + "'"); };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return num / den;
  }
  if (s.find_first_of("eE") != std::string::npos) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw bad();
    return Rational(v);
  }
  bool neg = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  boost::multiprecision::cpp_int num = 0, den = 1;
  bool digits = false, dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.' && !dot) {
      dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      num = num * 10 + (c - '0');
      if (dot) den *= 10;
      digits = true;
    } else {
      throw bad();
    }
  }
  if (!digits) throw bad();
  Rational r(num, den);
  return neg ? Rational(-r) : r;
}

std::string format_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  double d = to_double(r);
  if (Rational(d) == r) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, p);
  }
  return numerator(r).str() + "/" + denominator(r).str();
}

namespace {

using RMat = std::vector<std::vector<Rational>>;

// Basis of the null space of A (rows x cols).
std::vector<std::vector<Rational>> kernel(RMat a, int cols) {
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (int c = 0; c < cols && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[r], a[p]);
    Rational inv = 1 / a[r][c];
    for (auto& v : a[r]) v *= inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (int k = 0; k < cols; ++k) a[i][k] -= f * a[r][k];
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<Rational>> out;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -a[i][free];
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

SubalgebraSpan normalizer(const SubalgebraSpan& s) {
  auto basis = row_reduce(s.basis);
  if (!is_closed(basis)) throw std::invalid_argument("normalizer: input span is not closed under the bracket");
  const int k = static_cast<int>(basis.size());
  // unknowns: x (5) and c_{i,j} (k*k) with [x, b_i] - sum_j c_ij b_j = 0
  const int cols = 5 + k * k;
  RMat a;
  for (int i = 0; i < k; ++i) {
    for (int comp = 0; comp < 5; ++comp) {
      std::vector<Rational> row(cols, Rational(0));
      for (int l = 0; l < 5; ++l) row[l] = bracket(ess_basis<Rational>(l), basis[i])[comp];
      for (int j = 0; j < k; ++j) row[5 + i * k + j] = -basis[j][comp];
      a.push_back(std::move(row));
    }
  }
  std::vector<RVec> xs;
  for (const auto& v : kernel(a, cols)) {
    RVec x;
    for (int l = 0; l < 5; ++l) x[l] = v[l];
    if (!x.isZero()) xs.push_back(x);
  }
  SubalgebraSpan n{row_reduce(xs), s.label.empty() ? "" : "N(" + s.label + ")"};
  return n;
}

Quadruple invariant_quadruple(const SubalgebraSpan& s) {
  auto basis = row_reduce(s.basis);
  if (!is_closed(basis)) throw std::invalid_argument("invariant_quadruple: input span is not closed under the bracket");
  std::vector<RVec> pf, pz;
  for (const auto& b : basis) {
    RVec f = b, z = b;
    f[Pt] = f[Iden] = 0;
    z[Py] = z[Dil] = z[Kgen] = 0;
    pf.push_back(f);
    pz.push_back(z);
  }
  Quadruple q;
  q.n = static_cast<int>(basis.size());
  q.n_hat = rank(pf);
  q.m = rank(pz);
  // s ∩ z is the kernel of pi_f restricted to s
  RMat a(3, std::vector<Rational>(q.n));
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < q.n; ++j) a[r][j] = basis[j][r];
  q.n_check = static_cast<int>(kernel(a, q.n).size());
  return q;
}

std::string format_vector(const RVec& v) {
  static const char* names[5] = {"Py", "D", "K", "Pt", "I"};
  std::string out;
  for (int i = 0; i < 5; ++i) {
    if (v[i] == 0) continue;
    Rational c = v[i];
    bool neg = c < 0;
    if (neg) c = -c;
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    if (c != 1) out += format_rational(c) + "*";
    out += names[i];
  }
  return out.empty() ? "0" : out;
}

std::string format_span(const std::vector<RVec>& basis) {
  std::string out = "<";
  for (std::size_t i = 0; i < basis.size(); ++i) out += (i ? ", " : "") + format_vector(basis[i]);
  return out + ">";
}

namespace {

RVec vec(Rational py, Rational d, Rational k, Rational pt, Rational i) {
  RVec v;
  v << py, d, k, pt, i;
  return v;
}

const RVec P = vec(1, 0, 0, 0, 0), D = vec(0, 1, 0, 0, 0), K = vec(0, 0, 1, 0, 0), T = vec(0, 0, 0, 1, 0),
           I = vec(0, 0, 0, 0, 1);

std::vector<CatalogFamily> build_catalog() {
  using V = std::vector<Rational>;
  const ParamSpec mu{"mu", Domain::Real}, nu{"nu", Domain::NonNegative}, nup{"nu", Domain::Positive},
      delta{"delta", Domain::ZeroOne};
  std::vector<CatalogFamily> c;
  c.push_back({"s1.1", "s1.1^{mu}", 1, {mu}, [](const V& p) { return std::vector<RVec>{T + p[0] * I}; }});
  c.push_back({"s1.2", "s1.2", 1, {}, [](const V&) { return std::vector<RVec>{I}; }});
  c.push_back({"s1.3", "s1.3^{1,mu}", 1, {mu}, [](const V& p) { return std::vector<RVec>{P + T + p[0] * I}; }});
  c.push_back({"s1.4", "s1.4^{delta'}", 1, {delta}, [](const V& p) { return std::vector<RVec>{P + p[0] * I}; }});
  c.push_back({"s1.5", "s1.5^{nu',mu}", 1, {nup, mu},
               [](const V& p) { return std::vector<RVec>{D + p[0] * T + p[1] * I}; }});
  c.push_back({"s1.6", "s1.6^{nu}", 1, {nu}, [](const V& p) { return std::vector<RVec>{D + p[0] * I}; }});
  c.push_back({"s1.7", "s1.7^{nu',mu}", 1, {nup, mu},
               [](const V& p) { return std::vector<RVec>{P + K + p[0] * T + p[1] * I}; }});
  c.push_back({"s1.7", "s1.7^{0,nu}", 1, {{"zero", Domain::Zero}, nu},
               [](const V& p) { return std::vector<RVec>{P + K + p[1] * I}; }});

  c.push_back({"s2.1", "s2.1", 2, {}, [](const V&) { return std::vector<RVec>{T, I}; }});
  c.push_back({"s2.2", "s2.2^{delta',mu}", 2, {delta, mu},
               [](const V& p) { return std::vector<RVec>{P + p[0] * I, T + p[1] * I}; }});
  c.push_back({"s2.3", "s2.3^{delta'}", 2, {delta}, [](const V& p) { return std::vector<RVec>{P + p[0] * T, I}; }});
  c.push_back({"s2.4", "s2.4^{nu,mu}", 2, {nu, mu},
               [](const V& p) { return std::vector<RVec>{D + p[0] * I, T + p[1] * I}; }});
  c.push_back({"s2.5", "s2.5^{nu}", 2, {nu}, [](const V& p) { return std::vector<RVec>{D + p[0] * T, I}; }});
  c.push_back({"s2.6", "s2.6^{nu,mu}", 2, {nu, mu},
               [](const V& p) { return std::vector<RVec>{P + K + p[0] * I, T + p[1] * I}; }});
  c.push_back({"s2.7", "s2.7^{nu}", 2, {nu}, [](const V& p) { return std::vector<RVec>{P + K + p[0] * T, I}; }});
  c.push_back({"s2.8", "s2.8^{nu',mu}", 2, {nup, mu},
               [](const V& p) { return std::vector<RVec>{P, D + p[0] * T + p[1] * I}; }});
  c.push_back({"s2.9", "s2.9^{nu}", 2, {nu}, [](const V& p) { return std::vector<RVec>{P, D + p[0] * I}; }});

  c.push_back({"s3.1", "s3.1", 3, {}, [](const V&) { return std::vector<RVec>{P, T, I}; }});
  c.push_back({"s3.2", "s3.2", 3, {}, [](const V&) { return std::vector<RVec>{D, T, I}; }});
  c.push_back({"s3.3", "s3.3", 3, {}, [](const V&) { return std::vector<RVec>{P + K, T, I}; }});
  c.push_back({"s3.4", "s3.4^{nu,mu}", 3, {nu, mu},
               [](const V& p) { return std::vector<RVec>{P, D + p[0] * I, T + p[1] * I}; }});
  c.push_back({"s3.5", "s3.5^{nu}", 3, {nu}, [](const V& p) { return std::vector<RVec>{P, D + p[0] * T, I}; }});
  c.push_back({"s3.6", "s3.6", 3, {}, [](const V&) { return std::vector<RVec>{P, D, K}; }});

  c.push_back({"s4.1", "s4.1", 4, {}, [](const V&) { return std::vector<RVec>{P, D, T, I}; }});
  c.push_back({"s4.2", "s4.2^{mu}", 4, {mu}, [](const V& p) { return std::vector<RVec>{P, D, K, T + p[0] * I}; }});
  c.push_back({"s4.3", "s4.3", 4, {}, [](const V&) { return std::vector<RVec>{P, D, K, I}; }});
  return c;
}

const char* domain_text(Domain d) {
  switch (d) {
    case Domain::Real: return "any real";
    case Domain::Positive: return "> 0";
    case Domain::NonNegative: return ">= 0";
    case Domain::ZeroOne: return "0 or 1";
    case Domain::Zero: return "0";
  }
  return "";
}

bool in_domain(Domain d, const Rational& v) {
  switch (d) {
    case Domain::Real: return true;
    case Domain::Positive: return v > 0;
    case Domain::NonNegative: return v >= 0;
    case Domain::ZeroOne: return v == 0 || v == 1;
    case Domain::Zero: return v == 0;
  }
  return false;
}

std::string make_label(const CatalogFamily& fam, const std::vector<Rational>& values) {
  if (values.empty()) return fam.id;
  std::string out = fam.id + ":";
  for (std::size_t i = 0; i < values.size(); ++i)
    out += (i ? "," : "") + fam.params[i].name + "=" + format_rational(values[i]);
  return out;
}

}  // namespace

const std::vector<CatalogFamily>& catalog_families() {
  static const std::vector<CatalogFamily> c = build_catalog();
  return c;
}

std::vector<const CatalogFamily*> catalog(std::optional<int> dim) {
  std::vector<const CatalogFamily*> out;
  for (const auto& f : catalog_families())
    if (!dim || f.dim == *dim) out.push_back(&f);
  return out;
}

SubalgebraSpan instantiate(const CatalogFamily& fam, const std::vector<Rational>& values) {
  if (values.size() != fam.params.size())
    throw std::invalid_argument(fam.label + ": expected " + std::to_string(fam.params.size()) + " parameter(s), got " +
                                std::to_string(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!in_domain(fam.params[i].domain, values[i]))
      throw std::invalid_argument(fam.label + ": parameter " + fam.params[i].name + " = " +
                                  format_rational(values[i]) + " outside its domain (" +
                                  domain_text(fam.params[i].domain) + ")");
  return {fam.build(values), make_label(fam, values)};
}

SubalgebraSpan instantiate(const std::string& id) {
  const auto colon = id.find(':');
  const std::string key = id.substr(0, colon);
  std::vector<std::pair<std::string, std::string>> given;  // (name or "", value)
  if (colon != std::string::npos) {
    std::stringstream ss(id.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos)
        given.emplace_back("", item);
      else
        given.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
  }
  std::string first_error;
  bool known = false;
  for (const auto& fam : catalog_families()) {
    if (fam.id != key) continue;
    known = true;
    try {
      std::vector<std::optional<Rational>> vals(fam.params.size());
      std::size_t pos = 0;
      for (const auto& [name, text] : given) {
        std::size_t slot = pos;
        if (!name.empty()) {
          slot = fam.params.size();
          for (std::size_t i = 0; i < fam.params.size(); ++i)
            if (fam.params[i].name == name) slot = i;
          if (slot == fam.params.size()) throw std::invalid_argument(fam.label + ": unknown parameter '" + name + "'");
        }
        if (slot >= vals.size()) throw std::invalid_argument(fam.label + ": too many parameters");
        vals[slot] = parse_rational(text);
        pos = slot + 1;
      }
      std::vector<Rational> v;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!vals[i]) throw std::invalid_argument(fam.label + ": missing parameter " + fam.params[i].name);
        v.push_back(*vals[i]);
      }
      return instantiate(fam, v);
    } catch (const std::invalid_argument& e) {
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!known) throw std::invalid_argument("unknown catalog id '" + key + "'");
  throw std::invalid_argument(first_error);
}

const std::vector<std::string>& equivalence_pairs() {
  static const std::vector<std::string> ids = {"s1.3", "s1.4", "s1.7", "s2.2", "s2.3", "s2.6", "s2.7"};
  return ids;
}

EquivalenceWitness equivalence_witness(const std::string& pair_id, const Rational& mu, const Rational& mu2) {
  EquivalenceWitness w;
  w.pair_id = pair_id;
  if (pair_id.rfind("identity:", 0) == 0) {
    w.transform = "identity";
    w.matrix = Mat2<Rational>::Identity();
    w.source = instantiate(pair_id.substr(9));
    w.target = w.source;
    std::vector<RVec> pushed;
    for (const auto& b : w.source.basis) pushed.push_back(pushforward(w.matrix, b));
    w.verified = span_equal(pushed, w.target.basis);
    return w;
  }
  const std::string m = format_rational(mu), m2 = format_rational(mu2);
  auto span = [](std::vector<RVec> b, std::string label) { return SubalgebraSpan{std::move(b), std::move(label)}; };
  if (pair_id == "s1.3") {
    w.source = span({P - T - mu * I}, "s1.3^{-1,-mu}:mu=" + m);
    w.target = span({P + T + mu * I}, "s1.3^{1,mu}:mu=" + m);
  } else if (pair_id == "s1.4") {
    w.source = span({P - I}, "s1.4^{-1}");
    w.target = span({P + I}, "s1.4^{1}");
  } else if (pair_id == "s1.7") {
    w.source = span({P + K - mu * T - mu2 * I}, "s1.7^{-mu,-mu'}:mu=" + m + ",mu'=" + m2);
    w.target = span({P + K + mu * T + mu2 * I}, "s1.7^{mu,mu'}:mu=" + m + ",mu'=" + m2);
  } else if (pair_id == "s2.2") {
    w.source = span({P - I, T + mu * I}, "s2.2^{-1,mu}:mu=" + m);
    w.target = span({P + I, T + mu * I}, "s2.2^{1,mu}:mu=" + m);
  } else if (pair_id == "s2.3") {
    w.source = span({P - T, I}, "s2.3^{-1}");
    w.target = span({P + T, I}, "s2.3^{1}");
  } else if (pair_id == "s2.6") {
    w.source = span({P + K - mu * I, T + mu2 * I}, "s2.6^{-mu,mu'}:mu=" + m + ",mu'=" + m2);
    w.target = span({P + K + mu * I, T + mu2 * I}, "s2.6^{mu,mu'}:mu=" + m + ",mu'=" + m2);
  } else if (pair_id == "s2.7") {
    w.source = span({P + K - mu * T, I}, "s2.7^{-mu}:mu=" + m);
    w.target = span({P + K + mu * T, I}, "s2.7^{mu}:mu=" + m);
  } else {
    std::string known;
    for (const auto& id : equivalence_pairs()) known += (known.empty() ? "" : ", ") + id;
    throw std::invalid_argument("unknown equivalence pair '" + pair_id + "' (known: " + known + ", identity:<id>)");
  }
  w.transform = "J'";
  w.matrix << 1, 0, 0, -1;  // canonical form of diag(-1, 1)
  std::vector<RVec> pushed;
  for (const auto& b : w.source.basis) pushed.push_back(pushforward(w.matrix, b));
  w.verified = span_equal(pushed, w.target.basis);
  return w;
}

}  // namespace fkbe
