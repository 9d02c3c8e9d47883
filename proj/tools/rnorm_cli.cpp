// rnorm: command-line front end for the restriction-norm toolkit.
//
// Exit codes: 0 success, 1 invalid arguments, 2 precondition violation,
// 3 tolerance or tail failure, 4 selftest failure.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rnorm/expsums.hpp"
#include "rnorm/heegner.hpp"
#include "rnorm/kernel.hpp"
#include "rnorm/qforms.hpp"
#include "rnorm/series.hpp"
#include "rnorm/specfun.hpp"
#include "table.hpp"

namespace {

using namespace rnorm;
using rnorm::cli::Cell;
using rnorm::cli::ojson;
using rnorm::cli::Table;

constexpr const char* kVersion = "1.0.0";

struct Context {
  std::string format = "csv";
  std::string out;
  unsigned threads = 1;
};

struct Output {
  explicit Output(std::string c) : command(std::move(c)) {}
  std::string command;
  ojson params = ojson::object();
  Table table;
  ojson extra = ojson::object();  // additional JSON members, e.g. a bundle
};

void emit(const Context& ctx, const Output& o) {
  std::ofstream file;
  if (!ctx.out.empty()) {
    file.open(ctx.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file " + ctx.out);
  }
  std::ostream& os = ctx.out.empty() ? std::cout : file;
  if (ctx.format == "json") {
    ojson j = ojson::object();
    j["tool"] = "rnorm";
    j["version"] = kVersion;
    j["command"] = o.command;
    j["parameters"] = o.params;
    for (auto it = o.extra.begin(); it != o.extra.end(); ++it) j[it.key()] = it.value();
    j["columns"] = o.table.columns;
    j["rows"] = o.table.json_rows();
    os << j.dump(2) << "\n";
  } else {
    o.table.write_csv(os);
  }
}

// "p/q", an integer, or a terminating decimal, as an exact fraction.
std::pair<i64, i64> parse_fraction(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
  auto dot = s.find('.');
  if (dot == std::string::npos) return {std::stoll(s), 1};
  const std::string frac = s.substr(dot + 1);
  i64 den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const std::string whole = s.substr(0, dot);
  const i64 w = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
  const i64 f = frac.empty() ? 0 : std::stoll(frac);
  return {w * den + (s[0] == '-' ? -f : f), den};
}

std::string matrix_text(const UnimodularMatrix& m) {
  std::ostringstream os;
  os << m.e11 << ' ' << m.e12 << ' ' << m.e21 << ' ' << m.e22;
  return os.str();
}

std::vector<Cell> aut_row(const QuadForm& q) {
  const auto p = automorphisms(q);
  return {det4(q), q.a, q.b2, q.c, static_cast<i64>(p.gl2_count), static_cast<i64>(p.sl2_count),
          static_cast<i64>(p.epsilon), std::string(to_string(p.case_tag))};
}

const std::vector<std::string> aut_columns = {"N", "a", "b2", "c", "gl2", "sl2", "epsilon", "case_tag"};

// ---- selftests ----

struct Checks {
  int failed = 0;
  void operator()(bool ok, const std::string& name) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    if (!ok) ++failed;
  }
};

int selftest_forms() {
  Checks ck;
  ck(det4({1, 0, 1}) == 4 && det4({2, 2, 2}) == 12 && det4({1, 1, 1}) == 3, "det4 examples");
  ck(is_reduced({1, 1, 1}) && !is_reduced({1, -1, 1}), "tie rule");
  ck(transform({3, 4, 3}, {1, -1, 0, 1}) == QuadForm{3, -2, 2}, "transform (3,4,3)");
  const auto r = reduce({3, 4, 3});
  ck(r.form == QuadForm{2, 2, 3} && transform({3, 4, 3}, r.m) == r.form, "reduce (3,4,3)");
  const auto p = automorphisms({2, 2, 2});
  ck(p.gl2_count == 12 && p.sl2_count == 6 && p.epsilon == 3, "hexagonal row");
  ck(automorphisms({1, 0, 1}).matrices == automorphisms_bruteforce({1, 0, 1}, 2), "square row vs brute force");
  return ck.failed ? 4 : 0;
}

int selftest_classnum() {
  Checks ck;
  ck(class_number(3) == 1 && class_number(4) == 1 && class_number(5) == 0, "class numbers 3, 4, 5");
  ck(class_sum(3, 4) == 1 && class_sum(1) == 2, "class sums at 3/4 and 1");
  i64 total = 0;
  for (i64 n = 1; n <= 400; ++n) total += class_number(n);
  ck(static_cast<i64>(enumerate_reduced(400).size()) == total, "enumeration count at 400");
  return ck.failed ? 4 : 0;
}

int selftest_heegner() {
  Checks ck;
  const auto z = heegner_point({2, 2, 2});
  ck(std::abs(z.x + 0.5) < 1e-15 && std::abs(z.y - std::sqrt(3.0) / 2.0) < 1e-15, "hexagonal point");
  ck(u_orbit_exact({1, 0, 1}, {1, 1, 0, 1}) == cpp_rational(1, 4), "exact u for a translation");
  ck(count_orbit_close({0.0, 1.0}, 0.001, 10).total == 4, "orbit of i");
  ck(count_orbit_close({0.0, 10.0}, 0.01, 10).total == 6, "orbit of 10i");
  ck(std::abs(pair_invariant({0.0, 1.0}, {0.0, 2.0}) - 0.125) < 1e-15, "u(i, 2i)");
  return ck.failed ? 4 : 0;
}

int selftest_hsum() {
  Checks ck;
  const cplx h1 = h_sum({1, 3, 2}, {4, 5, 2}, 1, 1);
  ck(std::abs(h1 - std::polar(1.0, -2.0 * pi * 15.0 / 4.0)) < 1e-12, "c = 1 single term");
  ck(h_sum({1, 3, 2}, {4, 5, 3}, 7, 1) == cplx(0.0, 0.0), "p4 != s4 vanishes");
  const auto g = delta_gap({1, 0, 2}, {1, 0, 1}, inverse_of_integer(1, 0, 0, 1));
  ck(g.delta == 1 && g.rhs1 == 1 && g.rhs2 == 1, "diag(1,2) gap");
  ck(std::abs(h_sum({3, -2, 5}, {1, 4, 5}, 12, -1) - h_sum_naive({3, -2, 5}, {1, 4, 5}, 12, -1)) < 1e-9,
     "exact vs float phases");
  return ck.failed ? 4 : 0;
}

int selftest_bessel() {
  Checks ck;
  ck(std::abs(bessel_j(0.5, pi / 2.0) - 2.0 / pi) < 1e-15, "J_1/2(pi/2)");
  ck(bessel_j(4.5, 0.0) == 0.0, "J at the origin");
  const auto id = product_identity_gap(make_order(6), 2.0, 2.0, pi / 6.0);
  ck(std::abs(id.lhs - id.rhs) <= 1e-6, "product identity k=6");
  ck(std::abs(bump(1.5) - std::exp(-4.0)) < 1e-16 && bump(1.0) == 0.0 && bump(2.0) == 0.0, "bump window");
  return ck.failed ? 4 : 0;
}

int selftest_kernel() {
  Checks ck;
  ck(std::abs(std::expm1(log_c_k_duplication(10) - log_c_k(10))) <= 1e-12, "duplication k=10");
  ck(std::abs(gaussian_approx_error(256, 0.0, 0.0)) <= 0.1, "gaussian error k=256");
  const auto g = log_gamma_factor(0.0L, 20, 0.5L);
  ck(std::abs(g.imag()) < 1e-12L, "G(0,k,1/2) real");
  ck(std::abs(c0_limit(1e6, 0.0, 0.0) - c0_constant()) <= 1e-4, "C0 digamma limit");
  return ck.failed ? 4 : 0;
}

int selftest_series() {
  Checks ck;
  ck(std::abs(l_partial(0.0, 0.75).real() - 8.0 / (3.0 * std::sqrt(3.0))) < 1e-14, "L partial at 3/4");
  ck(std::abs(l_partial(0.0, 1.0).real() - 8.0 / (3.0 * std::sqrt(3.0)) - 1.0) < 1e-14, "L partial at 1");
  const auto e = euler_maclaurin_even([](double x) { return x; }, 0, 10);
  ck(e.sum == 30.0 && std::abs(e.half_integral - 25.0) < 1e-12 && std::abs(e.bound - 20.0) < 1e-9,
     "even Euler-Maclaurin for f(x) = x");
  const cplx v(0.5, 0.25);
  ck(std::abs(l_continued(v, 20000) - l_partial(v, 20000.0) - l_partial_tail(v, 20000.0)) < 1e-9,
     "continuation equals tail-corrected partial sum");
  return ck.failed ? 4 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rnorm: quadratic forms, Heegner points, exponential sums, Bessel kernels and series constants"};
  app.fallthrough();
  app.require_subcommand(1);
  Context ctx;
  app.add_option("--format", ctx.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", ctx.out, "Output file (default stdout)");
  app.add_option("--threads", ctx.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.set_version_flag("--version", kVersion);

  std::vector<std::pair<CLI::App*, std::function<Output()>>> leaves;
  struct Group {
    CLI::App* app;
    bool selftest = false;
    std::function<int()> test;
  };
  std::vector<std::unique_ptr<Group>> groups;

  auto group = [&](const std::string& name, const std::string& desc, std::function<int()> test) {
    auto g = std::make_unique<Group>();
    g->app = app.add_subcommand(name, desc);
    g->app->require_subcommand(0, 1);
    g->app->add_flag("--selftest", g->selftest, "Run this module's oracle checks");
    g->test = std::move(test);
    groups.push_back(std::move(g));
    return groups.back().get();
  };
  auto leaf = [&](Group* g, const std::string& name, const std::string& desc) {
    auto* s = g->app->add_subcommand(name, desc);
    s->add_flag("--selftest", g->selftest, "Run this module's oracle checks");
    return s;
  };
  auto add = [&](CLI::App* s, std::function<Output()> f) { leaves.emplace_back(s, std::move(f)); };

  // ---- forms ----
  auto* forms = group("forms", "Reduced binary quadratic forms", selftest_forms);
  i64 f_nmax = 100;
  auto* f_enum = leaf(forms, "enum", "Reduced forms with N = 4 det <= N_max");
  f_enum->add_option("--nmax", f_nmax, "N_max")->required();
  add(f_enum, [&] {
    Output o{"forms enum"};
    o.params["nmax"] = f_nmax;
    o.table.columns = aut_columns;
    for_each_reduced(f_nmax, [&](const QuadForm& q) { o.table.add(aut_row(q)); });
    return o;
  });
  i64 qa = 1, qb2 = 0, qc = 1;
  auto form_opts = [&](CLI::App* s) {
    s->add_option("--a", qa)->required();
    s->add_option("--b2", qb2)->required();
    s->add_option("--c", qc)->required();
  };
  auto form_params = [&](Output& o) {
    o.params["a"] = qa;
    o.params["b2"] = qb2;
    o.params["c"] = qc;
  };
  auto* f_red = leaf(forms, "reduce", "Gauss reduction with the transforming matrix");
  form_opts(f_red);
  add(f_red, [&] {
    Output o{"forms reduce"};
    form_params(o);
    const QuadForm q{qa, qb2, qc};
    require(is_positive_definite(q), "forms reduce: form must be positive definite");
    const auto r = reduce(q);
    o.table.columns = {"a", "b2", "c", "ra", "rb2", "rc", "m11", "m12", "m21", "m22"};
    o.table.add({qa, qb2, qc, r.form.a, r.form.b2, r.form.c, r.m.e11, r.m.e12, r.m.e21, r.m.e22});
    return o;
  });
  auto* f_aut = leaf(forms, "aut", "Automorphism profile of a reduced form");
  form_opts(f_aut);
  add(f_aut, [&] {
    Output o{"forms aut"};
    form_params(o);
    const QuadForm q{qa, qb2, qc};
    require(is_positive_definite(q) && is_reduced(q), "forms aut: form must be reduced");
    o.table.columns = aut_columns;
    o.table.add(aut_row(q));
    ojson ms = ojson::array();
    for (const auto& m : automorphisms(q).matrices) ms.push_back(matrix_text(m));
    o.extra["matrices"] = ms;
    return o;
  });

  // ---- classnum ----
  auto* classnum = group("classnum", "Class numbers and their partial sums", selftest_classnum);
  std::vector<std::string> c_X{"1"};
  auto* c_sum = leaf(classnum, "sum", "S(X) = sum of class numbers over D <= X");
  c_sum->add_option("--X", c_X, "X as p/q, integer or decimal (repeatable)")->required();
  add(c_sum, [&] {
    Output o{"classnum sum"};
    o.params["X"] = c_X;
    o.table.columns = {"X", "S(X)", "main_term", "error", "error_over_X34"};
    for (const auto& xs : c_X) {
      const auto [num, den] = parse_fraction(xs);
      const i64 S = class_sum(num, den);
      const double X = static_cast<double>(num) / static_cast<double>(den);
      const double main = 4.0 * pi / 9.0 * std::pow(X, 1.5) - X;
      o.table.add({xs, S, main, static_cast<double>(S) - main, (static_cast<double>(S) - main) / std::pow(X, 0.75)});
    }
    return o;
  });
  i64 c_nmax = 100;
  auto* c_table = leaf(classnum, "table", "h(N) and running sums for N <= N_max");
  c_table->add_option("--nmax", c_nmax)->required();
  add(c_table, [&] {
    Output o{"classnum table"};
    o.params["nmax"] = c_nmax;
    require(c_nmax >= 3, "classnum table: N_max must be >= 3");
    const auto h = class_number_table(c_nmax);
    o.table.columns = {"N", "h", "S"};
    i64 run = 0;
    for (i64 n = 3; n <= c_nmax; ++n) {
      run += h[static_cast<std::size_t>(n)];
      if (n % 4 == 0 || n % 4 == 3) o.table.add({n, static_cast<i64>(h[static_cast<std::size_t>(n)]), run});
    }
    return o;
  });

  // ---- heegner ----
  auto* heeg = group("heegner", "Heegner points, orbit counts and the boundary census", selftest_heegner);
  auto* h_pt = leaf(heeg, "point", "Heegner point of a form");
  form_opts(h_pt);
  add(h_pt, [&] {
    Output o{"heegner point"};
    form_params(o);
    const QuadForm q{qa, qb2, qc};
    require(is_positive_definite(q), "heegner point: form must be positive definite");
    const auto z = heegner_point(q);
    o.table.columns = {"a", "b2", "c", "x", "y"};
    o.table.add({qa, qb2, qc, z.x, z.y});
    return o;
  });
  double h_x = 0.0, h_y = 1.0;
  std::vector<double> h_X{1.0};
  i64 h_bound = 0;
  auto* h_orb = leaf(heeg, "orbit", "Count gamma in SL2(Z) with u(z, gamma z) < X");
  h_orb->add_option("--x", h_x);
  h_orb->add_option("--y", h_y)->required();
  h_orb->add_option("--X", h_X, "repeatable")->required();
  h_orb->add_option("--bound", h_bound, "entry bound (default from z and X)");
  add(h_orb, [&] {
    Output o{"heegner orbit"};
    o.params["x"] = h_x;
    o.params["y"] = h_y;
    o.params["X"] = h_X;
    o.table.columns = {"x", "y", "X", "count", "lemma_bound", "exhaustive"};
    const UpperHalfPoint z{h_x, h_y};
    for (double X : h_X) {
      const i64 b = h_bound > 0 ? h_bound : default_search_bound(z, X);
      const auto oc = count_orbit_close(z, X, b);
      o.table.add({h_x, h_y, X, oc.count, orbit_lemma_bound(z, X), static_cast<i64>(oc.exhaustive)});
    }
    return o;
  });
  double h_k = 16.0, h_eps = 0.1;
  i64 h_nmax = 0;
  bool h_summary = false;
  auto* h_cen = leaf(heeg, "census", "Forms with orbit points at u in [k^(-2-eps), k^(-1+eps)]");
  h_cen->add_option("--k", h_k)->required();
  h_cen->add_option("--eps", h_eps);
  h_cen->add_option("--nmax", h_nmax, "N_max (default 4 k^(2+eps))");
  h_cen->add_flag("--summary", h_summary, "Per-case totals instead of per-form rows");
  add(h_cen, [&] {
    Output o{"heegner census"};
    const i64 nmax = h_nmax > 0 ? h_nmax : static_cast<i64>(std::floor(4.0 * std::pow(h_k, 2.0 + h_eps)));
    o.params["k"] = h_k;
    o.params["eps"] = h_eps;
    o.params["nmax"] = nmax;
    const auto rec = boundary_census(nmax, h_k, h_eps, ctx.threads);
    o.extra["u_lo"] = rec.u_lo;
    o.extra["u_hi"] = rec.u_hi;
    o.extra["forms_scanned"] = rec.forms_scanned;
    o.extra["weighted_total"] = rec.weighted_total;
    if (h_summary) {
      o.table.columns = {"k", "eps", "nmax", "case", "count", "weighted"};
      for (auto kind : census_cases) {
        auto i = static_cast<std::size_t>(kind);
        o.table.add({h_k, h_eps, nmax, std::string(to_string(kind)), rec.counts[i], rec.weighted[i]});
      }
      o.table.add({h_k, h_eps, nmax, std::string("total"),
                   rec.counts[0] + rec.counts[1] + rec.counts[2] + rec.counts[3] + rec.counts[4],
                   rec.weighted_total});
    } else {
      o.table.columns = {"N", "a", "b2", "c", "case", "count", "u_min"};
      for (const auto& r : rec.rows)
        o.table.add({det4(r.form), r.form.a, r.form.b2, r.form.c, std::string(to_string(r.kind)), r.count, r.u_min});
    }
    return o;
  });

  // ---- hsum ----
  auto* hs = group("hsum", "Generalized Kloosterman sums H+-", selftest_hsum);
  i64 p1 = 0, p2 = 0, p4 = 1, s1 = 0, s2 = 0, s4 = 1, hc = 1, cmax = 20;
  std::string sign = "+";
  auto h_opts = [&](CLI::App* s) {
    s->add_option("--p1", p1);
    s->add_option("--p2", p2);
    s->add_option("--p4", p4);
    s->add_option("--s1", s1);
    s->add_option("--s2", s2);
    s->add_option("--s4", s4);
    s->add_option("--sign", sign)->check(CLI::IsMember({"+", "-"}));
  };
  const std::vector<std::string> h_cols = {"p1", "p2", "p4", "s1", "s2", "s4", "c", "sign", "re", "im", "modulus",
                                           "c_squared"};
  auto h_row = [&](i64 c) -> std::vector<Cell> {
    const cplx v = h_sum({p1, p2, p4}, {s1, s2, s4}, c, sign == "+" ? 1 : -1);
    return {p1, p2, p4, s1, s2, s4, c, sign, v.real(), v.imag(), std::abs(v), c * c};
  };
  auto h_params = [&](Output& o) {
    o.params["P"] = {p1, p2, p4};
    o.params["S"] = {s1, s2, s4};
    o.params["sign"] = sign;
  };
  auto* hs_eval = leaf(hs, "eval", "H+-(P, S, c) for one modulus");
  h_opts(hs_eval);
  hs_eval->add_option("--c", hc)->required();
  add(hs_eval, [&] {
    Output o{"hsum eval"};
    h_params(o);
    o.params["c"] = hc;
    o.table.columns = h_cols;
    o.table.add(h_row(hc));
    return o;
  });
  auto* hs_scan = leaf(hs, "scan", "H+-(P, S, c) for c = 1..cmax");
  h_opts(hs_scan);
  hs_scan->add_option("--cmax", cmax);
  add(hs_scan, [&] {
    Output o{"hsum scan"};
    h_params(o);
    o.params["cmax"] = cmax;
    require(cmax >= 1, "hsum scan: cmax must be >= 1");
    o.table.columns = h_cols;
    auto rows = ordered_map<std::vector<Cell>>(static_cast<std::size_t>(cmax), ctx.threads,
                                               [&](std::size_t i) { return h_row(static_cast<i64>(i) + 1); });
    for (auto& r : rows) o.table.add(std::move(r));
    return o;
  });
  i64 r_K = 8, r_cb = 2;
  double r_eps = 0.5;
  auto* hs_r2 = leaf(hs, "rank2", "Census of near-equal eigenvalue triples (T, Q, C)");
  hs_r2->add_option("--K", r_K)->required();
  hs_r2->add_option("--eps", r_eps);
  hs_r2->add_option("--cbound", r_cb);
  add(hs_r2, [&] {
    Output o{"hsum rank2"};
    o.params["K"] = r_K;
    o.params["eps"] = r_eps;
    o.params["cbound"] = r_cb;
    const auto rc = rank2_census(r_K, r_eps, r_cb, ctx.threads);
    o.table.columns = {"K", "eps", "cbound", "scanned", "close", "max_axcz", "max_aybz", "max_adetz", "max_cnorm",
                       "max_acxz", "mean_axcz", "mean_aybz", "mean_adetz", "mean_acxz"};
    o.table.add({r_K, r_eps, r_cb, rc.triples_scanned, rc.triples_close, rc.max_axcz, rc.max_aybz, rc.max_adetz,
                 rc.max_cnorm, rc.max_acxz, rc.mean_axcz, rc.mean_aybz, rc.mean_adetz, rc.mean_acxz});
    return o;
  });

  // ---- bessel ----
  auto* bes = group("bessel", "Half-integer Bessel functions and their identities", selftest_bessel);
  double b_nu = 0.5;
  std::vector<double> b_x{1.0};
  auto* b_eval = leaf(bes, "eval", "J_nu(x) for half-odd-integer nu");
  b_eval->add_option("--nu", b_nu)->required();
  b_eval->add_option("--x", b_x, "repeatable")->required();
  add(b_eval, [&] {
    Output o{"bessel eval"};
    o.params["nu"] = b_nu;
    o.table.columns = {"nu", "x", "J"};
    for (double x : b_x) o.table.add({b_nu, x, bessel_j(b_nu, x)});
    return o;
  });
  int b_k = 6;
  double b_s1 = 2.0, b_s2 = 2.0, b_alpha = pi / 6.0;
  auto* b_id = leaf(bes, "identity", "Product of two J against its t-integral representation");
  b_id->add_option("--k", b_k)->required();
  b_id->add_option("--s1", b_s1)->required();
  b_id->add_option("--s2", b_s2)->required();
  b_id->add_option("--alpha", b_alpha)->required();
  add(b_id, [&] {
    Output o{"bessel identity"};
    o.params["k"] = b_k;
    o.params["s1"] = b_s1;
    o.params["s2"] = b_s2;
    o.params["alpha"] = b_alpha;
    const auto r = product_identity_gap(make_order(b_k), b_s1, b_s2, b_alpha);
    o.table.columns = {"k", "s1", "s2", "alpha", "lhs", "rhs", "gap", "tail_error"};
    o.table.add({static_cast<i64>(b_k), b_s1, b_s2, b_alpha, r.lhs, r.rhs, std::abs(r.lhs - r.rhs), r.tail_error});
    return o;
  });
  double b_K = 50.0;
  std::vector<double> b_ax{625.0};
  auto* b_avg = leaf(bes, "avgsum", "Window-averaged sum of i^k J_{k-3/2}(x)");
  b_avg->add_option("--K", b_K)->required();
  b_avg->add_option("--x", b_ax, "repeatable")->required();
  add(b_avg, [&] {
    Output o{"bessel avgsum"};
    o.params["K"] = b_K;
    o.params["window"] = "bump";
    const auto win = bump_window(b_K);
    o.table.columns = {"K", "x", "re", "im", "abs", "x_invhalf_bound"};
    for (double x : b_ax) {
      const cplx s = averaged_bessel_sum(win, x);
      o.table.add({b_K, x, s.real(), s.imag(), std::abs(s), 10.0 / std::sqrt(x)});
    }
    return o;
  });

  // ---- kernel ----
  auto* ker = group("kernel", "Gamma-factor kernel, cutoff V and spectral moment", selftest_kernel);
  std::vector<int> k_ks{10};
  auto* k_dup = leaf(ker, "dup", "c_k directly and through the duplication formula");
  k_dup->add_option("--k", k_ks, "repeatable")->required();
  add(k_dup, [&] {
    Output o{"kernel dup"};
    o.params["k"] = k_ks;
    o.table.columns = {"k", "log_ck", "log_ck_dup", "rel_err"};
    for (int k : k_ks) {
      const long double a = log_c_k(k), b = log_c_k_duplication(k);
      o.table.add({static_cast<i64>(k), static_cast<double>(a), static_cast<double>(b),
                   static_cast<double>(std::fabs(std::expm1(b - a)))});
    }
    return o;
  });
  int k_k = 64;
  double k_t = 0.0, k_tau = 0.0;
  auto* k_gauss = leaf(ker, "gauss", "Exact Gamma product against its Gaussian model");
  k_gauss->add_option("--k", k_k)->required();
  k_gauss->add_option("--t", k_t);
  k_gauss->add_option("--tau", k_tau);
  add(k_gauss, [&] {
    Output o{"kernel gauss"};
    o.params["k"] = k_k;
    o.params["t"] = k_t;
    o.params["tau"] = k_tau;
    const double err = gaussian_approx_error(k_k, k_t, k_tau);
    const double model = gaussian_model(k_k, k_t, k_tau);
    const double exact = std::exp(static_cast<double>(log_kernel_product(k_k, k_t, k_tau, 0.0L).real()));
    o.table.columns = {"k", "t", "tau", "exact", "gaussian", "rel_err"};
    o.table.add({static_cast<i64>(k_k), k_t, k_tau, exact, model, err});
    return o;
  });
  double k_x1 = 1.0, k_x2 = 1.0, k_tol = 1e-10;
  int k_halvings = 8;
  auto* k_v = leaf(ker, "v", "Cutoff V(x1, x2, tau, k)");
  k_v->add_option("--k", k_k)->required();
  k_v->add_option("--x1", k_x1)->required();
  k_v->add_option("--x2", k_x2)->required();
  k_v->add_option("--tau", k_tau);
  k_v->add_option("--tol", k_tol);
  k_v->add_option("--max-halvings", k_halvings)->check(CLI::Range(0, 16));
  add(k_v, [&] {
    Output o{"kernel v"};
    QuadSpec spec;
    spec.tol = k_tol;
    spec.max_halvings = k_halvings;
    const auto r = cutoff_v(k_x1, k_x2, k_tau, k_k, spec);
    o.params["k"] = k_k;
    o.params["x1"] = k_x1;
    o.params["x2"] = k_x2;
    o.params["tau"] = k_tau;
    o.params["tol"] = k_tol;
    o.extra["cutoffs"] = {{"sigma", r.sigma}, {"h", r.h}, {"t_max", r.t_max}, {"v_max", r.v_max}};
    o.table.columns = {"x1", "x2", "tau", "k", "V", "sigma", "h", "quad_error", "tail_estimate"};
    o.table.add({k_x1, k_x2, k_tau, static_cast<i64>(k_k), r.value, r.sigma, r.h, r.quad_error, r.tail_estimate});
    return o;
  });
  double k_x = 1.0;
  auto* k_kap = leaf(ker, "kappa0", "kappa(0) at x");
  k_kap->add_option("--k", k_k)->required();
  k_kap->add_option("--x", k_x)->required();
  add(k_kap, [&] {
    Output o{"kernel kappa0"};
    const auto r = kappa0(k_x, k_k, true, 1e-10, ctx.threads);
    o.params["k"] = k_k;
    o.params["x"] = k_x;
    o.extra["cutoffs"] = {{"h_tau", r.h_tau}, {"tau_max", r.tau_max}, {"h_inner", r.h_inner}};
    o.table.columns = {"x", "k", "kappa0"};
    o.table.add({k_x, static_cast<i64>(k_k), r.value});
    return o;
  });
  auto* k_mom = leaf(ker, "moment", "Spectral moment and its ratio to k^3/pi^2");
  k_mom->add_option("--k", k_k)->required();
  add(k_mom, [&] {
    Output o{"kernel moment"};
    const auto r = spectral_moment(k_k);
    o.params["k"] = k_k;
    o.extra["cutoffs"] = {{"h_t", r.h_t}, {"h_tau", r.h_tau}, {"t_max", r.t_max}};
    o.table.columns = {"k", "moment", "moment_over_k3_pi2"};
    o.table.add({static_cast<i64>(k_k), r.value, r.normalized});
    return o;
  });

  // ---- series ----
  auto* ser = group("series", "Class-number Dirichlet series and the assembled constants", selftest_series);
  double v_re = 0.5, v_im = 0.0, s_X = 1e6;
  i64 s_xcut = 1000000;
  auto* s_l = leaf(ser, "l", "L(v): partial sum (tail-corrected when Re v > 0) and continuation");
  s_l->add_option("--v-re", v_re)->required();
  s_l->add_option("--v-im", v_im);
  s_l->add_option("--X", s_X, "partial-sum cutoff in D");
  s_l->add_option("--X-cut", s_xcut, "continuation cutoff in D");
  add(s_l, [&] {
    Output o{"series l"};
    o.params["v_re"] = v_re;
    o.params["v_im"] = v_im;
    o.params["X"] = s_X;
    o.params["X_cut"] = s_xcut;
    const cplx v(v_re, v_im);
    cplx part = l_partial(v, s_X);
    if (v_re > 0.0) part += l_partial_tail(v, s_X);
    const cplx cont = l_continued(v, s_xcut);
    const cplx probe = v * cont;
    o.table.columns = {"v_re", "v_im", "L_partial", "L_partial_im", "L_continued", "L_continued_im",
                       "residue_probe", "residue_probe_im"};
    o.table.add({v_re, v_im, part.real(), part.imag(), cont.real(), cont.imag(), probe.real(), probe.imag()});
    return o;
  });
  auto* s_res = leaf(ser, "residue", "v L(v) against pi/3 for v = 1e-2, 1e-3, 1e-4");
  s_res->add_option("--X-cut", s_xcut);
  add(s_res, [&] {
    Output o{"series residue"};
    o.params["X_cut"] = s_xcut;
    o.table.columns = {"v", "v_times_L", "deviation"};
    for (double v : {1e-2, 1e-3, 1e-4}) {
      const double p = (v * l_continued(v, s_xcut)).real();
      o.table.add({v, p, p - pi / 3.0});
    }
    return o;
  });
  double s_K = 256.0;
  auto bundle_json = [](const ConstantBundle& b) {
    return ojson{{"C0", b.C0},
                 {"C1", b.C1},
                 {"Ltilde0", b.Ltilde0},
                 {"D_const", b.D_const},
                 {"C_final", b.C_final},
                 {"omega", b.omega},
                 {"omega_prime", b.omega_prime},
                 {"provenance",
                  {{"X_cut", b.X_cut},
                   {"C0_digamma_k", 1e6},
                   {"C0_digamma", b.C0_digamma},
                   {"C1_richardson", b.C1_richardson},
                   {"Ltilde0_tail_bound", b.Ltilde0_tail_bound},
                   {"window", "bump"}}}};
  };
  auto* s_const = leaf(ser, "constants", "C0, C1, L~(0), D and C for the bump window");
  s_const->add_option("--X-cut", s_xcut);
  s_const->add_option("--K", s_K);
  add(s_const, [&] {
    Output o{"series constants"};
    o.params["X_cut"] = s_xcut;
    o.params["K"] = s_K;
    const auto b = constants_bundle(bump_window(s_K), s_xcut);
    o.extra["bundle"] = bundle_json(b);
    o.table.columns = {"name", "value"};
    for (auto& [name, val] : std::vector<std::pair<std::string, double>>{{"C0", b.C0},
                                                                          {"C1", b.C1},
                                                                          {"Ltilde0", b.Ltilde0},
                                                                          {"D_const", b.D_const},
                                                                          {"C_final", b.C_final},
                                                                          {"omega", b.omega},
                                                                          {"omega_prime", b.omega_prime},
                                                                          {"C1_richardson", b.C1_richardson},
                                                                          {"Ltilde0_tail_bound", b.Ltilde0_tail_bound}})
      o.table.add({name, val});
    return o;
  });
  auto* s_pred = leaf(ser, "predict", "4 log K + C against the weighted k-sum");
  s_pred->add_option("--K", s_K)->required();
  s_pred->add_option("--X-cut", s_xcut);
  add(s_pred, [&] {
    Output o{"series predict"};
    o.params["K"] = s_K;
    o.params["X_cut"] = s_xcut;
    const auto win = bump_window(s_K);
    const auto b = constants_bundle(win, s_xcut);
    const auto p = diag_main_prediction(win, b, s_K);
    o.extra["bundle"] = bundle_json(b);
    o.table.columns = {"K", "formula", "k_sum", "difference", "em_sum", "em_half_integral", "em_bound"};
    o.table.add({s_K, p.formula, p.k_sum, p.k_sum - p.formula, p.em.sum, p.em.half_integral, p.em.bound});
    return o;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (auto& [sub, fn] : leaves) {
      if (!sub->parsed()) continue;
      for (auto& g : groups)
        if (g->selftest && g->app->parsed()) return g->test();
      emit(ctx, fn());
      return 0;
    }
    for (auto& g : groups) {
      if (!g->app->parsed()) continue;
      if (g->selftest) return g->test();
      std::cerr << g->app->help();
      return 1;
    }
  } catch (const precondition_error& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 2;
  } catch (const tolerance_error& e) {
    std::cerr << "tolerance failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
