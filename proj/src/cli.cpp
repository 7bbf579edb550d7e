#include "tropgw/cli.hpp"

#include "tropgw/gwengine.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tropgw::cli {

namespace {

int max_n_guard(int fallback) {
  const char* env = std::getenv("TROPGW_MAX_N");
  if (!env) return fallback;
  try {
    return std::stoi(env);
  } catch (...) {
    return fallback;
  }
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void emit_json(std::ostream& out, const std::string& path, const nlohmann::json& j) {
  if (path.empty()) {
    out << j.dump(2) << "\n";
  } else {
    std::ofstream f(path);
    f << j.dump(2) << "\n";
  }
}

std::vector<IntVec> parse_dirs(const std::string& text, int r_hint) {
  std::vector<IntVec> dirs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    int mult = 1;
    auto xpos = item.find('x');
    std::string coords = item;
    if (xpos != std::string::npos) {
      mult = std::stoi(item.substr(xpos + 1));
      coords = item.substr(0, xpos);
    }
    std::vector<long> vals;
    std::stringstream cs(coords);
    std::string c;
    while (std::getline(cs, c, ',')) vals.push_back(std::stol(c));
    IntVec v(static_cast<Eigen::Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    for (int t = 0; t < mult; ++t) dirs.push_back(v);
  }
  if (!dirs.empty() && r_hint > 0 && dirs[0].size() != r_hint)
    throw CLI::ValidationError("direction dimension does not match the model");
  return dirs;
}

std::vector<IntVec> degree_dirs(const SurfaceModel& m, int degree, const std::string& dirs_text) {
  if (!dirs_text.empty()) return parse_dirs(dirs_text, m.r);
  if (degree < 0) throw CLI::ValidationError("need --degree or --dirs");
  std::vector<IntVec> dirs;
  if (m.name == ModelName::R1) {
    IntVec p(1), q(1);
    p(0) = 1;
    q(0) = -1;
    for (int i = 0; i < degree; ++i) {
      dirs.push_back(p);
      dirs.push_back(q);
    }
    return dirs;
  }
  if (m.name != ModelName::P2 && m.name != ModelName::Bl2P2 && m.name != ModelName::Bl3P2)
    throw CLI::ValidationError("--degree d is the plane degree; this model needs --dirs");
  IntVec e1(2), e2(2), e3(2);
  e1 << 1, 0;
  e2 << 0, 1;
  e3 << -1, -1;
  for (int i = 0; i < degree; ++i) {
    dirs.push_back(e1);
    dirs.push_back(e2);
    dirs.push_back(e3);
  }
  return dirs;
}

IntVec named_class(const SurfaceModel& m, const std::string& raw) {
  std::string name;
  for (char c : raw) name += static_cast<char>(std::tolower(c));
  if (name == "pt" || name == "point") return m.point_class();
  if (name == "fund" || name == "space") return m.fund_class();
  auto named = [&](std::initializer_list<std::pair<const char*, int>> table) -> IntVec {
    for (const auto& [key, e] : table)
      if (name == key) return m.unit_class(e);
    throw CLI::ValidationError("unknown condition class: " + raw);
  };
  if (name.size() >= 2 && name[0] == 'b' && std::isdigit(name[1]))
    return m.unit_class(std::stoi(name.substr(1)));
  switch (m.name) {
    case ModelName::P2: return named({{"line", 1}});
    case ModelName::P1xP1: return named({{"h", 1}, {"v", 2}});
    case ModelName::F1: return named({{"fiber", 1}, {"section", 2}});
    case ModelName::Bl2P2: return named({{"line", 1}, {"a", 2}, {"b", 3}});
    case ModelName::Bl3P2: return named({{"line", 1}, {"d1", 2}, {"d2", 3}, {"d3", 4}});
    default: return named({});
  }
}

// tokens separated by spaces or '*': pt, line, t2(pt), pt^3, t1(pt)^2, ...
std::vector<std::pair<int, IntVec>> parse_conditions(const SurfaceModel& m,
                                                     const std::string& text) {
  std::vector<std::pair<int, IntVec>> marks;
  std::string token;
  std::vector<std::string> tokens;
  for (char c : text + " ") {
    if (c == ' ' || c == '*') {
      if (!token.empty()) tokens.push_back(token);
      token.clear();
    } else {
      token += c;
    }
  }
  for (const std::string& tok : tokens) {
    std::string body = tok;
    int power = 1;
    auto caret = body.rfind('^');
    if (caret != std::string::npos) {
      power = std::stoi(body.substr(caret + 1));
      body = body.substr(0, caret);
    }
    int a = 0;
    if (body.size() > 2 && (body[0] == 't' || body[0] == 'T') && std::isdigit(body[1])) {
      auto open = body.find('(');
      if (open != std::string::npos && body.back() == ')') {
        a = std::stoi(body.substr(1, open - 1));
        body = body.substr(open + 1, body.size() - open - 2);
      }
    }
    IntVec cls = named_class(m, body);
    for (int i = 0; i < power; ++i) marks.emplace_back(a, cls);
  }
  return marks;
}

Partition parse_partition(int n, const std::string& text) {
  auto bar = text.find('|');
  if (bar == std::string::npos) throw CLI::ValidationError("partition needs a '|'");
  uint32_t left = 0, right = 0;
  for (char c : text.substr(0, bar)) {
    if (!std::isdigit(c)) throw CLI::ValidationError("partition labels are 1-based digits");
    left |= 1u << (c - '1');
  }
  for (char c : text.substr(bar + 1)) {
    if (!std::isdigit(c)) throw CLI::ValidationError("partition labels are 1-based digits");
    right |= 1u << (c - '1');
  }
  if ((left | right) != Partition::full_mask(n) || (left & right) != 0)
    throw CLI::ValidationError("partition must split 1.." + std::to_string(n));
  return Partition(n, left);
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

int report_suite(const SuiteReport& rep, std::ostream& out, bool json) {
  if (json) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, ok] : rep.checks) j[name] = ok;
    out << j.dump(2) << "\n";
  } else {
    for (const auto& [name, ok] : rep.checks)
      out << (ok ? "PASS " : "FAIL ") << name << "\n";
  }
  return rep.all_ok() ? 0 : 1;
}

SuiteReport fan_displacement_suite(ModelName name, uint64_t seed) {
  SuiteReport rep;
  SurfaceModel m = build_surface_model(name);
  for (size_t e = 0; e < m.basis.size(); ++e)
    for (size_t f = e; f < m.basis.size(); ++f) {
      WeightedComplex diag = m.basis[e].diagonal_intersection(m.basis[f]);
      bool ok = true;
      for (int t = 0; t < 20 && ok; ++t) {
        WeightedComplex fd =
            fan_displacement_product(m.basis[e], m.basis[f], m.theta, seed + 977 * t);
        ok = (diag.is_empty() && fd.is_empty()) || fd.equals_up_to_refinement(diag);
      }
      rep.checks.emplace_back(model_to_string(name) + " basis " + std::to_string(e) + "." +
                                  std::to_string(f),
                              ok);
    }
  return rep;
}

SuiteReport models_suite() {
  SuiteReport rep;
  for (ModelName name : {ModelName::R1, ModelName::P2, ModelName::P1xP1, ModelName::F1,
                         ModelName::Bl2P2, ModelName::Bl3P2}) {
    SurfaceModel m = build_surface_model(name);
    bool sym = true, inv = true;
    for (int e = 0; e <= m.m(); ++e)
      for (int f = 0; f <= m.m(); ++f) {
        if (m.alpha(e, f) != m.alpha(f, e)) sym = false;
        Rat s = 0;
        for (int g = 0; g <= m.m(); ++g) s += m.alpha(e, g) * m.beta(g, f);
        if (s != (e == f ? Rat(1) : Rat(0))) inv = false;
      }
    rep.checks.emplace_back(model_to_string(name) + " pairing symmetric", sym);
    rep.checks.emplace_back(model_to_string(name) + " pairing invertible", inv);
  }
  return rep;
}

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact tropical intersection and enumeration toolkit"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "machine-readable JSON output");

  // ---- fan ----
  auto* fan = app.add_subcommand("fan", "weighted complex operations");
  fan->require_subcommand(1);
  std::string fan_in, fan_other, fan_fn, fan_out;
  auto* fan_check = fan->add_subcommand("check", "verify balancing");
  fan_check->add_option("-i,--input", fan_in, "complex JSON file")->required();
  auto* fan_div = fan->add_subcommand("divisor", "divisor of a PL function");
  fan_div->add_option("-i,--input", fan_in, "complex JSON file")->required();
  fan_div->add_option("-f,--function", fan_fn, "PL function JSON file")->required();
  fan_div->add_option("-o,--output", fan_out, "output file (default stdout)");
  auto* fan_int = fan->add_subcommand("intersect", "stable intersection of two cycles");
  fan_int->add_option("-i,--input", fan_in, "first complex")->required();
  fan_int->add_option("-b,--other", fan_other, "second complex")->required();
  fan_int->add_option("-o,--output", fan_out, "output file (default stdout)");
  auto* fan_rec = fan->add_subcommand("recession", "fan of asymptotic directions");
  fan_rec->add_option("-i,--input", fan_in, "complex JSON file")->required();
  fan_rec->add_option("-o,--output", fan_out, "output file (default stdout)");

  // ---- moduli ----
  auto* moduli = app.add_subcommand("moduli", "marked rational curve moduli queries");
  moduli->require_subcommand(1);
  int n = 0, dim = -1;
  std::string a_text, part_text;
  bool degree_only = false;
  auto* mod_types = moduli->add_subcommand("types", "combinatorial tree types");
  mod_types->add_option("-n", n, "number of marks")->required();
  mod_types->add_option("--dim", dim, "bounded edge count (default n-3)");
  auto* mod_psi = moduli->add_subcommand("psi-product", "product of psi divisors");
  mod_psi->add_option("-n", n, "number of marks")->required();
  mod_psi->add_option("-a", a_text, "comma-separated exponents")->required();
  mod_psi->add_flag("--degree-only", degree_only, "print only the degree");
  auto* mod_bw = moduli->add_subcommand("boundary-weight",
                                        "signs of a boundary function on a psi product");
  mod_bw->add_option("-n", n, "number of marks")->required();
  mod_bw->add_option("-a", a_text, "comma-separated exponents")->required();
  mod_bw->add_option("-p,--partition", part_text, "partition such as 12|345")->required();

  // ---- degree ----
  auto* degree = app.add_subcommand("degree", "degree fan helpers");
  degree->require_subcommand(1);
  std::string dirs_text;
  auto* deg_delta = degree->add_subcommand("delta", "recession fan of a degree");
  deg_delta->add_option("--dirs", dirs_text, "directions a,b[xk];c,d;...")->required();
  deg_delta->add_option("-o,--output", fan_out, "output file (default stdout)");
  auto* deg_fact = degree->add_subcommand("factorial", "labelling symmetry factor");
  deg_fact->add_option("--dirs", dirs_text, "directions a,b[xk];c,d;...")->required();

  // ---- invariant ----
  auto* inv = app.add_subcommand("invariant", "descendant invariants");
  inv->require_subcommand(1);
  std::string model_text = "P2", cond_text, order_text = "lex";
  int deg_int = -1;
  bool unlabelled = false, ledger = false;
  auto* inv_c = inv->add_subcommand("compute", "evaluate one invariant");
  inv_c->add_option("--model", model_text, "target model (P2, P1xP1, F1, Bl2P2, Bl3P2, R1)");
  inv_c->add_option("--degree", deg_int, "plane degree (P2, Bl2P2, Bl3P2, R1)");
  inv_c->add_option("--dirs", dirs_text, "explicit degree directions");
  inv_c->add_option("--conditions", cond_text, "e.g. \"pt^2\" or \"t1(pt) pt^3\"")->required();
  inv_c->add_flag("--unlabelled", unlabelled, "divide by the degree factorial");
  inv_c->add_option("--order", order_text, "reduction order: lex or alt");
  inv_c->add_flag("--ledger", ledger, "also print the memo ledger as JSON");

  // ---- verify ----
  auto* verify = app.add_subcommand("verify", "identity suites");
  verify->require_subcommand(1);
  uint64_t seed = 0;
  int max_n = 0;
  auto* v_fd = verify->add_subcommand("fan-displacement",
                                      "displacement rule against stable intersection");
  v_fd->add_option("--model", model_text, "target model");
  v_fd->add_option("--seed", seed, "displacement seed (default 0)");
  auto* v_fg = verify->add_subcommand("forgetful", "pull-back and push-forward identities");
  v_fg->add_option("--max-n", max_n, "largest mark count (default guard)");
  auto* v_pm = verify->add_subcommand("parmod", "parametrized moduli identities");
  v_pm->add_option("--max-n", max_n, "largest total leaf count (default guard)");
  auto* v_md = verify->add_subcommand("models", "pairing matrices of all models");
  auto* v_all = verify->add_subcommand("all", "every suite");
  v_all->add_option("--max-n", max_n, "largest mark count");
  v_all->add_option("--seed", seed, "displacement seed (default 0)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  const int abstract_guard = max_n_guard(8);
  const int embedded_guard = max_n_guard(6);

  if (fan_check->parsed()) {
    WeightedComplex x = complex_from_json(load_json(fan_in));
    auto rep = x.check_balanced();
    if (json) {
      out << nlohmann::json({{"balanced", rep.ok}}).dump(2) << "\n";
    } else {
      out << (rep.ok ? "balanced" : "not balanced") << "\n";
    }
    return rep.ok ? 0 : 1;
  }
  if (fan_div->parsed()) {
    WeightedComplex x = complex_from_json(load_json(fan_in));
    PLFunction f = plfunction_from_json(load_json(fan_fn));
    emit_json(out, fan_out, complex_to_json(x.divisor(f)));
    return 0;
  }
  if (fan_int->parsed()) {
    WeightedComplex x = complex_from_json(load_json(fan_in));
    WeightedComplex y = complex_from_json(load_json(fan_other));
    emit_json(out, fan_out, complex_to_json(x.diagonal_intersection(y)));
    return 0;
  }
  if (fan_rec->parsed()) {
    WeightedComplex x = complex_from_json(load_json(fan_in));
    emit_json(out, fan_out, complex_to_json(x.recession_fan()));
    return 0;
  }

  if (mod_types->parsed() || mod_psi->parsed() || mod_bw->parsed()) {
    if (n > abstract_guard)
      throw CLI::ValidationError("n exceeds the TROPGW_MAX_N guard (" +
                                 std::to_string(abstract_guard) + ")");
  }
  if (mod_types->parsed()) {
    if (dim < 0) dim = n - 3;
    auto types = enumerate_types(n, dim);
    if (json) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& t : types) j.push_back(tree_to_string(t));
      out << j.dump(2) << "\n";
    } else {
      for (const auto& t : types) out << tree_to_string(t) << "\n";
    }
    return 0;
  }
  if (mod_psi->parsed()) {
    std::vector<int> a = parse_ints(a_text);
    if (static_cast<int>(a.size()) != n) throw CLI::ValidationError("need n exponents");
    PsiProductFan f = psi_product(n, a);
    if (degree_only) {
      Rat deg = 0;
      for (const auto& w : f.weights) deg += Rat(w);
      deg.canonicalize();
      out << rat_to_string(deg) << "\n";
      return 0;
    }
    if (json) {
      nlohmann::json j = nlohmann::json::array();
      for (size_t i = 0; i < f.types.size(); ++i)
        j.push_back({{"type", tree_to_string(f.types[i])}, {"weight", f.weights[i].get_str()}});
      out << j.dump(2) << "\n";
    } else {
      for (size_t i = 0; i < f.types.size(); ++i)
        out << f.weights[i].get_str() << "\t" << tree_to_string(f.types[i]) << "\n";
    }
    return 0;
  }
  if (mod_bw->parsed()) {
    std::vector<int> a = parse_ints(a_text);
    if (static_cast<int>(a.size()) != n) throw CLI::ValidationError("need n exponents");
    Partition p = parse_partition(n, part_text);
    auto facets = boundary_psi_facets(n, a, p);
    if (json) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& f : facets)
        j.push_back({{"type", tree_to_string(f.type)}, {"sign", f.sign}});
      out << j.dump(2) << "\n";
    } else {
      for (const auto& f : facets)
        out << (f.sign > 0 ? "+" : (f.sign < 0 ? "-" : "0")) << "\t"
            << tree_to_string(f.type) << "\n";
    }
    return 0;
  }

  if (deg_delta->parsed()) {
    auto dirs = parse_dirs(dirs_text, 0);
    std::vector<std::pair<IntVec, int>> counted;
    for (const auto& d : dirs) counted.emplace_back(d, 1);
    emit_json(out, fan_out, complex_to_json(delta_of_degree(degree_of_directions(counted))));
    return 0;
  }
  if (deg_fact->parsed()) {
    out << degree_factorial_of_dirs(parse_dirs(dirs_text, 0)).get_str() << "\n";
    return 0;
  }

  if (inv_c->parsed()) {
    ModelName name = model_from_string(model_text);
    Engine::Order order = order_text == "alt" ? Engine::Order::Alt : Engine::Order::Lex;
    Engine eng(name, order);
    const SurfaceModel& m = eng.model();
    auto dirs = degree_dirs(m, deg_int, dirs_text);
    auto marks = parse_conditions(m, cond_text);
    InvariantKey key = make_key(name, dirs, marks, !unlabelled);
    Rat v = eng.compute(key);
    if (json) {
      nlohmann::json j = {{"value", rat_to_string(v)},
                          {"key", key_canonical_string(m, key)},
                          {"labelled", !unlabelled}};
      if (ledger) j["ledger"] = eng.ledger_json();
      out << j.dump(2) << "\n";
    } else {
      out << rat_to_string(v) << "\n";
      if (ledger) out << eng.ledger_json().dump(2) << "\n";
    }
    return 0;
  }

  if (v_fd->parsed())
    return report_suite(fan_displacement_suite(model_from_string(model_text), seed), out, json);
  if (v_fg->parsed()) {
    int top = max_n > 0 ? max_n : embedded_guard;
    SuiteReport rep;
    for (int k = 5; k <= top; ++k) {
      SuiteReport r = forgetful_pushpull_suite(k);
      for (auto& c : r.checks)
        rep.checks.emplace_back("n=" + std::to_string(k) + " " + c.first, c.second);
    }
    return report_suite(rep, out, json);
  }
  if (v_pm->parsed()) {
    int top = max_n > 0 ? max_n : 5;
    SuiteReport rep;
    IntVec e1(2), e2(2), e3(2);
    e1 << 1, 0;
    e2 << 0, 1;
    e3 << -1, -1;
    Degree plane = degree_of_directions({{e1, 1}, {e2, 1}, {e3, 1}});
    for (int k = 1; k + 3 <= top; ++k) {
      ParamSpace s;
      s.n = k;
      s.deg = plane;
      s.anchor = 0;
      SuiteReport r = map_equations_suite(s);
      for (auto& c : r.checks)
        rep.checks.emplace_back("n=" + std::to_string(k) + " " + c.first, c.second);
    }
    return report_suite(rep, out, json);
  }
  if (v_md->parsed()) return report_suite(models_suite(), out, json);
  if (v_all->parsed()) {
    SuiteReport rep;
    for (auto& c : models_suite().checks) rep.checks.push_back(c);
    for (ModelName name : {ModelName::P2, ModelName::P1xP1, ModelName::F1, ModelName::Bl2P2,
                           ModelName::Bl3P2})
      for (auto& c : fan_displacement_suite(name, seed).checks) rep.checks.push_back(c);
    int top = max_n > 0 ? max_n : embedded_guard;
    for (int k = 5; k <= top; ++k)
      for (auto& c : forgetful_pushpull_suite(k).checks)
        rep.checks.emplace_back("forgetful n=" + std::to_string(k) + " " + c.first, c.second);
    return report_suite(rep, out, json);
  }
  err << "no subcommand executed\n";
  return 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_impl(args, out, err);
  } catch (const CLI::ValidationError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const PrecondError& e) {
    err << e.what() << "\n";
    for (const auto& [label, detail] : e.report.violations)
      err << "condition " << label << ": " << detail << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tropgw::cli
