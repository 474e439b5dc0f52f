#include "polyconvex/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pcx {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

namespace {

struct Lines {
  std::string path;
  std::vector<std::vector<std::string>> tokens;  // per line
  std::vector<int> lineno;

  [[noreturn]] void fail(size_t i, const std::string& msg) const {
    throw ParseError(path + ":" +
                     std::to_string(i < lineno.size() ? lineno[i] : 0) + ": " +
                     msg);
  }
};

Lines tokenize(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  Lines out;
  out.path = path;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream is(line);
    std::vector<std::string> toks;
    std::string t;
    while (is >> t) toks.push_back(t);
    if (toks.empty()) continue;
    out.tokens.push_back(std::move(toks));
    out.lineno.push_back(no);
  }
  return out;
}

double parse_num(const Lines& ls, size_t i, const std::string& tok) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    ls.fail(i, "expected a number, got '" + tok + "'");
  }
}

Vec parse_vec(const Lines& ls, size_t i, const std::vector<std::string>& toks,
              size_t from, size_t count) {
  if (toks.size() < from + count) ls.fail(i, "expected " + std::to_string(count) +
                                                 " coordinates");
  Vec v(static_cast<int>(count));
  for (size_t j = 0; j < count; ++j)
    v[static_cast<int>(j)] = parse_num(ls, i, toks[from + j]);
  return v;
}

std::string resolve(const std::string& base_file, const std::string& ref) {
  fs::path p(ref);
  if (p.is_absolute()) return fs::weakly_canonical(p).string();
  return fs::weakly_canonical(fs::path(base_file).parent_path() / p).string();
}

Complex::Ptr ref_complex(const Lines& ls, size_t i,
                         const std::vector<std::string>& toks,
                         const std::string& path, Workspace& ws) {
  if (toks.size() < 2) ls.fail(i, "expected a complex path");
  return load_complex(resolve(path, toks[1]), ws);
}

CombOpen parse_open(const Lines& ls, size_t i,
                    const std::vector<std::string>& toks, const Complex& cx) {
  CombOpen open;
  if (toks.size() == 2 && toks[1] == "all") return full_open(cx);
  for (size_t j = 1; j < toks.size(); ++j) {
    if (!cx.has_cell(toks[j])) ls.fail(i, "unknown cell '" + toks[j] + "'");
    open.cells.insert(toks[j]);
  }
  if (!is_upward_closed(cx, open)) ls.fail(i, "open is not upward-closed");
  return open;
}

// parses "cov x1 .. xd const c" starting at `from`
AffData parse_affdata(const Lines& ls, size_t i,
                      const std::vector<std::string>& toks, size_t from, int d) {
  if (toks.size() < from + 1 || toks[from] != "cov")
    ls.fail(i, "expected 'cov'");
  AffData a;
  a.cov = parse_vec(ls, i, toks, from + 1, d);
  size_t cpos = from + 1 + d;
  if (toks.size() < cpos + 2 || toks[cpos] != "const")
    ls.fail(i, "expected 'const <value>'");
  a.cst = parse_num(ls, i, toks[cpos + 1]);
  return a;
}

}  // namespace

Complex::Ptr load_complex(const std::string& raw_path, Workspace& ws) {
  std::string path = fs::weakly_canonical(raw_path).string();
  auto it = ws.complexes.find(path);
  if (it != ws.complexes.end()) return it->second;

  Lines ls = tokenize(path);
  if (ls.tokens.empty() || ls.tokens[0][0] != "complex")
    ls.fail(0, "expected a 'complex' header");
  int d = -1;
  Vec hyper;
  Mat metric;
  std::vector<Cell> cells;
  std::vector<std::pair<CellId, CellId>> poset;
  std::string cur;
  std::vector<Vec> cur_verts, cur_rays;
  auto flush = [&](const Lines& l, size_t i) {
    if (cur.empty()) return;
    if (cur_verts.empty()) l.fail(i, "cell '" + cur + "' has no vertices");
    cells.push_back({cur, Polyhedron(cur_verts, cur_rays)});
    cur.clear();
    cur_verts.clear();
    cur_rays.clear();
  };
  for (size_t i = 1; i < ls.tokens.size(); ++i) {
    const auto& t = ls.tokens[i];
    const std::string& kw = t[0];
    if (kw == "dim") {
      d = static_cast<int>(parse_num(ls, i, t.at(1)));
      if (d <= 0) ls.fail(i, "dimension must be positive");
    } else if (kw == "hyperplane") {
      if (d < 0) ls.fail(i, "'dim' must come before 'hyperplane'");
      hyper = parse_vec(ls, i, t, 1, d);
    } else if (kw == "metric") {
      if (d < 0) ls.fail(i, "'dim' must come before 'metric'");
      Vec m = parse_vec(ls, i, t, 1, static_cast<size_t>(d) * d);
      metric = Eigen::Map<Mat>(m.data(), d, d).transpose();
    } else if (kw == "cell") {
      flush(ls, i);
      if (t.size() < 2) ls.fail(i, "cell needs an id");
      cur = t[1];
    } else if (kw == "vertex") {
      if (cur.empty()) ls.fail(i, "'vertex' outside a cell");
      cur_verts.push_back(parse_vec(ls, i, t, 1, d));
    } else if (kw == "ray") {
      if (cur.empty()) ls.fail(i, "'ray' outside a cell");
      cur_rays.push_back(parse_vec(ls, i, t, 1, d));
    } else if (kw == "face") {
      flush(ls, i);
      if (t.size() != 3) ls.fail(i, "expected 'face <child> <parent>'");
      poset.push_back({t[1], t[2]});
    } else if (kw == "end") {
      flush(ls, i);
    } else {
      ls.fail(i, "unknown keyword '" + kw + "'");
    }
  }
  flush(ls, ls.tokens.size() - 1);
  if (d < 0) ls.fail(0, "missing 'dim'");
  if (hyper.size() == 0) ls.fail(0, "missing 'hyperplane'");
  AmbientSpace amb = metric.size() ? AmbientSpace(d, hyper, metric)
                                   : AmbientSpace(d, hyper);
  Complex::Ptr out;
  try {
    out = Complex::build(std::move(amb), std::move(cells), std::move(poset));
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
  ws.complexes[path] = out;
  return out;
}

Weight load_weight(const std::string& raw_path, Workspace& ws) {
  std::string path = fs::weakly_canonical(raw_path).string();
  Lines ls = tokenize(path);
  if (ls.tokens.empty() || ls.tokens[0][0] != "weight")
    ls.fail(0, "expected a 'weight' header");
  Weight w;
  bool open_seen = false;
  for (size_t i = 1; i < ls.tokens.size(); ++i) {
    const auto& t = ls.tokens[i];
    if (t[0] == "complex") {
      w.complex = ref_complex(ls, i, t, path, ws);
    } else if (t[0] == "k") {
      w.k = static_cast<int>(parse_num(ls, i, t.at(1)));
    } else if (t[0] == "open") {
      if (!w.complex) ls.fail(i, "'complex' must come before 'open'");
      w.open = parse_open(ls, i, t, *w.complex);
      open_seen = true;
    } else if (t[0] == "value") {
      if (!w.complex) ls.fail(i, "'complex' must come before 'value'");
      if (t.size() != 3) ls.fail(i, "expected 'value <cell> <number>'");
      if (!w.complex->has_cell(t[1])) ls.fail(i, "unknown cell '" + t[1] + "'");
      w.values[t[1]] = parse_num(ls, i, t[2]);
    } else if (t[0] == "end") {
      break;
    } else {
      ls.fail(i, "unknown keyword '" + t[0] + "'");
    }
  }
  if (!w.complex) ls.fail(0, "missing 'complex'");
  if (!open_seen) w.open = full_open(*w.complex);
  for (const auto& [id, v] : w.values) {
    (void)v;
    if (w.complex->cell_dim(id) != w.k)
      throw ParseError(path + ": value on cell '" + id +
                       "' of dimension != k");
    if (!w.open.contains(id))
      throw ParseError(path + ": value on cell '" + id + "' outside the open");
  }
  return w;
}

PAFunc load_pafunc(const std::string& raw_path, Workspace& ws) {
  std::string path = fs::weakly_canonical(raw_path).string();
  Lines ls = tokenize(path);
  if (ls.tokens.empty() || ls.tokens[0][0] != "pafunc")
    ls.fail(0, "expected a 'pafunc' header");
  Complex::Ptr cx;
  std::map<CellId, AffData> data;
  for (size_t i = 1; i < ls.tokens.size(); ++i) {
    const auto& t = ls.tokens[i];
    if (t[0] == "complex") {
      cx = ref_complex(ls, i, t, path, ws);
    } else if (t[0] == "cell") {
      if (!cx) ls.fail(i, "'complex' must come before 'cell'");
      if (t.size() < 2) ls.fail(i, "cell needs an id");
      if (!cx->has_cell(t[1])) ls.fail(i, "unknown cell '" + t[1] + "'");
      data[t[1]] = parse_affdata(ls, i, t, 2, cx->ambient().dim);
    } else if (t[0] == "end") {
      break;
    } else {
      ls.fail(i, "unknown keyword '" + t[0] + "'");
    }
  }
  if (!cx) ls.fail(0, "missing 'complex'");
  try {
    return make_pafunc(cx, std::move(data));
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

MinAffine load_minaffine(const std::string& raw_path, Workspace& ws) {
  std::string path = fs::weakly_canonical(raw_path).string();
  Lines ls = tokenize(path);
  if (ls.tokens.empty() || ls.tokens[0][0] != "minaffine")
    ls.fail(0, "expected a 'minaffine' header");
  MinAffine g;
  std::vector<AffData> global;
  for (size_t i = 1; i < ls.tokens.size(); ++i) {
    const auto& t = ls.tokens[i];
    if (t[0] == "complex") {
      g.complex = ref_complex(ls, i, t, path, ws);
    } else if (t[0] == "global") {
      if (!g.complex) ls.fail(i, "'complex' must come before 'global'");
      global.push_back(parse_affdata(ls, i, t, 1, g.complex->ambient().dim));
    } else if (t[0] == "cell") {
      if (!g.complex) ls.fail(i, "'complex' must come before 'cell'");
      if (t.size() < 2) ls.fail(i, "cell needs an id");
      if (!g.complex->has_cell(t[1])) ls.fail(i, "unknown cell '" + t[1] + "'");
      g.pieces[t[1]].push_back(
          parse_affdata(ls, i, t, 2, g.complex->ambient().dim));
    } else if (t[0] == "end") {
      break;
    } else {
      ls.fail(i, "unknown keyword '" + t[0] + "'");
    }
  }
  if (!g.complex) ls.fail(0, "missing 'complex'");
  for (const auto& id : g.complex->ids()) {
    auto& list = g.pieces[id];
    list.insert(list.end(), global.begin(), global.end());
    if (list.empty())
      throw ParseError(path + ": cell '" + id + "' has no pieces");
  }
  return g;
}

Combo load_combo(const std::string& raw_path, Workspace& ws) {
  std::string path = fs::weakly_canonical(raw_path).string();
  Lines ls = tokenize(path);
  if (ls.tokens.empty() || ls.tokens[0][0] != "combo")
    ls.fail(0, "expected a 'combo' header");
  Combo c;
  Complex::Ptr cx;
  for (size_t i = 1; i < ls.tokens.size(); ++i) {
    const auto& t = ls.tokens[i];
    if (t[0] == "complex") {
      cx = ref_complex(ls, i, t, path, ws);
    } else if (t[0] == "center" || t[0] == "point") {
      if (!cx) ls.fail(i, "'complex' must come before points");
      if (t.size() < 2) ls.fail(i, "expected a carrier id");
      if (!cx->has_cell(t[1])) ls.fail(i, "unknown cell '" + t[1] + "'");
      Point p{t[1], parse_vec(ls, i, t, 2, cx->ambient().dim)};
      if (t[0] == "center")
        c.center = std::move(p);
      else
        c.points.push_back(std::move(p));
    } else if (t[0] == "coeffs") {
      for (size_t j = 1; j < t.size(); ++j)
        c.coeffs.push_back(parse_num(ls, i, t[j]));
    } else if (t[0] == "end") {
      break;
    } else {
      ls.fail(i, "unknown keyword '" + t[0] + "'");
    }
  }
  if (!cx) ls.fail(0, "missing 'complex'");
  return c;
}

BalancedWitness load_witness(const std::string& raw_path, Workspace& ws) {
  std::string path = fs::weakly_canonical(raw_path).string();
  Lines ls = tokenize(path);
  if (ls.tokens.empty() || ls.tokens[0][0] != "witness")
    ls.fail(0, "expected a 'witness' header");
  BalancedWitness w;
  w.weight.k = -1;
  for (size_t i = 1; i < ls.tokens.size(); ++i) {
    const auto& t = ls.tokens[i];
    if (t[0] == "complex") {
      w.complex = ref_complex(ls, i, t, path, ws);
      w.weight.complex = w.complex;
    } else if (t[0] == "tau") {
      if (t.size() != 2) ls.fail(i, "expected 'tau <cell>'");
      w.tau = t[1];
    } else if (t[0] == "k") {
      w.weight.k = static_cast<int>(parse_num(ls, i, t.at(1)));
      w.beta.k = w.weight.k;
    } else if (t[0] == "assign") {
      if (t.size() != 3) ls.fail(i, "expected 'assign <index> <cell>'");
      w.assign[static_cast<int>(parse_num(ls, i, t[1]))] = t[2];
    } else if (t[0] == "wvalue") {
      if (t.size() != 3) ls.fail(i, "expected 'wvalue <cell> <number>'");
      w.weight.values[t[1]] = parse_num(ls, i, t[2]);
    } else if (t[0] == "term") {
      if (t.size() < 2) ls.fail(i, "expected 'term <alpha> [fn paths...]'");
      BetaPositiveWitness::Term term;
      term.alpha = parse_num(ls, i, t[1]);
      for (size_t j = 2; j < t.size(); ++j)
        term.fns.push_back(load_pafunc(resolve(path, t[j]), ws));
      w.beta.terms.push_back(std::move(term));
    } else if (t[0] == "end") {
      break;
    } else {
      ls.fail(i, "unknown keyword '" + t[0] + "'");
    }
  }
  if (!w.complex) ls.fail(0, "missing 'complex'");
  if (w.weight.k < 0) ls.fail(0, "missing 'k'");
  w.weight.open = full_open(*w.complex);
  return w;
}

// ---------------------------------------------------------------------------
// Serializers
// ---------------------------------------------------------------------------

namespace {

void write_vec(std::ostringstream& os, const Vec& v) {
  for (int i = 0; i < v.size(); ++i) os << ' ' << format_double(v[i]);
}

}  // namespace

std::string serialize_complex(const Complex& c) {
  std::ostringstream os;
  os << "complex\n";
  os << "dim " << c.ambient().dim << "\n";
  os << "hyperplane";
  write_vec(os, c.ambient().hyperplane);
  os << "\n";
  if (!c.ambient().metric.isIdentity(0.0)) {
    os << "metric";
    for (int i = 0; i < c.ambient().metric.rows(); ++i)
      for (int j = 0; j < c.ambient().metric.cols(); ++j)
        os << ' ' << format_double(c.ambient().metric(i, j));
    os << "\n";
  }
  for (const auto& id : c.ids()) {
    os << "cell " << id << "\n";
    const Polyhedron& p = c.cell(id).poly;
    for (const Vec& v : p.vertices()) {
      os << "vertex";
      write_vec(os, v);
      os << "\n";
    }
    for (const Vec& r : p.rays_with_lines()) {
      os << "ray";
      write_vec(os, r);
      os << "\n";
    }
  }
  for (const auto& [a, b] : c.poset_pairs()) os << "face " << a << ' ' << b << "\n";
  os << "end\n";
  return os.str();
}

std::string serialize_weight(const Weight& w, const std::string& complex_ref) {
  std::ostringstream os;
  os << "weight\n";
  os << "complex " << complex_ref << "\n";
  os << "k " << w.k << "\n";
  if (w.open == full_open(*w.complex)) {
    os << "open all\n";
  } else {
    os << "open";
    for (const auto& id : w.open.cells) os << ' ' << id;
    os << "\n";
  }
  for (const auto& [id, v] : w.values)
    os << "value " << id << ' ' << format_double(v) << "\n";
  os << "end\n";
  return os.str();
}

std::string serialize_pafunc(const PAFunc& f, const std::string& complex_ref) {
  std::ostringstream os;
  os << "pafunc\n";
  os << "complex " << complex_ref << "\n";
  for (const auto& [id, a] : f.data) {
    os << "cell " << id << " cov";
    write_vec(os, a.cov);
    os << " const " << format_double(a.cst) << "\n";
  }
  os << "end\n";
  return os.str();
}

std::string serialize_combo(const Combo& c, const std::string& complex_ref) {
  std::ostringstream os;
  os << "combo\n";
  os << "complex " << complex_ref << "\n";
  os << "center " << c.center.carrier;
  write_vec(os, c.center.coords);
  os << "\n";
  for (const auto& p : c.points) {
    os << "point " << p.carrier;
    write_vec(os, p.coords);
    os << "\n";
  }
  os << "coeffs";
  for (double v : c.coeffs) os << ' ' << format_double(v);
  os << "\nend\n";
  return os.str();
}

}  // namespace pcx
