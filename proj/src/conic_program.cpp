#include "flexplan/conic_program.hpp"

#include <cmath>
#include <sstream>

#include "flexplan/csv.hpp"

namespace flexplan {

int ConicProgram::add_var(const std::string& name, bool binary, double lb, double ub) {
  vars.push_back({name, binary, lb, ub});
  return static_cast<int>(vars.size()) - 1;
}

namespace {

void check_terms(const LinTerms& terms, int n, const std::string& where) {
  for (const auto& [idx, coef] : terms) {
    if (idx < 0 || idx >= n) {
      throw reformulation_error("dangling variable reference in " + where);
    }
    if (!std::isfinite(coef)) throw reformulation_error("non-finite coefficient in " + where);
  }
}

}  // namespace

void ConicProgram::check() const {
  const int n = static_cast<int>(vars.size());
  check_terms(objective, n, "objective");
  for (const auto& r : rows) check_terms(r.terms, n, "row " + r.tag);
  for (const auto& s : socs) {
    check_terms(s.a, n, "soc " + s.tag);
    if (s.f_terms.size() != s.g.size()) throw reformulation_error("soc shape: " + s.tag);
    for (const auto& f : s.f_terms) check_terms(f, n, "soc " + s.tag);
  }
  for (const auto& s : rsocs) {
    check_terms(s.u, n, "rsoc " + s.tag);
    check_terms(s.v, n, "rsoc " + s.tag);
    if (s.f_terms.size() != s.g.size()) throw reformulation_error("rsoc shape: " + s.tag);
    for (const auto& f : s.f_terms) check_terms(f, n, "rsoc " + s.tag);
  }
  for (const auto& g : bit_groups) {
    if (g.total < 0 || g.total >= n) throw reformulation_error("bit group total: " + g.name);
    for (int b : g.bits) {
      if (b < 0 || b >= n || !vars[b].is_binary) {
        throw reformulation_error("bit group member must be binary: " + g.name);
      }
    }
  }
  for (const auto& l : product_links) {
    if (l.product < 0 || l.product >= n || l.scalar < 0 || l.scalar >= n || l.bit < 0 ||
        l.bit >= n || !vars[l.bit].is_binary) {
      throw reformulation_error("malformed product link");
    }
  }
}

std::vector<int> ConicProgram::binary_indices() const {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(vars.size()); ++i) {
    if (vars[i].is_binary) idx.push_back(i);
  }
  return idx;
}

double ConicProgram::objective_value(const std::vector<double>& x) const {
  double v = objective_constant;
  for (const auto& [i, c] : objective) v += c * x[i];
  return v;
}

namespace {

using csv::format_double;

void write_terms(std::ostringstream& out, const LinTerms& terms) {
  out << terms.size();
  for (const auto& [i, c] : terms) out << ' ' << i << ' ' << format_double(c);
  out << '\n';
}

LinTerms read_terms(std::istringstream& in) {
  std::size_t n;
  if (!(in >> n)) throw io_error("canonical parse: bad term count");
  LinTerms terms(n);
  for (auto& [i, c] : terms) {
    std::string val;
    if (!(in >> i >> val)) throw io_error("canonical parse: bad term");
    c = std::strtod(val.c_str(), nullptr);
  }
  return terms;
}

std::string bound_str(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return format_double(v);
}

double parse_bound(const std::string& s) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::string canonical_text(const ConicProgram& p) {
  std::ostringstream out;
  out << "conicprogram v1\n";
  out << "vars " << p.vars.size() << '\n';
  for (const auto& v : p.vars) {
    out << (v.is_binary ? "bin " : "cont ") << bound_str(v.lb) << ' ' << bound_str(v.ub) << ' '
        << v.name << '\n';
  }
  out << "objective const " << format_double(p.objective_constant) << '\n';
  write_terms(out, p.objective);
  out << "rows " << p.rows.size() << '\n';
  for (const auto& r : p.rows) {
    out << (r.kind == RowKind::Eq ? "eq " : "le ") << format_double(r.rhs) << ' ' << r.tag << '\n';
    write_terms(out, r.terms);
  }
  out << "socs " << p.socs.size() << '\n';
  for (const auto& s : p.socs) {
    out << s.f_terms.size() << ' ' << format_double(s.b) << ' ' << s.tag << '\n';
    write_terms(out, s.a);
    for (std::size_t k = 0; k < s.f_terms.size(); ++k) {
      out << format_double(s.g[k]) << '\n';
      write_terms(out, s.f_terms[k]);
    }
  }
  out << "rsocs " << p.rsocs.size() << '\n';
  for (const auto& s : p.rsocs) {
    out << s.f_terms.size() << ' ' << format_double(s.u0) << ' ' << format_double(s.v0) << ' '
        << s.tag << '\n';
    write_terms(out, s.u);
    write_terms(out, s.v);
    for (std::size_t k = 0; k < s.f_terms.size(); ++k) {
      out << format_double(s.g[k]) << '\n';
      write_terms(out, s.f_terms[k]);
    }
  }
  out << "bitgroups " << p.bit_groups.size() << '\n';
  for (const auto& g : p.bit_groups) {
    out << g.name << ' ' << g.total << ' ' << g.bits.size();
    for (int b : g.bits) out << ' ' << b;
    out << '\n';
  }
  out << "productlinks " << p.product_links.size() << '\n';
  for (const auto& l : p.product_links) {
    out << l.product << ' ' << l.bit << ' ' << l.scalar << '\n';
  }
  out << "end\n";
  return out.str();
}

ConicProgram parse_canonical(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(lines, line)) throw io_error("canonical parse: unexpected end");
    return line;
  };

  if (next_line() != "conicprogram v1") throw io_error("canonical parse: bad magic");
  ConicProgram p;

  {
    std::istringstream h(next_line());
    std::string kw;
    std::size_t n;
    h >> kw >> n;
    if (kw != "vars") throw io_error("canonical parse: expected vars");
    p.vars.resize(n);
    for (auto& v : p.vars) {
      std::istringstream vl(next_line());
      std::string kind, lb, ub;
      vl >> kind >> lb >> ub;
      std::getline(vl, v.name);
      if (!v.name.empty() && v.name[0] == ' ') v.name.erase(0, 1);
      v.is_binary = (kind == "bin");
      v.lb = parse_bound(lb);
      v.ub = parse_bound(ub);
    }
  }
  {
    std::istringstream h(next_line());
    std::string kw, kc, val;
    h >> kw >> kc >> val;
    if (kw != "objective") throw io_error("canonical parse: expected objective");
    p.objective_constant = std::strtod(val.c_str(), nullptr);
    std::istringstream t(next_line());
    p.objective = read_terms(t);
  }
  {
    std::istringstream h(next_line());
    std::string kw;
    std::size_t n;
    h >> kw >> n;
    if (kw != "rows") throw io_error("canonical parse: expected rows");
    p.rows.resize(n);
    for (auto& r : p.rows) {
      std::istringstream rl(next_line());
      std::string kind, rhs;
      rl >> kind >> rhs;
      std::getline(rl, r.tag);
      if (!r.tag.empty() && r.tag[0] == ' ') r.tag.erase(0, 1);
      r.kind = (kind == "eq") ? RowKind::Eq : RowKind::Le;
      r.rhs = std::strtod(rhs.c_str(), nullptr);
      std::istringstream t(next_line());
      r.terms = read_terms(t);
    }
  }
  {
    std::istringstream h(next_line());
    std::string kw;
    std::size_t n;
    h >> kw >> n;
    if (kw != "socs") throw io_error("canonical parse: expected socs");
    p.socs.resize(n);
    for (auto& s : p.socs) {
      std::istringstream sl(next_line());
      std::size_t m;
      std::string b;
      sl >> m >> b;
      std::getline(sl, s.tag);
      if (!s.tag.empty() && s.tag[0] == ' ') s.tag.erase(0, 1);
      s.b = std::strtod(b.c_str(), nullptr);
      std::istringstream t(next_line());
      s.a = read_terms(t);
      s.g.resize(m);
      s.f_terms.resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        s.g[k] = std::strtod(next_line().c_str(), nullptr);
        std::istringstream ft(next_line());
        s.f_terms[k] = read_terms(ft);
      }
    }
  }
  {
    std::istringstream h(next_line());
    std::string kw;
    std::size_t n;
    h >> kw >> n;
    if (kw != "rsocs") throw io_error("canonical parse: expected rsocs");
    p.rsocs.resize(n);
    for (auto& s : p.rsocs) {
      std::istringstream sl(next_line());
      std::size_t m;
      std::string u0, v0;
      sl >> m >> u0 >> v0;
      std::getline(sl, s.tag);
      if (!s.tag.empty() && s.tag[0] == ' ') s.tag.erase(0, 1);
      s.u0 = std::strtod(u0.c_str(), nullptr);
      s.v0 = std::strtod(v0.c_str(), nullptr);
      std::istringstream ut(next_line());
      s.u = read_terms(ut);
      std::istringstream vt(next_line());
      s.v = read_terms(vt);
      s.g.resize(m);
      s.f_terms.resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        s.g[k] = std::strtod(next_line().c_str(), nullptr);
        std::istringstream ft(next_line());
        s.f_terms[k] = read_terms(ft);
      }
    }
  }
  {
    std::istringstream h(next_line());
    std::string kw;
    std::size_t n;
    h >> kw >> n;
    if (kw != "bitgroups") throw io_error("canonical parse: expected bitgroups");
    p.bit_groups.resize(n);
    for (auto& g : p.bit_groups) {
      std::istringstream gl(next_line());
      std::size_t nb;
      gl >> g.name >> g.total >> nb;
      g.bits.resize(nb);
      for (auto& b : g.bits) gl >> b;
    }
  }
  {
    std::istringstream h(next_line());
    std::string kw;
    std::size_t n;
    h >> kw >> n;
    if (kw != "productlinks") throw io_error("canonical parse: expected productlinks");
    p.product_links.resize(n);
    for (auto& l : p.product_links) {
      std::istringstream ll(next_line());
      ll >> l.product >> l.bit >> l.scalar;
    }
  }
  if (next_line() != "end") throw io_error("canonical parse: expected end");
  p.check();
  return p;
}

}  // namespace flexplan
