#include "crnzero/network.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "crnzero/errors.hpp"

namespace crnzero {

double Kinetics::theta(double y) const { return std::pow(std::abs(y), exponent); }

double Kinetics::rho(double y) const {
  if (y <= 0.0) return -std::numeric_limits<double>::infinity();
  return exponent * std::log(y);
}

double Kinetics::rho_inverse(double s) const { return std::exp(s / exponent); }

double Kinetics::rho_integral(double r) const {
  if (r == 0.0) return exponent;
  return exponent * (r * std::log(r) - r + 1.0);
}

Vector Kinetics::rho(const Vector& x) const {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) out[i] = rho(x[i]);
  return out;
}

namespace {

std::vector<std::string> default_names(const char* prefix, Index count) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i + 1));
  return names;
}

void require_nonnegative(const Matrix& m, const char* what) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j)) || m(i, j) < 0.0) {
        throw StructureError(std::string(what) + " has a negative or non-finite entry at (" +
                             std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace

Network::Network(std::vector<std::string> species_names,
                 std::vector<std::string> complex_names, Matrix rates,
                 Matrix complexes, Kinetics kinetics)
    : species_(std::move(species_names)),
      complex_names_(std::move(complex_names)),
      a_(std::move(rates)),
      b_(std::move(complexes)),
      kinetics_(kinetics) {
  const Index m = b_.cols();
  if (m == 0 || b_.rows() == 0) throw StructureError("network needs at least one species and one complex");
  if (a_.rows() != m || a_.cols() != m) throw StructureError("rate matrix must be m x m");
  if (static_cast<Index>(species_.size()) != b_.rows()) throw StructureError("species name count mismatch");
  if (static_cast<Index>(complex_names_.size()) != m) throw StructureError("complex name count mismatch");
  require_nonnegative(a_, "rate matrix");
  require_nonnegative(b_, "complex matrix");
  if (!(kinetics_.exponent > 0.0) || !std::isfinite(kinetics_.exponent)) {
    throw StructureError("kinetics exponent must be a positive real");
  }
}

Network::Network(Matrix rates, Matrix complexes, Kinetics kinetics)
    : Network(default_names("X", complexes.rows()), default_names("c", complexes.cols()),
              rates, complexes, kinetics) {}

bool operator==(const Network& lhs, const Network& rhs) {
  return lhs.species_ == rhs.species_ && lhs.complex_names_ == rhs.complex_names_ &&
         lhs.a_ == rhs.a_ && lhs.b_ == rhs.b_ &&
         lhs.kinetics_.exponent == rhs.kinetics_.exponent;
}

bool strongly_connected(const Matrix& rates) {
  const Index m = rates.rows();
  auto reach_all = [&](bool reversed) {
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    std::vector<Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const Index j = stack.back();
      stack.pop_back();
      for (Index i = 0; i < m; ++i) {
        if (i == j || seen[static_cast<std::size_t>(i)]) continue;
        const double w = reversed ? rates(j, i) : rates(i, j);
        if (w > 0.0) {
          seen[static_cast<std::size_t>(i)] = 1;
          stack.push_back(i);
        }
      }
    }
    for (char s : seen) {
      if (!s) return false;
    }
    return true;
  };
  return m > 0 && reach_all(false) && reach_all(true);
}

ValidationReport validate_network(const Network& net, const ValidationOptions& opts) {
  const Matrix& b = net.complexes();
  ValidationReport report;
  report.rank_tol = opts.rank_tol;
  report.num_complexes = net.num_complexes();
  report.irreducible = strongly_connected(net.rates());
  report.rank_b = numerical_rank(b, opts.rank_tol);
  for (Index k = 0; k < b.rows(); ++k) {
    if ((b.row(k).array() == 0.0).all()) report.zero_rows.push_back(k);
    for (Index j = 0; j < b.cols(); ++j) {
      if (b(k, j) > 0.0 && b(k, j) < 1.0) report.sub_one_entries.push_back({k, j, b(k, j)});
    }
  }
  return report;
}

StoichBasis stoich_basis(const Network& net, double dependence_tol) {
  const Matrix& b = net.complexes();
  const Index m = b.cols();
  Matrix diffs(b.rows(), m - 1);
  for (Index j = 1; j < m; ++j) diffs.col(j - 1) = b.col(0) - b.col(j);
  SplitOptions opts;
  opts.dependence_tol = dependence_tol;
  return orthonormal_split(diffs, b.rows(), opts);
}

ClassDescriptor class_of(const StoichBasis& basis, const Vector& p) {
  if (p.size() != basis.ambient_dim()) throw StructureError("class anchor has wrong dimension");
  for (Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) throw StructureError("class anchor has a negative component");
  }
  return {basis.dperp_basis.transpose() * p, p};
}

ClassDescriptor class_of(const Network& net, const Vector& p) {
  return class_of(stoich_basis(net), p);
}

// --- text format ---------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s[0]);
  if (!(std::isalpha(head) || head == '_')) return false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u == '_')) return false;
  }
  return true;
}

double parse_real(std::string_view s, int line, const char* what) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && !(s[j] == ' ' || s[j] == '\t' || s[j] == '\r')) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

struct ParsedComplex {
  std::string name;
  std::map<std::size_t, double> coefficients;
};

}  // namespace

Network parse_network(std::string_view text) {
  std::vector<std::string> species;
  std::map<std::string, std::size_t, std::less<>> species_index;
  std::vector<ParsedComplex> complexes;
  std::map<std::string, std::size_t, std::less<>> complex_index;
  std::map<std::pair<std::size_t, std::size_t>, double> rates;
  double exponent = 1.0;
  bool exponent_set = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto kw_end = line.find_first_of(" \t");
    const std::string_view keyword = line.substr(0, kw_end);
    const std::string_view rest = kw_end == std::string_view::npos ? std::string_view{} : trim(line.substr(kw_end));

    if (keyword == "species") {
      const auto names = split_ws(rest);
      if (names.empty()) throw ParseError(line_no, "species line declares no names");
      for (auto name : names) {
        if (!is_identifier(name)) throw ParseError(line_no, "invalid species name '" + std::string(name) + "'");
        if (species_index.count(name)) throw ParseError(line_no, "duplicate species '" + std::string(name) + "'");
        species_index.emplace(std::string(name), species.size());
        species.emplace_back(name);
      }
    } else if (keyword == "complex") {
      const auto eq = rest.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'complex <name> = <expression>'");
      const auto cname = trim(rest.substr(0, eq));
      if (!is_identifier(cname)) throw ParseError(line_no, "invalid complex name '" + std::string(cname) + "'");
      if (complex_index.count(cname)) throw ParseError(line_no, "duplicate complex '" + std::string(cname) + "'");
      ParsedComplex cx{std::string(cname), {}};
      const auto expr = trim(rest.substr(eq + 1));
      if (expr.empty()) throw ParseError(line_no, "empty complex expression");
      if (expr != "0") {
        std::size_t start = 0;
        while (start <= expr.size()) {
          const auto plus = expr.find('+', start);
          const auto term = trim(expr.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start));
          start = plus == std::string_view::npos ? expr.size() + 1 : plus + 1;
          if (term.empty()) throw ParseError(line_no, "empty term in complex expression");
          double coef = 1.0;
          std::string_view name = term;
          if (const auto star = term.find('*'); star != std::string_view::npos) {
            coef = parse_real(term.substr(0, star), line_no, "coefficient");
            name = trim(term.substr(star + 1));
          }
          if (coef < 0.0) throw ParseError(line_no, "negative coefficient for '" + std::string(name) + "'");
          const auto it = species_index.find(name);
          if (it == species_index.end()) throw ParseError(line_no, "undeclared species '" + std::string(name) + "'");
          cx.coefficients[it->second] += coef;
          const double total = cx.coefficients[it->second];
          if (total > 0.0 && total < 1.0) {
            throw ParseError(line_no, "coefficient " + format_real(total) + " for '" + std::string(name) +
                                          "' lies in (0,1); entries must be 0 or >= 1");
          }
        }
      }
      complex_index.emplace(cx.name, complexes.size());
      complexes.push_back(std::move(cx));
    } else if (keyword == "rate") {
      const auto arrow = rest.find("->");
      const auto colon = rest.find(':');
      if (arrow == std::string_view::npos || colon == std::string_view::npos || colon < arrow) {
        throw ParseError(line_no, "expected 'rate <complex> -> <complex> : <value>'");
      }
      const auto src = trim(rest.substr(0, arrow));
      const auto dst = trim(rest.substr(arrow + 2, colon - arrow - 2));
      const auto s_it = complex_index.find(src);
      if (s_it == complex_index.end()) throw ParseError(line_no, "undeclared complex '" + std::string(src) + "'");
      const auto d_it = complex_index.find(dst);
      if (d_it == complex_index.end()) throw ParseError(line_no, "undeclared complex '" + std::string(dst) + "'");
      const double value = parse_real(rest.substr(colon + 1), line_no, "rate");
      if (!(value > 0.0)) throw ParseError(line_no, "rate must be positive");
      const auto key = std::make_pair(d_it->second, s_it->second);
      if (rates.count(key)) throw ParseError(line_no, "duplicate rate " + std::string(src) + " -> " + std::string(dst));
      rates[key] = value;
    } else if (keyword == "kinetics") {
      const auto parts = split_ws(rest);
      if (parts.size() != 2 || parts[0] != "exponent") throw ParseError(line_no, "expected 'kinetics exponent <value>'");
      if (exponent_set) throw ParseError(line_no, "kinetics exponent declared twice");
      exponent = parse_real(parts[1], line_no, "kinetics exponent");
      if (!(exponent > 0.0)) throw ParseError(line_no, "kinetics exponent must be positive");
      exponent_set = true;
    } else {
      throw ParseError(line_no, "unknown keyword '" + std::string(keyword) + "'");
    }
  }

  if (species.empty()) throw ParseError(line_no, "no species declared");
  if (complexes.empty()) throw ParseError(line_no, "no complexes declared");

  const auto n = static_cast<Index>(species.size());
  const auto m = static_cast<Index>(complexes.size());
  Matrix b = Matrix::Zero(n, m);
  std::vector<std::string> complex_names;
  for (Index j = 0; j < m; ++j) {
    const auto& cx = complexes[static_cast<std::size_t>(j)];
    complex_names.push_back(cx.name);
    for (const auto& [k, v] : cx.coefficients) b(static_cast<Index>(k), j) = v;
  }
  Matrix a = Matrix::Zero(m, m);
  for (const auto& [key, v] : rates) a(static_cast<Index>(key.first), static_cast<Index>(key.second)) = v;
  return Network(std::move(species), std::move(complex_names), std::move(a), std::move(b), Kinetics{exponent});
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open network file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string serialize_network(const Network& net) {
  std::ostringstream out;
  out << "species";
  for (const auto& s : net.species_names()) out << ' ' << s;
  out << '\n';
  const Matrix& b = net.complexes();
  for (Index j = 0; j < net.num_complexes(); ++j) {
    out << "complex " << net.complex_names()[static_cast<std::size_t>(j)] << " =";
    bool first = true;
    for (Index k = 0; k < net.num_species(); ++k) {
      if (b(k, j) == 0.0) continue;
      out << (first ? " " : " + ");
      if (b(k, j) != 1.0) out << format_real(b(k, j)) << '*';
      out << net.species_names()[static_cast<std::size_t>(k)];
      first = false;
    }
    if (first) out << " 0";
    out << '\n';
  }
  const Matrix& a = net.rates();
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) == 0.0) continue;
      out << "rate " << net.complex_names()[static_cast<std::size_t>(j)] << " -> "
          << net.complex_names()[static_cast<std::size_t>(i)] << " : " << format_real(a(i, j)) << '\n';
    }
  }
  if (net.kinetics().exponent != 1.0) out << "kinetics exponent " << format_real(net.kinetics().exponent) << '\n';
  return out.str();
}

}  // namespace crnzero
