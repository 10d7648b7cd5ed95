#include "tanred/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "tanred/error.hpp"

namespace tanred {

namespace fs = std::filesystem;

ModelFormat parse_model_format(const std::string& tag) {
  if (tag == "auto") return ModelFormat::Auto;
  if (tag == "dense" || tag == "txt" || tag == "text") return ModelFormat::DenseText;
  if (tag == "mtx" || tag == "matrix-market") return ModelFormat::MatrixMarket;
  throw Error(ErrorKind::InvalidArgument, "unknown model format '" + tag + "'");
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed: " + p.string());
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot create " + p.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + p.string());
}

[[noreturn]] void parse_fail(const std::string& origin, int line, int col, const std::string& what) {
  std::ostringstream os;
  os << origin << ":" << line << ":" << col << ": " << what;
  throw Error(ErrorKind::ParseError, os.str());
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// "x", "x+yj", "x-yj", "yj", "j", "-j" (i accepted for j).
std::optional<Complex> to_complex(std::string_view s) {
  if (s.empty()) return std::nullopt;
  const char last = s.back();
  if (last != 'j' && last != 'i' && last != 'J' && last != 'I') {
    const auto re = to_double(s);
    if (!re) return std::nullopt;
    return Complex(*re, 0.0);
  }
  std::string_view body = s.substr(0, s.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string_view re_part = split == std::string_view::npos ? std::string_view{} : body.substr(0, split);
  std::string_view im_part = split == std::string_view::npos ? body : body.substr(split);
  double re = 0.0;
  if (!re_part.empty()) {
    const auto v = to_double(re_part);
    if (!v) return std::nullopt;
    re = *v;
  }
  double im = 0.0;
  if (im_part.empty() || im_part == "+") {
    im = 1.0;
  } else if (im_part == "-") {
    im = -1.0;
  } else {
    const auto v = to_double(im_part);
    if (!v) return std::nullopt;
    im = *v;
  }
  return Complex(re, im);
}

struct Token {
  std::string text;
  int line = 1;
  int col = 1;
  bool separator = false;  // '=' or ':'
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](char ch) {
    ++i;
    if (ch == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  auto is_gap = [](char ch) {
    return std::isspace(static_cast<unsigned char>(ch)) || ch == '[' || ch == ']' || ch == ',' ||
           ch == ';';
  };
  while (i < text.size()) {
    const char ch = text[i];
    if (is_gap(ch)) {
      advance(ch);
    } else if (ch == '#') {
      while (i < text.size() && text[i] != '\n') advance(text[i]);
    } else if (ch == '=' || ch == ':') {
      out.push_back({std::string(1, ch), line, col, true});
      advance(ch);
    } else {
      Token t{"", line, col, false};
      while (i < text.size() && !is_gap(text[i]) && text[i] != '#' && text[i] != '=' &&
             text[i] != ':') {
        t.text.push_back(text[i]);
        advance(text[i]);
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

struct Section {
  Token key;
  std::vector<Token> values;
};

}  // namespace

StateSpace parse_dense_text(const std::string& text, const std::string& origin) {
  const std::vector<Token> toks = tokenize(text);
  std::map<std::string, Section> sections;
  static const char* kKeys[] = {"A", "B", "C", "D", "n", "p", "q", "name", "field"};
  std::size_t i = 0;
  while (i < toks.size()) {
    const Token& key = toks[i];
    if (key.separator) parse_fail(origin, key.line, key.col, "expected a key before '" + key.text + "'");
    if (std::find(std::begin(kKeys), std::end(kKeys), key.text) == std::end(kKeys))
      parse_fail(origin, key.line, key.col, "unknown key '" + key.text + "'");
    if (i + 1 >= toks.size() || !toks[i + 1].separator)
      parse_fail(origin, key.line, key.col + static_cast<int>(key.text.size()),
                 "expected '=' or ':' after '" + key.text + "'");
    if (sections.count(key.text))
      parse_fail(origin, key.line, key.col, "duplicate key '" + key.text + "'");
    Section sec{key, {}};
    i += 2;
    while (i < toks.size() && !toks[i].separator &&
           !(i + 1 < toks.size() && toks[i + 1].separator))
      sec.values.push_back(toks[i++]);
    sections.emplace(key.text, std::move(sec));
  }

  auto scalar_int = [&](const char* k) -> std::optional<Index> {
    auto it = sections.find(k);
    if (it == sections.end()) return std::nullopt;
    const Section& s = it->second;
    if (s.values.size() != 1) parse_fail(origin, s.key.line, s.key.col, std::string(k) + " needs one value");
    const Token& v = s.values[0];
    Index out = 0;
    const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec != std::errc() || ptr != v.text.data() + v.text.size() || out < 0)
      parse_fail(origin, v.line, v.col, "expected a nonnegative integer, got '" + v.text + "'");
    return out;
  };
  auto values_of = [&](const char* k) -> std::optional<std::vector<Complex>> {
    auto it = sections.find(k);
    if (it == sections.end()) return std::nullopt;
    std::vector<Complex> vals;
    for (const Token& t : it->second.values) {
      const auto v = to_complex(t.text);
      if (!v) parse_fail(origin, t.line, t.col, "malformed number '" + t.text + "'");
      vals.push_back(*v);
    }
    return vals;
  };
  auto where = [&](const char* k) {
    auto it = sections.find(k);
    return it == sections.end() ? std::pair<int, int>{1, 1}
                                : std::pair<int, int>{it->second.key.line, it->second.key.col};
  };

  const auto a = values_of("A");
  const auto b = values_of("B");
  const auto c = values_of("C");
  const auto d = values_of("D");
  if (!a || !b || !c) parse_fail(origin, 1, 1, "model needs A, B and C");
  auto n = scalar_int("n");
  auto p = scalar_int("p");
  auto q = scalar_int("q");
  if (!n) {
    const auto root = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(a->size()))));
    if (root * root != static_cast<Index>(a->size())) {
      const auto [l, col] = where("A");
      parse_fail(origin, l, col, "A has " + std::to_string(a->size()) + " entries, not a square");
    }
    n = root;
  }
  auto infer = [&](std::optional<Index>& dim, std::size_t count, const char* k) {
    if (dim) return;
    if (*n == 0) {
      const auto [l, col] = where(k);
      parse_fail(origin, l, col, "dimensions p and q must be given when n = 0");
    }
    if (count % static_cast<std::size_t>(*n) != 0) {
      const auto [l, col] = where(k);
      parse_fail(origin, l, col, std::string(k) + " entry count is not a multiple of n");
    }
    dim = static_cast<Index>(count) / *n;
  };
  infer(q, b->size(), "B");
  infer(p, c->size(), "C");
  auto check_count = [&](const std::vector<Complex>& v, Index rows, Index cols, const char* k) {
    if (static_cast<Index>(v.size()) != rows * cols) {
      const auto [l, col] = where(k);
      std::ostringstream os;
      os << k << " has " << v.size() << " entries, expected " << rows << "x" << cols;
      parse_fail(origin, l, col, os.str());
    }
  };
  check_count(*a, *n, *n, "A");
  check_count(*b, *n, *q, "B");
  check_count(*c, *p, *n, "C");
  if (d) check_count(*d, *p, *q, "D");

  auto fill = [](const std::vector<Complex>& v, Index rows, Index cols) {
    CMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index k = 0; k < cols; ++k) m(r, k) = v[static_cast<std::size_t>(r * cols + k)];
    return m;
  };
  CMatrix am = fill(*a, *n, *n);
  CMatrix bm = fill(*b, *n, *q);
  CMatrix cm = fill(*c, *p, *n);
  CMatrix dm = d ? fill(*d, *p, *q) : CMatrix::Zero(*p, *q);

  auto fit = sections.find("field");
  if (fit != sections.end()) {
    const Section& s = fit->second;
    if (s.values.size() != 1 || (s.values[0].text != "real" && s.values[0].text != "complex"))
      parse_fail(origin, s.key.line, s.key.col, "field must be 'real' or 'complex'");
    if (s.values[0].text == "real") {
      if (!is_exactly_real(am) || !is_exactly_real(bm) || !is_exactly_real(cm) || !is_exactly_real(dm))
        parse_fail(origin, s.key.line, s.key.col, "field is real but some entry is complex");
      return StateSpace(am, bm, cm, dm, ScalarField::Real);
    }
    return StateSpace(am, bm, cm, dm, ScalarField::Complex);
  }
  return StateSpace::from_complex(am, bm, cm, dm);
}

namespace {

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

std::string fmt_complex(Complex v) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17e%+.17ej", v.real(), v.imag());
  return buf;
}

void append_matrix(std::ostringstream& os, const char* key, const CMatrix& m, bool real) {
  os << key << ":\n";
  for (Index r = 0; r < m.rows(); ++r) {
    os << " ";
    for (Index c = 0; c < m.cols(); ++c) os << ' ' << (real ? fmt_real(m(r, c).real()) : fmt_complex(m(r, c)));
    os << '\n';
  }
}

}  // namespace

std::string format_dense_text(const StateSpace& sys, const std::string& name) {
  std::ostringstream os;
  os << "# tanred dense model\n";
  if (!name.empty()) {
    std::string clean = name;
    for (char& ch : clean)
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == '#' || ch == '=' || ch == ':') ch = '_';
    os << "name: " << clean << '\n';
  }
  const bool real = sys.is_real();
  os << "field: " << (real ? "real" : "complex") << '\n';
  os << "n: " << sys.states() << "\np: " << sys.outputs() << "\nq: " << sys.inputs() << '\n';
  append_matrix(os, "A", sys.A(), real);
  append_matrix(os, "B", sys.B(), real);
  append_matrix(os, "C", sys.C(), real);
  append_matrix(os, "D", sys.D(), real);
  return os.str();
}

CMatrix read_matrix_market(const fs::path& file) {
  const std::string text = read_file(file);
  const std::string origin = file.string();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) parse_fail(origin, 1, 1, "empty file");
  ++lineno;
  std::string lower = line;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  std::istringstream hs(lower);
  std::string banner, object, layout, field, symmetry;
  hs >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix")
    parse_fail(origin, 1, 1, "missing '%%MatrixMarket matrix' header");
  if (layout != "coordinate" && layout != "array")
    parse_fail(origin, 1, 1, "unsupported layout '" + layout + "'");
  if (field != "real" && field != "double" && field != "integer" && field != "complex" && field != "pattern")
    parse_fail(origin, 1, 1, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric" &&
      symmetry != "hermitian")
    parse_fail(origin, 1, 1, "unsupported symmetry '" + symmetry + "'");
  if (layout == "array" && field == "pattern") parse_fail(origin, 1, 1, "pattern arrays are invalid");
  const bool cplx = field == "complex";

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      const auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos || out[first] == '%') continue;
      return true;
    }
    return false;
  };
  auto read_num = [&](std::istringstream& ls, const std::string& ln) {
    std::string tok;
    if (!(ls >> tok)) parse_fail(origin, lineno, static_cast<int>(ln.size()) + 1, "missing value");
    const auto v = to_double(tok);
    if (!v) parse_fail(origin, lineno, static_cast<int>(ln.find(tok)) + 1, "malformed number '" + tok + "'");
    return *v;
  };

  if (!next_data_line(line)) parse_fail(origin, lineno, 1, "missing size line");
  std::istringstream ss(line);
  long long rows = -1, cols = -1, nnz = -1;
  ss >> rows >> cols;
  if (layout == "coordinate") ss >> nnz;
  if (!ss || rows < 0 || cols < 0 || (layout == "coordinate" && nnz < 0))
    parse_fail(origin, lineno, 1, "malformed size line");
  CMatrix m = CMatrix::Zero(rows, cols);

  auto place = [&](Index r, Index c, Complex v) {
    m(r, c) += v;
    if (r == c || symmetry == "general") return;
    if (symmetry == "symmetric") m(c, r) += v;
    else if (symmetry == "skew-symmetric") m(c, r) -= v;
    else m(c, r) += std::conj(v);
  };

  if (layout == "coordinate") {
    for (long long k = 0; k < nnz; ++k) {
      if (!next_data_line(line)) parse_fail(origin, lineno + 1, 1, "fewer entries than declared");
      std::istringstream ls(line);
      long long r = 0, c = 0;
      if (!(ls >> r >> c)) parse_fail(origin, lineno, 1, "malformed entry indices");
      if (r < 1 || r > rows || c < 1 || c > cols) parse_fail(origin, lineno, 1, "entry index out of range");
      Complex v(1.0, 0.0);
      if (field != "pattern") {
        const double re = read_num(ls, line);
        const double im = cplx ? read_num(ls, line) : 0.0;
        v = Complex(re, im);
      }
      place(static_cast<Index>(r - 1), static_cast<Index>(c - 1), v);
    }
  } else {
    const bool general = symmetry == "general";
    for (Index c = 0; c < cols; ++c) {
      const Index start = general ? 0 : (symmetry == "skew-symmetric" ? c + 1 : c);
      for (Index r = start; r < rows; ++r) {
        if (!next_data_line(line)) parse_fail(origin, lineno + 1, 1, "fewer entries than declared");
        std::istringstream ls(line);
        const double re = read_num(ls, line);
        const double im = cplx ? read_num(ls, line) : 0.0;
        place(r, c, Complex(re, im));
      }
    }
  }
  return m;
}

void write_matrix_market(const CMatrix& m, bool real, const fs::path& file) {
  std::ostringstream os;
  os << "%%MatrixMarket matrix coordinate " << (real ? "real" : "complex") << " general\n";
  Index nnz = 0;
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != Complex(0.0)) ++nnz;
  os << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      const Complex v = m(r, c);
      if (v == Complex(0.0)) continue;
      os << r + 1 << ' ' << c + 1 << ' ' << fmt_real(v.real());
      if (!real) os << ' ' << fmt_real(v.imag());
      os << '\n';
    }
  }
  write_file(file, os.str());
}

namespace {

struct MtxSet {
  fs::path a, b, c;
  std::optional<fs::path> d;
};

std::optional<MtxSet> find_mtx_set(const fs::path& path) {
  auto pick = [](const std::vector<fs::path>& options) -> std::optional<fs::path> {
    for (const auto& o : options)
      if (fs::is_regular_file(o)) return o;
    return std::nullopt;
  };
  auto lookup = [&](const std::string& key) {
    std::vector<fs::path> opts;
    std::string lower(1, static_cast<char>(std::tolower(static_cast<unsigned char>(key[0]))));
    if (fs::is_directory(path)) {
      opts = {path / (key + ".mtx"), path / (lower + ".mtx")};
    } else {
      const std::string s = path.string();
      opts = {fs::path(s + "." + key + ".mtx"), fs::path(s + "_" + key + ".mtx"),
              fs::path(s + "." + lower + ".mtx"), fs::path(s + "_" + lower + ".mtx")};
    }
    return pick(opts);
  };
  const auto a = lookup("A");
  const auto b = lookup("B");
  const auto c = lookup("C");
  if (!a || !b || !c) return std::nullopt;
  return MtxSet{*a, *b, *c, lookup("D")};
}

}  // namespace

StateSpace load_model(const fs::path& path, ModelFormat format) {
  StateSpace sys;
  if (format == ModelFormat::Auto) {
    if (fs::is_regular_file(path) && path.extension() != ".mtx") format = ModelFormat::DenseText;
    else if (find_mtx_set(path)) format = ModelFormat::MatrixMarket;
    else throw Error(ErrorKind::IoError, "no model found at " + path.string());
  }
  if (format == ModelFormat::DenseText) {
    sys = parse_dense_text(read_file(path), path.string());
  } else {
    const auto set = find_mtx_set(path);
    if (!set) throw Error(ErrorKind::IoError, "no A/B/C MatrixMarket files for " + path.string());
    CMatrix a = read_matrix_market(set->a);
    CMatrix b = read_matrix_market(set->b);
    CMatrix c = read_matrix_market(set->c);
    CMatrix d = set->d ? read_matrix_market(*set->d) : CMatrix::Zero(c.rows(), b.cols());
    sys = StateSpace::from_complex(std::move(a), std::move(b), std::move(c), std::move(d));
  }
  sys.require_no_imaginary_poles();
  return sys;
}

void save_model(const StateSpace& sys, const fs::path& path, ModelFormat format) {
  switch (format) {
    case ModelFormat::DenseText:
      write_file(path, format_dense_text(sys, path.stem().string()));
      return;
    case ModelFormat::MatrixMarket: {
      const std::string s = path.string();
      write_matrix_market(sys.A(), sys.is_real(), s + ".A.mtx");
      write_matrix_market(sys.B(), sys.is_real(), s + ".B.mtx");
      write_matrix_market(sys.C(), sys.is_real(), s + ".C.mtx");
      write_matrix_market(sys.D(), sys.is_real(), s + ".D.mtx");
      return;
    }
    case ModelFormat::Auto:
      break;
  }
  throw Error(ErrorKind::InvalidArgument, "save_model needs an explicit format");
}

}  // namespace tanred
