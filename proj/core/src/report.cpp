#include "tanred/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tanred/error.hpp"

namespace tanred {

using nlohmann::json;

namespace {

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw Error(ErrorKind::ParseError, "expected a number, got \"" + s + "\"");
}

json matrix_json(const CMatrix& m, bool real) {
  json re = json::array();
  json im = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      re.push_back(num(m(r, c).real()));
      if (!real) im.push_back(num(m(r, c).imag()));
    }
  }
  json out{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}};
  if (!real) out["im"] = im;
  return out;
}

CMatrix matrix_from_json(const json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const json& re = j.at("re");
  const bool has_im = j.contains("im");
  if (static_cast<Index>(re.size()) != rows * cols ||
      (has_im && static_cast<Index>(j.at("im").size()) != rows * cols))
    throw Error(ErrorKind::ParseError, "matrix entry count does not match its shape");
  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const auto k = static_cast<std::size_t>(r * cols + c);
      m(r, c) = Complex(get_num(re[k]), has_im ? get_num(j.at("im")[k]) : 0.0);
    }
  }
  return m;
}

}  // namespace

bool RunReport::operator==(const RunReport& o) const {
  if (command != o.command || config != o.config || !same(gamma0, o.gamma0) ||
      stop_reason != o.stop_reason || failure != o.failure || !same(total_seconds, o.total_seconds) ||
      trace.size() != o.trace.size() || compare.size() != o.compare.size())
    return false;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRow& a = trace[i];
    const TraceRow& b = o.trace[i];
    if (a.iter != b.iter || !same(a.omega, b.omega) || a.r_min != b.r_min || a.r_max != b.r_max ||
        a.order != b.order || !same(a.gamma, b.gamma) || !same(a.error_norm, b.error_norm) ||
        a.error_approximate != b.error_approximate || a.stable != b.stable ||
        !same(a.seconds, b.seconds))
      return false;
  }
  for (std::size_t i = 0; i < compare.size(); ++i) {
    const CompareRow& a = compare[i];
    const CompareRow& b = o.compare[i];
    if (a.order != b.order || a.tangential_order != b.tangential_order ||
        !same(a.tangential_error, b.tangential_error) || !same(a.balanced_error, b.balanced_error))
      return false;
  }
  return model.field() == o.model.field() && model.A() == o.model.A() && model.B() == o.model.B() &&
         model.C() == o.model.C() && model.D() == o.model.D();
}

std::string to_json_lines(const RunReport& r) {
  std::ostringstream os;
  json header{{"kind", "header"},    {"command", r.command},         {"config", r.config},
              {"gamma0", num(r.gamma0)}, {"stop_reason", r.stop_reason}, {"failure", r.failure}};
  os << header.dump() << '\n';
  for (const TraceRow& t : r.trace) {
    json row{{"kind", "trace"},
             {"iter", t.iter},
             {"omega", num(t.omega)},
             {"r_min", t.r_min},
             {"r_max", t.r_max},
             {"order", t.order},
             {"gamma", num(t.gamma)},
             {"error_norm", num(t.error_norm)},
             {"error_approximate", t.error_approximate},
             {"stable", t.stable},
             {"seconds", num(t.seconds)}};
    os << row.dump() << '\n';
  }
  const bool real = r.model.is_real();
  json model{{"kind", "model"},
             {"field", real ? "real" : "complex"},
             {"A", matrix_json(r.model.A(), real)},
             {"B", matrix_json(r.model.B(), real)},
             {"C", matrix_json(r.model.C(), real)},
             {"D", matrix_json(r.model.D(), real)}};
  os << model.dump() << '\n';
  for (const CompareRow& c : r.compare) {
    json row{{"kind", "compare"},
             {"order", c.order},
             {"tangential_order", c.tangential_order},
             {"tangential_error", num(c.tangential_error)},
             {"balanced_error", num(c.balanced_error)}};
    os << row.dump() << '\n';
  }
  os << json{{"kind", "timing"}, {"total_seconds", num(r.total_seconds)}}.dump() << '\n';
  return os.str();
}

RunReport from_json_lines(const std::string& text) {
  RunReport r;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "header") {
        r.command = j.at("command").get<std::string>();
        r.config = j.at("config").get<std::map<std::string, std::string>>();
        r.gamma0 = get_num(j.at("gamma0"));
        r.stop_reason = j.at("stop_reason").get<std::string>();
        r.failure = j.at("failure").get<std::string>();
      } else if (kind == "trace") {
        TraceRow t;
        t.iter = j.at("iter").get<int>();
        t.omega = get_num(j.at("omega"));
        t.r_min = j.at("r_min").get<Index>();
        t.r_max = j.at("r_max").get<Index>();
        t.order = j.at("order").get<Index>();
        t.gamma = get_num(j.at("gamma"));
        t.error_norm = get_num(j.at("error_norm"));
        t.error_approximate = j.at("error_approximate").get<bool>();
        t.stable = j.at("stable").get<bool>();
        t.seconds = get_num(j.at("seconds"));
        r.trace.push_back(t);
      } else if (kind == "model") {
        const ScalarField f =
            j.at("field").get<std::string>() == "real" ? ScalarField::Real : ScalarField::Complex;
        r.model = StateSpace(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                             matrix_from_json(j.at("C")), matrix_from_json(j.at("D")), f);
      } else if (kind == "compare") {
        CompareRow c;
        c.order = j.at("order").get<Index>();
        c.tangential_order = j.at("tangential_order").get<Index>();
        c.tangential_error = get_num(j.at("tangential_error"));
        c.balanced_error = get_num(j.at("balanced_error"));
        r.compare.push_back(c);
      } else if (kind == "timing") {
        r.total_seconds = get_num(j.at("total_seconds"));
      } else {
        throw Error(ErrorKind::ParseError, "unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, "report line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ParseError) throw;
      throw Error(ErrorKind::ParseError, "report line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return r;
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

}  // namespace

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  os << "iter,omega,r_min,r_max,order,gamma,error_norm,stable_flag,seconds\n";
  for (const TraceRow& t : rows) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.6f", t.seconds);
    os << t.iter << ',' << g17(t.omega) << ',' << t.r_min << ',' << t.r_max << ',' << t.order << ','
       << g17(t.gamma) << ',' << g17(t.error_norm) << ',' << (t.stable ? 1 : 0) << ',' << secs
       << '\n';
  }
  return os.str();
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "order,tangential_order,tangential_error,balanced_error\n";
  for (const CompareRow& c : rows)
    os << c.order << ',' << c.tangential_order << ',' << g17(c.tangential_error) << ','
       << g17(c.balanced_error) << '\n';
  return os.str();
}

}  // namespace tanred
