#include "lqgame/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lqgame {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ProblemParseError("problem document: " + path + ": " + msg);
}

double expect_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::vector<double> expect_number_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(expect_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Eigen::MatrixXd expect_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                              const std::string& path) {
  // flat arrays are accepted for column vectors
  if (cols == 1 && j.is_array() && (j.empty() || j[0].is_number())) {
    const auto v = expect_number_array(j, path);
    if (static_cast<Eigen::Index>(v.size()) != rows) {
      fail(path, "expected " + std::to_string(rows) + " entries");
    }
    return Eigen::Map<const Eigen::VectorXd>(v.data(), rows);
  }
  if (!j.is_array()) fail(path, "expected a row-major matrix (array of arrays)");
  if (static_cast<Eigen::Index>(j.size()) != rows) {
    fail(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  }
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = expect_number_array(j[i], path + "[" + std::to_string(i) + "]");
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      fail(path + "[" + std::to_string(i) + "]",
           "expected " + std::to_string(cols) + " columns");
    }
    for (Eigen::Index k = 0; k < cols; ++k) out(i, k) = row[k];
  }
  return out;
}

ScalarExpr expect_scalar_expr(const json& j, const std::string& path) {
  if (j.is_number()) return ScalarExpr(j.get<double>());
  if (!j.is_object()) fail(path, "expected {num, den} or a number");
  if (!j.contains("num")) fail(path, "missing 'num'");
  auto num = expect_number_array(j["num"], path + ".num");
  std::vector<double> den{1.0};
  if (j.contains("den")) den = expect_number_array(j["den"], path + ".den");
  return ScalarExpr::rational(std::move(num), std::move(den));
}

MatrixFunction expect_matrix_function(const json& j, Eigen::Index rows, Eigen::Index cols,
                                      const std::string& path) {
  if (!j.is_object()) fail(path, "expected {const|rational|grid: ...}");
  if (j.contains("const")) {
    return MatrixFunction::constant(expect_matrix(j["const"], rows, cols, path + ".const"));
  }
  if (j.contains("rational")) {
    const json& r = j["rational"];
    if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != rows) {
      fail(path + ".rational", "expected " + std::to_string(rows) + " rows");
    }
    std::vector<ScalarExpr> entries;
    entries.reserve(static_cast<std::size_t>(rows * cols));
    for (Eigen::Index i = 0; i < rows; ++i) {
      const json& row = r[i];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        fail(path + ".rational[" + std::to_string(i) + "]",
             "expected " + std::to_string(cols) + " columns");
      }
      for (Eigen::Index k = 0; k < cols; ++k) {
        entries.push_back(expect_scalar_expr(
            row[k], path + ".rational[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
      }
    }
    return MatrixFunction::rational(rows, cols, std::move(entries));
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object() || !g.contains("times") || !g.contains("values")) {
      fail(path + ".grid", "expected {times, values}");
    }
    auto times = expect_number_array(g["times"], path + ".grid.times");
    const json& vals = g["values"];
    if (!vals.is_array() || vals.size() != times.size()) {
      fail(path + ".grid.values", "expected one matrix per time node");
    }
    std::vector<Eigen::MatrixXd> values;
    values.reserve(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
      values.push_back(
          expect_matrix(vals[i], rows, cols, path + ".grid.values[" + std::to_string(i) + "]"));
    }
    return MatrixFunction::sampled(std::move(times), std::move(values));
  }
  fail(path, "expected one of 'const', 'rational', 'grid'");
}

}  // namespace

GameProblem parse_problem_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProblemParseError(std::string("problem document: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ProblemParseError("problem document: top level must be an object");
  if (!doc.contains("horizon")) fail("horizon", "required field missing");
  if (!doc.contains("dims")) fail("dims", "required field missing");

  const json& h = doc["horizon"];
  if (!h.is_object() || !h.contains("t0") || !h.contains("T")) {
    fail("horizon", "expected {t0, T}");
  }
  Horizon horizon{expect_number(h["t0"], "horizon.t0"), expect_number(h["T"], "horizon.T")};

  const json& d = doc["dims"];
  if (!d.is_object() || !d.contains("n") || !d.contains("m1") || !d.contains("m2")) {
    fail("dims", "expected {n, m1, m2}");
  }
  Dims dims{static_cast<int>(expect_number(d["n"], "dims.n")),
            static_cast<int>(expect_number(d["m1"], "dims.m1")),
            static_cast<int>(expect_number(d["m2"], "dims.m2"))};
  if (dims.n <= 0 || dims.m1 <= 0 || dims.m2 < 0) {
    fail("dims", "need n >= 1, m1 >= 1, m2 >= 0");
  }

  GameProblem p = GameProblem::zero(horizon, dims);
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail("name", "expected a string");
    p.name = doc["name"].get<std::string>();
  }

  const auto n = dims.n, m1 = dims.m1, m2 = dims.m2;
  struct Slot {
    const char* key;
    MatrixFunction* fn;
    Eigen::Index rows, cols;
  };
  const Slot slots[] = {
      {"A", &p.A, n, n},       {"B1", &p.B1, n, m1},     {"B2", &p.B2, n, m2},
      {"C", &p.C, n, n},       {"D1", &p.D1, n, m1},     {"D2", &p.D2, n, m2},
      {"b", &p.b, n, 1},       {"sigma", &p.sigma, n, 1},
      {"Q", &p.Q, n, n},       {"S1", &p.S1, m1, n},     {"S2", &p.S2, m2, n},
      {"R11", &p.R11, m1, m1}, {"R12", &p.R12, m1, m2},  {"R21", &p.R21, m2, m1},
      {"R22", &p.R22, m2, m2}, {"q", &p.q, n, 1},        {"rho1", &p.rho1, m1, 1},
      {"rho2", &p.rho2, m2, 1},
  };
  for (const auto& s : slots) {
    if (doc.contains(s.key)) {
      *s.fn = expect_matrix_function(doc[s.key], s.rows, s.cols, s.key);
    }
  }
  if (doc.contains("G")) p.G = expect_matrix(doc["G"], n, n, "G");
  if (doc.contains("g")) p.g = expect_matrix(doc["g"], n, 1, "g");

  const ValidationReport rep = validate(p);
  if (!rep.ok()) {
    std::ostringstream os;
    os << "problem document: validation failed:";
    for (const auto& v : rep.violations) os << "\n  - " << v;
    throw std::invalid_argument(os.str());
  }
  return p;
}

GameProblem load_problem(const std::string& source) {
  if (is_builtin_problem(source)) return builtin_problem(source);
  std::ifstream in(source);
  if (!in) {
    throw ProblemParseError("load_problem: cannot open '" + source +
                            "' (not a builtin name or readable file)");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  GameProblem p = parse_problem_text(buf.str());
  if (p.name.empty()) p.name = source;
  return p;
}

MatrixFunction parse_candidate_spec(const std::string& spec, Eigen::Index n) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw ProblemParseError("candidate spec: expected '<kind>:<payload>'");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string payload = spec.substr(colon + 1);
  auto scalar_only = [&] {
    if (n != 1) {
      throw ProblemParseError("candidate spec: '" + kind +
                              "' form is scalar-only; use file: for n > 1");
    }
  };
  if (kind == "const") {
    scalar_only();
    try {
      const double v = std::stod(payload);
      return MatrixFunction::constant(Eigen::MatrixXd::Constant(1, 1, v));
    } catch (const std::exception&) {
      throw ProblemParseError("candidate spec: const payload is not a number");
    }
  }
  if (kind == "poly") {
    scalar_only();
    json arr;
    try {
      arr = json::parse(payload);
    } catch (const json::parse_error&) {
      throw ProblemParseError("candidate spec: poly payload is not a JSON array");
    }
    if (!arr.is_array() || arr.empty()) {
      throw ProblemParseError("candidate spec: poly payload must be a nonempty array");
    }
    std::vector<double> c;
    for (const auto& x : arr) {
      if (!x.is_number()) throw ProblemParseError("candidate spec: poly entries must be numbers");
      c.push_back(x.get<double>());
    }
    return MatrixFunction::rational(1, 1, {ScalarExpr::polynomial(std::move(c))});
  }
  if (kind == "rational") {
    scalar_only();
    const auto slash = payload.find('/');
    if (slash == std::string::npos) {
      throw ProblemParseError("candidate spec: rational payload must be [num]/[den]");
    }
    json jn, jd;
    try {
      jn = json::parse(payload.substr(0, slash));
      jd = json::parse(payload.substr(slash + 1));
    } catch (const json::parse_error&) {
      throw ProblemParseError("candidate spec: rational payload arrays are not valid JSON");
    }
    if (!jn.is_array() || !jd.is_array()) {
      throw ProblemParseError("candidate spec: rational payload must be two arrays");
    }
    return MatrixFunction::rational(
        1, 1,
        {ScalarExpr::rational(jn.get<std::vector<double>>(), jd.get<std::vector<double>>())});
  }
  if (kind == "file") {
    std::ifstream in(payload);
    if (!in) throw ProblemParseError("candidate spec: cannot open '" + payload + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ProblemParseError(std::string("candidate spec: file is not valid JSON: ") + e.what());
    }
    return expect_matrix_function(doc, n, n, "candidate");
  }
  throw ProblemParseError("candidate spec: unknown kind '" + kind + "'");
}

}  // namespace lqgame
