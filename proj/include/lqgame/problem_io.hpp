#pragma once

#include <stdexcept>
#include <string>

#include "lqgame/problem.hpp"

namespace lqgame {

/// Schema violation while reading a problem document; message carries the
/// offending field path.
class ProblemParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse a problem document (JSON text). Required fields: horizon {t0, T}
/// and dims {n, m1, m2}. Every coefficient is optional (defaults to zero)
/// and is given as {"const": [[...]]}, {"rational": [[{num, den}, ...]]} or
/// {"grid": {"times": [...], "values": [[[...]]]}}; matrices row-major.
/// Throws ProblemParseError on schema violations and std::invalid_argument
/// (with the violation list) if the parsed problem fails validation.
GameProblem parse_problem_text(const std::string& text);

/// Resolve a problem source: a reserved builtin name ("example-6.1",
/// "example-6.2", "example-6.3") or a path to a problem file.
GameProblem load_problem(const std::string& source);

/// Parse a candidate Riccati-solution spec for verify mode:
///   "const:<v>"            constant scalar (n = 1)
///   "poly:[c0,c1,...]"     polynomial in s, ascending coefficients (n = 1)
///   "rational:[n...]/[d...]" rational scalar (n = 1)
///   "file:<path>"          JSON MatrixFunction document (any n)
MatrixFunction parse_candidate_spec(const std::string& spec, Eigen::Index n);

}  // namespace lqgame
