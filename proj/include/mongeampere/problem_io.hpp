#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mongeampere/dirichlet_solver.hpp"

namespace mongeampere {

inline constexpr const char* kSchemaVersion = "1.0";

struct ProblemDocument {
  DiracProblem problem;
  bool has_masses = false;
  std::optional<std::vector<double>> heights;
};

/// Parses the JSON problem schema. "quadratic" boundary data is sampled with
/// `per_edge` points per edge; "zero" data uses the domain vertices only.
/// Unknown fields and malformed values throw Error{Errc::invalid_input}.
ProblemDocument parse_problem(const std::string& text, int per_edge = 64);

/// Heights from a result document written by write_result().
std::vector<double> parse_result_heights(const std::string& text);

/// {heights, achieved_masses, sweeps, residual, converged}, 17 significant digits.
std::string write_result(const SolveReport& report);

/// One row "node_index,vx,vy" per cell vertex, with a header line.
std::string write_cells_csv(const NodalConvexFunction& f);

/// Minimal JSON emitter with caller-controlled field order.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(long v);
  JsonWriter& value(int v) { return value(static_cast<long>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& array(const std::vector<double>& v);
  std::string str() const { return out_ + "\n"; }

 private:
  void separate();
  std::string out_;
  std::vector<bool> first_{true};
  bool after_key_ = false;
};

}  // namespace mongeampere
