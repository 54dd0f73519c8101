#include "mongeampere/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <json.hpp>

#include "mongeampere/error.hpp"

namespace mongeampere {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::invalid_input, what); }

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) bad(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) bad("unknown field '" + it.key() + "' in " + where);
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(where + " must be finite");
  return v;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<Vec2> points(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where + " must be an array of [x, y] pairs");
  std::vector<Vec2> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::vector<double> p = numbers(j[k], where + "[" + std::to_string(k) + "]");
    if (p.size() != 2) bad(where + "[" + std::to_string(k) + "] must have 2 coordinates");
    out.push_back({p[0], p[1]});
  }
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) { return json(s).dump(); }

}  // namespace

ProblemDocument parse_problem(const std::string& text, int per_edge) {
  const json doc = parse_json(text);
  only_keys(doc, {"schema_version", "domain", "boundary", "nodes", "masses", "heights"}, "problem");
  for (const char* req : {"schema_version", "domain", "boundary", "nodes"}) {
    if (!doc.contains(req)) bad(std::string("missing field '") + req + "'");
  }
  if (!doc["schema_version"].is_string()) bad("schema_version must be a string");
  const std::string version = doc["schema_version"].get<std::string>();
  if (version != "1" && version.rfind("1.", 0) != 0) bad("unsupported schema_version '" + version + "'");

  std::optional<ConvexPolygon> domain;
  try {
    domain.emplace(points(doc["domain"], "domain"));
  } catch (const Error& e) {
    bad(std::string("invalid domain: ") + e.what());
  }

  const std::vector<Vec2> nodes = points(doc["nodes"], "nodes");
  if (nodes.empty()) bad("nodes must not be empty");

  std::vector<BoundarySample> boundary;
  const json& b = doc["boundary"];
  if (!b.is_object() || !b.contains("type") || !b["type"].is_string()) bad("boundary must have a string 'type'");
  const std::string type = b["type"].get<std::string>();
  if (type == "zero") {
    only_keys(b, {"type"}, "boundary");
    for (Vec2 v : domain->vertices()) boundary.push_back({v, 0.0});
  } else if (type == "quadratic") {
    only_keys(b, {"type"}, "boundary");
    if (per_edge < 1) bad("boundary samples per edge must be >= 1");
    boundary = sample_boundary(*domain, [](Vec2 y) { return 0.5 * dot(y, y); }, per_edge);
  } else if (type == "samples") {
    only_keys(b, {"type", "samples"}, "boundary");
    if (!b.contains("samples") || !b["samples"].is_array()) bad("boundary.samples must be an array");
    for (std::size_t k = 0; k < b["samples"].size(); ++k) {
      const std::string where = "boundary.samples[" + std::to_string(k) + "]";
      const std::vector<double> s = numbers(b["samples"][k], where);
      if (s.size() != 3) bad(where + " must be [x, y, value]");
      boundary.push_back({{s[0], s[1]}, s[2]});
    }
  } else {
    bad("unknown boundary type '" + type + "'");
  }

  ProblemDocument out{{*domain, std::move(boundary), nodes, {}}, false, std::nullopt};
  if (doc.contains("masses")) {
    const json& m = doc["masses"];
    if (m.is_array()) {
      out.problem.target_masses = numbers(m, "masses");
    } else if (m.is_object()) {
      only_keys(m, {"type"}, "masses");
      if (!m.contains("type") || m["type"] != "density-one") bad("masses.type must be 'density-one'");
      out.problem.target_masses = discretize_density(*domain, [](Vec2) { return 1.0; }, nodes);
    } else {
      bad("masses must be an array or {\"type\": \"density-one\"}");
    }
    out.has_masses = true;
  } else {
    out.problem.target_masses.assign(nodes.size(), 0.0);
  }
  if (doc.contains("heights")) {
    out.heights = numbers(doc["heights"], "heights");
    if (out.heights->size() != nodes.size()) bad("heights must have one entry per node");
  }

  try {
    validate(out.problem);
  } catch (const Error& e) {
    bad(e.what());
  }
  return out;
}

std::vector<double> parse_result_heights(const std::string& text) {
  const json doc = parse_json(text);
  only_keys(doc, {"heights", "achieved_masses", "sweeps", "residual", "converged"}, "result");
  if (!doc.contains("heights")) bad("result has no 'heights'");
  return numbers(doc["heights"], "heights");
}

std::string write_result(const SolveReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("heights").array({r.solution.heights().begin(), r.solution.heights().end()});
  w.key("achieved_masses").array(r.achieved_masses);
  w.key("sweeps").value(r.sweeps_used);
  w.key("residual").value(r.final_mass_residual);
  w.key("converged").value(r.converged);
  w.end_object();
  return w.str();
}

std::string write_cells_csv(const NodalConvexFunction& f) {
  std::string out = "node_index,vx,vy\n";
  for (std::size_t i = 0; i < f.node_count(); ++i) {
    for (Vec2 v : subgradient_cell(f, i).points()) {
      out += std::to_string(i) + "," + format_double(v.x) + "," + format_double(v.y) + "\n";
    }
  }
  return out;
}

void JsonWriter::separate() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!first_.back()) out_ += ",";
  first_.back() = false;
}

JsonWriter& JsonWriter::begin_object() {
  separate();
  out_ += "{";
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  first_.pop_back();
  out_ += "}";
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
  separate();
  out_ += quote(k) + ":";
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separate();
  out_ += format_double(v);
  return *this;
}

JsonWriter& JsonWriter::value(long v) {
  separate();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separate();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  separate();
  out_ += quote(v);
  return *this;
}

JsonWriter& JsonWriter::array(const std::vector<double>& v) {
  separate();
  out_ += "[";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out_ += ",";
    out_ += format_double(v[k]);
  }
  out_ += "]";
  return *this;
}

}  // namespace mongeampere
