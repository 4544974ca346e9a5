#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcad/error.hpp"
#include "pcad/inference.hpp"
#include "pcad/render.hpp"
#include "pcad/trace.hpp"

namespace pcad {

// Traces are JSON lines: a header record {"program", "latents"} followed by
// one {"name", "value"} record per latent in schema order. Doubles are
// printed in shortest round-trip form.

inline void write_trace(std::ostream& out, const SceneTrace& t) {
  out << nlohmann::json{{"program", std::string(to_string(t.program()))}, {"latents", t.size()}}.dump() << '\n';
  for (std::size_t i = 0; i < t.size(); ++i)
    out << nlohmann::json{{"name", t.schema()[i].name}, {"value", t.value(i)}}.dump() << '\n';
  if (!out) throw IoError("trace write failed");
}

namespace detail {
inline nlohmann::json parse_record(const std::string& line, std::size_t lineno) {
  try {
    auto j = nlohmann::json::parse(line);
    if (!j.is_object()) throw FormatError("line " + std::to_string(lineno) + ": expected an object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
  }
}
}  // namespace detail

/// Reads a trace and validates it against `schema`: program, latent names
/// and order, and prior support.
inline SceneTrace read_trace(std::istream& in, const SchemaPtr& schema) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next()) throw FormatError("trace: empty input");
  const auto head = detail::parse_record(line, lineno);
  if (!head.contains("program") || !head["program"].is_string()) throw FormatError("trace: missing program");
  if (parse_program(head["program"].get<std::string>()) != schema->program())
    throw FormatError("trace: program does not match the model");

  std::vector<double> values;
  while (next()) {
    const auto rec = detail::parse_record(line, lineno);
    if (!rec.contains("name") || !rec.contains("value") || !rec["value"].is_number())
      throw FormatError("trace line " + std::to_string(lineno) + ": expected name and numeric value");
    const std::size_t i = values.size();
    if (i >= schema->size()) throw FormatError("trace: more latents than the schema has");
    if (rec["name"].get<std::string>() != (*schema)[i].name)
      throw FormatError("trace line " + std::to_string(lineno) + ": expected latent '" + (*schema)[i].name + "'");
    const double v = rec["value"].get<double>();
    if (!in_support((*schema)[i].prior, v))
      throw FormatError("trace: latent '" + (*schema)[i].name + "' outside its prior support");
    values.push_back(v);
  }
  if (values.size() != schema->size()) throw FormatError("trace: missing latents");
  if (head.contains("latents") && head["latents"].get<std::size_t>() != values.size())
    throw FormatError("trace: header latent count mismatch");
  return SceneTrace(schema, std::move(values));
}

/// Program tag of a trace stream without consuming a schema.
inline Program peek_trace_program(std::istream& in) {
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) {
      const auto head = detail::parse_record(line, 1);
      if (!head.contains("program")) throw FormatError("trace: missing program");
      return parse_program(head["program"].get<std::string>());
    }
  throw FormatError("trace: empty input");
}

inline void save_trace(const std::string& path, const SceneTrace& t) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  write_trace(out, t);
}

inline SceneTrace load_trace(const std::string& path, const SchemaPtr& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_trace(in, schema);
}

inline Program peek_trace_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return peek_trace_program(in);
}

// ------------------------------------------------------------ chain logs

inline nlohmann::json to_json(const ChainRecord& r) {
  return {{"iteration", r.iteration},
          {"kernel", std::string(to_string(r.kernel))},
          {"accepted", r.accepted},
          {"log_prior", r.log_prior},
          {"log_likelihood", r.log_likelihood}};
}

inline KernelId parse_kernel(std::string_view s) {
  for (std::size_t k = 0; k < kKernelCount; ++k)
    if (kKernelNames[k] == s) return static_cast<KernelId>(k);
  throw FormatError("unknown kernel '" + std::string(s) + "'");
}

inline void write_chain_log(std::ostream& out, const std::vector<ChainRecord>& history) {
  for (const auto& r : history) out << to_json(r).dump() << '\n';
  if (!out) throw IoError("chain log write failed");
}

inline std::vector<ChainRecord> read_chain_log(std::istream& in) {
  std::vector<ChainRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto j = detail::parse_record(line, lineno);
    try {
      ChainRecord r;
      r.iteration = j.at("iteration").get<std::size_t>();
      r.kernel = parse_kernel(j.at("kernel").get<std::string>());
      r.accepted = j.at("accepted").get<bool>();
      r.log_prior = j.at("log_prior").get<double>();
      r.log_likelihood = j.at("log_likelihood").get<double>();
      out.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("chain log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// --------------------------------------------------------- render config

inline nlohmann::json to_json(const RenderConfig& c) {
  nlohmann::json view = nlohmann::json::array();
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) view.push_back(c.view(r, k));
  return {{"width", c.width},   {"height", c.height}, {"focal", c.focal},
          {"near", c.near},     {"far", c.far},       {"contour_threshold", c.contour_threshold},
          {"view", view},       {"cull_back_faces", c.cull_back_faces}};
}

inline RenderConfig render_config_from_json(const nlohmann::json& j) {
  RenderConfig c;
  try {
    c.width = j.value("width", c.width);
    c.height = j.value("height", c.height);
    c.focal = j.value("focal", c.focal);
    c.near = j.value("near", c.near);
    c.far = j.value("far", c.far);
    c.contour_threshold = j.value("contour_threshold", c.contour_threshold);
    c.cull_back_faces = j.value("cull_back_faces", c.cull_back_faces);
    if (j.contains("view")) {
      const auto& v = j["view"];
      if (!v.is_array() || v.size() != 16) throw FormatError("render config: view must have 16 entries");
      for (int r = 0; r < 4; ++r)
        for (int k = 0; k < 4; ++k) c.view(r, k) = v[static_cast<std::size_t>(r * 4 + k)].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("render config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace pcad
