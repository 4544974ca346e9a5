#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pcad/error.hpp"
#include "pcad/prior.hpp"

namespace pcad {

struct RenderedView;

enum class Program { object, body, custom };

inline std::string_view to_string(Program p) {
  switch (p) {
    case Program::object: return "object";
    case Program::body: return "body";
    case Program::custom: return "custom";
  }
  return "custom";
}

inline Program parse_program(std::string_view s) {
  if (s == "object") return Program::object;
  if (s == "body") return Program::body;
  if (s == "custom") return Program::custom;
  throw InvalidParameter("unknown program '" + std::string(s) + "'");
}

enum class LatentKind { continuous, discrete };

struct LatentSpec {
  std::string name;
  Prior prior;
  // Affine-group label, empty when the latent belongs to no affine group.
  std::string group;
};

/// Names, priors and groups of a program's latents. Immutable and shared by
/// every trace of that program; traces only carry values.
class TraceSchema {
 public:
  TraceSchema(Program program, std::vector<LatentSpec> specs)
      : program_(program), specs_(std::move(specs)) {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      validate(specs_[i].prior);
      if (!by_name_.emplace(specs_[i].name, i).second)
        throw InvalidParameter("duplicate latent name '" + specs_[i].name + "'");
      const auto& g = specs_[i].group;
      if (g.empty()) continue;
      auto it = std::find(groups_.begin(), groups_.end(), g);
      if (it == groups_.end()) {
        groups_.push_back(g);
        members_.emplace_back();
        it = groups_.end() - 1;
      }
      members_[static_cast<std::size_t>(it - groups_.begin())].push_back(i);
    }
  }

  Program program() const { return program_; }
  std::size_t size() const { return specs_.size(); }
  const LatentSpec& operator[](std::size_t i) const { return specs_[i]; }
  const std::vector<LatentSpec>& specs() const { return specs_; }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw InvalidParameter("no latent named '" + std::string(name) + "'");
  }

  /// Affine groups in order of first appearance.
  const std::vector<std::string>& groups() const { return groups_; }

  const std::vector<std::size_t>& group_members(std::string_view group) const {
    for (std::size_t g = 0; g < groups_.size(); ++g)
      if (groups_[g] == group) return members_[g];
    throw InvalidParameter("no affine group '" + std::string(group) + "'");
  }

  LatentKind kind(std::size_t i) const {
    return is_discrete(specs_[i].prior) ? LatentKind::discrete : LatentKind::continuous;
  }

  std::vector<std::size_t> continuous_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < specs_.size(); ++i)
      if (kind(i) == LatentKind::continuous) out.push_back(i);
    return out;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(specs_.size());
    for (const auto& s : specs_) out.push_back(s.name);
    return out;
  }

 private:
  Program program_;
  std::vector<LatentSpec> specs_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::vector<std::string> groups_;
  std::vector<std::vector<std::size_t>> members_;
};

using SchemaPtr = std::shared_ptr<const TraceSchema>;

/// Read-only view of one latent in a trace.
struct LatentVar {
  std::string_view name;
  double value;
  LatentKind kind;
  const Prior* prior;
  std::string_view group;
};

/// Values of every latent of a program, with the running log prior and
/// render/likelihood caches. Any value change drops the caches.
class SceneTrace {
 public:
  SceneTrace() = default;

  SceneTrace(SchemaPtr schema, std::vector<double> values)
      : schema_(std::move(schema)), values_(std::move(values)) {
    if (!schema_) throw InvalidParameter("trace needs a schema");
    if (values_.size() != schema_->size())
      throw InvalidParameter("trace value count does not match schema");
    terms_.resize(values_.size());
    recompute_log_prior();
  }

  const TraceSchema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }
  Program program() const { return schema_->program(); }
  std::size_t size() const { return values_.size(); }

  double value(std::size_t i) const { return values_[i]; }
  double value(std::string_view name) const { return values_[schema_->index(name)]; }
  std::span<const double> values() const { return values_; }

  LatentVar latent(std::size_t i) const {
    const auto& s = (*schema_)[i];
    return {s.name, values_[i], schema_->kind(i), &s.prior, s.group};
  }

  void set_value(std::size_t i, double v) {
    if (v == values_[i]) return;
    values_[i] = v;
    const double old_term = terms_[i];
    terms_[i] = log_density((*schema_)[i].prior, v);
    if (std::isfinite(old_term) && std::isfinite(terms_[i]) && std::isfinite(log_prior_)) {
      log_prior_ += terms_[i] - old_term;
    } else {
      sum_terms();
    }
    invalidate_cache();
  }

  void set_value(std::string_view name, double v) { set_value(schema_->index(name), v); }

  double log_prior() const { return log_prior_; }

  /// Resets the running log prior to the exact sum over latents.
  void recompute_log_prior() {
    for (std::size_t i = 0; i < values_.size(); ++i)
      terms_[i] = log_density((*schema_)[i].prior, values_[i]);
    sum_terms();
  }

  const std::shared_ptr<const RenderedView>& cached_render() const { return cached_render_; }
  std::optional<double> cached_log_likelihood() const { return cached_log_likelihood_; }

  void set_cache(std::shared_ptr<const RenderedView> view, std::optional<double> log_likelihood) {
    cached_render_ = std::move(view);
    cached_log_likelihood_ = log_likelihood;
  }

  void invalidate_cache() {
    cached_render_.reset();
    cached_log_likelihood_.reset();
  }

  friend bool operator==(const SceneTrace& a, const SceneTrace& b) {
    return a.program() == b.program() && a.values_ == b.values_;
  }

 private:
  void sum_terms() {
    double s = 0.0;
    for (double t : terms_) s += t;
    log_prior_ = s;
  }

  SchemaPtr schema_;
  std::vector<double> values_;
  std::vector<double> terms_;
  double log_prior_ = 0.0;
  std::shared_ptr<const RenderedView> cached_render_;
  std::optional<double> cached_log_likelihood_;
};

/// Sum of per-latent prior log densities, computed from scratch. -inf when
/// any value is outside its prior's support.
inline double trace_log_prior(const SceneTrace& trace) {
  double s = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = log_density(trace.schema()[i].prior, trace.value(i));
    if (t == kNegInf) return kNegInf;
    s += t;
  }
  return s;
}

template <typename R>
SceneTrace sample_trace(const SchemaPtr& schema, R& rng) {
  std::vector<double> values(schema->size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = sample((*schema)[i].prior, rng);
  return SceneTrace(schema, std::move(values));
}

inline SceneTrace mean_trace(const SchemaPtr& schema) {
  std::vector<double> values(schema->size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = mean((*schema)[i].prior);
    if (is_discrete((*schema)[i].prior)) values[i] = std::round(values[i]);
  }
  return SceneTrace(schema, std::move(values));
}

}  // namespace pcad
