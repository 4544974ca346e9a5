#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcad/error.hpp"
#include "pcad/kde.hpp"
#include "pcad/likelihood.hpp"
#include "pcad/random.hpp"
#include "pcad/scene_model.hpp"
#include "pcad/trace.hpp"

namespace pcad {

// ------------------------------------------------------------------ targets

/// Anything that scores a trace against data. The chain's target density is
/// exp(log_likelihood(trace)) times the trace prior.
template <typename T>
concept Target = requires(T& t, const SceneTrace& s) {
  { t.log_likelihood(s) } -> std::convertible_to<double>;
};

/// Comparator stub: constant likelihood, so the posterior is the prior.
struct FlatTarget {
  double log_likelihood(const SceneTrace&) const { return 0.0; }
};

/// Render the trace, compare its contours with the observation.
class ImageTarget {
 public:
  ImageTarget(const SceneModel& model, RenderConfig cfg, std::shared_ptr<const ObservationImage> obs, double sigma0)
      : model_(&model), cfg_(std::move(cfg)), obs_(std::move(obs)), sigma0_(sigma0) {
    cfg_.validate();
    if (!obs_) throw InvalidParameter("image target needs an observation");
    if (obs_->width() != cfg_.width || obs_->height() != cfg_.height)
      throw InvalidParameter("observation size does not match render size");
    if (!(sigma0_ > 0.0)) throw InvalidParameter("sigma0 must be positive");
  }

  double log_likelihood(const SceneTrace& trace) const {
    const RenderedView view = render_view(trace, *model_, cfg_);
    if (view.on_count == 0) return kEmptyRenderLogLikelihood;
    return pcad::log_likelihood(*obs_, view, sigma0_);
  }

  /// Chamfer distance of the trace's render; +inf for an empty render.
  double distance(const SceneTrace& trace) const {
    const RenderedView view = render_view(trace, *model_, cfg_);
    if (view.on_count == 0) return std::numeric_limits<double>::infinity();
    return chamfer(*obs_, view);
  }

  const SceneModel& model() const { return *model_; }
  const RenderConfig& render_config() const { return cfg_; }
  const ObservationImage& observation() const { return *obs_; }
  double sigma0() const { return sigma0_; }

 private:
  const SceneModel* model_;
  RenderConfig cfg_;
  std::shared_ptr<const ObservationImage> obs_;
  double sigma0_;
};

// ------------------------------------------------------------------ kernels

enum class KernelId : int { single = 0, block = 1, data = 2, hmc = 3 };
inline constexpr std::size_t kKernelCount = 4;
inline constexpr std::array<std::string_view, kKernelCount> kKernelNames = {"single", "block", "data", "hmc"};

inline std::string_view to_string(KernelId k) { return kKernelNames[static_cast<std::size_t>(k)]; }

struct HmcSettings {
  double step_size = 0.02;  // in unit coordinates (prior range = 1)
  int leapfrog_steps = 5;
  double fd_step = 1e-3;  // finite-difference step, fraction of prior range
  // Named latent blocks; each step moves one block chosen uniformly. Empty
  // means the program default (see default_hmc_blocks).
  std::vector<std::vector<std::string>> blocks;
};

struct BlockSettings {
  // Non-affine latents resampled together with an affine group.
  std::map<std::string, std::vector<std::string>> coupled;
};

struct DataSettings {
  std::size_t neighbors = 10;  // K
  double bandwidth_floor = 1e-6;  // fraction of each latent's prior range
  // Latents proposed from the KDE; empty means the placement group.
  std::vector<std::string> latents;
};

/// Mixture weights of the four kernels plus their tuning.
struct KernelMixture {
  double single = 0.5;
  double block = 0.2;
  double data = 0.1;
  double hmc = 0.2;
  HmcSettings hmc_settings;
  BlockSettings block_settings;
  DataSettings data_settings;

  std::array<double, kKernelCount> weights() const { return {single, block, data, hmc}; }

  void validate() const {
    const auto w = weights();
    for (double a : w)
      if (!(a >= 0.0)) throw InvalidParameter("kernel weights must be non-negative");
    const double sum = w[0] + w[1] + w[2] + w[3];
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidParameter("kernel weights must sum to 1");
    if (hmc > 0.0 && (hmc_settings.leapfrog_steps < 0 || !(hmc_settings.step_size > 0.0) ||
                      !(hmc_settings.fd_step > 0.0)))
      throw InvalidParameter("bad HMC settings");
    if (data > 0.0 && data_settings.neighbors == 0) throw InvalidParameter("data kernel needs K >= 1");
  }

  /// Weights rescaled to sum to 1; the data weight is dropped when no
  /// proposal index is available.
  KernelMixture normalized(bool has_index) const {
    KernelMixture m = *this;
    if (!has_index) m.data = 0.0;
    const double sum = m.single + m.block + m.data + m.hmc;
    if (!(sum > 0.0)) throw InvalidParameter("all kernel weights are zero");
    m.single /= sum;
    m.block /= sum;
    m.data /= sum;
    m.hmc /= sum;
    return m;
  }
};

struct KernelStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  std::size_t failed = 0;  // errors or non-finite values, counted as rejections
};

struct ScorePoint {
  std::size_t iteration = 0;
  double log_posterior = 0.0;
};

struct ChainState {
  SceneTrace trace;
  double log_likelihood = 0.0;
  std::size_t iteration = 0;
  std::array<KernelStats, kKernelCount> stats{};
  std::vector<ScorePoint> scores;

  double log_posterior() const { return log_likelihood + trace.log_prior(); }
};

template <Target T>
ChainState init_chain(SceneTrace trace, T& target) {
  ChainState s;
  s.log_likelihood = target.log_likelihood(trace);
  s.trace = std::move(trace);
  return s;
}

struct Proposal {
  SceneTrace trace;
  double log_likelihood = 0.0;
};

struct StepOutcome {
  bool accepted = false;
  bool failed = false;
  double energy_error = std::numeric_limits<double>::quiet_NaN();  // HMC only
};

/// Metropolis-Hastings log acceptance probability for target
/// likelihood x prior:
/// min(0, [ll' + lp' + log q(S'->S)] - [ll + lp + log q(S->S')]).
inline double log_acceptance(double log_lik, double log_prior, double log_lik_new, double log_prior_new,
                             double log_q_forward, double log_q_reverse) {
  if (log_prior_new == kNegInf || std::isnan(log_lik_new)) return kNegInf;
  const double r = (log_lik_new + log_prior_new + log_q_reverse) - (log_lik + log_prior + log_q_forward);
  if (std::isnan(r)) return kNegInf;
  return std::min(0.0, r);
}

template <typename R>
bool accept(ChainState& state, Proposal&& proposed, double log_q_forward, double log_q_reverse, R& rng) {
  const double la = log_acceptance(state.log_likelihood, state.trace.log_prior(), proposed.log_likelihood,
                                   proposed.trace.log_prior(), log_q_forward, log_q_reverse);
  const bool ok = la >= 0.0 || (la > kNegInf && std::log(uniform01(rng)) < la);
  if (ok) {
    state.trace = std::move(proposed.trace);
    state.log_likelihood = proposed.log_likelihood;
  }
  return ok;
}

namespace detail {
template <Target T>
std::optional<double> try_log_likelihood(T& target, const SceneTrace& trace) {
  try {
    const double ll = target.log_likelihood(trace);
    if (std::isnan(ll)) return std::nullopt;
    return ll;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}
}  // namespace detail

/// Resimulates one latent chosen uniformly. Continuous latents are drawn
/// from their prior (independence proposal; prior terms cancel in the
/// ratio); discrete latents get a Gibbs update by enumerating their support.
template <Target T, typename R>
StepOutcome step_single(ChainState& state, T& target, R& rng) {
  const std::size_t n = state.trace.size();
  if (n == 0) throw InvalidParameter("trace has no latents");
  const auto i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  const Prior& prior = state.trace.schema()[i].prior;

  if (const auto* d = std::get_if<DiscreteUniform>(&prior)) {
    std::vector<double> logp;
    std::vector<Proposal> options;
    for (int v = d->lo; v <= d->hi; ++v) {
      Proposal p{state.trace, 0.0};
      p.trace.set_value(i, v);
      const auto ll = detail::try_log_likelihood(target, p.trace);
      p.log_likelihood = ll.value_or(kNegInf);
      logp.push_back(p.log_likelihood + p.trace.log_prior());
      options.push_back(std::move(p));
    }
    const double top = *std::max_element(logp.begin(), logp.end());
    if (!std::isfinite(top)) return {false, true};
    double total = 0.0;
    for (auto& lp : logp) total += (lp = std::exp(lp - top));
    double u = uniform01(rng) * total;
    std::size_t pick = 0;
    while (pick + 1 < logp.size() && u >= logp[pick]) u -= logp[pick++];
    state.trace = std::move(options[pick].trace);
    state.log_likelihood = options[pick].log_likelihood;
    return {true, false};
  }

  const double old_value = state.trace.value(i);
  const double new_value = sample(prior, rng);
  Proposal p{state.trace, 0.0};
  p.trace.set_value(i, new_value);
  const auto ll = detail::try_log_likelihood(target, p.trace);
  if (!ll) return {false, true};
  p.log_likelihood = *ll;
  const bool ok = accept(state, std::move(p), log_density(prior, new_value), log_density(prior, old_value), rng);
  return {ok, false};
}

/// Jointly resimulates every latent in `block` from its prior, one
/// accept/reject for the whole block.
template <Target T, typename R>
StepOutcome step_block_indices(ChainState& state, T& target, const std::vector<std::size_t>& block, R& rng) {
  Proposal p{state.trace, 0.0};
  double log_q_forward = 0.0, log_q_reverse = 0.0;
  for (auto i : block) {
    const Prior& prior = state.trace.schema()[i].prior;
    const double x = sample(prior, rng);
    log_q_reverse += log_density(prior, state.trace.value(i));
    log_q_forward += log_density(prior, x);
    p.trace.set_value(i, x);
  }
  const auto ll = detail::try_log_likelihood(target, p.trace);
  if (!ll) return {false, true};
  p.log_likelihood = *ll;
  return {accept(state, std::move(p), log_q_forward, log_q_reverse, rng), false};
}

/// Affine groups plus their configured coupled latents, resolved to indices.
inline std::vector<std::vector<std::size_t>> resolve_blocks(const TraceSchema& schema, const BlockSettings& s) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& g : schema.groups()) {
    auto members = schema.group_members(g);
    if (auto it = s.coupled.find(g); it != s.coupled.end())
      for (const auto& name : it->second) {
        const auto idx = schema.index(name);
        if (std::find(members.begin(), members.end(), idx) == members.end()) members.push_back(idx);
      }
    out.push_back(std::move(members));
  }
  return out;
}

template <Target T, typename R>
StepOutcome step_block(ChainState& state, T& target, const std::vector<std::vector<std::size_t>>& blocks, R& rng) {
  if (blocks.empty()) throw InvalidParameter("block kernel needs at least one affine group");
  const auto b = std::uniform_int_distribution<std::size_t>(0, blocks.size() - 1)(rng);
  return step_block_indices(state, target, blocks[b], rng);
}

template <Target T, typename R>
StepOutcome step_block(ChainState& state, T& target, const BlockSettings& settings, R& rng) {
  return step_block(state, target, resolve_blocks(state.trace.schema(), settings), rng);
}

// --------------------------------------------------------------------- HMC

/// Blocks of continuous latents HMC may move. Objects: the placement and
/// both GP bandwidths as one block. Bodies: the global placement only.
inline std::vector<std::vector<std::string>> default_hmc_blocks(const TraceSchema& schema) {
  std::vector<std::vector<std::string>> blocks;
  if (schema.program() == Program::object) {
    std::vector<std::string> b;
    for (auto i : schema.group_members(kPlacementGroup)) b.push_back(schema[i].name);
    b.push_back("L1");
    b.push_back("L2");
    blocks.push_back(std::move(b));
    return blocks;
  }
  if (schema.program() == Program::body) {
    std::vector<std::string> b;
    for (auto i : schema.group_members(kPlacementGroup)) b.push_back(schema[i].name);
    blocks.push_back(std::move(b));
    return blocks;
  }
  std::vector<std::string> all;
  for (auto i : schema.continuous_indices()) all.push_back(schema[i].name);
  blocks.push_back(std::move(all));
  return blocks;
}

inline std::vector<std::vector<std::size_t>> resolve_hmc_blocks(const TraceSchema& schema, const HmcSettings& s) {
  const auto names = s.blocks.empty() ? default_hmc_blocks(schema) : s.blocks;
  std::vector<std::vector<std::size_t>> out;
  for (const auto& block : names) {
    std::vector<std::size_t> idx;
    for (const auto& n : block) {
      const auto i = schema.index(n);
      if (schema.kind(i) != LatentKind::continuous) throw InvalidParameter("HMC latent '" + n + "' is discrete");
      idx.push_back(i);
    }
    if (!idx.empty()) out.push_back(std::move(idx));
  }
  return out;
}

/// Potential energy -log posterior as a function of the unit coordinates of
/// a latent block; every evaluation renders through the target.
template <Target T>
class BlockPotential {
 public:
  BlockPotential(const SceneTrace& base, const std::vector<std::size_t>& block, T& target, double fd_step)
      : scratch_(base), block_(block), target_(&target), fd_step_(fd_step) {
    for (auto i : block_) maps_.push_back(unit_map(base.schema()[i].prior));
  }

  std::size_t dimension() const { return block_.size(); }
  const UnitMap& map(std::size_t d) const { return maps_[d]; }

  std::vector<double> to_unit(const SceneTrace& t) const {
    std::vector<double> u(block_.size());
    for (std::size_t d = 0; d < u.size(); ++d) u[d] = maps_[d].to_unit(t.value(block_[d]));
    return u;
  }

  void load(std::span<const double> u) {
    for (std::size_t d = 0; d < u.size(); ++d) scratch_.set_value(block_[d], maps_[d].from_unit(u[d]));
  }

  /// -log posterior at u; last_log_likelihood() holds the likelihood term.
  double operator()(std::span<const double> u) {
    load(u);
    const double lp = scratch_.log_prior();
    if (lp == kNegInf) return std::numeric_limits<double>::infinity();
    const auto ll = detail::try_log_likelihood(*target_, scratch_);
    if (!ll) return std::numeric_limits<double>::quiet_NaN();
    last_ll_ = *ll;
    return -(*ll + lp);
  }

  double last_log_likelihood() const { return last_ll_; }
  const SceneTrace& scratch() const { return scratch_; }

  /// Central differences, shrunk to one side at the unit bounds.
  std::vector<double> gradient(std::span<const double> u) {
    std::vector<double> g(u.size());
    std::vector<double> probe(u.begin(), u.end());
    for (std::size_t d = 0; d < u.size(); ++d) {
      double hi = u[d] + fd_step_, lo = u[d] - fd_step_;
      if (maps_[d].bounded) {
        hi = std::min(hi, 1.0);
        lo = std::max(lo, 0.0);
      }
      probe[d] = hi;
      const double uh = (*this)(probe);
      probe[d] = lo;
      const double ul = (*this)(probe);
      probe[d] = u[d];
      g[d] = (uh - ul) / (hi - lo);
    }
    return g;
  }

 private:
  SceneTrace scratch_;
  const std::vector<std::size_t>& block_;
  T* target_;
  double fd_step_;
  std::vector<UnitMap> maps_;
  double last_ll_ = 0.0;
};

namespace detail {
// Keeps bounded unit coordinates in [0, 1] by reflection, flipping momentum.
inline void reflect(double& u, double& p) {
  for (int guard = 0; guard < 64 && (u < 0.0 || u > 1.0); ++guard) {
    if (u > 1.0) u = 2.0 - u;
    if (u < 0.0) u = -u;
    p = -p;
  }
}

inline bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}
}  // namespace detail

/// One HMC transition on `block`: unit-mass leapfrog in unit coordinates
/// with finite-difference gradients, reflection at bounded prior edges and
/// an exact Metropolis correction on the Hamiltonian.
template <Target T, typename R>
StepOutcome step_hmc_block(ChainState& state, T& target, const std::vector<std::size_t>& block,
                           const HmcSettings& s, R& rng) {
  BlockPotential<T> potential(state.trace, block, target, s.fd_step);
  std::vector<double> u = potential.to_unit(state.trace);
  const std::size_t dim = u.size();
  std::vector<double> p(dim);
  for (auto& v : p) v = standard_normal(rng);

  const double u0 = -state.log_posterior();
  double k0 = 0.0;
  for (double v : p) k0 += 0.5 * v * v;

  double u1 = u0;
  double ll1 = state.log_likelihood;
  if (s.leapfrog_steps > 0) {
    const double eps = s.step_size;
    auto g = potential.gradient(u);
    if (!detail::all_finite(g)) return {false, true};
    for (std::size_t d = 0; d < dim; ++d) p[d] -= 0.5 * eps * g[d];
    for (int l = 0; l < s.leapfrog_steps; ++l) {
      for (std::size_t d = 0; d < dim; ++d) {
        u[d] += eps * p[d];
        if (potential.map(d).bounded) detail::reflect(u[d], p[d]);
      }
      g = potential.gradient(u);
      if (!detail::all_finite(g)) return {false, true};
      const double scale = (l + 1 == s.leapfrog_steps) ? 0.5 : 1.0;
      for (std::size_t d = 0; d < dim; ++d) p[d] -= scale * eps * g[d];
    }
    u1 = potential(u);
    if (!std::isfinite(u1)) return {false, true};
    ll1 = potential.last_log_likelihood();
  }

  double k1 = 0.0;
  for (double v : p) k1 += 0.5 * v * v;
  const double dh = (u1 + k1) - (u0 + k0);
  StepOutcome out;
  out.energy_error = dh;
  out.accepted = dh <= 0.0 || std::log(uniform01(rng)) < -dh;
  if (out.accepted && s.leapfrog_steps > 0) {
    potential.load(u);
    state.trace = potential.scratch();
    state.log_likelihood = ll1;
  }
  return out;
}

template <Target T, typename R>
StepOutcome step_hmc(ChainState& state, T& target, const std::vector<std::vector<std::size_t>>& blocks,
                     const HmcSettings& s, R& rng) {
  if (blocks.empty()) throw InvalidParameter("HMC needs at least one continuous latent");
  const auto b = std::uniform_int_distribution<std::size_t>(0, blocks.size() - 1)(rng);
  return step_hmc_block(state, target, blocks[b], s, rng);
}

template <Target T, typename R>
StepOutcome step_hmc(ChainState& state, T& target, const HmcSettings& s, R& rng) {
  return step_hmc(state, target, resolve_hmc_blocks(state.trace.schema(), s), s, rng);
}

// -------------------------------------------------------------- data-driven

/// Observation-conditioned independence proposal over a subset of latents:
/// a KDE fit to the latents of the nearest stored samples.
struct DataProposal {
  std::vector<std::size_t> latents;  // trace indices, KDE dimension order
  Kde kde;

  std::vector<double> current(const SceneTrace& t) const {
    std::vector<double> v(latents.size());
    for (std::size_t d = 0; d < v.size(); ++d) v[d] = t.value(latents[d]);
    return v;
  }
};

template <Target T, typename R>
StepOutcome step_data(ChainState& state, T& target, const DataProposal& q, R& rng) {
  const auto x = q.kde.sample(rng);
  const double log_q_forward = q.kde.log_density(x);
  const double log_q_reverse = q.kde.log_density(q.current(state.trace));
  Proposal p{state.trace, 0.0};
  for (std::size_t d = 0; d < x.size(); ++d) p.trace.set_value(q.latents[d], x[d]);
  if (p.trace.log_prior() == kNegInf) {
    (void)accept(state, std::move(p), log_q_forward, log_q_reverse, rng);
    return {false, false};
  }
  const auto ll = detail::try_log_likelihood(target, p.trace);
  if (!ll) return {false, true};
  p.log_likelihood = *ll;
  return {accept(state, std::move(p), log_q_forward, log_q_reverse, rng), false};
}

// -------------------------------------------------------------------- chain

struct ChainRecord {
  std::size_t iteration = 0;
  KernelId kernel = KernelId::single;
  bool accepted = false;
  double log_prior = 0.0;
  double log_likelihood = 0.0;
};

struct ChainResult {
  ChainState state;
  std::vector<ChainRecord> history;
  SceneTrace map_trace;
  double map_log_posterior = kNegInf;
  double map_log_likelihood = kNegInf;
};

/// Kernel bookkeeping resolved against one schema.
struct KernelPlan {
  std::array<double, kKernelCount> weights{};
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::vector<std::size_t>> hmc_blocks;
  HmcSettings hmc;

  KernelPlan(const TraceSchema& schema, const KernelMixture& mixture) : weights(mixture.weights()), hmc(mixture.hmc_settings) {
    mixture.validate();
    if (weights[1] > 0.0) {
      blocks = resolve_blocks(schema, mixture.block_settings);
      if (blocks.empty()) throw InvalidParameter("block kernel weighted but trace has no affine group");
    }
    if (weights[3] > 0.0) {
      hmc_blocks = resolve_hmc_blocks(schema, mixture.hmc_settings);
      if (hmc_blocks.empty()) throw InvalidParameter("HMC weighted but no continuous latents selected");
    }
  }

  template <typename R>
  KernelId choose(R& rng) const {
    double u = uniform01(rng);
    for (std::size_t k = 0; k < kKernelCount; ++k) {
      if (weights[k] <= 0.0) continue;
      if (u < weights[k]) return static_cast<KernelId>(k);
      u -= weights[k];
    }
    for (std::size_t k = kKernelCount; k-- > 0;)
      if (weights[k] > 0.0) return static_cast<KernelId>(k);
    return KernelId::single;
  }
};

/// One mixture transition: pick a kernel by weight and apply it.
template <Target T, typename R>
KernelId mixture_step(ChainState& state, T& target, const KernelPlan& plan, const DataProposal* data, R& rng,
                      StepOutcome* outcome = nullptr) {
  const KernelId k = plan.choose(rng);
  StepOutcome o;
  switch (k) {
    case KernelId::single: o = step_single(state, target, rng); break;
    case KernelId::block: o = step_block(state, target, plan.blocks, rng); break;
    case KernelId::data:
      if (!data) throw InvalidParameter("data kernel weighted but no proposal index loaded");
      o = step_data(state, target, *data, rng);
      break;
    case KernelId::hmc: o = step_hmc(state, target, plan.hmc_blocks, plan.hmc, rng); break;
  }
  auto& st = state.stats[static_cast<std::size_t>(k)];
  ++st.proposed;
  st.accepted += o.accepted;
  st.failed += o.failed;
  if (outcome) *outcome = o;
  return k;
}

/// Runs `iterations` mixture transitions from `initial`, recording the
/// per-iteration log posterior and the best (MAP) state visited.
template <Target T, typename R>
ChainResult run_chain(SceneTrace initial, T& target, const KernelMixture& mixture, std::size_t iterations, R& rng,
                      const DataProposal* data = nullptr) {
  if (iterations == 0) throw InvalidParameter("chain needs at least one iteration");
  const KernelMixture m = mixture.normalized(data != nullptr);
  const KernelPlan plan(initial.schema(), m);

  ChainResult out;
  out.state = init_chain(std::move(initial), target);
  out.map_trace = out.state.trace;
  out.map_log_posterior = out.state.log_posterior();
  out.map_log_likelihood = out.state.log_likelihood;
  out.history.reserve(iterations);
  out.state.scores.reserve(iterations);

  for (std::size_t it = 1; it <= iterations; ++it) {
    StepOutcome o;
    const KernelId k = mixture_step(out.state, target, plan, data, rng, &o);
    out.state.iteration = it;
    const double lp = out.state.log_posterior();
    out.state.scores.push_back({it, lp});
    out.history.push_back({it, k, o.accepted, out.state.trace.log_prior(), out.state.log_likelihood});
    if (lp > out.map_log_posterior) {
      out.map_log_posterior = lp;
      out.map_log_likelihood = out.state.log_likelihood;
      out.map_trace = out.state.trace;
    }
  }
  return out;
}

/// Starts from a prior sample drawn from `rng`.
template <Target T, typename R>
ChainResult run_chain(const SchemaPtr& schema, T& target, const KernelMixture& mixture, std::size_t iterations,
                      R& rng, const DataProposal* data = nullptr) {
  return run_chain(sample_trace(schema, rng), target, mixture, iterations, rng, data);
}

}  // namespace pcad
