#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pcad/config.hpp"
#include "pcad/image.hpp"
#include "pcad/inference.hpp"
#include "pcad/likelihood.hpp"
#include "pcad/mesh.hpp"
#include "pcad/metrics.hpp"
#include "pcad/proposal.hpp"
#include "pcad/render.hpp"
#include "pcad/scene_model.hpp"
#include "pcad/trace_io.hpp"

namespace pcad {

inline constexpr const char* kOutputDirEnv = "PCAD_OUTPUT_DIR";

/// $PCAD_OUTPUT_DIR when set and non-empty, else ./pcad_out.
inline std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "pcad_out";
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

inline std::filesystem::path prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  const auto probe = dir / ".pcad_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
  return dir;
}

inline std::string numbered(const std::string& stem, std::size_t i, const std::string& suffix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return stem + buf + suffix;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

/// Writes mesh, depth and contour images of one trace next to each other.
inline void write_trace_artifacts(const std::filesystem::path& dir, const std::string& stem, const SceneTrace& t,
                                  const SceneModel& model, const RenderConfig& cfg) {
  const TriangleMesh mesh = model.build_mesh(t);
  const RenderedView view = render_mesh(mesh, cfg);
  save_trace((dir / (stem + ".trace.jsonl")).string(), t);
  save_obj((dir / (stem + ".obj")).string(), mesh);
  save_pgm((dir / (stem + "_depth.pgm")).string(), depth_to_gray(view.depth, cfg.near, cfg.far));
  save_pbm((dir / (stem + "_contour.pbm")).string(), view.contour);
}

// ----------------------------------------------------------------- sample

struct SampleOptions {
  Program program = Program::object;
  std::size_t n = 1;
  std::uint64_t seed = 0;
  ModelConfig model;
  RenderConfig render;
  std::filesystem::path out_dir = default_output_dir();
};

/// Prior sample i is drawn from stream split_seed(seed, i).
inline std::vector<std::filesystem::path> cmd_sample(const SampleOptions& o) {
  if (o.n == 0) throw InvalidParameter("--n must be at least 1");
  const SceneModel model(o.model);
  o.render.validate();
  prepare_output_dir(o.out_dir);
  std::vector<std::filesystem::path> traces;
  for (std::size_t i = 0; i < o.n; ++i) {
    Rng rng = make_rng(o.seed, i);
    const SceneTrace t = model.sample_prior(o.program, rng);
    const std::string stem = numbered("sample_", i, "");
    write_trace_artifacts(o.out_dir, stem, t, model, o.render);
    traces.push_back(o.out_dir / (stem + ".trace.jsonl"));
  }
  return traces;
}

// ------------------------------------------------------------------ infer

inline nlohmann::json to_json(const KernelMixture& m) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : m.hmc_settings.blocks) blocks.push_back(b);
  return {{"alphas", {m.single, m.block, m.data, m.hmc}},
          {"hmc", {{"step_size", m.hmc_settings.step_size},
                   {"leapfrog_steps", m.hmc_settings.leapfrog_steps},
                   {"fd_step", m.hmc_settings.fd_step},
                   {"blocks", blocks}}},
          {"data", {{"neighbors", m.data_settings.neighbors},
                    {"bandwidth_floor", m.data_settings.bandwidth_floor},
                    {"latents", m.data_settings.latents}}}};
}

struct InferOptions {
  Program program = Program::object;
  ModelConfig model;
  RenderConfig render;
  KernelMixture mixture;
  std::size_t chains = 4;
  std::size_t iters = 1000;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> observation;  // contour image
  std::optional<std::uint64_t> synthetic_seed;        // ground truth from the prior
  std::optional<std::filesystem::path> index;
  double sigma0 = 0.0;  // 0 selects the default for the render width
  unsigned threads = default_threads();
  std::filesystem::path out_dir = default_output_dir();
};

struct InferResult {
  std::vector<ChainResult> chains;
  std::size_t best_chain = 0;
  std::optional<SceneTrace> ground_truth;
  std::optional<EvalReport> report;
};

/// Runs independent chains; chain c draws its initial state and all moves
/// from stream split_seed(seed, c).
template <Target T>
std::vector<ChainResult> run_chains(const SchemaPtr& schema, T& target, const KernelMixture& mixture,
                                    std::size_t chains, std::size_t iters, std::uint64_t seed, unsigned threads,
                                    const DataProposal* data = nullptr) {
  std::vector<ChainResult> out(chains);
  std::vector<std::exception_ptr> errors(chains);
  auto work = [&](std::size_t c) {
    try {
      Rng rng = make_rng(seed, c);
      out[c] = run_chain(schema, target, mixture, iters, rng, data);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(chains, 1));
  if (workers == 1) {
    for (std::size_t c = 0; c < chains; ++c) work(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < chains; c = next++) work(c);
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline ChainSummary summarize_chain(std::size_t id, const std::vector<ChainRecord>& history) {
  ChainSummary s;
  s.chain = id;
  s.iterations = history.size();
  if (history.empty()) return s;
  std::size_t accepted = 0;
  s.map_log_posterior = -std::numeric_limits<double>::infinity();
  for (const auto& r : history) {
    accepted += r.accepted;
    s.map_log_posterior = std::max(s.map_log_posterior, r.log_prior + r.log_likelihood);
  }
  s.final_log_posterior = history.back().log_prior + history.back().log_likelihood;
  s.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(history.size());
  return s;
}

inline InferResult cmd_infer(const InferOptions& o) {
  if (o.observation.has_value() == o.synthetic_seed.has_value())
    throw InvalidParameter("give exactly one of an observation image or a synthetic seed");
  if (o.chains == 0) throw InvalidParameter("--chains must be at least 1");
  if (o.iters == 0) throw InvalidParameter("--iters must be at least 1");
  o.render.validate();
  const SceneModel model(o.model);
  const SchemaPtr& schema = model.schema(o.program);
  const auto dir = prepare_output_dir(o.out_dir);

  InferResult result;
  BinaryImage contour;
  if (o.synthetic_seed) {
    Rng rng = make_rng(*o.synthetic_seed, 0);
    SceneTrace gt = model.sample_prior(o.program, rng);
    write_trace_artifacts(dir, "ground_truth", gt, model, o.render);
    contour = render_view(gt, model, o.render).contour;
    result.ground_truth = std::move(gt);
  } else {
    contour = load_binary_image(o.observation->string());
    if (contour.width() != o.render.width || contour.height() != o.render.height)
      throw InvalidParameter("observation size does not match --render-size");
  }
  if (count_on(contour) == 0) throw EmptyObservation("observation has no contour pixels");
  save_pbm((dir / "observation.pbm").string(), contour);

  const double sigma0 = o.sigma0 > 0.0 ? o.sigma0 : default_sigma0(o.render.width);
  auto obs = std::make_shared<const ObservationImage>(std::move(contour));
  ImageTarget target(model, o.render, obs, sigma0);

  std::optional<ProposalIndex> index;
  std::optional<DataProposal> data;
  if (o.index && o.mixture.data > 0.0) {
    index = load_index(o.index->string());
    check_index_schema(*index, *schema);
    if (!index->empty()) data = make_data_proposal(*index, *schema, *obs, o.mixture.data_settings);
  }

  result.chains = run_chains(schema, target, o.mixture, o.chains, o.iters, o.seed, o.threads,
                             data ? &*data : nullptr);

  nlohmann::json stats = nlohmann::json::array();
  for (std::size_t c = 0; c < result.chains.size(); ++c) {
    const auto& ch = result.chains[c];
    std::ofstream log(dir / numbered("chain_", c, ".log.jsonl"));
    if (!log) throw IoError("cannot write chain log");
    write_chain_log(log, ch.history);
    save_trace((dir / numbered("chain_", c, ".map.trace.jsonl")).string(), ch.map_trace);
    nlohmann::json per;
    for (std::size_t k = 0; k < kKernelCount; ++k)
      per[std::string(kKernelNames[k])] = {{"proposed", ch.state.stats[k].proposed},
                                           {"accepted", ch.state.stats[k].accepted},
                                           {"failed", ch.state.stats[k].failed}};
    stats.push_back({{"chain", c},
                     {"seed", split_seed(o.seed, c)},
                     {"map_log_posterior", ch.map_log_posterior},
                     {"kernels", per}});
    if (ch.map_log_posterior > result.chains[result.best_chain].map_log_posterior) result.best_chain = c;
  }
  write_trace_artifacts(dir, "map", result.chains[result.best_chain].map_trace, model, o.render);

  write_json_file(dir / "run.json", {{"program", std::string(to_string(o.program))},
                                     {"model", to_json(model.config())},
                                     {"render", to_json(o.render)},
                                     {"sigma0", sigma0},
                                     {"seed", o.seed},
                                     {"chains", o.chains},
                                     {"iters", o.iters},
                                     {"mixture", to_json(data ? o.mixture : o.mixture.normalized(false))},
                                     {"best_chain", result.best_chain},
                                     {"chain_stats", stats}});

  if (result.ground_truth) {
    EvalReport r = evaluate_traces(result.chains[result.best_chain].map_trace, *result.ground_truth, model, o.render);
    r.name = dir.filename().string();
    for (std::size_t c = 0; c < result.chains.size(); ++c)
      r.chains.push_back(summarize_chain(c, result.chains[c].history));
    std::ofstream rep(dir / "report.jsonl");
    write_report(rep, r);
    std::ofstream csv(dir / "report.csv");
    write_report_csv_header(csv);
    write_report_csv_row(csv, r);
    result.report = std::move(r);
  }
  return result;
}

// ---------------------------------------------------------- train-proposals

struct TrainOptions {
  Program program = Program::object;
  std::size_t n = 50000;
  std::uint64_t seed = 0;
  ModelConfig model;
  RenderConfig render;
  FeatureSpec features;
  unsigned threads = default_threads();
  std::filesystem::path out = default_output_dir() / "index.bin";
};

struct TrainResult {
  std::size_t entries = 0;
  std::size_t dropped = 0;
};

inline TrainResult cmd_train_proposals(const TrainOptions& o) {
  const SceneModel model(o.model);
  if (o.out.has_parent_path()) prepare_output_dir(o.out.parent_path());
  TrainResult r;
  std::mutex m;
  DatasetOptions d{o.features, o.threads, [&](std::size_t) {
                     std::lock_guard lock(m);
                     ++r.dropped;
                   }};
  const ProposalIndex index = generate_dataset(o.n, o.program, model, o.render, o.seed, d);
  save_index(o.out.string(), index);
  r.entries = index.size();
  return r;
}

// --------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::filesystem::path run_dir;
  std::optional<std::filesystem::path> ground_truth;  // defaults to the run's synthetic truth
  DepthErrorMode mode = DepthErrorMode::absolute_median;
};

inline EvalReport cmd_evaluate(const EvaluateOptions& o) {
  const auto run = read_json_file(o.run_dir / "run.json");
  const Program program = parse_program(run.at("program").get<std::string>());
  const SceneModel model(model_config_from_json(run.at("model")));
  const RenderConfig render = render_config_from_json(run.at("render"));
  const SchemaPtr& schema = model.schema(program);

  const auto map_path = o.run_dir / "map.trace.jsonl";
  if (!std::filesystem::exists(map_path)) throw IoError("missing file " + map_path.string());
  const auto gt_path = o.ground_truth.value_or(o.run_dir / "ground_truth.trace.jsonl");
  if (!std::filesystem::exists(gt_path)) throw IoError("missing ground truth " + gt_path.string());
  const SceneTrace map = load_trace(map_path.string(), schema);
  const SceneTrace gt = load_trace(gt_path.string(), schema);

  EvalReport r = evaluate_traces(map, gt, model, render, o.mode);
  r.name = std::filesystem::absolute(o.run_dir).filename().string();
  const std::size_t chains = run.at("chains").get<std::size_t>();
  for (std::size_t c = 0; c < chains; ++c) {
    std::ifstream log(o.run_dir / numbered("chain_", c, ".log.jsonl"));
    if (!log) throw IoError("missing chain log " + std::to_string(c));
    r.chains.push_back(summarize_chain(c, read_chain_log(log)));
  }
  return r;
}

}  // namespace pcad
