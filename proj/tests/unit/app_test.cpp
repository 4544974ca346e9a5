#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <gtest/gtest.h>

#include "pcad/app.hpp"

namespace pcad {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pcad_app_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(App, SampleWritesFourOfEach) {
  SampleOptions o;
  o.n = 4;
  o.seed = 7;
  o.out_dir = scratch("sample");
  cmd_sample(o);
  std::size_t traces = 0, meshes = 0, images = 0;
  for (const auto& e : fs::directory_iterator(o.out_dir)) {
    const std::string name = e.path().filename().string();
    if (name.ends_with(".trace.jsonl")) ++traces;
    if (name.ends_with(".obj")) ++meshes;
    if (name.ends_with(".pgm") || name.ends_with(".pbm")) ++images;
  }
  EXPECT_EQ(traces, 4u);
  EXPECT_EQ(meshes, 4u);
  EXPECT_EQ(images, 8u);

  SampleOptions again = o;
  again.out_dir = scratch("sample_again");
  cmd_sample(again);
  for (const auto& e : fs::directory_iterator(o.out_dir))
    EXPECT_EQ(slurp(e.path()), slurp(again.out_dir / e.path().filename())) << e.path();
}

TEST(App, SampledBodyTracesValidate) {
  SampleOptions o;
  o.program = Program::body;
  o.n = 2;
  o.out_dir = scratch("sample_body");
  const auto files = cmd_sample(o);
  const SceneModel model;
  for (const auto& f : files) EXPECT_NO_THROW(load_trace(f.string(), model.schema(Program::body)));
  EXPECT_EQ(peek_trace_program(files[0].string()), Program::body);
}

TEST(App, OutputDirectoryFromEnvironment) {
  ::setenv(kOutputDirEnv, "/tmp/pcad_env_dir", 1);
  EXPECT_EQ(default_output_dir(), fs::path("/tmp/pcad_env_dir"));
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(default_output_dir(), fs::path("pcad_out"));
}

TEST(App, UnwritableOutputDirectory) {
  SampleOptions o;
  o.out_dir = "/proc/pcad_cannot_write_here";
  EXPECT_THROW(cmd_sample(o), IoError);
}

InferOptions small_infer(const std::string& name) {
  InferOptions o;
  o.chains = 2;
  o.iters = 60;
  o.seed = 5;
  o.synthetic_seed = 11;
  o.threads = 1;
  o.mixture = KernelMixture{}.normalized(false);
  o.out_dir = scratch(name);
  return o;
}

TEST(App, InferIsReproducibleAndWritesLogs) {
  const InferOptions o = small_infer("infer_a");
  const auto a = cmd_infer(o);
  InferOptions o2 = o;
  o2.out_dir = scratch("infer_b");
  o2.threads = 2;
  const auto b = cmd_infer(o2);
  EXPECT_EQ(a.chains[a.best_chain].map_log_posterior, b.chains[b.best_chain].map_log_posterior);
  for (std::size_t c = 0; c < 2; ++c) {
    const std::string log = numbered("chain_", c, ".log.jsonl");
    EXPECT_EQ(slurp(o.out_dir / log), slurp(o2.out_dir / log));
    std::ifstream in(o.out_dir / log);
    EXPECT_EQ(read_chain_log(in).size(), o.iters);
  }
  EXPECT_TRUE(fs::exists(o.out_dir / "map.trace.jsonl"));
  EXPECT_TRUE(fs::exists(o.out_dir / "map_contour.pbm"));
  EXPECT_TRUE(fs::exists(o.out_dir / "report.jsonl"));
  ASSERT_TRUE(a.report);
  EXPECT_GE(a.report->z_mae, 0.0);
  EXPECT_GE(a.report->n_mse, 0.0);
}

TEST(App, AlphasControlWhichKernelsRun) {
  InferOptions o = small_infer("infer_alphas");
  o.mixture.single = 1.0;
  o.mixture.block = o.mixture.data = o.mixture.hmc = 0.0;
  const auto r = cmd_infer(o);
  for (const auto& c : r.chains) {
    EXPECT_EQ(c.state.stats[0].proposed, o.iters);
    EXPECT_EQ(c.state.stats[1].proposed + c.state.stats[2].proposed + c.state.stats[3].proposed, 0u);
  }
}

TEST(App, ChainCountDoesNotPerturbEarlierChains) {
  InferOptions o = small_infer("infer_two");
  const auto two = cmd_infer(o);
  o.chains = 3;
  o.out_dir = scratch("infer_three");
  const auto three = cmd_infer(o);
  EXPECT_EQ(two.chains[0].map_log_posterior, three.chains[0].map_log_posterior);
  EXPECT_EQ(two.chains[1].map_log_posterior, three.chains[1].map_log_posterior);
  EXPECT_TRUE(fs::exists(o.out_dir / "chain_0002.log.jsonl"));
}

TEST(App, InferRejectsBadObservations) {
  InferOptions o = small_infer("infer_bad");
  o.synthetic_seed.reset();
  EXPECT_THROW(cmd_infer(o), InvalidParameter);
  const fs::path empty = o.out_dir.parent_path() / "pcad_empty_obs.pbm";
  save_pbm(empty.string(), BinaryImage(128, 128, 0));
  o.observation = empty;
  EXPECT_THROW(cmd_infer(o), EmptyObservation);
}

TEST(App, InferFromObservationFile) {
  const SceneModel model;
  Rng rng(2);
  const SceneTrace t = model.sample_prior(Program::object, rng);
  const fs::path obs = fs::temp_directory_path() / "pcad_obs.pbm";
  save_pbm(obs.string(), render_view(t, model, RenderConfig{}).contour);
  InferOptions o = small_infer("infer_file");
  o.synthetic_seed.reset();
  o.observation = obs;
  const auto r = cmd_infer(o);
  EXPECT_FALSE(r.report);
  EXPECT_TRUE(fs::exists(o.out_dir / "run.json"));
}

TEST(App, EvaluateMatchesDirectMetrics) {
  const InferOptions o = small_infer("infer_eval");
  const auto r = cmd_infer(o);
  EvaluateOptions e;
  e.run_dir = o.out_dir;
  const EvalReport rep = cmd_evaluate(e);
  const SceneModel model;
  const auto schema = model.schema(Program::object);
  const EvalReport direct = evaluate_traces(load_trace((o.out_dir / "map.trace.jsonl").string(), schema),
                                            load_trace((o.out_dir / "ground_truth.trace.jsonl").string(), schema),
                                            model, RenderConfig{});
  EXPECT_EQ(rep.z_mae, direct.z_mae);
  EXPECT_EQ(rep.n_mse, direct.n_mse);
  EXPECT_EQ(rep.z_mae, r.report->z_mae);
  ASSERT_EQ(rep.chains.size(), 2u);
  EXPECT_EQ(rep.chains[0].map_log_posterior, r.report->chains[0].map_log_posterior);

  e.ground_truth = o.out_dir / "map.trace.jsonl";
  const EvalReport self = cmd_evaluate(e);
  EXPECT_EQ(self.z_mae, 0.0);
  EXPECT_EQ(self.n_mse, 0.0);

  fs::remove(o.out_dir / "map.trace.jsonl");
  EXPECT_THROW(cmd_evaluate(e), IoError);
}

TEST(App, TrainProposalsWritesIndexAndSidecar) {
  TrainOptions o;
  o.n = 30;
  o.program = Program::body;
  o.threads = 1;
  o.out = scratch("train") / "index.bin";
  const auto r = cmd_train_proposals(o);
  EXPECT_EQ(r.entries + r.dropped, 30u);
  const ProposalIndex idx = load_index(o.out.string());
  EXPECT_EQ(idx.size(), r.entries);
  EXPECT_TRUE(fs::exists(sidecar_path(o.out.string())));

  InferOptions inf = small_infer("infer_index");
  inf.program = Program::body;
  inf.iters = 30;
  inf.index = o.out;
  inf.mixture = KernelMixture{};
  inf.mixture.data_settings.latents = {"affine.tx", "affine.ty"};
  const auto res = cmd_infer(inf);
  std::size_t data_steps = 0;
  for (const auto& c : res.chains) data_steps += c.state.stats[2].proposed;
  EXPECT_GT(data_steps, 0u);
}

}  // namespace
}  // namespace pcad
