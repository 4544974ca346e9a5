#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcad/app.hpp"

namespace {

pcad::RenderConfig parse_render_size(const std::string& s) {
  int w = 0, h = 0;
  char x = 0;
  std::istringstream in(s);
  if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || !in.eof())
    throw CLI::ValidationError("--render-size", "expected WxH, got '" + s + "'");
  return pcad::RenderConfig::with_size(w, h);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError("--alphas", "bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

pcad::Program program_of(const std::string& s) {
  try {
    const auto p = pcad::parse_program(s);
    if (p == pcad::Program::custom) throw pcad::InvalidParameter("custom");
    return p;
  } catch (const pcad::InvalidParameter&) {
    throw CLI::ValidationError("--program", "expected object or body");
  }
}

struct Common {
  std::string program = "object";
  std::string model_config;
  std::string render_size = "128x128";
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App* app, bool with_out_dir = true) {
    app->add_option("--program", program, "object or body")->capture_default_str();
    app->add_option("--model-config", model_config, "model configuration (JSON)");
    app->add_option("--render-size", render_size, "render size WxH")->capture_default_str();
    app->add_option("--seed", seed, "master seed")->capture_default_str();
    if (with_out_dir) app->add_option("--out-dir", out, "output directory (default $PCAD_OUTPUT_DIR or ./pcad_out)");
  }

  pcad::ModelConfig model() const {
    return model_config.empty() ? pcad::ModelConfig{} : pcad::load_model_config(model_config);
  }
  std::filesystem::path out_dir() const { return out.empty() ? pcad::default_output_dir() : std::filesystem::path(out); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse graphics by MCMC over probabilistic CAD programs"};
  app.require_subcommand(1);

  Common sample_common;
  std::size_t sample_n = 1;
  auto* sample = app.add_subcommand("sample", "draw traces from the prior and render them");
  sample_common.add(sample);
  sample->add_option("--n", sample_n, "number of samples")->capture_default_str();

  Common infer_common;
  std::size_t chains = 4, iters = 1000;
  std::string alphas, observation, index, hmc_blocks, data_latents;
  std::uint64_t synthetic = 0;
  double sigma0 = 0.0;
  unsigned threads = pcad::default_threads();
  pcad::KernelMixture mixture;
  auto* infer = app.add_subcommand("infer", "run MCMC chains against a contour observation");
  infer_common.add(infer);
  infer->add_option("--chains", chains, "independent chains")->capture_default_str();
  infer->add_option("--iters", iters, "iterations per chain")->capture_default_str();
  infer->add_option("--alphas", alphas, "kernel weights single,block,data,hmc");
  auto* obs_opt = infer->add_option("--observation", observation, "observed contour image (PBM/PGM)");
  auto* syn_opt = infer->add_option("--synthetic", synthetic, "ground-truth seed for a synthetic observation");
  obs_opt->excludes(syn_opt);
  infer->add_option("--index", index, "proposal index for the data-driven kernel");
  infer->add_option("--sigma0", sigma0, "likelihood scale in pixels (default 2 at width 128)");
  infer->add_option("--hmc-step", mixture.hmc_settings.step_size, "leapfrog step size")->capture_default_str();
  infer->add_option("--hmc-leapfrog", mixture.hmc_settings.leapfrog_steps, "leapfrog steps")->capture_default_str();
  infer->add_option("--hmc-blocks", hmc_blocks, "HMC latent blocks: names separated by ',' and blocks by ';'");
  infer->add_option("--data-k", mixture.data_settings.neighbors, "nearest neighbours for the KDE")->capture_default_str();
  infer->add_option("--data-latents", data_latents, "latents proposed by the data kernel (default: the placement group)");
  infer->add_option("--threads", threads, "worker threads")->capture_default_str();

  Common train_common;
  std::size_t train_n = 50000;
  std::string train_out;
  unsigned train_threads = pcad::default_threads();
  auto* train = app.add_subcommand("train-proposals", "build a proposal index from prior samples");
  train_common.add(train, false);
  train->add_option("--n", train_n, "dataset size")->capture_default_str();
  train->add_option("--out", train_out, "index file (default $PCAD_OUTPUT_DIR/index.bin)");
  train->add_option("--threads", train_threads, "worker threads")->capture_default_str();

  std::string run_dir, truth;
  bool mse = false;
  auto* eval = app.add_subcommand("evaluate", "score a run's MAP trace against ground truth");
  eval->add_option("run_dir", run_dir, "output directory of an infer run")->required();
  eval->add_option("--ground-truth", truth, "ground-truth trace (default: the run's synthetic truth)");
  eval->add_flag("--mse", mse, "squared depth error with mean shift instead of absolute with median shift");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) {
      pcad::SampleOptions o;
      o.program = program_of(sample_common.program);
      o.n = sample_n;
      o.seed = sample_common.seed;
      o.model = sample_common.model();
      o.render = parse_render_size(sample_common.render_size);
      o.out_dir = sample_common.out_dir();
      const auto written = pcad::cmd_sample(o);
      std::cout << "wrote " << written.size() << " samples to " << o.out_dir.string() << '\n';
    } else if (*infer) {
      pcad::InferOptions o;
      o.program = program_of(infer_common.program);
      o.model = infer_common.model();
      o.render = parse_render_size(infer_common.render_size);
      o.chains = chains;
      o.iters = iters;
      o.seed = infer_common.seed;
      o.threads = threads;
      o.sigma0 = sigma0;
      o.out_dir = infer_common.out_dir();
      if (!alphas.empty()) {
        const auto a = parse_list(alphas);
        if (a.size() != 4) throw CLI::ValidationError("--alphas", "expected four weights");
        mixture.single = a[0];
        mixture.block = a[1];
        mixture.data = a[2];
        mixture.hmc = a[3];
      } else if (index.empty()) {
        mixture = mixture.normalized(false);
      }
      if (!hmc_blocks.empty()) {
        std::stringstream in(hmc_blocks);
        std::string block;
        while (std::getline(in, block, ';')) mixture.hmc_settings.blocks.push_back(split_names(block));
      }
      mixture.data_settings.latents = split_names(data_latents);
      o.mixture = mixture;
      if (*obs_opt) o.observation = observation;
      if (*syn_opt) o.synthetic_seed = synthetic;
      if (!index.empty()) o.index = index;
      const auto r = pcad::cmd_infer(o);
      std::cout << "best chain " << r.best_chain << " map log posterior "
                << r.chains[r.best_chain].map_log_posterior << '\n';
      if (r.report) pcad::write_report(std::cout, *r.report);
    } else if (*train) {
      pcad::TrainOptions o;
      o.program = program_of(train_common.program);
      o.n = train_n;
      o.seed = train_common.seed;
      o.model = train_common.model();
      o.render = parse_render_size(train_common.render_size);
      o.threads = train_threads;
      if (!train_out.empty()) o.out = train_out;
      const auto r = pcad::cmd_train_proposals(o);
      std::cout << "index " << o.out.string() << ": " << r.entries << " entries, " << r.dropped
                << " empty renders dropped\n";
    } else if (*eval) {
      pcad::EvaluateOptions o;
      o.run_dir = run_dir;
      if (!truth.empty()) o.ground_truth = truth;
      if (mse) o.mode = pcad::DepthErrorMode::squared_mean;
      const auto r = pcad::cmd_evaluate(o);
      pcad::write_report(std::cout, r);
      std::ofstream csv(std::filesystem::path(run_dir) / "evaluation.csv");
      pcad::write_report_csv_header(csv);
      pcad::write_report_csv_row(csv, r);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
