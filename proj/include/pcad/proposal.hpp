#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pcad/distance_transform.hpp"
#include "pcad/error.hpp"
#include "pcad/inference.hpp"
#include "pcad/kde.hpp"
#include "pcad/random.hpp"
#include "pcad/render.hpp"
#include "pcad/scene_model.hpp"

namespace pcad {

struct FeatureSpec {
  int grid = 8;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
  std::size_t dimension() const { return static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid); }
  void validate() const {
    if (grid < 1) throw InvalidParameter("feature grid must be at least 1");
  }
};

/// Distance transform of a contour map averaged over a grid x grid tiling and
/// divided by the image diagonal.
inline std::vector<double> features_from_dt(const DepthImage& dt, const FeatureSpec& spec = {}) {
  spec.validate();
  const int g = spec.grid;
  if (dt.width() < g || dt.height() < g) throw InvalidParameter("image smaller than feature grid");
  const double diagonal = std::hypot(static_cast<double>(dt.width()), static_cast<double>(dt.height()));
  std::vector<double> f(spec.dimension());
  for (int cy = 0; cy < g; ++cy) {
    const int y0 = cy * dt.height() / g, y1 = (cy + 1) * dt.height() / g;
    for (int cx = 0; cx < g; ++cx) {
      const int x0 = cx * dt.width() / g, x1 = (cx + 1) * dt.width() / g;
      double sum = 0.0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) sum += dt(x, y);
      f[static_cast<std::size_t>(cy * g + cx)] = sum / (static_cast<double>((y1 - y0) * (x1 - x0)) * diagonal);
    }
  }
  return f;
}

inline std::vector<double> features(const BinaryImage& contour, const FeatureSpec& spec = {}) {
  return features_from_dt(distance_transform(contour), spec);
}

inline std::vector<double> features(const ObservationImage& obs, const FeatureSpec& spec = {}) {
  return features_from_dt(obs.dt(), spec);
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

/// Stored (feature vector, latent vector) pairs; latent vectors are the
/// trace's continuous latents in schema order.
class ProposalIndex {
 public:
  ProposalIndex() = default;
  ProposalIndex(Program program, FeatureSpec spec, int width, int height, std::vector<std::string> latent_names)
      : program_(program), spec_(spec), width_(width), height_(height), names_(std::move(latent_names)) {
    spec_.validate();
  }

  Program program() const { return program_; }
  const FeatureSpec& feature_spec() const { return spec_; }
  int image_width() const { return width_; }
  int image_height() const { return height_; }
  const std::vector<std::string>& latent_names() const { return names_; }
  std::size_t feature_dimension() const { return spec_.dimension(); }
  std::size_t latent_dimension() const { return names_.size(); }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  std::span<const double> feature(std::size_t i) const {
    return {features_.data() + i * feature_dimension(), feature_dimension()};
  }
  std::span<const double> latents(std::size_t i) const {
    return {latents_.data() + i * latent_dimension(), latent_dimension()};
  }

  void add(std::span<const double> feature, std::span<const double> latents) {
    if (feature.size() != feature_dimension()) throw InvalidParameter("feature length does not match index");
    if (latents.size() != latent_dimension()) throw InvalidParameter("latent length does not match index");
    features_.insert(features_.end(), feature.begin(), feature.end());
    latents_.insert(latents_.end(), latents.begin(), latents.end());
    ++count_;
  }

  void reserve(std::size_t n) {
    features_.reserve(n * feature_dimension());
    latents_.reserve(n * latent_dimension());
  }

  /// Indices of the k nearest entries by Euclidean feature distance, nearest
  /// first; equal distances keep storage order.
  std::vector<std::size_t> nearest(std::span<const double> query, std::size_t k) const {
    if (query.size() != feature_dimension()) throw InvalidParameter("query feature length does not match index");
    if (k == 0 || k > count_) throw InvalidParameter("K must be in [1, index size]");
    std::vector<std::pair<double, std::size_t>> d(count_);
    for (std::size_t i = 0; i < count_; ++i) d[i] = {squared_distance(query, feature(i)), i};
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
    return out;
  }

  friend bool operator==(const ProposalIndex&, const ProposalIndex&) = default;

 private:
  Program program_ = Program::custom;
  FeatureSpec spec_;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::string> names_;
  std::size_t count_ = 0;
  std::vector<double> features_;
  std::vector<double> latents_;
};

inline std::vector<double> continuous_values(const SceneTrace& t) {
  const auto idx = t.schema().continuous_indices();
  std::vector<double> v(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) v[i] = t.value(idx[i]);
  return v;
}

inline std::vector<std::string> continuous_names(const TraceSchema& schema) {
  std::vector<std::string> names;
  for (auto i : schema.continuous_indices()) names.push_back(schema[i].name);
  return names;
}

struct DatasetOptions {
  FeatureSpec features;
  unsigned threads = 1;
  // Called once per dropped sample (empty render) with its sample number.
  std::function<void(std::size_t)> on_drop;
};

/// Draws n prior traces, renders them and stores (features, latents). Sample
/// i uses stream split_seed(seed, i), so the result does not depend on the
/// thread count.
inline ProposalIndex generate_dataset(std::size_t n, Program program, const SceneModel& model,
                                      const RenderConfig& cfg, std::uint64_t seed, const DatasetOptions& opt = {}) {
  if (n == 0) throw InvalidParameter("dataset size must be at least 1");
  cfg.validate();
  const SchemaPtr& schema = model.schema(program);
  ProposalIndex index(program, opt.features, cfg.width, cfg.height, continuous_names(*schema));

  struct Slot {
    std::vector<double> feature, latents;
    bool kept = false;
  };
  std::vector<Slot> slots(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = make_rng(seed, i);
      const SceneTrace t = sample_trace(schema, rng);
      const RenderedView view = render_view(t, model, cfg);
      if (view.on_count == 0) continue;
      slots[i].feature = features(view.contour, opt.features);
      slots[i].latents = continuous_values(t);
      slots[i].kept = true;
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(opt.threads, 1, n);
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&work, w, threads, n] { work(n * w / threads, n * (w + 1) / threads); });
    for (auto& t : pool) t.join();
  }

  index.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i].kept)
      index.add(slots[i].feature, slots[i].latents);
    else if (opt.on_drop)
      opt.on_drop(i);
  }
  return index;
}

/// Observation-conditioned KDE proposal from the K nearest entries. With no
/// latents selected the placement group is proposed.
inline DataProposal make_data_proposal(const ProposalIndex& index, const TraceSchema& schema,
                                       std::span<const double> query, const DataSettings& settings) {
  if (index.empty()) throw InvalidParameter("proposal index is empty");
  if (index.program() != schema.program()) throw InvalidParameter("proposal index built for another program");
  std::vector<std::string> wanted = settings.latents;
  if (wanted.empty())
    for (auto i : schema.group_members(kPlacementGroup)) wanted.push_back(schema[i].name);
  if (wanted.empty()) throw InvalidParameter("data kernel has no latents to propose");
  std::vector<std::size_t> columns;
  {
    for (const auto& name : wanted) {
      const auto& names = index.latent_names();
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw InvalidParameter("latent '" + name + "' is not in the proposal index");
      columns.push_back(static_cast<std::size_t>(it - names.begin()));
    }
  }

  DataProposal q;
  std::vector<double> floor;
  for (auto c : columns) {
    const auto i = schema.index(index.latent_names()[c]);
    q.latents.push_back(i);
    floor.push_back(settings.bandwidth_floor * prior_range(schema[i].prior));
  }
  std::vector<std::vector<double>> samples;
  for (auto e : index.nearest(query, settings.neighbors)) {
    const auto row = index.latents(e);
    std::vector<double> s;
    s.reserve(columns.size());
    for (auto c : columns) s.push_back(row[c]);
    samples.push_back(std::move(s));
  }
  q.kde = Kde::silverman(std::move(samples), floor);
  return q;
}

inline DataProposal make_data_proposal(const ProposalIndex& index, const TraceSchema& schema,
                                       const ObservationImage& obs, const DataSettings& settings) {
  if (obs.width() != index.image_width() || obs.height() != index.image_height())
    throw InvalidParameter("observation size does not match proposal index");
  const auto f = features(obs, index.feature_spec());
  return make_data_proposal(index, schema, f, settings);
}

// ---------------------------------------------------------- persistence

inline constexpr std::array<char, 8> kIndexMagic = {'P', 'C', 'A', 'D', 'I', 'D', 'X', '\0'};
inline constexpr std::uint32_t kIndexVersion = 1;

namespace detail {
template <typename U>
void put_le(std::ostream& out, U v) {
  using Bits = std::conditional_t<sizeof(U) == 8, std::uint64_t, std::uint32_t>;
  auto bits = std::bit_cast<Bits>(v);
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(buf, sizeof(U));
}

template <typename U>
U get_le(std::istream& in) {
  using Bits = std::conditional_t<sizeof(U) == 8, std::uint64_t, std::uint32_t>;
  unsigned char buf[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(U))) throw FormatError("proposal index: truncated file");
  Bits bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<Bits>(buf[i]) << (8 * i);
  return std::bit_cast<U>(bits);
}
}  // namespace detail

/// Binary layout, little-endian: magic[8], u32 version, u32 program,
/// u32 grid, u32 M, u32 latent count D, u32 width, u32 height, u64 entries,
/// then per entry M feature doubles followed by D latent doubles.
inline void write_index(std::ostream& out, const ProposalIndex& index) {
  out.write(kIndexMagic.data(), kIndexMagic.size());
  detail::put_le<std::uint32_t>(out, kIndexVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.program()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.feature_spec().grid));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.feature_dimension()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.latent_dimension()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.image_width()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.image_height()));
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(index.size()));
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (double v : index.feature(i)) detail::put_le(out, v);
    for (double v : index.latents(i)) detail::put_le(out, v);
  }
  if (!out) throw IoError("proposal index: write failed");
}

/// Text sidecar: program, grid, image size and one latent name per line in
/// vector order.
inline void write_index_sidecar(std::ostream& out, const ProposalIndex& index) {
  out << "program " << to_string(index.program()) << '\n'
      << "grid " << index.feature_spec().grid << '\n'
      << "image " << index.image_width() << ' ' << index.image_height() << '\n'
      << "entries " << index.size() << '\n'
      << "latents " << index.latent_dimension() << '\n';
  for (const auto& n : index.latent_names()) out << n << '\n';
}

struct IndexHeader {
  Program program = Program::custom;
  int grid = 0;
  std::size_t feature_dimension = 0;
  std::size_t latent_dimension = 0;
  int width = 0;
  int height = 0;
  std::uint64_t entries = 0;
};

inline IndexHeader read_index_header(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kIndexMagic) throw FormatError("proposal index: bad magic");
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != kIndexVersion) throw FormatError("proposal index: unsupported version " + std::to_string(version));
  IndexHeader h;
  const auto program = detail::get_le<std::uint32_t>(in);
  if (program > static_cast<std::uint32_t>(Program::custom)) throw FormatError("proposal index: bad program tag");
  h.program = static_cast<Program>(program);
  h.grid = static_cast<int>(detail::get_le<std::uint32_t>(in));
  h.feature_dimension = detail::get_le<std::uint32_t>(in);
  h.latent_dimension = detail::get_le<std::uint32_t>(in);
  h.width = static_cast<int>(detail::get_le<std::uint32_t>(in));
  h.height = static_cast<int>(detail::get_le<std::uint32_t>(in));
  h.entries = detail::get_le<std::uint64_t>(in);
  if (h.grid < 1 || h.feature_dimension != static_cast<std::size_t>(h.grid) * static_cast<std::size_t>(h.grid))
    throw FormatError("proposal index: feature length does not match grid");
  return h;
}

inline std::vector<std::string> read_index_sidecar(std::istream& in, const IndexHeader& h) {
  std::string line, key;
  std::vector<std::string> names;
  std::size_t count = 0;
  bool have_count = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (have_count) {
      names.push_back(line);
      continue;
    }
    std::istringstream ls(line);
    ls >> key;
    if (key == "program") {
      std::string p;
      ls >> p;
      if (parse_program(p) != h.program) throw FormatError("proposal index sidecar: program mismatch");
    } else if (key == "latents") {
      if (!(ls >> count)) throw FormatError("proposal index sidecar: bad latent count");
      have_count = true;
    }
  }
  if (!have_count || names.size() != count || count != h.latent_dimension)
    throw FormatError("proposal index sidecar: latent list does not match index");
  return names;
}

inline ProposalIndex read_index(std::istream& bin, std::istream& sidecar) {
  const IndexHeader h = read_index_header(bin);
  ProposalIndex index(h.program, FeatureSpec{h.grid}, h.width, h.height, read_index_sidecar(sidecar, h));
  index.reserve(h.entries);
  std::vector<double> f(h.feature_dimension), l(h.latent_dimension);
  for (std::uint64_t e = 0; e < h.entries; ++e) {
    for (auto& v : f) v = detail::get_le<double>(bin);
    for (auto& v : l) v = detail::get_le<double>(bin);
    index.add(f, l);
  }
  return index;
}

inline std::string sidecar_path(const std::string& index_path) { return index_path + ".latents.txt"; }

inline void save_index(const std::string& path, const ProposalIndex& index) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw IoError("cannot open " + path);
  write_index(bin, index);
  std::ofstream side(sidecar_path(path));
  if (!side) throw IoError("cannot open " + sidecar_path(path));
  write_index_sidecar(side, index);
}

inline ProposalIndex load_index(const std::string& path) {
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw IoError("cannot open " + path);
  std::ifstream side(sidecar_path(path));
  if (!side) throw IoError("cannot open " + sidecar_path(path));
  return read_index(bin, side);
}

/// Checks that the index's latent ordering matches the schema it will be
/// used with.
inline void check_index_schema(const ProposalIndex& index, const TraceSchema& schema) {
  if (index.program() != schema.program()) throw InvalidParameter("proposal index built for another program");
  if (index.latent_names() != continuous_names(schema))
    throw InvalidParameter("proposal index latent ordering does not match the model");
}

}  // namespace pcad
