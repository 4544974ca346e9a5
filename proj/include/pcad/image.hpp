#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pcad/error.hpp"

namespace pcad {

/// Row-major width x height buffer.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  template <typename U>
  bool same_shape(const Image<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const Image& a, const Image& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
  }

 private:
  static std::size_t checked_size(int w, int h) {
    if (w <= 0 || h <= 0) throw InvalidParameter("image dimensions must be positive");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using BinaryImage = Image<std::uint8_t>;  // 0 or 1
using DepthImage = Image<double>;

inline std::size_t count_on(const BinaryImage& img) {
  std::size_t n = 0;
  for (auto v : img.data()) n += v != 0;
  return n;
}

// --- Netpbm: P4 (packed bitmap, 1 = on/black) and P5 (8-bit graymap) ---

namespace detail {
inline int read_pnm_int(std::istream& is) {
  int c = is.peek();
  while (c != EOF) {
    if (c == '#') {
      std::string skip;
      std::getline(is, skip);
    } else if (std::isspace(c)) {
      is.get();
    } else {
      break;
    }
    c = is.peek();
  }
  int v = 0;
  if (!(is >> v)) throw FormatError("malformed netpbm header");
  return v;
}
}  // namespace detail

inline void write_pbm(std::ostream& os, const BinaryImage& img) {
  os << "P4\n" << img.width() << ' ' << img.height() << '\n';
  const int row_bytes = (img.width() + 7) / 8;
  std::vector<char> row(static_cast<std::size_t>(row_bytes));
  for (int y = 0; y < img.height(); ++y) {
    std::fill(row.begin(), row.end(), 0);
    for (int x = 0; x < img.width(); ++x)
      if (img(x, y)) row[static_cast<std::size_t>(x / 8)] |= static_cast<char>(0x80 >> (x % 8));
    os.write(row.data(), row_bytes);
  }
}

inline void write_pgm(std::ostream& os, const Image<std::uint8_t>& img) {
  os << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.data().data()), static_cast<std::streamsize>(img.size()));
}

/// Reads P4 or P1 as a binary map, or P5/P2 thresholded: a pixel is on when
/// its gray level is >= threshold.
inline BinaryImage read_pnm_binary(std::istream& is, int threshold = 128) {
  std::string magic(2, '\0');
  if (!is.read(magic.data(), 2)) throw FormatError("empty netpbm stream");
  const int w = detail::read_pnm_int(is);
  const int h = detail::read_pnm_int(is);
  BinaryImage img(w, h);
  if (magic == "P4") {
    is.get();
    const int row_bytes = (w + 7) / 8;
    std::vector<unsigned char> row(static_cast<std::size_t>(row_bytes));
    for (int y = 0; y < h; ++y) {
      if (!is.read(reinterpret_cast<char*>(row.data()), row_bytes)) throw FormatError("truncated P4 data");
      for (int x = 0; x < w; ++x) img(x, y) = (row[static_cast<std::size_t>(x / 8)] >> (7 - x % 8)) & 1;
    }
  } else if (magic == "P1") {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        char c;
        do {
          if (!is.get(c)) throw FormatError("truncated P1 data");
        } while (std::isspace(static_cast<unsigned char>(c)));
        img(x, y) = c == '1';
      }
  } else if (magic == "P5" || magic == "P2") {
    const int maxval = detail::read_pnm_int(is);
    if (maxval <= 0 || maxval > 255) throw FormatError("only 8-bit graymaps supported");
    if (magic == "P5") {
      is.get();
      std::vector<unsigned char> buf(img.size());
      if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
        throw FormatError("truncated P5 data");
      for (std::size_t i = 0; i < buf.size(); ++i) img[i] = buf[i] >= threshold;
    } else {
      for (std::size_t i = 0; i < img.size(); ++i) img[i] = detail::read_pnm_int(is) >= threshold;
    }
  } else {
    throw FormatError("unsupported netpbm type " + magic);
  }
  return img;
}

/// 8-bit graymap read as raw levels.
inline Image<std::uint8_t> read_pgm(std::istream& is) {
  std::string magic(2, '\0');
  if (!is.read(magic.data(), 2) || magic != "P5") throw FormatError("expected P5 graymap");
  const int w = detail::read_pnm_int(is);
  const int h = detail::read_pnm_int(is);
  const int maxval = detail::read_pnm_int(is);
  if (maxval <= 0 || maxval > 255) throw FormatError("only 8-bit graymaps supported");
  is.get();
  Image<std::uint8_t> img(w, h);
  if (!is.read(reinterpret_cast<char*>(img.data().data()), static_cast<std::streamsize>(img.size())))
    throw FormatError("truncated P5 data");
  return img;
}

/// Depth to 8 bits: near -> 255, far (and beyond) -> 0.
inline Image<std::uint8_t> depth_to_gray(const DepthImage& depth, double near, double far) {
  Image<std::uint8_t> out(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double t = std::clamp((far - depth[i]) / (far - near), 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * t));
  }
  return out;
}

inline Image<std::uint8_t> binary_to_gray(const BinaryImage& img) {
  Image<std::uint8_t> out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = img[i] ? 255 : 0;
  return out;
}

inline void save_pbm(const std::string& path, const BinaryImage& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  write_pbm(os, img);
}

inline void save_pgm(const std::string& path, const Image<std::uint8_t>& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  write_pgm(os, img);
}

inline BinaryImage load_binary_image(const std::string& path, int threshold = 128) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  return read_pnm_binary(is, threshold);
}

}  // namespace pcad
