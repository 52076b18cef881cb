#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

// IDX image/label containers (the classic big-endian format used by digit
// datasets): magic 0x00000803 for uint8 rank-3 image tensors, 0x00000801 for
// uint8 rank-1 label vectors. Errors cite the byte offset of the violation so
// a truncated or mislabeled download is immediately diagnosable.

namespace spinsnn {

struct IdxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IdxImages {
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image

  const std::uint8_t* image(int k) const {
    return pixels.data() + static_cast<std::size_t>(k) * rows * cols;
  }
  std::size_t image_size() const { return static_cast<std::size_t>(rows) * cols; }
};

struct IdxLabels {
  std::vector<std::uint8_t> labels;
};

namespace detail {
inline std::vector<std::uint8_t> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(path + ": cannot open file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t off,
                               const std::string& path) {
  if (off + 4 > b.size())
    throw IdxError(path + ": offset " + std::to_string(off) +
                   ": truncated file (needed 4 header bytes, have " +
                   std::to_string(b.size() - off) + ")");
  return (static_cast<std::uint32_t>(b[off]) << 24) |
         (static_cast<std::uint32_t>(b[off + 1]) << 16) |
         (static_cast<std::uint32_t>(b[off + 2]) << 8) |
         static_cast<std::uint32_t>(b[off + 3]);
}

inline void write_be32(std::ofstream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>((v >> 24) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>(v & 0xff)};
  out.write(bytes, 4);
}
}  // namespace detail

inline IdxImages load_idx_images(const std::string& path) {
  const auto bytes = detail::read_all(path);
  const std::uint32_t magic = detail::read_be32(bytes, 0, path);
  if (magic != 0x00000803u)
    throw IdxError(path + ": offset 0: bad magic " + std::to_string(magic) +
                   " (expected 2051 for uint8 image tensors)");
  IdxImages out;
  out.count = static_cast<int>(detail::read_be32(bytes, 4, path));
  out.rows = static_cast<int>(detail::read_be32(bytes, 8, path));
  out.cols = static_cast<int>(detail::read_be32(bytes, 12, path));
  if (out.count < 0 || out.rows <= 0 || out.cols <= 0)
    throw IdxError(path + ": offset 4: implausible dimensions " +
                   std::to_string(out.count) + " x " + std::to_string(out.rows) + " x " +
                   std::to_string(out.cols));
  const std::size_t need = static_cast<std::size_t>(out.count) * out.rows * out.cols;
  if (bytes.size() - 16 != need)
    throw IdxError(path + ": offset 16: payload holds " +
                   std::to_string(bytes.size() - 16) + " bytes, header promises " +
                   std::to_string(need));
  out.pixels.assign(bytes.begin() + 16, bytes.end());
  return out;
}

inline IdxLabels load_idx_labels(const std::string& path) {
  const auto bytes = detail::read_all(path);
  const std::uint32_t magic = detail::read_be32(bytes, 0, path);
  if (magic != 0x00000801u)
    throw IdxError(path + ": offset 0: bad magic " + std::to_string(magic) +
                   " (expected 2049 for uint8 label vectors)");
  const std::uint32_t count = detail::read_be32(bytes, 4, path);
  if (bytes.size() - 8 != count)
    throw IdxError(path + ": offset 8: payload holds " + std::to_string(bytes.size() - 8) +
                   " labels, header promises " + std::to_string(count));
  IdxLabels out;
  out.labels.assign(bytes.begin() + 8, bytes.end());
  return out;
}

inline void save_idx_images(const std::string& path, const IdxImages& img) {
  if (img.pixels.size() != static_cast<std::size_t>(img.count) * img.rows * img.cols)
    throw IdxError(path + ": image container is inconsistent with its dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IdxError(path + ": cannot open file for writing");
  detail::write_be32(out, 0x00000803u);
  detail::write_be32(out, static_cast<std::uint32_t>(img.count));
  detail::write_be32(out, static_cast<std::uint32_t>(img.rows));
  detail::write_be32(out, static_cast<std::uint32_t>(img.cols));
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IdxError(path + ": write failed");
}

inline void save_idx_labels(const std::string& path, const IdxLabels& lab) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IdxError(path + ": cannot open file for writing");
  detail::write_be32(out, 0x00000801u);
  detail::write_be32(out, static_cast<std::uint32_t>(lab.labels.size()));
  out.write(reinterpret_cast<const char*>(lab.labels.data()),
            static_cast<std::streamsize>(lab.labels.size()));
  if (!out) throw IdxError(path + ": write failed");
}

}  // namespace spinsnn
