#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsnn/idx.hpp"

// Dataset preparation on top of the IDX containers: bilinear resampling (to
// lift a small source resolution to the working input size) and a
// deterministic shift-jitter expansion that turns a modest corpus into a
// larger training set without inventing pixel content. Both keep uint8
// pixels, so the result can be saved back to IDX or fed straight to the rate
// encoder after a /255 normalization.

namespace spinsnn {

inline IdxImages upscale_bilinear(const IdxImages& src, int out_rows, int out_cols) {
  if (src.rows <= 0 || src.cols <= 0)
    throw std::invalid_argument("upscale_bilinear: source images are empty");
  if (out_rows <= 0 || out_cols <= 0)
    throw std::invalid_argument("upscale_bilinear: target size must be positive");
  IdxImages out;
  out.count = src.count;
  out.rows = out_rows;
  out.cols = out_cols;
  out.pixels.resize(static_cast<std::size_t>(src.count) * out_rows * out_cols);

  // Align pixel centers of the two grids so the image is stretched, not
  // shifted: target center (r+0.5)/out maps to source coordinate
  // (r+0.5)*in/out - 0.5, clamped at the borders.
  const double ry = static_cast<double>(src.rows) / out_rows;
  const double rx = static_cast<double>(src.cols) / out_cols;
  for (int k = 0; k < src.count; ++k) {
    const std::uint8_t* in = src.image(k);
    std::uint8_t* dst =
        out.pixels.data() + static_cast<std::size_t>(k) * out_rows * out_cols;
    for (int r = 0; r < out_rows; ++r) {
      const double sy = std::clamp((r + 0.5) * ry - 0.5, 0.0, src.rows - 1.0);
      const int y0 = static_cast<int>(sy);
      const int y1 = std::min(y0 + 1, src.rows - 1);
      const double fy = sy - y0;
      for (int c = 0; c < out_cols; ++c) {
        const double sx = std::clamp((c + 0.5) * rx - 0.5, 0.0, src.cols - 1.0);
        const int x0 = static_cast<int>(sx);
        const int x1 = std::min(x0 + 1, src.cols - 1);
        const double fx = sx - x0;
        const double top = in[y0 * src.cols + x0] * (1.0 - fx) + in[y0 * src.cols + x1] * fx;
        const double bot = in[y1 * src.cols + x0] * (1.0 - fx) + in[y1 * src.cols + x1] * fx;
        dst[r * out_cols + c] =
            static_cast<std::uint8_t>(std::lround(top * (1.0 - fy) + bot * fy));
      }
    }
  }
  return out;
}

// Expands (images, labels) to exactly target_count pairs by cycling through
// the corpus with integer pixel shifts. Pass k over the corpus uses the k-th
// entry of a fixed shift table (identity first), so the expansion is a pure
// function of the inputs - no RNG - and labels follow their images. Shifted
// pixels that leave the frame are dropped; vacated pixels are zero.
inline void augment_shifts(const IdxImages& images, const IdxLabels& labels,
                           int target_count, IdxImages& out_images,
                           IdxLabels& out_labels) {
  if (images.count == 0) throw std::invalid_argument("augment_shifts: empty corpus");
  if (static_cast<std::size_t>(images.count) != labels.labels.size())
    throw std::invalid_argument("augment_shifts: " + std::to_string(images.count) +
                                " images but " + std::to_string(labels.labels.size()) +
                                " labels");
  if (target_count < images.count)
    throw std::invalid_argument("augment_shifts: target " + std::to_string(target_count) +
                                " is smaller than the corpus (" +
                                std::to_string(images.count) + ")");
  static constexpr int kShifts[][2] = {
      {0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1},
      {2, 0}, {0, 2}, {-2, 0}, {0, -2},
  };
  constexpr int kNumShifts = static_cast<int>(sizeof(kShifts) / sizeof(kShifts[0]));
  const int passes = (target_count + images.count - 1) / images.count;
  if (passes > kNumShifts)
    throw std::invalid_argument("augment_shifts: target needs " + std::to_string(passes) +
                                " passes but only " + std::to_string(kNumShifts) +
                                " distinct shifts exist");

  const int rows = images.rows, cols = images.cols;
  out_images.count = target_count;
  out_images.rows = rows;
  out_images.cols = cols;
  out_images.pixels.assign(static_cast<std::size_t>(target_count) * rows * cols, 0);
  out_labels.labels.resize(static_cast<std::size_t>(target_count));

  for (int n = 0; n < target_count; ++n) {
    const int pass = n / images.count;
    const int k = n % images.count;
    const int dy = kShifts[pass][0], dx = kShifts[pass][1];
    const std::uint8_t* in = images.image(k);
    std::uint8_t* dst = out_images.pixels.data() + static_cast<std::size_t>(n) * rows * cols;
    for (int r = 0; r < rows; ++r) {
      const int sr = r - dy;
      if (sr < 0 || sr >= rows) continue;
      for (int c = 0; c < cols; ++c) {
        const int sc = c - dx;
        if (sc < 0 || sc >= cols) continue;
        dst[r * cols + c] = in[sr * cols + sc];
      }
    }
    out_labels.labels[n] = labels.labels[k];
  }
}

// Normalizes one image to [0,1] intensities for the rate encoder.
inline std::vector<double> image_intensity(const IdxImages& images, int k) {
  if (k < 0 || k >= images.count)
    throw std::out_of_range("image_intensity: index " + std::to_string(k) + " of " +
                            std::to_string(images.count));
  const std::uint8_t* p = images.image(k);
  std::vector<double> v(static_cast<std::size_t>(images.rows) * images.cols);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = p[i] / 255.0;
  return v;
}

}  // namespace spinsnn
