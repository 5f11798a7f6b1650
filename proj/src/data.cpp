#include "nowcast/data.hpp"

#include <algorithm>
#include <cmath>

#include "nowcast/errors.hpp"

namespace nowcast {

double RainFrame::total() const {
  double s = 0.0;
  for (int i = 0; i < grid.size(); ++i) s += grid[static_cast<size_t>(i)];
  return s;
}

void RainFrame::validate() const {
  if (height <= 0 || width <= 0) throw ShapeError("frame dimensions must be positive");
  if (grid.size() != height * width) throw ShapeError("grid size mismatch");
  for (int i = 0; i < grid.size(); ++i) {
    const double v = grid[static_cast<size_t>(i)];
    switch (encoding) {
      case Encoding::Rate:
        if (v < 0.0) throw DataError("rate frame has negative cell");
        break;
      case Encoding::Class:
        if (v < 0.0 || v > kNumClasses - 1 || v != std::floor(v))
          throw DataError("class frame has cell outside {0..13}");
        break;
      case Encoding::Normalized:
        if (v < 0.0 || v > 1.0)
          throw DataError("normalized frame has cell outside [0,1]");
        break;
    }
  }
}

ClassTable ClassTable::default_table() {
  // Geometric-style spacing from drizzle to extreme convection; the top class
  // is open-ended with a fixed representative.
  ClassTable t;
  t.boundaries = {0.1, 0.3, 0.6, 1.0,  2.0,  4.0,  6.0,
                  10.0, 15.0, 25.0, 40.0, 60.0, 100.0};
  t.representatives.resize(kNumClasses);
  t.representatives[0] = 0.0;
  for (int k = 1; k < kNumClasses - 1; ++k) {
    t.representatives[static_cast<size_t>(k)] =
        std::sqrt(t.boundaries[static_cast<size_t>(k - 1)] *
                  t.boundaries[static_cast<size_t>(k)]);
  }
  t.representatives[kNumClasses - 1] = 150.0;
  return t;
}

void ClassTable::validate() const {
  if (boundaries.size() != kNumClasses - 1)
    throw ConfigError("class table needs 13 boundaries");
  if (representatives.size() != kNumClasses)
    throw ConfigError("class table needs 14 representatives");
  if (boundaries[0] <= 0.0) throw ConfigError("first boundary must be > 0");
  for (size_t i = 1; i < boundaries.size(); ++i)
    if (boundaries[i] <= boundaries[i - 1])
      throw ConfigError("class boundaries must be strictly increasing");
  for (int k = 0; k < kNumClasses; ++k) {
    const double r = representatives[static_cast<size_t>(k)];
    const double lo = (k == 0) ? 0.0 : boundaries[static_cast<size_t>(k - 1)];
    if (r < lo) throw ConfigError("representative below its class interval");
    if (k < kNumClasses - 1 && r >= boundaries[static_cast<size_t>(k)])
      throw ConfigError("representative above its class interval");
  }
}

int ClassTable::class_of(double rate) const {
  // Largest k with rate >= boundaries[k-1]; class 0 below the first boundary.
  // upper_bound places exact boundary hits in the upper class (left-closed).
  return static_cast<int>(std::upper_bound(boundaries.begin(),
                                           boundaries.end(), rate) -
                          boundaries.begin());
}

double rain_rate_to_reflectivity(double rate_mmh, double floor_dbz) {
  if (rate_mmh < 0.0) throw DomainError("rain rate must be non-negative");
  if (rate_mmh == 0.0) return floor_dbz;
  return 10.0 * std::log10(kZrFactorA * std::pow(rate_mmh, kZrExponentB));
}

double reflectivity_to_rain_rate(double dbz, double floor_dbz) {
  if (dbz <= floor_dbz) return 0.0;
  return std::pow(std::pow(10.0, dbz / 10.0) / kZrFactorA,
                  1.0 / kZrExponentB);
}

RainFrame quantize(const RainFrame& frame, const ClassTable& table) {
  if (frame.encoding != Encoding::Rate)
    throw DataError("quantize expects a rate-encoded frame");
  RainFrame out = frame;
  out.encoding = Encoding::Class;
  for (int i = 0; i < out.grid.size(); ++i)
    out.grid[static_cast<size_t>(i)] =
        table.class_of(frame.grid[static_cast<size_t>(i)]);
  return out;
}

RainFrame dequantize(const RainFrame& frame, const ClassTable& table) {
  if (frame.encoding != Encoding::Class)
    throw DataError("dequantize expects a class-encoded frame");
  RainFrame out = frame;
  out.encoding = Encoding::Rate;
  for (int i = 0; i < out.grid.size(); ++i) {
    const double c = frame.grid[static_cast<size_t>(i)];
    if (c < 0.0 || c > kNumClasses - 1)
      throw DataError("class index outside {0..13}");
    out.grid[static_cast<size_t>(i)] =
        table.representatives[static_cast<size_t>(c)];
  }
  return out;
}

RainFrame normalize(const RainFrame& frame) {
  if (frame.encoding != Encoding::Class)
    throw DataError("normalize expects a class-encoded frame");
  RainFrame out = frame;
  out.encoding = Encoding::Normalized;
  for (int i = 0; i < out.grid.size(); ++i)
    out.grid[static_cast<size_t>(i)] =
        frame.grid[static_cast<size_t>(i)] / (kNumClasses - 1.0);
  return out;
}

RainFrame denormalize(const RainFrame& frame) {
  if (frame.encoding != Encoding::Normalized)
    throw DataError("denormalize expects a normalized frame");
  RainFrame out = frame;
  out.encoding = Encoding::Class;
  for (int i = 0; i < out.grid.size(); ++i) {
    double k = std::round(frame.grid[static_cast<size_t>(i)] *
                          (kNumClasses - 1.0));
    out.grid[static_cast<size_t>(i)] =
        std::clamp(k, 0.0, kNumClasses - 1.0);
  }
  return out;
}

RainFrame downsample(const RainFrame& frame, int factor) {
  if (frame.encoding != Encoding::Rate)
    throw DataError("downsample expects a rate-encoded frame");
  if (factor < 1) throw DomainError("downsample factor must be >= 1");
  if (factor > frame.height || factor > frame.width)
    throw DomainError("downsample factor exceeds frame dimensions");
  if (factor == 1) return frame;

  const int oh = (frame.height + factor - 1) / factor;
  const int ow = (frame.width + factor - 1) / factor;
  RainFrame out(oh, ow, Encoding::Rate, frame.timestamp_min,
                frame.resolution_km * factor);
  for (int br = 0; br < oh; ++br) {
    for (int bc = 0; bc < ow; ++bc) {
      const int r0 = br * factor, c0 = bc * factor;
      const int r1 = std::min(r0 + factor, frame.height);
      const int c1 = std::min(c0 + factor, frame.width);
      double s = 0.0;
      for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) s += frame.at(r, c);
      out.at(br, bc) = s / ((r1 - r0) * (c1 - c0));
    }
  }
  return out;
}

Sequence thin_sequence(const Sequence& seq, int stride) {
  if (stride < 1) throw DomainError("thinning stride must be >= 1");
  Sequence out;
  for (size_t i = 0; i < seq.size(); i += static_cast<size_t>(stride))
    out.push_back(seq[i]);
  return out;
}

bool passes_rain_filter(const std::vector<RainFrame>& frames,
                        double threshold_mmh) {
  double s = 0.0;
  for (const auto& f : frames) {
    if (f.encoding != Encoding::Rate)
      throw DataError("rain filter expects rate-encoded frames");
    s += f.total();
  }
  return s >= threshold_mmh;
}

std::vector<Sample> window_dataset(const Sequence& seq, int n_input,
                                   int n_predict, int stride,
                                   double filter_threshold_mmh) {
  if (n_input < 1 || n_predict < 1) throw DomainError("window sizes must be >= 1");
  if (stride < 1) throw DomainError("window stride must be >= 1");
  std::vector<Sample> out;
  const int win = n_input + n_predict;
  const int len = static_cast<int>(seq.size());
  for (int start = 0; start + win <= len; start += stride) {
    std::vector<RainFrame> frames(seq.begin() + start,
                                  seq.begin() + start + win);
    if (!passes_rain_filter(frames, filter_threshold_mmh)) continue;
    Sample s;
    s.inputs.assign(frames.begin(), frames.begin() + n_input);
    s.targets.assign(frames.begin() + n_input, frames.end());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace nowcast
