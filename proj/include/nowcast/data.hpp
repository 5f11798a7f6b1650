#pragma once

#include <vector>

#include "nowcast/tensor.hpp"

namespace nowcast {

enum class Encoding { Rate, Class, Normalized };

constexpr int kNumClasses = 14;
constexpr double kZrFactorA = 200.0;  // Z = A * R^b (Marshall-Palmer)
constexpr double kZrExponentB = 1.6;
constexpr double kDbzFloor = -32.0;  // no-echo sentinel for zero rain

// One 2-D grid of rain rates (mm/h), class indices (0..13) or normalized
// class values in [0,1], at a timestamp within its sequence.
struct RainFrame {
  Tensor grid;  // shape (height, width)
  int height = 0;
  int width = 0;
  double timestamp_min = 0.0;
  double resolution_km = 1.0;
  Encoding encoding = Encoding::Rate;

  RainFrame() = default;
  RainFrame(int h, int w, Encoding enc, double t_min = 0.0,
            double res_km = 1.0)
      : grid(Tensor({h, w})),
        height(h),
        width(w),
        timestamp_min(t_min),
        resolution_km(res_km),
        encoding(enc) {}

  double& at(int r, int c) { return grid[static_cast<size_t>(r) * width + c]; }
  double at(int r, int c) const {
    return grid[static_cast<size_t>(r) * width + c];
  }
  double total() const;
  void validate() const;  // encoding-specific cell invariants
};

using Sequence = std::vector<RainFrame>;

// A training/evaluation unit: n_i conditioning frames plus >=1 target frames
// at the same cadence.
struct Sample {
  std::vector<RainFrame> inputs;
  std::vector<RainFrame> targets;
};

// Quantization table: 13 strictly increasing rain-rate boundaries and one
// representative rate per class, used for dequantization. Classes are
// left-closed at the boundary: rate == boundaries[k-1] maps to class k.
struct ClassTable {
  std::vector<double> boundaries;       // size 13, mm/h
  std::vector<double> representatives;  // size 14, mm/h

  static ClassTable default_table();
  void validate() const;
  int class_of(double rate) const;
};

// Z-R conversions. Zero rain maps to the dBZ floor; rates at or below the
// floor map back to zero.
double rain_rate_to_reflectivity(double rate_mmh, double floor_dbz = kDbzFloor);
double reflectivity_to_rain_rate(double dbz, double floor_dbz = kDbzFloor);

RainFrame quantize(const RainFrame& frame, const ClassTable& table);
RainFrame dequantize(const RainFrame& frame, const ClassTable& table);
RainFrame normalize(const RainFrame& frame);
RainFrame denormalize(const RainFrame& frame);

// Block-mean spatial downsampling; trailing partial blocks are averaged over
// their actual size. resolution_km scales by the factor.
RainFrame downsample(const RainFrame& frame, int factor);

// Keep every stride-th frame, starting at index 0. Timestamps are preserved.
Sequence thin_sequence(const Sequence& seq, int stride);

// True iff the cumulative rain rate over all cells of all frames reaches the
// threshold (inclusive).
bool passes_rain_filter(const std::vector<RainFrame>& frames,
                        double threshold_mmh);

// Sliding windows of n_i+n_p frames at the given stride over a rate-encoded
// sequence; windows failing the rain filter are dropped. A sequence shorter
// than one window yields an empty list.
std::vector<Sample> window_dataset(const Sequence& seq, int n_input,
                                   int n_predict, int stride,
                                   double filter_threshold_mmh);

}  // namespace nowcast
