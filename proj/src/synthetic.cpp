#include "nowcast/synthetic.hpp"

#include <cmath>
#include <vector>

#include "nowcast/errors.hpp"
#include "nowcast/rng.hpp"

namespace nowcast {

void SyntheticConfig::validate() const {
  if (height <= 0 || width <= 0) throw ConfigError("grid dimensions must be positive");
  if (min_cells < 0 || max_cells < min_cells) throw ConfigError("bad cell count range");
  if (min_amplitude_mmh < 0.0 || max_amplitude_mmh < min_amplitude_mmh)
    throw ConfigError("bad amplitude range");
  if (min_radius_px <= 0.0 || max_radius_px < min_radius_px)
    throw ConfigError("bad radius range");
  if (max_velocity_px < min_velocity_px) throw ConfigError("bad velocity range");
  if (walk_scale_px < 0.0 || growth_noise_scale < 0.0)
    throw ConfigError("noise scales must be non-negative");
  if (sequence_length < 1) throw ConfigError("sequence length must be >= 1");
  if (timestep_min <= 0.0) throw ConfigError("timestep must be positive");
}

namespace {

struct Cell {
  Tensor layer;      // initial rasterized bump, (H, W)
  double vr, vc;     // constant velocity, px/frame
  double off_r = 0.0, off_c = 0.0;  // accumulated displacement
  double gain = 1.0;                // accumulated growth factor
};

// Adds `layer` translated by (dr, dc) into `dst` using bilinear weights.
// Source mass that lands outside the grid is dropped.
void add_shifted(const Tensor& layer, double dr, double dc, int h, int w,
                 Tensor& dst, double gain) {
  const int ir = static_cast<int>(std::floor(dr));
  const int ic = static_cast<int>(std::floor(dc));
  const double fr = dr - ir, fc = dc - ic;
  const double w00 = (1.0 - fr) * (1.0 - fc);
  const double w01 = (1.0 - fr) * fc;
  const double w10 = fr * (1.0 - fc);
  const double w11 = fr * fc;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double v = layer[static_cast<size_t>(r) * w + c] * gain;
      if (v == 0.0) continue;
      const int tr = r + ir, tc = c + ic;
      auto put = [&](int rr, int cc, double ww) {
        if (rr >= 0 && rr < h && cc >= 0 && cc < w && ww != 0.0)
          dst[static_cast<size_t>(rr) * w + cc] += v * ww;
      };
      put(tr, tc, w00);
      put(tr, tc + 1, w01);
      put(tr + 1, tc, w10);
      put(tr + 1, tc + 1, w11);
    }
  }
}

}  // namespace

Sequence generate_synthetic_sequence(const SyntheticConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.seed, 0x5eedu));

  const int n_cells =
      cfg.min_cells +
      static_cast<int>(rng.below(static_cast<uint64_t>(cfg.max_cells - cfg.min_cells + 1)));

  std::vector<Cell> cells;
  cells.reserve(static_cast<size_t>(n_cells));
  for (int k = 0; k < n_cells; ++k) {
    Cell cell;
    cell.layer = Tensor({cfg.height, cfg.width});
    const double cr = rng.uniform(0.0, cfg.height - 1.0);
    const double cc = rng.uniform(0.0, cfg.width - 1.0);
    const double amp = rng.uniform(cfg.min_amplitude_mmh, cfg.max_amplitude_mmh);
    const double sigma = rng.uniform(cfg.min_radius_px, cfg.max_radius_px);
    for (int r = 0; r < cfg.height; ++r) {
      for (int c = 0; c < cfg.width; ++c) {
        const double d2 = (r - cr) * (r - cr) + (c - cc) * (c - cc);
        const double v = amp * std::exp(-d2 / (2.0 * sigma * sigma));
        if (v > 1e-8) cell.layer[static_cast<size_t>(r) * cfg.width + c] = v;
      }
    }
    cell.vr = rng.uniform(cfg.min_velocity_px, cfg.max_velocity_px);
    cell.vc = rng.uniform(cfg.min_velocity_px, cfg.max_velocity_px);
    cells.push_back(std::move(cell));
  }

  Sequence seq;
  seq.reserve(static_cast<size_t>(cfg.sequence_length));
  for (int t = 0; t < cfg.sequence_length; ++t) {
    if (t > 0) {
      for (auto& cell : cells) {
        cell.off_r += cell.vr;
        cell.off_c += cell.vc;
        if (cfg.walk_scale_px > 0.0) {
          cell.off_r += cfg.walk_scale_px * rng.normal();
          cell.off_c += cfg.walk_scale_px * rng.normal();
        }
        if (cfg.growth_noise_scale > 0.0)
          cell.gain *= std::exp(cfg.growth_noise_scale * rng.normal());
      }
    }
    RainFrame frame(cfg.height, cfg.width, Encoding::Rate,
                    t * cfg.timestep_min, cfg.resolution_km);
    for (const auto& cell : cells)
      add_shifted(cell.layer, cell.off_r, cell.off_c, cfg.height, cfg.width,
                  frame.grid, cell.gain);
    for (int i = 0; i < frame.grid.size(); ++i)
      if (frame.grid[static_cast<size_t>(i)] < 0.0)
        frame.grid[static_cast<size_t>(i)] = 0.0;
    seq.push_back(std::move(frame));
  }
  return seq;
}

}  // namespace nowcast
