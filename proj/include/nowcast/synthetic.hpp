#pragma once

#include <cstdint>

#include "nowcast/data.hpp"

namespace nowcast {

// Parameters of the synthetic precipitation generator used in place of the
// proprietary radar archive. Every field is physical except the seed.
struct SyntheticConfig {
  int height = 32;
  int width = 32;
  int min_cells = 2;
  int max_cells = 4;
  double min_amplitude_mmh = 15.0;  // peak rain rate of a cell
  double max_amplitude_mmh = 60.0;
  double min_radius_px = 2.0;  // Gaussian sigma of the cell profile
  double max_radius_px = 5.0;
  double min_velocity_px = -1.0;   // per-frame advection, drawn per axis
  double max_velocity_px = 1.0;
  double walk_scale_px = 0.0;      // random-walk jitter on the displacement
  double growth_noise_scale = 0.0; // sigma of per-step log-normal growth
  int sequence_length = 15;
  double timestep_min = 15.0;
  double resolution_km = 5.0;
  uint64_t seed = 0;

  void validate() const;
};

// Deterministic function of the seed. Rain cells are rasterized once as
// Gaussian bumps, then each frame shifts the cell's initial layer by its
// accumulated displacement (bilinear weights) and scales it by the
// accumulated growth factor. Bilinear shifting never creates mass, so with
// growth noise disabled the domain total can only decay through boundary
// outflow.
Sequence generate_synthetic_sequence(const SyntheticConfig& config);

}  // namespace nowcast
