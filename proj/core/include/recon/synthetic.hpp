#pragma once

#include <cstdint>
#include <vector>

#include "recon/field.hpp"

namespace recon {

/// Seeded synthetic sphere cloud. `count` is the number of candidate draws;
/// the hole and density-skew rejections thin the emitted set, so the output
/// size is count minus the rejected candidates.
struct SyntheticCloudSpec {
    int count = 180;
    double radius = 1.0;
    double hole_cap_angle = 0.0;        // radians; cap removed around the +z pole
    double density_skew = 1.0;          // x>=0 hemisphere keeps all, x<0 keeps 1/skew
    double noise_sigma = 0.0;           // radial Gaussian noise (world units)
    double orientation_error_deg = 0.0; // exact tilt applied to each normal
    std::uint64_t seed = 1;
};

/// Area-uniform sphere sampling with exact outward radial normals, then the
/// requested perturbations. Deterministic for a given configuration on any
/// platform: the generator draws a fixed number of variates per candidate.
std::vector<PointSample> generate_cloud(const SyntheticCloudSpec& spec);

}  // namespace recon
