#include "recon/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace recon {

namespace {

// mt19937_64 output mapped to [0,1) doubles explicitly; the engine itself is
// fully specified by the standard, so streams are identical everywhere.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
};

constexpr double kPi = 3.14159265358979323846;

}  // namespace

std::vector<PointSample> generate_cloud(const SyntheticCloudSpec& spec) {
    if (spec.count < 1) throw std::invalid_argument("generate_cloud: count must be >= 1");
    if (!(spec.radius > 0.0))
        throw std::invalid_argument("generate_cloud: radius must be positive");
    if (spec.density_skew < 1.0)
        throw std::invalid_argument("generate_cloud: density_skew must be >= 1");
    if (spec.hole_cap_angle < 0.0 || spec.noise_sigma < 0.0 ||
        spec.orientation_error_deg < 0.0)
        throw std::invalid_argument("generate_cloud: perturbation fields must be >= 0");

    Rng rng(spec.seed);
    const double cap_cos = std::cos(spec.hole_cap_angle);
    const double keep_fraction = 1.0 / spec.density_skew;

    std::vector<PointSample> out;
    out.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        // Fixed draw count per candidate keeps the stream layout stable.
        const double u1 = rng.uniform();
        const double u2 = rng.uniform();
        const double keep = rng.uniform();
        double radial = 0.0;
        if (spec.noise_sigma > 0.0) {
            const double a = rng.uniform();
            const double b = rng.uniform();
            radial = spec.noise_sigma *
                     std::sqrt(-2.0 * std::log(1.0 - a)) * std::cos(2.0 * kPi * b);
        }
        double tilt_azimuth = 0.0;
        if (spec.orientation_error_deg > 0.0) tilt_azimuth = 2.0 * kPi * rng.uniform();

        const double z = 1.0 - 2.0 * u1;
        const double phi = 2.0 * kPi * u2;
        const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 dir{rxy * std::cos(phi), rxy * std::sin(phi), z};

        if (spec.hole_cap_angle > 0.0 && z > cap_cos) continue;
        if (dir.x < 0.0 && keep >= keep_fraction) continue;

        Vec3 n = dir;
        if (spec.orientation_error_deg > 0.0) {
            // Tilt by exactly the requested angle around a seeded axis
            // perpendicular to the normal.
            const Vec3 ref = std::abs(dir.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
            const Vec3 t1 = normalized(cross(dir, ref));
            const Vec3 t2 = cross(dir, t1);
            const Vec3 axis = std::cos(tilt_azimuth) * t1 + std::sin(tilt_azimuth) * t2;
            const double ang = spec.orientation_error_deg * kPi / 180.0;
            n = std::cos(ang) * dir + std::sin(ang) * cross(axis, dir);
        }

        out.push_back({(spec.radius + radial) * dir, n});
    }
    return out;
}

}  // namespace recon
