// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#ifndef CAPA_CHANNEL_HPP
#define CAPA_CHANNEL_HPP

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "capa/aperture.hpp"

namespace capa {

/// Free-space intrinsic impedance, ohms.
inline constexpr double kEta = 120.0 * std::numbers::pi;

/// Speed of light, m/s.
inline constexpr double kSpeedOfLight = 299792458.0;

struct UserRecord {
  Vec3 position;          // r_k, meters; z > 0
  Vec3 rx_polarization;   // unit vector
};

/// A full downlink instance: user geometry, polarizations, carrier, noise
/// power, power budget, and the aperture the channels are evaluated on.
struct Scenario {
  std::vector<UserRecord> users;
  Vec3 tx_polarization = Vec3(0.0, 1.0, 0.0);
  double wavelength = 0.0;    // meters
  double noise_power = 0.0;   // V^2/m^2
  double power_budget = 0.0;  // A^2
  Aperture aperture;
  std::uint64_t seed = 0;     // generator seed, 0 when hand-built

  int num_users() const { return static_cast<int>(users.size()); }

  /// Throws std::invalid_argument on violated invariants (empty user list,
  /// non-unit polarizations, users behind the aperture, non-positive powers).
  void validate() const;
};

/// Channel responses tabulated at quadrature nodes; column k is h_k.
struct ChannelSamples {
  Eigen::MatrixXcd h;  // node_count x K, ohms/m^2
};

/// lambda/2-spaced discrete array occupying the same aperture.
struct SpdaArray {
  std::vector<Vec3> centers;
  double effective_area = 0.0;  // A_d, m^2
  double spacing = 0.0;         // d, meters

  int count() const { return static_cast<int>(centers.size()); }
};

/// Free-space LoS channel response h_k(s) between an aperture point and a
/// user: inverse-distance envelope eta/(2 lambda r), transverse-field
/// polarization projection, and phase advance +2*pi*r/lambda (with the
/// leading +j carried over from the transverse dyadic convention).
/// Throws std::domain_error when the user coincides with the source point.
cxd los_channel_response(const Vec3& s, const UserRecord& user,
                         const Vec3& tx_polarization, double wavelength);

/// Tabulate h_k at every quadrature node for every user.
ChannelSamples sample_channel(const QuadratureGrid& grid,
                              const Scenario& scenario);

/// Axis-aligned box the users are drawn from.
struct UserRegion {
  double ux = 5.0;
  double uy = 5.0;
  double z_min = 15.0;
  double z_max = 30.0;
};

/// Draw K users i.i.d. uniform over the region. Deterministic for a fixed
/// seed; the generator is mt19937_64 with uniforms formed as
/// (x >> 11) * 2^-53 and per-user draw order (x, y, z).
Scenario random_scenario(std::uint64_t seed, int num_users,
                         const UserRegion& region, const Aperture& aperture,
                         double wavelength, double noise_power,
                         double power_budget);

/// Discrete array covering the aperture: ceil(lx/d) x ceil(ly/d) elements
/// centered on the aperture, centers (n - (N+1)/2)*d per axis. Defaults
/// follow the half-wavelength convention d = lambda/2, A_d =
/// lambda^2/(4*pi); both are overridable (a denser grid with A_d = d^2
/// approaches the continuous integral as a midpoint Riemann sum).
SpdaArray make_spda_array(const Aperture& aperture, double wavelength,
                          double spacing = 0.0, double effective_area = 0.0);

/// Entry (n, k) = sqrt(A_d) * h_k(center_n): the point-sampled discrete
/// channel matrix H (count x K).
Eigen::MatrixXcd spda_channels(const SpdaArray& array,
                               const Scenario& scenario);

/// JSON round-trip for scenarios (positions in meters, powers as stored).
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);

}  // namespace capa

#endif  // CAPA_CHANNEL_HPP
