// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace capa {

namespace {

constexpr double kUnitTol = 1e-9;

double uniform01(std::mt19937_64& rng) {
  // Portable 53-bit mantissa mapping, independent of the standard library's
  // distribution implementation.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace

void Scenario::validate() const {
  if (users.empty()) throw std::invalid_argument("scenario: no users");
  if (std::abs(tx_polarization.norm() - 1.0) > kUnitTol)
    throw std::invalid_argument("scenario: tx polarization not unit length");
  for (const auto& u : users) {
    if (std::abs(u.rx_polarization.norm() - 1.0) > kUnitTol)
      throw std::invalid_argument("scenario: rx polarization not unit length");
    if (!(u.position.z() > 0.0))
      throw std::invalid_argument("scenario: user not in front of aperture");
  }
  if (!(wavelength > 0.0))
    throw std::invalid_argument("scenario: wavelength must be positive");
  if (!(noise_power > 0.0))
    throw std::invalid_argument("scenario: noise power must be positive");
  if (!(power_budget > 0.0))
    throw std::invalid_argument("scenario: power budget must be positive");
}

cxd los_channel_response(const Vec3& s, const UserRecord& user,
                         const Vec3& tx_polarization, double wavelength) {
  const Vec3 diff = user.position - s;
  const double r = diff.norm();
  if (!(r > 0.0))
    throw std::domain_error("los_channel_response: user coincides with source point");

  // Transverse-field projector: u_k^T (I - dd^T) u_T with d = diff/r.
  const Vec3 dir = diff / r;
  const double pol = user.rx_polarization.dot(tx_polarization) -
                     user.rx_polarization.dot(dir) * dir.dot(tx_polarization);

  const double mag = kEta / (2.0 * wavelength * r);
  const double phase = 2.0 * std::numbers::pi * r / wavelength;
  // h = conj(h^*) with h^* = -j * mag * e^{-j phase} * pol.
  return cxd(0.0, 1.0) * mag * pol * std::polar(1.0, phase);
}

ChannelSamples sample_channel(const QuadratureGrid& grid,
                              const Scenario& scenario) {
  scenario.validate();
  const int K = scenario.num_users();
  const auto n = static_cast<Eigen::Index>(grid.size());
  ChannelSamples out;
  out.h.resize(n, K);
  for (int k = 0; k < K; ++k)
    for (Eigen::Index j = 0; j < n; ++j)
      out.h(j, k) =
          los_channel_response(grid.nodes[static_cast<std::size_t>(j)],
                               scenario.users[static_cast<std::size_t>(k)],
                               scenario.tx_polarization, scenario.wavelength);
  return out;
}

Scenario random_scenario(std::uint64_t seed, int num_users,
                         const UserRegion& region, const Aperture& aperture,
                         double wavelength, double noise_power,
                         double power_budget) {
  if (num_users < 1)
    throw std::invalid_argument("random_scenario: need at least one user");
  if (!(region.ux > 0.0) || !(region.uy > 0.0) || !(region.z_min > 0.0) ||
      !(region.z_min <= region.z_max))
    throw std::invalid_argument("random_scenario: invalid user region");

  std::mt19937_64 rng(seed);
  Scenario sc;
  sc.seed = seed;
  sc.aperture = aperture;
  sc.wavelength = wavelength;
  sc.noise_power = noise_power;
  sc.power_budget = power_budget;
  sc.tx_polarization = Vec3(0.0, 1.0, 0.0);
  sc.users.reserve(static_cast<std::size_t>(num_users));
  for (int k = 0; k < num_users; ++k) {
    UserRecord u;
    const double x = uniform(rng, -region.ux, region.ux);
    const double y = uniform(rng, -region.uy, region.uy);
    const double z = uniform(rng, region.z_min, region.z_max);
    u.position = Vec3(x, y, z);
    u.rx_polarization = Vec3(0.0, 1.0, 0.0);
    sc.users.push_back(u);
  }
  sc.validate();
  return sc;
}

SpdaArray make_spda_array(const Aperture& aperture, double wavelength,
                          double spacing, double effective_area) {
  if (!(aperture.lx > 0.0) || !(aperture.ly > 0.0))
    throw std::invalid_argument("make_spda_array: invalid aperture");
  if (!(wavelength > 0.0))
    throw std::invalid_argument("make_spda_array: invalid wavelength");
  SpdaArray arr;
  arr.spacing = spacing > 0.0 ? spacing : wavelength / 2.0;
  arr.effective_area = effective_area > 0.0
                           ? effective_area
                           : wavelength * wavelength / (4.0 * std::numbers::pi);
  const int nx = static_cast<int>(std::ceil(aperture.lx / arr.spacing));
  const int ny = static_cast<int>(std::ceil(aperture.ly / arr.spacing));
  arr.centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int iy = 1; iy <= ny; ++iy)
    for (int ix = 1; ix <= nx; ++ix)
      arr.centers.emplace_back((ix - 0.5 * (nx + 1)) * arr.spacing,
                               (iy - 0.5 * (ny + 1)) * arr.spacing, 0.0);
  return arr;
}

Eigen::MatrixXcd spda_channels(const SpdaArray& array,
                               const Scenario& scenario) {
  scenario.validate();
  const int K = scenario.num_users();
  const int N = array.count();
  const double scale = std::sqrt(array.effective_area);
  Eigen::MatrixXcd H(N, K);
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n)
      H(n, k) = scale * los_channel_response(
                            array.centers[static_cast<std::size_t>(n)],
                            scenario.users[static_cast<std::size_t>(k)],
                            scenario.tx_polarization, scenario.wavelength);
  return H;
}

std::string scenario_to_json(const Scenario& scenario) {
  nlohmann::json j;
  j["units"] = {{"position", "m"},
                {"wavelength", "m"},
                {"noise_power", "V^2/m^2"},
                {"power_budget", "A^2"},
                {"aperture", "m"}};
  j["tx_polarization"] = {scenario.tx_polarization.x(),
                          scenario.tx_polarization.y(),
                          scenario.tx_polarization.z()};
  j["wavelength"] = scenario.wavelength;
  j["noise_power"] = scenario.noise_power;
  j["power_budget"] = scenario.power_budget;
  j["aperture"] = {{"lx", scenario.aperture.lx}, {"ly", scenario.aperture.ly}};
  j["seed"] = scenario.seed;
  j["users"] = nlohmann::json::array();
  for (const auto& u : scenario.users) {
    j["users"].push_back(
        {{"position", {u.position.x(), u.position.y(), u.position.z()}},
         {"rx_polarization",
          {u.rx_polarization.x(), u.rx_polarization.y(),
           u.rx_polarization.z()}}});
  }
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Scenario sc;
  const auto& tp = j.at("tx_polarization");
  sc.tx_polarization = Vec3(tp.at(0), tp.at(1), tp.at(2));
  sc.wavelength = j.at("wavelength");
  sc.noise_power = j.at("noise_power");
  sc.power_budget = j.at("power_budget");
  sc.aperture.lx = j.at("aperture").at("lx");
  sc.aperture.ly = j.at("aperture").at("ly");
  sc.seed = j.value("seed", std::uint64_t{0});
  for (const auto& ju : j.at("users")) {
    UserRecord u;
    const auto& p = ju.at("position");
    const auto& r = ju.at("rx_polarization");
    u.position = Vec3(p.at(0), p.at(1), p.at(2));
    u.rx_polarization = Vec3(r.at(0), r.at(1), r.at(2));
    sc.users.push_back(u);
  }
  sc.validate();
  return sc;
}

}  // namespace capa
