#pragma once

#include <optional>
#include <stdexcept>
#include <variant>

namespace mhcap {

// Per-node radio constants. Distances in meters, capacity in bit/s.
struct RadioParams {
  double r_tx;               // transmission range
  double r_i;                // interference range
  double r_cs;               // carrier sensing range
  double capacity_c;         // single-hop throughput
  double airtime_fraction_a; // fraction of an exchange spent on the data frame

  static RadioParams checked(double r_tx, double r_i, double r_cs,
                             double capacity_c, double airtime_fraction_a) {
    if (!(r_tx > 0.0)) throw std::invalid_argument("RadioParams: r_tx must be positive");
    if (!(r_tx <= r_i && r_i <= r_cs))
      throw std::invalid_argument("RadioParams: require r_tx <= r_i <= r_cs");
    if (!(capacity_c > 0.0)) throw std::invalid_argument("RadioParams: capacity must be positive");
    if (!(airtime_fraction_a > 0.0 && airtime_fraction_a <= 1.0))
      throw std::invalid_argument("RadioParams: airtime fraction must be in (0,1]");
    return RadioParams{r_tx, r_i, r_cs, capacity_c, airtime_fraction_a};
  }

  // Soft sanity check: R_tx < R_i < 2 R_tx <= R_cs. Violations are reported
  // as warnings by callers, never as failures. The last comparison admits
  // equality: the reference setup uses R_cs = 2 R_tx exactly.
  bool typical_ordering() const {
    return r_tx < r_i && r_i < 2.0 * r_tx && 2.0 * r_tx <= r_cs;
  }
};

enum class RoutingPolicy { RandomNeighbor, FurthestNeighbor };

struct LineGeometry {
  double length;  // meters
};

struct SectorGeometry {
  double aop_theta;  // angle of progression, radians, in (0, pi]
  double extent_x;   // region width (source side to destination side), meters
  double extent_y;   // region height, meters
};

struct Deployment {
  double lambda;  // nodes/m in 1-D, nodes/m^2 in 2-D
  std::variant<LineGeometry, SectorGeometry> geometry;

  static Deployment line(double lambda, double length) {
    if (!(lambda > 0.0)) throw std::invalid_argument("Deployment: lambda must be positive");
    if (!(length > 0.0)) throw std::invalid_argument("Deployment: length must be positive");
    return Deployment{lambda, LineGeometry{length}};
  }

  static Deployment sector(double lambda, double aop_theta, double extent_x,
                           double extent_y) {
    if (!(lambda > 0.0)) throw std::invalid_argument("Deployment: lambda must be positive");
    if (!(aop_theta > 0.0 && aop_theta <= 3.14159265358979323846 + 1e-12))
      throw std::invalid_argument("Deployment: aop_theta must be in (0, pi]");
    if (!(extent_x > 0.0 && extent_y > 0.0))
      throw std::invalid_argument("Deployment: extent must be positive");
    return Deployment{lambda, SectorGeometry{aop_theta, extent_x, extent_y}};
  }

  bool is_line() const { return std::holds_alternative<LineGeometry>(geometry); }
};

}  // namespace mhcap
