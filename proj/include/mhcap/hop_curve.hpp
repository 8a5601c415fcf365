#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

namespace mhcap {

enum class HopMethod {
  ExactRandom1D,
  ExactFurthest1D,
  LinearApprox,
  GammaBaseline,
  Approx2D,
  MonteCarlo,
};

struct HopSample {
  double x;     // distance from source, meters
  double hops;  // expected forwarding transmissions to exceed x
  std::optional<double> std_error;  // present iff Monte Carlo
};

// Tabulated N(x) with provenance. x strictly increasing, hops nondecreasing.
struct HopCurve {
  HopMethod method = HopMethod::MonteCarlo;
  std::vector<HopSample> samples;
  double r_tx = 0.0;
  std::optional<double> lambda;  // absent for density-free curves

  // Window-difference curves (hidden-node counts) are not monotone; pass
  // require_monotone = false for those.
  void validate(bool require_monotone = true) const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      bool mc = method == HopMethod::MonteCarlo;
      if (samples[i].std_error.has_value() != mc)
        throw std::invalid_argument("HopCurve: std_error present iff Monte Carlo");
      if (i == 0) continue;
      if (!(samples[i].x > samples[i - 1].x))
        throw std::invalid_argument("HopCurve: x must be strictly increasing");
      if (require_monotone && samples[i].hops < samples[i - 1].hops)
        throw std::invalid_argument("HopCurve: hops must be nondecreasing");
    }
  }
};

}  // namespace mhcap
