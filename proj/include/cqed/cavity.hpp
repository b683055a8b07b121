#pragma once

#include <vector>

#include "cqed/quantum.hpp"

namespace cqed {

enum class QubitState { Ground, Excited, Mixed };

/// Resonator offset conditioned on the qubit: g → −χ, e → +χ, mixed → 0.
double dressed_resonance_shift(QubitState state, double chi);

/// Intra-cavity field α(t) together with the input amplitude a_in(t) that drove it,
/// both in units of sqrt(photons) and sqrt(photons/s) respectively.
struct CavityResponse {
  std::vector<double> times;
  std::vector<Complex> alpha;
  std::vector<Complex> a_in;
  double kappa_ext = 0.0;
  double probe_frequency = 0.0;

  /// a_out = a_in − i sqrt(2π κ_ext) α at sample k.
  Complex output(std::size_t k) const;
};

/// Pointwise population-weighted mixture p·excited + (1 − p)·ground.
CavityResponse mix_responses(const CavityResponse& ground, const CavityResponse& excited,
                             double excited_fraction);

}  // namespace cqed
