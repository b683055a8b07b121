#pragma once

namespace cqed {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kPlanck = 6.62607015e-34;

}  // namespace cqed
