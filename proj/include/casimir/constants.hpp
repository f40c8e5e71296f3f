#pragma once

#include <numbers>

namespace casimir::constants {

inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double boltzmann = 1.380649e-23;        // J/K
inline constexpr double speed_of_light = 299792458.0;    // m/s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double pi = std::numbers::pi;

// 1 eV expressed as an angular frequency, e/hbar ~ 1.519267e15 rad/s.
inline constexpr double ev_to_rad_per_s = elementary_charge / hbar;

inline constexpr double ev(double value_ev) { return value_ev * ev_to_rad_per_s; }
inline constexpr double to_ev(double omega) { return omega / ev_to_rad_per_s; }

inline constexpr double nm = 1e-9;
inline constexpr double um = 1e-6;

}  // namespace casimir::constants
