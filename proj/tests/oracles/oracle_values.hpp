// Generated by tests/oracles/gen_oracles.py; do not edit.
#pragma once

#include <cstddef>

namespace oracle {

inline constexpr double kQuantileN21 = 3.0000010494310450072;
inline constexpr double kEnergyK0Std = -0.79788456080286535588;
inline constexpr double kRbfK0Var2 = 0.7071067811865475244;
inline constexpr double kLaplaceK0Var1 = 0.5109685125429495085;
inline constexpr double kKlN0N1 = 0.5;
inline constexpr double kKlGeneric = 1.8781084888465937925;
inline constexpr double kEnergyN0N2 = 1.9442598324490237363;
inline constexpr double kEnergyGeneric = 1.1731329374210644115;
inline constexpr double kRbfGeneric = 0.34857942093191003101;
inline constexpr double kPdfL2N0N2 = 0.35663583483745893528;
inline constexpr double kPdfL2Generic = 0.26901840981341024628;
inline constexpr double kW2N01N04 = 1.0;
inline constexpr double kW1Generic = 0.77930701141373323717;
inline constexpr double kFdeObjectiveKl = 0.010050335853501441184;
inline constexpr double kCoulombSquare = 4.3741461145540254589;
inline constexpr double kDpiCycleHalf = 0.66666666666666666667;
inline constexpr double kLaplaceGeneric = 0.26406885602368577798;
inline constexpr std::size_t kChooseT1000 = 34;
inline constexpr std::size_t kChooseT2 = 0;
inline constexpr std::size_t kChooseT1000Cd10 = 17;

}  // namespace oracle
