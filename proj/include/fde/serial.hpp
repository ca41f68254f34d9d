#pragma once

#include "fde/bellman.hpp"
#include "fde/distributions.hpp"
#include "fde/divergences.hpp"
#include "fde/envs.hpp"

// Straightforward single-threaded versions of the parallel kernels. Tests
// compare against these and the benchmark times both.
namespace fde::serial {

/// Unbiased MMD^2 by the plain double loop, no sorting shortcut.
double mmd_squared_mc(const KernelSpec& kernel, const EmpiricalSample& x, const EmpiricalSample& y);

ReturnTable apply_bellman(const ReturnTable& u, const TabularMDP& mdp, const Policy& pi,
                          const BellmanOptions& opts = {});

double fde_objective(const LQRDataset& fold, const LQRTheta& theta, const LQRTheta& theta_prev, const LQREnv& env,
                     const DivergenceSpec& spec);

}  // namespace fde::serial
