#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kfp/constants.hpp"
#include "kfp/operators.hpp"

namespace kfp {

// Decaying random field: coefficient magnitudes ~ (1+|j|^2)^{-1} (1+|k|)^{-1}
// with random phases, made conjugate-symmetric, Nyquist rows zero. With
// zero_locked_modes the conserved (j=0, k=0) and (j=0, k=e_i) coefficients
// are removed, which matters for decay studies.
SpectralField random_field(const DomainSpec& dom, std::uint64_t seed,
                           std::uint64_t tag, bool zero_locked_modes = false);

struct CheckResult {
    std::string name;
    int samples = 0;
    double worst = 0.0;     // identities: worst relative defect;
                            // inequalities: worst lhs/rhs ratio
    double tolerance = 0.0; // pass threshold on `worst`
    bool pass = false;
};

// Structural identities of the discretization, on random fields:
// skew-adjointness of transport, the dissipation identity
// <A y, y>_Y = -|grad_v y|_Y^2, <(R0 + I) y, y>_Y = |y|_Vv^2, N(1) = B,
// and conservation of the (j=0, k=0) and (j=0, k=e_i) modes by the full
// uncontrolled right-hand side.
std::vector<CheckResult> check_identity_suite(const DomainSpec& dom,
                                              const PotentialSpec& U,
                                              const ControlShape& alpha,
                                              int samples, std::uint64_t seed);

// Sharp discrete inequalities behind the fixed-point argument, with all
// norms computed on the grid (ratios may touch 1): alignment bound,
// convolution sup bound, dual-norm and Lipschitz bounds for both quadratic
// terms (stationary and along short trajectories), and the control-coupling
// bound.
std::vector<CheckResult> check_inequality_suite(const DomainSpec& dom,
                                                const PotentialSpec& U,
                                                const ControlShape& alpha,
                                                int samples, std::uint64_t seed);

// Empirical constants: the linear-solve stability ratio from randomized
// probes, the control-coupling norm by power iteration, the derived
// smallness thresholds, and a growth surrogate maxed over sampled controlled
// runs and sourced solves. Advisory numbers, not proofs.
ConstantsTable estimate_constants(const DomainSpec& dom, const PotentialSpec& U,
                                  const ControlShape& alpha, int samples,
                                  std::uint64_t seed);

} // namespace kfp
