#pragma once

#include "kfp/field.hpp"
#include "kfp/potential.hpp"

namespace kfp {

// Coefficient-space operators for the perturbation equation
//
//   dy/dt = A y + D y - h1(y) - h2(y) + u (N y + B)
//
// with A y   = Lap_v y - v.grad_v y - v.grad_x y
//      D y   = (U * rho_{mu v y}) . v
//      h1(y) = (U * rho_{mu y}) R0 y,          R0 = -Lap_v + v.grad_v
//      h2(y) = (U * rho_{mu v y}) . (grad_v y - y v)
//      N y   = alpha . (grad_v y - y v)
//      B     = -alpha . v
//
// Velocity factors act through the Hermite ladder (exact on the truncated
// basis); spatial products are dealias-closed by the 2/3 mask. Every operator
// maps conjugate-symmetric fields to conjugate-symmetric fields.

using SpatialCoeffs = std::vector<std::complex<double>>;

// --- ladder primitives (exact) ---
// d/dv_i (lowering): out_k = sqrt(k_i + 1) y_{k+e_i}
SpectralField annihilate(const SpectralField& y, int i);
// (v_i - d/dv_i) (raising): out_k = sqrt(k_i) y_{k-e_i}
SpectralField create(const SpectralField& y, int i);
// v_i y = create + annihilate
SpectralField mult_v(const SpectralField& y, int i);

// --- linear operators ---
// Ornstein-Uhlenbeck part (Lap_v - v.grad_v): diagonal -|k|
SpectralField apply_ou(const SpectralField& y);
// number operator R0 = -Lap_v + v.grad_v: diagonal |k|
SpectralField apply_number(const SpectralField& y);
// v . grad_x y
SpectralField apply_transport(const SpectralField& y);
// A y = apply_ou(y) - apply_transport(y)
SpectralField apply_generator(const SpectralField& y);

// convolution with U: multiply spatial coefficients by the symbol
SpatialCoeffs convolve(const PotentialSpec& U, const SpatialCoeffs& g);

// moment-drift term D y = (U * rho_{mu v y}) . v; lives on the k = e_i slices
SpectralField alignment_drift(const SpectralField& y, const PotentialSpec& U);

// dealias-closed product of a spatial profile with a field:
// mask(a) times mask(g) nodally, masked again
SpectralField xprod(const DomainSpec& dom, const SpatialCoeffs& a, const SpectralField& g);

// transpose of a |-> xprod(a, q) for fixed real q: spatial contraction
// sum_k conj(q_k(x)) g_k(x), masked
SpatialCoeffs xprod_contract(const SpectralField& q, const SpectralField& g);

// --- nonlinear terms ---
// h1(y) = (U * rho_{mu y}) R0 y
SpectralField nl_density(const SpectralField& y, const PotentialSpec& U);
// h2(y) = sum_i (U * rho_{mu v y})_i (d/dv_i - v_i) y
SpectralField nl_momentum(const SpectralField& y, const PotentialSpec& U);

// directional derivatives of the quadratic terms at y in direction w
SpectralField nl_density_diff(const SpectralField& y, const PotentialSpec& U,
                              const SpectralField& w);
SpectralField nl_momentum_diff(const SpectralField& y, const PotentialSpec& U,
                               const SpectralField& w);
// adjoints of those derivatives (plain complex inner product; the global
// volume factor cancels)
SpectralField nl_density_diff_adjoint(const SpectralField& y, const PotentialSpec& U,
                                      const SpectralField& g);
SpectralField nl_momentum_diff_adjoint(const SpectralField& y, const PotentialSpec& U,
                                       const SpectralField& g);

// --- control operators ---
// N y = sum_i alpha_i (d/dv_i - v_i) y
SpectralField apply_control_coupling(const SpectralField& y, const ControlShape& alpha);
SpectralField control_coupling_adjoint(const SpectralField& g, const ControlShape& alpha);
// B = -alpha . v as a fixed element of Y; satisfies N(1) = B on the grid
SpectralField control_source(const ControlShape& alpha);

// --- assembled right-hand side ---
struct RhsOptions {
    bool alignment = true; // D y
    bool nonlinear = true; // -h1 - h2
    bool control = true;   // u (N y + B)
};

SpectralField assemble_rhs(const SpectralField& y, double u, const PotentialSpec& U,
                           const ControlShape& alpha, const RhsOptions& opts = {});

} // namespace kfp
