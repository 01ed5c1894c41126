#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "kfp/domain.hpp"

namespace kfp {

enum class PotentialKind { wrapped_gaussian, raised_cosine, uniform_bump };

PotentialKind potential_kind_from_string(const std::string& s);
std::string to_string(PotentialKind k);

// Interaction potential on the torus: nonnegative, even, renormalized so the
// grid integral is exactly 1. Periodization sums images over the |z| <= 1
// shell. The convolution symbol is the scaled DFT of the grid samples, pinned
// to symbol[0] = 1 so U * 1 = 1 holds exactly.
struct PotentialSpec {
    DomainSpec dom;
    PotentialKind kind = PotentialKind::wrapped_gaussian;
    double param = 0.5; // sigma (wrapped_gaussian) or half-width (others)
    std::vector<double> nodal;   // samples at displacement nodes r_n = 2L n/Nx, >= 0
    std::vector<double> symbol;  // n_spatial() real values, symbol[bin of 0] = 1
    double norm_l1 = 1.0;
    double norm_l2 = 0.0;
    double norm_linf = 0.0;

    // band-limited kernel value at an arbitrary offset (used by the particle
    // force oracle); r is a d-vector displacement
    double eval(const std::array<double, 2>& r) const;
};

PotentialSpec make_potential(const DomainSpec& dom, PotentialKind kind, double param);

// Spatial control profile alpha(x), one component per velocity dimension.
// Components are stored 2/3-filtered so that products with alpha are exactly
// dealias-closed; norms refer to the filtered representative.
struct ControlShape {
    DomainSpec dom;
    std::array<std::vector<std::complex<double>>, 2> coeff; // per component
    std::array<std::vector<double>, 2> nodal;
    double norm_l2 = 0.0;  // sqrt(sum_i ||alpha_i||_{L2}^2)
    double norm_linf = 0.0;

    double eval_component(int i, const std::array<double, 2>& x) const;
};

// Centered Gaussian bump scaled to ||alpha||_{L2(torus)} = amplitude,
// split evenly across components for d = 2.
ControlShape make_alpha_gaussian(const DomainSpec& dom, double sigma, double amplitude);
// alpha_i(x) = value for every i (filtered representative keeps it exactly)
ControlShape make_alpha_constant(const DomainSpec& dom, double value);
// arbitrary nodal samples per component; filtered, not renormalized
ControlShape make_alpha_from_nodal(const DomainSpec& dom,
                                   const std::array<std::vector<double>, 2>& values);

} // namespace kfp
