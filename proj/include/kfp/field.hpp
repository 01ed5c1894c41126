#pragma once

#include <array>
#include <complex>
#include <vector>

#include "kfp/domain.hpp"

namespace kfp {

// Coefficient-space representation of a perturbation y(x, v):
//   y = sum_{j,k} c_{j,k} exp(i pi j (x+L)/L) H_k(v),
// stored as n_hermite() blocks of n_spatial() complex values (Hermite slice
// major, spatial FFT bin order inside a slice).
//
// Fields representing real-valued y keep conjugate-symmetric slices; the
// Nyquist rows (any |j_i| = Nx/2) are held at zero so differentiation and
// symmetry stay unambiguous. Operators preserve both properties.
struct SpectralField {
    DomainSpec dom;
    std::vector<std::complex<double>> c;

    SpectralField() = default;
    explicit SpectralField(const DomainSpec& dm)
        : dom(dm), c(dm.size(), std::complex<double>(0.0, 0.0)) {}

    std::complex<double>& at(std::size_t kf, std::size_t tf) {
        return c[kf * dom.n_spatial() + tf];
    }
    const std::complex<double>& at(std::size_t kf, std::size_t tf) const {
        return c[kf * dom.n_spatial() + tf];
    }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    // this += s * o
    void axpy(double s, const SpectralField& o);

    // sqrt((2L)^d sum |c|^2): the mu-weighted L^2 norm
    double norm_Y() const;
    // sqrt((2L)^d sum (1+|k|) |c|^2)
    double norm_Vv() const;
    // sqrt((2L)^d sum |c|^2 / (1+|k|)): dual norm on the truncated basis
    double dual_norm_Vv() const;

    // average conjugate-symmetry + zero Nyquist rows (projection onto
    // representable real fields)
    void project_real();
    // max |c_{j,k} - conj(c_{-j,k})| over non-Nyquist bins
    double conj_symmetry_residual() const;
};

// (2L)^d Re sum a conj(b)
double inner_Y(const SpectralField& a, const SpectralField& b);
// (2L)^d Re sum (1+|k|) a conj(b)
double inner_Vv(const SpectralField& a, const SpectralField& b);

// Nodal velocity moments of mu*y: rho(x) = int mu y dv (Hermite slice k = 0)
// and rho_v[i](x) = int v_i mu y dv (slice k = e_i).
struct MomentFields {
    DomainSpec dom;
    std::vector<double> rho;
    std::array<std::vector<double>, 2> rho_v;
};

// Throws std::runtime_error if a nodal imaginary residue exceeds
// 1e-10 * norm_Y (the field was not conjugate-symmetric).
MomentFields moments(const SpectralField& y);

} // namespace kfp
