#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "kfp/domain.hpp"

namespace kfp {

// Batched spatial DFTs between nodal values and Fourier coefficients.
//
// Data layout: `batch` contiguous blocks of dom.n_spatial() complex values,
// spatial index in FFT bin order (row-major t2*Nx + t1 for d = 2).
// Coefficient convention: g(x_n) = sum_j c_j exp(i pi j (x_n + L) / L),
// so coeff -> nodal is the plain unnormalized inverse DFT and nodal -> coeff
// carries the 1/Nx^d factor.
//
// Transforms run on persistent FFTW_ESTIMATE plans with aligned scratch
// buffers, which keeps results bit-reproducible run to run.
void spatial_to_nodal(const DomainSpec& dom, std::complex<double>* data, std::size_t batch);
void spatial_to_coeff(const DomainSpec& dom, std::complex<double>* data, std::size_t batch);

// Zero all coefficients with any |mode| > dom.dealias_limit() (2/3 rule mask).
void apply_dealias_mask(const DomainSpec& dom, std::complex<double>* data, std::size_t batch);

// True if the spatial bin's mode vector survives the dealias mask.
bool bin_in_dealias_band(const DomainSpec& dom, std::size_t tflat);

} // namespace kfp
