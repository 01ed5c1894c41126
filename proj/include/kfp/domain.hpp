#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kfp {

// Phase-space discretization parameters.
//
// Space is the torus [-L, L)^d resolved by Nx Fourier modes per dimension
// (stored in FFT bin order, signed mode j in {-Nx/2, ..., Nx/2-1}).
// Velocity is resolved by probabilists' Hermite functions H_k, orthonormal
// against the standard Gaussian weight, degrees 0..Kv per dimension.
struct DomainSpec {
    int d = 1;       // spatial/velocity dimension, 1 or 2
    int Nx = 64;     // Fourier modes per spatial dimension (even)
    int Kv = 31;     // highest Hermite degree per velocity dimension
    double L = 3.14159265358979323846;

    void validate() const {
        if (d != 1 && d != 2)
            throw std::invalid_argument("DomainSpec: d must be 1 or 2");
        if (Nx < 4 || Nx % 2 != 0)
            throw std::invalid_argument("DomainSpec: Nx must be even and >= 4");
        if (Kv < 1)
            throw std::invalid_argument("DomainSpec: Kv must be >= 1");
        if (Kv > 180)
            throw std::invalid_argument("DomainSpec: Kv above 180 loses Hermite accuracy");
        if (!(L > 0.0))
            throw std::invalid_argument("DomainSpec: L must be positive");
    }

    bool operator==(const DomainSpec&) const = default;

    // number of spatial bins / Hermite multi-indices / total coefficients
    std::size_t n_spatial() const {
        std::size_t n = static_cast<std::size_t>(Nx);
        return d == 1 ? n : n * n;
    }
    std::size_t n_hermite() const {
        std::size_t n = static_cast<std::size_t>(Kv + 1);
        return d == 1 ? n : n * n;
    }
    std::size_t size() const { return n_spatial() * n_hermite(); }

    // FFT bin -> signed mode number
    int mode_of_bin(int t) const { return t < Nx / 2 ? t : t - Nx; }
    // signed mode -> FFT bin
    int bin_of_mode(int j) const { return j >= 0 ? j : j + Nx; }

    // spatial node n -> coordinate in [-L, L)
    double xnode(int n) const { return -L + 2.0 * L * n / Nx; }
    double cell_width() const { return 2.0 * L / Nx; }
    double volume() const { double v = 2.0 * L; return d == 1 ? v : v * v; }

    // highest |j| kept by the quadratic-product dealias mask (2/3 rule):
    // 3*jmax < Nx guarantees products of kept modes cannot alias back into
    // the kept band.
    int dealias_limit() const { return (Nx - 1) / 3; }

    // decompose flat indices
    std::array<int, 2> kpair(std::size_t kflat) const {
        if (d == 1) return {static_cast<int>(kflat), 0};
        int K1 = Kv + 1;
        return {static_cast<int>(kflat % K1), static_cast<int>(kflat / K1)};
    }
    std::size_t kflat(int k1, int k2 = 0) const {
        return d == 1 ? static_cast<std::size_t>(k1)
                      : static_cast<std::size_t>(k2) * (Kv + 1) + k1;
    }
    int kabs(std::size_t kf) const {
        auto p = kpair(kf);
        return p[0] + p[1];
    }
    std::array<int, 2> tpair(std::size_t tflat) const {
        if (d == 1) return {static_cast<int>(tflat), 0};
        return {static_cast<int>(tflat % Nx), static_cast<int>(tflat / Nx)};
    }
    std::size_t tflat(int t1, int t2 = 0) const {
        return d == 1 ? static_cast<std::size_t>(t1)
                      : static_cast<std::size_t>(t2) * Nx + t1;
    }
};

} // namespace kfp
