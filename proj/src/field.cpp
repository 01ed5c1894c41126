#include "kfp/field.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "kfp/fourier.hpp"

namespace kfp {

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& z : c) z *= s;
    return *this;
}

void SpectralField::axpy(double s, const SpectralField& o) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += s * o.c[i];
}

double SpectralField::norm_Y() const {
    double acc = 0.0;
    for (const auto& z : c) acc += std::norm(z);
    return std::sqrt(dom.volume() * acc);
}

double SpectralField::norm_Vv() const {
    std::size_t ns = dom.n_spatial(), nk = dom.n_hermite();
    double acc = 0.0;
    for (std::size_t kf = 0; kf < nk; ++kf) {
        double w = 1.0 + dom.kabs(kf);
        const std::complex<double>* blk = c.data() + kf * ns;
        double s = 0.0;
        for (std::size_t t = 0; t < ns; ++t) s += std::norm(blk[t]);
        acc += w * s;
    }
    return std::sqrt(dom.volume() * acc);
}

double SpectralField::dual_norm_Vv() const {
    std::size_t ns = dom.n_spatial(), nk = dom.n_hermite();
    double acc = 0.0;
    for (std::size_t kf = 0; kf < nk; ++kf) {
        double w = 1.0 / (1.0 + dom.kabs(kf));
        const std::complex<double>* blk = c.data() + kf * ns;
        double s = 0.0;
        for (std::size_t t = 0; t < ns; ++t) s += std::norm(blk[t]);
        acc += w * s;
    }
    return std::sqrt(dom.volume() * acc);
}

namespace {

bool is_nyquist_bin(const DomainSpec& dom, std::size_t tf) {
    auto t = dom.tpair(tf);
    for (int i = 0; i < dom.d; ++i)
        if (t[i] == dom.Nx / 2) return true;
    return false;
}

// bin of -j for each component
std::size_t negated_bin(const DomainSpec& dom, std::size_t tf) {
    auto t = dom.tpair(tf);
    int n1 = t[0] == 0 ? 0 : dom.Nx - t[0];
    int n2 = t[1] == 0 ? 0 : dom.Nx - t[1];
    return dom.tflat(n1, n2);
}

} // namespace

void SpectralField::project_real() {
    std::size_t ns = dom.n_spatial(), nk = dom.n_hermite();
    for (std::size_t kf = 0; kf < nk; ++kf) {
        std::complex<double>* blk = c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) {
            if (is_nyquist_bin(dom, t)) { blk[t] = 0.0; continue; }
            std::size_t tn = negated_bin(dom, t);
            if (tn < t) continue; // pair already handled
            std::complex<double> avg = 0.5 * (blk[t] + std::conj(blk[tn]));
            blk[t] = avg;
            blk[tn] = std::conj(avg);
        }
    }
}

double SpectralField::conj_symmetry_residual() const {
    std::size_t ns = dom.n_spatial(), nk = dom.n_hermite();
    double worst = 0.0;
    for (std::size_t kf = 0; kf < nk; ++kf) {
        const std::complex<double>* blk = c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) {
            if (is_nyquist_bin(dom, t)) {
                worst = std::max(worst, std::abs(blk[t]));
                continue;
            }
            std::size_t tn = negated_bin(dom, t);
            worst = std::max(worst, std::abs(blk[t] - std::conj(blk[tn])));
        }
    }
    return worst;
}

double inner_Y(const SpectralField& a, const SpectralField& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.c.size(); ++i)
        acc += a.c[i].real() * b.c[i].real() + a.c[i].imag() * b.c[i].imag();
    return a.dom.volume() * acc;
}

double inner_Vv(const SpectralField& a, const SpectralField& b) {
    const DomainSpec& dom = a.dom;
    std::size_t ns = dom.n_spatial(), nk = dom.n_hermite();
    double acc = 0.0;
    for (std::size_t kf = 0; kf < nk; ++kf) {
        double w = 1.0 + dom.kabs(kf);
        const std::complex<double>* pa = a.c.data() + kf * ns;
        const std::complex<double>* pb = b.c.data() + kf * ns;
        double s = 0.0;
        for (std::size_t t = 0; t < ns; ++t)
            s += pa[t].real() * pb[t].real() + pa[t].imag() * pb[t].imag();
        acc += w * s;
    }
    return dom.volume() * acc;
}

MomentFields moments(const SpectralField& y) {
    const DomainSpec& dom = y.dom;
    std::size_t ns = dom.n_spatial();
    double tol = 1e-10 * y.norm_Y();

    MomentFields m;
    m.dom = dom;

    auto slice_to_nodal = [&](std::size_t kf) {
        std::vector<std::complex<double>> buf(y.c.begin() + kf * ns,
                                              y.c.begin() + (kf + 1) * ns);
        spatial_to_nodal(dom, buf.data(), 1);
        std::vector<double> out(ns);
        for (std::size_t t = 0; t < ns; ++t) {
            if (std::abs(buf[t].imag()) > tol)
                throw std::runtime_error("moments: field is not real (imaginary residue)");
            out[t] = buf[t].real();
        }
        return out;
    };

    m.rho = slice_to_nodal(dom.kflat(0, 0));
    m.rho_v[0] = slice_to_nodal(dom.kflat(1, 0));
    if (dom.d == 2) m.rho_v[1] = slice_to_nodal(dom.kflat(0, 1));
    return m;
}

} // namespace kfp
