#include "kfp/potential.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kfp/fourier.hpp"

namespace kfp {

PotentialKind potential_kind_from_string(const std::string& s) {
    if (s == "wrapped-gaussian") return PotentialKind::wrapped_gaussian;
    if (s == "raised-cosine") return PotentialKind::raised_cosine;
    if (s == "uniform-bump") return PotentialKind::uniform_bump;
    throw std::invalid_argument("unknown potential kind: " + s);
}

std::string to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::wrapped_gaussian: return "wrapped-gaussian";
        case PotentialKind::raised_cosine: return "raised-cosine";
        case PotentialKind::uniform_bump: return "uniform-bump";
    }
    return "?";
}

namespace {

// one-dimensional profile before periodization
double profile_1d(PotentialKind kind, double param, double x) {
    switch (kind) {
        case PotentialKind::wrapped_gaussian:
            return std::exp(-0.5 * x * x / (param * param)) /
                   (param * std::sqrt(2.0 * std::numbers::pi));
        case PotentialKind::raised_cosine:
            return std::abs(x) <= param
                       ? (1.0 + std::cos(std::numbers::pi * x / param)) / (2.0 * param)
                       : 0.0;
        case PotentialKind::uniform_bump:
            return std::abs(x) < param ? 1.0 / (2.0 * param) : 0.0;
    }
    return 0.0;
}

double periodized_1d(PotentialKind kind, double param, double L, double x) {
    double s = 0.0;
    for (int z = -1; z <= 1; ++z) s += profile_1d(kind, param, x + 2.0 * L * z);
    return s;
}

} // namespace

double PotentialSpec::eval(const std::array<double, 2>& r) const {
    // trig-interpolant value: sum over modes of the real even symbol
    std::size_t ns = dom.n_spatial();
    double inv_vol = 1.0 / dom.volume();
    double acc = 0.0;
    for (std::size_t tf = 0; tf < ns; ++tf) {
        auto t = dom.tpair(tf);
        double phase = 0.0;
        for (int i = 0; i < dom.d; ++i)
            phase += std::numbers::pi * dom.mode_of_bin(t[i]) * r[i] / dom.L;
        acc += symbol[tf] * std::cos(phase);
    }
    return acc * inv_vol;
}

PotentialSpec make_potential(const DomainSpec& dom, PotentialKind kind, double param) {
    dom.validate();
    if (!(param > 0.0))
        throw std::invalid_argument("potential parameter must be positive");
    if (kind != PotentialKind::wrapped_gaussian && param >= dom.L)
        throw std::invalid_argument("potential half-width must be below L");

    PotentialSpec U;
    U.dom = dom;
    U.kind = kind;
    U.param = param;

    // The kernel acts on displacements, so it is sampled at r_n = 2 L n / Nx.
    // With that indexing the scaled DFT below is exactly the displacement
    // Fourier integral of U, which is the correct convolution multiplier for
    // fields expanded in exp(i pi j (x + L) / L). Sampling at the position
    // nodes x_n = -L + 2 L n / Nx instead would pick up a spurious (-1)^j.
    std::size_t ns = dom.n_spatial();
    U.nodal.resize(ns);
    for (std::size_t tf = 0; tf < ns; ++tf) {
        auto t = dom.tpair(tf);
        double val = 1.0;
        for (int i = 0; i < dom.d; ++i)
            val *= periodized_1d(kind, param, dom.L, 2.0 * dom.L * t[i] / dom.Nx);
        U.nodal[tf] = val;
    }

    double cell = std::pow(dom.cell_width(), dom.d);
    double mass = 0.0;
    for (double v : U.nodal) mass += v;
    mass *= cell;
    if (!(mass > 0.0))
        throw std::invalid_argument("potential grid mass vanished (width too small for grid?)");
    for (double& v : U.nodal) v /= mass;

    // symbol[j] = integral of U(r) exp(-i pi j r / L) dr over the torus
    std::vector<std::complex<double>> buf(U.nodal.begin(), U.nodal.end());
    spatial_to_coeff(dom, buf.data(), 1);
    U.symbol.resize(ns);
    double vol = dom.volume();
    for (std::size_t tf = 0; tf < ns; ++tf)
        U.symbol[tf] = vol * buf[tf].real(); // even real samples -> real DFT
    U.symbol[0] = 1.0; // pin U * 1 = 1

    U.norm_l1 = 1.0;
    double sq = 0.0, mx = 0.0;
    for (double v : U.nodal) {
        sq += v * v;
        mx = std::max(mx, v);
    }
    U.norm_l2 = std::sqrt(sq * cell);
    U.norm_linf = mx;
    return U;
}

namespace {

ControlShape finish_alpha(const DomainSpec& dom,
                          std::array<std::vector<double>, 2>&& samples) {
    ControlShape a;
    a.dom = dom;
    std::size_t ns = dom.n_spatial();
    double cell = std::pow(dom.cell_width(), dom.d);
    double sq = 0.0, mx = 0.0;
    for (int i = 0; i < dom.d; ++i) {
        std::vector<std::complex<double>> buf(samples[i].begin(), samples[i].end());
        spatial_to_coeff(dom, buf.data(), 1);
        apply_dealias_mask(dom, buf.data(), 1);
        a.coeff[i] = buf;
        spatial_to_nodal(dom, buf.data(), 1);
        a.nodal[i].resize(ns);
        for (std::size_t t = 0; t < ns; ++t) {
            a.nodal[i][t] = buf[t].real();
            sq += buf[t].real() * buf[t].real();
            mx = std::max(mx, std::abs(buf[t].real()));
        }
    }
    a.norm_l2 = std::sqrt(sq * cell);
    a.norm_linf = mx;
    return a;
}

} // namespace

double ControlShape::eval_component(int i, const std::array<double, 2>& x) const {
    std::size_t ns = dom.n_spatial();
    std::complex<double> acc = 0.0;
    for (std::size_t tf = 0; tf < ns; ++tf) {
        auto t = dom.tpair(tf);
        double phase = 0.0;
        for (int q = 0; q < dom.d; ++q)
            phase += std::numbers::pi * dom.mode_of_bin(t[q]) * (x[q] + dom.L) / dom.L;
        acc += coeff[i][tf] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return acc.real();
}

ControlShape make_alpha_gaussian(const DomainSpec& dom, double sigma, double amplitude) {
    dom.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("alpha sigma must be positive");
    std::size_t ns = dom.n_spatial();
    std::array<std::vector<double>, 2> samples;
    for (int i = 0; i < dom.d; ++i) {
        samples[i].resize(ns);
        for (std::size_t tf = 0; tf < ns; ++tf) {
            auto t = dom.tpair(tf);
            double val = 1.0;
            for (int q = 0; q < dom.d; ++q)
                val *= periodized_1d(PotentialKind::wrapped_gaussian, sigma, dom.L,
                                     dom.xnode(t[q]));
            samples[i][tf] = val;
        }
    }
    ControlShape a = finish_alpha(dom, std::move(samples));
    if (a.norm_l2 > 0.0) {
        double s = amplitude / a.norm_l2;
        for (int i = 0; i < dom.d; ++i) {
            for (auto& z : a.coeff[i]) z *= s;
            for (auto& v : a.nodal[i]) v *= s;
        }
        a.norm_l2 = std::abs(amplitude);
        a.norm_linf *= std::abs(s);
    }
    return a;
}

ControlShape make_alpha_constant(const DomainSpec& dom, double value) {
    dom.validate();
    std::array<std::vector<double>, 2> samples;
    for (int i = 0; i < dom.d; ++i)
        samples[i].assign(dom.n_spatial(), value);
    return finish_alpha(dom, std::move(samples));
}

ControlShape make_alpha_from_nodal(const DomainSpec& dom,
                                   const std::array<std::vector<double>, 2>& values) {
    dom.validate();
    std::array<std::vector<double>, 2> samples;
    for (int i = 0; i < dom.d; ++i) {
        if (values[i].size() != dom.n_spatial())
            throw std::invalid_argument("alpha nodal samples have wrong size");
        samples[i] = values[i];
    }
    return finish_alpha(dom, std::move(samples));
}

} // namespace kfp
