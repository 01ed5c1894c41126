#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "kfp/fourier.hpp"
#include "kfp/operators.hpp"
#include "kfp/rng.hpp"
#include "kfp/verify.hpp"
#include "oracles.hpp"

using namespace kfp;
using oracle::kPi;
using cplx = std::complex<double>;

namespace {

double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
    double w = 0.0;
    for (std::size_t kf = 0; kf < a.dom.n_hermite(); ++kf)
        for (std::size_t tf = 0; tf < a.dom.n_spatial(); ++tf)
            w = std::max(w, std::abs(a.at(kf, tf) - b.at(kf, tf)));
    return w;
}

// plain unweighted inner product the adjoints are defined against
double plain_dot(const SpectralField& a, const SpectralField& b) {
    double s = 0.0;
    for (std::size_t kf = 0; kf < a.dom.n_hermite(); ++kf)
        for (std::size_t tf = 0; tf < a.dom.n_spatial(); ++tf)
            s += (a.at(kf, tf) * std::conj(b.at(kf, tf))).real();
    return s;
}

// nodal field with amp * f(x) on Hermite slice k, built through the
// separately-tested transform
SpectralField slice_profile(const DomainSpec& dom, int k, double amp,
                            const std::function<double(double)>& f) {
    SpectralField y(dom);
    std::vector<cplx> buf(dom.n_spatial());
    for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf)
        buf[tf] = amp * f(dom.xnode(dom.tpair(tf)[0]));
    spatial_to_coeff(dom, buf.data(), 1);
    std::size_t kf = dom.kflat(k, 0);
    for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) y.at(kf, tf) = buf[tf];
    y.project_real();
    return y;
}

} // namespace

TEST_CASE("velocity multiplication matches the quadrature projection") {
    DomainSpec dom{1, 8, 5, kPi};
    SpectralField y = random_field(dom, 21, 300);
    y *= 1.0 / y.norm_Y();
    SpectralField vy = mult_v(y, 0);

    for (std::size_t n = 0; n < dom.n_spatial(); ++n) {
        double x = dom.xnode(n);
        // nodal values of each Hermite coefficient of v y, by quadrature
        std::vector<cplx> slice(static_cast<std::size_t>(dom.Kv) + 1);
        for (int k = 0; k <= dom.Kv; ++k) {
            double want = oracle::gauss_integral([&](double v) {
                return v * oracle::field_value(y, {x, 0.0}, {v, 0.0}) * oracle::herm(k, v);
            });
            slice[static_cast<std::size_t>(k)] = want;
        }
        // compare in nodal space: transform the computed coefficients
        for (int k = 0; k <= dom.Kv; ++k) {
            std::vector<cplx> c(dom.n_spatial());
            for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) c[tf] = vy.at(dom.kflat(k, 0), tf);
            spatial_to_nodal(dom, c.data(), 1);
            CHECK(std::abs(c[n] - slice[static_cast<std::size_t>(k)]) < 1e-10);
        }
    }
}

TEST_CASE("lowering operator matches integration by parts") {
    DomainSpec dom{1, 8, 5, 2.0};
    SpectralField y = random_field(dom, 22, 301);
    y *= 1.0 / y.norm_Y();
    SpectralField dy = annihilate(y, 0);

    // <d_v y, H_k>_mu = <y, v H_k - sqrt(k) H_{k-1}>_mu
    for (std::size_t n = 0; n < dom.n_spatial(); n += 3) {
        double x = dom.xnode(n);
        for (int k = 0; k <= dom.Kv; ++k) {
            double want = oracle::gauss_integral([&](double v) {
                double test_fn = v * oracle::herm(k, v) -
                                 (k > 0 ? std::sqrt(static_cast<double>(k)) * oracle::herm(k - 1, v) : 0.0);
                return oracle::field_value(y, {x, 0.0}, {v, 0.0}) * test_fn;
            });
            std::vector<cplx> c(dom.n_spatial());
            for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) c[tf] = dy.at(dom.kflat(k, 0), tf);
            spatial_to_nodal(dom, c.data(), 1);
            CHECK(std::abs(c[n] - want) < 1e-10);
        }
    }
}

TEST_CASE("ou and number operators are the expected diagonals") {
    DomainSpec dom{2, 8, 3, 1.0};
    SpectralField y = random_field(dom, 23, 302);
    SpectralField a = apply_ou(y), r = apply_number(y);
    for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf)
        for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) {
            CHECK(a.at(kf, tf) == -static_cast<double>(dom.kabs(kf)) * y.at(kf, tf));
            CHECK(r.at(kf, tf) == static_cast<double>(dom.kabs(kf)) * y.at(kf, tf));
        }
}

TEST_CASE("transport of cos H1 is the closed-form sin ladder") {
    DomainSpec dom{1, 16, 4, kPi};
    SpectralField y = slice_profile(dom, 1, 1.0, [&](double x) { return std::cos(kPi * x / dom.L); });
    SpectralField got = apply_transport(y);

    // v d_x (cos H_1) = -(pi/L) sin (sqrt2 H_2 + H_0)
    auto s = [&](double x) { return std::sin(kPi * x / dom.L); };
    SpectralField want = slice_profile(dom, 2, -std::sqrt(2.0) * kPi / dom.L, s);
    SpectralField w0 = slice_profile(dom, 0, -kPi / dom.L, s);
    want += w0;
    CHECK(max_coeff_diff(got, want) < 1e-14);
}

TEST_CASE("convolution matches the direct nodal sum") {
    for (int d : {1, 2}) {
        DomainSpec dom{d, d == 1 ? 32 : 8, 1, kPi};
        PotentialSpec U = make_potential(dom, PotentialKind::wrapped_gaussian, 0.5);

        SpatialCoeffs g(dom.n_spatial());
        SpectralField tmp = random_field(dom, 24 + d, 303);
        for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) g[tf] = tmp.at(0, tf);

        SpatialCoeffs got = convolve(U, g);
        spatial_to_nodal(dom, got.data(), 1);
        auto want = oracle::direct_convolution(U, g);
        double scale = 0.0, worst = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) {
            scale = std::max(scale, std::abs(want[i]));
            worst = std::max(worst, std::abs(got[i] - want[i]));
        }
        CHECK(worst < 1e-11 * std::max(scale, 1.0));
    }
}

TEST_CASE("moment drift on cos H1 is sym_1 cos H1") {
    DomainSpec dom{1, 16, 4, kPi};
    PotentialSpec U = make_potential(dom, PotentialKind::wrapped_gaussian, 0.5);
    double sym1 = U.symbol[dom.bin_of_mode(1)];

    SpectralField y = slice_profile(dom, 1, 0.7, [&](double x) { return std::cos(kPi * x / dom.L); });
    SpectralField got = alignment_drift(y, U);
    SpectralField want = slice_profile(dom, 1, 0.7 * sym1,
                                       [&](double x) { return std::cos(kPi * x / dom.L); });
    CHECK(max_coeff_diff(got, want) < 1e-14);
}

TEST_CASE("quadratic terms vanish and close in the documented cases") {
    DomainSpec dom{1, 16, 4, kPi};
    PotentialSpec U = make_potential(dom, PotentialKind::wrapped_gaussian, 0.5);
    double sym1 = U.symbol[dom.bin_of_mode(1)];
    auto c = [&](double x) { return std::cos(kPi * x / dom.L); };

    // pure density perturbation: R0 kills it and the momentum factor is zero
    SpectralField rho0 = slice_profile(dom, 0, 1.0, c);
    CHECK(nl_density(rho0, U).norm_Y() == 0.0);
    CHECK(nl_momentum(rho0, U).norm_Y() == 0.0);

    // pure momentum perturbation: density moment is zero
    SpectralField mom1 = slice_profile(dom, 1, 1.0, c);
    CHECK(nl_density(mom1, U).norm_Y() == 0.0);

    // h2(cos H1) = sym1 cos * (d_v - v)(cos H1) = -sqrt2 sym1 cos^2 H2
    SpectralField got2 = nl_momentum(mom1, U);
    SpectralField want2 = slice_profile(dom, 2, -std::sqrt(2.0) * sym1,
                                        [&](double x) { return c(x) * c(x); });
    CHECK(max_coeff_diff(got2, want2) < 1e-13);

    // h1(cos H0 + cos H2) = (sym1 cos) * 2 cos H2
    SpectralField mix = slice_profile(dom, 0, 1.0, c);
    SpectralField part = slice_profile(dom, 2, 1.0, c);
    mix += part;
    SpectralField got1 = nl_density(mix, U);
    SpectralField want1 = slice_profile(dom, 2, 2.0 * sym1,
                                        [&](double x) { return c(x) * c(x); });
    CHECK(max_coeff_diff(got1, want1) < 1e-13);
}

TEST_CASE("directional derivatives split the quadratic forms exactly") {
    for (int d : {1, 2}) {
        DomainSpec dom{d, d == 1 ? 16 : 8, d == 1 ? 5 : 3, 2.5};
        PotentialSpec U = make_potential(dom, PotentialKind::raised_cosine, 0.8);
        SpectralField y = random_field(dom, 31 + d, 400);
        SpectralField w = random_field(dom, 32 + d, 401);
        y *= 1.0 / y.norm_Y();
        w *= 1.0 / w.norm_Y();

        SpectralField sum = y;
        sum += w;
        for (auto nl : {&nl_density, &nl_momentum}) {
            SpectralField lhs = nl(sum, U);
            SpectralField t = nl(y, U);
            lhs -= t;
            t = nl(w, U);
            lhs -= t;
            SpectralField rhs = (nl == &nl_density) ? nl_density_diff(y, U, w)
                                                    : nl_momentum_diff(y, U, w);
            CHECK(max_coeff_diff(lhs, rhs) < 1e-13);
        }
    }
}

TEST_CASE("adjoints reproduce the plain inner product") {
    DomainSpec dom{1, 16, 5, kPi};
    PotentialSpec U = make_potential(dom, PotentialKind::wrapped_gaussian, 0.6);
    ControlShape alpha = make_alpha_gaussian(dom, 0.7, 0.9);
    SpectralField y = random_field(dom, 41, 500);
    SpectralField w = random_field(dom, 42, 501);
    SpectralField g = random_field(dom, 43, 502);
    y *= 1.0 / y.norm_Y();
    w *= 1.0 / w.norm_Y();
    g *= 1.0 / g.norm_Y();

    double a1 = plain_dot(nl_density_diff(y, U, w), g);
    double b1 = plain_dot(w, nl_density_diff_adjoint(y, U, g));
    CHECK(a1 == doctest::Approx(b1).epsilon(1e-12));

    double a2 = plain_dot(nl_momentum_diff(y, U, w), g);
    double b2 = plain_dot(w, nl_momentum_diff_adjoint(y, U, g));
    CHECK(a2 == doctest::Approx(b2).epsilon(1e-12));

    double a3 = plain_dot(apply_control_coupling(w, alpha), g);
    double b3 = plain_dot(w, control_coupling_adjoint(g, alpha));
    CHECK(a3 == doctest::Approx(b3).epsilon(1e-12));
}

TEST_CASE("control source is the coupling applied to the unit state") {
    for (int d : {1, 2}) {
        DomainSpec dom{d, d == 1 ? 16 : 8, 3, kPi};
        ControlShape alpha = make_alpha_gaussian(dom, 0.6, 0.8);
        SpectralField one(dom);
        one.at(0, dom.d == 1 ? dom.tflat(dom.bin_of_mode(0), 0)
                             : dom.tflat(dom.bin_of_mode(0), dom.bin_of_mode(0))) = 1.0;
        SpectralField lhs = apply_control_coupling(one, alpha);
        SpectralField rhs = control_source(alpha);
        CHECK(max_coeff_diff(lhs, rhs) < 1e-14);
        CHECK(rhs.norm_Y() > 0.0);
    }
}

TEST_CASE("xprod equals mask, multiply nodally, mask") {
    DomainSpec dom{1, 16, 3, 1.5};
    SpectralField g = random_field(dom, 51, 600);
    SpatialCoeffs a(dom.n_spatial());
    SpectralField t = random_field(dom, 52, 601);
    for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) a[tf] = t.at(0, tf);

    SpectralField got = xprod(dom, a, g);

    SpatialCoeffs am = a;
    apply_dealias_mask(dom, am.data(), 1);
    spatial_to_nodal(dom, am.data(), 1);
    SpectralField want(dom);
    std::vector<cplx> slice(dom.n_spatial());
    for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf) {
        for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) slice[tf] = g.at(kf, tf);
        apply_dealias_mask(dom, slice.data(), 1);
        spatial_to_nodal(dom, slice.data(), 1);
        for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) slice[tf] *= am[tf];
        spatial_to_coeff(dom, slice.data(), 1);
        apply_dealias_mask(dom, slice.data(), 1);
        for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) want.at(kf, tf) = slice[tf];
    }
    CHECK(max_coeff_diff(got, want) < 1e-13);

    // contraction is the transpose over the spatial slot
    SpectralField q = random_field(dom, 53, 602);
    SpatialCoeffs ct = xprod_contract(q, g);
    double lhs = plain_dot(got, q);
    double rhs = 0.0;
    for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) rhs += (a[tf] * std::conj(ct[tf])).real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("assembled right-hand side is the documented sum of parts") {
    DomainSpec dom{1, 16, 4, kPi};
    PotentialSpec U = make_potential(dom, PotentialKind::wrapped_gaussian, 0.5);
    ControlShape alpha = make_alpha_gaussian(dom, 0.6, 0.5);
    SpectralField y = random_field(dom, 61, 700);
    y *= 0.3 / y.norm_Y();
    double u = 0.37;

    SpectralField want = apply_generator(y);
    want += alignment_drift(y, U);
    want -= nl_density(y, U);
    want -= nl_momentum(y, U);
    SpectralField ctrl = apply_control_coupling(y, alpha);
    ctrl += control_source(alpha);
    ctrl *= u;
    want += ctrl;

    SpectralField got = assemble_rhs(y, u, U, alpha);
    CHECK(max_coeff_diff(got, want) < 1e-14);

    RhsOptions lin;
    lin.nonlinear = false;
    lin.control = false;
    SpectralField gl = assemble_rhs(y, u, U, alpha, lin);
    SpectralField wl = apply_generator(y);
    wl += alignment_drift(y, U);
    CHECK(max_coeff_diff(gl, wl) < 1e-14);
}
