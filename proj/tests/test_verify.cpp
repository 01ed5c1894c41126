#include <doctest.h>

#include <kfp/field.hpp>
#include <kfp/potential.hpp>
#include <kfp/verify.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <vector>

using namespace kfp;

namespace {

constexpr double kPi = std::numbers::pi;

struct Setup {
    DomainSpec dom;
    PotentialSpec U;
    ControlShape alpha;
};

Setup small_setup_1d() {
    DomainSpec dom{1, 32, 7, kPi};
    return {dom, make_potential(dom, PotentialKind::wrapped_gaussian, 0.5),
            make_alpha_gaussian(dom, 0.6, 0.5)};
}

Setup small_setup_2d() {
    DomainSpec dom{2, 12, 4, kPi};
    return {dom, make_potential(dom, PotentialKind::raised_cosine, 1.2),
            make_alpha_gaussian(dom, 0.7, 0.4)};
}

} // namespace

TEST_CASE("random_field is deterministic in seed and tag") {
    DomainSpec dom{1, 32, 7, kPi};
    SpectralField a = random_field(dom, 42, 3);
    SpectralField b = random_field(dom, 42, 3);
    SpectralField c = random_field(dom, 42, 4);
    SpectralField d = random_field(dom, 43, 3);

    bool same = true, tag_differs = false, seed_differs = false;
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        same = same && a.c[i] == b.c[i];
        tag_differs = tag_differs || a.c[i] != c.c[i];
        seed_differs = seed_differs || a.c[i] != d.c[i];
    }
    CHECK(same);
    CHECK(tag_differs);
    CHECK(seed_differs);
    CHECK(a.norm_Y() > 0.0);
}

TEST_CASE("random_field is conjugate symmetric with zero Nyquist rows") {
    DomainSpec dom{1, 32, 5, kPi};
    SpectralField y = random_field(dom, 7, 0);

    for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf) {
        for (int j = -dom.Nx / 2 + 1; j < dom.Nx / 2; ++j) {
            std::complex<double> zj = y.at(kf, dom.bin_of_mode(j));
            std::complex<double> zm = y.at(kf, dom.bin_of_mode(-j));
            CHECK(std::abs(zj - std::conj(zm)) < 1e-15);
        }
        // the unpaired mode -Nx/2 must be empty or realness breaks
        CHECK(std::abs(y.at(kf, dom.bin_of_mode(-dom.Nx / 2))) == 0.0);
    }
}

TEST_CASE("random_field zero_locked_modes removes the conserved bins") {
    DomainSpec dom{2, 12, 4, kPi};
    SpectralField y = random_field(dom, 9, 1, true);
    std::size_t t0 = dom.tflat(dom.bin_of_mode(0), dom.bin_of_mode(0));
    CHECK(std::abs(y.at(dom.kflat(0, 0), t0)) == 0.0);
    CHECK(std::abs(y.at(dom.kflat(1, 0), t0)) == 0.0);
    CHECK(std::abs(y.at(dom.kflat(0, 1), t0)) == 0.0);

    SpectralField z = random_field(dom, 9, 1, false);
    CHECK(std::abs(z.at(dom.kflat(0, 0), t0)) > 0.0);
}

TEST_CASE("identity suite passes on the 1d grid") {
    Setup s = small_setup_1d();
    auto results = check_identity_suite(s.dom, s.U, s.alpha, 20, 101);
    REQUIRE(results.size() == 6);

    std::set<std::string> names;
    for (const CheckResult& r : results) {
        names.insert(r.name);
        CAPTURE(r.name);
        CHECK(r.pass);
        CHECK(r.samples >= 1);
        CHECK(r.worst <= r.tolerance);
        CHECK(r.worst >= 0.0);
    }
    CHECK(names.count("transport-skew") == 1);
    CHECK(names.count("dissipation-identity") == 1);
    CHECK(names.count("r-identity") == 1);
    CHECK(names.count("control-source") == 1);
    CHECK(names.count("mass-mode-frozen") == 1);
    CHECK(names.count("momentum-mode-frozen") == 1);
}

TEST_CASE("identity suite passes on a 2d grid") {
    Setup s = small_setup_2d();
    auto results = check_identity_suite(s.dom, s.U, s.alpha, 6, 55);
    REQUIRE(results.size() == 6);
    for (const CheckResult& r : results) {
        CAPTURE(r.name);
        CHECK(r.pass);
    }
}

TEST_CASE("inequality suite holds with ratios at most one") {
    Setup s = small_setup_1d();
    auto results = check_inequality_suite(s.dom, s.U, s.alpha, 30, 77);
    REQUIRE(results.size() == 10);

    std::set<std::string> names;
    for (const CheckResult& r : results) {
        names.insert(r.name);
        CAPTURE(r.name);
        CHECK(r.pass);
        CHECK(r.worst <= 1.0 + 1e-8); // sharp bounds, never exceeded
        CHECK(r.worst > 0.0);         // and never vacuous
    }
    CHECK(names.count("alignment-bound") == 1);
    CHECK(names.count("convolution-sup-bound") == 1);
    CHECK(names.count("moment-bound") == 1);
    CHECK(names.count("h1-dual-bound") == 1);
    CHECK(names.count("h2-dual-bound") == 1);
    CHECK(names.count("h1-lipschitz") == 1);
    CHECK(names.count("h2-lipschitz") == 1);
    CHECK(names.count("control-coupling-bound") == 1);
    CHECK(names.count("h1-lipschitz-trajectory") == 1);
    CHECK(names.count("h2-lipschitz-trajectory") == 1);
}

TEST_CASE("inequality suite holds on a 2d grid") {
    Setup s = small_setup_2d();
    auto results = check_inequality_suite(s.dom, s.U, s.alpha, 5, 31);
    for (const CheckResult& r : results) {
        CAPTURE(r.name);
        CHECK(r.pass);
    }
}

TEST_CASE("estimated constants satisfy their defining arithmetic") {
    Setup s = small_setup_1d();
    ConstantsTable t = estimate_constants(s.dom, s.U, s.alpha, 8, 2024);

    CHECK(t.c_hat >= 1.0);
    CHECK(t.c_hat < 1e4);
    CHECK(t.n_norm > 0.0);
    CHECK(t.samples == 8);
    CHECK(t.seed == 2024);

    // u_l2 is the L2 norm of the kernel; band-limited, so the nodal Riemann
    // sum is exact
    double cell = s.dom.cell_width();
    double acc = 0.0;
    for (int n = 0; n < s.dom.Nx; ++n) {
        double x = -s.dom.L + n * cell;
        double w = s.U.eval({x, 0.0});
        acc += w * w * cell;
    }
    CHECK(t.u_l2 == doctest::Approx(std::sqrt(acc)).epsilon(1e-10));

    double rd = std::sqrt(static_cast<double>(s.dom.d));
    CHECK(t.kappa_radius ==
          doctest::Approx(1.0 / (8.0 * rd * t.u_l2 * t.c_hat)).epsilon(1e-12));
    CHECK(t.mu_small ==
          doctest::Approx(3.0 / (32.0 * rd * t.u_l2 * t.c_hat * t.c_hat)).epsilon(1e-12));
    double km = std::min(1.0 / (t.c_hat * (4.0 * rd * t.u_l2 + 1.0)),
                         1.0 / (16.0 * rd * t.u_l2 * t.c_hat));
    CHECK(t.kappa_min == doctest::Approx(km).epsilon(1e-12));

    CHECK(t.growth_value > 0.0);
    CHECK(t.growth_k0 > 0.0);
    CHECK(t.growth_k1 > 0.0);
    CHECK(t.growth_k2 > 0.0);
}

TEST_CASE("constants with a zero control shape have no coupling norm") {
    DomainSpec dom{1, 32, 5, kPi};
    PotentialSpec U = make_potential(dom, PotentialKind::wrapped_gaussian, 0.5);
    ControlShape alpha = make_alpha_constant(dom, 0.0);
    ConstantsTable t = estimate_constants(dom, U, alpha, 8, 7);
    CHECK(t.n_norm == 0.0);
    CHECK(t.c_hat >= 1.0);
    CHECK(t.u_l2 > 0.0);
}

TEST_CASE("estimate_constants is reproducible for a fixed seed") {
    Setup s = small_setup_1d();
    ConstantsTable a = estimate_constants(s.dom, s.U, s.alpha, 8, 99);
    ConstantsTable b = estimate_constants(s.dom, s.U, s.alpha, 8, 99);
    CHECK(a.c_hat == b.c_hat);
    CHECK(a.n_norm == b.n_norm);
    CHECK(a.u_l2 == b.u_l2);
    CHECK(a.growth_value == b.growth_value);
    CHECK(a.kappa_radius == b.kappa_radius);
}
