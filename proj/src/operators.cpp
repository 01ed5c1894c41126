#include "kfp/operators.hpp"

#include <cmath>
#include <numbers>

#include "kfp/fourier.hpp"

namespace kfp {

namespace {

// sqrt table shared by the ladder primitives
const double* sqrt_table(int upto) {
    static std::vector<double> tab;
    if (static_cast<int>(tab.size()) < upto + 1) {
        int old = static_cast<int>(tab.size());
        tab.resize(upto + 1);
        for (int k = old; k <= upto; ++k)
            tab[k] = std::sqrt(static_cast<double>(k));
    }
    return tab.data();
}

} // namespace

SpectralField annihilate(const SpectralField& y, int i) {
    const DomainSpec& dom = y.dom;
    const double* sq = sqrt_table(dom.Kv + 1);
    SpectralField out(dom);
    std::size_t ns = dom.n_spatial();
    int K1 = dom.Kv + 1;
    for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf) {
        auto k = dom.kpair(kf);
        if (k[i] + 1 > dom.Kv) continue;
        std::size_t src = kf + (i == 0 ? 1 : K1);
        double w = sq[k[i] + 1];
        const std::complex<double>* ps = y.c.data() + src * ns;
        std::complex<double>* po = out.c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) po[t] = w * ps[t];
    }
    return out;
}

SpectralField create(const SpectralField& y, int i) {
    const DomainSpec& dom = y.dom;
    const double* sq = sqrt_table(dom.Kv + 1);
    SpectralField out(dom);
    std::size_t ns = dom.n_spatial();
    int K1 = dom.Kv + 1;
    for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf) {
        auto k = dom.kpair(kf);
        if (k[i] == 0) continue;
        std::size_t src = kf - (i == 0 ? 1 : K1);
        double w = sq[k[i]];
        const std::complex<double>* ps = y.c.data() + src * ns;
        std::complex<double>* po = out.c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) po[t] = w * ps[t];
    }
    return out;
}

SpectralField mult_v(const SpectralField& y, int i) {
    SpectralField out = create(y, i);
    out += annihilate(y, i);
    return out;
}

SpectralField apply_ou(const SpectralField& y) {
    const DomainSpec& dom = y.dom;
    SpectralField out(dom);
    std::size_t ns = dom.n_spatial();
    for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf) {
        double w = -static_cast<double>(dom.kabs(kf));
        const std::complex<double>* ps = y.c.data() + kf * ns;
        std::complex<double>* po = out.c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) po[t] = w * ps[t];
    }
    return out;
}

SpectralField apply_number(const SpectralField& y) {
    SpectralField out = apply_ou(y);
    out *= -1.0;
    return out;
}

SpectralField apply_transport(const SpectralField& y) {
    const DomainSpec& dom = y.dom;
    const double* sq = sqrt_table(dom.Kv + 1);
    SpectralField out(dom);
    std::size_t ns = dom.n_spatial();
    int K1 = dom.Kv + 1;
    double fac = std::numbers::pi / dom.L;

    // per-bin derivative multipliers i*pi*j_i/L
    std::vector<double> jx(ns), jy(dom.d == 2 ? ns : 0);
    for (std::size_t tf = 0; tf < ns; ++tf) {
        auto t = dom.tpair(tf);
        jx[tf] = fac * dom.mode_of_bin(t[0]);
        if (dom.d == 2) jy[tf] = fac * dom.mode_of_bin(t[1]);
    }

    for (int i = 0; i < dom.d; ++i) {
        const std::vector<double>& jm = (i == 0) ? jx : jy;
        std::size_t step = (i == 0) ? 1 : static_cast<std::size_t>(K1);
        for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf) {
            auto k = dom.kpair(kf);
            std::complex<double>* po = out.c.data() + kf * ns;
            if (k[i] > 0) { // sqrt(k_i) * d_x y_{k-e_i}
                const std::complex<double>* ps = y.c.data() + (kf - step) * ns;
                double w = sq[k[i]];
                for (std::size_t t = 0; t < ns; ++t)
                    po[t] += w * std::complex<double>(0.0, jm[t]) * ps[t];
            }
            if (k[i] < dom.Kv) { // sqrt(k_i + 1) * d_x y_{k+e_i}
                const std::complex<double>* ps = y.c.data() + (kf + step) * ns;
                double w = sq[k[i] + 1];
                for (std::size_t t = 0; t < ns; ++t)
                    po[t] += w * std::complex<double>(0.0, jm[t]) * ps[t];
            }
        }
    }
    return out;
}

SpectralField apply_generator(const SpectralField& y) {
    SpectralField out = apply_ou(y);
    out -= apply_transport(y);
    return out;
}

SpatialCoeffs convolve(const PotentialSpec& U, const SpatialCoeffs& g) {
    SpatialCoeffs out(g.size());
    for (std::size_t t = 0; t < g.size(); ++t) out[t] = U.symbol[t] * g[t];
    return out;
}

namespace {

SpatialCoeffs slice(const SpectralField& y, std::size_t kf) {
    std::size_t ns = y.dom.n_spatial();
    return SpatialCoeffs(y.c.begin() + kf * ns, y.c.begin() + (kf + 1) * ns);
}

void add_to_slice(SpectralField& y, std::size_t kf, const SpatialCoeffs& s) {
    std::size_t ns = y.dom.n_spatial();
    for (std::size_t t = 0; t < ns; ++t) y.c[kf * ns + t] += s[t];
}

std::size_t unit_kflat(const DomainSpec& dom, int i) {
    return i == 0 ? dom.kflat(1, 0) : dom.kflat(0, 1);
}

} // namespace

SpectralField alignment_drift(const SpectralField& y, const PotentialSpec& U) {
    const DomainSpec& dom = y.dom;
    SpectralField out(dom);
    for (int i = 0; i < dom.d; ++i) {
        std::size_t kf = unit_kflat(dom, i);
        add_to_slice(out, kf, convolve(U, slice(y, kf)));
    }
    return out;
}

SpectralField xprod(const DomainSpec& dom, const SpatialCoeffs& a, const SpectralField& g) {
    std::size_t ns = dom.n_spatial(), nk = dom.n_hermite();

    SpatialCoeffs an = a;
    apply_dealias_mask(dom, an.data(), 1);
    spatial_to_nodal(dom, an.data(), 1);

    SpectralField out = g;
    apply_dealias_mask(dom, out.c.data(), nk);
    spatial_to_nodal(dom, out.c.data(), nk);
    for (std::size_t kf = 0; kf < nk; ++kf) {
        std::complex<double>* blk = out.c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) blk[t] *= an[t];
    }
    spatial_to_coeff(dom, out.c.data(), nk);
    apply_dealias_mask(dom, out.c.data(), nk);
    return out;
}

SpatialCoeffs xprod_contract(const SpectralField& q, const SpectralField& g) {
    const DomainSpec& dom = q.dom;
    std::size_t ns = dom.n_spatial(), nk = dom.n_hermite();

    SpectralField qn = q, gn = g;
    apply_dealias_mask(dom, qn.c.data(), nk);
    spatial_to_nodal(dom, qn.c.data(), nk);
    apply_dealias_mask(dom, gn.c.data(), nk);
    spatial_to_nodal(dom, gn.c.data(), nk);

    SpatialCoeffs r(ns, 0.0);
    for (std::size_t kf = 0; kf < nk; ++kf) {
        const std::complex<double>* pq = qn.c.data() + kf * ns;
        const std::complex<double>* pg = gn.c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) r[t] += std::conj(pq[t]) * pg[t];
    }
    spatial_to_coeff(dom, r.data(), 1);
    apply_dealias_mask(dom, r.data(), 1);
    return r;
}

SpectralField nl_density(const SpectralField& y, const PotentialSpec& U) {
    SpatialCoeffs a = convolve(U, slice(y, 0));
    return xprod(y.dom, a, apply_number(y));
}

SpectralField nl_momentum(const SpectralField& y, const PotentialSpec& U) {
    const DomainSpec& dom = y.dom;
    SpectralField out(dom);
    for (int i = 0; i < dom.d; ++i) {
        SpatialCoeffs m = convolve(U, slice(y, unit_kflat(dom, i)));
        SpectralField s = create(y, i); // (v_i - d/dv_i) y = -(d/dv_i - v_i) y
        s *= -1.0;
        out += xprod(dom, m, s);
    }
    return out;
}

SpectralField nl_density_diff(const SpectralField& y, const PotentialSpec& U,
                              const SpectralField& w) {
    const DomainSpec& dom = y.dom;
    SpectralField out = xprod(dom, convolve(U, slice(w, 0)), apply_number(y));
    out += xprod(dom, convolve(U, slice(y, 0)), apply_number(w));
    return out;
}

SpectralField nl_density_diff_adjoint(const SpectralField& y, const PotentialSpec& U,
                                      const SpectralField& g) {
    const DomainSpec& dom = y.dom;
    // branch through the frozen profile: R0^T applied to xprod(a_y, g)
    SpectralField out = apply_number(xprod(dom, convolve(U, slice(y, 0)), g));
    // branch through the moment: contract against R0 y, convolve, embed at k=0
    SpatialCoeffs r = convolve(U, xprod_contract(apply_number(y), g));
    add_to_slice(out, 0, r);
    return out;
}

SpectralField nl_momentum_diff(const SpectralField& y, const PotentialSpec& U,
                               const SpectralField& w) {
    const DomainSpec& dom = y.dom;
    SpectralField out(dom);
    for (int i = 0; i < dom.d; ++i) {
        std::size_t kf = unit_kflat(dom, i);
        SpectralField sy = create(y, i);
        sy *= -1.0;
        SpectralField sw = create(w, i);
        sw *= -1.0;
        out += xprod(dom, convolve(U, slice(w, kf)), sy);
        out += xprod(dom, convolve(U, slice(y, kf)), sw);
    }
    return out;
}

SpectralField nl_momentum_diff_adjoint(const SpectralField& y, const PotentialSpec& U,
                                       const SpectralField& g) {
    const DomainSpec& dom = y.dom;
    SpectralField out(dom);
    for (int i = 0; i < dom.d; ++i) {
        std::size_t kf = unit_kflat(dom, i);
        SpatialCoeffs m = convolve(U, slice(y, kf));
        // (-create)^T = -annihilate
        SpectralField t = annihilate(xprod(dom, m, g), i);
        t *= -1.0;
        out += t;
        SpectralField sy = create(y, i);
        sy *= -1.0;
        add_to_slice(out, kf, convolve(U, xprod_contract(sy, g)));
    }
    return out;
}

SpectralField apply_control_coupling(const SpectralField& y, const ControlShape& alpha) {
    const DomainSpec& dom = y.dom;
    SpectralField out(dom);
    for (int i = 0; i < dom.d; ++i) {
        SpectralField s = create(y, i);
        s *= -1.0;
        out += xprod(dom, alpha.coeff[i], s);
    }
    return out;
}

SpectralField control_coupling_adjoint(const SpectralField& g, const ControlShape& alpha) {
    const DomainSpec& dom = g.dom;
    SpectralField out(dom);
    for (int i = 0; i < dom.d; ++i) {
        SpectralField t = annihilate(xprod(dom, alpha.coeff[i], g), i);
        t *= -1.0;
        out += t;
    }
    return out;
}

SpectralField control_source(const ControlShape& alpha) {
    const DomainSpec& dom = alpha.dom;
    SpectralField out(dom);
    std::size_t ns = dom.n_spatial();
    for (int i = 0; i < dom.d; ++i) {
        std::size_t kf = unit_kflat(dom, i);
        for (std::size_t t = 0; t < ns; ++t)
            out.c[kf * ns + t] = -alpha.coeff[i][t];
    }
    return out;
}

SpectralField assemble_rhs(const SpectralField& y, double u, const PotentialSpec& U,
                           const ControlShape& alpha, const RhsOptions& opts) {
    SpectralField rhs = apply_generator(y);
    if (opts.alignment) rhs += alignment_drift(y, U);
    if (opts.nonlinear) {
        rhs -= nl_density(y, U);
        rhs -= nl_momentum(y, U);
    }
    if (opts.control && u != 0.0) {
        SpectralField cu = apply_control_coupling(y, alpha);
        cu += control_source(alpha);
        rhs.axpy(u, cu);
    }
    return rhs;
}

} // namespace kfp
