#include "kfp/particles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "kfp/basis.hpp"
#include "kfp/fourier.hpp"
#include "kfp/rng.hpp"

namespace kfp {

namespace {

using cplx = std::complex<double>;

constexpr std::uint64_t kSampleSalt = 0x53414d504c455231ull;
constexpr std::uint64_t kNoiseSalt = 0x4e4f495345535431ull;

std::uint64_t fold_replicate(std::uint64_t salt, std::uint64_t replicate) {
    return salt ^ (replicate * 0x9E3779B97F4A7C15ull);
}

double wrap_position(double L, double x) {
    double s = x + L;
    s -= 2.0 * L * std::floor(s / (2.0 * L));
    if (s >= 2.0 * L) s -= 2.0 * L; // floor rounding can land exactly on 2L
    return s - L;
}

// Pointwise evaluation of a field from its nonzero coefficients. Fast for the
// low-mode profiles the sampler sees in practice, correct for anything.
struct PointEvaluator {
    const DomainSpec* dom;
    struct Term {
        std::array<int, 2> j;
        std::array<int, 2> k;
        cplx c;
    };
    std::vector<Term> terms;
    int kmax = 0;

    explicit PointEvaluator(const SpectralField& y) : dom(&y.dom) {
        double scale = 0.0;
        for (const cplx& z : y.c) scale = std::max(scale, std::abs(z));
        double cut = scale * 1e-15;
        std::size_t ns = y.dom.n_spatial();
        for (std::size_t kf = 0; kf < y.dom.n_hermite(); ++kf) {
            auto kp = y.dom.kpair(kf);
            for (std::size_t tf = 0; tf < ns; ++tf) {
                cplx z = y.at(kf, tf);
                if (std::abs(z) <= cut) continue;
                auto tp = y.dom.tpair(tf);
                Term t;
                t.j = {y.dom.mode_of_bin(tp[0]),
                       y.dom.d == 2 ? y.dom.mode_of_bin(tp[1]) : 0};
                t.k = kp;
                t.c = z;
                terms.push_back(t);
                kmax = std::max({kmax, kp[0], kp[1]});
            }
        }
    }

    double operator()(const std::array<double, 2>& xx,
                      const std::array<double, 2>& vv) const {
        std::vector<double> h0 = hermite_values(kmax, vv[0]);
        std::vector<double> h1;
        if (dom->d == 2) h1 = hermite_values(kmax, vv[1]);
        double acc = 0.0;
        for (const Term& t : terms) {
            double phase = std::numbers::pi * t.j[0] * (xx[0] + dom->L) / dom->L;
            if (dom->d == 2)
                phase += std::numbers::pi * t.j[1] * (xx[1] + dom->L) / dom->L;
            double hv = h0[t.k[0]] * (dom->d == 2 ? h1[t.k[1]] : 1.0);
            acc += (t.c.real() * std::cos(phase) - t.c.imag() * std::sin(phase)) * hv;
        }
        return acc;
    }
};

// min and max of 1 + y over x-nodes times a velocity lattice on [-vmax, vmax]
void lattice_range(const SpectralField& y, double vmax, double& lo, double& hi) {
    const DomainSpec& dom = y.dom;
    std::size_t ns = dom.n_spatial();
    std::size_t nh = dom.n_hermite();
    int K1 = dom.Kv + 1;

    std::vector<cplx> buf(y.c);
    spatial_to_nodal(dom, buf.data(), nh);

    int nv = dom.d == 1 ? 321 : 49;
    std::vector<double> hlat(static_cast<std::size_t>(nv) * K1);
    for (int iv = 0; iv < nv; ++iv) {
        double v = -vmax + 2.0 * vmax * iv / (nv - 1);
        auto h = hermite_values(dom.Kv, v);
        std::copy(h.begin(), h.end(), hlat.begin() + static_cast<std::size_t>(iv) * K1);
    }

    lo = 1e300;
    hi = -1e300;
    std::vector<double> partial(K1);
    for (std::size_t n = 0; n < ns; ++n) {
        if (dom.d == 1) {
            for (int iv = 0; iv < nv; ++iv) {
                const double* h = &hlat[static_cast<std::size_t>(iv) * K1];
                double acc = 0.0;
                for (int k = 0; k <= dom.Kv; ++k)
                    acc += buf[static_cast<std::size_t>(k) * ns + n].real() * h[k];
                lo = std::min(lo, 1.0 + acc);
                hi = std::max(hi, 1.0 + acc);
            }
        } else {
            for (int iv1 = 0; iv1 < nv; ++iv1) {
                const double* h1 = &hlat[static_cast<std::size_t>(iv1) * K1];
                for (int k2 = 0; k2 < K1; ++k2) {
                    double acc = 0.0;
                    for (int k1 = 0; k1 < K1; ++k1)
                        acc += buf[dom.kflat(k1, k2) * ns + n].real() * h1[k1];
                    partial[k2] = acc;
                }
                for (int iv2 = 0; iv2 < nv; ++iv2) {
                    const double* h2 = &hlat[static_cast<std::size_t>(iv2) * K1];
                    double acc = 0.0;
                    for (int k2 = 0; k2 < K1; ++k2) acc += partial[k2] * h2[k2];
                    lo = std::min(lo, 1.0 + acc);
                    hi = std::max(hi, 1.0 + acc);
                }
            }
        }
    }
}

// significant kernel modes and per-dimension phase-table extents
struct ModeSet {
    struct Bin {
        int j0, j1;
        double w; // symbol / volume
    };
    std::vector<Bin> bins;
    int jmax0 = 0, jmax1 = 0;
};

ModeSet collect_modes(const PotentialSpec& U) {
    ModeSet ms;
    const DomainSpec& dom = U.dom;
    double inv_vol = 1.0 / dom.volume();
    for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) {
        if (std::abs(U.symbol[tf]) < 1e-14) continue;
        auto tp = dom.tpair(tf);
        ModeSet::Bin b;
        b.j0 = dom.mode_of_bin(tp[0]);
        b.j1 = dom.d == 2 ? dom.mode_of_bin(tp[1]) : 0;
        b.w = U.symbol[tf] * inv_vol;
        ms.jmax0 = std::max(ms.jmax0, std::abs(b.j0));
        ms.jmax1 = std::max(ms.jmax1, std::abs(b.j1));
        ms.bins.push_back(b);
    }
    return ms;
}

void fill_powers(std::vector<cplx>& pw, double angle_unit, double x) {
    pw[0] = cplx(1.0, 0.0);
    if (pw.size() == 1) return;
    cplx base = std::polar(1.0, angle_unit * x);
    for (std::size_t j = 1; j < pw.size(); ++j) pw[j] = pw[j - 1] * base;
}

inline cplx pick_power(const std::vector<cplx>& pw, int j) {
    return j >= 0 ? pw[static_cast<std::size_t>(j)]
                  : std::conj(pw[static_cast<std::size_t>(-j)]);
}

void forces_spectral(const ParticleEnsemble& e, const PotentialSpec& U, ForceEval& F) {
    const DomainSpec& dom = e.dom;
    const std::size_t m = e.m();
    const int d = dom.d;
    const double unit = std::numbers::pi / dom.L;
    ModeSet ms = collect_modes(U);
    const std::size_t nb = ms.bins.size();

    std::vector<cplx> pw0(ms.jmax0 + 1), pw1(ms.jmax1 + 1);
    std::vector<cplx> cb(nb, cplx(0, 0));
    std::vector<cplx> db(nb * d, cplx(0, 0));

    for (std::size_t i = 0; i < m; ++i) {
        fill_powers(pw0, unit, e.x[0][i]);
        if (d == 2) fill_powers(pw1, unit, e.x[1][i]);
        for (std::size_t b = 0; b < nb; ++b) {
            cplx ph = pick_power(pw0, ms.bins[b].j0);
            if (d == 2) ph *= pick_power(pw1, ms.bins[b].j1);
            cb[b] += ph;
            for (int q = 0; q < d; ++q) db[b * d + q] += e.v[q][i] * ph;
        }
    }
    double inv_m = 1.0 / static_cast<double>(m);
    for (auto& z : cb) z *= inv_m;
    for (auto& z : db) z *= inv_m;

    for (std::size_t i = 0; i < m; ++i) {
        fill_powers(pw0, unit, e.x[0][i]);
        if (d == 2) fill_powers(pw1, unit, e.x[1][i]);
        double s1 = 0.0;
        double sv[2] = {0.0, 0.0};
        for (std::size_t b = 0; b < nb; ++b) {
            cplx ph = pick_power(pw0, ms.bins[b].j0);
            if (d == 2) ph *= pick_power(pw1, ms.bins[b].j1);
            // Re(conj(ph) z)
            double w = ms.bins[b].w;
            s1 += w * (ph.real() * cb[b].real() + ph.imag() * cb[b].imag());
            for (int q = 0; q < d; ++q) {
                const cplx& z = db[b * d + q];
                sv[q] += w * (ph.real() * z.real() + ph.imag() * z.imag());
            }
        }
        F.s1[i] = s1;
        for (int q = 0; q < d; ++q) F.drift[q][i] = sv[q] - e.v[q][i] * s1;
    }
}

void forces_direct(const ParticleEnsemble& e, const PotentialSpec& U, ForceEval& F) {
    const std::size_t m = e.m();
    const int d = e.dom.d;
    for (std::size_t i = 0; i < m; ++i) {
        double s1 = 0.0;
        double sv[2] = {0.0, 0.0};
        for (std::size_t p = 0; p < m; ++p) {
            std::array<double, 2> r{e.x[0][p] - e.x[0][i], 0.0};
            if (d == 2) r[1] = e.x[1][p] - e.x[1][i];
            double w = U.eval(r);
            s1 += w;
            for (int q = 0; q < d; ++q) sv[q] += w * e.v[q][p];
        }
        double inv_m = 1.0 / static_cast<double>(m);
        F.s1[i] = s1 * inv_m;
        for (int q = 0; q < d; ++q)
            F.drift[q][i] = sv[q] * inv_m - e.v[q][i] * F.s1[i];
    }
}

// control profile values at the particle positions, evaluated through the
// same x-phase tables as the kernel sums; the coefficients absorb (-1)^j to
// move them from the (x+L) basis onto plain x phases
void alpha_at_particles(const ParticleEnsemble& e, const ControlShape& alpha,
                        std::array<std::vector<double>, 2>& out) {
    const DomainSpec& dom = e.dom;
    const std::size_t m = e.m();
    const int d = dom.d;
    const double unit = std::numbers::pi / dom.L;

    struct ABin {
        int j0, j1;
        cplx c;
    };
    std::array<std::vector<ABin>, 2> abins;
    int jmax0 = 0, jmax1 = 0;
    for (int q = 0; q < d; ++q) {
        double scale = 0.0;
        for (const cplx& z : alpha.coeff[q]) scale = std::max(scale, std::abs(z));
        double cut = scale * 1e-15;
        for (std::size_t tf = 0; tf < dom.n_spatial(); ++tf) {
            cplx z = alpha.coeff[q][tf];
            if (std::abs(z) <= cut) continue;
            auto tp = dom.tpair(tf);
            ABin b;
            b.j0 = dom.mode_of_bin(tp[0]);
            b.j1 = d == 2 ? dom.mode_of_bin(tp[1]) : 0;
            int sigma = std::abs(b.j0) + std::abs(b.j1);
            b.c = (sigma % 2 == 0) ? z : -z;
            jmax0 = std::max(jmax0, std::abs(b.j0));
            jmax1 = std::max(jmax1, std::abs(b.j1));
            abins[q].push_back(b);
        }
    }

    std::vector<cplx> pw0(jmax0 + 1), pw1(jmax1 + 1);
    for (int q = 0; q < d; ++q) out[q].assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        fill_powers(pw0, unit, e.x[0][i]);
        if (d == 2) fill_powers(pw1, unit, e.x[1][i]);
        for (int q = 0; q < d; ++q) {
            double acc = 0.0;
            for (const ABin& b : abins[q]) {
                cplx ph = pick_power(pw0, b.j0);
                if (d == 2) ph *= pick_power(pw1, b.j1);
                acc += b.c.real() * ph.real() - b.c.imag() * ph.imag();
            }
            out[q][i] = acc;
        }
    }
}

} // namespace

ParticleEnsemble sample_from_field(const SpectralField& y0, std::size_t m,
                                   std::uint64_t seed, std::uint64_t replicate,
                                   double vmax) {
    const DomainSpec& dom = y0.dom;
    dom.validate();
    if (m == 0) throw std::invalid_argument("sample_from_field: m must be positive");
    if (!(vmax > 1.0)) throw std::invalid_argument("sample_from_field: vmax too small");

    double lo = 0.0, hi = 0.0;
    lattice_range(y0, vmax, lo, hi);
    if (lo < -1e-12)
        throw std::invalid_argument(
            "sample_from_field: 1 + y0 is negative (not a density perturbation), "
            "lattice min = " + std::to_string(lo));
    double bound = hi * 1.05 + 1e-9; // small headroom for off-lattice peaks

    PointEvaluator eval(y0);
    std::uint64_t salt = fold_replicate(kSampleSalt, replicate);

    ParticleEnsemble e;
    e.dom = dom;
    e.seed = seed;
    e.replicate = replicate;
    for (int q = 0; q < dom.d; ++q) {
        e.x[q].resize(m);
        e.v[q].resize(m);
    }

    const int d = dom.d;
    for (std::size_t i = 0; i < m; ++i) {
        bool accepted = false;
        for (std::uint64_t a = 0; a < 200000; ++a) {
            std::uint64_t base = rng::key(seed, salt, i, a);
            std::array<double, 2> xx{0.0, 0.0}, vv{0.0, 0.0};
            bool in_box = true;
            for (int q = 0; q < d; ++q) {
                double u = rng::uniform01(rng::key2(base, static_cast<std::uint64_t>(q)));
                xx[q] = -dom.L + 2.0 * dom.L * u;
                if (xx[q] >= dom.L) xx[q] -= 2.0 * dom.L;
                vv[q] = rng::normal(rng::key2(base, static_cast<std::uint64_t>(d + q)));
                if (std::abs(vv[q]) > vmax) in_box = false;
            }
            if (!in_box) continue; // proposal is the box-truncated Gaussian
            double val = 1.0 + eval(xx, vv);
            if (val > bound)
                throw std::runtime_error("sample_from_field: rejection bound exceeded; "
                                         "refine the check lattice");
            double u = rng::uniform01(rng::key2(base, static_cast<std::uint64_t>(2 * d)));
            if (u * bound <= std::max(val, 0.0)) {
                for (int q = 0; q < d; ++q) {
                    e.x[q][i] = xx[q];
                    e.v[q][i] = vv[q];
                }
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw std::runtime_error("sample_from_field: rejection sampler stalled");
    }
    return e;
}

ForceEval evaluate_forces(const ParticleEnsemble& e, const PotentialSpec& U,
                          ForcePath path) {
    if (!(e.dom == U.dom))
        throw std::invalid_argument("evaluate_forces: ensemble/potential domain mismatch");
    if (e.m() == 0) throw std::invalid_argument("evaluate_forces: empty ensemble");
    ForceEval F;
    F.s1.assign(e.m(), 0.0);
    for (int q = 0; q < e.dom.d; ++q) F.drift[q].assign(e.m(), 0.0);
    if (path == ForcePath::direct)
        forces_direct(e, U, F);
    else
        forces_spectral(e, U, F);
    return F;
}

void particle_step(ParticleEnsemble& e, const PotentialSpec& U, const ControlShape& alpha,
                   double u, double dt, std::uint64_t step_index,
                   const ParticleOptions& opts) {
    const DomainSpec& dom = e.dom;
    const std::size_t m = e.m();
    const int d = dom.d;

    ForceEval F = evaluate_forces(e, U, opts.force);

    std::array<std::vector<double>, 2> avals;
    if (u != 0.0) alpha_at_particles(e, alpha, avals);

    std::uint64_t salt = fold_replicate(kNoiseSalt, e.replicate);
    double root_dt = std::sqrt(dt);

    for (std::size_t i = 0; i < m; ++i) {
        // positions advance with the pre-update velocity
        for (int q = 0; q < d; ++q)
            e.x[q][i] = wrap_position(dom.L, e.x[q][i] + e.v[q][i] * dt);
        double sigma = 0.0;
        if (opts.noise) sigma = std::sqrt(2.0 * std::max(F.s1[i], 0.0)) * root_dt;
        for (int q = 0; q < d; ++q) {
            double a = F.drift[q][i];
            if (u != 0.0) a -= u * avals[q][i];
            double dv = a * dt;
            if (opts.noise)
                dv += sigma * rng::normal(rng::key(e.seed, salt, i, step_index,
                                                   static_cast<std::uint64_t>(q)));
            e.v[q][i] += dv;
        }
    }
}

EnsembleStats estimate_stats(const ParticleEnsemble& e) {
    const DomainSpec& dom = e.dom;
    const std::size_t m = e.m();
    const int d = dom.d;
    EnsembleStats st;
    st.dom = dom;
    st.m = m;
    std::size_t ns = dom.n_spatial();
    st.counts.assign(ns, 0);
    st.density.assign(ns, 0.0);
    for (int q = 0; q < d; ++q) st.momentum[q].assign(ns, 0.0);

    double w = dom.cell_width();
    double cell_vol = std::pow(w, d);
    for (std::size_t i = 0; i < m; ++i) {
        int t0 = std::min(static_cast<int>((e.x[0][i] + dom.L) / w), dom.Nx - 1);
        int t1 = 0;
        if (d == 2) t1 = std::min(static_cast<int>((e.x[1][i] + dom.L) / w), dom.Nx - 1);
        std::size_t cell = dom.tflat(std::max(t0, 0), std::max(t1, 0));
        st.counts[cell] += 1;
        for (int q = 0; q < d; ++q) st.momentum[q][cell] += e.v[q][i];
        for (int q = 0; q < d; ++q) st.mean_v[q] += e.v[q][i];
    }
    double scale = 1.0 / (static_cast<double>(m) * cell_vol);
    for (std::size_t c = 0; c < ns; ++c) {
        st.density[c] = static_cast<double>(st.counts[c]) * scale;
        for (int q = 0; q < d; ++q) st.momentum[q][c] *= scale;
    }
    for (int q = 0; q < d; ++q) st.mean_v[q] /= static_cast<double>(m);
    if (m > 1) {
        for (std::size_t i = 0; i < m; ++i)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    st.cov_v[a][b] += (e.v[a][i] - st.mean_v[a]) * (e.v[b][i] - st.mean_v[b]);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) st.cov_v[a][b] /= static_cast<double>(m - 1);
    }
    return st;
}

namespace {

// cell averages of one Hermite slice of a coefficient field: multiply mode j
// by sinc(pi j / Nx) exp(i pi j / Nx) per dimension (average over [x_n, x_n+w))
std::vector<double> cell_averaged_slice(const SpectralField& y, std::size_t kf) {
    const DomainSpec& dom = y.dom;
    std::size_t ns = dom.n_spatial();
    std::vector<cplx> buf(ns);
    for (std::size_t tf = 0; tf < ns; ++tf) {
        cplx z = y.at(kf, tf);
        auto tp = dom.tpair(tf);
        for (int q = 0; q < dom.d; ++q) {
            int j = dom.mode_of_bin(tp[q]);
            if (j == 0) continue;
            double arg = std::numbers::pi * j / dom.Nx;
            z *= std::polar(std::sin(arg) / arg, arg);
        }
        buf[tf] = z;
    }
    spatial_to_nodal(dom, buf.data(), 1);
    std::vector<double> out(ns);
    for (std::size_t tf = 0; tf < ns; ++tf) out[tf] = buf[tf].real();
    return out;
}

} // namespace

MeanfieldReport meanfield_compare(const SpectralField& y0, const PotentialSpec& U,
                                  const ControlShape& alpha, const ControlSignal& u,
                                  const MeanfieldConfig& cfg) {
    const DomainSpec& dom = y0.dom;
    dom.validate();
    cfg.pde_grid.validate();
    u.validate();
    if (cfg.m_values.empty())
        throw std::invalid_argument("meanfield_compare: no ensemble sizes");
    if (cfg.replicates < 2)
        throw std::invalid_argument("meanfield_compare: need at least 2 replicates");
    double T = cfg.pde_grid.T;
    auto steps = static_cast<std::uint64_t>(std::llround(T / cfg.dt_particle));
    if (steps < 1 || std::abs(static_cast<double>(steps) * cfg.dt_particle - T) > 1e-9 * T)
        throw std::invalid_argument("meanfield_compare: dt_particle must divide the horizon");

    StepOptions sopt;
    sopt.scheme = Scheme::imex_euler;
    sopt.store_states = true;
    Trajectory traj = direct_march(y0, cfg.pde_grid, U, alpha, u, sopt);
    if (traj.blew_up)
        throw std::runtime_error("meanfield_compare: reference march blew up");
    const SpectralField& yT = traj.states.back();

    double mass_mode = yT.at(0, 0).real();
    double M = dom.volume() * (1.0 + mass_mode);
    if (!(M > 0.0))
        throw std::runtime_error("meanfield_compare: total mass is not positive");

    std::size_t ns = dom.n_spatial();
    double cell_vol = std::pow(dom.cell_width(), dom.d);
    const int d = dom.d;

    MeanfieldReport rep;
    rep.time = T;
    rep.pde_density.assign(ns, 0.0);
    {
        // p(x) = (1 + rho(x)) / M with rho the k = 0 moment of mu y
        auto rho_bar = cell_averaged_slice(yT, 0);
        for (std::size_t c = 0; c < ns; ++c)
            rep.pde_density[c] = (1.0 + rho_bar[c]) / M;
    }
    for (int q = 0; q < d; ++q) {
        std::size_t kf = q == 0 ? dom.kflat(1, 0) : dom.kflat(0, 1);
        auto mom_bar = cell_averaged_slice(yT, kf);
        rep.pde_momentum[q].resize(ns);
        for (std::size_t c = 0; c < ns; ++c) rep.pde_momentum[q][c] = mom_bar[c] / M;
    }

    for (double uv : u.u)
        if (uv != 0.0) rep.control_active = true;
    if (rep.control_active)
        rep.note = "control enters the particle drift as -u alpha(x); agreement with "
                   "the controlled equation is a modelling check, not a derived limit";

    ParticleOptions popt;
    popt.noise = cfg.noise;
    popt.force = cfg.force;
    double dtu = u.grid.dt();
    int ncells_u = u.grid.Nt;

    for (std::size_t mi = 0; mi < cfg.m_values.size(); ++mi) {
        std::size_t m = cfg.m_values[mi];
        std::vector<std::vector<double>> dens(cfg.replicates);
        std::vector<std::array<std::vector<double>, 2>> mom(cfg.replicates);
        for (int r = 0; r < cfg.replicates; ++r) {
            // replicate ids shared across m (common random numbers); replicates
            // within one m are independent
            ParticleEnsemble ens =
                sample_from_field(y0, m, cfg.seed, static_cast<std::uint64_t>(r));
            for (std::uint64_t s = 0; s < steps; ++s) {
                double t = static_cast<double>(s) * cfg.dt_particle;
                int cell = std::min(static_cast<int>(t / dtu), ncells_u - 1);
                particle_step(ens, U, alpha, u.u[static_cast<std::size_t>(cell)],
                              cfg.dt_particle, s, popt);
            }
            EnsembleStats st = estimate_stats(ens);
            dens[r] = std::move(st.density);
            mom[r] = std::move(st.momentum);
        }

        MeanfieldRow row;
        row.m = m;
        double dd = 0.0, dse = 0.0, md = 0.0, mse = 0.0;
        double R = static_cast<double>(cfg.replicates);
        for (std::size_t c = 0; c < ns; ++c) {
            double mean = 0.0;
            for (int r = 0; r < cfg.replicates; ++r) mean += dens[r][c];
            mean /= R;
            double var = 0.0;
            for (int r = 0; r < cfg.replicates; ++r) {
                double dvr = dens[r][c] - mean;
                var += dvr * dvr;
            }
            var /= (R - 1.0) * R; // squared standard error of the mean
            double diff = mean - rep.pde_density[c];
            dd += cell_vol * diff * diff;
            dse += cell_vol * var;
            for (int q = 0; q < d; ++q) {
                double mmean = 0.0;
                for (int r = 0; r < cfg.replicates; ++r) mmean += mom[r][q][c];
                mmean /= R;
                double mvar = 0.0;
                for (int r = 0; r < cfg.replicates; ++r) {
                    double dvr = mom[r][q][c] - mmean;
                    mvar += dvr * dvr;
                }
                mvar /= (R - 1.0) * R;
                double mdiff = mmean - rep.pde_momentum[q][c];
                md += cell_vol * mdiff * mdiff;
                mse += cell_vol * mvar;
            }
        }
        row.density_diff = std::sqrt(dd);
        row.density_se = std::sqrt(dse);
        row.momentum_diff = std::sqrt(md);
        row.momentum_se = std::sqrt(mse);
        row.density_within_3se = row.density_diff <= 3.0 * row.density_se;
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace kfp
