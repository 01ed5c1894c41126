#include "kfp/fourier.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace kfp {

namespace {

struct PlanSet {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_complex* buf = nullptr;
    std::size_t len = 0;

    ~PlanSet() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
};

// Plans keyed by (d, Nx, batch). Creation is serialized; execution reuses the
// same aligned buffer so FFTW picks the same code path every call.
PlanSet& plans_for(const DomainSpec& dom, std::size_t batch) {
    static std::map<std::tuple<int, int, std::size_t>, PlanSet> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(dom.d, dom.Nx, batch);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    PlanSet& ps = cache[key];
    std::size_t ns = dom.n_spatial();
    ps.len = ns * batch;
    ps.buf = fftw_alloc_complex(ps.len);
    int n[2] = {dom.Nx, dom.Nx};
    int rank = dom.d;
    ps.fwd = fftw_plan_many_dft(rank, n, static_cast<int>(batch),
                                ps.buf, nullptr, 1, static_cast<int>(ns),
                                ps.buf, nullptr, 1, static_cast<int>(ns),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    ps.bwd = fftw_plan_many_dft(rank, n, static_cast<int>(batch),
                                ps.buf, nullptr, 1, static_cast<int>(ns),
                                ps.buf, nullptr, 1, static_cast<int>(ns),
                                FFTW_BACKWARD, FFTW_ESTIMATE);
    return ps;
}

void run(const DomainSpec& dom, std::complex<double>* data, std::size_t batch,
         bool forward) {
    PlanSet& ps = plans_for(dom, batch);
    std::memcpy(ps.buf, data, ps.len * sizeof(fftw_complex));
    fftw_execute(forward ? ps.fwd : ps.bwd);
    std::memcpy(data, ps.buf, ps.len * sizeof(fftw_complex));
}

} // namespace

void spatial_to_nodal(const DomainSpec& dom, std::complex<double>* data, std::size_t batch) {
    run(dom, data, batch, false);
}

void spatial_to_coeff(const DomainSpec& dom, std::complex<double>* data, std::size_t batch) {
    run(dom, data, batch, true);
    double scale = 1.0 / static_cast<double>(dom.n_spatial());
    std::size_t len = dom.n_spatial() * batch;
    for (std::size_t i = 0; i < len; ++i) data[i] *= scale;
}

bool bin_in_dealias_band(const DomainSpec& dom, std::size_t tflat) {
    int jm = dom.dealias_limit();
    auto t = dom.tpair(tflat);
    for (int i = 0; i < dom.d; ++i) {
        int j = dom.mode_of_bin(t[i]);
        if (j > jm || j < -jm) return false;
    }
    return true;
}

void apply_dealias_mask(const DomainSpec& dom, std::complex<double>* data, std::size_t batch) {
    std::size_t ns = dom.n_spatial();
    // precompute one spatial mask, reuse across the batch
    static thread_local std::vector<char> mask;
    static thread_local DomainSpec mask_dom;
    if (mask.size() != ns || !(mask_dom == dom)) {
        mask.assign(ns, 0);
        for (std::size_t t = 0; t < ns; ++t) mask[t] = bin_in_dealias_band(dom, t);
        mask_dom = dom;
    }
    for (std::size_t b = 0; b < batch; ++b) {
        std::complex<double>* blk = data + b * ns;
        for (std::size_t t = 0; t < ns; ++t)
            if (!mask[t]) blk[t] = 0.0;
    }
}

} // namespace kfp
