#include "kfp/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace kfp::io {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for checksum: " + p.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (got < static_cast<std::streamsize>(sizeof buf)) break;
    }
    return h;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary); // binary: no newline translation
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("short write to " + p.string());
}

std::string trajectory_csv(const Trajectory& tr) {
    if (tr.states.empty())
        throw std::runtime_error("trajectory_csv: states were not stored");
    std::string s = "n,t,norm_Y,norm_Vv,mass_re\n";
    for (std::size_t n = 0; n < tr.states.size(); ++n) {
        s += std::to_string(n);
        s += ',';
        s += fmt(tr.grid.node(static_cast<int>(n)));
        s += ',';
        s += fmt(tr.norm_Y_hist[n]);
        s += ',';
        s += fmt(tr.norm_Vv_hist[n]);
        s += ',';
        s += fmt(tr.states[n].at(0, 0).real());
        s += '\n';
    }
    return s;
}

std::string control_csv(const ControlSignal& u) {
    std::string s = "n,t,u\n";
    for (std::size_t n = 0; n < u.u.size(); ++n) {
        s += std::to_string(n);
        s += ',';
        s += fmt(u.grid.node(static_cast<int>(n)));
        s += ',';
        s += fmt(u.u[n]);
        s += '\n';
    }
    return s;
}

std::string picard_csv(const PicardReport& rep) {
    std::string s = "iter,residual\n";
    for (std::size_t i = 0; i < rep.residuals.size(); ++i) {
        s += std::to_string(i + 1);
        s += ',';
        s += fmt(rep.residuals[i]);
        s += '\n';
    }
    return s;
}

std::string optimizer_csv(const std::vector<OptimizeIterate>& log) {
    std::string s = "iter,cost,tracking,penalty,step,stationarity\n";
    for (const auto& it : log) {
        s += std::to_string(it.iter);
        s += ',';
        s += fmt(it.cost);
        s += ',';
        s += fmt(it.tracking);
        s += ',';
        s += fmt(it.penalty);
        s += ',';
        s += fmt(it.step);
        s += ',';
        s += fmt(it.stationarity);
        s += '\n';
    }
    return s;
}

std::string checks_csv(const std::vector<std::pair<std::string, CheckResult>>& rows) {
    std::string s = "suite,name,samples,worst,tolerance,pass\n";
    for (const auto& [suite, r] : rows) {
        s += suite;
        s += ',';
        s += r.name;
        s += ',';
        s += std::to_string(r.samples);
        s += ',';
        s += fmt(r.worst);
        s += ',';
        s += fmt(r.tolerance);
        s += ',';
        s += r.pass ? "1" : "0";
        s += '\n';
    }
    return s;
}

std::string meanfield_csv(const MeanfieldReport& rep) {
    std::string s = "m,density_diff,density_se,momentum_diff,momentum_se,within_3se\n";
    for (const auto& row : rep.rows) {
        s += std::to_string(row.m);
        s += ',';
        s += fmt(row.density_diff);
        s += ',';
        s += fmt(row.density_se);
        s += ',';
        s += fmt(row.momentum_diff);
        s += ',';
        s += fmt(row.momentum_se);
        s += ',';
        s += row.density_within_3se ? "1" : "0";
        s += '\n';
    }
    return s;
}

std::string cells_csv(const MeanfieldReport& rep) {
    std::size_t ns = rep.pde_density.size();
    int d = rep.pde_momentum[1].empty() ? 1 : 2;
    std::string s = d == 1 ? "cell,pde_density,pde_momentum_1\n"
                           : "cell,pde_density,pde_momentum_1,pde_momentum_2\n";
    for (std::size_t c = 0; c < ns; ++c) {
        s += std::to_string(c);
        s += ',';
        s += fmt(rep.pde_density[c]);
        s += ',';
        s += fmt(rep.pde_momentum[0][c]);
        if (d == 2) {
            s += ',';
            s += fmt(rep.pde_momentum[1][c]);
        }
        s += '\n';
    }
    return s;
}

namespace {

constexpr char kFieldMagic[8] = {'K', 'F', 'P', 'F', 'L', 'D', '0', '1'};

template <class T>
void put(std::string& s, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    s.append(buf, sizeof(T));
}

template <class T>
T take(std::ifstream& in) {
    char buf[sizeof(T)];
    in.read(buf, sizeof(T));
    if (!in) throw std::runtime_error("field file truncated");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace

void write_field(const std::filesystem::path& p, const SpectralField& y) {
    std::string s;
    s.append(kFieldMagic, sizeof kFieldMagic);
    put<std::int32_t>(s, y.dom.d);
    put<std::int32_t>(s, y.dom.Nx);
    put<std::int32_t>(s, y.dom.Kv);
    put<std::int32_t>(s, 0);
    put<double>(s, y.dom.L);
    put<std::uint64_t>(s, y.c.size());
    for (const auto& z : y.c) {
        put<double>(s, z.real());
        put<double>(s, z.imag());
    }
    write_text(p, s);
}

SpectralField read_field(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kFieldMagic, 8) != 0)
        throw std::runtime_error("not a field file: " + p.string());
    DomainSpec dom;
    dom.d = take<std::int32_t>(in);
    dom.Nx = take<std::int32_t>(in);
    dom.Kv = take<std::int32_t>(in);
    take<std::int32_t>(in);
    dom.L = take<double>(in);
    dom.validate();
    auto count = take<std::uint64_t>(in);
    if (count != dom.size())
        throw std::runtime_error("field file size mismatch: " + p.string());
    SpectralField y(dom);
    for (auto& z : y.c) {
        double re = take<double>(in);
        double im = take<double>(in);
        z = {re, im};
    }
    return y;
}

} // namespace kfp::io
