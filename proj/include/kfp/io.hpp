#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kfp/control.hpp"
#include "kfp/particles.hpp"
#include "kfp/verify.hpp"

namespace kfp::io {

// All numeric output goes through %.17g: doubles round-trip exactly, so a
// rerun with the same config and seed reproduces artifacts byte for byte.
// Nothing here embeds timestamps or machine state.
std::string fmt(double v);

std::uint64_t fnv1a(const void* data, std::size_t n);
std::uint64_t fnv1a_file(const std::filesystem::path& p);

void write_text(const std::filesystem::path& p, const std::string& text);

// node histories: n,t,norm_Y,norm_Vv,mass_re (states must be stored)
std::string trajectory_csv(const Trajectory& tr);
// n,t,u
std::string control_csv(const ControlSignal& u);
// iter,residual
std::string picard_csv(const PicardReport& rep);
// iter,cost,tracking,penalty,step,stationarity
std::string optimizer_csv(const std::vector<OptimizeIterate>& log);
// suite,name,samples,worst,tolerance,pass
std::string checks_csv(const std::vector<std::pair<std::string, CheckResult>>& rows);
// m,density_diff,density_se,momentum_diff,momentum_se,within_3se
std::string meanfield_csv(const MeanfieldReport& rep);
// cell,pde_density[,pde_momentum_1[,pde_momentum_2]]
std::string cells_csv(const MeanfieldReport& rep);

// raw coefficient dump with a fixed little-endian header; read_field rejects
// anything whose header does not match a valid domain
void write_field(const std::filesystem::path& p, const SpectralField& y);
SpectralField read_field(const std::filesystem::path& p);

} // namespace kfp::io
