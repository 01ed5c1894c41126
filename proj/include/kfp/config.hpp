#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kfp/control.hpp"
#include "kfp/particles.hpp"
#include "kfp/verify.hpp"

namespace kfp {

void to_json(nlohmann::json& j, const ConstantsTable& t);
void from_json(const nlohmann::json& j, ConstantsTable& t);

} // namespace kfp

namespace kfp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;   // malformed config / flags
inline constexpr int kExitRuntime = 3;  // blow-up, non-convergence, broken inputs
inline constexpr int kExitStalled = 4;  // optimizer made no further progress

// configuration problems are reported on this type so the driver can map
// them to kExitConfig
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

nlohmann::json default_config();
nlohmann::json load_config(const std::filesystem::path& p);
// dotted-path override "a.b.c=value"; the value is parsed as JSON when
// possible and kept as a string otherwise
void apply_override(nlohmann::json& cfg, const std::string& spec);
// defaults folded under the user config; unknown keys are rejected
nlohmann::json merge_config(const nlohmann::json& user);

// materialized problem pieces shared by the verbs
struct Instance {
    DomainSpec dom;
    TimeGrid grid;
    Scheme scheme = Scheme::imex_euler;
    PotentialSpec U;
    ControlShape alpha;
    SpectralField y0;
    ControlSignal u;
    nlohmann::json cfg; // echoed, defaults folded in
    std::uint64_t seed = 1;
};

Instance build_instance(const nlohmann::json& merged, std::uint64_t seed);

int run_simulate(const Instance& inst, const std::filesystem::path& out);
int run_picard(const Instance& inst, const std::filesystem::path& out);
int run_optimize(const Instance& inst, const std::filesystem::path& out);
int run_particles(const Instance& inst, const std::filesystem::path& out);
int run_verify(const Instance& inst, const std::filesystem::path& out);

// load config, apply overrides, build the instance, dispatch, write
// artifacts + manifest; maps exceptions to exit codes
int run_verb(const std::string& verb, const std::filesystem::path& config,
             const std::vector<std::string>& overrides, std::uint64_t seed,
             const std::filesystem::path& out);

struct CompareOptions {
    double atol = 0.0;
    double rtol = 0.0;
    bool require_identical = false;
};

// per-column max-abs differences between two CSV files, or between the
// matching CSV files of two directories; prints one line per column.
// Structural mismatch (schema, row count, missing file) exits kExitRuntime;
// numeric differences only fail under require_identical or the tolerances.
int run_compare(const std::filesystem::path& a, const std::filesystem::path& b,
                const CompareOptions& opts, const std::filesystem::path& out);

} // namespace kfp::cli
