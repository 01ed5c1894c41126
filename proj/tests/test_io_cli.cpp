#include <doctest.h>

#include <kfp/config.hpp>
#include <kfp/evolution.hpp>
#include <kfp/io.hpp>
#include <kfp/verify.hpp>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <sys/wait.h>

using namespace kfp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path work_root() {
    static fs::path p = [] {
        fs::path r = fs::temp_directory_path() / "kfp_io_cli_tests";
        fs::remove_all(r);
        fs::create_directories(r);
        return r;
    }();
    return p;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(KFP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// small stable grid: dt (pi jm / L)^2 = 0.125 at Nx = 16, L = pi
const std::string kSmallGrid =
    " --override domain.Nx=16 --override domain.Kv=5"
    " --override time.T=0.2 --override time.Nt=40";

} // namespace

TEST_CASE("fmt round-trips doubles exactly") {
    CHECK(io::fmt(0.0) == "0");
    CHECK(io::fmt(0.5) == "0.5");
    CHECK(io::fmt(1.0 / 3.0) == "0.33333333333333331");

    double probes[] = {1.0,       -2.5e-308,  3.141592653589793, 1e308,
                       -7.25e-12, 0.1 + 0.2, 123456789.123456789};
    for (double v : probes) {
        std::string s = io::fmt(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("fnv1a matches the reference vectors") {
    CHECK(io::fnv1a("", 0) == 0xcbf29ce484222325ull);
    CHECK(io::fnv1a("a", 1) == 0xaf63dc4c8601ec8cull);
    CHECK(io::fnv1a("foobar", 6) == 0x85944171f73967e8ull);
}

TEST_CASE("fnv1a_file agrees with the in-memory hash") {
    fs::path p = work_root() / "hash_probe.txt";
    std::string body = "line one\nline two\n";
    io::write_text(p, body);
    CHECK(io::fnv1a_file(p) == io::fnv1a(body.data(), body.size()));
    CHECK(slurp(p) == body);
}

TEST_CASE("field files round-trip and reject junk") {
    DomainSpec dom{1, 16, 4, kPi};
    SpectralField y = random_field(dom, 5, 1);
    fs::path p = work_root() / "field.bin";
    io::write_field(p, y);
    SpectralField z = io::read_field(p);
    REQUIRE(z.dom == dom);
    bool same = true;
    for (std::size_t i = 0; i < y.c.size(); ++i) same = same && y.c[i] == z.c[i];
    CHECK(same);

    fs::path bad = work_root() / "not_a_field.bin";
    io::write_text(bad, "this is not a coefficient dump");
    CHECK_THROWS_AS((void)io::read_field(bad), std::runtime_error);

    // truncated payload: valid header, missing coefficients
    std::string whole = slurp(p);
    io::write_text(bad, whole.substr(0, whole.size() / 2));
    CHECK_THROWS_AS((void)io::read_field(bad), std::runtime_error);
}

TEST_CASE("csv builders emit the documented headers") {
    TimeGrid grid{0.1, 4};
    ControlSignal u = ControlSignal::constant(grid, 0.25);
    std::string cs = io::control_csv(u);
    CHECK(cs.rfind("n,t,u\n", 0) == 0);
    CHECK(std::count(cs.begin(), cs.end(), '\n') == 5); // header + one row per cell
    CHECK(cs.find("0,0,0.25\n") != std::string::npos);

    CheckResult r;
    r.name = "probe";
    r.samples = 3;
    r.worst = 0.5;
    r.tolerance = 1.0;
    r.pass = true;
    std::string ck = io::checks_csv({{"identity", r}});
    CHECK(ck == "suite,name,samples,worst,tolerance,pass\nidentity,probe,3,0.5,1,1\n");
}

TEST_CASE("cli rejects bad invocations with the config exit code") {
    fs::path root = work_root();
    CHECK(run_cli("simulate --config /nonexistent.json --out " +
                  (root / "x1").string()) == cli::kExitConfig);

    fs::path badcfg = root / "bad.json";
    io::write_text(badcfg, "{ not json");
    CHECK(run_cli("simulate --config " + badcfg.string() + " --out " +
                  (root / "x2").string()) == cli::kExitConfig);

    CHECK(run_cli("simulate --override nosuch.key=1 --out " +
                  (root / "x3").string()) == cli::kExitConfig);

    // optimize insists on the scheme whose adjoint it implements
    CHECK(run_cli("optimize" + kSmallGrid +
                  " --override scheme=\"imex-trapezoid\" --out " +
                  (root / "x4").string()) == cli::kExitConfig);
}

TEST_CASE("simulate produces a manifest whose checksums match the artifacts") {
    fs::path out = work_root() / "sim_a";
    REQUIRE(run_cli("simulate" + kSmallGrid + " --seed 5 --out " + out.string()) ==
            cli::kExitOk);

    json man = json::parse(slurp(out / "manifest.json"));
    CHECK(man.at("format") == "kfp-manifest/1");
    CHECK(man.at("verb") == "simulate");
    CHECK(man.at("seed") == 5);
    CHECK(man.at("config").at("domain").at("Nx") == 16);
    CHECK(man.at("report").at("blew_up") == false);

    bool saw_trajectory = false;
    for (const json& o : man.at("outputs")) {
        fs::path f = out / o.at("file").get<std::string>();
        REQUIRE(fs::exists(f));
        CHECK(fs::file_size(f) == o.at("bytes").get<std::uint64_t>());
        std::uint64_t h = std::stoull(o.at("fnv1a").get<std::string>(), nullptr, 16);
        CHECK(io::fnv1a_file(f) == h);
        if (o.at("file") == "trajectory.csv") saw_trajectory = true;
    }
    CHECK(saw_trajectory);
}

TEST_CASE("identical config and seed reproduce artifacts byte for byte") {
    fs::path a = work_root() / "det_a";
    fs::path b = work_root() / "det_b";
    std::string args = "simulate" + kSmallGrid +
                       " --override initial.kind=\"random\""
                       " --override initial.amplitude=0.05 --seed 11 --out ";
    REQUIRE(run_cli(args + a.string()) == cli::kExitOk);
    REQUIRE(run_cli(args + b.string()) == cli::kExitOk);
    CHECK(io::fnv1a_file(a / "trajectory.csv") == io::fnv1a_file(b / "trajectory.csv"));

    CHECK(run_cli("compare " + a.string() + " " + b.string() +
                  " --require-identical") == cli::kExitOk);

    // a different seed draws different data
    fs::path c = work_root() / "det_c";
    REQUIRE(run_cli("simulate" + kSmallGrid +
                    " --override initial.kind=\"random\""
                    " --override initial.amplitude=0.05 --seed 12 --out " +
                    c.string()) == cli::kExitOk);
    CHECK(io::fnv1a_file(a / "trajectory.csv") != io::fnv1a_file(c / "trajectory.csv"));
}

TEST_CASE("compare flags structural mismatch and respects tolerances") {
    fs::path a = work_root() / "det_a"; // reuse the deterministic runs
    fs::path c = work_root() / "cmp_short";
    REQUIRE(run_cli("simulate" + kSmallGrid +
                    " --override time.Nt=20 --override initial.kind=\"random\""
                    " --override initial.amplitude=0.05 --seed 11 --out " +
                    c.string()) == cli::kExitOk);
    // row counts differ: structural failure
    CHECK(run_cli("compare " + a.string() + " " + c.string()) == cli::kExitRuntime);
    // a directory against itself passes under any tolerance
    CHECK(run_cli("compare " + a.string() + " " + a.string() + " --atol 1e-12") ==
          cli::kExitOk);
}

TEST_CASE("unstable step reports a blow-up exit") {
    fs::path out = work_root() / "blow";
    // default spatial resolution with dt far beyond the transport threshold
    CHECK(run_cli("simulate --override time.Nt=50 --out " + out.string()) ==
          cli::kExitRuntime);
    json man = json::parse(slurp(out / "manifest.json"));
    CHECK(man.at("report").at("blew_up") == true);
}

TEST_CASE("picard exits with the runtime code when iterations run out") {
    fs::path out = work_root() / "pic_short";
    CHECK(run_cli("picard" + kSmallGrid +
                  " --override control.kind=\"constant\""
                  " --override control.value=0.3"
                  " --override picard.max_iter=1 --out " +
                  out.string()) == cli::kExitRuntime);
    json man = json::parse(slurp(out / "manifest.json"));
    CHECK(man.at("report").at("converged") == false);

    fs::path ok = work_root() / "pic_ok";
    CHECK(run_cli("picard" + kSmallGrid +
                  " --override control.kind=\"constant\""
                  " --override control.value=0.3 --out " +
                  ok.string()) == cli::kExitOk);
}

TEST_CASE("optimizer exits stalled when starved of iterations") {
    fs::path out = work_root() / "opt_short";
    CHECK(run_cli("optimize" + kSmallGrid +
                  " --override optimize.max_iters=1 --out " + out.string()) ==
          cli::kExitStalled);
    json man = json::parse(slurp(out / "manifest.json"));
    CHECK(man.at("report").at("converged") == false);
    CHECK(fs::exists(out / "optimizer.csv"));
    CHECK(fs::exists(out / "target_control.csv"));
}

TEST_CASE("verify verb writes passing checks and a constants table") {
    fs::path out = work_root() / "ver";
    CHECK(run_cli("verify" + kSmallGrid +
                  " --override verify.identity_samples=4"
                  " --override verify.inequality_samples=4"
                  " --override verify.constants_samples=8 --out " +
                  out.string()) == cli::kExitOk);

    json man = json::parse(slurp(out / "manifest.json"));
    CHECK(man.at("report").at("all_pass") == true);

    json table = json::parse(slurp(out / "constants.json"));
    CHECK(table.at("c_hat").get<double>() >= 1.0);
    CHECK(table.at("u_l2").get<double>() > 0.0);

    // every data row of checks.csv ends in pass = 1
    std::string checks = slurp(out / "checks.csv");
    std::size_t rows = 0, passes = 0;
    std::size_t pos = checks.find('\n') + 1;
    while (pos < checks.size()) {
        std::size_t eol = checks.find('\n', pos);
        if (eol == std::string::npos) break;
        ++rows;
        if (checks.compare(eol - 2, 2, ",1") == 0) ++passes;
        pos = eol + 1;
    }
    CHECK(rows == 16);
    CHECK(passes == rows);
}
