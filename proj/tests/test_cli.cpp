#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

bool dirs_identical(const fs::path& a, const fs::path& b) {
    for (const auto& entry : fs::directory_iterator(a)) {
        const fs::path other = b / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) return false;
    }
    return true;
}

const std::string kBin = PENTOMO_BIN;

std::string small_config(const std::string& tolerances) {
    return R"({
  "state": {"c1": 0.5, "c2": 0.8660254037844386, "theta": 3.141592653589793,
            "gamma": 1.0, "xi": 3.141592653589793},
  "nc": 5, "n_meas": 7, "alpha_mod": 0.7, "phases": 12, "eta": 0.9,
  "events_per_phase": 20000, "seed": 17,
  "tolerances": )" + tolerances + "\n}\n";
}

}  // namespace

TEST_CASE("cli end-to-end: simulate, reconstruct, wigner, report") {
    const fs::path root = fs::temp_directory_path() / "pentomo_cli_e2e";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "config.json";
    spit(cfg, small_config(R"({"rho_max_abs": 0.5, "rho12_imag_max": 0.5,
                               "c_rel": 0.5, "theta_abs": 3.0})"));

    CHECK(run(kBin + " simulate --config " + cfg.string() + " --out " + (root / "rec").string())
          == 0);
    CHECK(fs::exists(root / "rec" / "phase_0011.csv"));
    CHECK(fs::exists(root / "rec" / "pulse_01.csv"));
    CHECK(fs::exists(root / "rec" / "sidecar.json"));

    CHECK(run(kBin + " reconstruct --records " + (root / "rec").string() + " --out "
              + (root / "report.json").string())
          == 0);
    CHECK(fs::exists(root / "report.json"));

    CHECK(run(kBin + " wigner --report " + (root / "report.json").string() + " --out "
              + (root / "wig").string() + " --nx 11 --ny 11")
          == 0);
    for (const char* name : {"w11", "w22", "w12"}) {
        CHECK(fs::exists(root / "wig" / (std::string(name) + ".csv")));
        CHECK(fs::exists(root / "wig" / (std::string(name) + ".json")));
    }

    CHECK(run(kBin + " report --report " + (root / "report.json").string() + " --config "
              + cfg.string() + " --out " + (root / "cmp.json").string())
          == 0);
    const auto cmp = nlohmann::json::parse(slurp(root / "cmp.json"));
    CHECK(cmp.at("pass").get<bool>());

    // strict tolerances flip the exit code
    const fs::path strict = root / "strict.json";
    spit(strict, small_config(R"({"rho_max_abs": 1e-9, "rho12_imag_max": 1e-9,
                                  "c_rel": 1e-9, "theta_abs": 1e-9})"));
    CHECK(run(kBin + " report --report " + (root / "report.json").string() + " --config "
              + strict.string() + " --out " + (root / "cmp2.json").string())
          == 1);

    fs::remove_all(root);
}

TEST_CASE("cli determinism: one seed, byte-identical artifacts") {
    const fs::path root = fs::temp_directory_path() / "pentomo_cli_det";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "config.json";
    spit(cfg, small_config(R"({"rho_max_abs": 0.5, "rho12_imag_max": 0.5,
                               "c_rel": 0.5, "theta_abs": 3.0})"));

    for (const char* dir : {"a", "b"}) {
        CHECK(run(kBin + " simulate --config " + cfg.string() + " --out "
                  + (root / dir).string())
              == 0);
        CHECK(run(kBin + " reconstruct --records " + (root / dir).string()) == 0);
    }
    CHECK(dirs_identical(root / "a", root / "b"));

    // comparison reports match except for the measured runtime
    for (const char* dir : {"a", "b"}) {
        CHECK(run(kBin + " report --report " + (root / dir / "report.json").string()
                  + " --config " + cfg.string() + " --out "
                  + (root / dir / "cmp.json").string())
              == 0);
    }
    auto ja = nlohmann::json::parse(slurp(root / "a" / "cmp.json"));
    auto jb = nlohmann::json::parse(slurp(root / "b" / "cmp.json"));
    ja.erase("runtime_seconds");
    jb.erase("runtime_seconds");
    CHECK(ja == jb);

    fs::remove_all(root);
}

TEST_CASE("cli exact mode writes analytic weights") {
    const fs::path root = fs::temp_directory_path() / "pentomo_cli_exact";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "config.json";
    std::string text = small_config(R"({"rho_max_abs": 1e-7, "rho12_imag_max": 1e-7,
                               "c_rel": 1e-7, "theta_abs": 1e-7})");
    // the strict tolerances need the truncated-state mass below 1e-7
    const std::string old = R"("nc": 5, "n_meas": 7, "alpha_mod": 0.7, "phases": 12)";
    text.replace(text.find(old), old.size(),
                 R"("nc": 10, "n_meas": 12, "alpha_mod": 0.7, "phases": 22)");
    spit(cfg, text);

    CHECK(run(kBin + " simulate --exact --config " + cfg.string() + " --out "
              + (root / "rec").string())
          == 0);
    const std::string csv = slurp(root / "rec" / "phase_0000.csv");
    CHECK(csv.rfind("phase_index,phase,spin,k,weight", 0) == 0);

    CHECK(run(kBin + " reconstruct --records " + (root / "rec").string() + " --out "
              + (root / "report.json").string())
          == 0);
    // the exact pipeline satisfies even the strict tolerances
    CHECK(run(kBin + " report --report " + (root / "report.json").string() + " --config "
              + cfg.string() + " --out " + (root / "cmp.json").string())
          == 0);

    fs::remove_all(root);
}

TEST_CASE("cli surfaces missing records and bad configs") {
    const fs::path root = fs::temp_directory_path() / "pentomo_cli_err";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "config.json";
    spit(cfg, small_config(R"({"rho_max_abs": 0.5, "rho12_imag_max": 0.5,
                               "c_rel": 0.5, "theta_abs": 3.0})"));

    CHECK(run(kBin + " simulate --config " + cfg.string() + " --out " + (root / "rec").string())
          == 0);
    fs::remove(root / "rec" / "phase_0003.csv");
    CHECK(run(kBin + " reconstruct --records " + (root / "rec").string()) == 2);

    spit(root / "bad.json", R"({"nc": 5, "n_meas": 3})");
    CHECK(run(kBin + " simulate --config " + (root / "bad.json").string() + " --out "
              + (root / "x").string())
          == 2);

    fs::remove_all(root);
}

TEST_CASE("cli honors the output-directory environment override") {
    const fs::path root = fs::temp_directory_path() / "pentomo_cli_env";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "config.json";
    spit(cfg, small_config(R"({"rho_max_abs": 0.5, "rho12_imag_max": 0.5,
                               "c_rel": 0.5, "theta_abs": 3.0})"));

    const std::string cmd = "PENTOMO_OUT=" + (root / "env_out").string() + " " + kBin
                            + " simulate --config " + cfg.string();
    CHECK(run(cmd) == 0);
    CHECK(fs::exists(root / "env_out" / "sidecar.json"));

    fs::remove_all(root);
}
