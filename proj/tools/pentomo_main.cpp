// Command-line driver: simulate, reconstruct, wigner, report.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "pentomo/pipeline.hpp"

namespace fs = std::filesystem;
using namespace pentomo;

namespace {

std::string resolve_out(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("PENTOMO_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    return config_value;
}

struct CommonOpts {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool exact = false;
    bool paper_scale = false;
};

TomographyConfig load_with_overrides(const CommonOpts& opts) {
    TomographyConfig cfg = io::load_config(opts.config_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.exact) cfg.exact_mode = true;
    if (opts.paper_scale) {
        cfg.events_per_phase = 1000000;
        // the 1e-3 imaginary-part budget needs a dense phase grid on top of
        // the larger per-phase sample
        cfg.phases = std::max(cfg.phases, 288);
        cfg.tolerances.rho_max_abs = 0.02;
        cfg.tolerances.rho12_imag_max = 1e-3;
    }
    cfg.output_dir = resolve_out(opts.out, cfg.output_dir);
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cyclotron/spin state tomography for a trapped electron"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* sim = app.add_subcommand("simulate", "Generate measurement records");
    sim->add_option("--config", opts.config_path, "Config JSON")->required();
    sim->add_option("--out", opts.out, "Output directory");
    sim->add_option("--seed", opts.seed, "Seed override")->each([&opts](const std::string&) {
        opts.seed_set = true;
    });
    sim->add_flag("--exact", opts.exact, "Write analytic distributions instead of counts");
    sim->add_flag("--paper-scale", opts.paper_scale, "10^6 events per phase");

    std::string records_dir, report_path, comparison_path;
    bool psd = false;
    auto* rec = app.add_subcommand("reconstruct", "Invert records into density matrices");
    rec->add_option("--records", records_dir, "Records directory")->required();
    rec->add_option("--out", report_path, "Report JSON path");
    rec->add_flag("--psd", psd, "Project blocks onto the PSD cone");

    WignerGridSpec grid;
    std::string block_sel = "all";
    auto* wig = app.add_subcommand("wigner", "Evaluate Wigner blocks of a report");
    wig->add_option("--report", report_path, "Reconstruction report JSON")->required();
    wig->add_option("--out", opts.out, "Output directory");
    wig->add_option("--xmin", grid.x_min);
    wig->add_option("--xmax", grid.x_max);
    wig->add_option("--ymin", grid.y_min);
    wig->add_option("--ymax", grid.y_max);
    wig->add_option("--nx", grid.nx);
    wig->add_option("--ny", grid.ny);
    wig->add_option("--block", block_sel, "w11 | w22 | w12 | all");

    auto* rep = app.add_subcommand("report", "Compare a report against the true state");
    rep->add_option("--report", report_path, "Reconstruction report JSON")->required();
    rep->add_option("--config", opts.config_path, "Config JSON with the true state")->required();
    rep->add_option("--out", comparison_path, "Comparison JSON path");
    rep->add_flag("--paper-scale", opts.paper_scale, "Use the paper-scale tolerances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const TomographyConfig cfg = load_with_overrides(opts);
            const RecordSet set = run_simulate(cfg);
            io::write_record_set(cfg.output_dir, set);
            std::cout << "wrote " << cfg.phases << " phase records + "
                      << cfg.spin_pulses.size() << " pulse records to " << cfg.output_dir
                      << "\n";
        } else if (rec->parsed()) {
            RecordSet set = io::read_record_set(records_dir);
            if (psd) set.config.psd_projection = true;
            const ReconstructionReport report = run_reconstruct(set);
            const std::string out =
                resolve_out(report_path, (fs::path(records_dir) / "report.json").string());
            io::atomic_write(out, io::report_to_json(report));
            std::cout << "wrote " << out << "\n";
        } else if (wig->parsed()) {
            std::ifstream in(report_path);
            if (!in) throw std::runtime_error("cannot open " + report_path);
            std::stringstream ss;
            ss << in.rdbuf();
            const ReconstructionReport report = io::report_from_json(ss.str());
            const fs::path out_dir = resolve_out(opts.out, "wigner_out");
            auto blocks = run_wigner(report, grid);
            for (const auto& [name, block] : blocks) {
                if (block_sel != "all" && block_sel != name) continue;
                io::atomic_write(out_dir / (name + ".csv"), io::wigner_block_to_csv(block));
                io::atomic_write(out_dir / (name + ".json"),
                                 io::wigner_block_meta_json(block, name));
            }
            std::cout << "wrote Wigner blocks to " << out_dir << "\n";
        } else if (rep->parsed()) {
            std::ifstream in(report_path);
            if (!in) throw std::runtime_error("cannot open " + report_path);
            std::stringstream ss;
            ss << in.rdbuf();
            const ReconstructionReport report = io::report_from_json(ss.str());
            TomographyConfig cfg = io::load_config(opts.config_path);
            if (opts.paper_scale) {
                cfg.tolerances.rho_max_abs = 0.02;
                cfg.tolerances.rho12_imag_max = 1e-3;
            }
            const auto start = std::chrono::steady_clock::now();
            ComparisonReport cmp = run_report(report, cfg);
            cmp.runtime_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const std::string out = resolve_out(comparison_path, "comparison.json");
            io::atomic_write(out, comparison_to_json(cmp));
            std::cout << (cmp.pass ? "PASS" : "FAIL") << ": wrote " << out << "\n";
            return cmp.pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
