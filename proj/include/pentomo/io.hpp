#ifndef PENTOMO_IO_HPP
#define PENTOMO_IO_HPP

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pentomo/tomography.hpp"

namespace pentomo {

/// Full run description: state parameters, cutoffs, drive, detector, and
/// sampling controls. All physical quantities are dimensionless.
struct TomographyConfig {
    // state of the form c1 |gamma>|up> + c2 e^{i theta} |gamma e^{i xi}>|down>
    double c1 = 0.5;
    double c2_mod = std::sqrt(3.0) / 2.0;
    double theta = M_PI;
    double gamma = 1.0;
    double xi = M_PI;

    int nc = 10;          // reconstruction cutoff Nc
    int n_meas = 12;      // measured excitation range N >= Nc
    double alpha_mod = 0.7;
    int phases = 22;      // K >= 2 Nc + 1
    double eta = 0.9;
    std::int64_t events_per_phase = 100000;
    std::uint64_t seed = 0;

    bool exact_mode = false;
    bool psd_projection = false;
    double cond_limit = 1e10;
    int threads = 0;  // 0 = hardware concurrency
    std::vector<SpinRotation> spin_pulses = {{M_PI / 2, 0.0}, {M_PI / 2, M_PI / 2}};
    std::string output_dir = "out";

    struct Tolerances {
        double rho_max_abs = 0.05;
        double rho12_imag_max = 0.01;
        double c_rel = 0.05;
        double theta_abs = 0.05;
    } tolerances;

    void validate() const;  // throws with the offending field name
};

/// Everything cmd_reconstruct needs from disk: the per-phase runs, the pulse
/// runs, and the configuration they were generated with.
struct RecordSet {
    TomographyConfig config;
    bool exact = false;
    int n_samp = 0;
    std::vector<MeasurementRecord> phase_records;
    std::vector<MeasurementRecord> pulse_records;
    std::vector<AnalyticRecord> analytic_phase_records;
    std::vector<AnalyticRecord> analytic_pulse_records;

    std::vector<double> phase_grid() const;
};

struct ReconstructionReport {
    int nc = 0;
    double alpha_mod = 0.0;
    double eta = 0.9;
    CyclotronDensityMatrix rho11, rho22, rho12;
    FockVector psi1, psi2;
    double c1_est = 0.0, c2_est = 0.0, theta_est = 0.0;
    double overlap_r = 0.0, overlap_beta = 0.0;
    double p_up = 0.0;
    std::vector<PulseSample> pbar;
    std::vector<BandDiagnostics> bands_up, bands_down;
    double imag_diag_max = 0.0;
    double purity_second_eig_11 = 0.0, purity_second_eig_22 = 0.0;
    bool overlap_ill_conditioned = false;
    bool psd_projected = false;
    std::string spin_recovery_error;  // empty when theta was recovered
};

namespace io {

TomographyConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const TomographyConfig& cfg);
TomographyConfig config_from_json(const std::string& text);

/// Writes content to path atomically (temp file + rename).
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string record_to_csv(const MeasurementRecord& rec);
std::string record_to_csv(const AnalyticRecord& rec);
MeasurementRecord record_from_csv(const std::string& text);
AnalyticRecord analytic_record_from_csv(const std::string& text);

void write_record_set(const std::filesystem::path& dir, const RecordSet& set);
RecordSet read_record_set(const std::filesystem::path& dir);

std::string report_to_json(const ReconstructionReport& report);
ReconstructionReport report_from_json(const std::string& text);

}  // namespace io
}  // namespace pentomo

#endif
