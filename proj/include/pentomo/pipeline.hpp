#ifndef PENTOMO_PIPELINE_HPP
#define PENTOMO_PIPELINE_HPP

#include <map>

#include "pentomo/io.hpp"
#include "pentomo/wigner.hpp"

namespace pentomo {

/// Errors of a reconstruction against the analytic ground truth. rho12 is
/// additionally compared after aligning the free global phases of the
/// extracted branch states (the raw and aligned errors coincide whenever the
/// true amplitudes anchor real-positive).
struct ComparisonReport {
    struct BlockError {
        double max_abs = 0.0;
        double mean_abs = 0.0;
        double imag_max = 0.0;
    };
    BlockError rho11, rho22, rho12;
    double rho12_aligned_max_abs = 0.0;
    double c1_est = 0.0, c1_true = 0.0, c1_rel_err = 0.0;
    double c2_est = 0.0, c2_true = 0.0, c2_rel_err = 0.0;
    double theta_est = 0.0, theta_true = 0.0, theta_abs_err = 0.0;
    double runtime_seconds = 0.0;
    bool pass = false;
};

/// Simulates the full phase sweep plus the configured spin-pulse runs.
RecordSet run_simulate(const TomographyConfig& cfg);

/// Density-matrix blocks, amplitudes, and spin parameters from a record set.
ReconstructionReport run_reconstruct(const RecordSet& set);

/// Wigner blocks "w11", "w22", "w12" of a reconstruction report.
std::map<std::string, WignerBlock> run_wigner(const ReconstructionReport& report,
                                              const WignerGridSpec& grid);

/// Compares a reconstruction to the exact state described by `truth`.
ComparisonReport run_report(const ReconstructionReport& report, const TomographyConfig& truth);

/// Ground-truth blocks at the reconstruction cutoff.
EntangledState truth_state(const TomographyConfig& cfg, int cutoff);

std::string comparison_to_json(const ComparisonReport& report);

namespace io {
std::string wigner_block_to_csv(const WignerBlock& block);
std::string wigner_block_meta_json(const WignerBlock& block, const std::string& name);
}  // namespace io

}  // namespace pentomo

#endif
