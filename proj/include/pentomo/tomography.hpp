#ifndef PENTOMO_TOMOGRAPHY_HPP
#define PENTOMO_TOMOGRAPHY_HPP

#include <vector>

#include <Eigen/Dense>

#include "pentomo/measurement.hpp"

namespace pentomo {

/// One Fourier order of the phase-swept number distribution:
/// values(n) = (1/K) sum_j P(n, |alpha| e^{i phi_j}) e^{i s phi_j}.
struct FourierBand {
    int s = 0;
    Eigen::VectorXcd values;
};

/// Linear map from the density-matrix band <m+s|rho|m> to the band-s Fourier
/// coefficients of the measured distribution. Real by construction.
struct KernelMatrix {
    Eigen::MatrixXd G;  // (n_meas+1) x (nc+1-s)
    int s = 0;
    double alpha_mod = 0.0;
    double eta = 1.0;
    int n_meas = 0;
    int nc = 0;
};

struct PseudoInverse {
    Eigen::MatrixXd M;  // (nc+1-s) x (n_meas+1), M G = I
    double cond_gtg = 0.0;
};

struct BandDiagnostics {
    int s = 0;
    double cond_gtg = 0.0;
    double residual = 0.0;
};

struct InversionParams {
    double alpha_mod = 0.0;
    double eta = 1.0;
    int nc = 0;
    int n_meas = 0;
    double cond_limit = 1e10;
};

struct ReconstructedBlock {
    CyclotronDensityMatrix rho;
    std::vector<BandDiagnostics> bands;
    double max_imag_diag = 0.0;
};

struct ExtractedAmplitudes {
    FockVector psi;
    int anchor = 0;
    double second_eigenvalue = 0.0;  // purity diagnostic of the input block
};

struct OffdiagonalResult {
    CyclotronDensityMatrix rho12;
    Complex psi_overlap;
    bool overlap_ill_conditioned = false;
    ExtractedAmplitudes left;
    ExtractedAmplitudes right;
};

/// Spin-up probability measured after one Rabi pulse.
struct PulseSample {
    double chi = 0.0;
    double phi_d = 0.0;
    double pbar_up = 0.0;
};

struct SpinParameters {
    double c1 = 0.0;
    double c2_mod = 0.0;
    double theta = 0.0;
};

FourierBand fourier_band(const std::vector<Eigen::VectorXd>& per_phase,
                         const std::vector<double>& phases, int s);

KernelMatrix build_kernel(int s, double alpha_mod, double eta, int n_meas, int nc);

PseudoInverse pseudo_invert(const KernelMatrix& kernel, double cond_limit = 1e10);

/// Band-by-band least-squares inversion of phase-swept distributions into one
/// Hermitian density-matrix block.
ReconstructedBlock reconstruct_block(const std::vector<OutcomeDistribution>& dists,
                                     const std::vector<double>& phases, Spin spin,
                                     const InversionParams& params);

/// Pure-state amplitudes from an (approximately) rank-1 block, anchored at the
/// largest diagonal entry, whose amplitude is fixed real >= 0.
ExtractedAmplitudes extract_amplitudes(const CyclotronDensityMatrix& rho,
                                       double diag_threshold = 1e-6);

/// rho12 = |psi1><psi2| under the purity assumption.
OffdiagonalResult reconstruct_offdiagonal(const CyclotronDensityMatrix& rho11,
                                          const CyclotronDensityMatrix& rho22,
                                          double diag_threshold = 1e-6);

/// c1, c2 from the spin populations and theta from two pi/2 pulses with drive
/// phases 0 and pi/2, resolved by atan2 (no arcsin branch ambiguity).
SpinParameters recover_spin_parameters(double p_up, const std::vector<PulseSample>& pbar,
                                       double r, double beta,
                                       double consistency_tol = 0.25);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

}  // namespace pentomo

#endif
