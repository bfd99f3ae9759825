#ifndef PENTOMO_MEASUREMENT_HPP
#define PENTOMO_MEASUREMENT_HPP

#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "pentomo/state.hpp"

namespace pentomo {

/// Conditional number distributions per spin branch plus the branch weights.
struct OutcomeDistribution {
    Eigen::VectorXd p_up;
    Eigen::VectorXd p_down;
    double w_up = 0.0;
    double w_down = 0.0;
};

/// Joint (spin, k) counts of one simulated run at fixed drive amplitude.
struct MeasurementRecord {
    int phase_index = 0;
    double phi = 0.0;         // drive phase arg(alpha)
    double alpha_mod = 0.0;
    double eta = 1.0;
    std::int64_t total_events = 0;
    Eigen::Matrix<std::int64_t, 2, Eigen::Dynamic> counts;  // row 0 = up, 1 = down
    std::optional<SpinRotation> pulse;

    int k_max() const { return static_cast<int>(counts.cols()) - 1; }
};

/// Same layout as MeasurementRecord but carrying analytic joint weights
/// |c_i|^2 P_i(k) instead of counts.
struct AnalyticRecord {
    int phase_index = 0;
    double phi = 0.0;
    double alpha_mod = 0.0;
    double eta = 1.0;
    Eigen::Matrix<double, 2, Eigen::Dynamic> weights;
    std::optional<SpinRotation> pulse;

    int k_max() const { return static_cast<int>(weights.cols()) - 1; }
};

/// Seed plus stream-derivation rule: every (phase index, replicate) pair gets
/// an independent generator, so parallel and serial schedules agree bit for bit.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
};

std::mt19937_64 derive_stream(const RngSpec& spec, std::int64_t stream_id);

/// P(n) = <n,alpha| rho |n,alpha> for n = 0..n_max.
Eigen::VectorXd displaced_distribution(const CyclotronDensityMatrix& rho, Complex alpha,
                                       int n_max);

/// Binomial detection smearing: P_out(k) = sum_{n>=k} C(n,k) eta^k (1-eta)^{n-k} p(n).
Eigen::VectorXd efficiency_convolve(const Eigen::VectorXd& p, double eta);

/// Margin n_max for faithful sampling of a state with support <= base when
/// displaced by |alpha|.
int sampling_cutoff(int base, double alpha_mod);

/// Simulates `events` joint (spin, k) measurements: spin ~ (c1^2, c2^2),
/// n ~ displaced branch distribution, k ~ Binomial(n, eta).
MeasurementRecord sample_events(const EntangledState& state, Complex alpha, double eta,
                                std::int64_t events, const RngSpec& rng, int phase_index,
                                int n_max);

/// Analytic counterpart of sample_events (infinite statistics).
AnalyticRecord analytic_record(const EntangledState& state, Complex alpha, double eta,
                               int phase_index, int n_max);

OutcomeDistribution empirical_distributions(const MeasurementRecord& record);
OutcomeDistribution empirical_distributions(const AnalyticRecord& record);

}  // namespace pentomo

#endif
