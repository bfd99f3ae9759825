#include "pentomo/measurement.hpp"

#include <cmath>
#include <stdexcept>

namespace pentomo {

namespace {

uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& gen) {
    return (gen() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw; cdf is nondecreasing with cdf.back() ~ 1.
int draw_discrete(const Eigen::VectorXd& cdf, std::mt19937_64& gen) {
    const double u = uniform01(gen) * cdf(cdf.size() - 1);
    int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (cdf(mid) > u) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

int draw_binomial(int n, double eta, std::mt19937_64& gen) {
    if (eta >= 1.0) return n;
    int k = 0;
    for (int i = 0; i < n; ++i) {
        if (uniform01(gen) < eta) ++k;
    }
    return k;
}

// drive phase as stored in records, in [0, 2 pi)
double principal_phase(Complex alpha) {
    const double phi = std::arg(alpha);
    return phi < 0.0 ? phi + 2.0 * M_PI : phi;
}

void check_eta(double eta) {
    if (!(eta > 0.0) || eta > 1.0) {
        throw std::invalid_argument("eta must be in (0, 1]");
    }
}

}  // namespace

std::mt19937_64 derive_stream(const RngSpec& spec, std::int64_t stream_id) {
    uint64_t z = spec.seed;
    z = splitmix64(z ^ (0x9e3779b97f4a7c15ULL * (static_cast<uint64_t>(stream_id) + 1)));
    z = splitmix64(z ^ (0xc2b2ae3d27d4eb4fULL * (spec.replicate + 1)));
    return std::mt19937_64(z);
}

Eigen::VectorXd displaced_distribution(const CyclotronDensityMatrix& rho, Complex alpha,
                                       int n_max) {
    const auto& r = rho.entries;
    if (r.rows() != r.cols()) {
        throw std::invalid_argument("displaced_distribution: rho must be square");
    }
    const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
    if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw std::invalid_argument("displaced_distribution: rho is not Hermitian");
    }
    if (n_max + 1 < r.rows()) {
        throw std::invalid_argument("displaced_distribution: n_max below rho cutoff");
    }
    const Eigen::MatrixXcd D =
        displacement_matrix(static_cast<int>(r.rows()), n_max + 1, alpha);
    Eigen::VectorXd p(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        p(n) = (D.col(n).adjoint() * r * D.col(n)).value().real();
    }
    return p;
}

Eigen::VectorXd efficiency_convolve(const Eigen::VectorXd& p, double eta) {
    check_eta(eta);
    if (eta == 1.0) return p;
    const int n_max = static_cast<int>(p.size()) - 1;
    const double log_eta = std::log(eta);
    const double log_loss = std::log1p(-eta);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(p.size());
    for (int n = 0; n <= n_max; ++n) {
        if (p(n) == 0.0) continue;
        const double lg_n = std::lgamma(n + 1.0);
        for (int k = 0; k <= n; ++k) {
            const double log_b = lg_n - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)
                                 + k * log_eta + (n - k) * log_loss;
            out(k) += std::exp(log_b) * p(n);
        }
    }
    return out;
}

int sampling_cutoff(int base, double alpha_mod) {
    return base + static_cast<int>(
        std::ceil(6.0 * alpha_mod * (std::sqrt(static_cast<double>(base)) + alpha_mod))) + 2;
}

MeasurementRecord sample_events(const EntangledState& state, Complex alpha, double eta,
                                std::int64_t events, const RngSpec& rng, int phase_index,
                                int n_max) {
    check_eta(eta);
    if (events < 1) {
        throw std::invalid_argument("sample_events: events must be >= 1");
    }
    const auto [p_up, p_down] = spin_probabilities(state);

    // Per-branch CDFs of the displaced number distribution; a branch with no
    // weight is never drawn, so its CDF stays empty.
    std::array<Eigen::VectorXd, 2> cdf;
    for (int b = 0; b < 2; ++b) {
        const double w = b == 0 ? p_up : p_down;
        if (w <= 0.0) continue;
        const Spin spin = b == 0 ? Spin::up : Spin::down;
        Eigen::VectorXd p = displaced_distribution(projected_density(state, spin), alpha, n_max);
        p = p.cwiseMax(0.0);
        Eigen::VectorXd c(p.size());
        double acc = 0.0;
        for (int i = 0; i < p.size(); ++i) {
            acc += p(i);
            c(i) = acc;
        }
        cdf[b] = std::move(c);
    }

    MeasurementRecord rec;
    rec.phase_index = phase_index;
    rec.phi = principal_phase(alpha);
    rec.alpha_mod = std::abs(alpha);
    rec.eta = eta;
    rec.total_events = events;
    rec.counts = Eigen::Matrix<std::int64_t, 2, Eigen::Dynamic>::Zero(2, n_max + 1);

    std::mt19937_64 gen = derive_stream(rng, phase_index);
    for (std::int64_t e = 0; e < events; ++e) {
        const int b = uniform01(gen) < p_up ? 0 : 1;
        const int n = draw_discrete(cdf[b], gen);
        const int k = draw_binomial(n, eta, gen);
        ++rec.counts(b, k);
    }
    return rec;
}

AnalyticRecord analytic_record(const EntangledState& state, Complex alpha, double eta,
                               int phase_index, int n_max) {
    check_eta(eta);
    const auto [p_up, p_down] = spin_probabilities(state);
    AnalyticRecord rec;
    rec.phase_index = phase_index;
    rec.phi = principal_phase(alpha);
    rec.alpha_mod = std::abs(alpha);
    rec.eta = eta;
    rec.weights = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n_max + 1);
    for (int b = 0; b < 2; ++b) {
        const double w = b == 0 ? p_up : p_down;
        if (w <= 0.0) continue;
        const Spin spin = b == 0 ? Spin::up : Spin::down;
        const Eigen::VectorXd p =
            displaced_distribution(projected_density(state, spin), alpha, n_max);
        rec.weights.row(b) = (w * efficiency_convolve(p, eta)).transpose();
    }
    return rec;
}

namespace {

template <typename Row>
Eigen::VectorXd conditional(const Row& row, double total) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(row.size());
    if (total > 0.0) {
        for (int i = 0; i < row.size(); ++i) p(i) = static_cast<double>(row(i)) / total;
    }
    return p;
}

}  // namespace

OutcomeDistribution empirical_distributions(const MeasurementRecord& record) {
    if (record.total_events <= 0) {
        throw std::invalid_argument("empirical_distributions: empty record");
    }
    const double up = static_cast<double>(record.counts.row(0).sum());
    const double down = static_cast<double>(record.counts.row(1).sum());
    OutcomeDistribution d;
    d.w_up = up / static_cast<double>(record.total_events);
    d.w_down = down / static_cast<double>(record.total_events);
    d.p_up = conditional(record.counts.row(0), up);
    d.p_down = conditional(record.counts.row(1), down);
    return d;
}

OutcomeDistribution empirical_distributions(const AnalyticRecord& record) {
    const double up = record.weights.row(0).sum();
    const double down = record.weights.row(1).sum();
    const double total = up + down;
    if (total <= 0.0) {
        throw std::invalid_argument("empirical_distributions: empty record");
    }
    OutcomeDistribution d;
    d.w_up = up / total;
    d.w_down = down / total;
    d.p_up = conditional(record.weights.row(0), up);
    d.p_down = conditional(record.weights.row(1), down);
    return d;
}

}  // namespace pentomo
