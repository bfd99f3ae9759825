#include "pentomo/tomography.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pentomo {

namespace {

double binomial_weight(int k, int n, double log_eta, double log_loss) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)
                    + k * log_eta + (n - k) * log_loss);
}

// True-excitation cutoff for the detector convolution: rows beyond it reach
// any measured bin k <= n_meas with binomial weight < 1e-14.
int convolution_row_cutoff(int n_meas, double eta) {
    const double log_eta = std::log(eta);
    const double log_loss = std::log1p(-eta);
    int n = n_meas;
    while (n < n_meas + 2000) {
        if (eta * n > n_meas && binomial_weight(n_meas, n, log_eta, log_loss) < 1e-14) {
            return n;
        }
        ++n;
    }
    return n;
}

}  // namespace

double wrap_angle(double angle) {
    double a = std::remainder(angle, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

FourierBand fourier_band(const std::vector<Eigen::VectorXd>& per_phase,
                         const std::vector<double>& phases, int s) {
    const int K = static_cast<int>(phases.size());
    if (per_phase.size() != phases.size() || K == 0) {
        throw std::invalid_argument("fourier_band: phase/distribution size mismatch");
    }
    if (K < 2 * s + 1) {
        throw std::invalid_argument("fourier_band: too few phases for band s (aliasing)");
    }
    const auto n_vals = per_phase.front().size();
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n_vals);
    for (int j = 0; j < K; ++j) {
        if (per_phase[j].size() != n_vals) {
            throw std::invalid_argument("fourier_band: ragged distributions");
        }
        acc += std::polar(1.0, s * phases[j]) * per_phase[j];
    }
    return {s, acc / static_cast<double>(K)};
}

KernelMatrix build_kernel(int s, double alpha_mod, double eta, int n_meas, int nc) {
    if (s < 0 || s > nc) {
        throw std::invalid_argument("build_kernel: band index out of range");
    }
    if (!(eta > 0.0) || eta > 1.0) {
        throw std::invalid_argument("build_kernel: eta out of range");
    }
    if (n_meas < nc) {
        throw std::invalid_argument("build_kernel: n_meas must be >= nc");
    }
    const int cols = nc + 1 - s;
    const int rows_true = eta < 1.0 ? convolution_row_cutoff(n_meas, eta) : n_meas;

    // Coefficient of <m+s|rho|m> in P(n, alpha) at phi = 0; products of two
    // real displacement elements.
    Eigen::MatrixXd raw(rows_true + 1, cols);
    for (int n = 0; n <= rows_true; ++n) {
        for (int m = 0; m < cols; ++m) {
            raw(n, m) = displacement_element(m + s, n, alpha_mod).real()
                        * displacement_element(m, n, alpha_mod).real();
        }
    }

    KernelMatrix kern;
    kern.s = s;
    kern.alpha_mod = alpha_mod;
    kern.eta = eta;
    kern.n_meas = n_meas;
    kern.nc = nc;
    if (eta == 1.0) {
        kern.G = raw.topRows(n_meas + 1);
        return kern;
    }
    const double log_eta = std::log(eta);
    const double log_loss = std::log1p(-eta);
    kern.G = Eigen::MatrixXd::Zero(n_meas + 1, cols);
    for (int k = 0; k <= n_meas; ++k) {
        for (int n = k; n <= rows_true; ++n) {
            kern.G.row(k) += binomial_weight(k, n, log_eta, log_loss) * raw.row(n);
        }
    }
    return kern;
}

PseudoInverse pseudo_invert(const KernelMatrix& kernel, double cond_limit) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(kernel.G,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    const double cond_gtg = smin > 0.0 ? (smax / smin) * (smax / smin)
                                       : std::numeric_limits<double>::infinity();
    if (!(cond_gtg <= cond_limit)) {
        std::ostringstream msg;
        msg << "pseudo_invert: kernel for band s=" << kernel.s
            << " is rank deficient or ill-conditioned, cond(G^T G) = " << cond_gtg;
        throw std::runtime_error(msg.str());
    }
    PseudoInverse out;
    out.cond_gtg = cond_gtg;
    out.M = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    return out;
}

ReconstructedBlock reconstruct_block(const std::vector<OutcomeDistribution>& dists,
                                     const std::vector<double>& phases, Spin spin,
                                     const InversionParams& par) {
    const int K = static_cast<int>(phases.size());
    if (dists.size() != phases.size()) {
        throw std::invalid_argument("reconstruct_block: phase/distribution size mismatch");
    }
    if (K < 2 * par.nc + 1) {
        throw std::invalid_argument("reconstruct_block: insufficient phases (need K >= 2 Nc + 1)");
    }
    double branch_weight = 0.0;
    std::vector<Eigen::VectorXd> p(dists.size());
    for (std::size_t j = 0; j < dists.size(); ++j) {
        const Eigen::VectorXd& full = spin == Spin::up ? dists[j].p_up : dists[j].p_down;
        branch_weight += spin == Spin::up ? dists[j].w_up : dists[j].w_down;
        p[j] = Eigen::VectorXd::Zero(par.n_meas + 1);
        p[j].head(std::min<Eigen::Index>(full.size(), par.n_meas + 1)) =
            full.head(std::min<Eigen::Index>(full.size(), par.n_meas + 1));
    }
    if (branch_weight <= 0.0) {
        throw std::invalid_argument("reconstruct_block: empty spin branch");
    }

    ReconstructedBlock out;
    out.rho.entries = Eigen::MatrixXcd::Zero(par.nc + 1, par.nc + 1);
    for (int s = 0; s <= par.nc; ++s) {
        const FourierBand band = fourier_band(p, phases, s);
        const KernelMatrix kern = build_kernel(s, par.alpha_mod, par.eta, par.n_meas, par.nc);
        const PseudoInverse inv = pseudo_invert(kern, par.cond_limit);
        const Eigen::VectorXcd b = inv.M * band.values;
        const double residual = (kern.G * b - band.values).norm();
        out.bands.push_back({s, inv.cond_gtg, residual});
        if (s == 0) {
            out.max_imag_diag = b.imag().cwiseAbs().maxCoeff();
            for (int m = 0; m <= par.nc; ++m) {
                out.rho.entries(m, m) = b(m).real();
            }
        } else {
            for (int m = 0; m + s <= par.nc; ++m) {
                out.rho.entries(m + s, m) = b(m);
                out.rho.entries(m, m + s) = std::conj(b(m));
            }
        }
    }
    return out;
}

ExtractedAmplitudes extract_amplitudes(const CyclotronDensityMatrix& rho,
                                       double diag_threshold) {
    const auto& r = rho.entries;
    const int dim = static_cast<int>(r.rows());
    double best = -std::numeric_limits<double>::infinity();
    for (int n = 0; n < dim; ++n) best = std::max(best, r(n, n).real());
    if (best < diag_threshold) {
        throw std::runtime_error("extract_amplitudes: maximal diagonal entry below threshold");
    }
    // ties (degenerate diagonals, e.g. |gamma| = 1) resolve to the lowest
    // index so the gauge does not hinge on rounding
    int anchor = 0;
    while (r(anchor, anchor).real() < best * (1.0 - 1e-9)) ++anchor;
    const double a_anchor = std::sqrt(best);
    Eigen::VectorXcd a = r.col(anchor) / a_anchor;
    a(anchor) = a_anchor;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (r + r.adjoint()));
    const auto& ev = eig.eigenvalues();  // ascending
    ExtractedAmplitudes out;
    out.psi = make_fock_vector(std::move(a));
    out.anchor = anchor;
    out.second_eigenvalue = dim > 1 ? ev(dim - 2) : 0.0;
    return out;
}

OffdiagonalResult reconstruct_offdiagonal(const CyclotronDensityMatrix& rho11,
                                          const CyclotronDensityMatrix& rho22,
                                          double diag_threshold) {
    OffdiagonalResult out;
    out.left = extract_amplitudes(rho11, diag_threshold);
    out.right = extract_amplitudes(rho22, diag_threshold);
    out.psi_overlap = overlap(out.left.psi, out.right.psi);
    out.overlap_ill_conditioned = std::abs(out.psi_overlap) < 1e-6;
    out.rho12 = outer_product(out.left.psi, out.right.psi);
    return out;
}

SpinParameters recover_spin_parameters(double p_up, const std::vector<PulseSample>& pbar,
                                       double r, double beta, double consistency_tol) {
    if (!(p_up > 0.0) || !(p_up < 1.0)) {
        throw std::invalid_argument("recover_spin_parameters: p_up must be in (0, 1)");
    }
    if (!(r > 0.0)) {
        throw std::invalid_argument("recover_spin_parameters: r = 0, phase unobservable");
    }
    const PulseSample* sin_pulse = nullptr;
    const PulseSample* cos_pulse = nullptr;
    for (const auto& e : pbar) {
        if (std::abs(wrap_angle(e.chi - M_PI / 2)) > 1e-9) continue;
        if (std::abs(wrap_angle(e.phi_d)) < 1e-9) sin_pulse = &e;
        if (std::abs(wrap_angle(e.phi_d - M_PI / 2)) < 1e-9) cos_pulse = &e;
    }
    if (sin_pulse == nullptr || cos_pulse == nullptr) {
        throw std::invalid_argument(
            "recover_spin_parameters: need pi/2 pulses with drive phases 0 and pi/2");
    }
    SpinParameters out;
    out.c1 = std::sqrt(p_up);
    out.c2_mod = std::sqrt(1.0 - p_up);
    const double denom = 2.0 * r * out.c1 * out.c2_mod;
    const double s = (2.0 * sin_pulse->pbar_up - 1.0) / denom;
    const double c = (1.0 - 2.0 * cos_pulse->pbar_up) / denom;
    if (std::abs(s) > 1.0 + consistency_tol || std::abs(c) > 1.0 + consistency_tol) {
        throw std::runtime_error("recover_spin_parameters: pulse populations inconsistent "
                                 "with overlap modulus");
    }
    out.theta = wrap_angle(std::atan2(s, c) - beta);
    return out;
}

}  // namespace pentomo
