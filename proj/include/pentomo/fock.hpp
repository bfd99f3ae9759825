#ifndef PENTOMO_FOCK_HPP
#define PENTOMO_FOCK_HPP

#include <complex>

#include <Eigen/Dense>

namespace pentomo {

using Complex = std::complex<double>;

/// A cyclotron pure state truncated in the number basis. The weight lost to
/// truncation is kept so that callers can budget for it instead of silently
/// renormalizing.
struct FockVector {
    Eigen::VectorXcd amplitudes;   // a_n, n = 0..cutoff
    double truncation_mass = 0.0;  // 1 - sum_n |a_n|^2

    int cutoff() const { return static_cast<int>(amplitudes.size()) - 1; }
};

FockVector make_fock_vector(Eigen::VectorXcd amplitudes);

/// Associated Laguerre polynomial L_nu^k(x), three-term recurrence in nu.
double assoc_laguerre(int nu, int k, double x);

/// Matrix element <m|D(alpha)|n> of the displacement operator
/// D(alpha) = exp(alpha a^dag - conj(alpha) a) in the number basis.
Complex displacement_element(int m, int n, Complex alpha);

/// All elements <m|D(alpha)|n> for m = 0..rows-1, n = 0..cols-1.
Eigen::MatrixXcd displacement_matrix(int rows, int cols, Complex alpha);

/// Coherent-state amplitudes a_n = exp(-|gamma|^2/2) gamma^n / sqrt(n!),
/// truncated at N (not renormalized).
FockVector coherent_amplitudes(Complex gamma, int cutoff);

}  // namespace pentomo

#endif
