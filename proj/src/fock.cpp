#include "pentomo/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace pentomo {

FockVector make_fock_vector(Eigen::VectorXcd amplitudes) {
    if (amplitudes.size() == 0) {
        throw std::invalid_argument("FockVector needs at least one amplitude");
    }
    FockVector v;
    v.truncation_mass = 1.0 - amplitudes.squaredNorm();
    v.amplitudes = std::move(amplitudes);
    return v;
}

double assoc_laguerre(int nu, int k, double x) {
    if (nu < 0 || k < 0) {
        throw std::domain_error("assoc_laguerre: negative degree or order");
    }
    if (!(x >= 0.0)) {
        throw std::domain_error("assoc_laguerre: argument must be >= 0");
    }
    if (nu == 0) return 1.0;
    double prev = 1.0;            // L_0^k
    double curr = 1.0 + k - x;    // L_1^k
    for (int j = 1; j < nu; ++j) {
        const double next = ((2.0 * j + k + 1.0 - x) * curr - (j + k) * prev) / (j + 1.0);
        prev = curr;
        curr = next;
    }
    return curr;
}

Complex displacement_element(int m, int n, Complex alpha) {
    if (m < 0 || n < 0) {
        throw std::out_of_range("displacement_element: negative index");
    }
    const double a2 = std::norm(alpha);
    if (a2 == 0.0) {
        return m == n ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
    }
    const int mu = std::max(m, n);
    const int nu = std::min(m, n);
    const int d = mu - nu;
    // sqrt(nu!/mu!) |alpha|^d in log space; the ratio underflows factorials
    // long before the element itself is negligible.
    const double log_mag = 0.5 * (std::lgamma(nu + 1.0) - std::lgamma(mu + 1.0))
                           + d * std::log(std::abs(alpha)) - 0.5 * a2;
    const double radial = std::exp(log_mag) * assoc_laguerre(nu, d, a2);
    // phase (m-n)[arg(alpha) - pi theta(n-m)]
    const double phase = (m - n) * (n > m ? std::arg(alpha) - M_PI : std::arg(alpha));
    return std::polar(radial, phase);
}

Eigen::MatrixXcd displacement_matrix(int rows, int cols, Complex alpha) {
    Eigen::MatrixXcd D(rows, cols);
    for (int n = 0; n < cols; ++n) {
        for (int m = 0; m < rows; ++m) {
            D(m, n) = displacement_element(m, n, alpha);
        }
    }
    return D;
}

FockVector coherent_amplitudes(Complex gamma, int cutoff) {
    if (cutoff < 0) {
        throw std::invalid_argument("coherent_amplitudes: cutoff must be >= 0");
    }
    Eigen::VectorXcd a(cutoff + 1);
    a(0) = std::exp(-0.5 * std::norm(gamma));
    for (int n = 1; n <= cutoff; ++n) {
        a(n) = a(n - 1) * gamma / std::sqrt(static_cast<double>(n));
    }
    return make_fock_vector(std::move(a));
}

}  // namespace pentomo
