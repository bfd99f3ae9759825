#ifndef PENTOMO_WIGNER_HPP
#define PENTOMO_WIGNER_HPP

#include <Eigen/Dense>

#include "pentomo/state.hpp"

namespace pentomo {

struct WignerGridSpec {
    double x_min = -4.0;
    double x_max = 4.0;
    double y_min = -4.0;
    double y_max = 4.0;
    int nx = 81;
    int ny = 81;

    double x(int i) const;
    double y(int j) const;
};

/// One Wigner-matrix block sampled on a grid, alpha = x + i y. For Hermitian
/// input the stored values are real and max_spurious_imag records the largest
/// imaginary part discarded.
struct WignerBlock {
    WignerGridSpec grid;
    Eigen::MatrixXcd values;  // (nx, ny), values(i, j) = W(x_i, y_j)
    bool hermitian_input = false;
    double max_spurious_imag = 0.0;
};

/// Laguerre-series evaluation of the Wigner function of a number-basis block.
Complex wigner_point(const CyclotronDensityMatrix& rho, double x, double y);

WignerBlock wigner_from_density(const CyclotronDensityMatrix& rho, const WignerGridSpec& grid);

/// Displaced-parity evaluation (2/pi) sum_n (-1)^n <n|D^dag rho D|n>, built on
/// displacement matrix elements; independent of wigner_point.
Complex wigner_oracle_point(const CyclotronDensityMatrix& rho, double x, double y,
                            int oracle_cutoff = -1);

}  // namespace pentomo

#endif
