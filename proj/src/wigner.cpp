#include "pentomo/wigner.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pentomo/fock.hpp"

namespace pentomo {

namespace {

void validate(const WignerGridSpec& g) {
    if (g.nx < 1 || g.ny < 1) {
        throw std::invalid_argument("wigner grid: nx, ny must be >= 1");
    }
    if ((g.nx > 1 && !(g.x_max > g.x_min)) || (g.ny > 1 && !(g.y_max > g.y_min))) {
        throw std::invalid_argument("wigner grid: empty extent");
    }
}

bool is_hermitian(const Eigen::MatrixXcd& r) {
    const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
    return (r - r.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

double WignerGridSpec::x(int i) const {
    return nx == 1 ? x_min : x_min + i * (x_max - x_min) / (nx - 1);
}

double WignerGridSpec::y(int j) const {
    return ny == 1 ? y_min : y_min + j * (y_max - y_min) / (ny - 1);
}

Complex wigner_point(const CyclotronDensityMatrix& rho, double x, double y) {
    const auto& r = rho.entries;
    const int dim = static_cast<int>(r.rows());
    const double r2 = x * x + y * y;
    const double z = 4.0 * r2;
    const double envelope = std::exp(-2.0 * r2);

    // Laguerre families L_n^d(z) by the three-term recurrence in n.
    std::vector<std::vector<double>> lag(dim);
    for (int d = 0; d < dim; ++d) {
        const int top = dim - 1 - d;
        lag[d].resize(top + 1);
        for (int n = 0; n <= top; ++n) {
            lag[d][n] = n == 0 ? 1.0
                        : n == 1 ? 1.0 + d - z
                                 : ((2.0 * (n - 1) + d + 1.0 - z) * lag[d][n - 1]
                                    - (n - 1 + d) * lag[d][n - 2]) / n;
        }
    }

    Complex acc(0.0, 0.0);
    double sign = 1.0;
    for (int n = 0; n < dim; ++n) {
        acc += r(n, n) * sign * lag[0][n];
        sign = -sign;
    }
    const Complex step = 2.0 * Complex(x, y);
    Complex power(1.0, 0.0);
    for (int d = 1; d < dim; ++d) {
        power *= step;
        double sgn = 1.0;
        for (int n = 0; n + d < dim; ++n) {
            const double ratio =
                std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + d + 1.0)));
            const Complex f = sgn * ratio * lag[d][n] * power;
            acc += f * r(n, n + d) + std::conj(f) * r(n + d, n);
            sgn = -sgn;
        }
    }
    return (2.0 / M_PI) * envelope * acc;
}

WignerBlock wigner_from_density(const CyclotronDensityMatrix& rho,
                                const WignerGridSpec& grid) {
    validate(grid);
    WignerBlock block;
    block.grid = grid;
    block.hermitian_input = is_hermitian(rho.entries);
    block.values.resize(grid.nx, grid.ny);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            block.values(i, j) = wigner_point(rho, grid.x(i), grid.y(j));
        }
    }
    if (block.hermitian_input) {
        block.max_spurious_imag = block.values.imag().cwiseAbs().maxCoeff();
        block.values = block.values.real().cast<Complex>();
    }
    return block;
}

Complex wigner_oracle_point(const CyclotronDensityMatrix& rho, double x, double y,
                            int oracle_cutoff) {
    const int dim = static_cast<int>(rho.entries.rows());
    const Complex alpha(x, y);
    if (oracle_cutoff < 0) {
        const double reach = std::sqrt(static_cast<double>(dim - 1)) + std::abs(alpha);
        oracle_cutoff = static_cast<int>(std::ceil(reach * reach + 8.0 * reach + 16.0));
    }
    const Eigen::MatrixXcd D = displacement_matrix(dim, oracle_cutoff + 1, alpha);
    Complex acc(0.0, 0.0);
    double sign = 1.0;
    for (int k = 0; k <= oracle_cutoff; ++k) {
        acc += sign * (D.col(k).adjoint() * rho.entries * D.col(k)).value();
        sign = -sign;
    }
    return (2.0 / M_PI) * acc;
}

}  // namespace pentomo
