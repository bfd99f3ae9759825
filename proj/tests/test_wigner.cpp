#include <doctest.h>

#include <cmath>
#include <random>

#include "pentomo/wigner.hpp"

using namespace pentomo;

namespace {

CyclotronDensityMatrix fock_projector(int level, int cutoff) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
    m(level, level) = 1.0;
    return {m};
}

CyclotronDensityMatrix random_density(std::mt19937& gen, int dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd a(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(normal(gen), normal(gen));
    }
    Eigen::MatrixXcd rho = a * a.adjoint();
    return {rho / rho.trace().real()};
}

}  // namespace

TEST_CASE("vacuum and one-quantum parity at the origin") {
    CHECK(wigner_point(fock_projector(0, 4), 0.0, 0.0).real()
          == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
    CHECK(wigner_point(fock_projector(1, 4), 0.0, 0.0).real()
          == doctest::Approx(-2.0 / M_PI).epsilon(1e-12));

    CHECK(wigner_oracle_point(fock_projector(0, 4), 0.0, 0.0).real()
          == doctest::Approx(2.0 / M_PI).epsilon(1e-10));
    CHECK(wigner_oracle_point(fock_projector(1, 4), 0.0, 0.0).real()
          == doctest::Approx(-2.0 / M_PI).epsilon(1e-10));
}

TEST_CASE("coherent-state Wigner peaks at its center") {
    const FockVector g = coherent_amplitudes(1.0, 24);
    const CyclotronDensityMatrix rho = {g.amplitudes * g.amplitudes.adjoint()};
    CHECK(wigner_point(rho, 1.0, 0.0).real() == doctest::Approx(2.0 / M_PI).epsilon(1e-8));
}

TEST_CASE("fig3 coherent block agrees across both evaluation paths") {
    const FockVector g = coherent_amplitudes(1.5, 16);
    const CyclotronDensityMatrix rho = {g.amplitudes * g.amplitudes.adjoint()};
    const Complex series = wigner_point(rho, 0.0, 0.0);
    const Complex parity = wigner_oracle_point(rho, 0.0, 0.0);
    CHECK(std::abs(series - parity) < 1e-8);
}

TEST_CASE("series evaluation equals the displaced-parity oracle") {
    std::mt19937 gen(2718);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    std::uniform_int_distribution<int> dims(4, 17);
    for (int state = 0; state < 10; ++state) {
        const CyclotronDensityMatrix rho = random_density(gen, dims(gen));
        for (int pt = 0; pt < 25; ++pt) {
            const double x = coord(gen), y = coord(gen);
            CHECK(std::abs(wigner_point(rho, x, y) - wigner_oracle_point(rho, x, y)) < 1e-8);
        }
    }
}

TEST_CASE("trapezoid quadrature of W11 recovers the trace") {
    const FockVector g = coherent_amplitudes(1.2, 14);
    const CyclotronDensityMatrix rho = {g.amplitudes * g.amplitudes.adjoint()};
    WignerGridSpec grid;
    grid.nx = grid.ny = 161;
    const WignerBlock block = wigner_from_density(rho, grid);
    CHECK(block.hermitian_input);
    CHECK(block.values.imag().cwiseAbs().maxCoeff() == 0.0);

    const double dx = (grid.x_max - grid.x_min) / (grid.nx - 1);
    const double dy = (grid.y_max - grid.y_min) / (grid.ny - 1);
    double integral = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            const double wx = (i == 0 || i == grid.nx - 1) ? 0.5 : 1.0;
            const double wy = (j == 0 || j == grid.ny - 1) ? 0.5 : 1.0;
            integral += wx * wy * block.values(i, j).real();
        }
    }
    integral *= dx * dy;
    CHECK(std::abs(integral - rho.entries.trace().real()) < 1e-3 + g.truncation_mass);
}

TEST_CASE("W12 and W21 are pointwise conjugates") {
    const FockVector a = coherent_amplitudes(Complex(1.0, 0.4), 12);
    const FockVector b = coherent_amplitudes(Complex(-0.8, 0.2), 12);
    const CyclotronDensityMatrix rho12 = {a.amplitudes * b.amplitudes.adjoint()};
    const CyclotronDensityMatrix rho21 = {rho12.entries.adjoint()};
    WignerGridSpec grid;
    grid.nx = grid.ny = 21;
    const WignerBlock w12 = wigner_from_density(rho12, grid);
    const WignerBlock w21 = wigner_from_density(rho21, grid);
    CHECK(!w12.hermitian_input);
    CHECK((w12.values - w21.values.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("empty grid specs are rejected") {
    const CyclotronDensityMatrix rho = fock_projector(0, 3);
    WignerGridSpec bad;
    bad.nx = 0;
    CHECK_THROWS_AS(wigner_from_density(rho, bad), std::invalid_argument);
    WignerGridSpec flipped;
    flipped.x_min = 2.0;
    flipped.x_max = -2.0;
    CHECK_THROWS_AS(wigner_from_density(rho, flipped), std::invalid_argument);
}
