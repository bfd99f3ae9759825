#include <doctest.h>

#include <cmath>
#include <random>

#include "pentomo/state.hpp"

using namespace pentomo;

namespace {

EntangledState fig1_state(int cutoff = 12) {
    return build_entangled_state(0.5, std::sqrt(3.0) / 2.0, M_PI, 1.0, M_PI, cutoff);
}

EntangledState fig3_state(int cutoff = 16) {
    return build_entangled_state(std::sqrt(0.5), std::sqrt(0.5), 0.0, 1.5, M_PI, cutoff);
}

// <gamma1|gamma2> = exp(conj(gamma1) gamma2 - |gamma1|^2/2 - |gamma2|^2/2)
Complex coherent_overlap(Complex g1, Complex g2) {
    return std::exp(std::conj(g1) * g2 - 0.5 * std::norm(g1) - 0.5 * std::norm(g2));
}

}  // namespace

TEST_CASE("build_entangled_state validates normalization") {
    CHECK_THROWS_AS(build_entangled_state(0.6, 0.9, 0.0, 1.0, 0.0, 8), std::invalid_argument);
    CHECK_NOTHROW(fig1_state());
    CHECK_NOTHROW(fig3_state());
}

TEST_CASE("spin probabilities of the reference states") {
    const auto [u1, d1] = spin_probabilities(fig1_state());
    CHECK(u1 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(d1 == doctest::Approx(0.75).epsilon(1e-14));

    const auto [u3, d3] = spin_probabilities(fig3_state());
    CHECK(u3 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d3 == doctest::Approx(0.5).epsilon(1e-14));

    const auto st = build_entangled_state(1.0, 0.0, 0.0, 0.0, 0.0, 4);
    const auto [u, d] = spin_probabilities(st);
    CHECK(u == 1.0);
    CHECK(d == 0.0);
}

TEST_CASE("projected_density returns the branch projector") {
    const EntangledState st = fig1_state();
    const CyclotronDensityMatrix rho = projected_density(st, Spin::up);
    const FockVector target = coherent_amplitudes(1.0, 12);
    const Eigen::MatrixXcd expected = target.amplitudes * target.amplitudes.adjoint();
    CHECK((rho.entries - expected).cwiseAbs().maxCoeff() < 1e-14);

    // rank 1, trace within truncation mass, Hermitian
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho.entries);
    CHECK(eig.eigenvalues()(rho.cutoff() - 1) < 1e-10);
    CHECK(std::abs(rho.entries.trace().real() - (1.0 - target.truncation_mass)) < 1e-13);
    CHECK((rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("projected_density of an empty branch is an error") {
    const auto st = build_entangled_state(1.0, 0.0, 0.0, 0.0, 0.0, 4);
    CHECK_THROWS_AS(projected_density(st, Spin::down), std::invalid_argument);
}

TEST_CASE("fig3 down branch is the displaced coherent state") {
    const EntangledState st = fig3_state();
    const CyclotronDensityMatrix rho = projected_density(st, Spin::down);
    const FockVector target = coherent_amplitudes(-1.5, 16);
    CHECK((rho.entries - target.amplitudes * target.amplitudes.adjoint()).cwiseAbs().maxCoeff()
          < 1e-14);
}

TEST_CASE("overlap spot values") {
    const FockVector a = coherent_amplitudes(1.0, 40);
    CHECK(std::abs(overlap(a, a) - Complex(1.0, 0.0)) < 1e-12);

    const FockVector b = coherent_amplitudes(-1.0, 40);
    const Complex ov = overlap(a, b);
    CHECK(std::abs(ov - coherent_overlap(1.0, -1.0)) < 1e-12);
    CHECK(std::abs(ov.real() - std::exp(-2.0)) < 1e-12);
    CHECK(std::abs(std::arg(ov)) < 1e-12);

    const FockVector c = coherent_amplitudes(Complex(0.0, 1.0), 40);
    const Complex ov2 = overlap(a, c);
    CHECK(std::abs(std::abs(ov2) - std::exp(-1.0)) < 1e-12);
    CHECK(std::arg(ov2) == doctest::Approx(1.0).epsilon(1e-12));

    const FockVector short_vec = coherent_amplitudes(1.0, 8);
    CHECK_THROWS_AS(overlap(a, short_vec), std::invalid_argument);
}

TEST_CASE("chi = 0 rotation is the identity") {
    const EntangledState st = fig1_state(40);
    const EntangledState rotated = apply_spin_rotation(st, {0.0, 0.3});
    CHECK((rotated.branch(Spin::up) - st.branch(Spin::up)).norm() < 1e-12);
    CHECK((rotated.branch(Spin::down) - st.branch(Spin::down)).norm() < 1e-12);
}

TEST_CASE("pi/2 pulse on the fig1 state balances the populations") {
    // r = e^{-2}, beta = 0 and sin(theta + beta) = sin(pi) = 0, so the pulse
    // leaves both branches at weight 1/2.
    const EntangledState rotated = apply_spin_rotation(fig1_state(40), {M_PI / 2, 0.0});
    const auto [pu, pd] = spin_probabilities(rotated);
    CHECK(pu == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pd == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("rotation preserves the norm and composes additively") {
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
    std::uniform_real_distribution<double> amp(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double c1 = amp(gen);
        const double c2 = std::sqrt(1.0 - c1 * c1);
        const EntangledState st =
            build_entangled_state(c1, c2, ang(gen), 1.5 * amp(gen), ang(gen), 40);
        const double chi1 = ang(gen), chi2 = ang(gen), phi = ang(gen);

        const EntangledState once = apply_spin_rotation(st, {chi1, phi});
        CHECK(once.c1 * once.c1 + once.c2_mod * once.c2_mod == doctest::Approx(1.0).epsilon(1e-12));

        const EntangledState twice = apply_spin_rotation(once, {chi2, phi});
        const EntangledState direct = apply_spin_rotation(st, {chi1 + chi2, phi});
        CHECK((twice.branch(Spin::up) - direct.branch(Spin::up)).norm() < 1e-12);
        CHECK((twice.branch(Spin::down) - direct.branch(Spin::down)).norm() < 1e-12);
    }
}

TEST_CASE("rotated up-population matches the closed form") {
    std::mt19937 gen(57);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
    std::uniform_real_distribution<double> amp(0.05, 0.95);
    std::uniform_real_distribution<double> gam(0.0, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        const double c1 = amp(gen);
        const double c2 = std::sqrt(1.0 - c1 * c1);
        const double theta = ang(gen);
        const EntangledState st = build_entangled_state(c1, c2, theta, gam(gen), ang(gen), 60);

        const Complex ov = overlap(st.psi1, st.psi2);
        const double r = std::abs(ov);
        const double beta = std::arg(ov);
        const double expected = 0.5 * (1.0 + 2.0 * r * c1 * c2 * std::sin(theta + beta));

        const EntangledState rotated = apply_spin_rotation(st, {M_PI / 2, 0.0});
        CHECK(spin_probabilities(rotated).first == doctest::Approx(expected).epsilon(1e-12));
    }
}
