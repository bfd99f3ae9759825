#include "pentomo/state.hpp"

#include <cmath>
#include <stdexcept>

namespace pentomo {

namespace {

constexpr double kWeightFloor = 1e-12;

FockVector unit_vector(int cutoff) {
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(cutoff + 1);
    e0(0) = 1.0;
    return make_fock_vector(std::move(e0));
}

}  // namespace

Eigen::VectorXcd EntangledState::branch(Spin s) const {
    if (s == Spin::up) return c1 * psi1.amplitudes;
    return c2_mod * std::polar(1.0, theta) * psi2.amplitudes;
}

EntangledState build_entangled_state(double c1, double c2_mod, double theta,
                                     double gamma, double xi, int cutoff) {
    if (c1 < 0.0 || c2_mod < 0.0) {
        throw std::invalid_argument("build_entangled_state: c1, c2 must be >= 0");
    }
    if (std::abs(c1 * c1 + c2_mod * c2_mod - 1.0) > 1e-9) {
        throw std::invalid_argument("build_entangled_state: c1^2 + c2^2 must be 1");
    }
    EntangledState st;
    st.c1 = c1;
    st.c2_mod = c2_mod;
    st.theta = theta;
    st.psi1 = coherent_amplitudes(gamma, cutoff);
    st.psi2 = coherent_amplitudes(gamma * std::polar(1.0, xi), cutoff);
    return st;
}

CyclotronDensityMatrix projected_density(const EntangledState& state, Spin spin) {
    const double weight = spin == Spin::up ? state.c1 : state.c2_mod;
    if (weight < kWeightFloor) {
        throw std::invalid_argument("projected_density: spin branch carries no weight");
    }
    const FockVector& psi = spin == Spin::up ? state.psi1 : state.psi2;
    return {psi.amplitudes * psi.amplitudes.adjoint()};
}

std::pair<double, double> spin_probabilities(const EntangledState& state) {
    return {state.c1 * state.c1, state.c2_mod * state.c2_mod};
}

EntangledState apply_spin_rotation(const EntangledState& state, const SpinRotation& rot) {
    const double c = std::cos(0.5 * rot.chi);
    const double s = std::sin(0.5 * rot.chi);
    const Complex axis = std::polar(1.0, rot.phi_d);
    const Complex u01 = Complex(0, -s) * std::conj(axis);
    const Complex u10 = Complex(0, -s) * axis;

    const Eigen::VectorXcd up = state.branch(Spin::up);
    const Eigen::VectorXcd down = state.branch(Spin::down);
    Eigen::VectorXcd new_up = c * up + u01 * down;
    Eigen::VectorXcd new_down = u10 * up + c * down;

    const double nu = new_up.norm();
    const double nd = new_down.norm();
    const double total = std::hypot(nu, nd);
    if (total == 0.0) {
        throw std::invalid_argument("apply_spin_rotation: zero-norm state");
    }

    EntangledState out;
    out.c1 = nu / total;
    out.c2_mod = nd / total;
    out.theta = 0.0;
    out.psi1 = out.c1 < kWeightFloor ? unit_vector(state.cutoff())
                                     : make_fock_vector(new_up / nu);
    out.psi2 = out.c2_mod < kWeightFloor ? unit_vector(state.cutoff())
                                         : make_fock_vector(new_down / nd);
    return out;
}

Complex overlap(const FockVector& psi1, const FockVector& psi2) {
    if (psi1.cutoff() != psi2.cutoff()) {
        throw std::invalid_argument("overlap: cutoff mismatch");
    }
    return psi1.amplitudes.dot(psi2.amplitudes);
}

CyclotronDensityMatrix outer_product(const FockVector& ket, const FockVector& bra) {
    return {ket.amplitudes * bra.amplitudes.adjoint()};
}

}  // namespace pentomo
