#ifndef PENTOMO_STATE_HPP
#define PENTOMO_STATE_HPP

#include <Eigen/Dense>

#include "pentomo/fock.hpp"

namespace pentomo {

enum class Spin { up, down };

/// Pure cyclotron(x)spin state  c1 |psi1>|up| + c2 e^{i theta} |psi2>|down>,
/// with c1, c2 real >= 0 and the relative phase carried by theta.
struct EntangledState {
    double c1 = 1.0;
    double c2_mod = 0.0;
    double theta = 0.0;
    FockVector psi1;
    FockVector psi2;

    int cutoff() const { return psi1.cutoff(); }
    /// Unnormalized cyclotron vector of one spin branch, coefficient included.
    Eigen::VectorXcd branch(Spin s) const;
};

/// One block of the cyclotron density matrix in the number basis.
struct CyclotronDensityMatrix {
    Eigen::MatrixXcd entries;

    int cutoff() const { return static_cast<int>(entries.rows()) - 1; }
};

/// Net effect of a resonant Rabi pulse: rotation angle chi = omega_R * tbar
/// about the equatorial axis selected by the drive phase.
struct SpinRotation {
    double chi = 0.0;
    double phi_d = 0.0;
};

/// State with psi1 = |gamma>, psi2 = |gamma e^{i xi}> truncated at `cutoff`.
EntangledState build_entangled_state(double c1, double c2_mod, double theta,
                                     double gamma, double xi, int cutoff);

/// |psi_i><psi_i| for the requested spin branch; the |c_i|^2 weight is not
/// folded in. Throws if the branch carries no weight.
CyclotronDensityMatrix projected_density(const EntangledState& state, Spin spin);

std::pair<double, double> spin_probabilities(const EntangledState& state);

/// Applies cos(chi/2) I - i sin(chi/2)(cos phi_d sx + sin phi_d sy) to the
/// spinor of cyclotron vectors and renormalizes. Branch phases are folded
/// into the new psi vectors, so the returned theta is 0.
EntangledState apply_spin_rotation(const EntangledState& state, const SpinRotation& rot);

/// <psi1|psi2> = sum_n conj(a_n) b_n.
Complex overlap(const FockVector& psi1, const FockVector& psi2);

CyclotronDensityMatrix outer_product(const FockVector& ket, const FockVector& bra);

}  // namespace pentomo

#endif
