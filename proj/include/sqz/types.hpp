#ifndef SQZ_TYPES_HPP
#define SQZ_TYPES_HPP

namespace sqz {

/// Mass, frequency and Planck constant of a 1-D harmonic oscillator.
/// All three are strictly positive; construction throws InvariantError otherwise.
class OscillatorConfig {
public:
    OscillatorConfig(double mass, double omega, double hbar);

    /// hbar = m = omega = 1
    static OscillatorConfig natural() { return {1.0, 1.0, 1.0}; }

    double mass() const noexcept { return mass_; }
    double omega() const noexcept { return omega_; }
    double hbar() const noexcept { return hbar_; }

    /// Position variance of the ground state, hbar / (2 m omega).
    double ground_variance() const noexcept { return hbar_ / (2.0 * mass_ * omega_); }
    double period() const noexcept;

private:
    double mass_;
    double omega_;
    double hbar_;
};

/// Parameters of the 2*omega oscillation of the dimensionless variance
///   A(t) = A0 + dA cos(2 omega t + phi_sq),   B(t) = dA sin(2 omega t + phi_sq).
/// Requires A0 > dA >= 0 and (A0 + dA)(A0 - dA) >= 1.
class SqueezeDynamics {
public:
    SqueezeDynamics(double A0, double dA, double phi_sq);

    static SqueezeDynamics ground() { return {1.0, 0.0, 0.0}; }

    double A0() const noexcept { return A0_; }
    double dA() const noexcept { return dA_; }
    double phi_sq() const noexcept { return phi_sq_; }

    /// Product of the extreme dimensionless variances, A_max * A_min.
    double purity_product() const noexcept { return (A0_ + dA_) * (A0_ - dA_); }
    double max_variance() const noexcept { return A0_ + dA_; }

private:
    double A0_;
    double dA_;
    double phi_sq_;
};

struct PhasePoint {
    double x;
    double p;
};

/// Classical center motion x_c = X_amp cos(omega t + phi_c).
class CenterTrajectory {
public:
    CenterTrajectory(double X_amp, double phi_c);

    static CenterTrajectory at_rest() { return {0.0, 0.0}; }
    /// Trajectory passing through (x0, p0) at t = 0.
    static CenterTrajectory through(PhasePoint at_zero, const OscillatorConfig& osc);

    double X_amp() const noexcept { return X_amp_; }
    double phi_c() const noexcept { return phi_c_; }

private:
    double X_amp_;
    double phi_c_;
};

/// Tolerance on |P - (A0 + dA)(A0 - dA)| and on the P = 1 purity test.
inline constexpr double kPurityTolerance = 1e-12;

/// Complete description of a Gaussian state. P is stored alongside the squeeze
/// parameters and must agree with them; P == 1 marks a pure state.
class GaussianStateSpec {
public:
    GaussianStateSpec(OscillatorConfig osc, SqueezeDynamics squeeze, CenterTrajectory center,
                      double purity_product);

    /// Pure-state spec; throws InvariantError unless the squeeze satisfies P = 1.
    static GaussianStateSpec pure(OscillatorConfig osc, SqueezeDynamics squeeze,
                                  CenterTrajectory center);

    const OscillatorConfig& osc() const noexcept { return osc_; }
    const SqueezeDynamics& squeeze() const noexcept { return squeeze_; }
    const CenterTrajectory& center() const noexcept { return center_; }
    double purity_product() const noexcept { return P_; }
    bool is_pure() const noexcept;

    /// Largest position standard deviation over a period, sigma_gr sqrt(A0 + dA).
    double max_sigma_x() const noexcept;

private:
    OscillatorConfig osc_;
    SqueezeDynamics squeeze_;
    CenterTrajectory center_;
    double P_;
};

}  // namespace sqz

#endif
