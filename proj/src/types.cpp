#include "sqz/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

std::string describe(const char* what, double value)
{
    std::ostringstream os;
    os.precision(17);
    os << what << " (got " << value << ")";
    return os.str();
}

}  // namespace

OscillatorConfig::OscillatorConfig(double mass, double omega, double hbar)
    : mass_(mass), omega_(omega), hbar_(hbar)
{
    if (!(std::isfinite(mass) && mass > 0.0)) {
        throw InvariantError(describe("oscillator invariant m > 0 violated", mass));
    }
    if (!(std::isfinite(omega) && omega > 0.0)) {
        throw InvariantError(describe("oscillator invariant omega > 0 violated", omega));
    }
    if (!(std::isfinite(hbar) && hbar > 0.0)) {
        throw InvariantError(describe("oscillator invariant hbar > 0 violated", hbar));
    }
    if (!(ground_variance() > 0.0 && std::isfinite(ground_variance()))) {
        throw InvariantError("oscillator invariant sigma_gr^2 > 0 violated");
    }
}

double OscillatorConfig::period() const noexcept
{
    return 2.0 * std::numbers::pi / omega_;
}

SqueezeDynamics::SqueezeDynamics(double A0, double dA, double phi_sq)
    : A0_(A0), dA_(dA), phi_sq_(phi_sq)
{
    if (!std::isfinite(A0) || !std::isfinite(dA) || !std::isfinite(phi_sq)) {
        throw InvariantError("squeeze parameters must be finite");
    }
    if (!(dA >= 0.0)) {
        throw InvariantError(describe("squeeze invariant dA >= 0 violated", dA));
    }
    if (!(A0 > dA)) {
        std::ostringstream os;
        os.precision(17);
        os << "squeeze invariant A0 > dA violated (A0 = " << A0 << ", dA = " << dA << ")";
        throw InvariantError(os.str());
    }
    if (purity_product() < 1.0 - kPurityTolerance) {
        throw InvariantError(
            describe("squeeze invariant P = (A0+dA)(A0-dA) >= 1 violated", purity_product()));
    }
}

CenterTrajectory::CenterTrajectory(double X_amp, double phi_c) : X_amp_(X_amp), phi_c_(phi_c)
{
    if (!std::isfinite(X_amp) || !std::isfinite(phi_c)) {
        throw InvariantError("center parameters must be finite");
    }
    if (!(X_amp >= 0.0)) {
        throw InvariantError(describe("center invariant X_amp >= 0 violated", X_amp));
    }
}

CenterTrajectory CenterTrajectory::through(PhasePoint at_zero, const OscillatorConfig& osc)
{
    // x = X cos(phi_c), p = -m omega X sin(phi_c)
    const double v = at_zero.p / (osc.mass() * osc.omega());
    const double X = std::hypot(at_zero.x, v);
    const double phi = X > 0.0 ? std::atan2(-v, at_zero.x) : 0.0;
    return {X, phi};
}

GaussianStateSpec::GaussianStateSpec(OscillatorConfig osc, SqueezeDynamics squeeze,
                                     CenterTrajectory center, double purity_product)
    : osc_(osc), squeeze_(squeeze), center_(center), P_(purity_product)
{
    const double expected = squeeze_.purity_product();
    if (!(std::abs(P_ - expected) <= kPurityTolerance * std::max(1.0, expected))) {
        std::ostringstream os;
        os.precision(17);
        os << "state invariant P = (A0+dA)(A0-dA) violated (P = " << P_
           << ", (A0+dA)(A0-dA) = " << expected << ")";
        throw InvariantError(os.str());
    }
}

GaussianStateSpec GaussianStateSpec::pure(OscillatorConfig osc, SqueezeDynamics squeeze,
                                          CenterTrajectory center)
{
    if (std::abs(squeeze.purity_product() - 1.0) > kPurityTolerance) {
        throw InvariantError(describe("pure state requires (A0+dA)(A0-dA) = 1",
                                      squeeze.purity_product()));
    }
    return {osc, squeeze, center, 1.0};
}

bool GaussianStateSpec::is_pure() const noexcept
{
    return std::abs(P_ - 1.0) <= kPurityTolerance;
}

double GaussianStateSpec::max_sigma_x() const noexcept
{
    return std::sqrt(osc_.ground_variance() * squeeze_.max_variance());
}

}  // namespace sqz
