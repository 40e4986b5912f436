#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace qthermo {

inline constexpr double kLn2 = 0.6931471805599453;

/// Real 3-vector carrying either a qubit polarization P or a Hamiltonian
/// field H in the decomposition M = (M0 + M.sigma)/2.
struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr BlochVector() = default;
    constexpr BlochVector(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr BlochVector operator+(const BlochVector& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr BlochVector operator-(const BlochVector& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr BlochVector operator-() const { return {-x, -y, -z}; }
    constexpr BlochVector operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr BlochVector& operator+=(const BlochVector& o) {
        x += o.x; y += o.y; z += o.z;
        return *this;
    }

    constexpr double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr BlochVector cross(const BlochVector& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    BlochVector normalized() const;
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline constexpr BlochVector operator*(double s, const BlochVector& v) { return v * s; }

/// Trace component plus polarization vector; represents a 2x2 density matrix
/// rho = (p0 + p.sigma)/2. Physical states have p0 = 1 and |p| <= 1.
struct QubitState {
    double p0 = 1.0;
    BlochVector p;

    bool physical(double tol = 1e-9) const {
        return std::abs(p0 - 1.0) <= tol && p.finite() && p.norm() <= 1.0 + tol;
    }
};

/// Inverse temperature for the Gibbs state; beta may be zero or negative
/// (population inversion). The partition function is folded into the closed
/// form of the equilibrium vector and never stored.
struct ThermalParams {
    double beta = 1.0;
};

using Matrix2c = Eigen::Matrix<std::complex<double>, 2, 2>;

/// Pauli decomposition of a Hermitian 2x2 matrix. Throws std::invalid_argument
/// (with the norm of the anti-Hermitian part in the message) if the input is
/// not Hermitian to within `tol` relative to its scale.
QubitState decompose(const Matrix2c& density, double tol = 1e-12);

/// Inverse of decompose: (p0 + p.sigma)/2.
Matrix2c recompose(const QubitState& state);

/// Von Neumann entropy in nats as a function of |P|; [0, ln 2], strictly
/// decreasing in |P|. Inputs within 1e-12 of |P| = 1 are clamped so that
/// integrator round-off cannot push the log out of domain.
double entropy(double p_norm);
double entropy(const BlochVector& p);

/// Gibbs equilibrium Bloch vector -tanh(beta |h| / 2) h_hat. For h = 0 the
/// Hamiltonian is degenerate: returns the zero vector and sets *degenerate.
BlochVector thermal_equilibrium(const BlochVector& h, const ThermalParams& params,
                                bool* degenerate = nullptr);

/// Coarse-grained equilibrium under coherent evolution: the projection of p
/// onto the field direction, (h_hat . p) h_hat. Throws std::domain_error if
/// h = 0 (equilibrium undefined).
BlochVector equilibrium_projection(const BlochVector& p, const BlochVector& h);

/// Tr(rho^2) = (p0^2 + |p|^2)/2; in [1/2, 1] for physical states.
double purity(const QubitState& state);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) rho' sqrt(rho)))^2 via the qubit
/// closed form. Throws std::domain_error on non-physical input.
double fidelity(const QubitState& a, const QubitState& b);

struct RelativeEntropyResult {
    double nats = 0.0;
    bool support_violation = false;  // true -> nats is +infinity
};

/// Quantum relative entropy S(a||b) = Tr(a log a) - Tr(a log b), in nats.
/// If supp(a) is not contained in supp(b) the result is +infinity with the
/// violation flag set.
RelativeEntropyResult relative_entropy(const QubitState& a, const QubitState& b);

/// Trapezoidal time average of a sampled Bloch-vector series over
/// [t_a, t_b]. Window endpoints may fall between samples (the integrand is
/// interpolated linearly there). Throws std::invalid_argument for an empty
/// or out-of-span window.
BlochVector time_average(std::span<const double> times, std::span<const BlochVector> states,
                         double t_a, double t_b);

/// Trapezoidal time average of scalar entropy S(P(t)) over the same window;
/// companion to time_average for testing S(<P>) >= <S(P)>.
double entropy_time_average(std::span<const double> times, std::span<const BlochVector> states,
                            double t_a, double t_b);

}  // namespace qthermo
