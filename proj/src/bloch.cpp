#include "qthermo/bloch.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace qthermo {

namespace {

constexpr double kNormClampTol = 1e-12;

// x log x with the limit value 0 at x = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void require_physical(const QubitState& s, const char* who) {
    if (!s.physical(1e-9)) {
        std::ostringstream msg;
        msg << who << ": state is not a physical qubit state (p0=" << s.p0
            << ", |p|=" << s.p.norm() << ")";
        throw std::domain_error(msg.str());
    }
}

}  // namespace

BlochVector BlochVector::normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::domain_error("BlochVector::normalized: zero vector");
    return {x / n, y / n, z / n};
}

QubitState decompose(const Matrix2c& m, double tol) {
    const Matrix2c anti = m - m.adjoint();
    const double anti_norm = 0.5 * anti.norm();
    const double scale = std::max(1.0, m.norm());
    if (anti_norm > tol * scale) {
        std::ostringstream msg;
        msg << "decompose: input is not Hermitian; |anti-Hermitian part| = " << anti_norm;
        throw std::invalid_argument(msg.str());
    }
    QubitState s;
    s.p0 = (m(0, 0) + m(1, 1)).real();
    s.p.x = (m(0, 1) + m(1, 0)).real();
    s.p.y = (m(1, 0) - m(0, 1)).imag();
    s.p.z = (m(0, 0) - m(1, 1)).real();
    return s;
}

Matrix2c recompose(const QubitState& s) {
    using cd = std::complex<double>;
    Matrix2c m;
    m(0, 0) = cd(0.5 * (s.p0 + s.p.z), 0.0);
    m(1, 1) = cd(0.5 * (s.p0 - s.p.z), 0.0);
    m(0, 1) = cd(0.5 * s.p.x, -0.5 * s.p.y);
    m(1, 0) = cd(0.5 * s.p.x, 0.5 * s.p.y);
    return m;
}

double entropy(double p_norm) {
    if (!std::isfinite(p_norm) || p_norm < 0.0 || p_norm > 1.0 + kNormClampTol) {
        std::ostringstream msg;
        msg << "entropy: |P| = " << p_norm << " outside [0, 1]";
        throw std::domain_error(msg.str());
    }
    const double p = std::clamp(p_norm, 0.0, 1.0);
    return -xlogx(0.5 * (1.0 + p)) - xlogx(0.5 * (1.0 - p));
}

double entropy(const BlochVector& p) { return entropy(p.norm()); }

BlochVector thermal_equilibrium(const BlochVector& h, const ThermalParams& params,
                                bool* degenerate) {
    if (!std::isfinite(params.beta)) throw std::domain_error("thermal_equilibrium: beta not finite");
    if (degenerate) *degenerate = false;
    const double hn = h.norm();
    if (hn == 0.0) {
        if (params.beta != 0.0 && degenerate) *degenerate = true;
        return {};
    }
    const double mag = std::tanh(0.5 * params.beta * hn);
    return h * (-mag / hn);
}

BlochVector equilibrium_projection(const BlochVector& p, const BlochVector& h) {
    const double hn = h.norm();
    if (hn == 0.0) throw std::domain_error("equilibrium_projection: zero field, equilibrium undefined");
    const double proj = p.dot(h) / hn;  // signed scalar projection; s|h_hat.p| == h_hat.p
    return h * (proj / hn);
}

double purity(const QubitState& s) {
    const double pn = s.p.norm();
    return 0.5 * (s.p0 * s.p0 + pn * pn);
}

double fidelity(const QubitState& a, const QubitState& b) {
    require_physical(a, "fidelity");
    require_physical(b, "fidelity");
    const double pa = std::min(a.p.norm(), 1.0);
    const double pb = std::min(b.p.norm(), 1.0);
    // F = (Tr(rho rho') + 2 sqrt(det rho det rho'))   for qubits:
    //   Tr(rho rho') = (1 + Pa.Pb)/2,  det rho = (1 - |P|^2)/4
    const double cross = 0.5 * (1.0 + a.p.dot(b.p));
    const double dets = 0.25 * std::max(0.0, (1.0 - pa * pa)) * std::max(0.0, (1.0 - pb * pb));
    const double f = cross + 2.0 * std::sqrt(dets);
    return std::clamp(f, 0.0, 1.0);
}

RelativeEntropyResult relative_entropy(const QubitState& a, const QubitState& b) {
    require_physical(a, "relative_entropy");
    require_physical(b, "relative_entropy");
    const double pa = std::min(a.p.norm(), 1.0);
    const double pb = std::min(b.p.norm(), 1.0);

    // Support check: b pure means supp(b) is one-dimensional; a must equal b.
    constexpr double kPureTol = 1e-14;
    if (pb >= 1.0 - kPureTol) {
        const bool a_equals_b = pa >= 1.0 - kPureTol && a.p.dot(b.p) >= pa * pb * (1.0 - 1e-12);
        if (!a_equals_b) {
            return {std::numeric_limits<double>::infinity(), true};
        }
        return {0.0, false};
    }

    // Tr(a log a) = -S(|Pa|); Tr(a log b) from log b = c0 I + c1 bhat.sigma
    // with eigenvalues (1 +- |Pb|)/2.
    const double lp = std::log(0.5 * (1.0 + pb));
    const double lm = std::log(0.5 * (1.0 - pb));
    const double c0 = 0.5 * (lp + lm);
    const double c1 = 0.5 * (lp - lm);
    const double along = pb > 0.0 ? a.p.dot(b.p) / pb : 0.0;
    const double tr_a_log_b = c0 + c1 * along;
    const double val = -entropy(pa) - tr_a_log_b;
    return {std::max(0.0, val), false};
}

namespace {

// Linear interpolation of the state series at time t; i is a hint index with
// times[i] <= t <= times[i+1].
BlochVector lerp_state(std::span<const double> t, std::span<const BlochVector> s,
                       std::size_t i, double at) {
    const double w = (at - t[i]) / (t[i + 1] - t[i]);
    return s[i] * (1.0 - w) + s[i + 1] * w;
}

}  // namespace

BlochVector time_average(std::span<const double> times, std::span<const BlochVector> states,
                         double t_a, double t_b) {
    if (times.size() != states.size() || times.size() < 2)
        throw std::invalid_argument("time_average: need at least two samples");
    if (!(t_a < t_b))
        throw std::invalid_argument("time_average: empty window");
    if (t_a < times.front() - 1e-12 || t_b > times.back() + 1e-12)
        throw std::invalid_argument("time_average: window outside trajectory span");
    t_a = std::max(t_a, times.front());
    t_b = std::min(t_b, times.back());

    const auto lo = std::upper_bound(times.begin(), times.end(), t_a) - times.begin();
    const auto hi = std::lower_bound(times.begin(), times.end(), t_b) - times.begin();
    // samples with index in [lo, hi) lie strictly inside (t_a, t_b)
    BlochVector acc;
    double prev_t = t_a;
    BlochVector prev_v = lerp_state(times, states, static_cast<std::size_t>(lo - 1), t_a);
    for (auto k = lo; k < hi; ++k) {
        const double dt = times[k] - prev_t;
        acc += (prev_v + states[k]) * (0.5 * dt);
        prev_t = times[k];
        prev_v = states[k];
    }
    const BlochVector end_v =
        lerp_state(times, states, static_cast<std::size_t>(hi == 0 ? 0 : hi - 1), t_b);
    acc += (prev_v + end_v) * (0.5 * (t_b - prev_t));
    return acc * (1.0 / (t_b - t_a));
}

double entropy_time_average(std::span<const double> times, std::span<const BlochVector> states,
                            double t_a, double t_b) {
    if (times.size() != states.size() || times.size() < 2)
        throw std::invalid_argument("entropy_time_average: need at least two samples");
    if (!(t_a < t_b))
        throw std::invalid_argument("entropy_time_average: empty window");
    if (t_a < times.front() - 1e-12 || t_b > times.back() + 1e-12)
        throw std::invalid_argument("entropy_time_average: window outside trajectory span");
    t_a = std::max(t_a, times.front());
    t_b = std::min(t_b, times.back());

    const auto lo = std::upper_bound(times.begin(), times.end(), t_a) - times.begin();
    const auto hi = std::lower_bound(times.begin(), times.end(), t_b) - times.begin();
    double acc = 0.0;
    double prev_t = t_a;
    double prev_s = entropy(lerp_state(times, states, static_cast<std::size_t>(lo - 1), t_a));
    for (auto k = lo; k < hi; ++k) {
        const double dt = times[k] - prev_t;
        const double sk = entropy(states[k]);
        acc += 0.5 * dt * (prev_s + sk);
        prev_t = times[k];
        prev_s = sk;
    }
    const double end_s =
        entropy(lerp_state(times, states, static_cast<std::size_t>(hi == 0 ? 0 : hi - 1), t_b));
    acc += 0.5 * (t_b - prev_t) * (prev_s + end_s);
    return acc / (t_b - t_a);
}

}  // namespace qthermo
