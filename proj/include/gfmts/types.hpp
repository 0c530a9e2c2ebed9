#ifndef GFMTS_TYPES_HPP
#define GFMTS_TYPES_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace gfmts {

inline constexpr double kPi = 3.14159265358979323846;

/// Raised when an input violates a precondition (non-finite, wrong sign).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a parameter combination makes a formula degenerate
/// (zero reactance, non-positive capacitor denominator, dead grid).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the requested operating point does not exist
/// (post-fault grid cannot carry the reference power).
class NoEquilibriumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an integration step produces a non-finite state.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-unit electrical and control constants of the equivalent GFM device.
struct SystemParams {
    double s_base = 310e6;      // VA, informational only
    double omega_n = 2.0 * kPi * 60.0; // rad/s
    double p0 = 0.871;          // p.u. reference active power
    double q0 = 0.0645;         // p.u. reference reactive power
    double h = 2.0;             // p.u.·s virtual inertia
    double d_p = 0.03;          // p.u. active droop
    double d_q = 0.1;           // p.u. reactive droop
    double v0 = 1.01;           // p.u. RPC set-point voltage
    double i_s_max = 1.2;       // p.u. current limit
    double beta = -kPi / 4.0;   // rad, saturated-current angle
    double c_f = 0.0;           // p.u. filter capacitance (0 = neglected)
    double x_tr = 0.16;         // p.u. transformer reactance

    void validate() const;
};

/// Thevenin grid as seen from the device terminal: |Z| includes the
/// transformer, phi is the impedance angle (pi/2 when lossless).
struct GridCondition {
    double v_g = 1.0;   // p.u.
    double z = 0.46;    // p.u. total |Z_g + Z_t|
    double phi = kPi / 2.0; // rad

    double x() const { return z * std::sin(phi); }
    void validate() const;
};

struct Phasor {
    double re = 0.0;
    double im = 0.0;

    double magnitude() const { return std::hypot(re, im); }
    double angle() const { return std::atan2(im, re); }

    Phasor operator+(const Phasor& o) const { return {re + o.re, im + o.im}; }
    Phasor operator-(const Phasor& o) const { return {re - o.re, im - o.im}; }
};

inline bool finite(double v) { return std::isfinite(v); }

inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string("non-finite value for ") + what);
    }
}

} // namespace gfmts

#endif
