#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vsflow {

/// Forward-mode dual number with a single scalar seed. Arithmetic obeys
/// the chain rule; comparisons act on the value, which freezes branch
/// choices (upwinding, saturation switch) at the current state during
/// differentiation.
struct Dual {
    double v = 0.0;
    double d = 0.0;

    Dual() = default;
    Dual(double value) : v(value) {}
    Dual(double value, double deriv) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
inline bool operator<(Dual a, Dual b) { return a.v < b.v; }
inline bool operator>(Dual a, Dual b) { return a.v > b.v; }
inline bool operator<=(Dual a, Dual b) { return a.v <= b.v; }
inline bool operator>=(Dual a, Dual b) { return a.v >= b.v; }
inline bool operator==(Dual a, Dual b) { return a.v == b.v; }

inline Dual pow(Dual a, double e) {
    return {std::pow(a.v, e), e * std::pow(a.v, e - 1.0) * a.d};
}
inline Dual abs(Dual a) { return a.v < 0.0 ? -a : a; }
inline Dual sqrt(Dual a) {
    const double s = std::sqrt(a.v);
    return {s, a.v > 0.0 ? 0.5 / s * a.d : 0.0};
}

// Make the std math functions visible to the templates below, so the same
// unqualified call picks std::pow for double and the overload above for Dual.
using std::abs;
using std::pow;
using std::sqrt;

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.v; }

/// Relative permeability floor. Keeps fully dry cells from producing a
/// singular system at q = 1.
inline constexpr double kKrFloor = 1e-12;

/// Van Genuchten–Mualem material. Conductivity in m/day (isotropic or
/// diagonal tensor), alpha in 1/m, n dimensionless; m = 1 - 1/n is
/// derived and stored.
struct VgmMaterial {
    std::string name;
    std::array<double, 3> K{1.0, 1.0, 1.0};  // diagonal conductivity tensor
    double alpha = 1.0;
    double n = 2.0;
    double m = 0.5;
    double theta_r = 0.0;
    double theta_s = 1.0;

    bool isotropic() const { return K[0] == K[1] && K[1] == K[2]; }
};

VgmMaterial make_vgm(std::string name, double K, double alpha, double n,
                     double theta_r, double theta_s);
VgmMaterial make_vgm_diag(std::string name, std::array<double, 3> K, double alpha,
                          double n, double theta_r, double theta_s);

/// Continuation parametrization of the relative permeability:
/// Power: K(h,q) = Kr(h)^q;  Linear: K(h,q) = 1 + q*(Kr(h) - 1).
/// Both satisfy K(.,0) = 1 and K(.,1) = Kr exactly.
enum class ContinuationKind { Power, Linear };

/// Volumetric water content theta(psi). Saturated branch theta_s for
/// psi >= 0; continuous at psi = 0.
template <class T>
T water_content(const VgmMaterial& mat, T psi) {
    if (psi >= T(0.0)) return T(mat.theta_s);
    T a = abs(T(mat.alpha) * psi);
    return T(mat.theta_r) + (T(mat.theta_s) - T(mat.theta_r)) / pow(T(1.0) + pow(a, mat.n), mat.m);
}

/// Effective saturation Se = (theta - theta_r)/(theta_s - theta_r).
template <class T>
T effective_saturation(const VgmMaterial& mat, T theta) {
    const double tv = value_of(theta);
    if (tv < mat.theta_r - 1e-12 || tv > mat.theta_s + 1e-12)
        throw std::invalid_argument("effective_saturation: theta outside [theta_r, theta_s]");
    return (theta - T(mat.theta_r)) / (T(mat.theta_s) - T(mat.theta_r));
}

/// Mualem relative permeability as a function of water content,
/// clamped below by kKrFloor.
template <class T>
T kr_of_theta(const VgmMaterial& mat, T theta) {
    T se = effective_saturation(mat, theta);
    if (value_of(se) <= 0.0) return T(kKrFloor);
    if (value_of(se) >= 1.0) return T(1.0);
    T inner = T(1.0) - pow(T(1.0) - pow(se, 1.0 / mat.m), mat.m);
    T kr = sqrt(se) * inner * inner;
    if (value_of(kr) < kKrFloor) return T(kKrFloor);
    return kr;
}

/// Kr as a function of hydraulic head: Kr(theta(h - z)). Equals 1 for
/// h - z >= 0.
template <class T>
T kr_of_head(const VgmMaterial& mat, T h, double z) {
    if (value_of(h) - z >= 0.0) return T(1.0);
    return kr_of_theta(mat, water_content(mat, h - T(z)));
}

/// Continuation-parametrized permeability applied to an already
/// evaluated Kr. Endpoints q = 0 and q = 1 are exact by construction.
template <class T>
T continuation_of_kr(T kr, double q, ContinuationKind kind) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("continuation parameter q outside [0,1]");
    if (q == 0.0) return T(1.0);
    if (q == 1.0) return kr;
    if (kind == ContinuationKind::Power) return pow(kr, q);
    return T(1.0) + T(q) * (kr - T(1.0));
}

template <class T>
T continuation_kr(const VgmMaterial& mat, T h, double z, double q, ContinuationKind kind) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("continuation parameter q outside [0,1]");
    if (q == 0.0) return T(1.0);
    return continuation_of_kr(kr_of_head(mat, h, z), q, kind);
}

}  // namespace vsflow
