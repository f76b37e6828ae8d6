#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bnf {

enum class Depth { finite, infinite };

struct MediumParams {
    double g = 1.0;
    double kappa = 1.0;
    double gamma = 0.0;
    Depth depth = Depth::infinite;
    double h = std::numeric_limits<double>::infinity();

    static MediumParams deep(double g, double kappa, double gamma) {
        return {g, kappa, gamma, Depth::infinite, std::numeric_limits<double>::infinity()};
    }
    static MediumParams finite(double g, double kappa, double gamma, double h) {
        return {g, kappa, gamma, Depth::finite, h};
    }

    void validate() const {
        if (!(g > 0)) throw std::invalid_argument("gravity must be positive");
        if (!(kappa > 0)) throw std::invalid_argument("surface tension must be positive");
        if (depth == Depth::finite && !(h > 0)) throw std::invalid_argument("depth must be positive");
        if (!std::isfinite(gamma)) throw std::invalid_argument("vorticity must be finite");
    }
};

struct DispersionSample {
    int mode;
    double omega;
    double Omega;
    double gsym;
    double msym;
};

namespace detail {

// tanh(x) saturated once 1 - |tanh| is below double resolution
inline double stable_tanh(double x) {
    if (x > 20.0) return 1.0;
    if (x < -20.0) return -1.0;
    return std::tanh(x);
}

inline void require_nonzero(double xi) {
    if (xi == 0.0) throw std::invalid_argument("mode 0 is excluded from the phase space");
}

}  // namespace detail

inline double gsym(const MediumParams& p, double xi) {
    detail::require_nonzero(xi);
    if (p.depth == Depth::infinite) return std::abs(xi);
    return std::abs(xi) * detail::stable_tanh(p.h * std::abs(xi));
}

// g + κξ² + (γ²/4)𝙶(ξ)/ξ²
inline double restoring(const MediumParams& p, double xi) {
    return p.g + p.kappa * xi * xi + 0.25 * p.gamma * p.gamma * gsym(p, xi) / (xi * xi);
}

inline double omega(const MediumParams& p, int j) {
    const double xi = j;
    return std::sqrt(gsym(p, xi) * restoring(p, xi));
}

inline double Omega(const MediumParams& p, int j) {
    const double xi = j;
    return omega(p, j) + 0.5 * p.gamma * gsym(p, xi) / xi;
}

inline double msym(const MediumParams& p, double xi) {
    return std::pow(gsym(p, xi) / restoring(p, xi), 0.25);
}

inline DispersionSample sample(const MediumParams& p, int j) {
    return {j, omega(p, j), Omega(p, j), gsym(p, j), msym(p, j)};
}

}  // namespace bnf
