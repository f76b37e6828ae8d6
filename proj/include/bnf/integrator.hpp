#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "birkhoff.hpp"

namespace bnf {

// flat evaluation of the (j,+) components of a Hamiltonian field
class CompiledField {
public:
    CompiledField() = default;
    explicit CompiledField(const FourierField& X) : box_(X.box) {
        for (int p = 0; p < box_.modes(); ++p) {
            const int out = box_.id({box_.mode_at(p), 1});
            for (const auto& [m, c] : X.comp[out]) {
                Term t{p, c, {}};
                for (const auto& e : m.entries()) {
                    if (e.alpha) t.factors.push_back({box_.id({e.mode, 1}), e.alpha});
                    if (e.beta) t.factors.push_back({box_.id({e.mode, -1}), e.beta});
                }
                terms_.push_back(std::move(t));
            }
        }
    }

    // z ↦ X(z) on the (j,+) slots
    void operator()(const std::vector<Complex>& z, std::vector<Complex>& out) const {
        const int D = box_.size();
        U_.assign(D, Complex{});
        for (int p = 0; p < box_.modes(); ++p) {
            const int j = box_.mode_at(p);
            U_[box_.id({j, 1})] = z[p];
            U_[box_.id({j, -1})] = std::conj(z[p]);
        }
        out.assign(box_.modes(), Complex{});
        for (const auto& t : terms_) {
            Complex v = t.c;
            for (const auto& [id, e] : t.factors) {
                for (int k = 0; k < e; ++k) v *= U_[id];
            }
            out[t.out] += v;
        }
    }

    bool empty() const { return terms_.empty(); }

private:
    struct Term {
        int out;
        Complex c;
        std::vector<std::pair<int, int>> factors;
    };
    Box box_;
    std::vector<Term> terms_;
    mutable std::vector<Complex> U_;
};

struct IntegratorOptions {
    double tol = 1e-12;  // inner fixed-point tolerance, relative to max|z|
    int max_iter = 100;
    int sample_every = 1;
    bool check_step = true;  // dt·max|Ω| ≤ 0.5
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrajectoryLog {
    std::vector<double> t;
    std::vector<std::vector<Complex>> z;
    std::vector<std::vector<double>> J;  // J_n for n = 1..J
    std::vector<double> H;
    std::vector<double> momentum;
    int max_inner = 0;

    size_t size() const { return t.size(); }
};

// implicit midpoint; the diagonal linear part -iΩ_j z_j is solved exactly inside each step
class Midpoint {
public:
    Midpoint(const PolyHamiltonian& H, IntegratorOptions opt = {}) : H_(H), box_(H.box()), opt_(opt) {
        PolyHamiltonian lin(box_), rest = H;
        omega_.assign(box_.modes(), 0.0);
        for (const auto& [m, c] : H.poly().part(2)) {
            const auto& en = m.entries();
            if (en.size() == 1 && en[0].alpha == 1 && en[0].beta == 1 && std::abs(c.imag()) < 1e-14) {
                omega_[box_.mode_pos(en[0].mode)] = c.real();
                lin.poly().add(m, c);
            }
        }
        rest -= lin;
        rest.poly().prune(0.0);
        nonlinear_ = CompiledField(ham_field(rest));
    }

    double max_frequency() const {
        double w = 0;
        for (double o : omega_) w = std::max(w, std::abs(o));
        return w;
    }

    int step(std::vector<Complex>& z, double dt) const {
        const int n = box_.modes();
        std::vector<Complex> zn = z, mid(n), f(n);
        std::vector<Complex> a(n), b(n);
        for (int p = 0; p < n; ++p) {
            const Complex h = Complex(0, -0.5 * dt * omega_[p]);
            a[p] = (1.0 + h) / (1.0 - h);
            b[p] = dt / (1.0 - h);
        }
        double scale = 0;
        for (const auto& v : z) scale = std::max(scale, std::abs(v));
        if (scale == 0) return 0;
        if (nonlinear_.empty()) {
            for (int p = 0; p < n; ++p) z[p] *= a[p];
            return 0;
        }
        for (int it = 1; it <= opt_.max_iter; ++it) {
            for (int p = 0; p < n; ++p) mid[p] = 0.5 * (z[p] + zn[p]);
            nonlinear_(mid, f);
            double diff = 0;
            for (int p = 0; p < n; ++p) {
                const Complex next = a[p] * z[p] + b[p] * f[p];
                diff = std::max(diff, std::abs(next - zn[p]));
                zn[p] = next;
            }
            if (diff <= opt_.tol * scale) {
                z = zn;
                return it;
            }
        }
        throw ConvergenceError("midpoint iteration did not converge");
    }

    TrajectoryLog integrate(const State& Z0, double dt, double T) const {
        if (!(dt > 0) || !(T >= 0)) throw std::invalid_argument("need dt > 0 and T ≥ 0");
        if (opt_.check_step && dt * max_frequency() > 0.5 + 1e-12)
            throw std::invalid_argument("dt does not resolve the fastest frequency");
        TrajectoryLog log;
        std::vector<Complex> z = Z0.z;
        const long steps = std::lround(T / dt);
        record(log, 0.0, z);
        for (long s = 1; s <= steps; ++s) {
            log.max_inner = std::max(log.max_inner, step(z, dt));
            if (s % opt_.sample_every == 0 || s == steps) record(log, s * dt, z);
        }
        return log;
    }

    // integrates with a negative step: the midpoint rule is symmetric
    std::vector<Complex> run(std::vector<Complex> z, double dt, long steps) const {
        for (long s = 0; s < steps; ++s) step(z, dt);
        return z;
    }

private:
    void record(TrajectoryLog& log, double t, const std::vector<Complex>& z) const {
        State S(box_);
        S.z = z;
        log.t.push_back(t);
        log.z.push_back(z);
        std::vector<double> Jn;
        for (int n = 1; n <= box_.J; ++n) Jn.push_back(superaction(S, n));
        log.J.push_back(Jn);
        log.H.push_back(evaluate(H_, S));
        log.momentum.push_back(momentum(S));
    }

    PolyHamiltonian H_;
    Box box_;
    IntegratorOptions opt_;
    std::vector<double> omega_;
    CompiledField nonlinear_;
};

inline TrajectoryLog integrate(const PolyHamiltonian& H, const State& Z0, double dt, double T,
                               IntegratorOptions opt = {}) {
    return Midpoint(H, opt).integrate(Z0, dt, T);
}

// max_{t, n} |J_n(t) - J_n(0)|
inline double superaction_drift(const TrajectoryLog& log) {
    double d = 0;
    for (size_t k = 0; k < log.size(); ++k)
        for (size_t n = 0; n < log.J[k].size(); ++n) d = std::max(d, std::abs(log.J[k][n] - log.J[0][n]));
    return d;
}

inline double energy_drift(const TrajectoryLog& log) {
    double d = 0;
    for (double h : log.H) d = std::max(d, std::abs(h - log.H.front()));
    return d;
}

inline double momentum_drift(const TrajectoryLog& log) {
    double d = 0;
    for (double m : log.momentum) d = std::max(d, std::abs(m - log.momentum.front()));
    return d;
}

// same drift measured in the coordinates z' = D(z)
inline double superaction_drift(const TrajectoryLog& log, const PluriMap<Complex>& D) {
    const Box& b = D.box;
    std::vector<double> J0;
    double d = 0;
    for (size_t k = 0; k < log.size(); ++k) {
        State S(b);
        S.z = log.z[k];
        const State T = State::from_slots(b, apply_map(D, S.slots()));
        for (int n = 1; n <= b.J; ++n) {
            const double Jn = superaction(T, n);
            if (k == 0) J0.push_back(Jn);
            else d = std::max(d, std::abs(Jn - J0[n - 1]));
        }
    }
    return d;
}

}  // namespace bnf
