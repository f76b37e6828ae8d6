#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "integrator.hpp"
#include "random.hpp"
#include "resonance.hpp"
#include "wwmodel.hpp"

namespace bnf {

// the certificate found an exact resonance (or a divisor below threshold) among the non-SAP indices
class CertificateFailure : public std::runtime_error {
public:
    CertificateFailure(const DivisorRecord& r, const std::string& what)
        : std::runtime_error(what), record(r) {}
    DivisorRecord record;
};

inline std::string describe(const MultiIndex& m) {
    std::string s = "{";
    for (const auto& e : m.entries()) {
        if (s.size() > 1) s += ", ";
        s += std::to_string(e.mode) + ":(" + std::to_string(e.alpha) + "," + std::to_string(e.beta) + ")";
    }
    return s + "}";
}

inline Certificate require_certificate(const MediumParams& p, int M, int J, double tau, double threshold) {
    const Certificate c = certify(p, M, J, tau);
    if (!(c.nu > 0) || std::abs(c.worst.divisor) <= threshold) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "resonant index " << describe(c.worst.index) << " with divisor " << c.worst.divisor;
        throw CertificateFailure(c.worst, msg.str());
    }
    return c;
}

struct DriftOptions {
    double dt = 0;       // 0 → 0.25 / max|Ω|
    double horizon = 0;  // 0 → 50 / |ω_1|
    std::uint64_t seed = 1;
    double tau = 6.0;
    double threshold = -1;  // < 0 → default small-divisor threshold
    IntegratorOptions integrator{};
};

struct DriftRun {
    double eps = 0;
    double pre = 0;   // D(ε) in the original coordinates
    double post = 0;  // D(ε) measured on D(z(t))
    TrajectoryLog log;
};

struct DriftReport {
    int N = 0;
    double dt = 0, horizon = 0;
    Certificate certificate;
    NormalFormResult normal_form;
    DriftRun full, half;

    double ratio_pre() const { return full.pre / half.pre; }
    double ratio_post() const { return full.post / half.post; }
    // 2³ from the cubic terms, 2^{N+3} once they are removed up to order N
    double expected_pre() const { return 8.0; }
    double expected_post() const { return std::pow(2.0, N + 3); }
};

// Z0 with max|z_j| = ε, direction fixed by the seed
inline State drift_initial_state(Box b, std::uint64_t seed, double eps) {
    Rng rng(seed);
    State Z = random_state(b, rng, 1.0);
    double mx = 0;
    for (const auto& v : Z.z) mx = std::max(mx, std::abs(v));
    for (auto& v : Z.z) v *= eps / mx;
    return Z;
}

inline DriftReport drift_experiment(const TruncatedModel& m, int N, double eps, DriftOptions opt = {}) {
    if (!(eps > 0)) throw std::invalid_argument("ε must be positive");
    const PolyHamiltonian& H = m.hamiltonian;
    const Frequencies W(H);
    const double threshold = opt.threshold < 0 ? default_threshold(W) : opt.threshold;
    DriftReport r;
    r.N = N;
    r.certificate = require_certificate(m.params, N + 2, m.box.J, opt.tau, threshold);
    r.normal_form = normal_form(H, N, threshold);
    Midpoint mp(H, opt.integrator);
    r.dt = opt.dt > 0 ? opt.dt : 0.25 / mp.max_frequency();
    r.horizon = opt.horizon > 0 ? opt.horizon : 50.0 / std::abs(omega(m.params, 1));
    for (auto* run : {&r.full, &r.half}) {
        run->eps = run == &r.full ? eps : 0.5 * eps;
        run->log = mp.integrate(drift_initial_state(m.box, opt.seed, run->eps), r.dt, r.horizon);
        run->pre = superaction_drift(run->log);
        run->post = superaction_drift(run->log, r.normal_form.map);
    }
    return r;
}

}  // namespace bnf
