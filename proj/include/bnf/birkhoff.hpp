#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "plurimap.hpp"
#include "resonance.hpp"

namespace bnf {

class SmallDivisor : public std::runtime_error {
public:
    SmallDivisor(MultiIndex idx, double value, int step = 0)
        : std::runtime_error("small divisor " + std::to_string(value) + " at " + idx.encode() +
                             (step ? " (step " + std::to_string(step) + ")" : "")),
          index(std::move(idx)), value(value), step(step) {}
    MultiIndex index;
    double value;
    int step;
};

// Ω_j read off a diagonal quadratic part Σ Ω_j z_j z̄_j
class Frequencies {
public:
    Frequencies() = default;
    explicit Frequencies(const PolyHamiltonian& H) : box_(H.box()) {
        for (const auto& [m, c] : H.poly().part(2)) {
            const auto& en = m.entries();
            if (en.size() != 1 || en[0].alpha != 1 || en[0].beta != 1)
                throw std::invalid_argument("quadratic part is not diagonal: " + m.encode());
            if (std::abs(c.imag()) > 1e-12 * (1 + std::abs(c))) throw std::invalid_argument("complex frequency");
            w_[en[0].mode] = c.real();
        }
    }
    Frequencies(const MediumParams& p, Box b) : box_(b) {
        for (int j : b.mode_list()) w_[j] = Omega(p, j);
    }

    double operator()(int j) const {
        auto it = w_.find(j);
        return it == w_.end() ? 0.0 : it->second;
    }
    // (α - β)·Ω
    double divisor(const MultiIndex& m) const {
        double d = 0;
        for (const auto& e : m.entries()) d += (e.alpha - e.beta) * (*this)(e.mode);
        return d;
    }
    double max_abs() const {
        double r = 0;
        for (const auto& [j, w] : w_) r = std::max(r, std::abs(w));
        return r;
    }
    PolyHamiltonian quadratic() const {
        PolyHamiltonian H(box_);
        for (const auto& [j, w] : w_) H.add(MultiIndex::from_monomial({{j, 1}, {j, -1}}), w);
        return H;
    }

private:
    Box box_;
    std::map<int, double> w_;
};

struct HomologicalStats {
    double min_divisor = std::numeric_limits<double>::infinity();
};

// χ with {χ, H₂} = -(non-SAP part of term); SAP monomials give zero
inline PolyHamiltonian homological_solve(const PolyHamiltonian& term, const Frequencies& W, double threshold,
                                         HomologicalStats* stats = nullptr, int step = 0) {
    PolyHamiltonian chi(term.box());
    for (const auto& [m, c] : term.poly()) {
        if (m.is_sap()) continue;
        const double d = W.divisor(m);
        if (!(std::abs(d) > threshold)) throw SmallDivisor(m, d, step);
        if (stats) stats->min_divisor = std::min(stats->min_divisor, std::abs(d));
        chi.poly().add(m, c / Complex(0.0, d));
    }
    return chi;
}

// e^{ad_χ} H = Σ_k ad_χ^k H / k!, ad_χ H = {χ, H}, truncated at degree N + 2
inline PolyHamiltonian lie_transform(const PolyHamiltonian& H, const PolyHamiltonian& chi, int N,
                                     double* dropped = nullptr) {
    if (!chi.empty() && chi.min_degree() < 3) throw std::invalid_argument("generator must have degree ≥ 3");
    Truncation tr{N + 2};
    PolyHamiltonian out = truncate(H, N + 2, &tr.dropped);
    PolyHamiltonian term = out;
    for (int k = 1; !term.empty() && !chi.empty(); ++k) {
        term = poisson(chi, term, &tr);
        term *= Complex(1.0 / k);
        out += term;
    }
    if (dropped) *dropped += tr.dropped;
    return out;
}

// U ↦ φ^1_χ(U) as a pluri-map up to operator degree N
inline PluriMap<Complex> lie_map(const PolyHamiltonian& chi, int N) {
    if (chi.empty()) return PluriMap<Complex>::identity(chi.box());
    return approx_flow(PluriMap<Complex>::sigma_only(operator_form(ham_field(chi)).truncated(N)), N);
}

struct NormalFormResult {
    int N = 0;
    double threshold = 0;
    PolyHamiltonian H;  // degrees ≤ N + 2
    double dropped = 0; // coefficient mass discarded above degree N + 2
    std::vector<PolyHamiltonian> generators;
    std::vector<double> min_divisors;
    PluriMap<Complex> map;  // new coordinates z' = D(z), with H(z) = H^NF(D(z)) up to degree N + 2

    PolyHamiltonian degree(int d) const { return H.degree(d); }
};

inline double default_threshold(const Frequencies& W) { return 1e-8 * W.max_abs(); }

inline NormalFormResult normal_form(const PolyHamiltonian& H, int N, double threshold = -1) {
    if (N < 0) throw std::invalid_argument("N must be non-negative");
    if (!H.empty() && H.min_degree() < 2) throw std::invalid_argument("Hamiltonian has terms below degree 2");
    const Frequencies W(H);
    NormalFormResult r;
    r.N = N;
    r.threshold = threshold < 0 ? default_threshold(W) : threshold;
    r.H = truncate(H, N + 2, &r.dropped);
    r.map = PluriMap<Complex>::identity(H.box());
    for (int p = 1; p <= N; ++p) {
        HomologicalStats st;
        const PolyHamiltonian chi = homological_solve(r.H.degree(p + 2), W, r.threshold, &st, p);
        r.generators.push_back(chi);
        r.min_divisors.push_back(st.min_divisor);
        if (chi.empty()) continue;
        r.H = lie_transform(r.H, chi, N, &r.dropped);
        r.map = compose(lie_map(chi, N), r.map, N);
    }
    return r;
}

struct SapReport {
    double max_bracket = 0;  // max coefficient of {J_n, H^NF}
    double max_non_sap = 0;  // max non-SAP coefficient in degrees ≥ 3
    bool ok(double tol = 1e-10) const { return max_bracket < tol && max_non_sap < tol; }
};

inline SapReport verify_sap(const PolyHamiltonian& H) {
    SapReport r;
    const Box& b = H.box();
    for (int n = 1; n <= b.J; ++n)
        r.max_bracket = std::max(r.max_bracket, poisson(PolyHamiltonian::superaction(b, n), H).max_abs());
    for (const auto& [m, c] : H.poly())
        if (m.length() >= 3 && !m.is_sap()) r.max_non_sap = std::max(r.max_non_sap, std::abs(c));
    return r;
}

inline SapReport verify_sap(const NormalFormResult& r) { return verify_sap(r.H); }

}  // namespace bnf
