#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plurimap.hpp"

namespace bnf {

// literal: W_(0) = 0. exact_removed: W_(0) is the Poincaré potential of ½G^T E_c A V,
// so Y_(0) vanishes whenever the input is already symplectic up to N
enum class Gauge { literal, exact_removed };

struct DarbouxProblem {
    PluriMap<Complex> B;  // identity plus degrees p..N
    int N = 2;
    Gauge gauge = Gauge::exact_removed;
};

struct DarbouxSolution {
    PluriMap<Complex> R;  // pure nonlinear, degrees p..N
    PluriMap<Complex> C;  // Id + R
    PluriMap<Complex> D;  // C ∘ Φ
    PluriMap<Complex> F;  // time-one approximate flow of Y
    VecPoly<TauSeries> Y;
    std::vector<VecPoly<TauSeries>> stages;
    std::vector<Poly<TauSeries>> witnesses;
    std::vector<double> stage_residuals;
    double equation_residual = 0;
    SymplecticReport report;
};

class DarbouxError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// max coefficient of degree ≤ N in B^T E_c B - E_c
inline double linear_symplectic_defect(const PluriMap<Complex>& B, int N) {
    const OpPoly<Complex> M = B.full();
    const TwoForm Ec = symplectic_constant(B.box);
    return (matmul(transpose(M), matmul(Ec, M, N), N) - Ec).max_abs(0, N);
}

inline void admit(const DarbouxProblem& P, double tol = 1e-9) {
    if (P.N < 1) throw std::invalid_argument("target order must be positive");
    if (!P.B.has_identity()) throw std::invalid_argument("input map needs an identity part");
    if (P.B.nonlinear.max_degree() > P.N) throw std::invalid_argument("input map exceeds the target order");
    const double d = linear_symplectic_defect(P.B, P.N);
    if (!(d < tol)) throw DarbouxError("input is not linearly symplectic up to N (defect " + std::to_string(d) + ")");
}

// A with Ψ(V) = A(V)V the approximate inverse, and G(V)Ŵ = dA(V)[Ŵ]V
struct DarbouxData {
    Box box;
    int N = 0;
    int p = 0;
    Gauge gauge = Gauge::exact_removed;
    OpPoly<Complex> A, G, Ec;
};

// (Σ_m ∂_m M · X_m), an operator linear in X
template <class C>
OpPoly<C> directional(const OpPoly<C>& M, const VecPoly<C>& X, int maxdeg) {
    const Box& b = M.box;
    OpPoly<C> R(b);
    for (size_t i = 0; i < M.e.size(); ++i) {
        if (M.e[i].empty()) continue;
        for (int m = 0; m < b.size(); ++m)
            if (!X.comp[m].empty()) R.e[i] += multiply(M.e[i].derivative(b.slot(m)), X.comp[m], maxdeg);
    }
    return R;
}

inline DarbouxData prepare(const DarbouxProblem& P) {
    admit(P);
    DarbouxData d;
    d.box = P.B.box;
    d.N = P.N;
    d.p = P.B.min_degree();
    d.gauge = P.gauge;
    const PluriMap<Complex> Psi = approx_inverse(P.B, P.N);
    d.A = Psi.full();
    d.Ec = symplectic_constant(d.box);
    d.G = OpPoly<Complex>(d.box);
    const Box& b = d.box;
    const OpPoly<Complex>& An = Psi.nonlinear;
    for (int o = 0; o < b.size(); ++o)
        for (int l = 0; l < b.size(); ++l) {
            Poly<Complex> acc;
            for (int m = 0; m < b.size(); ++m)
                if (!An.at(o, m).empty()) acc += An.at(o, m).derivative(b.slot(l)).times_variable(b.slot(m));
            d.G.at(o, l) = acc;
        }
    return d;
}

inline TwoForm perturbed_tensor(const DarbouxData& d) {
    const int N = d.N;
    const TwoForm EcA = matmul(d.Ec, d.A, N);
    const TwoForm EcG = matmul(d.Ec, d.G, N);
    const TwoForm At = transpose(d.A), Gt = transpose(d.G);
    return d.Ec + matmul(At, EcG, N) + matmul(Gt, EcA, N) + matmul(Gt, EcG, N);
}

inline TwoForm perturbed_tensor(const DarbouxProblem& P) { return perturbed_tensor(prepare(P)); }

// θ_{≤N} = ½ (E_c + G^T E_c A) V, truncated at vector degree N + 1
inline OneForm liouville_form(const DarbouxData& d) {
    const OpPoly<Complex> Z = d.Ec + matmul(transpose(d.G), matmul(d.Ec, d.A, d.N), d.N);
    return 0.5 * apply_op(Z, VecPoly<Complex>::identity(d.box), d.N + 1);
}

struct StructuralSplit {
    Poly<TauSeries> W;
    VecPoly<TauSeries> gradient;   // ∇W
    VecPoly<TauSeries> remainder;  // K V - ∇W
    VecPoly<TauSeries> input;      // K V = A^T E_c G[X]
};

// K = A^T E_c dA[X]; S = ½(K + K^T); W = ½⟨S V, V⟩
inline StructuralSplit structural_split(const DarbouxData& d, const VecPoly<TauSeries>& X) {
    const int vN = d.N + 1;
    const OpPoly<TauSeries> A = lift_tau(d.A), Ec = lift_tau(d.Ec);
    const OpPoly<TauSeries> K = matmul(transpose(A), matmul(Ec, directional(A, X, d.N), d.N), d.N);
    OpPoly<TauSeries> S = K + transpose(K);
    S *= 0.5;
    const VecPoly<TauSeries> V = VecPoly<TauSeries>::identity(d.box);
    StructuralSplit s;
    s.W = pairing(apply_op(S, V, vN), V, vN + 1);
    s.W *= 0.5;
    s.gradient = gradient(s.W, d.box);
    s.input = apply_op(K, V, vN);
    s.remainder = s.input - s.gradient;
    return s;
}

inline int stage_count(int p, int N) {
    int a = 0;
    while ((a + 2) * p < N + 1) ++a;
    return a;
}

struct DarbouxGenerator {
    VecPoly<TauSeries> Y;
    std::vector<VecPoly<TauSeries>> stages;
    std::vector<Poly<TauSeries>> witnesses;  // W_(a) = τ W̆_(a-1) for a ≥ 1
};

inline bool finite(const VecPoly<TauSeries>& X) {
    for (const auto& c : X.comp)
        for (const auto& [m, t] : c)
            for (int k = 0; k <= t.order(); ++k)
                if (!std::isfinite(t[k].real()) || !std::isfinite(t[k].imag())) return false;
    return true;
}

inline DarbouxGenerator solve_darboux(const DarbouxData& d) {
    const int N = d.N, vN = d.N + 1;
    const Box& b = d.box;
    DarbouxGenerator g;
    g.Y = VecPoly<TauSeries>(b);
    if (d.p < 0 || d.p > N) return g;
    const OpPoly<TauSeries> Ec = lift_tau(d.Ec);
    const OpPoly<TauSeries> R = lift_tau(matmul(transpose(d.G), matmul(d.Ec, d.A, N), N) +
                                         matmul(transpose(d.G), matmul(d.Ec, d.G, N), N));
    const VecPoly<TauSeries> V = VecPoly<TauSeries>::identity(b);
    const TauSeries tau = TauSeries::monomial(1.0, 1);
    auto times_tau = [&](VecPoly<TauSeries> X) {
        for (auto& c : X.comp) c = c.map_coeffs([&](const TauSeries& t) { return t * tau; });
        return X;
    };

    const OpPoly<TauSeries> GtEcA = lift_tau(matmul(transpose(d.G), matmul(d.Ec, d.A, N), N));
    VecPoly<TauSeries> omega = apply_op(GtEcA, V, vN);
    omega *= 0.5;
    Poly<TauSeries> W0;
    if (d.gauge == Gauge::exact_removed) {
        // f = Σ_d ⟨ω_d, V⟩ / (d + 1)
        const Poly<TauSeries> f = pairing(omega, V, vN + 1);
        for (const auto& [m, c] : f) W0.add(m, c * Complex(1.0 / m.length()));
        omega -= gradient(W0, b);
    }
    VecPoly<TauSeries> Ya = apply_op(Ec, omega, vN);
    Ya *= -1.0;
    g.stages.push_back(Ya);
    g.witnesses.push_back(W0);
    const int Abar = stage_count(d.p, N);
    for (int a = 1; a <= Abar; ++a) {
        const StructuralSplit s = structural_split(d, Ya);
        VecPoly<TauSeries> rhs = apply_op(R, Ya, vN) + s.remainder;
        Ya = apply_op(Ec, times_tau(rhs), vN);
        Ya *= -1.0;
        if (!finite(Ya)) throw DarbouxError("stage recursion produced a non-finite value");
        g.stages.push_back(Ya);
        Poly<TauSeries> W = s.W.map_coeffs([&](const TauSeries& t) { return t * tau; });
        g.witnesses.push_back(W);
    }
    for (const auto& s : g.stages) g.Y += s;
    return g;
}

// degree ≤ N+1 part of E_c Y + ½G^T E_c A V + τ R Y + τ A^T E_c G[Y] - ∇W
inline double equation_residual(const DarbouxData& d, const DarbouxGenerator& g) {
    const int N = d.N, vN = d.N + 1;
    const Box& b = d.box;
    const OpPoly<TauSeries> Ec = lift_tau(d.Ec);
    const OpPoly<TauSeries> GtEcA = lift_tau(matmul(transpose(d.G), matmul(d.Ec, d.A, N), N));
    const OpPoly<TauSeries> R = GtEcA + lift_tau(matmul(transpose(d.G), matmul(d.Ec, d.G, N), N));
    const VecPoly<TauSeries> V = VecPoly<TauSeries>::identity(b);
    const TauSeries tau = TauSeries::monomial(1.0, 1);
    VecPoly<TauSeries> tail = apply_op(R, g.Y, vN) + structural_split(d, g.Y).input;
    for (auto& c : tail.comp) c = c.map_coeffs([&](const TauSeries& t) { return t * tau; });
    VecPoly<TauSeries> r = apply_op(Ec, g.Y, vN) + tail;
    VecPoly<TauSeries> half = apply_op(GtEcA, V, vN);
    half *= 0.5;
    r += half;
    Poly<TauSeries> W;
    for (const auto& w : g.witnesses) W += w;
    r -= gradient(W, b);
    return r.truncated(vN).max_abs();
}

inline DarbouxSolution corrector(const DarbouxProblem& P) {
    const DarbouxData d = prepare(P);
    const int N = P.N;
    DarbouxSolution s;
    const DarbouxGenerator g = solve_darboux(d);
    s.Y = g.Y;
    s.stages = g.stages;
    s.witnesses = g.witnesses;
    s.equation_residual = equation_residual(d, g);
    for (size_t a = 0; a < g.stages.size(); ++a) {
        DarbouxGenerator partial;
        partial.Y = VecPoly<TauSeries>(d.box);
        for (size_t k = 0; k <= a; ++k) {
            partial.Y += g.stages[k];
            partial.witnesses.push_back(g.witnesses[k]);
        }
        s.stage_residuals.push_back(equation_residual(d, partial));
    }
    PluriMap<TauSeries> gen(d.box);
    if (g.Y.max_abs() > 0) gen.nonlinear = operator_form(g.Y).truncated(N);
    s.F = approx_flow(gen, N);
    s.C = approx_inverse(s.F, N);
    s.R = PluriMap<Complex>(d.box);
    s.R.nonlinear = s.C.nonlinear;
    s.D = compose(s.C, P.B, N);
    s.report = symplectic_up_to_N(s.D, N);
    return s;
}

}  // namespace bnf
