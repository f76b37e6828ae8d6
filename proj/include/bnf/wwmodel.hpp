#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "plurimap.hpp"

namespace bnf {

// Fourier coefficients f_j of f(x) = (2π)^{-1/2} Σ f_j e^{ijx}
using Coeffs = std::map<int, Complex>;

// Polynomials in real-space Fourier coefficients reuse the slot encoding:
// slot (j,+) holds η_j and slot (j,-) holds ψ_j (or ζ_j after the Wahlén change).
inline Slot eta_var(int j) { return {j, 1}; }
inline Slot psi_var(int j) { return {j, -1}; }

inline const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

inline double gsym0(const MediumParams& p, int j) { return j == 0 ? 0.0 : gsym(p, j); }

struct DNExpansion {
    std::vector<Coeffs> orders;  // G_k(η)ψ for k = 0..order
    Coeffs total;
    int box = 0;
    double beyond_box = 0;  // largest |coefficient| at |m| > J, dropped by the Galerkin projection
};

namespace detail {

inline Coeffs product(const Coeffs& f, const Coeffs& g) {
    Coeffs r;
    for (const auto& [a, x] : f)
        for (const auto& [b, y] : g) r[a + b] += kInvSqrt2Pi * x * y;
    return r;
}

template <class F>
Coeffs multiplier(const Coeffs& f, F sym) {
    Coeffs r;
    for (const auto& [k, v] : f) r[k] = sym(k) * v;
    return r;
}

inline void accumulate(Coeffs& acc, const Coeffs& f, double s = 1.0) {
    for (const auto& [k, v] : f) acc[k] += s * v;
}

}  // namespace detail

// G(η)ψ to the given order: G₁ = DηD - G₀ηG₀, G₂ = -½(D²η²G₀ + G₀η²D² - 2G₀ηG₀ηG₀), D = -i∂_x
inline DNExpansion dn_expand(const Coeffs& eta, const Coeffs& psi, int order, const MediumParams& p, int J) {
    if (order < 0 || order > 2) throw std::invalid_argument("dn_expand supports orders 0..2");
    if (auto it = eta.find(0); it != eta.end() && std::abs(it->second) > 0)
        throw std::invalid_argument("η must have zero mean");
    using detail::multiplier;
    using detail::product;
    auto G0 = [&](const Coeffs& f) { return multiplier(f, [&](int k) { return gsym0(p, k); }); };
    auto D = [&](const Coeffs& f) { return multiplier(f, [](int k) { return double(k); }); };
    auto D2 = [&](const Coeffs& f) { return multiplier(f, [](int k) { return double(k) * k; }); };

    DNExpansion r;
    r.box = J;
    r.orders.push_back(G0(psi));
    if (order >= 1) {
        Coeffs g1 = D(product(eta, D(psi)));
        detail::accumulate(g1, G0(product(eta, G0(psi))), -1.0);
        r.orders.push_back(g1);
    }
    if (order >= 2) {
        const Coeffs eta2 = product(eta, eta);
        Coeffs g2 = D2(product(eta2, G0(psi)));
        detail::accumulate(g2, G0(product(eta2, D2(psi))));
        detail::accumulate(g2, G0(product(eta, G0(product(eta, G0(psi))))), -2.0);
        for (auto& [k, v] : g2) v *= -0.5;
        r.orders.push_back(g2);
    }
    for (const auto& o : r.orders) detail::accumulate(r.total, o);
    for (auto it = r.total.begin(); it != r.total.end();)
        if (it->second == Complex(0.0)) it = r.total.erase(it);
        else ++it;
    for (const auto& [k, v] : r.total)
        if (std::abs(k) > J) r.beyond_box = std::max(r.beyond_box, std::abs(v));
    return r;
}

// ∫ f g dx = Σ f_j g_{-j}
inline Complex integral_pairing(const Coeffs& f, const Coeffs& g) {
    Complex s{};
    for (const auto& [k, v] : f)
        if (auto it = g.find(-k); it != g.end()) s += v * it->second;
    return s;
}

// Hamiltonian in (η, ψ) or (η, ζ) Fourier coefficients
struct RealFormHamiltonian {
    Box box;
    Poly<Complex> poly;
};

inline Complex evaluate(const RealFormHamiltonian& H, const Coeffs& eta, const Coeffs& psi) {
    SlotVector U(H.box.size());
    for (int j : H.box.mode_list()) {
        if (auto it = eta.find(j); it != eta.end()) U[H.box.id(eta_var(j))] = it->second;
        if (auto it = psi.find(j); it != psi.end()) U[H.box.id(psi_var(j))] = it->second;
    }
    return evaluate(H.poly, U, H.box);
}

struct HamiltonianBlocks {
    Poly<Complex> kinetic2, kinetic3, kinetic4;  // ½∫ψ G_k ψ
    Poly<Complex> gravity, capillary2, capillary4, vorticity3;
};

inline HamiltonianBlocks hamiltonian_blocks(const MediumParams& p, int J) {
    const Box b{J};
    const auto modes = b.mode_list();
    const double c1 = kInvSqrt2Pi, c2 = 1.0 / (2.0 * std::numbers::pi);
    auto G = [&](int k) { return gsym0(p, k); };
    auto mono = [](std::vector<Slot> s) { return MultiIndex::from_monomial(s); };
    HamiltonianBlocks h;
    for (int j : modes) {
        h.kinetic2.add(mono({psi_var(j), psi_var(-j)}), 0.5 * G(j));
        h.gravity.add(mono({eta_var(j), eta_var(-j)}), 0.5 * p.g);
        h.capillary2.add(mono({eta_var(j), eta_var(-j)}), 0.5 * p.kappa * j * j);
    }
    for (int a : modes)
        for (int bb : modes) {
            const int c = -a - bb;
            if (!b.contains(c)) continue;
            // ½∫ψ G₁ψ: ψ_{-m} η_a ψ_b (m b - G(m)G(b)) with m = a + b = -c
            h.kinetic3.add(mono({eta_var(a), psi_var(bb), psi_var(c)}), 0.5 * c1 * (-double(c) * bb - G(c) * G(bb)));
            // -(γ/2)∫ψ_x η² and (γ²/6)∫η³
            h.vorticity3.add(mono({psi_var(a), eta_var(bb), eta_var(c)}), -0.5 * p.gamma * c1 * Complex(0, a));
            h.vorticity3.add(mono({eta_var(a), eta_var(bb), eta_var(c)}), p.gamma * p.gamma / 6.0 * c1);
        }
    for (int a1 : modes)
        for (int a2 : modes)
            for (int bb : modes) {
                const int m = a1 + a2 + bb;
                if (b.contains(m)) {
                    const double k = m * double(m) * G(bb) + G(m) * double(bb) * bb - 2 * G(m) * G(bb + a2) * G(bb);
                    h.kinetic4.add(mono({psi_var(-m), eta_var(a1), eta_var(a2), psi_var(bb)}), -0.25 * c2 * k);
                }
                const int d = -m;
                if (b.contains(d))
                    h.capillary4.add(mono({eta_var(a1), eta_var(a2), eta_var(bb), eta_var(d)}),
                                     -0.125 * p.kappa * c2 * double(a1) * a2 * bb * d);
            }
    for (auto* q : {&h.kinetic2, &h.kinetic3, &h.kinetic4, &h.gravity, &h.capillary2, &h.capillary4, &h.vorticity3})
        q->prune(0.0);
    return h;
}

// H(η, ψ) through degree 4; the constant κ·2π of the surface-length term is dropped
inline RealFormHamiltonian build_hamiltonian(const MediumParams& p, int J) {
    p.validate();
    if (J < 1) throw std::invalid_argument("box must have J ≥ 1");
    const HamiltonianBlocks h = hamiltonian_blocks(p, J);
    RealFormHamiltonian H{Box{J}, {}};
    for (const auto* q : {&h.kinetic2, &h.kinetic3, &h.kinetic4, &h.gravity, &h.capillary2, &h.capillary4, &h.vorticity3})
        H.poly += *q;
    return H;
}

// ψ_j = ζ_j + (γ/2) η_j / (ij)
inline RealFormHamiltonian wahlen(const RealFormHamiltonian& H, const MediumParams& p) {
    const Box& b = H.box;
    VecPoly<Complex> W = VecPoly<Complex>::identity(b);
    for (int j : b.mode_list())
        W.comp[b.id(psi_var(j))].add(MultiIndex::from_monomial({eta_var(j)}), 0.5 * p.gamma / Complex(0, j));
    Substituter<Complex> sub(W, 1 << 20);
    RealFormHamiltonian out{b, sub(H.poly)};
    out.poly.prune(0.0);
    return out;
}

struct TruncatedModel {
    MediumParams params;
    Box box;
    PolyHamiltonian hamiltonian;  // in (u, ū), degrees 2..4
    std::vector<std::string> provenance;
};

// η_j = (M_j/√2)(u_j + ū_{-j}), ζ_j = (-i/(√2 M_j))(u_j - ū_{-j})
inline VecPoly<Complex> complex_change(const MediumParams& p, Box b) {
    VecPoly<Complex> W(b);
    const double r2 = std::sqrt(0.5);
    for (int j : b.mode_list()) {
        const double M = msym(p, j);
        auto& eta = W.comp[b.id(eta_var(j))];
        eta.add(MultiIndex::from_monomial({{j, 1}}), M * r2);
        eta.add(MultiIndex::from_monomial({{-j, -1}}), M * r2);
        auto& zeta = W.comp[b.id(psi_var(j))];
        zeta.add(MultiIndex::from_monomial({{j, 1}}), Complex(0, -r2 / M));
        zeta.add(MultiIndex::from_monomial({{-j, -1}}), Complex(0, r2 / M));
    }
    return W;
}

// (u, ū) slots from real coefficients of η, ζ
inline SlotVector to_complex_state(const MediumParams& p, Box b, const Coeffs& eta, const Coeffs& zeta) {
    SlotVector U(b.size());
    const double r2 = std::sqrt(0.5);
    auto get = [](const Coeffs& f, int j) {
        auto it = f.find(j);
        return it == f.end() ? Complex(0.0) : it->second;
    };
    for (int j : b.mode_list()) {
        const double M = msym(p, j);
        U[b.id({j, 1})] = r2 * (get(eta, j) / M + Complex(0, 1) * M * get(zeta, j));
        U[b.id({-j, -1})] = r2 * (get(eta, j) / M - Complex(0, 1) * M * get(zeta, j));
    }
    return U;
}

inline TruncatedModel complexify(const RealFormHamiltonian& H, const MediumParams& p) {
    const Box& b = H.box;
    const VecPoly<Complex> W = complex_change(p, b);
    Substituter<Complex> sub(W, 1 << 20);
    Poly<Complex> q = sub(H.poly);
    q.prune(1e-15 * std::max(1.0, q.max_abs()));
    TruncatedModel m{p, b, PolyHamiltonian(b, q), {}};
    double resid = 0;
    const Poly<Complex> two = q.part(2);
    for (const auto& [idx, c] : two) {
        const auto& en = idx.entries();
        const bool diag = en.size() == 1 && en[0].alpha == 1 && en[0].beta == 1;
        resid = std::max(resid, std::abs(c - (diag ? Complex(Omega(p, en[0].mode)) : Complex(0.0))));
    }
    for (int j : b.mode_list())
        if (two.coeff(MultiIndex::from_monomial({{j, 1}, {j, -1}})) == Complex(0.0))
            resid = std::max(resid, std::abs(Omega(p, j)));
    if (resid > 1e-10) throw std::runtime_error("quadratic part is not diagonal: residual " + std::to_string(resid));
    return m;
}

inline TruncatedModel build_model(const MediumParams& p, int J) {
    TruncatedModel m = complexify(wahlen(build_hamiltonian(p, J), p), p);
    m.provenance = {"dn_expansion_order=2", "capillarity=quartic", "vorticity=cubic", "wahlen", "complexify",
                    "degree_cap=4"};
    return m;
}

inline FourierField vector_field(const TruncatedModel& m) { return ham_field(m.hamiltonian); }

}  // namespace bnf
