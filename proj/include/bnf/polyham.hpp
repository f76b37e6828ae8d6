#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "medium.hpp"
#include "poly.hpp"

namespace bnf {

// real-to-real state: z_j for j in the box, conjugates implied
struct State {
    Box box;
    std::vector<Complex> z;

    State() = default;
    explicit State(Box b) : box(b), z(b.modes()) {}

    Complex& operator[](int j) { return z[box.mode_pos(j)]; }
    Complex operator[](int j) const { return z[box.mode_pos(j)]; }

    SlotVector slots() const {
        SlotVector U(box.size());
        for (int p = 0; p < box.modes(); ++p) {
            const int j = box.mode_at(p);
            U[box.id({j, 1})] = z[p];
            U[box.id({j, -1})] = std::conj(z[p]);
        }
        return U;
    }

    static State from_slots(const Box& box, const SlotVector& U) {
        State s(box);
        for (int p = 0; p < box.modes(); ++p) s.z[p] = U[box.id({box.mode_at(p), 1})];
        return s;
    }
};

inline double superaction(const State& Z, int n) {
    if (n < 1) throw std::invalid_argument("super-action index must be positive");
    double s = 0;
    if (Z.box.contains(n)) s += std::norm(Z[n]);
    if (Z.box.contains(-n)) s += std::norm(Z[-n]);
    return s;
}

inline double momentum(const State& Z) {
    double m = 0;
    for (int p = 0; p < Z.box.modes(); ++p) m += Z.box.mode_at(p) * std::norm(Z.z[p]);
    return m;
}

// ⟨V, W⟩_r = Σ V_(k,σ) W_(-k,σ)
inline Complex pairing(const Box& box, const SlotVector& V, const SlotVector& W) {
    Complex s{};
    for (int i = 0; i < box.size(); ++i) s += V[i] * W[box.paired(i)];
    return s;
}

// vector of polynomials, one per output slot
template <class C>
struct VecPoly {
    Box box;
    std::vector<Poly<C>> comp;

    VecPoly() = default;
    explicit VecPoly(Box b) : box(b), comp(b.size()) {}

    static VecPoly identity(Box b) {
        VecPoly v(b);
        for (int i = 0; i < b.size(); ++i) v.comp[i] = Poly<C>::variable(b.slot(i), C(Complex(1.0)));
        return v;
    }

    Poly<C>& operator[](int id) { return comp[id]; }
    const Poly<C>& operator[](int id) const { return comp[id]; }

    VecPoly& operator+=(const VecPoly& o) {
        for (size_t i = 0; i < comp.size(); ++i) comp[i] += o.comp[i];
        return *this;
    }
    VecPoly& operator-=(const VecPoly& o) {
        for (size_t i = 0; i < comp.size(); ++i) comp[i] -= o.comp[i];
        return *this;
    }
    VecPoly& operator*=(Complex s) {
        for (auto& c : comp) c *= s;
        return *this;
    }
    friend VecPoly operator+(VecPoly a, const VecPoly& b) { return a += b; }
    friend VecPoly operator-(VecPoly a, const VecPoly& b) { return a -= b; }
    friend VecPoly operator*(Complex s, VecPoly a) { return a *= s; }

    VecPoly part(int d) const {
        VecPoly v(box);
        for (size_t i = 0; i < comp.size(); ++i) v.comp[i] = comp[i].part(d);
        return v;
    }
    VecPoly truncated(int maxdeg, double* dropped = nullptr) const {
        VecPoly v(box);
        for (size_t i = 0; i < comp.size(); ++i) v.comp[i] = comp[i].truncated(maxdeg, dropped);
        return v;
    }
    int max_degree() const {
        int d = -1;
        for (const auto& c : comp) d = std::max(d, c.max_degree());
        return d;
    }
    double max_abs() const {
        double m = 0;
        for (const auto& c : comp) m = std::max(m, c.max_abs());
        return m;
    }
    bool operator==(const VecPoly&) const = default;
};

using FourierField = VecPoly<Complex>;

inline SlotVector evaluate(const FourierField& X, const SlotVector& U) {
    SlotVector out(X.box.size());
    for (int i = 0; i < X.box.size(); ++i) out[i] = evaluate(X.comp[i], U, X.box);
    return out;
}

template <class C>
Poly<C> pairing(const VecPoly<C>& V, const VecPoly<C>& W, int maxdeg = 1 << 20) {
    Poly<C> s;
    for (int i = 0; i < V.box.size(); ++i) s += multiply(V.comp[i], W.comp[V.box.paired(i)], maxdeg);
    return s;
}

class PolyHamiltonian {
public:
    PolyHamiltonian() = default;
    explicit PolyHamiltonian(Box b) : box_(b) {}
    PolyHamiltonian(Box b, Poly<Complex> p) : box_(b), p_(std::move(p)) { check_box(); }

    static PolyHamiltonian quadratic(const MediumParams& params, Box b) {
        PolyHamiltonian H(b);
        for (int j : b.mode_list()) H.add(MultiIndex::from_monomial({{j, 1}, {j, -1}}), Omega(params, j));
        return H;
    }
    // J_n = |z_n|² + |z_{-n}|²
    static PolyHamiltonian superaction(Box b, int n) {
        PolyHamiltonian H(b);
        for (int j : {n, -n})
            if (b.contains(j)) H.add(MultiIndex::from_monomial({{j, 1}, {j, -1}}), 1.0);
        return H;
    }
    static PolyHamiltonian momentum(Box b) {
        PolyHamiltonian H(b);
        for (int j : b.mode_list()) H.add(MultiIndex::from_monomial({{j, 1}, {j, -1}}), double(j));
        return H;
    }

    const Box& box() const { return box_; }
    const Poly<Complex>& poly() const { return p_; }
    Poly<Complex>& poly() { return p_; }

    void add(const MultiIndex& m, Complex c) {
        for (const auto& e : m.entries())
            if (!box_.contains(e.mode)) throw std::out_of_range("monomial outside the box");
        p_.add(m, c);
    }
    // adds c·m and its conjugate partner, keeping reality
    void add_real_pair(const MultiIndex& m, Complex c) {
        add(m, c);
        if (m.conj() == m) add(m, std::conj(c));
        else add(m.conj(), std::conj(c));
    }
    Complex coeff(const MultiIndex& m) const { return p_.coeff(m); }

    PolyHamiltonian degree(int d) const { return {box_, p_.part(d)}; }
    int max_degree() const { return p_.max_degree(); }
    int min_degree() const { return p_.min_degree(); }
    size_t size() const { return p_.size(); }
    bool empty() const { return p_.empty(); }

    PolyHamiltonian& operator+=(const PolyHamiltonian& o) {
        same_box(o);
        p_ += o.p_;
        return *this;
    }
    PolyHamiltonian& operator-=(const PolyHamiltonian& o) {
        same_box(o);
        p_ -= o.p_;
        return *this;
    }
    PolyHamiltonian& operator*=(Complex s) {
        p_ *= s;
        return *this;
    }
    friend PolyHamiltonian operator+(PolyHamiltonian a, const PolyHamiltonian& b) { return a += b; }
    friend PolyHamiltonian operator-(PolyHamiltonian a, const PolyHamiltonian& b) { return a -= b; }
    friend PolyHamiltonian operator*(Complex s, PolyHamiltonian a) { return a *= s; }

    double max_abs() const { return p_.max_abs(); }

    // largest |conj(c(α,β)) - c(β,α)|
    double reality_defect() const {
        double d = 0;
        for (const auto& [m, c] : p_) d = std::max(d, std::abs(std::conj(c) - p_.coeff(m.conj())));
        return d;
    }
    int max_abs_momentum() const {
        int d = 0;
        for (const auto& [m, c] : p_) d = std::max(d, std::abs(m.momentum()));
        return d;
    }

    bool operator==(const PolyHamiltonian&) const = default;

private:
    void check_box() const {
        for (const auto& [m, c] : p_)
            for (const auto& e : m.entries())
                if (!box_.contains(e.mode)) throw std::out_of_range("monomial outside the box");
    }
    void same_box(const PolyHamiltonian& o) const {
        if (!(o.box_ == box_)) throw std::invalid_argument("box mismatch");
    }

    Box box_;
    Poly<Complex> p_;
};

inline Complex evaluate_complex(const PolyHamiltonian& H, const SlotVector& U) {
    return evaluate(H.poly(), U, H.box());
}

inline double evaluate(const PolyHamiltonian& H, const State& Z) {
    const SlotVector U = Z.slots();
    Complex s{};
    double scale = 0;
    for (const auto& [m, c] : H.poly()) {
        const Complex t = c * monomial_value(m, U, H.box());
        s += t;
        scale += std::abs(t);
    }
    if (std::abs(s.imag()) > 1e-12 * std::max(scale, 1e-300) && std::abs(s.imag()) > 1e-300)
        throw std::runtime_error("Hamiltonian is not real on a real state");
    return s.real();
}

// ∇f_(k,σ) = ∂f/∂U_(-k,σ)
template <class C>
VecPoly<C> gradient(const Poly<C>& f, const Box& b) {
    VecPoly<C> X(b);
    for (int i = 0; i < b.size(); ++i) X.comp[i] = f.derivative(b.slot(b.paired(i)));
    return X;
}

inline FourierField gradient(const PolyHamiltonian& H) { return gradient(H.poly(), H.box()); }

// X_(k,σ) = -iσ ∂H/∂U_(k,-σ)
inline FourierField ham_field(const PolyHamiltonian& H) {
    const Box& b = H.box();
    FourierField X(b);
    for (int i = 0; i < b.size(); ++i) {
        const Slot s = b.slot(i);
        X.comp[i] = H.poly().derivative(s.conj()) * Complex(0.0, -double(s.sign));
    }
    return X;
}

// E_c: (E_c V)_(k,+) = -i V_(-k,-), (E_c V)_(k,-) = i V_(-k,+)
template <class C>
VecPoly<C> apply_Ec(const VecPoly<C>& V) {
    const Box& b = V.box;
    VecPoly<C> out(b);
    for (int i = 0; i < b.size(); ++i) {
        const Slot s = b.slot(i);
        out.comp[i] = V.comp[b.id({-s.mode, -s.sign})] * Complex(0.0, -double(s.sign));
    }
    return out;
}

// inverse of ham_field on Hamiltonian fields, via Euler's identity per degree
inline PolyHamiltonian hamiltonian_from_field(const FourierField& X) {
    const FourierField grad = apply_Ec(X);
    const Poly<Complex> s = pairing(grad, FourierField::identity(X.box));
    Poly<Complex> h;
    for (const auto& [m, c] : s) h.add(m, c / double(m.length()));
    return {X.box, h};
}

struct Truncation {
    int maxdeg = 1 << 20;
    double dropped = 0;
};

// {F,G} = i Σ_j (∂_{z̄_j}F ∂_{z_j}G - ∂_{z_j}F ∂_{z̄_j}G)
inline PolyHamiltonian poisson(const PolyHamiltonian& F, const PolyHamiltonian& G, Truncation* tr = nullptr) {
    if (!(F.box() == G.box())) throw std::invalid_argument("box mismatch");
    const Box& b = F.box();
    const int maxdeg = tr ? tr->maxdeg : 1 << 20;
    double* dropped = tr ? &tr->dropped : nullptr;
    Poly<Complex> r;
    for (int j : b.mode_list()) {
        const Slot zp{j, 1}, zm{j, -1};
        const auto Fm = F.poly().derivative(zm), Fp = F.poly().derivative(zp);
        if (Fm.empty() && Fp.empty()) continue;
        const auto Gp = G.poly().derivative(zp), Gm = G.poly().derivative(zm);
        r += multiply(Fm, Gp, maxdeg, dropped);
        r -= multiply(Fp, Gm, maxdeg, dropped);
    }
    r *= Complex(0.0, 1.0);
    return {b, r};
}

inline PolyHamiltonian truncate(const PolyHamiltonian& H, int maxdeg, double* dropped = nullptr) {
    return {H.box(), H.poly().truncated(maxdeg, dropped)};
}

inline std::pair<PolyHamiltonian, PolyHamiltonian> sap_split(const PolyHamiltonian& H) {
    PolyHamiltonian sap(H.box()), rest(H.box());
    for (const auto& [m, c] : H.poly()) (m.is_sap() ? sap : rest).poly().add(m, c);
    return {sap, rest};
}

}  // namespace bnf
