#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polyham.hpp"

namespace bnf {

inline TauSeries tau_derivative(const TauSeries& t) {
    TauSeries r;
    for (int k = 1; k <= t.order(); ++k) r += TauSeries::monomial(t[k] * double(k), k - 1);
    return r;
}

// D x D matrix of polynomials in U; entry (o, l) maps input slot l to output slot o
template <class C>
struct OpPoly {
    Box box;
    std::vector<Poly<C>> e;

    OpPoly() = default;
    explicit OpPoly(Box b) : box(b), e(size_t(b.size()) * b.size()) {}

    static OpPoly identity(Box b) {
        OpPoly m(b);
        for (int i = 0; i < b.size(); ++i) m.at(i, i) = Poly<C>::constant(C(Complex(1.0)));
        return m;
    }

    int dim() const { return box.size(); }
    Poly<C>& at(int o, int l) { return e[size_t(o) * dim() + l]; }
    const Poly<C>& at(int o, int l) const { return e[size_t(o) * dim() + l]; }

    OpPoly& operator+=(const OpPoly& m) {
        for (size_t i = 0; i < e.size(); ++i) e[i] += m.e[i];
        return *this;
    }
    OpPoly& operator-=(const OpPoly& m) {
        for (size_t i = 0; i < e.size(); ++i) e[i] -= m.e[i];
        return *this;
    }
    OpPoly& operator*=(Complex s) {
        for (auto& p : e) p *= s;
        return *this;
    }
    friend OpPoly operator+(OpPoly a, const OpPoly& b) { return a += b; }
    friend OpPoly operator-(OpPoly a, const OpPoly& b) { return a -= b; }
    friend OpPoly operator*(Complex s, OpPoly a) { return a *= s; }

    OpPoly parts(int lo, int hi) const {
        OpPoly m(box);
        for (size_t i = 0; i < e.size(); ++i) m.e[i] = e[i].parts(lo, hi);
        return m;
    }
    OpPoly part(int d) const { return parts(d, d); }
    OpPoly truncated(int maxdeg, double* dropped = nullptr) const {
        OpPoly m(box);
        for (size_t i = 0; i < e.size(); ++i) m.e[i] = e[i].truncated(maxdeg, dropped);
        return m;
    }
    int max_degree() const {
        int d = -1;
        for (const auto& p : e) d = std::max(d, p.max_degree());
        return d;
    }
    int min_degree() const {
        int d = -1;
        for (const auto& p : e) {
            const int q = p.min_degree();
            if (q >= 0) d = d < 0 ? q : std::min(d, q);
        }
        return d;
    }
    double max_abs() const {
        double r = 0;
        for (const auto& p : e) r = std::max(r, p.max_abs());
        return r;
    }
    double max_abs(int lo, int hi) const { return parts(lo, hi).max_abs(); }
    bool empty() const {
        for (const auto& p : e)
            if (!p.empty()) return false;
        return true;
    }
    bool operator==(const OpPoly&) const = default;
};

template <class C>
OpPoly<C> matmul(const OpPoly<C>& A, const OpPoly<C>& B, int maxdeg = 1 << 20, double* dropped = nullptr) {
    const int D = A.dim();
    OpPoly<C> R(A.box);
    for (int o = 0; o < D; ++o)
        for (int m = 0; m < D; ++m) {
            const auto& a = A.at(o, m);
            if (a.empty()) continue;
            for (int l = 0; l < D; ++l) {
                const auto& b = B.at(m, l);
                if (b.empty()) continue;
                R.at(o, l) += multiply(a, b, maxdeg, dropped);
            }
        }
    return R;
}

template <class C>
VecPoly<C> apply_op(const OpPoly<C>& A, const VecPoly<C>& W, int maxdeg = 1 << 20) {
    const int D = A.dim();
    VecPoly<C> R(A.box);
    for (int o = 0; o < D; ++o)
        for (int l = 0; l < D; ++l) {
            const auto& a = A.at(o, l);
            if (a.empty() || W.comp[l].empty()) continue;
            R.comp[o] += multiply(a, W.comp[l], maxdeg);
        }
    return R;
}

// A(U)U
template <class C>
VecPoly<C> apply_to_identity(const OpPoly<C>& A) {
    const int D = A.dim();
    VecPoly<C> R(A.box);
    for (int o = 0; o < D; ++o)
        for (int l = 0; l < D; ++l)
            if (!A.at(o, l).empty()) R.comp[o] += A.at(o, l).times_variable(A.box.slot(l));
    return R;
}

// A^T_(k,σ),(j,σ') = A_(-j,σ'),(-k,σ)
template <class C>
OpPoly<C> transpose(const OpPoly<C>& A) {
    const Box& b = A.box;
    OpPoly<C> T(b);
    for (int o = 0; o < b.size(); ++o)
        for (int l = 0; l < b.size(); ++l) T.at(o, l) = A.at(b.paired(l), b.paired(o));
    return T;
}

// dX: entry (o, l) = ∂X_o / ∂U_l
template <class C>
OpPoly<C> differential(const VecPoly<C>& X) {
    const Box& b = X.box;
    OpPoly<C> M(b);
    for (int o = 0; o < b.size(); ++o)
        for (int l = 0; l < b.size(); ++l) M.at(o, l) = X.comp[o].derivative(b.slot(l));
    return M;
}

// operator G with G(U)U = X(U); each degree-d piece is (1/d)·∂X_d
template <class C>
OpPoly<C> operator_form(const VecPoly<C>& X) {
    const Box& b = X.box;
    OpPoly<C> M(b);
    for (int o = 0; o < b.size(); ++o)
        for (const auto& [m, c] : X.comp[o]) {
            const int d = m.length();
            if (d == 0) throw std::invalid_argument("constant vector field has no operator form");
            for (const auto& en : m.entries()) {
                if (en.alpha) M.at(o, b.id({en.mode, 1})).add(*m.divided({en.mode, 1}), c * Complex(double(en.alpha) / d));
                if (en.beta) M.at(o, b.id({en.mode, -1})).add(*m.divided({en.mode, -1}), c * Complex(double(en.beta) / d));
            }
        }
    return M;
}

// p(U) -> p(W(U)) with cached powers of the components of W
template <class C>
class Substituter {
public:
    Substituter(const VecPoly<C>& W, int maxdeg) : W_(W), maxdeg_(maxdeg) {}

    Poly<C> operator()(const Poly<C>& p) {
        Poly<C> r;
        for (const auto& [m, c] : p) {
            Poly<C> acc = Poly<C>::constant(c);
            for (const auto& en : m.entries()) {
                if (en.alpha) acc = multiply(acc, power(W_.box.id({en.mode, 1}), en.alpha), maxdeg_);
                if (en.beta) acc = multiply(acc, power(W_.box.id({en.mode, -1}), en.beta), maxdeg_);
                if (acc.empty()) break;
            }
            r += acc;
        }
        return r;
    }

private:
    const Poly<C>& power(int id, int e) {
        auto key = std::make_pair(id, e);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        Poly<C> v = e == 1 ? W_.comp[id].truncated(maxdeg_) : multiply(power(id, e - 1), W_.comp[id], maxdeg_);
        return cache_.emplace(key, std::move(v)).first->second;
    }

    VecPoly<C> W_;
    int maxdeg_;
    std::map<std::pair<int, int>, Poly<C>> cache_;
};

template <class C>
OpPoly<C> substitute(const OpPoly<C>& A, const VecPoly<C>& W, int maxdeg) {
    Substituter<C> sub(W, maxdeg);
    OpPoly<C> R(A.box);
    for (size_t i = 0; i < A.e.size(); ++i)
        if (!A.e[i].empty()) R.e[i] = sub(A.e[i]);
    return R;
}

template <class C>
VecPoly<C> substitute(const VecPoly<C>& X, const VecPoly<C>& W, int maxdeg) {
    Substituter<C> sub(W, maxdeg);
    VecPoly<C> R(X.box);
    for (size_t i = 0; i < X.comp.size(); ++i)
        if (!X.comp[i].empty()) R.comp[i] = sub(X.comp[i]);
    return R;
}

inline std::vector<Complex> evaluate(const OpPoly<Complex>& A, const SlotVector& U) {
    std::vector<Complex> M(A.e.size());
    for (size_t i = 0; i < A.e.size(); ++i) M[i] = evaluate(A.e[i], U, A.box);
    return M;
}

// U ↦ (L + Σ_p M_p(U)) U, with L the optional linear part
template <class C>
struct PluriMap {
    Box box;
    std::optional<OpPoly<C>> linear;
    OpPoly<C> nonlinear;

    PluriMap() = default;
    explicit PluriMap(Box b) : box(b), nonlinear(b) {}

    static PluriMap identity(Box b) {
        PluriMap m(b);
        m.linear = OpPoly<C>::identity(b);
        return m;
    }
    static PluriMap id_plus(const OpPoly<C>& M) {
        PluriMap m = identity(M.box);
        m.nonlinear = M.parts(1, 1 << 20);
        if (!M.part(0).empty()) throw std::invalid_argument("nonlinear part has a constant piece");
        return m;
    }
    static PluriMap sigma_only(const OpPoly<C>& M) {
        PluriMap m(M.box);
        m.nonlinear = M;
        if (!M.part(0).empty()) throw std::invalid_argument("nonlinear part has a constant piece");
        return m;
    }
    // splits an operator into constant and nonlinear parts; linear slot kept when present
    static PluriMap from_operator(const OpPoly<C>& M, bool with_linear) {
        PluriMap m(M.box);
        if (with_linear) m.linear = M.part(0);
        else if (!M.part(0).empty()) throw std::invalid_argument("unexpected constant piece");
        m.nonlinear = M.parts(1, 1 << 20);
        return m;
    }

    bool has_identity() const {
        if (!linear) return false;
        OpPoly<C> d = *linear - OpPoly<C>::identity(box);
        return d.empty();
    }

    OpPoly<C> full() const { return linear ? *linear + nonlinear : nonlinear; }
    OpPoly<C> piece(int p) const { return nonlinear.part(p); }
    int min_degree() const { return nonlinear.min_degree(); }
    int max_degree() const { return nonlinear.max_degree(); }
    VecPoly<C> as_field() const { return apply_to_identity(full()); }

    bool operator==(const PluriMap&) const = default;
};

template <class C>
void check_boxes(const PluriMap<C>& a, const PluriMap<C>& b) {
    if (!(a.box == b.box)) throw std::invalid_argument("box mismatch");
}

inline SlotVector apply_map(const PluriMap<Complex>& M, const SlotVector& U, bool include_linear = true) {
    const OpPoly<Complex> A = include_linear ? M.full() : M.nonlinear;
    const int D = M.box.size();
    const auto vals = evaluate(A, U);
    SlotVector out(D);
    for (int o = 0; o < D; ++o)
        for (int l = 0; l < D; ++l) out[o] += vals[size_t(o) * D + l] * U[l];
    return out;
}

// M(M'(U)U) M'(U), truncated at operator degree N
template <class C>
PluriMap<C> compose(const PluriMap<C>& M, const PluriMap<C>& Mp, int N) {
    check_boxes(M, Mp);
    const OpPoly<C> B = Mp.full();
    const VecPoly<C> psi = apply_to_identity(B);
    OpPoly<C> A = substitute(M.nonlinear, psi, N);
    if (M.linear) A += *M.linear;
    const OpPoly<C> R = matmul(A, B, N);
    return PluriMap<C>::from_operator(R, M.linear && Mp.linear);
}

template <class C>
PluriMap<C> truncated(const PluriMap<C>& M, int N) {
    PluriMap<C> r = M;
    r.nonlinear = M.nonlinear.truncated(N);
    return r;
}

// transpose of each graded piece, linear part included
template <class C>
PluriMap<C> transpose(const PluriMap<C>& M) {
    PluriMap<C> r(M.box);
    if (M.linear) r.linear = transpose(*M.linear);
    r.nonlinear = transpose(M.nonlinear);
    return r;
}

// Φ = Id + M̆ with Ψ∘Φ = Id up to degree N
template <class C>
PluriMap<C> approx_inverse(const PluriMap<C>& Psi, int N) {
    if (!Psi.has_identity()) throw std::invalid_argument("approx_inverse needs an identity linear part");
    const int p = Psi.min_degree();
    PluriMap<C> Phi = PluriMap<C>::identity(Psi.box);
    if (p < 0) return Phi;
    for (int l = p; l <= N; ++l) {
        const PluriMap<C> R = compose(Psi, Phi, l);
        Phi.nonlinear -= R.nonlinear.part(l);
    }
    return Phi;
}

// τ-family F^τ = Id + Σ_a F_a with ∂_τ F^τ(Z) = G^τ(F^τ(Z)Z) F^τ(Z) up to degree N
inline PluriMap<TauSeries> approx_flow_family(const PluriMap<TauSeries>& G, int N) {
    if (G.linear || !G.nonlinear.part(0).empty())
        throw std::invalid_argument("linear fields are not handled by approx_flow");
    const int p = G.min_degree();
    PluriMap<TauSeries> F = PluriMap<TauSeries>::identity(G.box);
    if (p < 0) return F;
    for (int a = p; a <= N; ++a) {
        const PluriMap<TauSeries> R = compose(G, F, a);
        OpPoly<TauSeries> Fa = R.nonlinear.part(a);
        for (auto& poly : Fa.e) poly = poly.map_coeffs([](const TauSeries& t) { return t.integral(); });
        F.nonlinear += Fa;
    }
    return F;
}

inline PluriMap<Complex> at_tau(const PluriMap<TauSeries>& F, double tau) {
    PluriMap<Complex> r(F.box);
    auto conv = [tau](const OpPoly<TauSeries>& A) {
        OpPoly<Complex> B(A.box);
        for (size_t i = 0; i < A.e.size(); ++i) B.e[i] = at_tau(A.e[i], tau);
        return B;
    };
    if (F.linear) r.linear = conv(*F.linear);
    r.nonlinear = conv(F.nonlinear);
    return r;
}

inline OpPoly<TauSeries> lift_tau(const OpPoly<Complex>& A) {
    OpPoly<TauSeries> B(A.box);
    for (size_t i = 0; i < A.e.size(); ++i) B.e[i] = lift_tau(A.e[i]);
    return B;
}

inline VecPoly<TauSeries> lift_tau(const VecPoly<Complex>& X) {
    VecPoly<TauSeries> Y(X.box);
    for (size_t i = 0; i < X.comp.size(); ++i) Y.comp[i] = lift_tau(X.comp[i]);
    return Y;
}

inline VecPoly<Complex> at_tau(const VecPoly<TauSeries>& X, double tau) {
    VecPoly<Complex> Y(X.box);
    for (size_t i = 0; i < X.comp.size(); ++i) Y.comp[i] = at_tau(X.comp[i], tau);
    return Y;
}

inline PluriMap<TauSeries> lift_tau(const PluriMap<Complex>& M) {
    PluriMap<TauSeries> r(M.box);
    if (M.linear) r.linear = lift_tau(*M.linear);
    r.nonlinear = lift_tau(M.nonlinear);
    return r;
}

inline PluriMap<Complex> approx_flow(const PluriMap<TauSeries>& G, int N) {
    return at_tau(approx_flow_family(G, N), 1.0);
}
inline PluriMap<Complex> approx_flow(const PluriMap<Complex>& G, int N) {
    return approx_flow(lift_tau(G), N);
}

// max coefficient of degree ≤ N in ∂_τ F^τ - G^τ(F^τ(Z)Z)F^τ(Z)
inline double flow_residual(const PluriMap<TauSeries>& G, const PluriMap<TauSeries>& F, int N) {
    const PluriMap<TauSeries> R = compose(G, F, N);
    OpPoly<TauSeries> dF(F.box);
    for (size_t i = 0; i < F.nonlinear.e.size(); ++i) dF.e[i] = F.nonlinear.e[i].map_coeffs(tau_derivative);
    return (dF - R.nonlinear).max_abs(0, N);
}

// forms

using TwoForm = OpPoly<Complex>;
using OneForm = VecPoly<Complex>;  // θ(U)[V] = ⟨X(U), V⟩_r

// E_c with blocks (0, -i; i, 0)
inline TwoForm symplectic_constant(Box b) {
    TwoForm E(b);
    for (int i = 0; i < b.size(); ++i) {
        const Slot s = b.slot(i);
        E.at(i, b.id({-s.mode, -s.sign})) = Poly<Complex>::constant(Complex(0.0, -double(s.sign)));
    }
    return E;
}

template <class C>
double antisymmetry_defect(const OpPoly<C>& E) {
    return (E + transpose(E)).max_abs();
}

// dφ^T E(φ(U)) dφ, truncated at degree N
inline TwoForm pullback2(const PluriMap<Complex>& phi, const TwoForm& Lambda, int N) {
    const VecPoly<Complex> Phi = phi.as_field();
    const OpPoly<Complex> dphi = differential(Phi).truncated(N);
    const OpPoly<Complex> Ephi = substitute(Lambda, Phi, N);
    return matmul(transpose(dphi), matmul(Ephi, dphi, N), N);
}

// dφ^T X(φ(U)), truncated at vector degree N + 1
inline OneForm pullback1(const PluriMap<Complex>& phi, const OneForm& theta, int N) {
    const VecPoly<Complex> Phi = phi.as_field();
    const OpPoly<Complex> dphi = differential(Phi).truncated(N);
    return apply_op(transpose(dphi), substitute(theta, Phi, N + 1), N + 1);
}

inline OneForm exterior_d(const Poly<Complex>& f, const Box& b) {
    return gradient(PolyHamiltonian(b, f));
}

inline TwoForm exterior_d(const OneForm& theta) {
    const OpPoly<Complex> dX = differential(theta);
    return dX - transpose(dX);
}

// coefficient of V1_a V2_b in Λ[V1, V2] = ⟨E V1, V2⟩_r
inline const Poly<Complex>& bilinear_entry(const TwoForm& E, int a, int b) {
    return E.at(E.box.paired(b), a);
}

// dΛ[V1,V2,V3] with (a,b,c) the slots of V1, V2, V3
inline Poly<Complex> exterior_d_entry(const TwoForm& E, int a, int b, int c) {
    const Box& bx = E.box;
    return bilinear_entry(E, b, c).derivative(bx.slot(a)) - bilinear_entry(E, a, c).derivative(bx.slot(b)) +
           bilinear_entry(E, a, b).derivative(bx.slot(c));
}

// largest coefficient of the 3-form dΛ
inline double exterior_d_norm(const TwoForm& E) {
    const int D = E.dim();
    double m = 0;
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b)
            for (int c = 0; c < D; ++c) m = std::max(m, exterior_d_entry(E, a, b, c).max_abs());
    return m;
}

// i_X Λ = Λ[X, ·], represented by E X
inline OneForm interior(const VecPoly<Complex>& X, const TwoForm& E, int maxdeg = 1 << 20) {
    return apply_op(E, X, maxdeg);
}

// i_X dΛ as a 2-form
inline TwoForm interior_d(const VecPoly<Complex>& X, const TwoForm& E, int maxdeg = 1 << 20) {
    const Box& bx = E.box;
    const int D = E.dim();
    TwoForm R(bx);
    for (int b = 0; b < D; ++b)
        for (int c = 0; c < D; ++c) {
            Poly<Complex> acc;
            for (int a = 0; a < D; ++a) {
                if (X.comp[a].empty()) continue;
                acc += multiply(X.comp[a], exterior_d_entry(E, a, b, c), maxdeg);
            }
            R.at(bx.paired(c), b) = acc;
        }
    return R;
}

// L_X Λ = dX^T E + E dX + dE[X]
inline TwoForm lie_derivative(const VecPoly<Complex>& X, const TwoForm& E, int maxdeg = 1 << 20) {
    const OpPoly<Complex> dX = differential(X);
    TwoForm R = matmul(transpose(dX), E, maxdeg) + matmul(E, dX, maxdeg);
    for (size_t i = 0; i < E.e.size(); ++i)
        for (int m = 0; m < E.dim(); ++m)
            if (!X.comp[m].empty()) R.e[i] += multiply(E.e[i].derivative(E.box.slot(m)), X.comp[m], maxdeg);
    return R;
}

struct SymplecticReport {
    bool ok = false;
    double residual = 0;  // max coefficient of degree ≤ N in dD^T E_c dD - E_c
    double tail = 0;      // max coefficient of degree > N
};

inline SymplecticReport symplectic_up_to_N(const PluriMap<Complex>& D, int N, double tol = 1e-9) {
    if (!D.has_identity()) throw std::invalid_argument("symplectic check needs an identity linear part");
    const TwoForm Ec = symplectic_constant(D.box);
    const VecPoly<Complex> Phi = D.as_field();
    const OpPoly<Complex> dD = differential(Phi);
    const TwoForm P = matmul(transpose(dD), matmul(Ec, dD)) - Ec;
    SymplecticReport r;
    r.residual = P.max_abs(0, N);
    r.tail = P.max_abs(N + 1, 1 << 20);
    r.ok = r.residual < tol;
    return r;
}

}  // namespace bnf
