#pragma once

#include <random>

#include "plurimap.hpp"
#include "resonance.hpp"

namespace bnf {

using Rng = std::mt19937_64;

inline Complex random_complex(Rng& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double re = u(rng);
    const double im = u(rng);
    return scale * Complex(re, im);
}

inline State random_state(Box box, Rng& rng, double amplitude) {
    State z(box);
    for (auto& v : z.z) v = random_complex(rng, amplitude);
    return z;
}

inline std::vector<MultiIndex> indices_of_degree(int degree, int J, bool momentum_zero) {
    std::vector<MultiIndex> out;
    for (auto& m : enumerate(degree, J, momentum_zero))
        if (m.length() == degree) out.push_back(m);
    return out;
}

// real, momentum-zero, homogeneous of the given degree
inline PolyHamiltonian random_hamiltonian(Box box, int degree, Rng& rng, double density = 1.0,
                                          double scale = 1.0) {
    std::bernoulli_distribution keep(density);
    PolyHamiltonian H(box);
    for (const auto& m : indices_of_degree(degree, box.J, true)) {
        const MultiIndex c = m.conj();
        if (c < m || !keep(rng)) continue;
        Complex v = random_complex(rng, scale);
        if (c == m) v = v.real();
        H.add(m, v);
        if (!(c == m)) H.add(c, std::conj(v));
    }
    return H;
}

// conj(M_(o,l)(m)) moved to (ō, l̄, m̄)
template <class C>
OpPoly<C> reality_conjugate(const OpPoly<C>& M) {
    const Box& b = M.box;
    OpPoly<C> R(b);
    for (int o = 0; o < b.size(); ++o)
        for (int l = 0; l < b.size(); ++l)
            for (const auto& [m, c] : M.at(o, l)) R.at(b.conj(o), b.conj(l)).add(m.conj(), conj_coeff(c));
    return R;
}

template <class C>
double reality_defect(const OpPoly<C>& M) {
    return (M - reality_conjugate(M)).max_abs();
}

// largest violation of σk = σ⃗·j⃗ + σ'j
template <class C>
int momentum_defect(const OpPoly<C>& M) {
    const Box& b = M.box;
    int d = 0;
    for (int o = 0; o < b.size(); ++o)
        for (int l = 0; l < b.size(); ++l) {
            const Slot so = b.slot(o), sl = b.slot(l);
            for (const auto& [m, c] : M.at(o, l))
                d = std::max(d, std::abs(so.sign * so.mode - m.momentum() - sl.sign * sl.mode));
        }
    return d;
}

// real-to-real, momentum-conserving homogeneous operator of degree p
inline OpPoly<Complex> random_operator(Box box, int p, Rng& rng, double density = 1.0, double scale = 1.0) {
    std::bernoulli_distribution keep(density);
    const auto all = indices_of_degree(p, box.J, false);
    OpPoly<Complex> M(box);
    for (int o = 0; o < box.size(); ++o)
        for (int l = 0; l < box.size(); ++l) {
            const Slot so = box.slot(o), sl = box.slot(l);
            const int need = so.sign * so.mode - sl.sign * sl.mode;
            for (const auto& m : all)
                if (m.momentum() == need && keep(rng)) M.at(o, l).add(m, random_complex(rng, scale));
        }
    OpPoly<Complex> R = M + reality_conjugate(M);
    R *= 0.5;
    return R;
}

// B - Id = E_c S + ½(E_c S)² with S symmetric of degree 1: linearly symplectic up to degree 2
inline OpPoly<Complex> random_linearly_symplectic(Box box, Rng& rng, double density = 0.5, double scale = 1.0) {
    const OpPoly<Complex> Ec = symplectic_constant(box);
    OpPoly<Complex> S = random_operator(box, 1, rng, density, scale);
    S = S + transpose(S);
    S *= 0.5;
    const OpPoly<Complex> M = matmul(Ec, S);
    OpPoly<Complex> M2 = matmul(M, M);
    M2 *= 0.5;
    return M + M2;
}

}  // namespace bnf
