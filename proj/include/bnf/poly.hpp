#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "multi_index.hpp"

namespace bnf {

using Complex = std::complex<double>;
using SlotVector = std::vector<Complex>;  // indexed by Box::id

inline double magnitude(const Complex& c) { return std::abs(c); }
inline bool is_zero(const Complex& c) { return c.real() == 0.0 && c.imag() == 0.0; }
inline Complex conj_coeff(const Complex& c) { return std::conj(c); }

// polynomial in an auxiliary time τ, coefficients of τ^0, τ^1, ...
class TauSeries {
public:
    TauSeries() = default;
    TauSeries(Complex c) {
        if (!is_zero(c)) c_.push_back(c);
    }
    static TauSeries monomial(Complex c, int power) {
        TauSeries t;
        if (is_zero(c)) return t;
        t.c_.assign(power + 1, Complex{});
        t.c_[power] = c;
        return t;
    }

    const std::vector<Complex>& coeffs() const { return c_; }
    int order() const { return static_cast<int>(c_.size()) - 1; }
    Complex operator[](int k) const { return k < static_cast<int>(c_.size()) ? c_[k] : Complex{}; }

    TauSeries& operator+=(const TauSeries& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    TauSeries& operator-=(const TauSeries& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    TauSeries& operator*=(Complex s) {
        for (auto& x : c_) x *= s;
        trim();
        return *this;
    }
    friend TauSeries operator+(TauSeries a, const TauSeries& b) { return a += b; }
    friend TauSeries operator-(TauSeries a, const TauSeries& b) { return a -= b; }
    friend TauSeries operator*(TauSeries a, Complex s) { return a *= s; }
    friend TauSeries operator*(Complex s, TauSeries a) { return a *= s; }
    friend TauSeries operator*(const TauSeries& a, const TauSeries& b) {
        TauSeries r;
        if (a.c_.empty() || b.c_.empty()) return r;
        r.c_.assign(a.c_.size() + b.c_.size() - 1, Complex{});
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t k = 0; k < b.c_.size(); ++k) r.c_[i + k] += a.c_[i] * b.c_[k];
        r.trim();
        return r;
    }
    TauSeries operator-() const {
        TauSeries r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    // ∫_0^τ
    TauSeries integral() const {
        TauSeries r;
        if (c_.empty()) return r;
        r.c_.assign(c_.size() + 1, Complex{});
        for (size_t k = 0; k < c_.size(); ++k) r.c_[k + 1] = c_[k] / double(k + 1);
        return r;
    }

    Complex at(double tau) const {
        Complex s{};
        for (size_t k = c_.size(); k-- > 0;) s = s * tau + c_[k];
        return s;
    }

    bool operator==(const TauSeries&) const = default;

private:
    void trim() {
        while (!c_.empty() && is_zero(c_.back())) c_.pop_back();
    }
    std::vector<Complex> c_;
};

inline double magnitude(const TauSeries& t) {
    double m = 0;
    for (const auto& c : t.coeffs()) m = std::max(m, std::abs(c));
    return m;
}
inline bool is_zero(const TauSeries& t) { return t.coeffs().empty(); }
inline TauSeries conj_coeff(const TauSeries& t) {
    TauSeries r;
    for (int k = 0; k <= t.order(); ++k) r += TauSeries::monomial(std::conj(t[k]), k);
    return r;
}

// sparse polynomial in the slot variables U_(k,σ), keyed by multi-index
template <class C>
class Poly {
public:
    using Map = std::map<MultiIndex, C>;

    Poly() = default;
    static Poly constant(const C& c) {
        Poly p;
        p.add(MultiIndex{}, c);
        return p;
    }
    static Poly variable(Slot s, const C& c) {
        Poly p;
        p.add(MultiIndex{}.times(s), c);
        return p;
    }

    const Map& terms() const { return t_; }
    auto begin() const { return t_.begin(); }
    auto end() const { return t_.end(); }
    size_t size() const { return t_.size(); }
    bool empty() const { return t_.empty(); }

    C coeff(const MultiIndex& m) const {
        auto it = t_.find(m);
        return it == t_.end() ? C{} : it->second;
    }

    void add(const MultiIndex& m, const C& c) {
        if (is_zero(c)) return;
        auto [it, fresh] = t_.try_emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (is_zero(it->second)) t_.erase(it);
        }
    }
    void set(const MultiIndex& m, const C& c) {
        if (is_zero(c)) t_.erase(m);
        else t_[m] = c;
    }

    Poly& operator+=(const Poly& o) {
        for (const auto& [m, c] : o.t_) add(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (const auto& [m, c] : o.t_) add(m, -c);
        return *this;
    }
    Poly& operator*=(Complex s) {
        if (s == Complex{}) {
            t_.clear();
            return *this;
        }
        for (auto& [m, c] : t_) c = c * s;
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, Complex s) { return a *= s; }
    friend Poly operator*(Complex s, Poly a) { return a *= s; }
    Poly operator-() const { return *this * Complex(-1.0); }

    int min_degree() const {
        int d = -1;
        for (const auto& [m, c] : t_) d = d < 0 ? m.length() : std::min(d, m.length());
        return d;
    }
    int max_degree() const {
        int d = -1;
        for (const auto& [m, c] : t_) d = std::max(d, m.length());
        return d;
    }

    Poly part(int degree) const {
        Poly p;
        for (const auto& [m, c] : t_)
            if (m.length() == degree) p.t_.emplace_hint(p.t_.end(), m, c);
        return p;
    }
    Poly parts(int lo, int hi) const {
        Poly p;
        for (const auto& [m, c] : t_)
            if (m.length() >= lo && m.length() <= hi) p.t_.emplace_hint(p.t_.end(), m, c);
        return p;
    }
    Poly truncated(int maxdeg, double* dropped = nullptr) const {
        Poly p;
        for (const auto& [m, c] : t_) {
            if (m.length() <= maxdeg) p.t_.emplace_hint(p.t_.end(), m, c);
            else if (dropped) *dropped = std::max(*dropped, magnitude(c));
        }
        return p;
    }

    // ∂/∂U_s
    Poly derivative(Slot s) const {
        Poly p;
        for (const auto& [m, c] : t_) {
            int e = m.exponent(s);
            if (e == 0) continue;
            p.add(*m.divided(s), c * Complex(double(e)));
        }
        return p;
    }

    // multiply every monomial by U_s
    Poly times_variable(Slot s) const {
        Poly p;
        for (const auto& [m, c] : t_) p.t_.emplace(m.times(s), c);
        return p;
    }

    double max_abs() const {
        double r = 0;
        for (const auto& [m, c] : t_) r = std::max(r, magnitude(c));
        return r;
    }

    void prune(double tol) {
        for (auto it = t_.begin(); it != t_.end();)
            it = magnitude(it->second) <= tol ? t_.erase(it) : std::next(it);
    }

    template <class F>
    auto map_coeffs(F f) const {
        Poly<decltype(f(std::declval<C>()))> p;
        for (const auto& [m, c] : t_) p.add(m, f(c));
        return p;
    }

    bool operator==(const Poly&) const = default;

private:
    Map t_;
};

template <class C>
Poly<C> multiply(const Poly<C>& a, const Poly<C>& b, int maxdeg = 1 << 20, double* dropped = nullptr) {
    Poly<C> r;
    for (const auto& [ma, ca] : a) {
        const int da = ma.length();
        for (const auto& [mb, cb] : b) {
            if (da + mb.length() > maxdeg) {
                if (dropped) *dropped = std::max(*dropped, magnitude(ca * cb));
                continue;
            }
            r.add(ma * mb, ca * cb);
        }
    }
    return r;
}

inline Complex monomial_value(const MultiIndex& m, const SlotVector& U, const Box& box) {
    Complex v(1.0);
    for (const auto& e : m.entries()) {
        if (e.alpha) {
            const Complex x = U[box.id({e.mode, 1})];
            for (int k = 0; k < e.alpha; ++k) v *= x;
        }
        if (e.beta) {
            const Complex x = U[box.id({e.mode, -1})];
            for (int k = 0; k < e.beta; ++k) v *= x;
        }
    }
    return v;
}

inline Complex evaluate(const Poly<Complex>& p, const SlotVector& U, const Box& box) {
    Complex s{};
    for (const auto& [m, c] : p) s += c * monomial_value(m, U, box);
    return s;
}

inline Poly<TauSeries> lift_tau(const Poly<Complex>& p) {
    return p.map_coeffs([](const Complex& c) { return TauSeries(c); });
}
inline Poly<Complex> at_tau(const Poly<TauSeries>& p, double tau) {
    return p.map_coeffs([tau](const TauSeries& c) { return c.at(tau); });
}

}  // namespace bnf
