#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "medium.hpp"
#include "multi_index.hpp"

namespace bnf {

// divisors below this are exact resonances
inline constexpr double exact_zero_divisor = 1e-12;

inline double small_divisor(const MediumParams& p, const MultiIndex& idx) {
    double d = 0;
    for (const auto& e : idx.entries())
        if (e.alpha != e.beta) d += (e.alpha - e.beta) * Omega(p, e.mode);
    return d;
}

struct DivisorRecord {
    MultiIndex index;
    double divisor = 0;
    bool sap = false;
    double kappa = 0;
};

struct Certificate {
    double kappa = 0;
    int maxdeg = 0;
    int box = 0;
    double tau = 0;
    double nu = 0;
    DivisorRecord worst;
};

// every nonempty index with |α+β| ≤ M over the box, sorted; M = 0 gives the empty index
inline std::vector<MultiIndex> enumerate(int M, int J, bool momentum_zero) {
    Box box{J};
    const int D = box.size();
    std::vector<MultiIndex> out;
    MultiIndex cur;
    std::function<void(int, int)> rec = [&](int id, int left) {
        if (id == D) {
            if ((M == 0 || !cur.empty()) && (!momentum_zero || cur.momentum() == 0)) out.push_back(cur);
            return;
        }
        const Slot s = box.slot(id);
        MultiIndex saved = cur;
        for (int e = 0; e <= left; ++e) {
            rec(id + 1, left - e);
            cur.multiply(s);
        }
        cur = saved;
    };
    if (M >= 0) rec(0, M);
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

struct PackedIndex {
    MultiIndex index;
    std::vector<std::pair<int, int>> weights;  // (mode, α_k - β_k), nonzero only
    double scale;                              // maxmode^τ
};

inline std::vector<PackedIndex> pack_non_sap(int M, int J, double tau) {
    std::vector<PackedIndex> out;
    for (auto& m : enumerate(M, J, true)) {
        if (m.empty() || m.is_sap()) continue;
        PackedIndex p{m, {}, std::pow(double(m.maxmode()), tau)};
        for (const auto& e : m.entries())
            if (e.alpha != e.beta) p.weights.push_back({e.mode, e.alpha - e.beta});
        out.push_back(std::move(p));
    }
    return out;
}

inline Certificate certify_packed(const MediumParams& p, const std::vector<PackedIndex>& packed, int M,
                                  int J, double tau) {
    std::vector<double> Om(2 * J + 1);
    for (int j = -J; j <= J; ++j)
        if (j) Om[j + J] = Omega(p, j);
    Certificate c{p.kappa, M, J, tau, std::numeric_limits<double>::infinity(), {}};
    for (const auto& pk : packed) {
        double d = 0;
        for (const auto& [j, w] : pk.weights) d += w * Om[j + J];
        const double v = (std::abs(d) < exact_zero_divisor ? 0.0 : std::abs(d)) * pk.scale;
        if (v < c.nu) {
            c.nu = v;
            c.worst = {pk.index, d, false, p.kappa};
        }
    }
    return c;
}

}  // namespace detail

inline Certificate certify(const MediumParams& p, int M, int J, double tau) {
    return detail::certify_packed(p, detail::pack_non_sap(M, J, tau), M, J, tau);
}

inline std::vector<Certificate> scan(const MediumParams& base, const std::vector<double>& kappas, int M,
                                     int J, double tau) {
    if (kappas.empty()) throw std::invalid_argument("empty kappa grid");
    const auto packed = detail::pack_non_sap(M, J, tau);
    std::vector<Certificate> out;
    out.reserve(kappas.size());
    for (double k : kappas) {
        MediumParams p = base;
        p.kappa = k;
        out.push_back(detail::certify_packed(p, packed, M, J, tau));
    }
    return out;
}

// certificate functions for the measure argument

// x_0 = 1/Σn, x_a = x_0 √n_a
inline std::vector<double> cert_x(const std::vector<int>& n, int extra_sum = 0) {
    double s = extra_sum;
    for (int v : n) s += v;
    std::vector<double> x{1.0 / s};
    for (int v : n) x.push_back(x[0] * std::sqrt(double(v)));
    return x;
}

inline std::vector<double> cert_t(const std::vector<int>& n, double h) {
    std::vector<double> t;
    for (int v : n) t.push_back(std::sqrt(std::tanh(h * v)));
    return t;
}

inline double cert_lambda(const MediumParams& p, double y, double s, double x0, double kappa) {
    const double x04 = x0 * x0 * x0 * x0;
    const double r = kappa * std::pow(y, 6) + p.g * y * y * x04 + 0.25 * p.gamma * p.gamma * s * s * x04 * x0 * x0;
    if (r < 0) throw std::domain_error("negative radicand in certificate function");
    return std::sqrt(r);
}

// c = (c_0, ..., c_A), x = (x_0, ..., x_A)
inline double cert_f(const std::vector<int>& c, const std::vector<double>& x, double kappa,
                     const MediumParams& p) {
    if (c.size() != x.size() || x.empty()) throw std::invalid_argument("cert_f: size mismatch");
    double f = 0.5 * p.gamma * c[0] * x[0] * x[0] * x[0];
    for (size_t a = 1; a < c.size(); ++a) f += c[a] * cert_lambda(p, x[a], 1.0, x[0], kappa);
    return f;
}

// finite depth: c = (c_1..c_A), d = (d_1..d_B), x = (x_0..x_A), t = (t_1..t_{A+B})
inline double cert_f(const std::vector<int>& c, const std::vector<int>& d, const std::vector<double>& x,
                     const std::vector<double>& t, double kappa, const MediumParams& p) {
    if (x.size() != c.size() + 1 || t.size() != c.size() + d.size())
        throw std::invalid_argument("cert_f: size mismatch");
    const double x03 = x[0] * x[0] * x[0];
    double f = 0;
    for (size_t a = 0; a < c.size(); ++a) f += c[a] * t[a] * cert_lambda(p, x[a + 1], t[a], x[0], kappa);
    for (size_t b = 0; b < d.size(); ++b) {
        const double tb = t[c.size() + b];
        f += 0.5 * p.gamma * d[b] * tb * tb * x03;
    }
    return f;
}

inline double cert_rho(const std::vector<double>& x) {
    double r = 1;
    for (double v : x) r *= v;
    for (size_t a = 1; a < x.size(); ++a)
        for (size_t b = a + 1; b < x.size(); ++b) r *= x[a] * x[a] - x[b] * x[b];
    return r;
}

inline double cert_rho(const std::vector<double>& x, const std::vector<double>& t, const MediumParams& p) {
    const double x0 = x[0];
    const double x04 = std::pow(x0, 4), x06 = std::pow(x0, 6);
    const double gg = 0.25 * p.gamma * p.gamma;
    double r = x0;
    const size_t A = x.size() - 1;
    for (size_t a = 1; a <= A; ++a) r *= x[a] * t[a - 1];
    for (size_t a = 1; a <= A; ++a)
        for (size_t b = a + 1; b <= A; ++b) {
            const double la = p.g * x[a] * x[a] * x04 + gg * t[a - 1] * t[a - 1] * x06;
            const double lb = p.g * x[b] * x[b] * x04 + gg * t[b - 1] * t[b - 1] * x06;
            r *= la * std::pow(x[b], 6) - lb * std::pow(x[a], 6);
        }
    return r;
}

inline int cert_tau1(int A) { return A + 1 + A * (A - 1); }

struct CertFamily {
    std::vector<int> c;  // (c_0, ..., c_A)
    std::vector<int> n;  // 1 ≤ n_1 < ... < n_A
};

// grid estimate of meas{κ ∈ [lo, hi] : some family has |f_c(x(n),κ)| ≤ α|ρ(x(n))|^N}
inline double badset_measure(const MediumParams& p, double lo, double hi, double alpha, int N,
                             const std::vector<CertFamily>& families, int grid = 20000) {
    if (!(hi > lo) || !(lo > 0)) throw std::invalid_argument("bad kappa interval");
    std::vector<std::vector<double>> xs;
    std::vector<double> bounds;
    for (const auto& f : families) {
        xs.push_back(cert_x(f.n));
        bounds.push_back(alpha * std::pow(std::abs(cert_rho(xs.back())), N));
    }
    int bad = 0;
    for (int i = 0; i < grid; ++i) {
        const double k = lo + (hi - lo) * (i + 0.5) / grid;
        for (size_t q = 0; q < families.size(); ++q)
            if (std::abs(cert_f(families[q].c, xs[q], k, p)) <= bounds[q]) {
                ++bad;
                break;
            }
    }
    return (hi - lo) * double(bad) / grid;
}

}  // namespace bnf
