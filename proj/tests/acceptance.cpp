// Acceptance suite: one PASS/FAIL line per criterion, with its runtime budget.

#include <boost/math/tools/roots.hpp>
#include <bnf/darboux.hpp>
#include <bnf/drift.hpp>

#include "dn_oracle.hpp"
#include "lie_oracle.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace bnf;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = t < budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s %2d. %s: %s [%.2f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                o.detail.c_str(), t, budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// ---- 1 -------------------------------------------------------------------

Outcome dispersion_identities() {
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<std::array<double, 4>> grid = {
        {1, 1, 0, inf},     {1, 0.5, 1, inf},  {9.81, 0.07, 0.3, inf}, {1, 2, -1.5, inf}, {0.5, 1.3, 2, inf},
        {1, 1, 0, 1},       {2, 0.3, 1, 0.5},  {9.81, 0.07, 1.3, 0.2}, {1, 1.7, -2, 3},   {0.3, 4, 0.7, 10},
    };
    double worst = 0;
    for (const auto& [g, k, gam, h] : grid) {
        const MediumParams p = std::isinf(h) ? MediumParams::deep(g, k, gam) : MediumParams::finite(g, k, gam, h);
        for (int j = -64; j <= 64; ++j) {
            if (!j) continue;
            const double m = msym(p, j), w = omega(p, j);
            const double lhs1 = m * (g + k * j * j + 0.25 * gam * gam * gsym(p, j) / (double(j) * j)) * m;
            const double lhs2 = gsym(p, j) / (m * m);
            worst = std::max({worst, std::abs(lhs1 - w) / w, std::abs(lhs2 - w) / w});
        }
    }
    return {worst < 1e-12, "max relative residual " + sci(worst) + " over 10 parameter sets, |j| ≤ 64"};
}

// ---- 2 -------------------------------------------------------------------

Outcome eight_wave() {
    double worst = 0;
    for (double gam : {0.0, 1.0, 2.0}) {
        const auto p = MediumParams::deep(1, 1.37, gam);
        std::vector<double> d(21);
        for (int n = 1; n <= 20; ++n) d[n] = Omega(p, n) - Omega(p, -n);
        for (int a = 1; a <= 20; ++a)
            for (int b = 1; b <= 20; ++b)
                for (int c = 1; c <= 20; ++c)
                    for (int e = 1; e <= 20; ++e) worst = std::max(worst, std::abs(d[a] + d[b] - d[c] - d[e]));
    }
    return {worst < 1e-14, "max |residual| " + sci(worst) + " over 3·20⁴ quadruples"};
}

// ---- 3 -------------------------------------------------------------------

Outcome sap_combinatorics() {
    // exponents over the 16 slots of modes -4..4, enumerated directly
    const int J = 4, D = 4 * J;
    auto mode_of = [&](int i) {
        const int pos = i / 2;
        return pos < J ? pos - J : pos - J + 1;
    };
    long checked = 0, sap4 = 0, mismatches = 0, non_integrable = 0;
    std::vector<int> e(D, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == D) {
            std::vector<Slot> s;
            for (int k = 0; k < D; ++k)
                for (int r = 0; r < e[k]; ++r) s.push_back({mode_of(k), k % 2 == 0 ? 1 : -1});
            if (s.empty()) return;
            const MultiIndex m = MultiIndex::from_monomial(s);
            bool def = true;
            for (int n = 1; n <= J; ++n) {
                int net = 0;
                for (int k = 0; k < D; ++k)
                    if (std::abs(mode_of(k)) == n) net += (k % 2 == 0 ? 1 : -1) * e[k];
                def = def && net == 0;
            }
            ++checked;
            mismatches += is_sap(m) != def;
            if (def && s.size() == 4 && m.momentum() == 0) {
                ++sap4;
                for (const auto& en : m.entries()) non_integrable += en.alpha != en.beta ? 1 : 0;
            }
            return;
        }
        for (int v = 0; v <= left; ++v) {
            e[i] = v;
            rec(i + 1, left - v);
        }
        e[i] = 0;
    };
    rec(0, 4);
    return {mismatches == 0 && non_integrable == 0 && sap4 > 0,
            std::to_string(checked) + " indices, " + std::to_string(mismatches) + " mismatches; " +
                std::to_string(sap4) + " SAP quartic momentum-zero indices, " + std::to_string(non_integrable) +
                " not of the form Π|z_j|²"};
}

// ---- 4 -------------------------------------------------------------------

Outcome resonance_scanner() {
    const int M = 3, J = 20, n = 2000;
    const double tau = 6;
    const auto base = MediumParams::deep(1, 1, 1);
    std::vector<double> kappas(n);
    for (int i = 0; i < n; ++i) kappas[i] = 1.0 + double(i) / (n - 1);
    const auto certs = scan(base, kappas, M, J, tau);
    int positive = 0;
    for (const auto& c : certs) positive += c.nu > 0;
    const double frac = double(positive) / n;

    // independent bracketing of every non-SAP divisor on the same grid
    const auto packed = detail::pack_non_sap(M, J, tau);
    int brackets = 0, flagged = 0;
    double worst_at_root = 0;
    for (const auto& pk : packed) {
        auto f = [&](double k) {
            MediumParams p = base;
            p.kappa = k;
            double d = 0;
            for (const auto& e : pk.index.entries()) d += (e.alpha - e.beta) * Omega(p, e.mode);
            return d;
        };
        double prev = f(kappas[0]);
        for (int i = 1; i < n; ++i) {
            const double cur = f(kappas[i]);
            if (prev != 0 && cur != 0 && (prev < 0) != (cur < 0)) {
                ++brackets;
                boost::uintmax_t it = 200;
                auto [a, b] = boost::math::tools::toms748_solve(f, kappas[i - 1], kappas[i], prev, cur,
                                                                 boost::math::tools::eps_tolerance<double>(53), it);
                const double root = std::abs(f(a)) < std::abs(f(b)) ? a : b;
                MediumParams p = base;
                p.kappa = root;
                const Certificate c = detail::certify_packed(p, packed, M, J, tau);
                worst_at_root = std::max(worst_at_root, std::abs(c.worst.divisor));
                flagged += std::abs(c.worst.divisor) < 1e-10 && c.nu == 0;
            }
            prev = cur;
        }
    }
    return {frac >= 0.99 && flagged == brackets,
            "nu > 0 on " + sci(100 * frac) + "% of 2000 points; " + std::to_string(brackets) +
                " bracketed resonances, " + std::to_string(flagged) + " flagged (max |divisor| at root " +
                sci(worst_at_root) + ")"};
}

// ---- 5 -------------------------------------------------------------------

Outcome certificate_functions() {
    // lower bound from |x_a| ≥ x_0 and |x_a² - x_b²| ≥ x_0²; upper bound with constant 1 since every
    // factor except x_0 has modulus ≤ 1
    long checked = 0, violations = 0;
    std::vector<int> nv;
    std::function<void(int, int, int)> rec = [&](int A, int next, int sum) {
        if (int(nv.size()) == A) {
            const auto x = cert_x(nv);
            const double r = std::abs(cert_rho(x)), S = sum;
            const double lo = std::pow(S, -cert_tau1(A)), hi = 1.0 / S;
            ++checked;
            violations += !(r >= lo * (1 - 1e-12) && r <= hi);
            return;
        }
        for (int v = next; sum + v <= 50; ++v) {
            nv.push_back(v);
            rec(A, v + 1, sum + v);
            nv.pop_back();
        }
    };
    for (int A = 1; A <= 3; ++A) rec(A, 1, 0);
    const bool tau_ok = cert_tau1(1) == 2 && cert_tau1(2) == 5 && cert_tau1(3) == 10;

    const auto p = MediumParams::deep(1, 1, 1);
    std::vector<CertFamily> fam{{{1, 1, 1, -1}, {1, 2, 3}}, {{0, 2, -1}, {1, 2}}, {{1, 1, -1}, {2, 5}},
                                {{-1, 1, 1, -1}, {1, 3, 4}}, {{0, 1, 1, -1}, {2, 3, 5}}};
    std::vector<double> meas;
    for (double a : {1e-1, 1e-2, 1e-3, 1e-4}) meas.push_back(badset_measure(p, 0.1, 3.0, a, 1, fam, 20000));
    bool mono = true;
    for (size_t i = 1; i < meas.size(); ++i) mono = mono && meas[i] <= meas[i - 1];
    return {violations == 0 && tau_ok && mono,
            std::to_string(checked) + " vectors n, " + std::to_string(violations) +
                " outside the bound; bad-set measures " + sci(meas[0]) + ", " + sci(meas[1]) + ", " +
                sci(meas[2]) + ", " + sci(meas[3])};
}

// ---- 6 -------------------------------------------------------------------

Outcome plurimap_algebra() {
    Rng rng(2024);
    double inv_res = 0, flow_res = 0, lowest = 0;
    for (int i = 0; i < 20; ++i) {
        const Box b{2 + i % 2};
        const int p = 1 + (i / 2) % 2;
        const int N = p + (i / 4) % (4 - p);
        OpPoly<Complex> M(b);
        for (int d = p; d <= N; ++d) M += random_operator(b, d, rng, 0.4);
        const auto Psi = PluriMap<Complex>::id_plus(M);
        const auto Phi = approx_inverse(Psi, N);
        inv_res = std::max({inv_res, compose(Psi, Phi, N).nonlinear.max_abs(), compose(Phi, Psi, N).nonlinear.max_abs()});
        lowest = std::max(lowest, (Phi.piece(p) + Psi.piece(p)).max_abs());

        const auto G = PluriMap<Complex>::sigma_only(M);
        const auto Gt = lift_tau(G);
        const auto F = approx_flow_family(Gt, N);
        flow_res = std::max(flow_res, flow_residual(Gt, F, N));
        lowest = std::max(lowest, (at_tau(F, 1.0).piece(p) - G.piece(p)).max_abs());
    }
    return {inv_res < 1e-10 && flow_res < 1e-10 && lowest < 1e-12,
            "inverse residual " + sci(inv_res) + ", flow residual " + sci(flow_res) + ", lowest-order identities " +
                sci(lowest) + " on 20 instances"};
}

// ---- 7 -------------------------------------------------------------------

Outcome darboux_corrector() {
    Rng rng(77);
    double worst = 0, weakest_input = 1e300, corr = 0;
    int ok = 0;
    for (int i = 0; i < 10; ++i) {
        const Box b{2 + i % 2};
        DarbouxProblem P{PluriMap<Complex>::id_plus(random_linearly_symplectic(b, rng)), 2};
        weakest_input = std::min(weakest_input, symplectic_up_to_N(P.B, 2).residual);
        const auto s = corrector(P);
        worst = std::max(worst, s.report.residual);
        ok += s.report.ok && s.report.residual < 1e-9;
    }
    for (int i = 0; i < 4; ++i) {
        const Box b{2 + i % 2};
        const auto H = random_hamiltonian(b, 3, rng, 0.5) + random_hamiltonian(b, 4, rng, 0.4);
        const auto F = approx_flow(PluriMap<Complex>::sigma_only(operator_form(ham_field(H))), 2);
        corr = std::max(corr, corrector({F, 2}).R.nonlinear.max_abs());
    }
    return {ok == 10 && weakest_input > 1e-6 && corr < 1e-9,
            std::to_string(ok) + "/10 corrected (max residual " + sci(worst) + ", inputs off by ≥ " +
                sci(weakest_input) + "); corrector norm on symplectic inputs " + sci(corr)};
}

// ---- 8 -------------------------------------------------------------------

Outcome birkhoff_engine() {
    Rng rng(3);
    const auto p = MediumParams::deep(1, 1.37, 0.6);
    const Box b2{2};
    const auto toy = PolyHamiltonian::quadratic(p, b2) + random_hamiltonian(b2, 3, rng, 1.0, 0.5) +
                     random_hamiltonian(b2, 4, rng, 1.0, 0.5);
    const double omega4[4] = {Omega(p, -2), Omega(p, -1), Omega(p, 1), Omega(p, 2)};
    const double toy_err = lie_oracle::dense_diff(lie_oracle::to_dense(normal_form(toy, 2).H),
                                                  lie_oracle::oracle_normal_form(lie_oracle::to_dense(toy), omega4, 2));

    const auto q = MediumParams::deep(1, 1.37, 1.0);
    const Certificate cert = certify(q, 4, 4, 6.0);
    const auto r = normal_form(build_model(q, 4).hamiltonian, 2);
    const SapReport s = verify_sap(r);
    return {toy_err < 1e-10 && cert.nu > 0 && s.max_non_sap < 1e-10 && s.max_bracket < 1e-10,
            "toy vs dense oracle " + sci(toy_err) + "; water waves J=4 N=2 (kappa 1.37, nu " + sci(cert.nu) +
                "): non-SAP " + sci(s.max_non_sap) + ", {J_n, H} " + sci(s.max_bracket)};
}

// ---- 9 -------------------------------------------------------------------

Outcome gradient_check() {
    const auto p = MediumParams::deep(1, 1.37, 1.0);
    const auto H = build_model(p, 4).hamiltonian;
    Rng rng(9);
    const State Z = random_state(H.box(), rng, 0.3);
    const SlotVector X = evaluate(ham_field(H), Z.slots());
    const double h = 1e-6;
    double num = 0, den = 0;
    for (int k = 0; k < H.box().modes(); ++k) {
        auto shifted = [&](Complex d) {
            State Y = Z;
            Y.z[k] += d;
            return evaluate(H, Y);
        };
        // X_(j,+) = -i ∂H/∂z̄_j, ∂_z̄ = (∂_x + i∂_y)/2
        const double dx = (shifted(h) - shifted(-h)) / (2 * h);
        const double dy = (shifted(Complex(0, h)) - shifted(Complex(0, -h))) / (2 * h);
        const Complex fd = Complex(0, -0.5) * Complex(dx, dy);
        const Complex an = X[H.box().id({H.box().mode_at(k), 1})];
        num = std::max(num, std::abs(fd - an));
        den = std::max(den, std::abs(an));
    }
    return {num / den < 1e-6, "relative error " + sci(num / den) + " over " + std::to_string(H.size()) + " terms"};
}

// ---- 10 ------------------------------------------------------------------

Coeffs random_real(int J, Rng& rng, double amp) {
    Coeffs c;
    for (int j = 1; j <= J; ++j) {
        const Complex v = random_complex(rng, amp);
        c[j] = v;
        c[-j] = std::conj(v);
    }
    return c;
}

Outcome dn_oracle() {
    const auto p = MediumParams::finite(1, 1, 0, 1.0);
    oracle::Strip S(1.0, 256, 128);
    Rng rng(10);
    double worst = 0;
    for (int trial = 0; trial < 4; ++trial) {
        const Coeffs eta = random_real(4, rng, 0.2), psi = random_real(4, rng, 1.0);
        const Complex d1 = integral_pairing(psi, dn_expand(eta, psi, 1, p, 4).orders[1]);
        const double q1 = oracle::dn_quadratic_forms(S, eta, psi).first;
        worst = std::max(worst, std::abs(d1 - q1) / std::abs(q1));
    }
    return {worst < 1e-4, "max relative error " + sci(worst) + " on 4 random (eta, psi) at J=4"};
}

// ---- 11 ------------------------------------------------------------------

Outcome integrator() {
    const auto p = MediumParams::deep(1, 1.37, 1.0);
    const auto H = build_model(p, 4).hamiltonian;
    IntegratorOptions opt;
    const Midpoint mp(H, opt);
    const double dt = 0.25 / mp.max_frequency();
    const double eps = 0.05;
    const State Z0 = drift_initial_state(H.box(), 5, eps);
    const double e1 = energy_drift(mp.integrate(Z0, dt, 10.0));
    const double e2 = energy_drift(mp.integrate(Z0, 0.5 * dt, 10.0));
    const auto log = mp.integrate(Z0, dt, 20.0);
    const double mom = momentum_drift(log);
    const auto back = mp.run(log.z.back(), -dt, long(log.size()) - 1);
    double rev = 0;
    for (size_t k = 0; k < back.size(); ++k) rev = std::max(rev, std::abs(back[k] - Z0.z[k]));
    const double ratio = e1 / e2;
    return {std::abs(ratio - 4) <= 1.0 && mom < 1e-10 && rev <= 10 * opt.tol * eps,
            "dt-halving energy ratio " + sci(ratio) + ", momentum drift " + sci(mom) + ", reversibility " +
                sci(rev / eps) + " relative (inner tolerance " + sci(opt.tol) + ")"};
}

// ---- 12 ------------------------------------------------------------------

Outcome drift_scaling() {
    const auto p = MediumParams::deep(1, 1.37, 1.0);
    const TruncatedModel m = build_model(p, 4);
    const DriftReport r = drift_experiment(m, 1, 1e-2);
    const double pre = r.ratio_pre(), post = r.ratio_post();
    return {pre >= 5.6 && pre <= 10.4 && post >= 11.2 && post <= 20.8,
            "pre-normal-form ratio " + sci(pre) + " (target 8), after N=1 " + sci(post) + " (target 16); T = " +
                sci(r.horizon) + ", dt = " + sci(r.dt)};
}

}  // namespace

int main() {
    criterion(1, "dispersion identities", 1, dispersion_identities);
    criterion(2, "8-wave identity", 1, eight_wave);
    criterion(3, "SAP combinatorics", 10, sap_combinatorics);
    criterion(4, "resonance scanner", 120, resonance_scanner);
    criterion(5, "certificate functions", 60, certificate_functions);
    criterion(6, "pluri-map algebra", 30, plurimap_algebra);
    criterion(7, "Darboux corrector", 60, darboux_corrector);
    criterion(8, "Birkhoff engine", 120, birkhoff_engine);
    criterion(9, "gradient checks", 30, gradient_check);
    criterion(10, "DN oracle", 60, dn_oracle);
    criterion(11, "integrator", 60, integrator);
    criterion(12, "super-action drift scaling", 300, drift_scaling);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures ? 1 : 0;
}
