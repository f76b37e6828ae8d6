#include <gtest/gtest.h>

#include <bnf/random.hpp>

using namespace bnf;

namespace {

MultiIndex mono(std::vector<Slot> s) { return MultiIndex::from_monomial(s); }

double max_rel(const SlotVector& a, const SlotVector& b) {
    double num = 0, den = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / den;
}

// X_(k,+) = -i ∂H/∂z̄_k with ∂_{z̄} = (∂_x + i ∂_y)/2, by central differences
SlotVector fd_field(const PolyHamiltonian& H, const State& Z, double h) {
    const Box& b = Z.box;
    SlotVector X(b.size());
    for (int p = 0; p < b.modes(); ++p) {
        const int j = b.mode_at(p);
        auto shifted = [&](Complex d) {
            State Y = Z;
            Y[j] += d;
            return evaluate(H, Y);
        };
        const double dx = (shifted(h) - shifted(-h)) / (2 * h);
        const double dy = (shifted(Complex(0, h)) - shifted(Complex(0, -h))) / (2 * h);
        const Complex dzbar = 0.5 * Complex(dx, dy);
        X[b.id({j, 1})] = Complex(0, -1) * dzbar;
        X[b.id({j, -1})] = std::conj(X[b.id({j, 1})]);
    }
    return X;
}

}  // namespace

TEST(Evaluate, Examples) {
    Box b{3};
    auto p = MediumParams::deep(1, 1.2, 0.5);
    auto H2 = PolyHamiltonian::quadratic(p, b);
    State Z(b);
    EXPECT_EQ(evaluate(H2, Z), 0.0);
    Z[1] = 1.0;
    EXPECT_NEAR(evaluate(H2, Z), Omega(p, 1), 1e-15);

    PolyHamiltonian H(b);
    const Complex c(0.3, -0.7);
    H.add_real_pair(mono({{1, 1}, {2, 1}, {3, -1}}), c);
    State Y(b);
    Y[1] = {0.2, 0.1};
    Y[2] = {-0.5, 0.4};
    Y[3] = {0.3, 0.9};
    const Complex m = Y[1] * Y[2] * std::conj(Y[3]);
    EXPECT_NEAR(evaluate(H, Y), 2 * (c * m).real(), 1e-15);
}

TEST(Evaluate, ImaginaryResidueRejected) {
    Box b{2};
    PolyHamiltonian H(b);
    H.add(mono({{1, 1}, {-1, 1}}), 1.0);
    State Z(b);
    Z[1] = {0.3, 0.2};
    Z[-1] = {0.1, -0.5};
    EXPECT_THROW(evaluate(H, Z), std::runtime_error);
}

TEST(HamField, DiagonalQuadratic) {
    Box b{4};
    auto p = MediumParams::finite(1, 0.8, 1.1, 1.5);
    auto X = ham_field(PolyHamiltonian::quadratic(p, b));
    for (int j : b.mode_list()) {
        const auto& comp = X[b.id({j, 1})];
        ASSERT_EQ(comp.size(), 1u);
        EXPECT_EQ(comp.coeff(mono({{j, 1}})), Complex(0, -Omega(p, j)));
    }
    EXPECT_EQ(ham_field(PolyHamiltonian(b)).max_abs(), 0.0);
}

TEST(HamField, FiniteDifferences) {
    Rng rng(11);
    Box b{3};
    auto H = random_hamiltonian(b, 4, rng, 0.5) + random_hamiltonian(b, 3, rng, 0.5);
    auto Z = random_state(b, rng, 0.5);
    auto X = evaluate(ham_field(H), Z.slots());
    EXPECT_LT(max_rel(fd_field(H, Z, 1e-6), X), 1e-6);
}

TEST(Gradient, PairingGivesDifferential) {
    Rng rng(5);
    Box b{2};
    auto H = random_hamiltonian(b, 3, rng);
    auto U = random_state(b, rng, 1.0).slots();
    SlotVector V(b.size());
    for (auto& v : V) v = random_complex(rng);
    const double h = 1e-6;
    SlotVector Up = U, Um = U;
    for (int i = 0; i < b.size(); ++i) {
        Up[i] += h * V[i];
        Um[i] -= h * V[i];
    }
    const Complex fd = (evaluate_complex(H, Up) - evaluate_complex(H, Um)) / (2 * h);
    const Complex an = pairing(b, evaluate(gradient(H), U), V);
    EXPECT_LT(std::abs(fd - an), 1e-7 * std::abs(an));
}

TEST(Poisson, Examples) {
    Box b{3};
    for (int n = 1; n <= 3; ++n)
        for (int m = 1; m <= 3; ++m)
            EXPECT_EQ(poisson(PolyHamiltonian::superaction(b, n), PolyHamiltonian::superaction(b, m)).size(), 0u);

    const auto idx = mono({{1, 1}, {2, 1}, {3, -1}, {-1, -1}});
    PolyHamiltonian M(b);
    M.add(idx, 1.0);
    for (int n = 1; n <= 3; ++n) {
        auto r = poisson(M, PolyHamiltonian::superaction(b, n));
        const double k = idx.beta(n) + idx.beta(-n) - idx.alpha(n) - idx.alpha(-n);
        EXPECT_EQ(r.coeff(idx), Complex(0, k));
        EXPECT_EQ(r.size(), k == 0 ? 0u : 1u);
    }

    PolyHamiltonian A(b), z1(b);
    A.add(mono({{1, 1}, {1, -1}}), 1.0);
    z1.add(mono({{1, 1}}), 1.0);
    auto r = poisson(A, z1);
    EXPECT_EQ(r.coeff(mono({{1, 1}})), Complex(0, 1));
    EXPECT_EQ(r.size(), 1u);
}

TEST(Poisson, JacobiAntisymmetryMomentum) {
    Rng rng(3);
    Box b{3};
    auto F = random_hamiltonian(b, 3, rng, 0.3);
    auto G = random_hamiltonian(b, 4, rng, 0.2);
    auto H = random_hamiltonian(b, 3, rng, 0.3) + PolyHamiltonian::quadratic(MediumParams::deep(1, 1, 1), b);
    auto jac = poisson(poisson(F, G), H) + poisson(poisson(G, H), F) + poisson(poisson(H, F), G);
    EXPECT_LT(jac.max_abs(), 1e-10);
    EXPECT_LT((poisson(F, G) + poisson(G, F)).max_abs(), 1e-14);
    auto FG = poisson(F, G);
    EXPECT_EQ(FG.max_abs_momentum(), 0);
    EXPECT_LT(FG.reality_defect(), 1e-14);
    EXPECT_EQ(FG.min_degree(), 5);
}

TEST(Poisson, DerivativeAlongFlow) {
    Rng rng(8);
    Box b{2};
    auto F = random_hamiltonian(b, 3, rng);
    auto G = random_hamiltonian(b, 4, rng) + PolyHamiltonian::quadratic(MediumParams::deep(1, 1, 0), b);
    auto Z = random_state(b, rng, 0.4);
    auto X = evaluate(ham_field(G), Z.slots());
    const double h = 1e-6;
    auto step = [&](double s) {
        State Y = Z;
        for (int p = 0; p < b.modes(); ++p) Y.z[p] += s * X[b.id({b.mode_at(p), 1})];
        return evaluate(F, Y);
    };
    const double fd = (step(h) - step(-h)) / (2 * h);
    const double an = evaluate(poisson(F, G), Z);
    EXPECT_NEAR(fd, an, 1e-7 * std::abs(an));
}

TEST(Poisson, TruncationReportsDropped) {
    Rng rng(4);
    Box b{2};
    auto F = random_hamiltonian(b, 3, rng);
    auto G = random_hamiltonian(b, 4, rng);
    Truncation tr{4};
    auto r = poisson(F, G, &tr);
    EXPECT_TRUE(r.empty());
    EXPECT_GT(tr.dropped, 0.0);
}

TEST(Characterization, RoundTrip) {
    Rng rng(9);
    Box b{3};
    auto H = random_hamiltonian(b, 3, rng, 0.5) + random_hamiltonian(b, 4, rng, 0.3) +
             PolyHamiltonian::quadratic(MediumParams::deep(1, 2, 1), b);
    auto back = hamiltonian_from_field(ham_field(H));
    EXPECT_LT((back - H).max_abs(), 1e-12);
}

TEST(Superaction, Values) {
    Box b{3};
    State Z(b);
    EXPECT_EQ(superaction(Z, 2), 0.0);
    Z[2] = {0, 3};
    Z[-2] = 4;
    EXPECT_NEAR(superaction(Z, 2), 25.0, 1e-14);
    Z[2] *= std::polar(1.0, 0.7);
    Z[-2] *= std::polar(1.0, -1.9);
    EXPECT_NEAR(superaction(Z, 2), 25.0, 1e-13);
    EXPECT_THROW(superaction(Z, 0), std::invalid_argument);
}

TEST(SapSplit, Examples) {
    Rng rng(1);
    Box b{3};
    auto [s3, r3] = sap_split(random_hamiltonian(b, 3, rng));
    EXPECT_TRUE(s3.empty());
    EXPECT_FALSE(r3.empty());
    auto H2 = PolyHamiltonian::quadratic(MediumParams::deep(1, 1, 1), b);
    EXPECT_EQ(sap_split(H2).first, H2);

    PolyHamiltonian Q(b);
    const auto sap = mono({{1, 1}, {2, 1}, {-1, -1}, {-2, -1}});
    const auto non = mono({{1, 1}, {1, 1}, {1, -1}, {2, -1}});
    Q.add(sap, 1.0);
    Q.add(non, 2.0);
    auto [s, r] = sap_split(Q);
    EXPECT_EQ(s.coeff(sap), Complex(1.0));
    EXPECT_EQ(s.size(), 1u);
    EXPECT_EQ(r.coeff(non), Complex(2.0));
    EXPECT_EQ(r.size(), 1u);

    auto [s4, r4] = sap_split(random_hamiltonian(b, 4, rng));
    for (int n = 1; n <= 3; ++n) EXPECT_LT(poisson(s4, PolyHamiltonian::superaction(b, n)).max_abs(), 1e-12);
}

TEST(Reality, Closure) {
    Rng rng(2);
    Box b{3};
    auto F = random_hamiltonian(b, 3, rng);
    auto G = random_hamiltonian(b, 4, rng);
    EXPECT_EQ(F.reality_defect(), 0.0);
    EXPECT_LT((F + 2.5 * G).reality_defect(), 1e-15);
    EXPECT_LT(truncate(F + G, 3).reality_defect(), 1e-15);
    EXPECT_EQ(truncate(F + G, 3), F);
}
