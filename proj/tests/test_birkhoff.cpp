#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>
#include <bnf/birkhoff.hpp>
#include <bnf/random.hpp>

#include "lie_oracle.hpp"

using namespace bnf;
using namespace lie_oracle;

namespace {

PolyHamiltonian toy(const MediumParams& p, Rng& rng) {
    Box b{2};
    return PolyHamiltonian::quadratic(p, b) + random_hamiltonian(b, 3, rng, 1.0, 0.5) +
           random_hamiltonian(b, 4, rng, 1.0, 0.5);
}

}  // namespace

TEST(Homological, SapOnlyGivesZero) {
    Box b{3};
    auto W = Frequencies(MediumParams::deep(1, 1.3, 0.7), b);
    PolyHamiltonian T(b);
    T.add(MultiIndex::from_monomial({{1, 1}, {-1, -1}, {2, 1}, {-2, -1}}), 0.4);
    T.add(MultiIndex::from_monomial({{3, 1}, {3, -1}}), 1.0);
    EXPECT_TRUE(homological_solve(T, W, 1e-8).empty());
}

TEST(Homological, SingleCubic) {
    Box b{3};
    auto p = MediumParams::deep(1, 1.3, 0.7);
    auto W = Frequencies(p, b);
    const auto m = MultiIndex::from_monomial({{1, 1}, {2, 1}, {3, -1}});
    const Complex c(0.2, -0.5);
    PolyHamiltonian F(b);
    F.add_real_pair(m, c);
    auto chi = homological_solve(F, W, 1e-8);
    const double d = Omega(p, 1) + Omega(p, 2) - Omega(p, 3);
    EXPECT_NEAR(std::abs(chi.coeff(m) - c / Complex(0, d)), 0.0, 1e-15);
    EXPECT_EQ(chi.size(), 2u);
    EXPECT_LT(chi.reality_defect(), 1e-15);
    auto H2 = PolyHamiltonian::quadratic(p, b);
    EXPECT_LT((poisson(chi, H2) + F).max_abs(), 1e-14);
}

TEST(Homological, ResonantCapillarityRejected) {
    auto f = [](double k) {
        auto p = MediumParams::deep(1, k, 0);
        return 2 * Omega(p, 1) - Omega(p, 2);
    };
    boost::uintmax_t it = 100;
    auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.1, 2.0, boost::math::tools::eps_tolerance<double>(52), it);
    auto p = MediumParams::deep(1, 0.5 * (lo + hi), 0);
    Box b{2};
    PolyHamiltonian F(b);
    const auto m = MultiIndex::from_monomial({{1, 1}, {1, 1}, {2, -1}});
    F.add_real_pair(m, 1.0);
    auto W = Frequencies(p, b);
    try {
        homological_solve(F, W, default_threshold(W));
        FAIL() << "expected a small divisor";
    } catch (const SmallDivisor& e) {
        EXPECT_TRUE(e.index == m || e.index == m.conj());
        EXPECT_LT(std::abs(e.value), 1e-10);
    }
    EXPECT_THROW(normal_form(PolyHamiltonian::quadratic(p, b) + F, 1), SmallDivisor);
}

TEST(LieTransform, ZeroGeneratorAndHomologicalIdentity) {
    Rng rng(1);
    Box b{3};
    auto p = MediumParams::deep(1, 1.37, 0.4);
    auto H2 = PolyHamiltonian::quadratic(p, b);
    auto F = random_hamiltonian(b, 3, rng, 0.5);
    EXPECT_EQ(lie_transform(H2 + F, PolyHamiltonian(b), 2), H2 + F);
    auto chi = homological_solve(F, Frequencies(H2), 1e-8);
    auto out = lie_transform(H2 + F, chi, 1);
    EXPECT_LT(out.degree(3).max_abs(), 1e-13);
    EXPECT_EQ(out.degree(2), H2);
    EXPECT_THROW(lie_transform(H2, H2, 2), std::invalid_argument);
}

TEST(LieTransform, RoundTrip) {
    Rng rng(2);
    Box b{3};
    auto H = PolyHamiltonian::quadratic(MediumParams::deep(1, 1.1, 1.0), b) + random_hamiltonian(b, 3, rng, 0.5) +
             random_hamiltonian(b, 4, rng, 0.3);
    auto chi = random_hamiltonian(b, 3, rng, 0.4, 0.3);
    auto back = lie_transform(lie_transform(H, chi, 2), -1.0 * chi, 2);
    EXPECT_LT((back - H).max_abs(), 1e-9);
}

TEST(NormalForm, NoNonlinearityGivesIdentity) {
    Box b{3};
    auto H2 = PolyHamiltonian::quadratic(MediumParams::deep(1, 1, 1), b);
    auto r = normal_form(H2, 2);
    EXPECT_EQ(r.H, H2);
    EXPECT_TRUE(r.map.has_identity());
    EXPECT_TRUE(r.map.nonlinear.empty());
    EXPECT_EQ(verify_sap(r).max_bracket, 0.0);
}

TEST(NormalForm, TwoModeToyMatchesDenseOracle) {
    Rng rng(3);
    auto p = MediumParams::deep(1, 1.37, 0.6);
    auto H = toy(p, rng);
    auto r = normal_form(H, 2);
    EXPECT_TRUE(r.H.degree(3).empty() || r.H.degree(3).max_abs() < 1e-12);
    const double omega[4] = {Omega(p, -2), Omega(p, -1), Omega(p, 1), Omega(p, 2)};
    const Dense want = oracle_normal_form(to_dense(H), omega, 2);
    EXPECT_LT(dense_diff(to_dense(r.H), want), 1e-10);
    EXPECT_TRUE(verify_sap(r).ok());
    EXPECT_LT(r.H.reality_defect(), 1e-12);
    for (const auto& g : r.generators) EXPECT_LT(g.reality_defect(), 1e-12);
    ASSERT_EQ(r.min_divisors.size(), 2u);
    EXPECT_GT(r.min_divisors[0], 0.0);
}

TEST(NormalForm, LowerDegreesUnchangedAndSapPassesThrough) {
    Rng rng(4);
    Box b{3};
    auto p = MediumParams::deep(1, 1.23, 0.9);
    auto H2 = PolyHamiltonian::quadratic(p, b);
    auto H3 = random_hamiltonian(b, 3, rng, 0.5);
    auto H4 = random_hamiltonian(b, 4, rng, 0.3);
    auto r1 = normal_form(H2 + H3 + H4, 1);
    EXPECT_EQ(r1.H.degree(2), H2);
    auto r2 = normal_form(H2 + H4, 2);
    // with no cubic part the first step is void and the quartic SAP part is untouched
    EXPECT_TRUE(r2.generators[0].empty());
    auto sap_in = sap_split(H4).first;
    auto sap_out = sap_split(r2.H.degree(4)).first;
    EXPECT_LT((sap_in - sap_out).max_abs(), 1e-15);
}

TEST(NormalForm, MapIsSymplecticAndConjugates) {
    Rng rng(5);
    auto p = MediumParams::deep(1, 1.37, 0.6);
    auto H = toy(p, rng);
    const int N = 2;
    auto r = normal_form(H, N);
    EXPECT_TRUE(symplectic_up_to_N(r.map, N).ok);
    auto gap = [&](double amp) {
        Rng g(6);
        auto Z = random_state(H.box(), g, amp);
        auto Zp = State::from_slots(H.box(), apply_map(r.map, Z.slots()));
        return std::abs(evaluate(H, Z) - evaluate(r.H, Zp));
    };
    const double ratio = gap(0.02) / gap(0.01);
    EXPECT_NEAR(ratio, 32.0, 0.3 * 32.0);
}

TEST(VerifySap, NegativeControl) {
    Rng rng(7);
    auto p = MediumParams::deep(1, 1.37, 0.6);
    auto r = normal_form(toy(p, rng), 2);
    EXPECT_TRUE(verify_sap(r).ok());
    auto bad = r.H;
    bad.add_real_pair(MultiIndex::from_monomial({{1, 1}, {1, 1}, {2, -1}}), 1e-3);
    EXPECT_FALSE(verify_sap(bad).ok());
    EXPECT_GT(verify_sap(bad).max_bracket, 1e-4);
}
