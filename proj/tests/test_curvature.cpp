#include "helpers.hpp"

using namespace g2forge;
using namespace g2forge::testing;

namespace {

// [e_n, e_i] = e_i: real hyperbolic space of dimension n
LieAlgebra hyperbolic(int n) {
    std::vector<Form> de(n, Form(n, 2));
    for (int i = 1; i < n; ++i) de[i - 1] = Form::basis(n, {i, n});
    return LieAlgebra("RH" + std::to_string(n), de);
}

const Catalog& cat() { return default_catalog(); }

}  // namespace

TEST(CurvatureOracle, HyperbolicSpaceHasConstantCurvatureMinusOne) {
    for (int n : {3, 5, 7}) {
        LieAlgebra h = hyperbolic(n);
        CurvatureReport r = ricci(h);
        ASSERT_TRUE(r.einstein_lambda);
        EXPECT_NEAR(*r.einstein_lambda, -(n - 1.0), 1e-12);
        RiemannTensor R = riemann(orthonormal_frame(h, h.metric()), levi_civita(h, h.metric()));
        // sectional curvature of the (e1, e2) plane
        EXPECT_NEAR(R(0, 1, 1, 0), -1.0, 1e-12);
    }
}

TEST(CurvatureOracle, HeisenbergRicci) {
    // de3 = e12: Ric = diag(-1/2, -1/2, 1/2)
    std::vector<Form> de(3, Form(3, 2));
    de[2] = Form::basis(3, {1, 2});
    CurvatureReport r = ricci(LieAlgebra("h3", de));
    Vector want(3);
    want << -0.5, -0.5, 0.5;
    EXPECT_LT((r.ricci.diagonal() - want).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_FALSE(r.einstein_lambda);
}

TEST(CurvatureOracle, AbelianIsFlat) {
    EXPECT_TRUE(flatness_check(LieAlgebra::abelian(7)).flat);
    EXPECT_FALSE(flatness_check(hyperbolic(4)).flat);
}

TEST(CurvatureOracle, KnownEinsteinConstants) {
    EXPECT_NEAR(ricci(instantiate(cat().get("heber7"))).lambda, -6.0, 1e-10);
    EXPECT_NEAR(ricci(instantiate(cat().get("g28"))).lambda, -12.0, 1e-10);
}

TEST(CurvatureSuite, ListedEntriesEinsteinNegativeNotFlat) {
    for (auto& e : cat().entries()) {
        bool table = e.source.rfind("Table 1", 0) == 0 || e.source.rfind("Table 2", 0) == 0;
        if (!table) continue;
        CurvatureReport r = ricci(instantiate(e));
        ASSERT_TRUE(r.einstein_lambda) << e.name << " residual " << r.einstein_residual;
        EXPECT_LT(r.einstein_residual, 1e-8) << e.name;
        EXPECT_LT(*r.einstein_lambda, 0.0) << e.name;
        EXPECT_LE(r.method_gap, 1e-7 * std::max(1.0, r.ricci.cwiseAbs().maxCoeff())) << e.name;
        EXPECT_FALSE(r.flat) << e.name;
    }
}

TEST(CurvatureSuite, AllSamplesEinsteinExceptSoliton) {
    for (auto& e : cat().entries()) {
        if (e.name == "example-soliton") continue;
        for (auto& s : e.samples) {
            CurvatureReport r = ricci(instantiate(e, s.bindings));
            EXPECT_TRUE(r.einstein_lambda) << e.name << " " << s.name;
            EXPECT_LT(r.lambda, 0.0) << e.name << " " << s.name;
        }
    }
}

TEST(CurvatureProperty, RicciMethodsAgreeOnRandomMetrics) {
    std::mt19937_64 rng(31);
    for (auto& e : cat().entries()) {
        LieAlgebra g = instantiate(e);
        for (int t = 0; t < 100; ++t) {
            Matrix m = random_spd(rng, g.dim());
            // ricci() throws InternalError on disagreement
            CurvatureReport r = ricci(g, m);
            EXPECT_LE(r.method_gap, 1e-7 * std::max(1.0, r.ricci.cwiseAbs().maxCoeff())) << e.name;
        }
    }
}

TEST(CurvatureProperty, RiemannSymmetriesAndBianchi) {
    std::mt19937_64 rng(32);
    auto algs = catalog_algebras();
    for (int t = 0; t < 40; ++t) {
        const LieAlgebra& g = algs[(t * 7) % algs.size()];
        int n = g.dim();
        Matrix m = random_spd(rng, n);
        OrthonormalFrame fr = orthonormal_frame(g, m);
        RiemannTensor R = riemann(fr, levi_civita(fr));
        double worst = 0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        worst = std::max(worst, std::abs(R(a, b, c, d) + R(b, a, c, d)));
                        worst = std::max(worst, std::abs(R(a, b, c, d) + R(a, b, d, c)));
                        worst = std::max(worst, std::abs(R(a, b, c, d) - R(c, d, a, b)));
                        worst = std::max(worst, std::abs(R(a, b, c, d) + R(b, c, a, d) + R(c, a, b, d)));
                    }
        EXPECT_LT(worst, 1e-9 * std::max(1.0, R.max_abs())) << g.name();
    }
}

TEST(CurvatureProperty, EinsteinScaleInvariance) {
    for (const char* name : {"g5", "k3", "heber6", "k6-2"}) {
        LieAlgebra g = instantiate(cat().get(name));
        EinsteinResult base = einstein_check(g);
        for (double c : {0.25, 3.0, 17.0}) {
            EinsteinResult s = einstein_check(g, c * g.metric());
            EXPECT_EQ(s.einstein, base.einstein) << name;
            EXPECT_NEAR(s.lambda, base.lambda / c, 1e-10 * std::abs(base.lambda)) << name;
        }
    }
}

TEST(CurvatureProperty, EinsteinImpliesTrivialSoliton) {
    for (const char* name : {"g1", "g17", "k8", "heber7", "ke-rank2"}) {
        LieAlgebra g = instantiate(cat().get(name));
        SolitonCertificate c = solvsoliton_solve(g);
        EXPECT_TRUE(c.found) << name;
        EXPECT_LT(c.residual, 1e-9) << name;
        EXPECT_NEAR(c.lambda, einstein_check(g).lambda, 1e-9) << name;
    }
}

TEST(CurvatureOracle, ExampleSolitonCertificate) {
    SolitonCertificate c = solvsoliton_solve(instantiate(cat().get("example-soliton")));
    ASSERT_TRUE(c.found);
    EXPECT_NEAR(c.lambda, -3.0, 1e-9);
    EXPECT_LT(c.residual, 1e-8);
    Vector d(7);
    d << 3, 3, 0, 0, 3, 3, 0;
    EXPECT_LT((c.D.diagonal() - d).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_FALSE(einstein_check(instantiate(cat().get("example-soliton"))).einstein);
}

TEST(StructureOracle, EigenvalueTypes) {
    StandardDecomposition g28 = standard_decomposition(instantiate(cat().get("g28")));
    EXPECT_EQ(g28.a_basis.cols(), 1);
    EXPECT_EQ(g28.eigenvalue_type.k, (std::vector<long>{1, 2}));
    EXPECT_EQ(g28.eigenvalue_type.d, (std::vector<int>{4, 2}));

    StandardDecomposition h = standard_decomposition(instantiate(cat().get("heber7")));
    EXPECT_EQ(h.eigenvalue_type.k, (std::vector<long>{1}));
    EXPECT_EQ(h.eigenvalue_type.d, (std::vector<int>{6}));
    EXPECT_TRUE(h.a_abelian);

    StandardDecomposition ab = standard_decomposition(LieAlgebra::abelian(7));
    EXPECT_TRUE(ab.degenerate);
}

TEST(StructureOracle, RankOfFamilies) {
    EXPECT_EQ(standard_decomposition(instantiate(cat().get("k4-rank2"))).a_basis.cols(), 2);
    EXPECT_EQ(standard_decomposition(instantiate(cat().get("rank3-abelian"))).a_basis.cols(), 3);
    for (int i = 1; i <= 33; ++i)
        EXPECT_EQ(standard_decomposition(instantiate(cat().get("g" + std::to_string(i)))).a_basis.cols(), 1) << i;
}

TEST(StructureOracle, EigenvalueTypeErrors) {
    EXPECT_THROW(eigenvalue_type_from({1.0, -2.0}), Error);
    EigenvalueType t = eigenvalue_type_from({0.5, 1.0, 1.0, 1.5});
    EXPECT_EQ(t.k, (std::vector<long>{1, 2, 3}));
    EXPECT_EQ(t.d, (std::vector<int>{1, 2, 1}));
}

TEST(StructureOracle, NonSolvableRejected) {
    // su(2)
    std::vector<Form> de(3, Form(3, 2));
    de[0] = Form::basis(3, {2, 3});
    de[1] = -Form::basis(3, {1, 3});
    de[2] = Form::basis(3, {1, 2});
    LieAlgebra su2("su2", de);
    EXPECT_FALSE(is_solvable(su2));
    EXPECT_THROW(standard_decomposition(su2), Error);
}
