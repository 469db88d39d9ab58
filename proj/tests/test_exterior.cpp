#include "helpers.hpp"

using namespace g2forge;
using namespace g2forge::testing;

namespace {

Form e(std::initializer_list<int> idx, int n = 7) { return Form::basis(n, std::vector<int>(idx)); }

}  // namespace

TEST(ExteriorOracle, WedgeOfBasisForms) {
    EXPECT_EQ((wedge(e({1}), e({2})) - e({1, 2})).max_abs(), 0.0);
    EXPECT_EQ((wedge(e({2}), e({1})) + e({1, 2})).max_abs(), 0.0);
    EXPECT_TRUE(wedge(e({1, 2}), e({2, 5})).is_zero());
    EXPECT_DOUBLE_EQ(wedge(e({1, 3}), e({2, 4})).coeff({1, 2, 3, 4}), -1.0);
    EXPECT_DOUBLE_EQ(wedge(e({2, 3, 5}), e({1, 4, 6, 7})).coeff({1, 2, 3, 4, 5, 6, 7}), 1.0);
}

TEST(ExteriorOracle, UnsortedBasisSign) {
    EXPECT_DOUBLE_EQ(Form::basis(7, {3, 1, 2}).coeff({1, 2, 3}), 1.0);
    EXPECT_DOUBLE_EQ(Form::basis(7, {2, 1, 3}).coeff({1, 2, 3}), -1.0);
    EXPECT_TRUE(Form::basis(7, {2, 2}).is_zero());
}

TEST(ExteriorOracle, Contraction) {
    EXPECT_DOUBLE_EQ(contract(1, e({1, 2, 3})).coeff({2, 3}), 1.0);
    EXPECT_DOUBLE_EQ(contract(2, e({1, 2, 3})).coeff({1, 3}), -1.0);
    EXPECT_DOUBLE_EQ(contract(3, e({1, 2, 3})).coeff({1, 2}), 1.0);
    EXPECT_TRUE(contract(4, e({1, 2, 3})).is_zero());
}

TEST(ExteriorOracle, HodgeIdentityMetric) {
    EXPECT_DOUBLE_EQ(hodge(e({1})).coeff({2, 3, 4, 5, 6, 7}), 1.0);
    EXPECT_DOUBLE_EQ(hodge(e({2})).coeff({1, 3, 4, 5, 6, 7}), -1.0);
    EXPECT_DOUBLE_EQ(hodge(e({1, 2, 3})).coeff({4, 5, 6, 7}), 1.0);
    EXPECT_DOUBLE_EQ(hodge(e({1, 2, 3}), -1).coeff({4, 5, 6, 7}), -1.0);
    EXPECT_DOUBLE_EQ(hodge(Form::scalar(7, 2.0)).coeff({1, 2, 3, 4, 5, 6, 7}), 2.0);
}

TEST(ExteriorOracle, HodgeDiagonalMetric) {
    Matrix g = Matrix::Identity(3, 3);
    g(0, 0) = 4.0;
    // vol = 2 e123, *e1 = g^{11} i_{e1} vol = e23 / 2
    EXPECT_NEAR(hodge(Form::basis(3, {1}), g, 1).coeff({2, 3}), 0.5, 1e-14);
    EXPECT_NEAR(hodge(Form::basis(3, {2}), g, 1).coeff({1, 3}), -2.0, 1e-14);
}

TEST(ExteriorOracle, MusicalIsomorphisms) {
    std::mt19937_64 rng(5);
    Matrix g = random_spd(rng, 5);
    Vector X = random_matrix(rng, 5).col(0);
    EXPECT_LT((musical_sharp(musical_flat(X, g), g) - X).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExteriorParse, LiteralSyntax) {
    Form f = parse_form("2*e{1,2,3} - sqrt(3)*e{4,5,6} + 1/2*e{1,2,7}", 7, 3);
    EXPECT_DOUBLE_EQ(f.coeff({1, 2, 3}), 2.0);
    EXPECT_NEAR(f.coeff({4, 5, 6}), -std::sqrt(3.0), 1e-15);
    EXPECT_DOUBLE_EQ(f.coeff({1, 2, 7}), 0.5);
    Form g = parse_form("e124 + e235", 7, 3);
    EXPECT_DOUBLE_EQ(g.coeff({2, 3, 5}), 1.0);
    EXPECT_DOUBLE_EQ(parse_form("a*e{2,1}", 7, 2, {{"a", 3.0}}).coeff({1, 2}), -3.0);
}

TEST(ExteriorParse, Errors) {
    EXPECT_THROW(parse_form("2*e{1,2,3} + * e{4,5}", 7, 3), ParseError);
    EXPECT_THROW(parse_form("e{1,2}", 7, 3), ParseError);
    EXPECT_THROW(parse_form("e{1,9}", 7, 2), Error);
    EXPECT_THROW(parse_form("e{1,2} + e{3}", 7), ParseError);
    EXPECT_THROW(parse_form("b*e{1,2}", 7, 2), ParseError);
}

TEST(ExteriorProperty, GradedCommutativityAndAssociativity) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        int p = 1 + t % 3, q = 1 + (t / 3) % 3, r = 1 + (t / 9) % 2;
        Form a = random_form(rng, 7, p), b = random_form(rng, 7, q), c = random_form(rng, 7, r);
        double sign = ((p * q) % 2) ? -1.0 : 1.0;
        EXPECT_LT((wedge(a, b) - sign * wedge(b, a)).max_abs(), 1e-10);
        if (p + q + r <= 7) EXPECT_LT((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs(), 1e-9);
    }
}

TEST(ExteriorProperty, ContractionIsAntiderivation) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
        int p = 1 + t % 3, q = 1 + (t / 3) % 3;
        Form a = random_form(rng, 7, p), b = random_form(rng, 7, q);
        Vector X = random_matrix(rng, 7).col(0);
        double sign = (p % 2) ? -1.0 : 1.0;
        Form lhs = contract(X, wedge(a, b));
        Form rhs = wedge(contract(X, a), b) + sign * wedge(a, contract(X, b));
        EXPECT_LT((lhs - rhs).max_abs(), 1e-9);
        if (p >= 2) EXPECT_LT(contract(X, contract(X, a)).max_abs(), 1e-12);
    }
}

TEST(ExteriorProperty, DoubleHodgeSign) {
    std::mt19937_64 rng(13);
    for (int n : {4, 5, 6, 7})
        for (int p = 0; p <= n; ++p) {
            Matrix g = random_spd(rng, n);
            Form a = random_form(rng, n, p);
            double sign = ((p * (n - p)) % 2) ? -1.0 : 1.0;
            for (int o : {1, -1}) EXPECT_LT((hodge(hodge(a, g, o), g, o) - sign * a).max_abs(), 1e-9);
        }
}

TEST(ExteriorProperty, HodgeInnerProductSymmetric) {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 30; ++t) {
        int p = t % 4;
        Matrix g = random_spd(rng, 7);
        Form a = random_form(rng, 7, p), b = random_form(rng, 7, p);
        Form ab = wedge(a, hodge(b, g, 1)), ba = wedge(b, hodge(a, g, 1));
        EXPECT_LT((ab - ba).max_abs(), 1e-9);
        EXPECT_GT(wedge(a, hodge(a, g, 1)).coeff({1, 2, 3, 4, 5, 6, 7}), 0.0);
    }
}

TEST(ExteriorProperty, HodgeInFrameMatchesGlobalHodge) {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 20; ++t) {
        Matrix g = random_spd(rng, 6);
        Eigen::LLT<Matrix> llt(g);
        Matrix L = llt.matrixL();
        Matrix P = L.transpose().inverse();  // columns g-orthonormal, positively oriented
        std::vector<Vector> frame;
        for (int i = 0; i < 6; ++i) frame.push_back(P.col(i));
        Form a = random_form(rng, 6, 1 + t % 5);
        EXPECT_LT((hodge_in_frame(a, frame, g) - hodge(a, g, 1)).max_abs(), 1e-9);
    }
}

TEST(ExteriorProperty, PullbackIsAlgebraMorphism) {
    std::mt19937_64 rng(16);
    for (int t = 0; t < 30; ++t) {
        Matrix P = random_matrix(rng, 7), Q = random_matrix(rng, 7);
        Form a = random_form(rng, 7, 2), b = random_form(rng, 7, 3);
        EXPECT_LT((pullback(wedge(a, b), P) - wedge(pullback(a, P), pullback(b, P))).max_abs(), 1e-8);
        EXPECT_LT((pullback(pullback(a, P), Q) - pullback(a, P * Q)).max_abs(), 1e-9);
    }
}

TEST(ExteriorProperty, WedgeTableAgreesWithWedge) {
    std::mt19937_64 rng(17);
    for (auto [p, q] : {std::pair{2, 2}, {3, 3}, {4, 2}, {3, 4}}) {
        Form a = random_form(rng, 7, p), b = random_form(rng, 7, q);
        Vector v = wedge_table(7, p, q).apply(a.to_vector(), b.to_vector());
        EXPECT_LT((Form::from_vector(7, p + q, v) - wedge(a, b)).max_abs(), 1e-10);
    }
}

// ----- Lie algebras and catalog

TEST(LieAlgebraOracle, BracketConvention) {
    // de3 = e12  <=>  [e1, e2] = -e3
    std::vector<Form> de(3, Form(3, 2));
    de[2] = Form::basis(3, {1, 2});
    LieAlgebra h("h3", de);
    Vector br = h.bracket(unit_vector(3, 1), unit_vector(3, 2));
    EXPECT_DOUBLE_EQ(br(2), -1.0);
    EXPECT_TRUE(jacobi_check(h).pass);
    EXPECT_EQ(closed_forms(h, 1).dim(), 2);
    EXPECT_EQ(closed_forms(h, 2).dim(), 3);
}

TEST(LieAlgebraOracle, JacobiFailureDetected) {
    // de4 = e12, de1 = e34 gives d(de4) = e234
    std::vector<Form> de(4, Form(4, 2));
    de[3] = Form::basis(4, {1, 2});
    de[0] = Form::basis(4, {3, 4});
    JacobiResult r = jacobi_check(LieAlgebra("bad", de));
    EXPECT_FALSE(r.pass);
    EXPECT_NEAR(r.residual, 1.0, 1e-15);
}

TEST(LieAlgebraProperty, DifferentialIsAntiderivationOnCatalog) {
    std::mt19937_64 rng(21);
    for (const LieAlgebra& g : catalog_algebras()) {
        int n = g.dim();
        for (int t = 0; t < 3; ++t) {
            int p = 1 + t % 2, q = 1 + (t + 1) % 2;
            if (p + q + 1 > n) continue;
            Form a = random_form(rng, n, p), b = random_form(rng, n, q);
            double sign = (p % 2) ? -1.0 : 1.0;
            Form lhs = g.d(wedge(a, b));
            Form rhs = wedge(g.d(a), b) + sign * wedge(a, g.d(b));
            EXPECT_LT((lhs - rhs).max_abs(), 1e-9) << g.name();
            EXPECT_LT(g.d(g.d(a)).max_abs(), 1e-9) << g.name();
        }
    }
}

TEST(LieAlgebraProperty, AdjointMapsAreDerivations) {
    for (const LieAlgebra& g : catalog_algebras(7))
        for (int i = 0; i < 7; ++i) EXPECT_LT(derivation_residual(g, g.ad(i)), 1e-9) << g.name();
}

TEST(Catalog, JacobiAtEverySample) {
    int checked = 0;
    for (auto& e : default_catalog().entries())
        for (auto& s : e.samples) {
            LieAlgebra g = instantiate(e, s.bindings, false);
            EXPECT_LT(jacobi_check(g).residual, 1e-9) << e.name << " " << s.name;
            ++checked;
        }
    EXPECT_GE(checked, 3 * 64);
}

TEST(Catalog, EverySourceAnnotated) {
    for (auto& e : default_catalog().entries()) EXPECT_FALSE(e.source.empty()) << e.name;
    EXPECT_EQ(default_catalog().get("g28").source, "Table 2 row g28");
}

TEST(Catalog, Errors) {
    EXPECT_THROW(default_catalog().get("not-an-algebra"), UnknownAlgebra);
    EXPECT_THROW(instantiate(default_catalog().get("k4-rank2"), Vars{{"a", 5.0}}), ConstraintError);
    EXPECT_THROW(instantiate(default_catalog().get("g1"), Vars{{"zz", 1.0}}), ConstraintError);
}

TEST(Catalog, RoundTripThroughJson) {
    for (auto& e : default_catalog().entries()) {
        CatalogEntry back = entry_from_json(entry_to_json(e));
        LieAlgebra a = instantiate(e), b = instantiate(back);
        for (int k = 0; k < a.dim(); ++k)
            EXPECT_LT((a.differentials()[k] - b.differentials()[k]).max_abs(), 1e-15) << e.name;
    }
}

TEST(Catalog, ClosedFormSpaceDimensions) {
    EXPECT_EQ(closed_forms(LieAlgebra::abelian(7), 3).dim(), 35);
    LieAlgebra g28 = instantiate(default_catalog().get("g28"));
    EXPECT_EQ(closed_forms(g28, 3).dim(), 15);
}
