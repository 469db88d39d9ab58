#include "helpers.hpp"

using namespace g2forge;
using namespace g2forge::testing;

namespace {

const Catalog& cat() { return default_catalog(); }

Form data_form(const std::string& file) { return parse_form(read_file(data_dir() + "/forms/" + file), 7, 3); }

// B_ij vol = 1/6 i_{e_i} phi ^ i_{e_j} phi ^ phi, computed directly
Matrix btilde_direct(const Form& phi) {
    Matrix B(7, 7);
    for (int i = 1; i <= 7; ++i)
        for (int j = 1; j <= 7; ++j)
            B(i - 1, j - 1) = wedge({contract(i, phi), contract(j, phi), phi}).coeff({1, 2, 3, 4, 5, 6, 7}) / 6.0;
    return B;
}

}  // namespace

TEST(G2Oracle, StandardFormInducesIdentity) {
    G2MetricResult m = metric_from_3form(phi0());
    ASSERT_TRUE(m.ok());
    EXPECT_LT(max_abs_diff(m.structure.btilde, -Matrix::Identity(7, 7)), 1e-14);
    EXPECT_LT(max_abs_diff(m.structure.metric, Matrix::Identity(7, 7)), 1e-14);
    EXPECT_EQ(m.structure.orientation, -1);
    EXPECT_NEAR(m.structure.volume_scale, 1.0, 1e-14);
}

TEST(G2Oracle, StarPhiNormalization) {
    G2Structure s = g2_structure(phi0());
    // phi ^ *phi = 7 vol_g
    Form top = wedge(s.phi, s.star_phi);
    EXPECT_NEAR(top.coeff({1, 2, 3, 4, 5, 6, 7}), 7.0 * s.orientation, 1e-12);
    EXPECT_NEAR(s.star_phi.norm2(), 7.0, 1e-12);
}

TEST(G2Oracle, StoredG28FormMetric) {
    G2MetricResult m = metric_from_3form(data_form("table3-g28.form"));
    ASSERT_TRUE(m.ok());
    Matrix gram = 2.0 * Matrix::Identity(7, 7), g = Matrix::Identity(7, 7);
    gram(6, 6) = 8.0;
    g(6, 6) = 4.0;
    EXPECT_LT(max_abs_diff(m.structure.gram, gram), 1e-12);
    EXPECT_LT(max_abs_diff(m.structure.metric, g), 1e-12);
    EXPECT_TRUE(is_calibrated(instantiate(cat().get("g28")), m.structure.phi));
}

TEST(G2Oracle, StoredFormsClosedAndDefinite) {
    for (const char* name : {"g1", "g9", "g18", "g28"}) {
        Form phi = data_form(std::string("table3-") + name + ".form");
        EXPECT_TRUE(metric_from_3form(phi).ok()) << name;
        EXPECT_LT(instantiate(cat().get(name)).d(phi).max_abs(), 1e-9) << name;
    }
    // the stored form for g4 duplicates the g9 one and is not closed on g4
    Form g4 = data_form("table3-g4.form");
    EXPECT_TRUE(metric_from_3form(g4).ok());
    EXPECT_GT(instantiate(cat().get("g4")).d(g4).max_abs(), 1.0);
}

TEST(G2Oracle, DegenerateAndIndefinite) {
    EXPECT_EQ(metric_from_3form(parse_form("e123", 7, 3)).status, G2Status::Degenerate);
    EXPECT_EQ(metric_from_3form(Form(7, 3)).status, G2Status::Degenerate);
    Form split = parse_form("-e124 + e235 + e346 + e457 + e156 + e267 + e137", 7, 3);
    EXPECT_EQ(metric_from_3form(split).status, G2Status::NotPositive);
    EXPECT_THROW(g2_structure(split), ConstraintError);
}

TEST(G2Property, BtildeTableMatchesDirectFormula) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 10; ++t) {
        Form phi = random_form(rng, 7, 3);
        EXPECT_LT(max_abs_diff(btilde(phi), btilde_direct(phi)), 1e-10);
    }
}

TEST(G2Property, BtildeJacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(42);
    Vector x = random_form(rng, 7, 3).to_vector();
    Matrix J = btilde_table().jacobian(x);
    double h = 1e-6;
    for (int c = 0; c < 35; c += 3) {
        Vector xp = x, xm = x;
        xp(c) += h;
        xm(c) -= h;
        Matrix d = (btilde_table().eval(xp) - btilde_table().eval(xm)) / (2 * h);
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 7; ++j) EXPECT_NEAR(J(i * 7 + j, c), d(i, j), 1e-6);
    }
}

TEST(G2Property, MetricEquivariance) {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 50; ++t) {
        Form phi = random_g2_form(rng);
        G2Structure s = g2_structure(phi);
        Matrix R = random_rotation(rng, 7);
        G2Structure r = g2_structure(pullback(phi, R));
        // (R^* phi) induces R^T g R
        EXPECT_LT(max_abs_diff(r.metric, R.transpose() * s.metric * R), 1e-9);
        EXPECT_EQ(r.orientation, s.orientation);
        Matrix P = random_gl(rng, 7);
        G2Structure q = g2_structure(pullback(phi, P));
        EXPECT_LT(max_abs_diff(q.metric, P.transpose() * s.metric * P), 1e-8 * q.metric.cwiseAbs().maxCoeff());
        // orientation-reversing maps flip the induced orientation
        Matrix F = Matrix::Identity(7, 7);
        F(0, 0) = -1;
        EXPECT_EQ(g2_structure(pullback(phi, F)).orientation, -s.orientation);
    }
}

TEST(G2Property, MetricScalesWithTwoThirdsPower) {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> ud(0.1, 10.0);
    for (int t = 0; t < 50; ++t) {
        Form phi = random_g2_form(rng);
        double c = ud(rng);
        G2Structure s = g2_structure(phi), sc = g2_structure(c * phi);
        EXPECT_LT(max_abs_diff(sc.metric, std::pow(c, 2.0 / 3.0) * s.metric), 1e-9 * sc.metric.cwiseAbs().maxCoeff());
        EXPECT_EQ(sc.orientation, s.orientation);
        // phi has constant norm sqrt(7) in its own metric
        Form sphi = s.hodge(phi);
        EXPECT_NEAR(wedge(phi, sphi).coeff({1, 2, 3, 4, 5, 6, 7}) / (s.orientation * s.volume_scale), 7.0, 1e-8);
    }
}

TEST(G2Property, TypeSubspaceDimensions) {
    std::mt19937_64 rng(45);
    for (int t = 0; t < 5; ++t) {
        G2Structure s = g2_structure(random_g2_form(rng));
        EXPECT_EQ(type_subspace_basis(s, TypeSpace::L2_14).dim(), 14);
        EXPECT_EQ(type_subspace_basis(s, TypeSpace::L3_27).dim(), 27);
        FormSpace l4 = type_subspace_basis(s, TypeSpace::L4_27);
        EXPECT_EQ(l4.dim(), 27);
        for (int c = 0; c < l4.dim(); c += 5) EXPECT_LT(wedge(l4.form(c), s.phi).max_abs(), 1e-9);
    }
}

TEST(G2Property, TorsionRoundTrip) {
    std::mt19937_64 rng(46);
    auto algs = catalog_algebras(7);
    for (int t = 0; t < 50; ++t) {
        const LieAlgebra& alg = algs[(t * 5) % algs.size()];
        G2Structure s = g2_structure(random_g2_form(rng));
        TorsionClasses tc = torsion_classes(alg, s);
        Form dphi = alg.d(s.phi), dstar = alg.d(s.star_phi);
        double scale = std::max({1.0, dphi.max_abs(), dstar.max_abs()});
        Form rec1 = tc.tau0 * s.star_phi + 3.0 * wedge(tc.tau1, s.phi) + s.hodge(tc.tau3);
        Form rec2 = 4.0 * wedge(tc.tau1, s.star_phi) + wedge(tc.tau2, s.phi);
        EXPECT_LT((rec1 - dphi).max_abs(), 1e-8 * scale) << alg.name();
        EXPECT_LT((rec2 - dstar).max_abs(), 1e-8 * scale) << alg.name();
        EXPECT_LT(tc.tau1_gap, 1e-8 * scale) << alg.name();
        // type conditions
        EXPECT_LT(wedge(tc.tau3, s.phi).max_abs(), 1e-8 * scale);
        EXPECT_LT(wedge(tc.tau3, s.star_phi).max_abs(), 1e-8 * scale);
        EXPECT_LT(wedge(tc.tau2, s.star_phi).max_abs(), 1e-8 * scale);
    }
}

TEST(G2Oracle, TorsionFreeOnAbelian) {
    TorsionClasses tc = torsion_classes(LieAlgebra::abelian(7), g2_structure(phi0()));
    EXPECT_EQ(tc.tau0, 0.0);
    EXPECT_TRUE(tc.tau1.is_zero() && tc.tau2.is_zero() && tc.tau3.is_zero());
}

TEST(G2Oracle, ExampleSolitonTorsionPattern) {
    LieAlgebra alg = instantiate(cat().get("example-soliton"));
    G2Structure s = g2_structure(data_form("example-soliton.form"));
    EXPECT_LT(max_abs_diff(s.metric, Matrix::Identity(7, 7)), 1e-9);
    EXPECT_LT(alg.d(s.phi).max_abs(), 1e-12);
    EXPECT_GT(alg.d(s.star_phi).max_abs(), 1.0);
    TorsionClasses tc = torsion_classes(alg, s);
    EXPECT_LT(std::abs(tc.tau0), 1e-12);
    EXPECT_TRUE(tc.tau1.is_zero(1e-12));
    EXPECT_TRUE(tc.tau3.is_zero(1e-12));
    EXPECT_LT((tc.tau2 - parse_form("-3*e12 - 3*e56", 7, 2)).max_abs(), 1e-12);
}

TEST(ObstructionOracle, E6ContractionSweep) {
    const std::set<std::string> exceptions{"g1", "g4", "g9", "g18", "g28"};
    for (int i = 1; i <= 33; ++i) {
        std::string name = "g" + std::to_string(i);
        LieAlgebra alg = instantiate(cat().get(name));
        bool obstructed = obstruction_closed(alg, unit_vector(7, 6)).obstructed;
        EXPECT_EQ(obstructed, !exceptions.count(name)) << name;
        if (exceptions.count(name))
            for (int k = 1; k <= 7; ++k) EXPECT_FALSE(obstruction_closed(alg, unit_vector(7, k)).obstructed) << name << " e" << k;
    }
}

TEST(ObstructionOracle, E7ContractionSweep) {
    std::set<std::string> expected{"g3", "g13", "g23"};
    for (int i = 25; i <= 33; ++i) expected.insert("g" + std::to_string(i));
    for (int i = 1; i <= 33; ++i) {
        std::string name = "g" + std::to_string(i);
        LieAlgebra alg = instantiate(cat().get(name));
        EXPECT_EQ(obstruction_coclosed(alg, alg.metric(), unit_vector(7, 7)).obstructed, expected.count(name) > 0) << name;
    }
}

TEST(ObstructionOracle, E7IdentitiesOnStandardForm) {
    for (int i = 1; i <= 7; ++i) EXPECT_LT(e7_identity_gap(i), 1e-12) << i;
}

TEST(ObstructionOracle, FlatModelNotObstructed) {
    LieAlgebra ab = LieAlgebra::abelian(7);
    for (int k = 1; k <= 7; ++k) {
        EXPECT_FALSE(obstruction_closed(ab, unit_vector(7, k)).obstructed);
        EXPECT_FALSE(obstruction_coclosed(ab, ab.metric(), unit_vector(7, k)).obstructed);
    }
}

TEST(ObstructionProperty, CubicTestIsBasisInvariant) {
    std::mt19937_64 rng(47);
    for (int i : {2, 6, 9, 28, 30}) {
        LieAlgebra alg = instantiate(cat().get("g" + std::to_string(i)));
        FormSpace Z = closed_forms(alg, 3);
        Matrix M = random_gl(rng, Z.dim(), 1.0);
        for (int k : {6, 7}) {
            std::vector<Vector> a, b;
            Matrix Zb = Z.basis * M;
            for (int c = 0; c < Z.dim(); ++c) {
                a.push_back(contract(unit_vector(7, k), Z.form(c)).to_vector());
                b.push_back(contract(unit_vector(7, k), Form::from_vector(7, 3, Zb.col(c))).to_vector());
            }
            EXPECT_EQ(cubic_vanishing_test(a, 7).obstructed, cubic_vanishing_test(b, 7).obstructed) << i << " e" << k;
            EXPECT_EQ(cubic_vanishing_test(a, 7, 1).obstructed, cubic_vanishing_test(a, 7, 3).obstructed);
        }
    }
}

TEST(Tau3Procedure, ObstructsListedAlgebras) {
    for (const char* name : {"g1", "g2", "g4", "g5", "g6", "g20"}) {
        LieAlgebra alg = instantiate(cat().get(name));
        Tau3Report r = tau3_obstruction(alg, alg.metric());
        EXPECT_TRUE(r.obstructed) << name << " " << r.reason << " g2_min " << r.g2_min;
        EXPECT_LT(r.tau3_starphi_max, 1e-8) << name;
    }
}

TEST(Tau3Procedure, PositiveControlsFindRoots) {
    // cocalibrated G2 structures exist on these: the procedure must not obstruct them
    std::vector<std::string> des{"e12 + e34 - 2*e56", "e16 - e25"};
    for (auto& d7 : des) {
        std::vector<Form> de(7, Form(7, 2));
        de[6] = parse_form(d7, 7, 2);
        LieAlgebra alg("control", de);
        ASSERT_TRUE(jacobi_check(alg).pass);
        Tau3Report r = tau3_obstruction(alg, alg.metric());
        EXPECT_FALSE(r.obstructed) << d7 << " g2_min " << r.g2_min;
        EXPECT_EQ(r.reason, "root-found") << d7;
    }
}

TEST(Tau3Procedure, NoDefiniteFormsOnObstructedAlgebras) {
    LieAlgebra alg = instantiate(cat().get("g30"));
    Tau3Report r = tau3_obstruction(alg, alg.metric());
    EXPECT_TRUE(r.obstructed);
    EXPECT_EQ(r.reason, "no-g2-forms");
}
