#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include <coweq/twisting.hpp>

using namespace coweq;

namespace {

std::string join(const std::vector<std::string>& msgs) {
    std::string s;
    for (const auto& m : msgs) s += m + "\n";
    return s;
}

void require_clean(const std::vector<std::string>& report) {
    INFO(join(report));
    REQUIRE(report.empty());
}

bool mentions(const std::vector<std::string>& report, const std::string& needle) {
    for (const auto& m : report)
        if (m.find(needle) != std::string::npos) return true;
    return false;
}

SparseVec unit_vec(const Field& f, int idx, long long c = 1) {
    SparseVec v;
    sv_add(v, idx, f.of(c));
    return v;
}

}  // namespace

TEST_CASE("binary coproduct maps to the binary product with the equivariant sign") {
    Field q(0);
    TwistingMorphism kappa = preset_twisting("kappa_ass", 4, q);
    REQUIRE(kappa.source.name == "Ass^c");
    REQUIRE(kappa.target.name == "S-1Ass");
    REQUIRE(kappa.koszul_flag);
    require_clean(structural_report(kappa));
    int did = kappa.source.slices[2].at("a2:12");
    int dtau = kappa.source.slices[2].at("a2:21");
    REQUIRE(kappa.images[2][did] == unit_vec(q, kappa.target.slices[2].at("a2:12")));
    REQUIRE(kappa.images[2][dtau] == unit_vec(q, kappa.target.slices[2].at("a2:21"), -1));
    for (int n = 3; n <= 4; ++n)
        for (int x = 0; x < kappa.source.dim(n); ++x) REQUIRE(kappa.images[n][x].empty());
    REQUIRE_FALSE(kappa.mc_notes.empty());
}

TEST_CASE("preset catalogue carries the right flags and targets") {
    Field q(0);
    REQUIRE(preset_twisting("beta", 3, q).koszul_flag == false);
    REQUIRE(preset_twisting("beta", 3, q).target.name == "S-1Com");
    REQUIRE(preset_twisting("epsilon", 3, q).target.name == "Unit");
    REQUIRE(preset_twisting("epsilon", 3, q).koszul_flag == false);
    REQUIRE(preset_twisting("kappa_lie", 3, q).koszul_flag);
    REQUIRE(preset_twisting("kappa_lie", 3, q).source.name == "Lie^c");
    REQUIRE(preset_twisting("kappa_cochain", 3, q).koszul_flag);
    REQUIRE(preset_twisting("alpha_cochain", 3, q).koszul_flag == false);
    REQUIRE(preset_twisting("epsilon_cochain", 0, q).target.name == "Unit");
    REQUIRE_THROWS_AS(preset_twisting("gamma", 3, q), validation_error);
}

TEST_CASE("beta collapses both binary co-operations onto the commutative product") {
    Field q(0);
    TwistingMorphism beta = preset_twisting("beta", 4, q);
    int c2 = beta.target.slices[2].at("c2");
    REQUIRE(beta.images[2][beta.source.slices[2].at("a2:12")] == unit_vec(q, c2));
    REQUIRE(beta.images[2][beta.source.slices[2].at("a2:21")] == unit_vec(q, c2, -1));
}

TEST_CASE("degree law rejects images outside degree minus one") {
    Field q(0);
    Cooperad source = linear_dual_cooperad(preset_operad("Ass", 3, q), 3);
    Operad target = operadic_desuspension(preset_operad("Ass", 3, q));
    std::vector<std::vector<SparseVec>> images(4);
    for (int n = 1; n <= 3; ++n) images[n].resize(source.dim(n));
    // An arity-3 image would have degree -2, not -1.
    sv_add(images[3][0], 0, q.one());
    REQUIRE_THROWS_WITH(make_twisting(source, target, "bad", images),
                        Catch::Matchers::ContainsSubstring("degree"));
}

TEST_CASE("equivariance rejects the unsigned variant of the binary preset") {
    Field q(0);
    Cooperad source = linear_dual_cooperad(preset_operad("Ass", 2, q), 2);
    Operad target = operadic_desuspension(preset_operad("Ass", 2, q));
    std::vector<std::vector<SparseVec>> images(3);
    for (int n = 1; n <= 2; ++n) images[n].resize(source.dim(n));
    sv_add(images[2][source.slices[2].at("a2:12")], target.slices[2].at("a2:12"), q.one());
    sv_add(images[2][source.slices[2].at("a2:21")], target.slices[2].at("a2:21"), q.one());
    REQUIRE_THROWS_WITH(make_twisting(source, target, "unsigned", images),
                        Catch::Matchers::ContainsSubstring("equivariance"));
}

TEST_CASE("the image must vanish on the coaugmentation") {
    Field q(0);
    Cooperad source = ext2_coalgebra(q);
    Operad target = polynomial_operad({"x"}, 2, q);
    std::vector<std::vector<SparseVec>> images(2);
    images[1].resize(source.dim(1));
    sv_add(images[1][source.coaug_index], target.unit_index, q.one());
    REQUIRE_THROWS_WITH(make_twisting(source, target, "bad", images),
                        Catch::Matchers::ContainsSubstring("coaugmentation"));
}

TEST_CASE("exterior coalgebra passes the counital checks on both routes") {
    Field q(0);
    Cooperad c = ext2_coalgebra(q);
    require_clean(check_counital(c));
    // Transpose algebra is the exterior algebra: mu*nu = eta, nu*mu = -eta,
    // squares vanish.
    int mu = c.slices[1].at("mu"), nu = c.slices[1].at("nu"), eta = c.slices[1].at("eta");
    REQUIRE(c.dual.compose(1, mu, 1, 1, nu) == unit_vec(q, eta));
    REQUIRE(c.dual.compose(1, nu, 1, 1, mu) == unit_vec(q, eta, -1));
    REQUIRE(c.dual.compose(1, mu, 1, 1, mu).empty());
    REQUIRE(c.dual.compose(1, nu, 1, 1, nu).empty());
    REQUIRE(c.dual.compose(1, eta, 1, 1, mu).empty());
}

TEST_CASE("counital checker catches an injected coassociativity defect") {
    Field q(0);
    // A reduced term with a non-primitive factor needs compensating terms;
    // mu(x)eta alone cannot be coassociative.
    Cooperad c = counital_coalgebra(
        "bad", Field(0),
        {{"1", 0, 0}, {"mu", 1, 1}, {"nu", 1, 1}, {"eta", 2, 2}, {"theta", 3, 3}}, "1",
        {{"1", "1", "1", 1},
         {"mu", "mu", "1", 1},
         {"mu", "1", "mu", 1},
         {"nu", "nu", "1", 1},
         {"nu", "1", "nu", 1},
         {"eta", "eta", "1", 1},
         {"eta", "1", "eta", 1},
         {"eta", "mu", "nu", 1},
         {"eta", "nu", "mu", -1},
         {"theta", "theta", "1", 1},
         {"theta", "1", "theta", 1},
         {"theta", "mu", "eta", 1}});
    REQUIRE(mentions(check_counital(c), "coassociativity fails on theta"));
}

TEST_CASE("counital checker catches a broken counit row") {
    Field q(0);
    Cooperad c = counital_coalgebra(
        "bad", q, {{"1", 0, 0}, {"mu", 1, 1}}, "1",
        {{"1", "1", "1", 1}, {"mu", "mu", "1", 1}});
    REQUIRE(mentions(check_counital(c), "counit"));
}

TEST_CASE("counital checker enforces weight positivity and additivity") {
    Field q(0);
    Cooperad flat = counital_coalgebra("bad", q, {{"1", 0, 0}, {"g", 1, 0}}, "1",
                                       {{"1", "1", "1", 1},
                                        {"g", "g", "1", 1},
                                        {"g", "1", "g", 1}});
    REQUIRE(mentions(check_counital(flat), "weight"));
}

TEST_CASE("arity-one residual is the convolution square") {
    Field q(0);
    // Divided-square shape: eta splits as g(x)g.
    std::vector<std::tuple<std::string, int, int>> elts{{"1", 0, 0}, {"g", 1, 1}, {"h", 2, 2}};
    std::vector<std::tuple<std::string, std::string, std::string, long long>> co{
        {"1", "1", "1", 1}, {"g", "g", "1", 1},      {"g", "1", "g", 1},
        {"h", "h", "1", 1}, {"h", "1", "h", 1},      {"h", "g", "g", 1}};
    Cooperad c = counital_coalgebra("sq", q, elts, "1", co);
    require_clean(check_counital(c));

    auto images_for = [&](const Operad& target) {
        std::vector<std::vector<SparseVec>> images(2);
        images[1].resize(c.dim(1));
        sv_add(images[1][c.slices[1].at("g")], target.slices[1].at("x"), q.one());
        return images;
    };
    // In the quotient with x^2 = 0 the residual vanishes.
    Operad small = polynomial_operad({"x"}, 1, q);
    REQUIRE_NOTHROW(make_twisting(c, small, "tau", images_for(small)));
    // With x^2 present it is -x^2 on h.
    Operad big = polynomial_operad({"x"}, 2, q);
    REQUIRE_THROWS_WITH(make_twisting(c, big, "tau", images_for(big)),
                        Catch::Matchers::ContainsSubstring("Maurer-Cartan residual nonzero on h"));
}

TEST_CASE("symmetric splitting of eta breaks the residual over the rationals") {
    Field q(0);
    Cooperad c = counital_coalgebra("sym", q,
                                    {{"1", 0, 0}, {"mu", 1, 1}, {"nu", 1, 1}, {"eta", 2, 2}},
                                    "1",
                                    {{"1", "1", "1", 1},
                                     {"mu", "mu", "1", 1},
                                     {"mu", "1", "mu", 1},
                                     {"nu", "nu", "1", 1},
                                     {"nu", "1", "nu", 1},
                                     {"eta", "eta", "1", 1},
                                     {"eta", "1", "eta", 1},
                                     {"eta", "mu", "nu", 1},
                                     {"eta", "nu", "mu", 1}});
    require_clean(check_counital(c));
    Operad target = polynomial_operad({"x", "y"}, 2, q);
    std::vector<std::vector<SparseVec>> images(2);
    images[1].resize(c.dim(1));
    sv_add(images[1][c.slices[1].at("mu")], target.slices[1].at("x"), q.one());
    sv_add(images[1][c.slices[1].at("nu")], target.slices[1].at("y"), q.one());
    REQUIRE_THROWS_WITH(make_twisting(c, target, "tau", images),
                        Catch::Matchers::ContainsSubstring("eta"));
}

TEST_CASE("cochain presets carry the stated generator images") {
    Field q(0);
    TwistingMorphism kappa = preset_twisting("kappa_cochain", 4, q);
    int mu = kappa.source.slices[1].at("mu"), nu = kappa.source.slices[1].at("nu");
    REQUIRE(kappa.images[1][mu] == unit_vec(q, kappa.target.slices[1].at("x")));
    REQUIRE(kappa.images[1][nu] == unit_vec(q, kappa.target.slices[1].at("y")));
    REQUIRE(kappa.images[1][kappa.source.slices[1].at("eta")].empty());

    TwistingMorphism alpha = preset_twisting("alpha_cochain", 4, q);
    REQUIRE(alpha.images[1][alpha.source.slices[1].at("mu")] ==
            unit_vec(q, alpha.target.slices[1].at("x")));
    REQUIRE(alpha.images[1][alpha.source.slices[1].at("nu")].empty());

    TwistingMorphism eps = preset_twisting("epsilon_cochain", 0, q);
    for (int x = 0; x < eps.source.dim(1); ++x) REQUIRE(eps.images[1][x].empty());
}

TEST_CASE("collapsing the associative target reproduces the diagonal preset") {
    Field q(0);
    TwistingMorphism kappa = preset_twisting("kappa_ass", 4, q);
    TwistingMorphism beta = preset_twisting("beta", 4, q);
    Operad scom = operadic_desuspension(preset_operad("Com", 4, q));
    OperadMap collapse = desusp_ass_to_com_map(kappa.target, scom);
    require_clean(collapse.validate(4));
    TwistingMorphism composed = compose_with_operad_map(kappa, collapse);
    REQUIRE(same_images(composed, beta));
    REQUIRE(composed.target.name == "S-1Com");
    REQUIRE_FALSE(composed.koszul_flag);
}

TEST_CASE("precomposing the bracket preset with the cocommutator reproduces beta") {
    Field q(0);
    TwistingMorphism kl = preset_twisting("kappa_lie", 4, q);
    TwistingMorphism beta = preset_twisting("beta", 4, q);
    Cooperad assc = linear_dual_cooperad(preset_operad("Ass", 4, q), 4);
    CooperadMap q2 = cocommutator_map(assc, kl.source);
    TwistingMorphism composed = precompose_with_cooperad_map(q2, kl);
    REQUIRE(same_images(composed, beta));
}

TEST_CASE("the augmentation absorbs any twisting morphism") {
    Field q(0);
    for (const std::string& name : {"kappa_ass", "beta"}) {
        TwistingMorphism alpha = preset_twisting(name, 4, q);
        TwistingMorphism eps = preset_twisting("epsilon", 4, q);
        TwistingMorphism absorbed =
            compose_with_operad_map(alpha, augmentation_map(alpha.target));
        REQUIRE(same_images(absorbed, eps));
        REQUIRE(absorbed.target.name == "Unit");
    }
}

TEST_CASE("composition laws are unital and associative on the presets") {
    Field q(0);
    TwistingMorphism kappa = preset_twisting("kappa_ass", 4, q);
    OperadMap id;
    id.source = kappa.target;
    id.target = kappa.target;
    id.name = "id";
    id.images.assign(kappa.target.max_arity + 1, {});
    for (int n = 1; n <= kappa.target.max_arity; ++n) {
        id.images[n].resize(kappa.target.dim(n));
        for (int a = 0; a < kappa.target.dim(n); ++a) sv_add(id.images[n][a], a, q.one());
    }
    REQUIRE(same_images(compose_with_operad_map(kappa, id), kappa));

    Operad scom = operadic_desuspension(preset_operad("Com", 4, q));
    OperadMap collapse = desusp_ass_to_com_map(kappa.target, scom);
    OperadMap aug = augmentation_map(scom);
    TwistingMorphism two_steps =
        compose_with_operad_map(compose_with_operad_map(kappa, collapse), aug);
    TwistingMorphism one_step =
        compose_with_operad_map(kappa, operad_map_composite(collapse, aug));
    REQUIRE(same_images(two_steps, one_step));

    // Mixed associativity: target change commutes with source change.
    TwistingMorphism kl = preset_twisting("kappa_lie", 4, q);
    Cooperad assc = linear_dual_cooperad(preset_operad("Ass", 4, q), 4);
    CooperadMap q2 = cocommutator_map(assc, kl.source);
    TwistingMorphism lhs = compose_with_operad_map(precompose_with_cooperad_map(q2, kl), aug);
    TwistingMorphism rhs = precompose_with_cooperad_map(q2, compose_with_operad_map(kl, aug));
    REQUIRE(same_images(lhs, rhs));
}

TEST_CASE("a cooperad map with zero binary part yields zero binary images") {
    Field q(0);
    TwistingMorphism kappa = preset_twisting("kappa_ass", 3, q);
    CooperadMap f;
    f.source = kappa.source;
    f.target = kappa.source;
    f.name = "kill2";
    f.images.assign(kappa.source.max_arity + 1, {});
    for (int n = 1; n <= kappa.source.max_arity; ++n) {
        f.images[n].resize(kappa.source.dim(n));
        for (int x = 0; x < kappa.source.dim(n); ++x)
            if (n != 2) sv_add(f.images[n][x], x, q.one());
    }
    TwistingMorphism composed = precompose_with_cooperad_map(f, kappa);
    for (int x = 0; x < composed.source.dim(2); ++x) REQUIRE(composed.images[2][x].empty());
}

TEST_CASE("mismatched composition inputs are rejected") {
    Field q(0);
    TwistingMorphism kappa = preset_twisting("kappa_ass", 3, q);
    Operad scom = operadic_desuspension(preset_operad("Com", 3, q));
    OperadMap aug = augmentation_map(scom);
    REQUIRE_THROWS_WITH(compose_with_operad_map(kappa, aug),
                        Catch::Matchers::ContainsSubstring("does not match"));
}
