#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <string>
#include <vector>

#include <coweq/cooperad.hpp>

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

std::map<std::pair<int, int>, Scalar> row_map(const std::vector<CoTerm>& terms) {
    std::map<std::pair<int, int>, Scalar> m;
    for (const CoTerm& t : terms) {
        auto [it, fresh] = m.emplace(std::make_pair(t.a, t.b), t.coeff);
        if (!fresh) it->second += t.coeff;
    }
    for (auto it = m.begin(); it != m.end();)
        it = it->second.is_zero() ? m.erase(it) : std::next(it);
    return m;
}

}  // namespace

TEST_CASE("dual of the tensor preset: dimensions, weights, labels") {
    Field q(0);
    Cooperad c = linear_dual_cooperad(preset_operad("Ass", 3, q), 3);
    REQUIRE(c.name == "Ass^c");
    REQUIRE(c.max_arity == 3);
    REQUIRE(c.dim(1) == 1);
    REQUIRE(c.dim(2) == 2);
    REQUIRE(c.dim(3) == 6);
    REQUIRE(c.coaug_index == 0);
    REQUIRE(c.lower_bound_slope == -1);
    for (int n = 1; n <= 3; ++n)
        for (const BasisElement& e : c.slices[n].elements) {
            REQUIRE(e.weight == n - 1);
            REQUIRE(e.degree == 0);
        }
    REQUIRE(c.slices[2].elements[c.slices[2].at("a2:12")].label == "a2:12");
    REQUIRE(c.slices[2].at("a2:21") >= 0);
}

TEST_CASE("dual of the commutative and bracket presets: dimensions") {
    Field q(0);
    Cooperad com = linear_dual_cooperad(preset_operad("Com", 3, q), 3);
    REQUIRE(com.dim(1) == 1);
    REQUIRE(com.dim(2) == 1);
    REQUIRE(com.dim(3) == 1);
    Cooperad lie = linear_dual_cooperad(preset_operad("Lie", 3, q), 3);
    REQUIRE(lie.dim(1) == 1);
    REQUIRE(lie.dim(2) == 1);
    REQUIRE(lie.dim(3) == 2);
}

TEST_CASE("cocomposition tables transpose the composition tables") {
    Field q(0);
    Cooperad c = linear_dual_cooperad(preset_operad("Ass", 3, q), 3);
    int i12 = c.slices[2].at("a2:12");
    int i21 = c.slices[2].at("a2:21");

    // a3:213 factors through slot 1 in exactly one way and not at all
    // through slot 2.
    auto row = row_map(c.cocompose(3, 1, 2, c.slices[3].at("a3:213")));
    std::map<std::pair<int, int>, Scalar> want{{{i12, i21}, q.one()}};
    REQUIRE(row == want);
    REQUIRE(c.cocompose(3, 2, 2, c.slices[3].at("a3:213")).empty());

    row = row_map(c.cocompose(3, 1, 2, c.slices[3].at("a3:123")));
    want = {{{i12, i12}, q.one()}};
    REQUIRE(row == want);
    row = row_map(c.cocompose(3, 2, 2, c.slices[3].at("a3:132")));
    want = {{{i12, i21}, q.one()}};
    REQUIRE(row == want);

    // Counit rows: splitting off the coaugmentation returns the element.
    for (int x = 0; x < c.dim(3); ++x)
        for (int i = 1; i <= 3; ++i) {
            auto r = row_map(c.cocompose(3, i, 1, x));
            std::map<std::pair<int, int>, Scalar> w{{{x, c.coaug_index}, q.one()}};
            REQUIRE(r == w);
        }

    Cooperad com = linear_dual_cooperad(preset_operad("Com", 3, q), 3);
    auto r = row_map(com.cocompose(3, 1, 2, 0));
    std::map<std::pair<int, int>, Scalar> w{{{0, 0}, q.one()}};
    REQUIRE(r == w);
}

TEST_CASE("redualizing restores the original operad") {
    Field q(0);
    for (const std::string& name : {"Com", "Ass", "Lie"}) {
        Operad p = preset_operad(name, 4, q);
        Cooperad c = linear_dual_cooperad(p, 4);
        Operad back = redual_operad(c);
        for (int n = 1; n <= 4; ++n) {
            REQUIRE(back.dim(n) == p.dim(n));
            for (int a = 0; a < p.dim(n); ++a) {
                REQUIRE(back.slices[n].elements[a].label == p.slices[n].elements[a].label);
                REQUIRE(back.slices[n].elements[a].degree == p.slices[n].elements[a].degree);
            }
        }
        require_clean(check_axioms(back, 4));
        for (int m = 1; m <= 3; ++m)
            for (int k = 1; k + m - 1 <= 4; ++k)
                for (int i = 1; i <= k; ++i)
                    for (int a = 0; a < p.dim(k); ++a)
                        for (int b = 0; b < p.dim(m); ++b)
                            REQUIRE(sv_sub(back.compose(k, a, i, m, b),
                                           p.compose(k, a, i, m, b)).empty());
    }
}

TEST_CASE("check_cooperad accepts the preset duals") {
    Field q(0);
    require_clean(check_cooperad(linear_dual_cooperad(preset_operad("Ass", 4, q), 4), 4));
    require_clean(check_cooperad(linear_dual_cooperad(preset_operad("Com", 4, q), 4), 4));
    require_clean(check_cooperad(linear_dual_cooperad(preset_operad("Lie", 4, q), 4), 4));
}

TEST_CASE("check_cooperad flags injected defects") {
    Field q(0);
    Cooperad base = linear_dual_cooperad(preset_operad("Ass", 3, q), 3);

    SECTION("tampered cocomposition coefficient") {
        Cooperad c = base;
        auto& row = c.delta[{3, 1, 2}][c.slices[3].at("a3:213")];
        REQUIRE(row.size() == 1);
        row[0].coeff = -row[0].coeff;
        auto report = check_cooperad(c, 3);
        REQUIRE(mentions(report, "transpose of composition"));
    }

    SECTION("extra weight-0 element breaks connectedness") {
        Cooperad c = base;
        c.slices[1].add("ghost", 0, 0);
        auto report = check_cooperad(c, 3);
        REQUIRE(mentions(report, "connected weight"));
    }

    SECTION("wrong weight on a basis element") {
        Cooperad c = base;
        c.slices[2].elements[0].weight = 0;
        auto report = check_cooperad(c, 3);
        REQUIRE(mentions(report, "weight grading"));
        REQUIRE(mentions(report, "connected weight"));
    }
}

TEST_CASE("cocommutator dual map sends permutation duals to signed bracket duals") {
    Field q(0);
    Cooperad assc = linear_dual_cooperad(preset_operad("Ass", 4, q), 4);
    Cooperad liec = linear_dual_cooperad(preset_operad("Lie", 4, q), 4);
    CooperadMap f = cocommutator_map(assc, liec);
    require_clean(f.validate(4));

    int l2 = liec.slices[2].at("l2:12");
    SparseVec want{{l2, q.one()}};
    REQUIRE(sv_sub(f.images[2][assc.slices[2].at("a2:12")], want).empty());
    want = {{l2, q.of(-1)}};
    REQUIRE(sv_sub(f.images[2][assc.slices[2].at("a2:21")], want).empty());

    int l123 = liec.slices[3].at("l3:123");
    int l132 = liec.slices[3].at("l3:132");
    want = {{l123, q.one()}};
    REQUIRE(sv_sub(f.images[3][assc.slices[3].at("a3:123")], want).empty());
    want = {{l123, q.of(-1)}, {l132, q.of(-1)}};
    REQUIRE(sv_sub(f.images[3][assc.slices[3].at("a3:213")], want).empty());

    SECTION("a sign flip is caught by the cocomposition check") {
        CooperadMap g = f;
        g.images[2][assc.slices[2].at("a2:21")] = SparseVec{{l2, q.one()}};
        auto report = g.validate(3);
        REQUIRE(mentions(report, "cocomposition"));
    }
}

TEST_CASE("dualizing requires the operad to sit in degree zero") {
    Field q(0);
    Operad s = operadic_desuspension(preset_operad("Com", 3, q));
    REQUIRE_THROWS_AS(linear_dual_cooperad(s, 3), validation_error);
}
