#include <catch2/catch_amalgamated.hpp>
#include <coweq/graded.hpp>

#include <random>

using namespace coweq;

namespace {

Field Q(0);

SparseVec vec(std::initializer_list<std::pair<int, long long>> entries) {
    SparseVec v;
    for (auto& [i, c] : entries) sv_add(v, i, Q.of(c));
    return v;
}

// Independent oracle: determinant by cofactor expansion over exact rationals.
Rational det_cofactor(const std::vector<std::vector<Rational>>& m) {
    size_t n = m.size();
    if (n == 1) return m[0][0];
    Rational acc = 0;
    for (size_t j = 0; j < n; ++j) {
        if (m[0][j] == 0) continue;
        std::vector<std::vector<Rational>> minor;
        for (size_t r = 1; r < n; ++r) {
            std::vector<Rational> row;
            for (size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        Rational term = m[0][j] * det_cofactor(minor);
        acc += (j % 2 == 0) ? term : -term;
    }
    return acc;
}

}  // namespace

TEST_CASE("sparse vector operations prune zeros") {
    SparseVec v = vec({{0, 1}, {2, -3}});
    axpy(v, Q.of(1), vec({{0, -1}, {1, 5}}));
    CHECK(v.size() == 2);
    CHECK(v.count(0) == 0);
    CHECK(sv_sub(v, v).empty());
}

TEST_CASE("rank of zero and identity maps") {
    std::vector<SparseVec> zero3(3);
    CHECK(rank_of(zero3) == 0);
    std::vector<SparseVec> id4;
    for (int i = 0; i < 4; ++i) id4.push_back(vec({{i, 1}}));
    CHECK(rank_of(id4) == 4);
}

TEST_CASE("rank of the weight-truncated differential block from the first worked example") {
    // Columns n = 0..4 carry 2(-1)^n at row n+2 (dropped past the weight cap)
    // and 1 at row n+1, rows indexed by monomial weight 1..5.
    std::vector<SparseVec> cols;
    std::vector<std::vector<Rational>> dense(5, std::vector<Rational>(5, 0));
    for (int n = 0; n < 5; ++n) {
        SparseVec c;
        sv_add(c, n + 1, Q.of(1));
        dense[n][n] = 1;
        if (n + 2 <= 5) {
            sv_add(c, n + 2, Q.of(n % 2 == 0 ? 2 : -2));
            dense[n + 1][n] = (n % 2 == 0) ? 2 : -2;
        }
        cols.push_back(std::move(c));
    }
    CHECK(rank_of(cols) == 5);
    CHECK(det_cofactor(dense) != 0);
}

TEST_CASE("span membership: survivor class stays outside the image span") {
    // Generators 2 e_{n+2} + e_{n+1} for n = 0..8 inside the weight-at-most-10
    // slice; the single-letter class e_1 is not a combination of them.
    std::vector<SparseVec> gens;
    for (int n = 0; n <= 8; ++n)
        gens.push_back(vec({{n + 1, 1}, {n + 2, 2}}));
    CHECK_FALSE(span_membership(vec({{1, 1}}), gens));
    CHECK(span_membership(gens[3], gens));
    SparseVec combo;
    axpy(combo, Q.of(2), gens[0]);
    axpy(combo, Q.of(-7), gens[5]);
    CHECK(span_membership(combo, gens));
}

TEST_CASE("span membership matches the exhaustive F2 oracle") {
    Field f2(2);
    std::mt19937 rng(20240817);
    int instances = 0;
    while (instances < 200) {
        int dim = 1 + static_cast<int>(rng() % 12);
        int count = 1 + static_cast<int>(rng() % 6);
        std::vector<SparseVec> gens(count);
        for (auto& g : gens)
            for (int i = 0; i < dim; ++i)
                if (rng() % 2) sv_add(g, i, f2.one());
        SparseVec target;
        for (int i = 0; i < dim; ++i)
            if (rng() % 2) sv_add(target, i, f2.one());
        bool oracle = false;
        for (unsigned mask = 0; mask < (1u << count) && !oracle; ++mask) {
            SparseVec acc;
            for (int j = 0; j < count; ++j)
                if (mask & (1u << j)) axpy(acc, f2.one(), gens[j]);
            oracle = sv_sub(acc, target).empty();
        }
        CHECK(span_membership(target, gens) == oracle);
        ++instances;
    }
}

TEST_CASE("kernel basis spans the kernel") {
    // Map with matrix [[1,1,0],[0,0,0]]: kernel dim 2.
    std::vector<SparseVec> cols{vec({{0, 1}}), vec({{0, 1}}), {}};
    auto ker = kernel_basis(cols, Q);
    REQUIRE(ker.size() == 2);
    for (const auto& k : ker) {
        SparseVec image;
        for (const auto& [j, c] : k) axpy(image, c, cols[j]);
        CHECK(image.empty());
    }
}

TEST_CASE("high-pivot echelon reduces to low-index representatives") {
    EchelonBasis rel(true);
    rel.insert(vec({{2, 1}, {0, -1}}));
    rel.insert(vec({{3, 1}, {1, 1}}));
    SparseVec r = rel.reduce(vec({{2, 1}}));
    REQUIRE(r.size() == 1);
    CHECK(r.begin()->first == 0);
    r = rel.reduce(vec({{3, 2}}));
    REQUIRE(r.size() == 1);
    CHECK(r.begin()->first == 1);
    CHECK(r.begin()->second == Q.of(-2));
}

namespace {

ChainComplexSlice two_term_acyclic() {
    ChainComplexSlice c;
    c.basis.add("a", 1);
    c.basis.add("b", 0);
    c.d = LinearMap(c.basis, c.basis, -1);
    c.d.set(1, 0, Q.one());
    c.window_lo = -1;
    c.window_hi = 2;
    return c;
}

ChainComplexSlice bare_x_w() {
    // x in degree 1, w in degree 2, dw = x.
    ChainComplexSlice c;
    c.basis.add("x", 1);
    c.basis.add("w", 2);
    c.d = LinearMap(c.basis, c.basis, -1);
    c.d.set(0, 1, Q.one());
    c.window_lo = -1;
    c.window_hi = 3;
    return c;
}

}  // namespace

TEST_CASE("homology of small complexes") {
    auto pair = two_term_acyclic();
    pair.assert_complex();
    auto h = homology(pair, 0, 1);
    CHECK(h.betti.at(0) == 0);
    CHECK(h.betti.at(1) == 0);

    auto xw = bare_x_w();
    xw.assert_complex();
    auto hx = homology(xw, 0, 2);
    CHECK(hx.betti.at(1) == 0);
    CHECK(hx.betti.at(2) == 0);

    ChainComplexSlice z;
    z.basis.add("p", 0);
    z.basis.add("q", 0);
    z.basis.add("r", 3);
    z.d = LinearMap(z.basis, z.basis, -1);
    z.window_lo = -1;
    z.window_hi = 4;
    auto hz = homology(z, 0, 3);
    CHECK(hz.betti.at(0) == 2);
    CHECK(hz.betti.at(1) == 0);
    CHECK(hz.betti.at(2) == 0);
    CHECK(hz.betti.at(3) == 1);
}

TEST_CASE("homology rejects uncertified windows") {
    auto c = two_term_acyclic();
    CHECK_THROWS_AS(homology(c, -1, 1), validation_error);
    CHECK_THROWS_AS(homology(c, 0, 2), validation_error);
}

TEST_CASE("homology is independent of basis order") {
    auto c = bare_x_w();
    ChainComplexSlice permuted;
    permuted.basis.add("w", 2);
    permuted.basis.add("x", 1);
    permuted.d = LinearMap(permuted.basis, permuted.basis, -1);
    permuted.d.set(1, 0, Q.one());
    permuted.window_lo = -1;
    permuted.window_hi = 3;
    auto h1 = homology(c, 0, 2);
    auto h2 = homology(permuted, 0, 2);
    CHECK(h1.betti == h2.betti);
}

TEST_CASE("d squared violations are caught with a witness") {
    ChainComplexSlice c;
    c.basis.add("a", 2);
    c.basis.add("b", 1);
    c.basis.add("c", 0);
    c.d = LinearMap(c.basis, c.basis, -1);
    c.d.set(1, 0, Q.one());
    c.d.set(2, 1, Q.one());
    c.window_lo = -1;
    c.window_hi = 3;
    auto witness = c.d_squared_witness();
    REQUIRE(witness.has_value());
    CHECK(*witness == "a");
    CHECK_THROWS_AS(c.assert_complex(), validation_error);
}

TEST_CASE("degree law is enforced on map entries") {
    GradedBasis b;
    b.add("a", 2);
    b.add("b", 0);
    LinearMap f(b, b, -1);
    CHECK_THROWS_AS(f.set(1, 0, Q.one()), validation_error);
}

TEST_CASE("quasi-isomorphism verdicts") {
    auto xw = bare_x_w();

    ChainMap ident{xw, xw, LinearMap(xw.basis, xw.basis, 0)};
    ident.phi.set(0, 0, Q.one());
    ident.phi.set(1, 1, Q.one());
    CHECK(is_quasi_iso(ident, 0, 2) == QuasiIsoVerdict::yes);

    ChainComplexSlice zero;
    zero.d = LinearMap(zero.basis, zero.basis, -1);
    zero.window_lo = -5;
    zero.window_hi = 8;
    ChainMap to_zero{xw, zero, LinearMap(xw.basis, zero.basis, 0)};
    CHECK(is_quasi_iso(to_zero, 0, 2) == QuasiIsoVerdict::yes);

    ChainComplexSlice small, big;
    small.basis.add("u", 0);
    small.d = LinearMap(small.basis, small.basis, -1);
    small.window_lo = -1;
    small.window_hi = 7;
    big.basis.add("u", 0);
    big.basis.add("v", 5);
    big.d = LinearMap(big.basis, big.basis, -1);
    big.window_lo = -1;
    big.window_hi = 7;
    ChainMap incl{small, big, LinearMap(small.basis, big.basis, 0)};
    incl.phi.set(0, 0, Q.one());
    CHECK(is_quasi_iso(incl, 0, 6) == QuasiIsoVerdict::no);
    CHECK(is_quasi_iso(incl, -5, 6) == QuasiIsoVerdict::window_insufficient);
}

TEST_CASE("non-chain maps are rejected") {
    auto xw = bare_x_w();
    ChainComplexSlice zero_d = xw;
    zero_d.d = LinearMap(xw.basis, xw.basis, -1);
    ChainMap bad{xw, zero_d, LinearMap(xw.basis, xw.basis, 0)};
    bad.phi.set(0, 0, Q.one());
    bad.phi.set(1, 1, Q.one());
    CHECK_THROWS_AS(bad.assert_chain_map(), validation_error);
}

TEST_CASE("mapping cone of an isomorphism is acyclic") {
    auto xw = bare_x_w();
    ChainMap doubled{xw, xw, LinearMap(xw.basis, xw.basis, 0)};
    doubled.phi.set(0, 0, Q.of(2));
    doubled.phi.set(1, 1, Q.of(2));
    auto cone = mapping_cone(doubled);
    cone.assert_complex();
    auto h = homology(cone, cone.window_lo + 1, cone.window_hi - 1);
    for (auto& [q, betti] : h.betti) CHECK(betti == 0);
}
