#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "coalgebra.hpp"

namespace coweq {

// ---------------------------------------------------------------------------
// Arity-one counital coalgebras, hosted in the Cooperad type so they can serve
// as twisting-morphism sources. The single slice carries the elements with
// their genuine degrees and weights, delta[{1,1,1}] stores the full coproduct,
// and dual is the transpose algebra used as the independent cross-check route.
// ---------------------------------------------------------------------------

// elements: (label, degree, weight); coproduct rows: (x, a, b, coeff) giving
// the full coproduct of x including the counit terms x(x)1 and 1(x)x.
inline Cooperad counital_coalgebra(
    const std::string& name, const Field& field,
    const std::vector<std::tuple<std::string, int, int>>& elements, const std::string& counit,
    const std::vector<std::tuple<std::string, std::string, std::string, long long>>& coproduct) {
    Cooperad c;
    c.name = name;
    c.field = field;
    c.dual_kind = OperadKind::General;
    c.max_arity = 1;
    c.lower_bound_slope = 0;
    c.slices.assign(2, GradedBasis{});
    for (const auto& [label, degree, weight] : elements) c.slices[1].add(label, degree, weight);
    c.coaug_index = c.slices[1].at(counit);
    c.act.assign(2, {});
    int dim = c.slices[1].size();
    auto& table = c.delta[{1, 1, 1}];
    table.assign(dim, {});
    for (const auto& [x, a, b, coeff] : coproduct)
        table[c.slices[1].at(x)].push_back(
            {c.slices[1].at(a), c.slices[1].at(b), field.of(coeff)});

    c.dual.kind = OperadKind::General;
    c.dual.name = name + "^dual";
    c.dual.field = field;
    c.dual.max_arity = 1;
    c.dual.lower_bound_slope = 0;
    c.dual.unit_index = c.coaug_index;
    c.dual.slices = c.slices;
    c.dual.act.assign(2, {});
    auto& product = c.dual.tables[{1, 1, 1}];
    product.assign(dim, std::vector<SparseVec>(dim));
    for (int x = 0; x < dim; ++x)
        for (const CoTerm& t : table[x]) sv_add(product[t.a][t.b], x, t.coeff);
    return c;
}

inline std::vector<std::string> check_counital(const Cooperad& c) {
    std::vector<std::string> report;
    auto complain = [&](const std::string& msg) {
        if (report.size() < 50) report.push_back(c.name + ": " + msg);
    };
    if (c.max_arity != 1 || c.dim(1) == 0) {
        complain("a counital coalgebra is concentrated in arity 1");
        return report;
    }
    const GradedBasis& b = c.slices[1];
    int dim = b.size();
    if (c.coaug_index < 0 || c.coaug_index >= dim) {
        complain("counit index out of range");
        return report;
    }
    const BasisElement& one = b.elements[c.coaug_index];
    if (one.degree != 0 || one.weight != 0)
        complain("the counit must sit in degree 0 and weight 0");
    for (int x = 0; x < dim; ++x)
        if (x != c.coaug_index && b.elements[x].weight < 1)
            complain("positive weight required for " + b.elements[x].label +
                     "; the weight grading certifies conilpotence");
    auto it = c.delta.find({1, 1, 1});
    if (it == c.delta.end() || static_cast<int>(it->second.size()) != dim) {
        complain("coproduct table missing or mis-sized");
        return report;
    }
    const auto& table = it->second;

    for (int x = 0; x < dim; ++x) {
        SparseVec left, right;
        for (const CoTerm& t : table[x]) {
            if (b.elements[t.a].degree + b.elements[t.b].degree != b.elements[x].degree)
                complain("coproduct degree additivity fails on " + b.elements[x].label);
            if (b.elements[t.a].weight + b.elements[t.b].weight != b.elements[x].weight)
                complain("coproduct weight additivity fails on " + b.elements[x].label);
            if (t.a == c.coaug_index) sv_add(left, t.b, t.coeff);
            if (t.b == c.coaug_index) sv_add(right, t.a, t.coeff);
        }
        SparseVec ex{{x, c.field.one()}};
        if (!sv_sub(left, ex).empty())
            complain("left counit law fails on " + b.elements[x].label);
        if (!sv_sub(right, ex).empty())
            complain("right counit law fails on " + b.elements[x].label);
    }

    for (int x = 0; x < dim; ++x) {
        std::map<std::tuple<int, int, int>, Scalar> lhs, rhs;
        auto put = [](std::map<std::tuple<int, int, int>, Scalar>& acc, int i, int j, int k,
                      const Scalar& v) {
            auto [it2, fresh] = acc.emplace(std::make_tuple(i, j, k), v);
            if (!fresh) it2->second += v;
        };
        for (const CoTerm& t : table[x]) {
            for (const CoTerm& s : table[t.a]) put(lhs, s.a, s.b, t.b, t.coeff * s.coeff);
            for (const CoTerm& s : table[t.b]) put(rhs, t.a, s.a, s.b, t.coeff * s.coeff);
        }
        for (auto* acc : {&lhs, &rhs})
            for (auto it2 = acc->begin(); it2 != acc->end();)
                it2 = it2->second.is_zero() ? acc->erase(it2) : std::next(it2);
        if (lhs != rhs) complain("coassociativity fails on " + b.elements[x].label);
    }

    // Independent route: the transpose tables must form an associative unital
    // algebra, and must actually be the transpose of the stored coproduct.
    if (c.dual.dim(1) != dim || c.dual.unit_index != c.coaug_index) {
        complain("dual algebra shape disagrees with the coalgebra");
        return report;
    }
    std::map<std::array<int, 3>, std::vector<std::vector<SparseVec>>> expected;
    auto& product = expected[{1, 1, 1}];
    product.assign(dim, std::vector<SparseVec>(dim));
    for (int x = 0; x < dim; ++x)
        for (const CoTerm& t : table[x]) sv_add(product[t.a][t.b], x, t.coeff);
    auto stored = c.dual.tables.find({1, 1, 1});
    if (stored == c.dual.tables.end()) {
        complain("dual algebra table missing");
        return report;
    }
    for (int a = 0; a < dim; ++a)
        for (int bb = 0; bb < dim; ++bb)
            if (!sv_sub(product[a][bb], stored->second[a][bb]).empty())
                complain("dual product is not the transpose of the coproduct at " +
                         b.elements[a].label + " * " + b.elements[bb].label);
    for (const std::string& msg : check_axioms(c.dual, 1)) complain("dual algebra: " + msg);
    return report;
}

// The subcoalgebra of the cofree counital coalgebra on two degree-1 variables
// spanned by 1, mu, nu, and eta = mu(x)nu - nu(x)mu; its transpose is the
// exterior algebra on two generators.
inline Cooperad ext2_coalgebra(const Field& field = Field(0)) {
    return counital_coalgebra("ext2", field,
                              {{"1", 0, 0}, {"mu", 1, 1}, {"nu", 1, 1}, {"eta", 2, 2}}, "1",
                              {{"1", "1", "1", 1},
                               {"mu", "mu", "1", 1},
                               {"mu", "1", "mu", 1},
                               {"nu", "nu", "1", 1},
                               {"nu", "1", "nu", 1},
                               {"eta", "eta", "1", 1},
                               {"eta", "1", "eta", 1},
                               {"eta", "mu", "nu", 1},
                               {"eta", "nu", "mu", -1}});
}

// ---------------------------------------------------------------------------
// Twisting morphisms: arity-wise degree -1 maps from the coaugmentation
// coideal of a cooperad into an operad.
// ---------------------------------------------------------------------------

struct TwistingMorphism {
    Cooperad source;
    Operad target;
    std::string name;
    bool koszul_flag = false;
    // images[n][x]: the image of source basis element x of arity n.
    std::vector<std::vector<SparseVec>> images;
    // What the Maurer-Cartan validation covered at construction time.
    std::vector<std::string> mc_notes;

    SparseVec apply(int n, const SparseVec& v) const {
        SparseVec out;
        for (const auto& [x, c] : v) axpy(out, c, images[n][x]);
        return out;
    }
};

inline std::vector<std::string> structural_report(const TwistingMorphism& alpha) {
    std::vector<std::string> report;
    auto complain = [&](const std::string& msg) {
        if (report.size() < 50) report.push_back(alpha.name + ": " + msg);
    };
    if (static_cast<int>(alpha.images.size()) != alpha.source.max_arity + 1) {
        complain("images must cover every source arity");
        return report;
    }
    for (int n = 1; n <= alpha.source.max_arity; ++n)
        if (static_cast<int>(alpha.images[n].size()) != alpha.source.dim(n)) {
            complain("image table mis-sized at arity " + std::to_string(n));
            return report;
        }
    if (!alpha.images[1][alpha.source.coaug_index].empty())
        complain("the image must vanish on the coaugmentation");
    for (int n = 1; n <= alpha.source.max_arity; ++n) {
        for (int x = 0; x < alpha.source.dim(n); ++x) {
            if (alpha.images[n][x].empty()) continue;
            if (n > alpha.target.max_arity) {
                complain("nonzero image at arity " + std::to_string(n) +
                         " beyond the target's constructed range");
                continue;
            }
            int want = alpha.source.slices[n].elements[x].degree - 1;
            for (const auto& [t, c] : alpha.images[n][x])
                if (alpha.target.slices[n].elements[t].degree != want)
                    complain("image of " + alpha.source.slices[n].elements[x].label +
                             " is not of degree " + std::to_string(want));
        }
        for (int j = 1; j < n && n <= alpha.target.max_arity; ++j) {
            for (int x = 0; x < alpha.source.dim(n); ++x) {
                SparseVec ex{{x, alpha.source.field.one()}};
                SparseVec lhs = alpha.apply(n, alpha.source.act_transposition(n, j, ex));
                SparseVec rhs = alpha.target.act_transposition(n, j, alpha.images[n][x]);
                if (!sv_sub(lhs, rhs).empty())
                    complain("equivariance fails on " +
                             alpha.source.slices[n].elements[x].label + " generator " +
                             std::to_string(j));
            }
        }
    }
    return report;
}

// For an arity-one source the Maurer-Cartan equation is checked in closed
// form: sum over the coproduct of coeff * (-1)^{deg a} * alpha(a) * alpha(b)
// must vanish in the target algebra for every element. Operadic sources are
// covered by the d^2 probes on cofree coalgebras downstream.
inline std::vector<std::string> counital_mc_report(const TwistingMorphism& alpha) {
    std::vector<std::string> report;
    if (alpha.source.max_arity != 1) return report;
    for (int x = 0; x < alpha.source.dim(1); ++x) {
        SparseVec residual;
        for (const CoTerm& t : alpha.source.cocompose(1, 1, 1, x)) {
            SparseVec prod = alpha.target.compose_vec(1, alpha.images[1][t.a], 1, 1,
                                                      alpha.images[1][t.b]);
            int deg_a = alpha.source.slices[1].elements[t.a].degree;
            Scalar sign = alpha.target.sign_scalar(((deg_a % 2) + 2) % 2);
            axpy(residual, t.coeff * sign, prod);
        }
        if (!residual.empty()) {
            std::string terms;
            for (const auto& [p, c] : residual) {
                if (!terms.empty()) terms += " + ";
                terms += c.str() + "*" + alpha.target.slices[1].elements[p].label;
            }
            report.push_back(alpha.name + ": Maurer-Cartan residual nonzero on " +
                             alpha.source.slices[1].elements[x].label + ": " + terms);
            if (report.size() >= 50) break;
        }
    }
    return report;
}

inline TwistingMorphism make_twisting(Cooperad source, Operad target, const std::string& name,
                                      std::vector<std::vector<SparseVec>> images,
                                      bool koszul_flag = false) {
    TwistingMorphism alpha;
    alpha.source = std::move(source);
    alpha.target = std::move(target);
    alpha.name = name;
    alpha.koszul_flag = koszul_flag;
    alpha.images = std::move(images);
    std::vector<std::string> report = structural_report(alpha);
    if (!report.empty()) throw validation_error(report.front());
    report = counital_mc_report(alpha);
    if (!report.empty()) throw validation_error(report.front());
    if (alpha.source.max_arity == 1)
        alpha.mc_notes.push_back("Maurer-Cartan residual verified directly on every element");
    else
        alpha.mc_notes.push_back(
            "structural laws verified; Maurer-Cartan enforced by d^2 probes on cofree "
            "coalgebras");
    return alpha;
}

inline Operad unit_operad_extended(int max_arity, const Field& field) {
    Operad u = preset_operad("Unit", 1, field);
    u.max_arity = max_arity;
    u.slices.resize(max_arity + 1);
    u.act.assign(max_arity + 1, {});
    for (int n = 1; n <= max_arity; ++n) u.act[n].assign(std::max(0, n - 1), {});
    return u;
}

// bound is the operadic arity cap for the coassociative-source presets and the
// monomial degree cap for the cochain presets.
inline TwistingMorphism preset_twisting(const std::string& name, int bound,
                                        const Field& field = Field(0)) {
    auto empty_images = [](const Cooperad& c) {
        std::vector<std::vector<SparseVec>> images(c.max_arity + 1);
        for (int n = 1; n <= c.max_arity; ++n) images[n].resize(c.dim(n));
        return images;
    };
    if (name == "kappa_ass" || name == "beta" || name == "epsilon") {
        if (bound < 2)
            throw validation_error("preset_twisting: " + name + " needs arity bound >= 2");
        Cooperad source = linear_dual_cooperad(preset_operad("Ass", bound, field), bound);
        auto images = empty_images(source);
        if (name == "epsilon")
            return make_twisting(std::move(source), unit_operad_extended(bound, field), name,
                                 std::move(images), false);
        Operad target = operadic_desuspension(
            preset_operad(name == "kappa_ass" ? "Ass" : "Com", bound, field));
        int id2 = source.slices[2].at("a2:12");
        int tau2 = source.slices[2].at("a2:21");
        if (name == "kappa_ass") {
            sv_add(images[2][id2], target.slices[2].at("a2:12"), field.one());
            sv_add(images[2][tau2], target.slices[2].at("a2:21"), -field.one());
        } else {
            sv_add(images[2][id2], target.slices[2].at("c2"), field.one());
            sv_add(images[2][tau2], target.slices[2].at("c2"), -field.one());
        }
        return make_twisting(std::move(source), std::move(target), name, std::move(images),
                             name == "kappa_ass");
    }
    if (name == "kappa_lie") {
        if (bound < 2)
            throw validation_error("preset_twisting: kappa_lie needs arity bound >= 2");
        int lie_bound = std::min(bound, 6);
        Cooperad source =
            linear_dual_cooperad(preset_operad("Lie", lie_bound, field), lie_bound);
        Operad target = operadic_desuspension(preset_operad("Com", bound, field));
        auto images = empty_images(source);
        sv_add(images[2][source.slices[2].at("l2:12")], target.slices[2].at("c2"),
               field.one());
        return make_twisting(std::move(source), std::move(target), name, std::move(images),
                             true);
    }
    if (name == "kappa_cochain" || name == "alpha_cochain" || name == "epsilon_cochain") {
        Cooperad source = ext2_coalgebra(field);
        auto images = empty_images(source);
        if (name == "epsilon_cochain")
            return make_twisting(std::move(source), polynomial_operad({}, 0, field), name,
                                 std::move(images), false);
        Operad target = name == "kappa_cochain" ? polynomial_operad({"x", "y"}, bound, field)
                                                : polynomial_operad({"x"}, bound, field);
        sv_add(images[1][source.slices[1].at("mu")], target.slices[1].at("x"), field.one());
        if (name == "kappa_cochain")
            sv_add(images[1][source.slices[1].at("nu")], target.slices[1].at("y"),
                   field.one());
        return make_twisting(std::move(source), std::move(target), name, std::move(images),
                             name == "kappa_cochain");
    }
    throw validation_error("preset_twisting: unknown preset " + name);
}

// ---------------------------------------------------------------------------
// Functorial composition.
// ---------------------------------------------------------------------------

inline OperadMap operad_map_composite(const OperadMap& f, const OperadMap& g) {
    if (g.source.name != f.target.name)
        throw validation_error("operad_map_composite: " + g.source.name +
                               " does not match " + f.target.name);
    OperadMap out;
    out.source = f.source;
    out.target = g.target;
    out.name = f.name + ";" + g.name;
    out.images.assign(f.images.size(), {});
    for (int n = 1; n <= f.source.max_arity; ++n) {
        out.images[n].resize(f.source.dim(n));
        for (int a = 0; a < f.source.dim(n); ++a) out.images[n][a] = g.apply(n, f.images[n][a]);
    }
    return out;
}

inline CooperadMap cooperad_map_composite(const CooperadMap& f, const CooperadMap& g) {
    if (g.source.name != f.target.name)
        throw validation_error("cooperad_map_composite: " + g.source.name +
                               " does not match " + f.target.name);
    CooperadMap out;
    out.source = f.source;
    out.target = g.target;
    out.name = f.name + ";" + g.name;
    out.images.assign(f.images.size(), {});
    for (int n = 1; n <= f.source.max_arity; ++n) {
        out.images[n].resize(f.source.dim(n));
        for (int x = 0; x < f.source.dim(n); ++x)
            if (n <= std::min(f.target.max_arity, g.source.max_arity))
                out.images[n][x] = g.apply(n, f.images[n][x]);
    }
    return out;
}

inline TwistingMorphism compose_with_operad_map(const TwistingMorphism& alpha,
                                                const OperadMap& f) {
    if (f.source.name != alpha.target.name)
        throw validation_error("compose_with_operad_map: map source " + f.source.name +
                               " does not match twisting target " + alpha.target.name);
    std::vector<std::vector<SparseVec>> images(alpha.source.max_arity + 1);
    for (int n = 1; n <= alpha.source.max_arity; ++n) {
        images[n].resize(alpha.source.dim(n));
        for (int x = 0; x < alpha.source.dim(n); ++x)
            images[n][x] = f.apply(n, alpha.images[n][x]);
    }
    return make_twisting(alpha.source, f.target, alpha.name + ";" + f.name, std::move(images),
                         false);
}

inline TwistingMorphism precompose_with_cooperad_map(const CooperadMap& f,
                                                     const TwistingMorphism& alpha) {
    if (f.target.name != alpha.source.name)
        throw validation_error("precompose_with_cooperad_map: map target " + f.target.name +
                               " does not match twisting source " + alpha.source.name);
    std::vector<std::vector<SparseVec>> images(f.source.max_arity + 1);
    for (int n = 1; n <= f.source.max_arity; ++n) {
        images[n].resize(f.source.dim(n));
        for (int x = 0; x < f.source.dim(n); ++x) {
            if (n <= alpha.source.max_arity) {
                images[n][x] = alpha.apply(n, f.images[n][x]);
            } else if (!f.images[n][x].empty()) {
                throw validation_error(
                    "precompose_with_cooperad_map: nonzero image at arity " +
                    std::to_string(n) + " beyond the twisting source's constructed range");
            }
        }
    }
    return make_twisting(f.source, alpha.target, f.name + ";" + alpha.name, std::move(images),
                         false);
}

inline bool same_images(const TwistingMorphism& a, const TwistingMorphism& b) {
    if (a.source.max_arity != b.source.max_arity) return false;
    for (int n = 1; n <= a.source.max_arity; ++n) {
        if (a.source.dim(n) != b.source.dim(n)) return false;
        for (int x = 0; x < a.source.dim(n); ++x)
            if (!sv_sub(a.images[n][x], b.images[n][x]).empty()) return false;
    }
    return true;
}

}  // namespace coweq
