#pragma once

// Cobar complexes of conilpotent coalgebras along twisting morphisms, with
// homology comparison across weight truncations and boundary-span survival
// certificates for individual classes.

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "coweq/coalgebra.hpp"
#include "coweq/twisting.hpp"

namespace coweq {

// Degree window wide enough that every occupied degree of a weight-truncated
// word basis is certified, yet safe under the +-1 arithmetic of cones.
inline constexpr int cobar_window_unbounded_lo = -(1 << 30);
inline constexpr int cobar_window_unbounded_hi = 1 << 30;

// A free-algebra word carried outside any fixed basis: an operad element at
// arity letters.size() together with letter indices into the coalgebra
// generators.
struct WordTerm {
    int p_idx = 0;
    std::vector<int> letters;
    Scalar coeff;
};

inline std::string render_combination(const GradedBasis& basis, const SparseVec& v) {
    if (v.empty()) return "0";
    std::string s;
    for (const auto& [i, c] : v) {
        if (!s.empty()) s += " + ";
        s += c.str() + "*" + basis.elements[i].label;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Reduction of raw words to the canonical coinvariant word basis.
// ---------------------------------------------------------------------------

// Rewrites a word term into the representative enumerated by
// free_algebra_basis: identity permutation for tensor-type operads, letters
// sorted ascending for symmetric-type ones. Returns nothing when the
// coinvariant class is forced to zero by a repeated odd-degree letter.
inline std::optional<WordTerm> canonical_word(const Operad& p, const GradedBasis& gens,
                                              WordTerm t) {
    if (t.coeff.is_zero()) return std::nullopt;
    int k = static_cast<int>(t.letters.size());
    auto odd_pair = [&](int a, int b) {
        return gens.elements[a].degree % 2 != 0 && gens.elements[b].degree % 2 != 0;
    };
    auto move_down = [&](int j) {
        SparseVec moved = p.act_transposition(k, j, SparseVec{{t.p_idx, t.coeff}});
        t.p_idx = moved.begin()->first;
        t.coeff = moved.begin()->second;
        if (odd_pair(t.letters[j - 1], t.letters[j])) t.coeff = -t.coeff;
        std::swap(t.letters[j - 1], t.letters[j]);
    };
    switch (p.kind) {
        case OperadKind::Polynomial:
            if (k != 1)
                throw validation_error("canonical_word: polynomial-type words carry one letter");
            return t;
        case OperadKind::Tensor: {
            while (true) {
                const Perm& sigma = p.perm_of[k][t.p_idx];
                int descent = 0;
                for (int j = 1; j < k; ++j)
                    if (sigma[j - 1] > sigma[j]) {
                        descent = j;
                        break;
                    }
                if (descent == 0) break;
                move_down(descent);
            }
            return t;
        }
        case OperadKind::Symmetric: {
            for (int pass = k - 1; pass >= 1; --pass)
                for (int j = 1; j <= pass; ++j)
                    if (t.letters[j - 1] > t.letters[j]) move_down(j);
            for (int j = 1; j < k; ++j)
                if (t.letters[j - 1] == t.letters[j]) {
                    int deg = gens.elements[t.letters[j]].degree;
                    if (p.field.p != 2 && (p.desusp + deg) % 2 != 0) return std::nullopt;
                }
            return t;
        }
        default:
            throw validation_error("canonical_word: explicit-table operads are not supported");
    }
}

// Canonical forms whose degree falls outside [deg_lo, deg_hi] are dropped;
// the word basis carries the same window, so only a form that should be
// present can be missing.
inline void reduce_word_into(SparseVec& out, const FreeAlgebraBasis& fab, const Operad& p,
                             const GradedBasis& gens, WordTerm t,
                             int deg_lo = cobar_window_unbounded_lo,
                             int deg_hi = cobar_window_unbounded_hi) {
    std::optional<WordTerm> c = canonical_word(p, gens, std::move(t));
    if (!c) return;
    std::string label;
    int degree;
    if (p.kind == OperadKind::Polynomial) {
        const BasisElement& mono = p.slices[1].elements[c->p_idx];
        label = mono.label == "1" ? gens.elements[c->letters[0]].label
                                  : mono.label + "|" + gens.elements[c->letters[0]].label;
        degree = mono.degree + gens.elements[c->letters[0]].degree;
    } else {
        label = tilde_word_label(gens, c->letters);
        degree = -p.desusp * (static_cast<int>(c->letters.size()) - 1);
        for (int i : c->letters) degree += gens.elements[i].degree;
    }
    if (degree < deg_lo || degree > deg_hi) return;
    int idx = fab.basis.find(label);
    if (idx < 0)
        throw validation_error("reduce_word: canonical form " + label +
                               " is missing from the word basis");
    sv_add(out, idx, c->coeff);
}

// ---------------------------------------------------------------------------
// The twisted differential on words, as raw terms.
// ---------------------------------------------------------------------------

// Derivation extension of the coalgebra differential: acts in one slot with
// the sign of the operad part and the letters passed over.
inline std::vector<WordTerm> slot_differential_terms(const Operad& target,
                                                     const CoalgebraPresentation& x, int p_idx,
                                                     const std::vector<int>& letters) {
    int k = static_cast<int>(letters.size());
    int pdeg = target.slices[k].elements[p_idx].degree;
    std::vector<WordTerm> out;
    int prefix = 0;
    for (int i = 1; i <= k; ++i) {
        int g = letters[i - 1];
        for (const auto& [h, c] : x.d.columns[g]) {
            WordTerm t;
            t.p_idx = p_idx;
            t.letters = letters;
            t.letters[i - 1] = h;
            t.coeff = c * target.sign_scalar(pdeg + prefix);
            out.push_back(std::move(t));
        }
        prefix += x.generators.elements[g].degree;
    }
    return out;
}

// Derivation extension of the twisting morphism: grafts the image of each
// decomposition term into one slot. Grafts whose word would exceed max_len
// letters are dropped, which realizes the weight-truncated quotient.
inline std::vector<WordTerm> graft_terms(const TwistingMorphism& alpha,
                                         const CoalgebraPresentation& x, int p_idx,
                                         const std::vector<int>& letters, int max_len) {
    const Operad& target = alpha.target;
    int k = static_cast<int>(letters.size());
    int pdeg = target.slices[k].elements[p_idx].degree;
    std::vector<WordTerm> out;
    int prefix = 0;
    for (int i = 1; i <= k; ++i) {
        int g = letters[i - 1];
        for (const DecompTerm& raw : x.decomposition[g]) {
            for (const DecompTerm& u : norm_expand(x.cooperad, x.generators, raw)) {
                int m = static_cast<int>(u.letters.size());
                if (k + m - 1 > max_len) continue;
                if (m >= static_cast<int>(alpha.images.size()))
                    throw validation_error(
                        "cobar: a decomposition term of " + x.generators.elements[g].label +
                        " has arity " + std::to_string(m) +
                        " beyond the twisting morphism's constructed range");
                const SparseVec& image = alpha.images[m][u.c_idx];
                if (image.empty()) continue;
                for (const auto& [q, cq] : image) {
                    int qdeg = target.slices[m].elements[q].degree;
                    Scalar outer = u.coeff * cq * target.sign_scalar(pdeg + (1 + qdeg) * prefix);
                    for (const auto& [p2, cc] : target.compose(k, p_idx, i, m, q)) {
                        WordTerm t;
                        t.p_idx = p2;
                        t.letters.reserve(k + m - 1);
                        t.letters.insert(t.letters.end(), letters.begin(),
                                         letters.begin() + (i - 1));
                        t.letters.insert(t.letters.end(), u.letters.begin(), u.letters.end());
                        t.letters.insert(t.letters.end(), letters.begin() + i, letters.end());
                        t.coeff = outer * cc;
                        if (!t.coeff.is_zero()) out.push_back(std::move(t));
                    }
                }
            }
        }
        prefix += x.generators.elements[g].degree;
    }
    return out;
}

inline std::vector<WordTerm> differential_terms(const TwistingMorphism& alpha,
                                                const CoalgebraPresentation& x, int p_idx,
                                                const std::vector<int>& letters, int max_len) {
    std::vector<WordTerm> out = slot_differential_terms(alpha.target, x, p_idx, letters);
    for (WordTerm& t : graft_terms(alpha, x, p_idx, letters, max_len))
        out.push_back(std::move(t));
    return out;
}

// ---------------------------------------------------------------------------
// Cobar complexes.
// ---------------------------------------------------------------------------

struct CobarComplex {
    TwistingMorphism twisting;
    CoalgebraPresentation input;
    int max_weight = 0;
    FreeAlgebraBasis fab;
    LinearMap d1;  // from the coalgebra differential; preserves word length
    LinearMap d2;  // from the twisted decomposition grafts
    LinearMap d;   // d1 + d2
    int window_lo = cobar_window_unbounded_lo;
    int window_hi = cobar_window_unbounded_hi;

    ChainComplexSlice slice() const {
        ChainComplexSlice s;
        s.basis = fab.basis;
        s.d = d;
        s.window_lo = window_lo;
        s.window_hi = window_hi;
        return s;
    }

    bool preserves_word_length() const {
        for (int j = 0; j < fab.basis.size(); ++j)
            for (const auto& [i, c] : d.columns[j])
                if (fab.basis.elements[i].weight != fab.basis.elements[j].weight) return false;
        return true;
    }

    SparseVec reduce(const WordTerm& t) const {
        if (static_cast<int>(t.letters.size()) > max_weight)
            throw validation_error("reduce: the word exceeds the weight truncation");
        SparseVec out;
        reduce_word_into(out, fab, twisting.target, input.generators, t, window_lo, window_hi);
        return out;
    }
};

inline CobarComplex cobar_complex(const TwistingMorphism& alpha, const CoalgebraPresentation& x,
                                  int max_weight, int window_lo = cobar_window_unbounded_lo,
                                  int window_hi = cobar_window_unbounded_hi) {
    if (max_weight < 1) throw validation_error("cobar_complex: max_weight must be at least 1");
    if (window_lo >= window_hi)
        throw validation_error("cobar_complex: the degree window is empty");
    if (alpha.source.name != x.cooperad.name)
        throw validation_error("cobar_complex: twisting morphism source " + alpha.source.name +
                               " does not match the coalgebra's cooperad " + x.cooperad.name);
    int shared = std::min(alpha.source.max_arity, x.cooperad.max_arity);
    for (int n = 1; n <= shared; ++n) {
        if (alpha.source.slices[n].size() != x.cooperad.slices[n].size())
            throw validation_error(
                "cobar_complex: the twisting source and the coalgebra's cooperad disagree at "
                "arity " +
                std::to_string(n));
        for (int a = 0; a < alpha.source.slices[n].size(); ++a)
            if (alpha.source.slices[n].elements[a].label != x.cooperad.slices[n].elements[a].label)
                throw validation_error(
                    "cobar_complex: the twisting source and the coalgebra's cooperad disagree "
                    "at arity " +
                    std::to_string(n));
    }
    if (alpha.target.kind != OperadKind::Polynomial && max_weight > alpha.target.max_arity)
        throw validation_error(
            "cobar_complex: the weight cap exceeds the constructed arity range of " +
            alpha.target.name);

    CobarComplex c;
    c.twisting = alpha;
    c.input = x;
    c.max_weight = max_weight;
    c.window_lo = window_lo;
    c.window_hi = window_hi;
    c.fab = free_algebra_basis(alpha.target, x.generators, max_weight, alpha.target.field,
                               window_lo == cobar_window_unbounded_lo ? unbounded_below
                                                                      : window_lo,
                               window_hi == cobar_window_unbounded_hi ? unbounded_above
                                                                      : window_hi);
    c.d1 = LinearMap(c.fab.basis, c.fab.basis, -1);
    c.d2 = LinearMap(c.fab.basis, c.fab.basis, -1);
    for (int j = 0; j < c.fab.basis.size(); ++j) {
        const FreeWord& w = c.fab.words[j];
        SparseVec col1;
        for (const WordTerm& t :
             slot_differential_terms(alpha.target, x, w.p_index, w.letters))
            reduce_word_into(col1, c.fab, alpha.target, x.generators, t, window_lo, window_hi);
        for (const auto& [i, v] : col1) c.d1.add_to(i, j, v);
        SparseVec col2;
        for (const WordTerm& t : graft_terms(alpha, x, w.p_index, w.letters, max_weight))
            reduce_word_into(col2, c.fab, alpha.target, x.generators, t, window_lo, window_hi);
        for (const auto& [i, v] : col2) c.d2.add_to(i, j, v);
    }
    c.d = LinearMap(c.fab.basis, c.fab.basis, -1);
    for (int j = 0; j < c.fab.basis.size(); ++j) {
        SparseVec col = c.d1.columns[j];
        axpy(col, alpha.target.field.one(), c.d2.columns[j]);
        c.d.columns[j] = std::move(col);
    }
    // d^2 is certified on the degrees where both applications stay inside the
    // window, matching d_squared_witness.
    for (int j = 0; j < c.fab.basis.size(); ++j) {
        if (c.fab.basis.elements[j].degree < window_lo + 2) continue;
        SparseVec twice = c.d.apply(c.d.columns[j]);
        if (!twice.empty())
            throw validation_error("cobar_complex: d^2 fails on " +
                                   c.fab.basis.elements[j].label + ": " +
                                   render_combination(c.fab.basis, twice));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Maurer-Cartan probes for operadic sources.
// ---------------------------------------------------------------------------

struct McReport {
    std::vector<std::string> problems;
    std::vector<std::string> notes;
};

inline std::string render_word_term(const Operad& target, const GradedBasis& gens,
                                    const WordTerm& t) {
    std::string s = t.coeff.str() + "*" +
                    target.slices[t.letters.size()].elements[t.p_idx].label + "(";
    for (size_t i = 0; i < t.letters.size(); ++i) {
        if (i) s += ",";
        s += gens.elements[t.letters[i]].label;
    }
    return s + ")";
}

// Squares the twisted differential on every one-letter word of a probe
// coalgebra. The differential is a derivation, so vanishing on one-letter
// words forces vanishing everywhere; one-letter squares stay within the
// generator's weight, so no graft is ever dropped.
inline void mc_probe(const TwistingMorphism& alpha, const CoalgebraPresentation& x,
                     const std::string& tag, std::vector<std::string>& problems) {
    int cap = alpha.target.kind == OperadKind::Polynomial ? INT_MAX / 2
                                                          : alpha.target.max_arity;
    for (int g = 0; g < x.generators.size(); ++g) {
        std::map<std::pair<int, std::vector<int>>, Scalar> acc;
        for (const WordTerm& t1 :
             differential_terms(alpha, x, alpha.target.unit_index, {g}, cap))
            for (WordTerm t2 : differential_terms(alpha, x, t1.p_idx, t1.letters, cap)) {
                t2.coeff = t2.coeff * t1.coeff;
                if (std::optional<WordTerm> c =
                        canonical_word(alpha.target, x.generators, std::move(t2))) {
                    auto key = std::make_pair(c->p_idx, c->letters);
                    auto it = acc.find(key);
                    if (it == acc.end()) {
                        acc.emplace(key, c->coeff);
                    } else {
                        it->second = it->second + c->coeff;
                        if (it->second.is_zero()) acc.erase(it);
                    }
                }
            }
        if (!acc.empty()) {
            std::string terms;
            for (const auto& [key, coeff] : acc) {
                if (!terms.empty()) terms += " + ";
                terms += render_word_term(alpha.target, x.generators,
                                          WordTerm{key.first, key.second, coeff});
            }
            problems.push_back("d^2 fails on the " + tag + " probe at " +
                               x.generators.elements[g].label + ": " + terms);
            return;
        }
    }
}

// Checks the Maurer-Cartan equation as far as the constructed arity range
// allows. Arity-one sources admit a complete element-by-element residual;
// operadic sources are probed through squares of the twisted differential on
// cofree coalgebras.
inline McReport maurer_cartan_report(const TwistingMorphism& alpha) {
    McReport rep;
    if (alpha.source.max_arity <= 1) {
        rep.problems = counital_mc_report(alpha);
        if (rep.problems.empty())
            rep.notes.push_back("Maurer-Cartan residual verified directly on every element");
        return rep;
    }
    const Field& field = alpha.target.field;
    int w = std::min({4, alpha.source.max_arity, alpha.target.max_arity});
    if (w < 2) {
        rep.notes.push_back(
            "no probe: the constructed arity range has no room for decompositions");
        return rep;
    }
    auto probe_arities = "arities 2 through " + std::to_string(w);
    switch (alpha.source.dual_kind) {
        case OperadKind::Tensor: {
            mc_probe(alpha, cofree_conilpotent(alpha.source, {{"a", 1}, {"b", 2}}, w),
                     "deconcatenation", rep.problems);
            mc_probe(alpha, cofree_conilpotent(alpha.source, {{"a", 2}, {"b", 3}}, w),
                     "shifted deconcatenation", rep.problems);
            if (rep.problems.empty())
                rep.notes.push_back("d^2 vanishes on cofree probes through " + probe_arities);
            break;
        }
        case OperadKind::Symmetric: {
            try {
                mc_probe(alpha, cofree_conilpotent(alpha.source, {{"t", 2}, {"s", 3}}, w),
                         "symmetric cofree", rep.problems);
                if (rep.problems.empty())
                    rep.notes.push_back("d^2 vanishes on a symmetric cofree probe through " +
                                        probe_arities);
            } catch (const validation_error& e) {
                rep.notes.push_back(std::string("probe skipped: ") + e.what());
            }
            break;
        }
        case OperadKind::General: {
            if (alpha.source.dual.name == "Lie") {
                Operad ass = preset_operad("Ass", alpha.source.max_arity, field);
                Cooperad assc = linear_dual_cooperad(ass, alpha.source.max_arity);
                CooperadMap to_bracket = cocommutator_map(assc, alpha.source);
                mc_probe(alpha,
                         pushforward(to_bracket,
                                     cofree_conilpotent(assc, {{"a", 1}, {"b", 2}}, w)),
                         "cocommutator pushforward", rep.problems);
                mc_probe(alpha,
                         pushforward(to_bracket,
                                     cofree_conilpotent(assc, {{"a", 2}, {"b", 3}}, w)),
                         "shifted cocommutator pushforward", rep.problems);
                if (rep.problems.empty())
                    rep.notes.push_back(
                        "d^2 vanishes on cocommutator pushforward probes through " +
                        probe_arities);
                break;
            }
            rep.problems.push_back(
                "no decomposition probe is implemented for a source of this kind");
            break;
        }
        default:
            rep.problems.push_back(
                "no decomposition probe is implemented for a source of this kind");
            break;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Word-wise extension of coalgebra morphisms.
// ---------------------------------------------------------------------------

inline LinearMap word_extension(const CobarComplex& a, const CobarComplex& b,
                                const CoalgebraMorphism& f) {
    LinearMap phi(a.fab.basis, b.fab.basis, 0);
    for (int j = 0; j < a.fab.basis.size(); ++j) {
        const FreeWord& w = a.fab.words[j];
        std::vector<std::pair<std::vector<int>, Scalar>> partial{
            {{}, a.twisting.target.field.one()}};
        for (int g : w.letters) {
            std::vector<std::pair<std::vector<int>, Scalar>> next;
            for (const auto& [ls, c] : partial)
                for (const auto& [h, ch] : f.images[g]) {
                    std::vector<int> ls2 = ls;
                    ls2.push_back(h);
                    next.emplace_back(std::move(ls2), c * ch);
                }
            partial = std::move(next);
            if (partial.empty()) break;
        }
        SparseVec col;
        for (auto& [ls, c] : partial)
            reduce_word_into(col, b.fab, b.twisting.target, b.input.generators,
                             WordTerm{w.p_index, std::move(ls), c}, b.window_lo, b.window_hi);
        for (const auto& [i, v] : col) phi.add_to(i, j, v);
    }
    for (int j = 0; j < a.fab.basis.size(); ++j) {
        SparseVec lhs = b.d.apply(phi.columns[j]);
        SparseVec rhs = phi.apply(a.d.columns[j]);
        if (!sv_sub(lhs, rhs).empty())
            throw validation_error("cobar_map: the word-wise extension of " + f.name +
                                   " fails to commute with the differentials at " +
                                   a.fab.basis.elements[j].label);
    }
    return phi;
}

inline ChainMap cobar_map(const TwistingMorphism& alpha, const CoalgebraMorphism& f,
                          int max_weight, int window_lo = cobar_window_unbounded_lo,
                          int window_hi = cobar_window_unbounded_hi) {
    std::vector<std::string> problems = f.validate();
    if (!problems.empty()) throw validation_error("cobar_map: " + problems.front());
    CobarComplex a = cobar_complex(alpha, f.source, max_weight, window_lo, window_hi);
    CobarComplex b = cobar_complex(alpha, f.target, max_weight, window_lo, window_hi);
    LinearMap phi = word_extension(a, b, f);
    return ChainMap{a.slice(), b.slice(), std::move(phi)};
}

// ---------------------------------------------------------------------------
// Functoriality along operad maps.
// ---------------------------------------------------------------------------

// Transports the cobar complex along an operad map out of the twisting target
// and compares it entry for entry with the cobar complex of the composed
// twisting morphism: the transport must commute with the differentials and
// reach every word of the composed side.
inline std::vector<std::string> functoriality_check(const TwistingMorphism& alpha,
                                                    const OperadMap& f,
                                                    const CoalgebraPresentation& x,
                                                    int max_weight) {
    std::vector<std::string> report;
    TwistingMorphism composed = compose_with_operad_map(alpha, f);
    CobarComplex a = cobar_complex(alpha, x, max_weight);
    CobarComplex b = cobar_complex(composed, x, max_weight);
    LinearMap t(a.fab.basis, b.fab.basis, 0);
    for (int j = 0; j < a.fab.basis.size(); ++j) {
        const FreeWord& w = a.fab.words[j];
        int k = static_cast<int>(w.letters.size());
        SparseVec col;
        for (const auto& [q, cq] : f.images[k][w.p_index])
            reduce_word_into(col, b.fab, composed.target, x.generators,
                             WordTerm{q, w.letters, cq}, b.window_lo, b.window_hi);
        for (const auto& [i, v] : col) t.add_to(i, j, v);
    }
    for (int j = 0; j < a.fab.basis.size() && report.size() < 20; ++j) {
        SparseVec lhs = b.d.apply(t.columns[j]);
        SparseVec rhs = t.apply(a.d.columns[j]);
        SparseVec diff = sv_sub(lhs, rhs);
        if (!diff.empty())
            report.push_back("differentials disagree under transport at " +
                             a.fab.basis.elements[j].label + ": " +
                             render_combination(b.fab.basis, diff));
    }
    std::vector<bool> hit(b.fab.basis.size(), false);
    for (int j = 0; j < a.fab.basis.size(); ++j)
        for (const auto& [i, v] : t.columns[j]) hit[i] = true;
    for (int i = 0; i < b.fab.basis.size(); ++i)
        if (!hit[i] && report.size() < 20)
            report.push_back("word " + b.fab.basis.elements[i].label +
                             " of the composed complex is never reached");
    return report;
}

// ---------------------------------------------------------------------------
// Weak-equivalence classification across weight truncations.
// ---------------------------------------------------------------------------

// Incremental echelon form that remembers how each accepted vector was
// reduced, so later vectors can be expressed over the accepted ones.
class SpanSolver {
public:
    // Returns the index assigned to v when it enlarges the span, -1 otherwise.
    int insert(const SparseVec& v) {
        SparseVec r = v;
        SparseVec combo;
        reduce(r, combo);
        if (r.empty()) return -1;
        Scalar inv = r.begin()->second.inverse();
        Row row;
        for (const auto& [i, c] : r) row.value.emplace(i, c * inv);
        SparseVec rc;
        axpy(rc, inv, combo);
        sv_add(rc, count_, inv);
        row.combo = std::move(rc);
        rows_.emplace(row.value.begin()->first, std::move(row));
        return count_++;
    }

    // Expresses v over the accepted vectors; throws when v is outside the span.
    SparseVec express(const SparseVec& v, const std::string& who) const {
        SparseVec r = v;
        SparseVec combo;
        reduce(r, combo);
        if (!r.empty())
            throw validation_error(who + ": a vector falls outside the tracked span");
        SparseVec out;
        for (const auto& [i, c] : combo) out.emplace(i, -c);
        return out;
    }

private:
    struct Row {
        SparseVec value;  // lead coefficient 1, keyed by its lead index
        SparseVec combo;  // value as a combination of accepted vectors
    };

    // Maintains r = v + sum combo[b] * accepted[b].
    void reduce(SparseVec& r, SparseVec& combo) const {
        while (!r.empty()) {
            auto it = rows_.find(r.begin()->first);
            if (it == rows_.end()) return;
            Scalar c = r.begin()->second;
            axpy(r, -c, it->second.value);
            axpy(combo, -c, it->second.combo);
        }
    }

    std::map<int, Row> rows_;
    int count_ = 0;
};

inline int decomposition_growth(const CoalgebraPresentation& x) {
    int growth = 0;
    for (const auto& terms : x.decomposition)
        for (const DecompTerm& t : terms)
            growth = std::max(growth, static_cast<int>(t.letters.size()) - 1);
    return growth;
}

// The weight-<=cap words together with the differential tails they generate,
// as a subcomplex of a host complex whose weight cap leaves room for the
// tails. Cutting the tails off instead would let classes bound that never
// bound in the full complex.
struct SpannedTruncation {
    GradedBasis basis;
    std::vector<SparseVec> carriers;  // each basis vector in host coordinates
    SpanSolver solver;
    ChainComplexSlice complex;
};

inline SpannedTruncation spanned_truncation(const CobarComplex& host, int cap) {
    if (host.max_weight < cap + decomposition_growth(host.input))
        throw validation_error(
            "spanned_truncation: the host is truncated at weight " +
            std::to_string(host.max_weight) + ", but images from weight " + std::to_string(cap) +
            " reach weight " + std::to_string(cap + decomposition_growth(host.input)));
    SpannedTruncation u;
    const GradedBasis& words = host.fab.basis;
    const Scalar one = host.twisting.target.field.one();
    for (int j = 0; j < words.size(); ++j) {
        const BasisElement& e = words.elements[j];
        if (e.weight > cap) continue;
        u.solver.insert(SparseVec{{j, one}});
        u.basis.add(e.label, e.degree, e.weight);
        u.carriers.push_back(SparseVec{{j, one}});
    }
    for (int j = 0; j < words.size(); ++j) {
        const BasisElement& e = words.elements[j];
        if (e.weight > cap || host.d.columns[j].empty()) continue;
        if (u.solver.insert(host.d.columns[j]) < 0) continue;
        u.basis.add("d(" + e.label + ")", e.degree - 1, e.weight);
        u.carriers.push_back(host.d.columns[j]);
    }
    LinearMap d(u.basis, u.basis, -1);
    for (int k = 0; k < u.basis.size(); ++k) {
        int deg = u.basis.elements[k].degree;
        if (deg < host.window_lo + 1 || deg > host.window_hi) continue;
        SparseVec img = host.d.apply(u.carriers[k]);
        if (img.empty()) continue;
        for (const auto& [i, c] : u.solver.express(img, "spanned_truncation"))
            d.add_to(i, k, c);
    }
    u.complex.basis = u.basis;
    u.complex.d = std::move(d);
    u.complex.window_lo = host.window_lo;
    u.complex.window_hi = host.window_hi;
    return u;
}

inline void check_schedule(const std::vector<int>& schedule, const std::string& who) {
    if (schedule.empty()) throw validation_error(who + ": empty truncation schedule");
    for (size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] < 1) throw validation_error(who + ": truncation levels must be >= 1");
        if (i > 0 && schedule[i] <= schedule[i - 1])
            throw validation_error(who + ": the truncation schedule must increase");
    }
}

struct WeqReport {
    std::string morphism;
    std::string twisting;
    std::vector<int> schedule;
    std::vector<QuasiIsoVerdict> verdicts;
    // Per level: both differentials preserve word length, so the verdict at
    // that level is already the untruncated one.
    std::vector<bool> exact;
    bool all_exact = false;
    int stability = 3;
    bool stabilized = false;
    QuasiIsoVerdict stable_verdict = QuasiIsoVerdict::window_insufficient;
};

inline WeqReport alpha_weq(const TwistingMorphism& alpha, const CoalgebraMorphism& f,
                           const std::vector<int>& schedule, int stability = 3,
                           int window_lo = cobar_window_unbounded_lo,
                           int window_hi = cobar_window_unbounded_hi) {
    check_schedule(schedule, "alpha_weq");
    if (stability < 1) throw validation_error("alpha_weq: stability must be >= 1");
    std::vector<std::string> problems = f.validate();
    if (!problems.empty()) throw validation_error("alpha_weq: " + problems.front());
    WeqReport rep;
    rep.morphism = f.name;
    rep.twisting = alpha.name;
    rep.schedule = schedule;
    rep.stability = stability;
    int grow = std::max(decomposition_growth(f.source), decomposition_growth(f.target));
    for (int cap : schedule) {
        CobarComplex a = cobar_complex(alpha, f.source, cap + grow, window_lo, window_hi);
        CobarComplex b = cobar_complex(alpha, f.target, cap + grow, window_lo, window_hi);
        LinearMap phi = word_extension(a, b, f);
        rep.exact.push_back(a.preserves_word_length() && b.preserves_word_length());
        SpannedTruncation ua = spanned_truncation(a, cap);
        SpannedTruncation ub = spanned_truncation(b, cap);
        LinearMap phiu(ua.basis, ub.basis, 0);
        for (int k = 0; k < ua.basis.size(); ++k) {
            SparseVec img = phi.apply(ua.carriers[k]);
            if (img.empty()) continue;
            for (const auto& [i, c] : ub.solver.express(img, "alpha_weq"))
                phiu.add_to(i, k, c);
        }
        int lo = INT_MAX, hi = INT_MIN;
        for (const BasisElement& e : ua.basis.elements) {
            lo = std::min(lo, e.degree);
            hi = std::max(hi, e.degree);
        }
        for (const BasisElement& e : ub.basis.elements) {
            lo = std::min(lo, e.degree);
            hi = std::max(hi, e.degree);
        }
        QuasiIsoVerdict v;
        if (lo > hi) {
            v = QuasiIsoVerdict::yes;
        } else {
            lo = std::max(lo, window_lo + 1);
            hi = std::min(hi, window_hi - 1);
            v = lo > hi ? QuasiIsoVerdict::window_insufficient
                        : is_quasi_iso(ChainMap{ua.complex, ub.complex, std::move(phiu)}, lo, hi);
        }
        rep.verdicts.push_back(v);
    }
    rep.all_exact =
        std::all_of(rep.exact.begin(), rep.exact.end(), [](bool e) { return e; });
    if (rep.all_exact)
        for (const QuasiIsoVerdict v : rep.verdicts)
            if (v != rep.verdicts.front())
                throw validation_error(
                    "alpha_weq: length-preserving differentials must give the same verdict at "
                    "every truncation");
    int s = static_cast<int>(rep.verdicts.size());
    if (s >= stability) {
        bool settled = true;
        for (int i = s - stability + 1; i < s; ++i)
            if (rep.verdicts[i] != rep.verdicts[i - 1]) settled = false;
        if (settled && rep.verdicts.back() != QuasiIsoVerdict::window_insufficient) {
            rep.stabilized = true;
            rep.stable_verdict = rep.verdicts.back();
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Survival of a single class across truncations.
// ---------------------------------------------------------------------------

// Records, level by level, whether the cycle is a boundary of the weight-<=N
// part of the domain. The verdicts are observations at finite truncations,
// not a proof about the untruncated complex.
struct MembershipCertificate {
    std::string cycle_description;
    std::vector<int> schedule;
    std::vector<bool> in_span;
    int stability = 3;
    bool stabilized = false;
    bool stable_in_span = false;
};

inline MembershipCertificate class_survives(const CobarComplex& c, const SparseVec& cycle,
                                            const std::vector<int>& schedule,
                                            int stability = 3) {
    check_schedule(schedule, "class_survives");
    if (stability < 1) throw validation_error("class_survives: stability must be >= 1");
    if (!c.d.apply(cycle).empty())
        throw validation_error("class_survives: the given chain is not a cycle: d gives " +
                               render_combination(c.fab.basis, c.d.apply(cycle)));
    // Degrees touched by the cycle must sit strictly inside the degree window:
    // words one degree up provide the candidate boundaries, and the cycle test
    // needs the images one degree down.
    std::set<int> degrees;
    for (const auto& [i, v] : cycle) degrees.insert(c.fab.basis.elements[i].degree);
    for (int q : degrees)
        if (q <= c.window_lo || q >= c.window_hi)
            throw validation_error(
                "class_survives: the degree window cannot certify membership at degree " +
                std::to_string(q));
    int growth = decomposition_growth(c.input);
    int top = schedule.back();
    if (c.max_weight < top + growth)
        throw validation_error(
            "class_survives: the complex is truncated at weight " +
            std::to_string(c.max_weight) + ", but images from weight " + std::to_string(top) +
            " reach weight " + std::to_string(top + growth));
    MembershipCertificate cert;
    cert.schedule = schedule;
    cert.stability = stability;
    cert.cycle_description = render_combination(c.fab.basis, cycle);
    for (int n : schedule) {
        // The differential is degree-homogeneous, so only columns landing in
        // the cycle's degrees can contribute to a membership combination.
        std::vector<SparseVec> columns;
        for (int j = 0; j < c.fab.basis.size(); ++j)
            if (c.fab.basis.elements[j].weight <= n && !c.d.columns[j].empty() &&
                degrees.count(c.fab.basis.elements[j].degree - 1))
                columns.push_back(c.d.columns[j]);
        cert.in_span.push_back(span_membership(cycle, columns));
    }
    int s = static_cast<int>(cert.in_span.size());
    if (s >= stability) {
        bool settled = true;
        for (int i = s - stability + 1; i < s; ++i)
            if (cert.in_span[i] != cert.in_span[i - 1]) settled = false;
        if (settled) {
            cert.stabilized = true;
            cert.stable_in_span = cert.in_span.back();
        }
    }
    return cert;
}

}  // namespace coweq
