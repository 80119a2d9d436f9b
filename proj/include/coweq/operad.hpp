#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graded.hpp"
#include "lie_basis.hpp"
#include "perm.hpp"

namespace coweq {

enum class OperadKind { Symmetric, Tensor, Polynomial, General };

inline std::string mono_label(const std::vector<std::string>& vars,
                              const std::vector<int>& expo) {
    std::string s;
    for (size_t i = 0; i < vars.size(); ++i) {
        if (expo[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += vars[i];
        if (expo[i] > 1) s += "^" + std::to_string(expo[i]);
    }
    return s.empty() ? "1" : s;
}

struct Monomials {
    std::vector<std::string> vars;
    int cap = 0;
    std::vector<std::vector<int>> expo;
    std::map<std::vector<int>, int> index;
};

// Arity-indexed operations with a symmetric-group action and partial
// compositions. Structured kinds compute compositions by closed formula;
// the General kind carries explicit tables.
class Operad {
  public:
    OperadKind kind = OperadKind::Symmetric;
    std::string name;
    Field field{0};
    int max_arity = 1;
    int desusp = 0;
    int lower_bound_slope = 0;
    int unit_index = 0;
    std::vector<GradedBasis> slices;
    // act[n][j-1]: columns of the adjacent transposition s_j on arity n.
    std::vector<std::vector<std::vector<SparseVec>>> act;
    // Tensor kind: basis index <-> permutation.
    std::vector<std::vector<Perm>> perm_of;
    std::vector<std::map<Perm, int>> perm_index;
    Monomials poly;
    // General kind: tables[{k,i,m}][a][b] = a o_i b.
    std::map<std::array<int, 3>, std::vector<std::vector<SparseVec>>> tables;

    const GradedBasis& slice(int n) const {
        if (n < 1 || n > max_arity)
            throw validation_error(name + ": arity " + std::to_string(n) +
                                   " outside the constructed range");
        return slices[n];
    }

    int dim(int n) const { return (n >= 1 && n <= max_arity) ? slices[n].size() : 0; }

    bool sigma_split(const Field& f) const {
        if (f.p == 0) return true;
        return kind == OperadKind::Tensor || kind == OperadKind::Polynomial;
    }

    SparseVec act_transposition(int n, int j, const SparseVec& v) const {
        SparseVec out;
        for (const auto& [idx, c] : v) axpy(out, c, act[n][j - 1][idx]);
        return out;
    }

    SparseVec act_perm(int n, const Perm& sigma, SparseVec v) const {
        for (int j : perm_adjacent_word(sigma)) v = act_transposition(n, j, v);
        return v;
    }

    // Partial composition of basis elements: slot i of the arity-k element a
    // receives the arity-m element b.
    SparseVec compose(int k, int a, int i, int m, int b) const {
        if (i < 1 || i > k) throw validation_error(name + ": composition slot out of range");
        if (k + m - 1 > max_arity)
            throw validation_error(name + ": composition exceeds constructed arity " +
                                   std::to_string(max_arity));
        SparseVec out;
        switch (kind) {
            case OperadKind::Symmetric: {
                sv_add(out, 0, sign_scalar(desusp_comp_exponent(k, i, m, a)));
                break;
            }
            case OperadKind::Tensor: {
                Perm comp = operad_block_compose(perm_of[k][a], i, perm_of[m][b]);
                sv_add(out, perm_index[k + m - 1].at(comp),
                       sign_scalar(desusp_comp_exponent(k, i, m, a)));
                break;
            }
            case OperadKind::Polynomial: {
                std::vector<int> e = poly.expo[a];
                int total = 0;
                for (size_t t = 0; t < e.size(); ++t) {
                    e[t] += poly.expo[b][t];
                    total += e[t];
                }
                if (total <= poly.cap) sv_add(out, poly.index.at(e), field.one());
                break;
            }
            case OperadKind::General: {
                auto it = tables.find({k, i, m});
                if (it == tables.end())
                    throw validation_error(name + ": no composition table for this arity pattern");
                out = it->second[a][b];
                break;
            }
        }
        return out;
    }

    SparseVec compose_vec(int k, const SparseVec& va, int i, int m, const SparseVec& vb) const {
        SparseVec out;
        for (const auto& [a, ca] : va)
            for (const auto& [b, cb] : vb)
                for (const auto& [r, cr] : compose(k, a, i, m, b)) sv_add(out, r, ca * cb * cr);
        return out;
    }

    Scalar sign_scalar(int exponent) const {
        return exponent % 2 == 0 ? field.one() : -field.one();
    }

    int desusp_comp_exponent(int k, int i, int m, int a) const {
        if (!desusp) return 0;
        int deg_a = slices[k].elements[a].degree;
        int e = (m - 1) * (i - 1) + (m - 1) * deg_a;
        return ((e % 2) + 2) % 2;
    }
};

inline void build_trivial_action(Operad& p) {
    p.act.assign(p.max_arity + 1, {});
    for (int n = 1; n <= p.max_arity; ++n) {
        p.act[n].assign(std::max(0, n - 1), {});
        for (int j = 1; j < n; ++j) {
            p.act[n][j - 1].resize(p.slices[n].size());
            for (int c = 0; c < p.slices[n].size(); ++c)
                sv_add(p.act[n][j - 1][c], c, p.field.one());
        }
    }
}

inline Operad polynomial_operad(std::vector<std::string> vars, int cap,
                                const Field& field = Field(0)) {
    Operad p;
    p.kind = OperadKind::Polynomial;
    p.field = field;
    p.max_arity = 1;
    p.poly.vars = vars;
    p.poly.cap = cap;
    p.slices.assign(2, GradedBasis{});
    for (int total = 0; total <= cap; ++total) {
        std::vector<std::vector<int>> level;
        if (vars.empty()) {
            if (total == 0) level.push_back({});
        } else {
            std::vector<int> cur(vars.size(), 0);
            cur[0] = total;
            while (true) {
                level.push_back(cur);
                int k = static_cast<int>(vars.size()) - 1;
                while (k > 0 && cur[k - 1] == 0) --k;
                if (k == 0) break;
                --cur[k - 1];
                int rest = total;
                for (int t = 0; t < k; ++t) rest -= cur[t];
                for (int t = k; t < static_cast<int>(vars.size()); ++t) cur[t] = 0;
                cur[k] = rest;
            }
        }
        for (auto& ev : level) {
            p.poly.index.emplace(ev, static_cast<int>(p.poly.expo.size()));
            p.poly.expo.push_back(ev);
            p.slices[1].add(mono_label(vars, ev), 0, total);
        }
    }
    p.unit_index = p.poly.index.at(std::vector<int>(vars.size(), 0));
    p.name = vars.empty() ? "Unit" : "poly";
    build_trivial_action(p);
    return p;
}

inline Operad preset_operad(const std::string& name, int max_arity,
                            const Field& field = Field(0)) {
    if (max_arity < 1) throw validation_error("preset_operad: max_arity must be at least 1");
    if (name == "Unit") {
        Operad p = polynomial_operad({}, 0, field);
        p.name = "Unit";
        return p;
    }
    Operad p;
    p.field = field;
    p.max_arity = max_arity;
    p.slices.assign(max_arity + 1, GradedBasis{});
    if (name == "Com") {
        p.kind = OperadKind::Symmetric;
        p.name = "Com";
        for (int n = 1; n <= max_arity; ++n) p.slices[n].add("c" + std::to_string(n), 0, 0);
        p.unit_index = 0;
        build_trivial_action(p);
        return p;
    }
    if (name == "Ass") {
        p.kind = OperadKind::Tensor;
        p.name = "Ass";
        p.perm_of.assign(max_arity + 1, {});
        p.perm_index.assign(max_arity + 1, {});
        for (int n = 1; n <= max_arity; ++n) {
            for (const Perm& s : all_perms(n)) {
                p.perm_index[n].emplace(s, static_cast<int>(p.perm_of[n].size()));
                p.perm_of[n].push_back(s);
                p.slices[n].add("a" + std::to_string(n) + ":" + perm_label(s), 0, 0);
            }
        }
        p.unit_index = 0;
        p.act.assign(max_arity + 1, {});
        for (int n = 1; n <= max_arity; ++n) {
            p.act[n].assign(std::max(0, n - 1), {});
            for (int j = 1; j < n; ++j) {
                p.act[n][j - 1].resize(p.perm_of[n].size());
                Perm sj = perm_transposition(n, j);
                for (size_t c = 0; c < p.perm_of[n].size(); ++c) {
                    Perm image = perm_compose(p.perm_of[n][c], sj);
                    sv_add(p.act[n][j - 1][c], p.perm_index[n].at(image), field.one());
                }
            }
        }
        return p;
    }
    if (name == "Lie") {
        if (max_arity > 6) throw validation_error("Lie preset is capped at arity 6");
        p.kind = OperadKind::General;
        p.name = "Lie";
        std::vector<LieExpansion> exp;
        std::vector<CoordSolver> solve;
        for (int n = 0; n <= max_arity; ++n) {
            exp.emplace_back(std::max(n, 1), field);
            solve.emplace_back(field);
        }
        for (int n = 1; n <= max_arity; ++n) {
            for (size_t c = 0; c < exp[n].columns.size(); ++c) {
                SparseVec tag;
                sv_add(tag, static_cast<int>(c), field.one());
                solve[n].insert(exp[n].columns[c], tag);
                p.slices[n].add(lie_label(exp[n].leaf_sequences[c]), 0, 0);
            }
            if (solve[n].rank() != static_cast<int>(exp[n].columns.size()))
                throw validation_error(
                    "Lie preset: left-normed expansions are dependent at arity " +
                    std::to_string(n));
        }
        p.unit_index = 0;
        auto express = [&](int n, const std::map<Perm, Scalar>& terms) {
            SparseVec v;
            for (const auto& [w, c] : terms) sv_add(v, exp[n].words.index.at(w), c);
            auto coords = solve[n].express(v);
            if (!coords)
                throw validation_error(
                    "Lie preset: element escapes the bracket span at arity " +
                    std::to_string(n));
            return *coords;
        };
        p.act.assign(max_arity + 1, {});
        for (int n = 1; n <= max_arity; ++n) {
            p.act[n].assign(std::max(0, n - 1), {});
            for (int j = 1; j < n; ++j) {
                p.act[n][j - 1].resize(p.slices[n].size());
                Perm sj = perm_transposition(n, j);
                for (int c = 0; c < p.slices[n].size(); ++c) {
                    std::map<Perm, Scalar> terms;
                    for (const auto& [widx, coeff] : exp[n].columns[c]) {
                        Perm w = exp[n].words.words[widx];
                        for (int& letter : w) letter = sj[letter - 1];
                        auto [it, fresh] = terms.emplace(w, coeff);
                        if (!fresh) it->second += coeff;
                    }
                    p.act[n][j - 1][c] = express(n, terms);
                }
            }
        }
        for (int k = 1; k <= max_arity; ++k) {
            for (int m = 1; k + m - 1 <= max_arity; ++m) {
                int n = k + m - 1;
                for (int i = 1; i <= k; ++i) {
                    auto& table = p.tables[{k, i, m}];
                    table.assign(p.slices[k].size(), {});
                    for (int a = 0; a < p.slices[k].size(); ++a) {
                        table[a].resize(p.slices[m].size());
                        for (int b = 0; b < p.slices[m].size(); ++b) {
                            std::map<Perm, Scalar> terms;
                            for (const auto& [wa, ca] : exp[k].columns[a]) {
                                for (const auto& [wb, cb] : exp[m].columns[b]) {
                                    const Perm& pa = exp[k].words.words[wa];
                                    const Perm& pb = exp[m].words.words[wb];
                                    Perm w;
                                    for (int letter : pa) {
                                        if (letter < i) w.push_back(letter);
                                        else if (letter > i) w.push_back(letter + m - 1);
                                        else
                                            for (int inner : pb) w.push_back(inner + i - 1);
                                    }
                                    Scalar prod = ca * cb;
                                    auto [it, fresh] = terms.emplace(std::move(w), prod);
                                    if (!fresh) it->second += prod;
                                }
                            }
                            for (auto it = terms.begin(); it != terms.end();)
                                it = it->second.is_zero() ? terms.erase(it) : std::next(it);
                            table[a][b] = express(n, terms);
                        }
                    }
                }
            }
        }
        return p;
    }
    throw validation_error("unknown operad preset: " + name);
}

inline Operad operadic_desuspension(const Operad& input) {
    if (input.max_arity == 1) return input;
    if (input.desusp)
        throw validation_error("desuspension is applied once, from an untwisted preset");
    if (input.kind == OperadKind::General)
        throw validation_error("desuspension is implemented for symmetric and tensor kinds");
    Operad p = input;
    p.desusp = 1;
    p.lower_bound_slope = input.lower_bound_slope - 1;
    p.name = "S-1" + input.name;
    for (int n = 1; n <= p.max_arity; ++n) {
        GradedBasis shifted;
        for (const BasisElement& e : p.slices[n].elements)
            shifted.add(e.label, e.degree - (n - 1), e.weight);
        p.slices[n] = shifted;
        for (auto& mat : p.act[n])
            for (auto& col : mat) col = sv_scale(-p.field.one(), col);
    }
    return p;
}

// Widens an operad to higher arities that carry only what word reduction
// performs: grafting an arity-2 element into a slot of a canonical word and
// moving the resulting letter swap off again. Tensor-kind operads keep the
// identity permutation and the adjacent transpositions per new arity;
// symmetric-kind operads with one-dimensional slices keep a single line.
// Action entries outside that span are not represented, so the widened
// arities are unfit for generic symmetric-group computations.
inline Operad arity_extension(const Operad& input, int new_max_arity) {
    if (input.kind != OperadKind::Tensor && input.kind != OperadKind::Symmetric)
        throw validation_error("arity_extension: " + input.name +
                               " is neither of tensor nor of symmetric kind");
    if (new_max_arity < input.max_arity) return input;
    Operad p = input;
    p.max_arity = new_max_arity;
    p.slices.resize(new_max_arity + 1);
    p.perm_of.resize(new_max_arity + 1);
    p.perm_index.resize(new_max_arity + 1);
    p.act.resize(new_max_arity + 1);
    const Scalar swap_sign = p.desusp ? -p.field.one() : p.field.one();
    if (input.kind == OperadKind::Symmetric) {
        for (int n = 1; n <= input.max_arity; ++n)
            if (input.slices[n].size() != 1)
                throw validation_error("arity_extension: " + input.name +
                                       " has a slice of dimension other than one");
        std::string prefix = input.slices[input.max_arity].elements[0].label;
        while (!prefix.empty() && std::isdigit(static_cast<unsigned char>(prefix.back())))
            prefix.pop_back();
        for (int n = input.max_arity + 1; n <= new_max_arity; ++n) {
            p.slices[n].add(prefix + std::to_string(n), -p.desusp * (n - 1), 0);
            p.act[n].assign(n - 1, std::vector<SparseVec>(1));
            for (int j = 1; j < n; ++j) sv_add(p.act[n][j - 1][0], 0, swap_sign);
        }
        return p;
    }
    for (int n = input.max_arity + 1; n <= new_max_arity; ++n) {
        int degree = -p.desusp * (n - 1);
        auto add_perm = [&](const Perm& s) {
            p.perm_index[n].emplace(s, static_cast<int>(p.perm_of[n].size()));
            p.perm_of[n].push_back(s);
            p.slices[n].add("a" + std::to_string(n) + ":" + perm_label(s), degree, 0);
        };
        Perm id(n);
        for (int v = 0; v < n; ++v) id[v] = v + 1;
        add_perm(id);
        for (int j = 1; j < n; ++j) {
            Perm s = id;
            std::swap(s[j - 1], s[j]);
            add_perm(s);
        }
        p.act[n].assign(n - 1, std::vector<SparseVec>(p.slices[n].size()));
        for (int j = 1; j < n; ++j) {
            sv_add(p.act[n][j - 1][0], j, swap_sign);
            sv_add(p.act[n][j - 1][j], 0, swap_sign);
        }
    }
    return p;
}

// Coinvariants of P(n) tensor n-letter words under the diagonal action, as a
// relation quotient with lexicographically least surviving representatives.
// Serves the General kind and cross-checks the closed-form kinds.
struct CoinvariantSlice {
    int dimension = 0;
    std::vector<std::pair<int, std::vector<int>>> reps;
};

inline CoinvariantSlice coinvariant_slice(const Operad& p, int n, const GradedBasis& gens,
                                          const Field& field) {
    if (field.p > 0 && p.kind == OperadKind::General)
        throw validation_error(
            "coinvariant basis over positive characteristic is implemented for "
            "closed-form kinds only");
    CoinvariantSlice out;
    int g = gens.size();
    int pd = p.dim(n);
    if (g == 0 || pd == 0 || n < 1) return out;
    std::vector<int> degs(g);
    for (int i = 0; i < g; ++i) degs[i] = gens.elements[i].degree;
    long long words_total = 1;
    for (int i = 0; i < n; ++i) words_total *= g;
    auto word_rank = [&](const std::vector<int>& w) {
        long long r = 0;
        for (int letter : w) r = r * g + letter;
        return r;
    };
    auto pair_index = [&](int a, const std::vector<int>& w) {
        return static_cast<int>(a * words_total + word_rank(w));
    };
    EchelonBasis relations(true);
    std::vector<int> w(n, 0);
    while (true) {
        for (int a = 0; a < pd; ++a) {
            for (int j = 1; j < n; ++j) {
                SparseVec rel;
                sv_add(rel, pair_index(a, w), field.one());
                std::vector<int> sw = w;
                std::swap(sw[j - 1], sw[j]);
                Scalar sign = (degs[w[j - 1]] % 2 != 0 && degs[w[j]] % 2 != 0)
                                  ? -field.one()
                                  : field.one();
                SparseVec pa{{a, field.one()}};
                SparseVec moved = p.act_transposition(n, j, pa);
                for (const auto& [b, c] : moved) sv_add(rel, pair_index(b, sw), -(sign * c));
                relations.insert(rel);
            }
        }
        int t = n - 1;
        while (t >= 0 && w[t] == g - 1) w[t--] = 0;
        if (t < 0) break;
        ++w[t];
    }
    out.dimension = static_cast<int>(pd * words_total) - relations.rank();
    const auto& pivots = relations.rows();
    std::fill(w.begin(), w.end(), 0);
    while (true) {
        for (int a = 0; a < pd; ++a)
            if (!pivots.count(pair_index(a, w))) out.reps.emplace_back(a, w);
        int t = n - 1;
        while (t >= 0 && w[t] == g - 1) w[t--] = 0;
        if (t < 0) break;
        ++w[t];
    }
    std::sort(out.reps.begin(), out.reps.end());
    return out;
}

struct FreeWord {
    std::vector<int> letters;
    int p_index = 0;
};

struct FreeAlgebraBasis {
    GradedBasis basis;
    std::vector<FreeWord> words;
};

inline std::string tilde_word_label(const GradedBasis& gens, const std::vector<int>& letters) {
    std::string s;
    for (int i : letters) {
        if (!s.empty()) s += ".";
        s += gens.elements[i].label + "~";
    }
    return s;
}

constexpr int unbounded_below = std::numeric_limits<int>::min();
constexpr int unbounded_above = std::numeric_limits<int>::max();

inline FreeAlgebraBasis free_algebra_basis(const Operad& p, const GradedBasis& gens,
                                           int max_weight, const Field& field,
                                           int deg_lo = unbounded_below,
                                           int deg_hi = unbounded_above) {
    if (deg_lo == unbounded_below && gens.size() > 0 &&
        p.lower_bound_slope + gens.min_degree() < 0)
        throw validation_error(
            "free_algebra_basis: an unbounded degree window requires slope plus minimum "
            "generator degree to be nonnegative");
    FreeAlgebraBasis out;
    auto emit = [&](const std::string& label, int degree, int weight, FreeWord word) {
        if (degree < deg_lo || degree > deg_hi) return;
        out.basis.add(label, degree, weight);
        out.words.push_back(std::move(word));
    };
    int g = gens.size();
    if (g == 0) return out;
    for (int n = 1; n <= max_weight; ++n) {
        switch (p.kind) {
            case OperadKind::Symmetric: {
                std::vector<int> w(n, 0);
                while (true) {
                    bool vanish = false;
                    long long stab = 1;
                    for (int i = 0; i < n;) {
                        int j = i;
                        while (j < n && w[j] == w[i]) ++j;
                        int mult = j - i;
                        int deg = gens.elements[w[i]].degree;
                        if (mult >= 2 && field.p != 2 && (p.desusp + deg) % 2 != 0)
                            vanish = true;
                        for (int t = 2; t <= mult; ++t) stab *= t;
                        i = j;
                    }
                    if (!vanish && field.p > 0 && stab % field.p == 0)
                        throw validation_error(
                            "coinvariant basis is not canonical over F" +
                            std::to_string(field.p) + ": the stabilizer of " +
                            tilde_word_label(gens, w) + " has order divisible by " +
                            std::to_string(field.p));
                    if (!vanish) {
                        int degree = -p.desusp * (n - 1);
                        for (int i : w) degree += gens.elements[i].degree;
                        emit(tilde_word_label(gens, w), degree, n, FreeWord{w, 0});
                    }
                    int t = n - 1;
                    while (t >= 0 && w[t] == g - 1) --t;
                    if (t < 0) break;
                    ++w[t];
                    for (int r = t + 1; r < n; ++r) w[r] = w[t];
                }
                break;
            }
            case OperadKind::Tensor: {
                std::vector<int> w(n, 0);
                while (true) {
                    int degree = -p.desusp * (n - 1);
                    for (int i : w) degree += gens.elements[i].degree;
                    emit(tilde_word_label(gens, w), degree, n, FreeWord{w, 0});
                    int t = n - 1;
                    while (t >= 0 && w[t] == g - 1) w[t--] = 0;
                    if (t < 0) break;
                    ++w[t];
                }
                break;
            }
            case OperadKind::Polynomial: {
                if (n > 1) break;
                for (int a = 0; a < p.slices[1].size(); ++a) {
                    const BasisElement& mono = p.slices[1].elements[a];
                    for (int i = 0; i < g; ++i) {
                        std::string label = mono.label == "1"
                                                ? gens.elements[i].label
                                                : mono.label + "|" + gens.elements[i].label;
                        emit(label, gens.elements[i].degree + mono.degree, 1, FreeWord{{i}, a});
                    }
                }
                break;
            }
            case OperadKind::General: {
                if (n > p.max_arity)
                    throw validation_error(
                        "free_algebra_basis: weight exceeds the constructed arity of " + p.name);
                CoinvariantSlice slice = coinvariant_slice(p, n, gens, field);
                for (const auto& [a, letters] : slice.reps) {
                    int degree = p.slices[n].elements[a].degree;
                    for (int i : letters) degree += gens.elements[i].degree;
                    emit(p.slices[n].elements[a].label + "|" + tilde_word_label(gens, letters),
                         degree, n, FreeWord{letters, a});
                }
                break;
            }
        }
    }
    return out;
}

inline std::vector<std::string> check_axioms(const Operad& p, int bound) {
    std::vector<std::string> report;
    bound = std::min(bound, p.max_arity);
    auto complain = [&](const std::string& msg) {
        if (report.size() < 50) report.push_back(p.name + ": " + msg);
    };
    auto same = [](const SparseVec& a, const SparseVec& b) { return sv_sub(a, b).empty(); };

    for (int n = 1; n <= bound; ++n) {
        for (int c = 0; c < p.dim(n); ++c) {
            const BasisElement& e = p.slices[n].elements[c];
            if (e.degree < p.lower_bound_slope * (n - 1))
                complain("degree bound violated by " + e.label);
        }
        for (int j = 1; j < n; ++j) {
            for (int c = 0; c < p.dim(n); ++c) {
                SparseVec v{{c, p.field.one()}};
                if (!same(p.act_transposition(n, j, p.act_transposition(n, j, v)), v))
                    complain("involution fails at arity " + std::to_string(n) + " generator " +
                             std::to_string(j) + " on " + p.slices[n].elements[c].label);
                for (const auto& [idx, coeff] : p.act_transposition(n, j, v))
                    if (p.slices[n].elements[idx].degree != p.slices[n].elements[c].degree)
                        complain("action changes degree at arity " + std::to_string(n) + " on " +
                                 p.slices[n].elements[c].label);
            }
        }
        for (int j = 1; j + 1 < n; ++j) {
            for (int c = 0; c < p.dim(n); ++c) {
                SparseVec v{{c, p.field.one()}};
                SparseVec lhs = p.act_transposition(
                    n, j, p.act_transposition(n, j + 1, p.act_transposition(n, j, v)));
                SparseVec rhs = p.act_transposition(
                    n, j + 1, p.act_transposition(n, j, p.act_transposition(n, j + 1, v)));
                if (!same(lhs, rhs))
                    complain("braid relation fails at arity " + std::to_string(n) +
                             " generators " + std::to_string(j) + "," + std::to_string(j + 1));
            }
        }
        for (int jl = 1; jl < n; ++jl) {
            for (int jh = jl + 2; jh < n; ++jh) {
                for (int c = 0; c < p.dim(n); ++c) {
                    SparseVec v{{c, p.field.one()}};
                    SparseVec lhs = p.act_transposition(n, jl, p.act_transposition(n, jh, v));
                    SparseVec rhs = p.act_transposition(n, jh, p.act_transposition(n, jl, v));
                    if (!same(lhs, rhs))
                        complain("distant generators fail to commute at arity " +
                                 std::to_string(n));
                }
            }
        }
    }

    for (int n = 1; n <= bound; ++n) {
        for (int a = 0; a < p.dim(n); ++a) {
            SparseVec ea{{a, p.field.one()}};
            if (!same(p.compose(1, p.unit_index, 1, n, a), ea))
                complain("left unit law fails on " + p.slices[n].elements[a].label);
            for (int i = 1; i <= n; ++i)
                if (!same(p.compose(n, a, i, 1, p.unit_index), ea))
                    complain("right unit law fails on " + p.slices[n].elements[a].label +
                             " slot " + std::to_string(i));
        }
    }

    for (int k = 1; k <= bound; ++k) {
        for (int m = 1; k + m - 1 <= bound; ++m) {
            for (int a = 0; a < p.dim(k); ++a)
                for (int b = 0; b < p.dim(m); ++b)
                    for (int i = 1; i <= k; ++i) {
                        int want = p.slices[k].elements[a].degree + p.slices[m].elements[b].degree;
                        for (const auto& [r, c] : p.compose(k, a, i, m, b))
                            if (p.slices[k + m - 1].elements[r].degree != want)
                                complain("composition degree is not additive on " +
                                         p.slices[k].elements[a].label + " o_" +
                                         std::to_string(i) + " " + p.slices[m].elements[b].label);
                    }
        }
    }

    for (int k = 1; k <= bound; ++k) {
        for (int m = 1; m <= bound; ++m) {
            for (int r = 1; r <= bound; ++r) {
                if (k + m + r - 2 > bound) continue;
                for (int a = 0; a < p.dim(k); ++a) {
                    for (int b = 0; b < p.dim(m); ++b) {
                        for (int c = 0; c < p.dim(r); ++c) {
                            SparseVec va{{a, p.field.one()}};
                            SparseVec vb{{b, p.field.one()}};
                            SparseVec vc{{c, p.field.one()}};
                            for (int i = 1; i <= k; ++i) {
                                SparseVec ab = p.compose(k, a, i, m, b);
                                for (int j = 1; j <= m; ++j) {
                                    SparseVec lhs =
                                        p.compose_vec(k + m - 1, ab, i - 1 + j, r, vc);
                                    SparseVec bc = p.compose(m, b, j, r, c);
                                    SparseVec rhs = p.compose_vec(k, va, i, m + r - 1, bc);
                                    if (!same(lhs, rhs))
                                        complain("nested associativity fails: " +
                                                 p.slices[k].elements[a].label + " o_" +
                                                 std::to_string(i) + " " +
                                                 p.slices[m].elements[b].label + " o_" +
                                                 std::to_string(j) + " " +
                                                 p.slices[r].elements[c].label);
                                }
                                for (int j = i + 1; j <= k; ++j) {
                                    SparseVec lhs =
                                        p.compose_vec(k + m - 1, ab, j + m - 1, r, vc);
                                    SparseVec ac = p.compose(k, a, j, r, c);
                                    SparseVec rhs = p.compose_vec(k + r - 1, ac, i, m, vb);
                                    int db = p.slices[m].elements[b].degree;
                                    int dc = p.slices[r].elements[c].degree;
                                    if (db % 2 != 0 && dc % 2 != 0)
                                        rhs = sv_scale(-p.field.one(), rhs);
                                    if (!same(lhs, rhs))
                                        complain("disjoint associativity fails: " +
                                                 p.slices[k].elements[a].label + " slots " +
                                                 std::to_string(i) + "," + std::to_string(j));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    for (int k = 2; k <= bound; ++k) {
        for (int m = 1; k + m - 1 <= bound; ++m) {
            int n = k + m - 1;
            for (int a = 0; a < p.dim(k); ++a) {
                for (int b = 0; b < p.dim(m); ++b) {
                    SparseVec va{{a, p.field.one()}};
                    SparseVec vb{{b, p.field.one()}};
                    for (int i = 1; i <= k; ++i) {
                        for (int j = 1; j < k; ++j) {
                            Perm sj = perm_transposition(k, j);
                            SparseVec as = p.act_transposition(k, j, va);
                            SparseVec lhs = p.compose_vec(k, as, i, m, vb);
                            SparseVec aib = p.compose(k, a, sj[i - 1], m, b);
                            Perm induced = operad_block_compose(sj, i, perm_identity(m));
                            SparseVec rhs = p.act_perm(n, induced, aib);
                            if (!same(lhs, rhs))
                                complain("outer equivariance fails at arity " +
                                         std::to_string(k) + " generator " + std::to_string(j) +
                                         " on " + p.slices[k].elements[a].label + " o_" +
                                         std::to_string(i) + " " + p.slices[m].elements[b].label);
                        }
                        for (int j = 1; j < m; ++j) {
                            SparseVec bs = p.act_transposition(m, j, vb);
                            SparseVec lhs = p.compose_vec(k, va, i, m, bs);
                            SparseVec ab = p.compose(k, a, i, m, b);
                            Perm induced = operad_block_compose(perm_identity(k), i,
                                                                perm_transposition(m, j));
                            SparseVec rhs = p.act_perm(n, induced, ab);
                            if (!same(lhs, rhs))
                                complain("inner equivariance fails at arity " +
                                         std::to_string(m) + " generator " + std::to_string(j) +
                                         " inside slot " + std::to_string(i) + " of " +
                                         p.slices[k].elements[a].label);
                        }
                    }
                }
            }
        }
    }
    return report;
}

// Explicit-table copy of a structured operad, for defect-injection tests and
// table-backed cooperad duals.
inline Operad materialize_general(const Operad& input, int max_arity) {
    Operad p = input;
    p.kind = OperadKind::General;
    p.max_arity = std::min(max_arity, input.max_arity);
    p.slices.resize(p.max_arity + 1);
    p.act.resize(p.max_arity + 1);
    p.tables.clear();
    for (int k = 1; k <= p.max_arity; ++k)
        for (int m = 1; k + m - 1 <= p.max_arity; ++m)
            for (int i = 1; i <= k; ++i) {
                auto& table = p.tables[{k, i, m}];
                table.assign(input.dim(k), {});
                for (int a = 0; a < input.dim(k); ++a) {
                    table[a].resize(input.dim(m));
                    for (int b = 0; b < input.dim(m); ++b)
                        table[a][b] = input.compose(k, a, i, m, b);
                }
            }
    return p;
}

struct OperadMap {
    Operad source;
    Operad target;
    std::string name;
    // images[n][a]: image of source basis element a of arity n.
    std::vector<std::vector<SparseVec>> images;

    SparseVec apply(int n, const SparseVec& v) const {
        SparseVec out;
        for (const auto& [a, c] : v) axpy(out, c, images[n][a]);
        return out;
    }

    std::vector<std::string> validate(int bound) const {
        std::vector<std::string> report;
        bound = std::min({bound, source.max_arity, target.max_arity});
        auto complain = [&](const std::string& msg) {
            if (report.size() < 50) report.push_back(name + ": " + msg);
        };
        for (int n = 1; n <= bound; ++n) {
            for (int a = 0; a < source.dim(n); ++a) {
                int d = source.slices[n].elements[a].degree;
                for (const auto& [t, c] : images[n][a])
                    if (target.slices[n].elements[t].degree != d)
                        complain("degree not preserved on " +
                                 source.slices[n].elements[a].label);
                for (int j = 1; j < n; ++j) {
                    SparseVec va{{a, source.field.one()}};
                    SparseVec lhs = apply(n, source.act_transposition(n, j, va));
                    SparseVec rhs = target.act_transposition(n, j, images[n][a]);
                    if (!sv_sub(lhs, rhs).empty())
                        complain("equivariance fails on " + source.slices[n].elements[a].label +
                                 " generator " + std::to_string(j));
                }
            }
        }
        SparseVec unit_expected{{target.unit_index, target.field.one()}};
        if (!sv_sub(images[1][source.unit_index], unit_expected).empty())
            complain("unit is not preserved");
        for (int k = 1; k <= bound; ++k) {
            for (int m = 1; k + m - 1 <= bound; ++m) {
                for (int a = 0; a < source.dim(k); ++a)
                    for (int b = 0; b < source.dim(m); ++b)
                        for (int i = 1; i <= k; ++i) {
                            SparseVec lhs = apply(k + m - 1, source.compose(k, a, i, m, b));
                            SparseVec rhs =
                                target.compose_vec(k, images[k][a], i, m, images[m][b]);
                            if (!sv_sub(lhs, rhs).empty())
                                complain("composition fails on " +
                                         source.slices[k].elements[a].label + " o_" +
                                         std::to_string(i) + " " +
                                         source.slices[m].elements[b].label);
                        }
            }
        }
        return report;
    }
};

// The arity-wise collapse of desuspended associative operations onto the
// desuspended commutative ones.
inline OperadMap desusp_ass_to_com_map(const Operad& sa, const Operad& sc) {
    OperadMap f;
    f.source = sa;
    f.target = sc;
    f.name = "S-1Ass->S-1Com";
    f.images.assign(sa.max_arity + 1, {});
    for (int n = 1; n <= sa.max_arity; ++n) {
        f.images[n].resize(sa.dim(n));
        for (int a = 0; a < sa.dim(n); ++a)
            if (n <= sc.max_arity) sv_add(f.images[n][a], 0, sc.field.one());
    }
    return f;
}

inline OperadMap augmentation_map(const Operad& p) {
    OperadMap f;
    f.source = p;
    f.target = preset_operad("Unit", 1, p.field);
    f.target.max_arity = p.max_arity;
    f.target.slices.resize(p.max_arity + 1);
    f.target.act.assign(p.max_arity + 1, {});
    for (int n = 1; n <= p.max_arity; ++n) f.target.act[n].assign(std::max(0, n - 1), {});
    f.name = p.name + "->Unit";
    f.images.assign(p.max_arity + 1, {});
    for (int n = 1; n <= p.max_arity; ++n) f.images[n].resize(p.dim(n));
    sv_add(f.images[1][p.unit_index], 0, f.target.field.one());
    return f;
}

}  // namespace coweq
