#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cooperad.hpp"
#include "lie_basis.hpp"

namespace coweq {

// One stored term of a reduced decomposition: coeff * (cooperad element;
// ordered word of generators). The term is a representative of its class
// under the diagonal symmetric-group action.
struct DecompTerm {
    int c_idx = 0;
    std::vector<int> letters;
    Scalar coeff;
};

struct CoalgebraPresentation {
    Cooperad cooperad;
    GradedBasis generators;
    LinearMap d;
    std::vector<std::vector<DecompTerm>> decomposition;
    std::string name;
};

inline CoalgebraPresentation make_presentation(Cooperad coop, const std::string& name) {
    CoalgebraPresentation x;
    x.cooperad = std::move(coop);
    x.name = name;
    return x;
}

inline int add_generator(CoalgebraPresentation& x, const std::string& label, int degree,
                         int weight) {
    int idx = x.generators.add(label, degree, weight);
    x.decomposition.emplace_back();
    return idx;
}

inline void finish_generators(CoalgebraPresentation& x) {
    x.d = LinearMap(x.generators, x.generators, -1);
}

inline void set_differential(CoalgebraPresentation& x, const std::string& from,
                             const std::string& to, const Scalar& coeff) {
    x.d.add_to(x.generators.at(to), x.generators.at(from), coeff);
}

inline void add_term(CoalgebraPresentation& x, const std::string& gen,
                     const std::string& c_label, const std::vector<std::string>& word,
                     const Scalar& coeff) {
    DecompTerm t;
    int k = static_cast<int>(word.size());
    t.c_idx = x.cooperad.slices[k].at(c_label);
    for (const std::string& l : word) t.letters.push_back(x.generators.at(l));
    t.coeff = coeff;
    x.decomposition[x.generators.at(gen)].push_back(std::move(t));
}

inline std::vector<DecompTerm> expand_delta(const CoalgebraPresentation& x, const SparseVec& v) {
    std::vector<DecompTerm> out;
    for (const auto& [g, c] : v)
        for (const DecompTerm& t : x.decomposition[g]) out.push_back({t.c_idx, t.letters, t.coeff * c});
    return out;
}

// The full diagonal-action orbit sum of a stored term: over every
// permutation, act on the cooperad element, permute the word, and pick up
// Koszul signs at the letter degrees. A stored representative stands for
// this sum; maps that regroup tensor factors must be fed the expansion, not
// the representative.
inline std::vector<DecompTerm> norm_expand(const Cooperad& coop, const GradedBasis& letters,
                                           const DecompTerm& t) {
    int k = static_cast<int>(t.letters.size());
    std::vector<DecompTerm> out;
    Perm sigma = perm_identity(k);
    do {
        std::vector<DecompTerm> work{t};
        for (int j : perm_adjacent_word(sigma)) {
            std::vector<DecompTerm> next;
            for (const DecompTerm& cur : work) {
                std::vector<int> sw = cur.letters;
                std::swap(sw[j - 1], sw[j]);
                bool neg = letters.elements[cur.letters[j - 1]].degree % 2 != 0 &&
                           letters.elements[cur.letters[j]].degree % 2 != 0;
                Scalar sg = coop.field.of(neg ? -1 : 1);
                SparseVec cv{{cur.c_idx, coop.field.one()}};
                for (const auto& [c2, coeff] : coop.act_transposition(k, j, cv))
                    next.push_back({c2, sw, cur.coeff * coeff * sg});
            }
            work = std::move(next);
        }
        for (auto& d : work) out.push_back(std::move(d));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return out;
}

inline std::string render_term(const CoalgebraPresentation& x, int c_idx,
                               const std::vector<int>& letters) {
    int k = static_cast<int>(letters.size());
    std::string s = "(" + x.cooperad.slices[k].elements[c_idx].label + "; ";
    for (size_t i = 0; i < letters.size(); ++i) {
        if (i) s += ".";
        s += x.generators.elements[letters[i]].label;
    }
    return s + ")";
}

// Reduces sums of decomposition terms to canonical coordinates in the
// coinvariants of the diagonal action, by echelonizing the swap relations of
// each letter-multiset family.
class TermReducer {
  public:
    using Key = std::pair<int, std::vector<int>>;

    TermReducer(const Cooperad& coop, const GradedBasis& letters)
        : coop_(&coop), letters_(&letters) {}

    std::map<Key, Scalar> reduce(const std::vector<DecompTerm>& terms) {
        std::map<Key, Scalar> out;
        for (const DecompTerm& t : terms) {
            if (t.coeff.is_zero()) continue;
            int k = static_cast<int>(t.letters.size());
            if (k == 1) {
                accumulate(out, {t.c_idx, t.letters}, t.coeff);
                continue;
            }
            Family& fam = family(t.letters);
            int nw = static_cast<int>(fam.words.size());
            SparseVec e{{t.c_idx * nw + fam.rank.at(t.letters), coop_->field.one()}};
            for (const auto& [idx, c] : fam.relations.reduce(e))
                accumulate(out, {idx / nw, fam.words[idx % nw]}, t.coeff * c);
        }
        for (auto it = out.begin(); it != out.end();)
            it = it->second.is_zero() ? out.erase(it) : std::next(it);
        return out;
    }

  private:
    struct Family {
        std::vector<std::vector<int>> words;
        std::map<std::vector<int>, int> rank;
        EchelonBasis relations{true};
    };

    static void accumulate(std::map<Key, Scalar>& out, const Key& key, const Scalar& c) {
        auto [it, fresh] = out.emplace(key, c);
        if (!fresh) it->second += c;
    }

    bool odd(int g) const { return letters_->elements[g].degree % 2 != 0; }

    Family& family(const std::vector<int>& letters) {
        std::vector<int> key = letters;
        std::sort(key.begin(), key.end());
        auto [it, fresh] = cache_.try_emplace(key);
        Family& fam = it->second;
        if (!fresh) return fam;
        std::vector<int> w = key;
        do {
            fam.rank.emplace(w, static_cast<int>(fam.words.size()));
            fam.words.push_back(w);
        } while (std::next_permutation(w.begin(), w.end()));
        int k = static_cast<int>(letters.size());
        int nw = static_cast<int>(fam.words.size());
        Scalar one = coop_->field.one();
        for (int c = 0; c < coop_->dim(k); ++c) {
            for (int wr = 0; wr < nw; ++wr) {
                const std::vector<int>& word = fam.words[wr];
                for (int j = 1; j < k; ++j) {
                    std::vector<int> sw = word;
                    std::swap(sw[j - 1], sw[j]);
                    Scalar sg = coop_->field.of((odd(word[j - 1]) && odd(word[j])) ? -1 : 1);
                    SparseVec rel{{c * nw + wr, one}};
                    SparseVec cv{{c, one}};
                    int swr = fam.rank.at(sw);
                    for (const auto& [c2, coeff] : coop_->act_transposition(k, j, cv))
                        sv_add(rel, c2 * nw + swr, -(sg * coeff));
                    fam.relations.insert(rel);
                }
            }
        }
        return fam;
    }

    const Cooperad* coop_;
    const GradedBasis* letters_;
    std::map<std::vector<int>, Family> cache_;
};

// Canonical reduction for two-stage decomposition terms: an outer cooperad
// element whose slot `marker` holds an inner (element; word) block, the
// remaining slots holding plain letters. Quotients by both diagonal actions.
class DoubleReducer {
  public:
    struct DTerm {
        int c_idx = 0;
        int b_idx = 0;
        int marker = 1;  // 1-based outer slot of the block
        std::vector<int> outer;
        std::vector<int> inner;
        Scalar coeff;
    };
    using Key = std::tuple<int, int, int, std::vector<int>, std::vector<int>>;

    DoubleReducer(const Cooperad& coop, const GradedBasis& letters)
        : coop_(&coop), letters_(&letters) {}

    std::map<Key, Scalar> reduce(const std::vector<DTerm>& terms) {
        std::map<Key, Scalar> out;
        for (const DTerm& t : terms) {
            if (t.coeff.is_zero()) continue;
            Family& fam = family(t.outer, t.inner);
            SparseVec e{{fam.index(t.c_idx, t.b_idx, t.marker, fam.orank.at(t.outer),
                                   fam.irank.at(t.inner)),
                         coop_->field.one()}};
            for (const auto& [idx, c] : fam.relations.reduce(e)) {
                auto [ci, bi, mk, orc, irc] = fam.decode(idx);
                Key key{ci, bi, mk, fam.outers[orc], fam.inners[irc]};
                auto [it2, fresh] = out.emplace(key, t.coeff * c);
                if (!fresh) it2->second += t.coeff * c;
            }
        }
        for (auto it = out.begin(); it != out.end();)
            it = it->second.is_zero() ? out.erase(it) : std::next(it);
        return out;
    }

  private:
    struct Family {
        int k = 0, m = 0, dim_b = 0, n_outer = 0, n_inner = 0;
        std::vector<std::vector<int>> outers, inners;
        std::map<std::vector<int>, int> orank, irank;
        EchelonBasis relations{true};

        int index(int c, int b, int marker, int orc, int irc) const {
            return (((c * dim_b + b) * k + (marker - 1)) * n_outer + orc) * n_inner + irc;
        }
        std::tuple<int, int, int, int, int> decode(int idx) const {
            int irc = idx % n_inner;
            idx /= n_inner;
            int orc = idx % n_outer;
            idx /= n_outer;
            int marker = idx % k + 1;
            idx /= k;
            int b = idx % dim_b;
            return {idx / dim_b, b, marker, orc, irc};
        }
    };

    bool odd(int g) const { return letters_->elements[g].degree % 2 != 0; }
    int deg(int g) const { return letters_->elements[g].degree; }

    static void perms_of(const std::vector<int>& sorted, std::vector<std::vector<int>>& list,
                         std::map<std::vector<int>, int>& rank) {
        std::vector<int> w = sorted;
        if (w.empty()) {
            rank.emplace(w, 0);
            list.push_back(w);
            return;
        }
        do {
            rank.emplace(w, static_cast<int>(list.size()));
            list.push_back(w);
        } while (std::next_permutation(w.begin(), w.end()));
    }

    Family& family(const std::vector<int>& outer, const std::vector<int>& inner) {
        std::vector<int> ko = outer, ki = inner;
        std::sort(ko.begin(), ko.end());
        std::sort(ki.begin(), ki.end());
        auto [it, fresh] = cache_.try_emplace(std::make_pair(ko, ki));
        Family& fam = it->second;
        if (!fresh) return fam;
        fam.k = static_cast<int>(outer.size()) + 1;
        fam.m = static_cast<int>(inner.size());
        fam.dim_b = coop_->dim(fam.m);
        perms_of(ko, fam.outers, fam.orank);
        perms_of(ki, fam.inners, fam.irank);
        fam.n_outer = static_cast<int>(fam.outers.size());
        fam.n_inner = static_cast<int>(fam.inners.size());
        Scalar one = coop_->field.one();
        for (int c = 0; c < coop_->dim(fam.k); ++c)
            for (int b = 0; b < fam.dim_b; ++b)
                for (int mk = 1; mk <= fam.k; ++mk)
                    for (int orc = 0; orc < fam.n_outer; ++orc)
                        for (int irc = 0; irc < fam.n_inner; ++irc)
                            add_relations(fam, c, b, mk, orc, irc, one);
        return fam;
    }

    void add_relations(Family& fam, int c, int b, int mk, int orc, int irc, const Scalar& one) {
        int self = fam.index(c, b, mk, orc, irc);
        const std::vector<int>& ow = fam.outers[orc];
        const std::vector<int>& iw = fam.inners[irc];
        int block_deg = 0;
        for (int g : iw) block_deg += deg(g);
        // Inner swaps.
        for (int r = 1; r < fam.m; ++r) {
            std::vector<int> sw = iw;
            std::swap(sw[r - 1], sw[r]);
            Scalar sg = coop_->field.of((odd(iw[r - 1]) && odd(iw[r])) ? -1 : 1);
            SparseVec rel{{self, one}};
            SparseVec bv{{b, one}};
            int sirc = fam.irank.at(sw);
            for (const auto& [b2, coeff] : coop_->act_transposition(fam.m, r, bv))
                sv_add(rel, fam.index(c, b2, mk, orc, sirc), -(sg * coeff));
            fam.relations.insert(rel);
        }
        // Outer swaps: slot mk holds the block, the rest hold ow in order.
        auto outer_pos = [&](int p) { return p < mk ? p - 1 : p - 2; };
        for (int j = 1; j < fam.k; ++j) {
            int d1, d2;
            int new_mk = mk;
            std::vector<int> sw = ow;
            if (j == mk) {
                d1 = block_deg;
                d2 = deg(ow[outer_pos(j + 1)]);
                new_mk = mk + 1;
            } else if (j + 1 == mk) {
                d1 = deg(ow[outer_pos(j)]);
                d2 = block_deg;
                new_mk = mk - 1;
            } else {
                int q = outer_pos(j);
                d1 = deg(ow[q]);
                d2 = deg(ow[q + 1]);
                std::swap(sw[q], sw[q + 1]);
            }
            Scalar sg = coop_->field.of((d1 % 2 != 0 && d2 % 2 != 0) ? -1 : 1);
            SparseVec rel{{self, one}};
            SparseVec cv{{c, one}};
            int sorc = fam.orank.at(sw);
            for (const auto& [c2, coeff] : coop_->act_transposition(fam.k, j, cv))
                sv_add(rel, fam.index(c2, b, new_mk, sorc, irc), -(sg * coeff));
            fam.relations.insert(rel);
        }
    }

    const Cooperad* coop_;
    const GradedBasis* letters_;
    std::map<std::pair<std::vector<int>, std::vector<int>>, Family> cache_;
};

struct CoalgebraReport {
    std::vector<std::string> problems;
    int coassoc_arity_bound = 0;
    bool ok() const { return problems.empty(); }
};

inline CoalgebraReport validate_coalgebra(const CoalgebraPresentation& x) {
    CoalgebraReport report;
    report.coassoc_arity_bound = x.cooperad.max_arity;
    auto complain = [&](const std::string& msg) {
        if (report.problems.size() < 50) report.problems.push_back(x.name + ": " + msg);
    };
    int ng = x.generators.size();
    if (static_cast<int>(x.decomposition.size()) != ng) {
        complain("decomposition rows do not match the generator count");
        return report;
    }
    if (ng == 0) return report;
    if (x.d.degree != -1) complain("differential must have degree -1");
    if (static_cast<int>(x.d.columns.size()) != ng)
        complain("differential is not an endomorphism of the generators");
    int min_degree = x.generators.min_degree();
    if (x.cooperad.lower_bound_slope + min_degree < 0)
        complain("generator degrees start at " + std::to_string(min_degree) +
                 ", below the bound required by the cooperad");
    for (int g = 0; g < ng; ++g) {
        const BasisElement& e = x.generators.elements[g];
        if (e.weight < 1) complain("generator " + e.label + " must have positive weight");
        if (!x.d.apply(x.d.columns[g]).empty())
            complain("differential does not square to zero on " + e.label);
        for (const DecompTerm& t : x.decomposition[g]) {
            int k = static_cast<int>(t.letters.size());
            if (k < 2) {
                complain("decomposition term of " + e.label + " has arity below 2");
                continue;
            }
            if (k > x.cooperad.max_arity) {
                complain("decomposition term of " + e.label + " exceeds the cooperad arity bound");
                continue;
            }
            int total = x.cooperad.slices[k].elements[t.c_idx].degree;
            bool conil = true;
            for (int l : t.letters) {
                total += x.generators.elements[l].degree;
                if (x.generators.elements[l].weight >= e.weight) conil = false;
            }
            if (total != e.degree)
                complain("decomposition term " + render_term(x, t.c_idx, t.letters) +
                         " of " + e.label + " violates the degree law");
            if (!conil)
                complain("decomposition term " + render_term(x, t.c_idx, t.letters) +
                         " of " + e.label + " does not decrease the weight filtration");
        }
    }
    if (!report.problems.empty()) return report;

    // Coderivation law: decomposing d(g) agrees with applying d to each letter.
    TermReducer tr(x.cooperad, x.generators);
    for (int g = 0; g < ng; ++g) {
        std::vector<DecompTerm> lhs = expand_delta(x, x.d.columns[g]);
        std::vector<DecompTerm> rhs;
        for (const DecompTerm& t : x.decomposition[g]) {
            int parity = 0;
            for (size_t j = 0; j < t.letters.size(); ++j) {
                for (const auto& [tgt, c] : x.d.columns[t.letters[j]]) {
                    std::vector<int> w = t.letters;
                    w[j] = tgt;
                    rhs.push_back({t.c_idx, w, t.coeff * c * x.cooperad.field.of(parity % 2 ? -1 : 1)});
                }
                parity += x.generators.elements[t.letters[j]].degree;
            }
        }
        if (tr.reduce(lhs) != tr.reduce(rhs))
            complain("coderivation law fails on " + x.generators.elements[g].label);
    }

    // Coassociativity: decomposing a letter of a term agrees with cocomposing
    // the term's cooperad element, through total arity <= the cooperad bound.
    // Both routes regroup tensor factors, so they are built from the full
    // orbit expansions rather than the stored representatives.
    DoubleReducer dr(x.cooperad, x.generators);
    int bound = x.cooperad.max_arity;
    std::vector<std::vector<DecompTerm>> normed(ng);
    for (int g = 0; g < ng; ++g)
        for (const DecompTerm& t : x.decomposition[g])
            for (DecompTerm& e : norm_expand(x.cooperad, x.generators, t))
                normed[g].push_back(std::move(e));
    for (int g = 0; g < ng; ++g) {
        std::vector<DoubleReducer::DTerm> one_step, two_step;
        for (const DecompTerm& t : normed[g]) {
            int k = static_cast<int>(t.letters.size());
            for (int j = 0; j < k; ++j) {
                for (const DecompTerm& u : normed[t.letters[j]]) {
                    int m = static_cast<int>(u.letters.size());
                    if (k + m - 1 > bound) continue;
                    std::vector<int> outer;
                    for (int r = 0; r < k; ++r)
                        if (r != j) outer.push_back(t.letters[r]);
                    one_step.push_back({t.c_idx, u.c_idx, j + 1, outer, u.letters,
                                        t.coeff * u.coeff});
                }
            }
            for (int m = 2; m <= k - 1; ++m)
                for (int i = 1; i <= k - m + 1; ++i)
                    for (const CoTerm& ct : x.cooperad.cocompose(k, i, m, t.c_idx)) {
                        std::vector<int> outer, inner;
                        for (int r = 0; r < k; ++r) {
                            if (r >= i - 1 && r <= i + m - 2) inner.push_back(t.letters[r]);
                            else outer.push_back(t.letters[r]);
                        }
                        two_step.push_back({ct.a, ct.b, i, outer, inner, t.coeff * ct.coeff});
                    }
        }
        if (dr.reduce(one_step) != dr.reduce(two_step))
            complain("coassociativity fails on " + x.generators.elements[g].label);
    }
    return report;
}

inline CoalgebraPresentation cofree_conilpotent(const Cooperad& coop,
                                                const std::vector<std::pair<std::string, int>>& gens,
                                                int max_weight) {
    if (coop.dual_kind != OperadKind::Tensor && coop.dual_kind != OperadKind::Symmetric)
        throw validation_error(
            "cofree_conilpotent: implemented for tensor-type and symmetric-type duals only");
    if (gens.empty()) throw validation_error("cofree_conilpotent: no generators");
    if (max_weight < 1) throw validation_error("cofree_conilpotent: max_weight must be >= 1");
    if (max_weight > coop.max_arity)
        throw validation_error("cofree_conilpotent: cooperad arity bound " +
                               std::to_string(coop.max_arity) + " is below max_weight " +
                               std::to_string(max_weight));
    int min_degree = gens[0].second;
    for (const auto& [label, degree] : gens) min_degree = std::min(min_degree, degree);
    if (coop.lower_bound_slope + min_degree < 0)
        throw validation_error("cofree_conilpotent: generator degrees start at " +
                               std::to_string(min_degree) +
                               ", below the bound required by the cooperad");
    int p = static_cast<int>(coop.field.p);
    bool symmetric = coop.dual_kind == OperadKind::Symmetric;

    CoalgebraPresentation out = make_presentation(coop, "cofree");
    std::map<std::vector<int>, int> word_index;
    std::vector<std::vector<int>> words;
    auto word_label = [&](const std::vector<int>& w) {
        std::string s;
        for (size_t i = 0; i < w.size(); ++i) {
            if (i) s += ".";
            s += gens[w[i]].first;
        }
        return s;
    };
    auto vanishing = [&](const std::vector<int>& w) {
        if (!symmetric || p == 2) return false;
        for (size_t i = 1; i < w.size(); ++i)
            if (w[i] == w[i - 1] && gens[w[i]].second % 2 != 0) return true;
        return false;
    };
    int ngen = static_cast<int>(gens.size());
    std::vector<std::vector<int>> frontier;
    for (int i = 0; i < ngen; ++i) frontier.push_back({i});
    for (int weight = 1; weight <= max_weight; ++weight) {
        std::vector<std::vector<int>> next;
        for (const std::vector<int>& w : frontier) {
            if (vanishing(w)) continue;
            if (symmetric && p > 2) {
                long mult_fact = 1, run = 1;
                for (size_t i = 1; i <= w.size(); ++i) {
                    if (i < w.size() && w[i] == w[i - 1]) mult_fact *= ++run;
                    else run = 1;
                }
                if (mult_fact % p == 0)
                    throw validation_error("cofree_conilpotent is not canonical over F" +
                                           std::to_string(p) + ": the stabilizer of " +
                                           word_label(w) + " has order divisible by " +
                                           std::to_string(p));
            }
            int degree = 0;
            for (int i : w) degree += gens[i].second;
            word_index.emplace(w, add_generator(out, word_label(w), degree, weight));
            words.push_back(w);
            if (weight == max_weight) continue;
            for (int i = symmetric ? w.back() : 0; i < ngen; ++i) {
                std::vector<int> ext = w;
                ext.push_back(i);
                next.push_back(std::move(ext));
            }
        }
        frontier = std::move(next);
    }
    finish_generators(out);

    for (size_t wi = 0; wi < words.size(); ++wi) {
        const std::vector<int>& w = words[wi];
        int n = static_cast<int>(w.size());
        if (n < 2) continue;
        if (!symmetric) {
            // Every split into 2..n consecutive nonempty blocks, coefficient 1.
            Perm idp = perm_identity(1);
            for (int mask = 1; mask < (1 << (n - 1)); ++mask) {
                std::vector<int> block, letters;
                bool ok = true;
                for (int i = 0; i < n; ++i) {
                    block.push_back(w[i]);
                    if (i == n - 1 || (mask >> i) & 1) {
                        auto it = word_index.find(block);
                        if (it == word_index.end()) { ok = false; break; }
                        letters.push_back(it->second);
                        block.clear();
                    }
                }
                if (!ok) continue;
                int k = static_cast<int>(letters.size());
                DecompTerm t;
                t.c_idx = coop.dual.perm_index[k].at(perm_identity(k));
                t.letters = std::move(letters);
                t.coeff = coop.field.one();
                out.decomposition[wi].push_back(std::move(t));
            }
        } else {
            // Every split of the multiset into 2..n unordered blocks; each
            // stored once in canonical block order, weighted by the Koszul
            // unshuffle sign over the automorphisms of the block tuple.
            std::set<std::vector<std::vector<int>>> seen;
            std::vector<int> assign(n, 0);
            auto emit = [&](const std::vector<std::vector<int>>& blocks) {
                if (!seen.insert(blocks).second) return;
                std::vector<int> letters;
                for (const std::vector<int>& b : blocks) {
                    auto it = word_index.find(b);
                    if (it == word_index.end()) return;
                    letters.push_back(it->second);
                }
                long aut = 1, run = 1;
                for (size_t i = 1; i < blocks.size(); ++i) {
                    if (blocks[i] == blocks[i - 1]) aut *= ++run;
                    else run = 1;
                }
                if (p > 0 && aut % p == 0)
                    throw validation_error("cofree_conilpotent is not canonical over F" +
                                           std::to_string(p) + ": the splitting of " +
                                           word_label(w) + " has automorphism order divisible by " +
                                           std::to_string(p));
                std::vector<int> degrees(n), arrangement;
                for (int i = 0; i < n; ++i) degrees[i] = gens[w[i]].second;
                std::vector<bool> used(n, false);
                for (const std::vector<int>& b : blocks)
                    for (int v : b)
                        for (int i = 0; i < n; ++i)
                            if (!used[i] && w[i] == v) {
                                used[i] = true;
                                arrangement.push_back(i);
                                break;
                            }
                int sign = koszul_reorder_sign(degrees, arrangement);
                DecompTerm t;
                t.c_idx = 0;
                t.letters = std::move(letters);
                t.coeff = coop.field.of(sign) * coop.field.of(static_cast<int>(aut)).inverse();
                out.decomposition[wi].push_back(std::move(t));
            };
            // Enumerate assignments of positions to block ids, then canonicalize.
            std::vector<int> ids(n);
            auto rec = [&](auto&& self, int pos, int maxid) -> void {
                if (pos == n) {
                    int nblocks = maxid + 1;
                    if (nblocks < 2) return;
                    std::vector<std::vector<int>> blocks(nblocks);
                    for (int i = 0; i < n; ++i) blocks[ids[i]].push_back(w[i]);
                    for (auto& b : blocks) std::sort(b.begin(), b.end());
                    std::sort(blocks.begin(), blocks.end());
                    emit(blocks);
                    return;
                }
                for (int id = 0; id <= std::min(maxid + 1, n - 1); ++id) {
                    ids[pos] = id;
                    self(self, pos + 1, std::max(maxid, id));
                }
            };
            rec(rec, 0, -1);
        }
    }
    CoalgebraReport rep = validate_coalgebra(out);
    if (!rep.ok()) throw validation_error("cofree_conilpotent: " + rep.problems.front());
    return out;
}

struct SpanVector {
    std::string label;
    SparseVec vector;  // over ambient generators
};

inline CoalgebraPresentation sub_coalgebra(
    const CoalgebraPresentation& ambient, const std::vector<SpanVector>& spanning,
    const std::map<std::string, std::map<std::string, Scalar>>& differential) {
    CoalgebraPresentation out = make_presentation(ambient.cooperad, ambient.name + ".sub");
    for (const SpanVector& s : spanning) {
        if (s.vector.empty())
            throw validation_error("sub_coalgebra: spanning vector " + s.label + " is zero");
        int degree = ambient.generators.elements[s.vector.begin()->first].degree;
        int weight = ambient.generators.elements[s.vector.begin()->first].weight;
        for (const auto& [g, c] : s.vector) {
            if (ambient.generators.elements[g].degree != degree)
                throw validation_error("sub_coalgebra: spanning vector " + s.label +
                                       " mixes degrees");
            if (ambient.generators.elements[g].weight != weight)
                throw validation_error("sub_coalgebra: spanning vector " + s.label +
                                       " mixes weights");
        }
        add_generator(out, s.label, degree, weight);
    }
    finish_generators(out);
    for (const auto& [from, combo] : differential)
        for (const auto& [to, coeff] : combo) set_differential(out, from, to, coeff);

    TermReducer tr(ambient.cooperad, ambient.generators);
    int nsub = static_cast<int>(spanning.size());
    for (int sg = 0; sg < nsub; ++sg) {
        auto target = tr.reduce(expand_delta(ambient, spanning[sg].vector));
        if (target.empty()) continue;
        const BasisElement& ge = out.generators.elements[sg];
        std::map<TermReducer::Key, int> pair_ids;
        auto encode = [&](const std::map<TermReducer::Key, Scalar>& reduced) {
            SparseVec v;
            for (const auto& [key, c] : reduced) {
                auto [it, fresh] = pair_ids.emplace(key, static_cast<int>(pair_ids.size()));
                sv_add(v, it->second, c);
            }
            return v;
        };
        SparseVec enc_target = encode(target);
        CoordSolver solver(ambient.cooperad.field);
        EchelonBasis span_check;
        std::vector<std::pair<int, std::vector<int>>> candidates;
        int bound = ambient.cooperad.max_arity;
        for (int k = 2; k <= bound; ++k) {
            std::vector<int> word(k, 0);
            auto walk = [&](auto&& self, int pos, int degree_left) -> void {
                if (pos == k) {
                    if (degree_left != 0) return;
                    for (int c = 0; c < ambient.cooperad.dim(k); ++c) {
                        int cdeg = ambient.cooperad.slices[k].elements[c].degree;
                        if (cdeg != 0) continue;
                        std::vector<DecompTerm> amb;
                        std::vector<int> slot(k, 0);
                        std::vector<SparseVec::const_iterator> its(k);
                        auto distribute = [&](auto&& rec2, int t, std::vector<int> letters,
                                              Scalar coeff) -> void {
                            if (t == k) {
                                amb.push_back({c, letters, coeff});
                                return;
                            }
                            for (const auto& [g, cc] : spanning[word[t]].vector) {
                                auto l2 = letters;
                                l2.push_back(g);
                                rec2(rec2, t + 1, std::move(l2), coeff * cc);
                            }
                        };
                        distribute(distribute, 0, {}, ambient.cooperad.field.one());
                        auto reduced = tr.reduce(amb);
                        if (reduced.empty()) continue;
                        SparseVec col = encode(reduced);
                        int cand = static_cast<int>(candidates.size());
                        candidates.emplace_back(c, word);
                        solver.insert(col, SparseVec{{cand, ambient.cooperad.field.one()}});
                        span_check.insert(col);
                    }
                    return;
                }
                for (int s = 0; s < nsub; ++s) {
                    if (out.generators.elements[s].weight >= ge.weight) continue;
                    int d = out.generators.elements[s].degree;
                    if (d > degree_left) continue;
                    word[pos] = s;
                    self(self, pos + 1, degree_left - d);
                }
            };
            walk(walk, 0, ge.degree);
        }
        auto coords = solver.express(enc_target);
        if (!coords) {
            SparseVec residual = span_check.reduce(enc_target);
            std::string witness = "?";
            if (!residual.empty()) {
                int id = residual.begin()->first;
                for (const auto& [key, pid] : pair_ids)
                    if (pid == id) {
                        witness = render_term(ambient, key.first, key.second);
                        break;
                    }
            }
            throw validation_error("sub_coalgebra: decomposition of " + ge.label +
                                   " escapes the span at term " + witness);
        }
        for (const auto& [cand, coeff] : *coords)
            out.decomposition[sg].push_back(
                {candidates[cand].first, candidates[cand].second, coeff});
    }
    CoalgebraReport rep = validate_coalgebra(out);
    if (!rep.ok()) throw validation_error("sub_coalgebra: " + rep.problems.front());
    return out;
}

inline CoalgebraPresentation pushforward(const CooperadMap& f, const CoalgebraPresentation& x) {
    if (x.cooperad.name != f.source.name)
        throw validation_error("pushforward: coalgebra lives over " + x.cooperad.name +
                               ", map starts at " + f.source.name);
    CoalgebraPresentation out = make_presentation(f.target, x.name);
    out.generators = x.generators;
    out.d = x.d;
    out.decomposition.assign(x.generators.size(), {});
    TermReducer tr(out.cooperad, out.generators);
    for (int g = 0; g < x.generators.size(); ++g) {
        std::vector<DecompTerm> mapped;
        for (const DecompTerm& t : x.decomposition[g]) {
            int k = static_cast<int>(t.letters.size());
            for (const auto& [c2, coeff] : f.images[k][t.c_idx])
                mapped.push_back({c2, t.letters, t.coeff * coeff});
        }
        for (const auto& [key, coeff] : tr.reduce(mapped))
            out.decomposition[g].push_back({key.first, key.second, coeff});
    }
    CoalgebraReport rep = validate_coalgebra(out);
    if (!rep.ok()) throw validation_error("pushforward: " + rep.problems.front());
    return out;
}

inline CoalgebraPresentation cocommutator(const CoalgebraPresentation& x, const Cooperad& liec) {
    return pushforward(cocommutator_map(x.cooperad, liec), x);
}

struct CoalgebraMorphism {
    CoalgebraPresentation source;
    CoalgebraPresentation target;
    std::string name;
    std::vector<SparseVec> images;  // per source generator, over target generators

    std::vector<std::string> validate() const {
        std::vector<std::string> report;
        auto complain = [&](const std::string& msg) {
            if (report.size() < 50) report.push_back(name + ": " + msg);
        };
        if (source.cooperad.name != target.cooperad.name)
            complain("source and target live over different cooperads");
        if (static_cast<int>(images.size()) != source.generators.size()) {
            complain("images do not match the source generators");
            return report;
        }
        for (int g = 0; g < source.generators.size(); ++g)
            for (const auto& [t, c] : images[g])
                if (target.generators.elements[t].degree != source.generators.elements[g].degree)
                    complain("degree not preserved on " + source.generators.elements[g].label);
        if (!report.empty()) return report;
        auto apply = [&](const SparseVec& v) {
            SparseVec outv;
            for (const auto& [g, c] : v) axpy(outv, c, images[g]);
            return outv;
        };
        for (int g = 0; g < source.generators.size(); ++g) {
            SparseVec lhs = apply(source.d.columns[g]);
            SparseVec rhs = target.d.apply(images[g]);
            if (!sv_sub(lhs, rhs).empty())
                complain("does not commute with the differential on " +
                         source.generators.elements[g].label);
        }
        TermReducer tr(target.cooperad, target.generators);
        for (int g = 0; g < source.generators.size(); ++g) {
            std::vector<DecompTerm> lhs = expand_delta(target, images[g]);
            std::vector<DecompTerm> rhs;
            for (const DecompTerm& t : source.decomposition[g]) {
                int k = static_cast<int>(t.letters.size());
                auto distribute = [&](auto&& self, int pos, std::vector<int> letters,
                                      Scalar coeff) -> void {
                    if (pos == k) {
                        rhs.push_back({t.c_idx, std::move(letters), coeff});
                        return;
                    }
                    for (const auto& [tg, c] : images[t.letters[pos]]) {
                        auto l2 = letters;
                        l2.push_back(tg);
                        self(self, pos + 1, std::move(l2), coeff * c);
                    }
                };
                distribute(distribute, 0, {}, t.coeff);
            }
            if (tr.reduce(lhs) != tr.reduce(rhs))
                complain("does not commute with the decomposition on " +
                         source.generators.elements[g].label);
        }
        return report;
    }
};

}  // namespace coweq
