#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "operad.hpp"

namespace coweq {

// One term of a partial cocomposition: x splits as coeff * (a tensor b).
struct CoTerm {
    int a = 0;
    int b = 0;
    Scalar coeff;
};

// Linear-dual presentation of an operad: explicit cocomposition tables,
// arity-wise bases carrying a weight grading, and the dual symmetric-group
// action. The originating operad is retained as the cross-check authority.
class Cooperad {
  public:
    std::string name;
    Field field{0};
    OperadKind dual_kind = OperadKind::Tensor;
    int max_arity = 1;
    int lower_bound_slope = -1;
    int coaug_index = 0;
    std::vector<GradedBasis> slices;
    // act[n][j-1]: columns of the adjacent transposition s_j on arity n.
    std::vector<std::vector<std::vector<SparseVec>>> act;
    // delta[{n,i,m}][x]: terms of the (i,m) partial cocomposition of x,
    // with a of arity n-m+1 and b of arity m.
    std::map<std::array<int, 3>, std::vector<std::vector<CoTerm>>> delta;
    Operad dual;

    int dim(int n) const { return (n >= 1 && n <= max_arity) ? slices[n].size() : 0; }

    SparseVec act_transposition(int n, int j, const SparseVec& v) const {
        SparseVec out;
        for (const auto& [idx, c] : v) axpy(out, c, act[n][j - 1][idx]);
        return out;
    }

    const std::vector<CoTerm>& cocompose(int n, int i, int m, int x) const {
        auto it = delta.find({n, i, m});
        if (it == delta.end())
            throw validation_error(name + ": no cocomposition table for this arity pattern");
        return it->second[x];
    }
};

inline Cooperad linear_dual_cooperad(const Operad& p, int max_arity) {
    max_arity = std::min(max_arity, p.max_arity);
    for (int n = 1; n <= max_arity; ++n)
        for (const BasisElement& e : p.slices[n].elements)
            if (e.degree != 0)
                throw validation_error(
                    "linear_dual_cooperad: implemented for operads concentrated in degree "
                    "zero; " + e.label + " has degree " + std::to_string(e.degree));
    Cooperad c;
    c.name = p.name + "^c";
    c.field = p.field;
    c.dual_kind = p.kind;
    c.max_arity = max_arity;
    c.lower_bound_slope = -1;
    c.coaug_index = p.unit_index;
    c.dual = p;
    c.slices.assign(max_arity + 1, GradedBasis{});
    for (int n = 1; n <= max_arity; ++n)
        for (const BasisElement& e : p.slices[n].elements) c.slices[n].add(e.label, 0, n - 1);
    c.act.assign(max_arity + 1, {});
    for (int n = 1; n <= max_arity; ++n) {
        c.act[n].assign(std::max(0, n - 1), {});
        for (int j = 1; j < n; ++j) {
            c.act[n][j - 1].assign(p.dim(n), {});
            for (int col = 0; col < p.dim(n); ++col)
                for (const auto& [row, coeff] : p.act[n][j - 1][col])
                    sv_add(c.act[n][j - 1][row], col, coeff);
        }
    }
    for (int n = 1; n <= max_arity; ++n) {
        for (int m = 1; m <= n; ++m) {
            int k = n - m + 1;
            for (int i = 1; i <= k; ++i) {
                auto& table = c.delta[{n, i, m}];
                table.assign(c.dim(n), {});
                for (int a = 0; a < p.dim(k); ++a)
                    for (int b = 0; b < p.dim(m); ++b)
                        for (const auto& [x, coeff] : p.compose(k, a, i, m, b))
                            table[x].push_back({a, b, coeff});
            }
        }
    }
    return c;
}

// Transpose the stored tables back into an explicit operad. Used to verify
// that dualizing is an involution by an independent route.
inline Operad redual_operad(const Cooperad& c) {
    Operad p;
    p.kind = OperadKind::General;
    p.name = c.name + "^dual";
    p.field = c.field;
    p.max_arity = c.max_arity;
    p.lower_bound_slope = 0;
    p.unit_index = c.coaug_index;
    p.slices.assign(c.max_arity + 1, GradedBasis{});
    for (int n = 1; n <= c.max_arity; ++n)
        for (const BasisElement& e : c.slices[n].elements) p.slices[n].add(e.label, e.degree, 0);
    p.act.assign(c.max_arity + 1, {});
    for (int n = 1; n <= c.max_arity; ++n) {
        p.act[n].assign(std::max(0, n - 1), {});
        for (int j = 1; j < n; ++j) {
            p.act[n][j - 1].assign(c.dim(n), {});
            for (int col = 0; col < c.dim(n); ++col)
                for (const auto& [row, coeff] : c.act[n][j - 1][col])
                    sv_add(p.act[n][j - 1][row], col, coeff);
        }
    }
    for (const auto& [key, table] : c.delta) {
        auto [n, i, m] = key;
        int k = n - m + 1;
        auto& target = p.tables[{k, i, m}];
        target.assign(c.dim(k), {});
        for (auto& row : target) row.resize(c.dim(m));
        for (int x = 0; x < c.dim(n); ++x)
            for (const CoTerm& t : table[x]) sv_add(target[t.a][t.b], x, t.coeff);
    }
    return p;
}

inline std::vector<std::string> check_cooperad(const Cooperad& c, int bound) {
    std::vector<std::string> report;
    bound = std::min(bound, c.max_arity);
    auto complain = [&](const std::string& msg) {
        if (report.size() < 50) report.push_back(c.name + ": " + msg);
    };
    for (const std::string& msg : check_axioms(c.dual, bound)) complain("dual operad: " + msg);

    for (int n = 1; n <= c.max_arity; ++n) {
        for (int x = 0; x < c.dim(n); ++x) {
            const BasisElement& e = c.slices[n].elements[x];
            if (e.weight != n - 1)
                complain("weight grading violated by " + e.label + " at arity " +
                         std::to_string(n));
            if (e.weight == 0 && !(n == 1 && x == c.coaug_index))
                complain("connected weight violated: weight-0 element " + e.label +
                         " is not the coaugmentation");
            if (n >= 2 && e.degree < c.lower_bound_slope * (n - 1) + 1)
                complain("coideal degree bound violated by " + e.label);
        }
    }
    Cooperad fresh = linear_dual_cooperad(c.dual, c.max_arity);
    for (int n = 1; n <= c.max_arity; ++n) {
        if (c.dim(n) != fresh.dim(n)) {
            complain("arity " + std::to_string(n) + " dimension disagrees with the dual");
            continue;
        }
        for (int j = 1; j < n; ++j)
            for (int x = 0; x < c.dim(n); ++x)
                if (!sv_sub(c.act[n][j - 1][x], fresh.act[n][j - 1][x]).empty())
                    complain("action is not the transpose of the dual action at arity " +
                             std::to_string(n) + " on " + c.slices[n].elements[x].label);
    }
    if (c.dim(1) != 1) complain("arity-1 slice must be spanned by the coaugmentation");
    auto table_as_map = [](const std::vector<CoTerm>& terms) {
        std::map<std::pair<int, int>, Scalar> m;
        for (const CoTerm& t : terms) {
            auto [it, fresh_entry] = m.emplace(std::make_pair(t.a, t.b), t.coeff);
            if (!fresh_entry) it->second += t.coeff;
        }
        for (auto it = m.begin(); it != m.end();)
            it = it->second.is_zero() ? m.erase(it) : std::next(it);
        return m;
    };
    for (const auto& [key, table] : fresh.delta) {
        auto [n, i, m] = key;
        if (n > c.max_arity) continue;
        auto it = c.delta.find(key);
        if (it == c.delta.end()) {
            complain("missing cocomposition table at arity " + std::to_string(n));
            continue;
        }
        if (it->second.size() != table.size()) {
            complain("cocomposition table size mismatch at arity " + std::to_string(n));
            continue;
        }
        for (size_t x = 0; x < table.size(); ++x)
            if (table_as_map(table[x]) != table_as_map(it->second[x]))
                complain("cocomposition is not the transpose of composition on " +
                         c.slices[n].elements[x].label + " at (i,m)=(" + std::to_string(i) +
                         "," + std::to_string(m) + ")");
    }
    for (int n = 1; n <= bound; ++n) {
        auto well_sized = [&](int i, int m) {
            auto it = c.delta.find({n, i, m});
            return it != c.delta.end() && static_cast<int>(it->second.size()) == c.dim(n);
        };
        for (int x = 0; x < c.dim(n); ++x) {
            for (int i = 1; i <= n; ++i) {
                if (!well_sized(i, 1)) {
                    complain("counit table missing or mis-sized at arity " + std::to_string(n));
                    break;
                }
                auto row = table_as_map(c.cocompose(n, i, 1, x));
                std::map<std::pair<int, int>, Scalar> want{
                    {{x, c.coaug_index}, c.field.one()}};
                if (row != want)
                    complain("counit law fails on " + c.slices[n].elements[x].label +
                             " at slot " + std::to_string(i));
            }
            if (!well_sized(1, n)) {
                complain("coaugmentation table missing or mis-sized at arity " +
                         std::to_string(n));
                break;
            }
            auto row = table_as_map(c.cocompose(n, 1, n, x));
            std::map<std::pair<int, int>, Scalar> want{{{c.coaug_index, x}, c.field.one()}};
            if (row != want)
                complain("coaugmentation law fails on " + c.slices[n].elements[x].label);
        }
    }
    return report;
}

struct CooperadMap {
    Cooperad source;
    Cooperad target;
    std::string name;
    std::vector<std::vector<SparseVec>> images;

    SparseVec apply(int n, const SparseVec& v) const {
        SparseVec out;
        for (const auto& [a, coeff] : v) axpy(out, coeff, images[n][a]);
        return out;
    }

    std::vector<std::string> validate(int bound) const {
        std::vector<std::string> report;
        bound = std::min({bound, source.max_arity, target.max_arity});
        auto complain = [&](const std::string& msg) {
            if (report.size() < 50) report.push_back(name + ": " + msg);
        };
        for (int n = 1; n <= bound; ++n) {
            for (int x = 0; x < source.dim(n); ++x) {
                int d = source.slices[n].elements[x].degree;
                for (const auto& [t, coeff] : images[n][x])
                    if (target.slices[n].elements[t].degree != d)
                        complain("degree not preserved on " + source.slices[n].elements[x].label);
                for (int j = 1; j < n; ++j) {
                    SparseVec vx{{x, source.field.one()}};
                    SparseVec lhs = apply(n, source.act_transposition(n, j, vx));
                    SparseVec rhs = target.act_transposition(n, j, images[n][x]);
                    if (!sv_sub(lhs, rhs).empty())
                        complain("equivariance fails on " + source.slices[n].elements[x].label +
                                 " generator " + std::to_string(j));
                }
            }
        }
        SparseVec coaug_expected{{target.coaug_index, target.field.one()}};
        if (!sv_sub(images[1][source.coaug_index], coaug_expected).empty())
            complain("coaugmentation is not preserved");
        for (int n = 1; n <= bound; ++n) {
            for (int m = 1; m <= n; ++m) {
                int k = n - m + 1;
                for (int i = 1; i <= k; ++i) {
                    for (int x = 0; x < source.dim(n); ++x) {
                        std::map<std::pair<int, int>, Scalar> lhs, rhs;
                        auto accumulate = [&](std::map<std::pair<int, int>, Scalar>& acc,
                                              const SparseVec& va, const SparseVec& vb,
                                              const Scalar& coeff) {
                            for (const auto& [a, ca] : va)
                                for (const auto& [b, cb] : vb) {
                                    Scalar val = coeff * ca * cb;
                                    auto [it, fresh_entry] =
                                        acc.emplace(std::make_pair(a, b), val);
                                    if (!fresh_entry) it->second += val;
                                }
                        };
                        for (const CoTerm& t : source.cocompose(n, i, m, x)) {
                            accumulate(lhs, images[k][t.a], images[m][t.b], t.coeff);
                        }
                        for (const auto& [y, cy] : images[n][x])
                            for (const CoTerm& t : target.cocompose(n, i, m, y)) {
                                SparseVec va{{t.a, target.field.one()}};
                                SparseVec vb{{t.b, target.field.one()}};
                                accumulate(rhs, va, vb, cy * t.coeff);
                            }
                        for (auto* acc : {&lhs, &rhs})
                            for (auto it = acc->begin(); it != acc->end();)
                                it = it->second.is_zero() ? acc->erase(it) : std::next(it);
                        if (lhs != rhs)
                            complain("cocomposition fails on " +
                                     source.slices[n].elements[x].label + " at (i,m)=(" +
                                     std::to_string(i) + "," + std::to_string(m) + ")");
                    }
                }
            }
        }
        return report;
    }
};

// The transpose of the bracket-expansion embedding: sends the dual basis of a
// permutation to the signed sum of bracket duals whose expansion contains it.
inline CooperadMap cocommutator_map(const Cooperad& assc, const Cooperad& liec) {
    if (assc.dual_kind != OperadKind::Tensor)
        throw validation_error("cocommutator_map: source must be the dual of the tensor preset");
    if (liec.dual.name != "Lie")
        throw validation_error("cocommutator_map: target must be the dual of the bracket preset");
    CooperadMap f;
    f.source = assc;
    f.target = liec;
    f.name = assc.name + "->" + liec.name;
    int bound = std::min(assc.max_arity, liec.max_arity);
    f.images.assign(assc.max_arity + 1, {});
    for (int n = 1; n <= assc.max_arity; ++n) {
        f.images[n].resize(assc.dim(n));
        if (n > bound) continue;
        LieExpansion exp(n, assc.field);
        for (int x = 0; x < assc.dim(n); ++x) {
            Perm word = perm_inverse(assc.dual.perm_of[n][x]);
            auto wi = exp.words.index.find(word);
            if (wi == exp.words.index.end()) continue;
            for (size_t rho = 0; rho < exp.columns.size(); ++rho) {
                auto it = exp.columns[rho].find(wi->second);
                if (it != exp.columns[rho].end())
                    sv_add(f.images[n][x], static_cast<int>(rho), it->second);
            }
        }
    }
    return f;
}

}  // namespace coweq
