#pragma once

#include <coweq/graded.hpp>
#include <coweq/perm.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coweq {

// Solves v = sum u_r * inserted_r by Gaussian elimination, tracking the
// combination coordinates alongside the echelon rows.
class CoordSolver {
public:
    explicit CoordSolver(const Field& field) : field_(field) {}

    void insert(SparseVec v, SparseVec tag) {
        reduce_in_place(v, tag);
        if (v.empty()) return;
        Scalar lead = v.begin()->second;
        Scalar inv = lead.inverse();
        v = sv_scale(inv, v);
        tag = sv_scale(inv, tag);
        int pivot = v.begin()->first;
        rows_.emplace(pivot, std::make_pair(std::move(v), std::move(tag)));
    }

    std::optional<SparseVec> express(SparseVec v) const {
        SparseVec tag;
        reduce_in_place(v, tag);
        if (!v.empty()) return std::nullopt;
        SparseVec coords;
        for (auto& [idx, c] : tag) sv_add(coords, idx, -c);
        return coords;
    }

    int rank() const { return static_cast<int>(rows_.size()); }

private:
    void reduce_in_place(SparseVec& v, SparseVec& tag) const {
        bool progress = true;
        while (progress && !v.empty()) {
            progress = false;
            auto it = rows_.find(v.begin()->first);
            if (it != rows_.end()) {
                Scalar c = v.begin()->second;
                axpy(v, -c, it->second.first);
                axpy(tag, -c, it->second.second);
                progress = true;
            }
        }
    }

    Field field_;
    std::map<int, std::pair<SparseVec, SparseVec>> rows_;
};

// Index of product words (elements of the regular representation at arity n).
struct WordIndex {
    std::vector<Perm> words;
    std::map<Perm, int> index;

    explicit WordIndex(int n) {
        Perm w = perm_identity(n);
        do {
            index.emplace(w, static_cast<int>(words.size()));
            words.push_back(w);
        } while (std::next_permutation(w.begin(), w.end()));
    }
};

// Left-normed bracket monomials [[..[x_1, x_{s_2}], ..], x_{s_n}] expanded as
// signed sums of multiplication words; the expansions of all leaf sequences
// starting with 1 form a basis of the multilinear Lie operations.
struct LieExpansion {
    int arity;
    WordIndex words;
    std::vector<std::vector<int>> leaf_sequences;
    std::vector<SparseVec> columns;

    LieExpansion(int n, const Field& field) : arity(n), words(n) {
        if (n == 1) {
            leaf_sequences.push_back({1});
            SparseVec v;
            sv_add(v, 0, field.one());
            columns.push_back(std::move(v));
            return;
        }
        std::vector<int> tail(n - 1);
        for (int i = 0; i < n - 1; ++i) tail[i] = i + 2;
        do {
            std::vector<int> seq;
            seq.push_back(1);
            seq.insert(seq.end(), tail.begin(), tail.end());
            leaf_sequences.push_back(seq);
            columns.push_back(expand(seq, field));
        } while (std::next_permutation(tail.begin(), tail.end()));
    }

    SparseVec expand(const std::vector<int>& seq, const Field& field) const {
        // Word-level terms of the partial bracket, keyed by letter list.
        std::map<std::vector<int>, Scalar> terms;
        terms[{seq[0]}] = field.one();
        for (size_t r = 1; r < seq.size(); ++r) {
            std::map<std::vector<int>, Scalar> next;
            for (auto& [w, c] : terms) {
                std::vector<int> right = w;
                right.push_back(seq[r]);
                std::vector<int> left;
                left.push_back(seq[r]);
                left.insert(left.end(), w.begin(), w.end());
                auto add = [&](const std::vector<int>& key, const Scalar& val) {
                    auto [it, fresh] = next.emplace(key, val);
                    if (!fresh) {
                        it->second = it->second + val;
                        if (it->second.is_zero()) next.erase(it);
                    }
                };
                add(right, c);
                add(left, -c);
            }
            terms = std::move(next);
        }
        SparseVec v;
        for (auto& [w, c] : terms) sv_add(v, words.index.at(w), c);
        return v;
    }
};

inline std::string lie_label(const std::vector<int>& seq) {
    std::string s = "l" + std::to_string(seq.size()) + ":";
    for (int v : seq) s += static_cast<char>('0' + v);
    return s;
}

}  // namespace coweq
