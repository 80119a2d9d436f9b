#pragma once

#include <coweq/field.hpp>

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace coweq {

// One-line notation: p[i] is the image of i+1, values 1..n.
using Perm = std::vector<int>;

inline Perm perm_identity(int n) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 1);
    return p;
}

inline bool perm_is_valid(const Perm& p) {
    std::vector<char> seen(p.size(), 0);
    for (int v : p) {
        if (v < 1 || v > static_cast<int>(p.size()) || seen[v - 1]) return false;
        seen[v - 1] = 1;
    }
    return true;
}

inline Perm perm_compose(const Perm& a, const Perm& b) {
    // (a after b): result(i) = a(b(i)).
    Perm r(b.size());
    for (size_t i = 0; i < b.size(); ++i) r[i] = a[b[i] - 1];
    return r;
}

inline Perm perm_inverse(const Perm& p) {
    Perm r(p.size());
    for (size_t i = 0; i < p.size(); ++i) r[p[i] - 1] = static_cast<int>(i) + 1;
    return r;
}

inline int perm_sign(const Perm& p) {
    int inv = 0;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inv;
    return inv % 2 == 0 ? 1 : -1;
}

inline Perm perm_transposition(int n, int j) {
    // Adjacent transposition swapping j and j+1, 1-based.
    Perm p = perm_identity(n);
    std::swap(p[j - 1], p[j]);
    return p;
}

inline std::vector<Perm> all_perms(int n) {
    Perm p = perm_identity(n);
    std::vector<Perm> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

inline std::string perm_label(const Perm& p) {
    std::string s;
    for (int v : p) {
        if (v > 9) s += "." + std::to_string(v);
        else s += static_cast<char>('0' + v);
    }
    return s;
}

// Writes a permutation as a word of adjacent transpositions (indices j,
// meaning swap positions j and j+1), applied left to right to the identity.
inline std::vector<int> perm_adjacent_word(const Perm& p) {
    Perm work = p;
    std::vector<int> word;
    for (size_t pass = 0; pass + 1 < work.size(); ++pass) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (size_t j = 0; j + 1 < work.size(); ++j) {
                if (work[j] > work[j + 1]) {
                    std::swap(work[j], work[j + 1]);
                    word.push_back(static_cast<int>(j) + 1);
                    moved = true;
                }
            }
        }
    }
    std::reverse(word.begin(), word.end());
    return word;
}

// Product word of a permutation label: the sequence sigma^{-1}(1..n), read as
// the multiplication order of the inputs.
inline Perm product_word(const Perm& sigma) { return perm_inverse(sigma); }

inline Perm perm_from_product_word(const Perm& word) { return perm_inverse(word); }

// Operadic block substitution on permutation labels: the label of the
// composite obtained by feeding the arity-m operation (label tau) into input
// slot i of the arity-k operation (label sigma).
inline Perm operad_block_compose(const Perm& sigma, int i, const Perm& tau) {
    int m = static_cast<int>(tau.size());
    Perm ws = product_word(sigma);
    Perm wt = product_word(tau);
    Perm w;
    w.reserve(sigma.size() + tau.size() - 1);
    for (int a : ws) {
        if (a < i) {
            w.push_back(a);
        } else if (a > i) {
            w.push_back(a + m - 1);
        } else {
            for (int b : wt) w.push_back(b + i - 1);
        }
    }
    return perm_from_product_word(w);
}

// Koszul sign of rearranging homogeneous letters with the given degrees so
// that position r of the result holds the letter originally at arrangement[r]
// (0-based source indices). Accumulated by adjacent swaps.
inline int koszul_reorder_sign(const std::vector<int>& degrees,
                               const std::vector<int>& arrangement) {
    std::vector<int> work(degrees.size());
    std::iota(work.begin(), work.end(), 0);
    int sign = 1;
    for (size_t r = 0; r < arrangement.size(); ++r) {
        size_t pos = r;
        while (work[pos] != arrangement[r]) ++pos;
        while (pos > r) {
            if ((degrees[work[pos]] % 2 != 0) && (degrees[work[pos - 1]] % 2 != 0))
                sign = -sign;
            std::swap(work[pos], work[pos - 1]);
            --pos;
        }
    }
    return sign;
}

}  // namespace coweq
