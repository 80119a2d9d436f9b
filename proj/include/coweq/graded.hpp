#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "field.hpp"

namespace coweq {

struct BasisElement {
    std::string label;
    int degree = 0;
    int weight = 0;
};

struct GradedBasis {
    std::vector<BasisElement> elements;
    std::map<std::string, int> index;

    int add(const std::string& label, int degree, int weight = 0) {
        if (index.count(label)) throw validation_error("duplicate basis label: " + label);
        index[label] = static_cast<int>(elements.size());
        elements.push_back({label, degree, weight});
        return static_cast<int>(elements.size()) - 1;
    }
    int size() const { return static_cast<int>(elements.size()); }
    int find(const std::string& label) const {
        auto it = index.find(label);
        return it == index.end() ? -1 : it->second;
    }
    int at(const std::string& label) const {
        int i = find(label);
        if (i < 0) throw validation_error("unknown basis label: " + label);
        return i;
    }
    int min_degree() const {
        int m = 0;
        bool first = true;
        for (const auto& e : elements) {
            if (first || e.degree < m) m = e.degree;
            first = false;
        }
        return m;
    }
};

// Sparse vector over a fixed basis: index -> nonzero scalar.
using SparseVec = std::map<int, Scalar>;

inline void sv_add(SparseVec& dst, int i, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = dst.find(i);
    if (it == dst.end()) {
        dst.emplace(i, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) dst.erase(it);
    }
}

inline void axpy(SparseVec& dst, const Scalar& c, const SparseVec& src) {
    if (c.is_zero()) return;
    for (const auto& [i, v] : src) sv_add(dst, i, c * v);
}

inline SparseVec sv_scale(const Scalar& c, const SparseVec& v) {
    SparseVec out;
    axpy(out, c, v);
    return out;
}

inline SparseVec sv_sub(SparseVec a, const SparseVec& b) {
    for (const auto& [i, v] : b) sv_add(a, i, -v);
    return a;
}

// Incremental echelon basis with deterministic pivoting. pivot_high = false
// pivots on the lowest nonzero index (rank, span membership); pivot_high = true
// pivots on the highest index so that low-index representatives survive
// reduction (canonical forms modulo a relation span).
class EchelonBasis {
  public:
    explicit EchelonBasis(bool pivot_high = false) : pivot_high_(pivot_high) {}

    SparseVec reduce(SparseVec v) const {
        SparseVec out;
        while (!v.empty()) {
            int lead = pivot_high_ ? v.rbegin()->first : v.begin()->first;
            Scalar c = v.at(lead);
            auto it = rows_.find(lead);
            if (it == rows_.end()) {
                out.emplace(lead, c);
                v.erase(lead);
            } else {
                axpy(v, -c, it->second);
            }
        }
        return out;
    }

    // Returns true when v was independent of the rows seen so far.
    bool insert(const SparseVec& v) {
        SparseVec r = reduce(v);
        if (r.empty()) return false;
        int lead = pivot_high_ ? r.rbegin()->first : r.begin()->first;
        Scalar inv = r.at(lead).inverse();
        SparseVec row;
        for (const auto& [i, c] : r) row.emplace(i, c * inv);
        rows_.emplace(lead, std::move(row));
        return true;
    }

    bool contains(const SparseVec& v) const { return reduce(v).empty(); }
    int rank() const { return static_cast<int>(rows_.size()); }
    const std::map<int, SparseVec>& rows() const { return rows_; }

  private:
    bool pivot_high_;
    std::map<int, SparseVec> rows_;  // keyed by pivot index
};

inline int rank_of(const std::vector<SparseVec>& columns) {
    EchelonBasis e;
    int r = 0;
    for (const auto& c : columns) r += e.insert(c) ? 1 : 0;
    return r;
}

inline bool span_membership(const SparseVec& target, const std::vector<SparseVec>& generators) {
    EchelonBasis e;
    for (const auto& g : generators) e.insert(g);
    return e.contains(target);
}

inline std::optional<Field> infer_field(const std::vector<SparseVec>& columns) {
    for (const auto& c : columns)
        if (!c.empty()) return Field(c.begin()->second.characteristic());
    return std::nullopt;
}

// Basis of ker(A) where A's columns are given; kernel vectors are expressed in
// column coordinates. Standard augmented echelon: track the combination used
// to reduce each column; a dependent column yields a kernel element.
inline std::vector<SparseVec> kernel_basis(const std::vector<SparseVec>& columns, const Field& field) {
    struct Row {
        SparseVec value;
        SparseVec combo;
    };
    std::map<int, Row> rows;
    std::vector<SparseVec> kernel;
    for (int j = 0; j < static_cast<int>(columns.size()); ++j) {
        SparseVec v = columns[j];
        SparseVec combo{{j, field.one()}};
        while (!v.empty()) {
            int lead = v.begin()->first;
            auto it = rows.find(lead);
            if (it == rows.end()) break;
            Scalar c = v.at(lead);
            axpy(v, -c, it->second.value);
            axpy(combo, -c, it->second.combo);
        }
        if (v.empty()) {
            kernel.push_back(std::move(combo));
            continue;
        }
        int lead = v.begin()->first;
        Scalar inv = v.at(lead).inverse();
        Row row;
        for (const auto& [i, c] : v) row.value.emplace(i, c * inv);
        SparseVec sc;
        axpy(sc, inv, combo);
        row.combo = std::move(sc);
        rows.emplace(lead, std::move(row));
    }
    return kernel;
}

struct LinearMap {
    GradedBasis source;
    GradedBasis target;
    int degree = 0;
    std::vector<SparseVec> columns;  // columns[j] = image of source element j

    LinearMap() = default;
    LinearMap(GradedBasis src, GradedBasis tgt, int deg)
        : source(std::move(src)), target(std::move(tgt)), degree(deg),
          columns(source.size()) {}

    void set(int row, int col, const Scalar& c) {
        if (c.is_zero()) return;
        if (target.elements[row].degree != source.elements[col].degree + degree)
            throw validation_error("degree law violated by entry " + target.elements[row].label +
                                   " <- " + source.elements[col].label);
        columns[col][row] = c;
    }
    void add_to(int row, int col, const Scalar& c) {
        if (c.is_zero()) return;
        if (target.elements[row].degree != source.elements[col].degree + degree)
            throw validation_error("degree law violated by entry " + target.elements[row].label +
                                   " <- " + source.elements[col].label);
        sv_add(columns[col], row, c);
    }
    SparseVec apply(const SparseVec& v) const {
        SparseVec out;
        for (const auto& [j, c] : v) axpy(out, c, columns[j]);
        return out;
    }
    int rank() const {
        int r = rank_of(columns);
        // Self-check: row rank equals column rank.
        std::map<int, SparseVec> rows;
        for (int j = 0; j < static_cast<int>(columns.size()); ++j)
            for (const auto& [i, c] : columns[j]) rows[i][j] = c;
        std::vector<SparseVec> row_vecs;
        row_vecs.reserve(rows.size());
        for (auto& [i, row] : rows) row_vecs.push_back(std::move(row));
        if (rank_of(row_vecs) != r) throw validation_error("rank self-check failed");
        return r;
    }
};

struct ChainComplexSlice {
    GradedBasis basis;
    LinearMap d;  // degree -1, endomorphism-shaped: source == target == basis
    int window_lo = 0;
    int window_hi = 0;

    std::optional<std::string> d_squared_witness() const {
        for (int j = 0; j < basis.size(); ++j) {
            int deg = basis.elements[j].degree;
            if (deg < window_lo + 2 || deg > window_hi) continue;
            SparseVec once = d.columns[j];
            SparseVec twice = d.apply(once);
            if (!twice.empty()) return basis.elements[j].label;
        }
        return std::nullopt;
    }
    void assert_complex() const {
        if (auto w = d_squared_witness())
            throw validation_error("d^2 != 0 at basis element " + *w);
    }
};

struct HomologyReport {
    std::map<int, int> betti;  // degree -> dimension
    int window_lo = 0;
    int window_hi = 0;
    int total() const {
        int t = 0;
        for (auto& [deg, b] : betti) t += b;
        return t;
    }
};

inline HomologyReport homology(const ChainComplexSlice& c, int lo, int hi) {
    if (lo < c.window_lo + 1 || hi > c.window_hi - 1)
        throw validation_error("requested homology window is not certified complete");
    std::map<int, std::vector<SparseVec>> cols_by_degree;
    std::map<int, int> dim_by_degree;
    for (int j = 0; j < c.basis.size(); ++j) {
        int deg = c.basis.elements[j].degree;
        dim_by_degree[deg] += 1;
        cols_by_degree[deg].push_back(c.d.columns[j]);
    }
    auto rank_at = [&](int deg) {
        auto it = cols_by_degree.find(deg);
        return it == cols_by_degree.end() ? 0 : rank_of(it->second);
    };
    HomologyReport report;
    report.window_lo = lo;
    report.window_hi = hi;
    for (int q = lo; q <= hi; ++q) {
        int dim = dim_by_degree.count(q) ? dim_by_degree[q] : 0;
        int r_out = rank_at(q);
        int r_in = rank_at(q + 1);
        int betti = dim - r_out - r_in;
        // Rank-nullity recheck: ker(d_q) has dimension dim - r_out.
        auto it = cols_by_degree.find(q);
        if (it != cols_by_degree.end()) {
            if (auto field = infer_field(it->second)) {
                int nullity = static_cast<int>(kernel_basis(it->second, *field).size());
                if (nullity != dim - r_out)
                    throw validation_error("rank-nullity self-check failed");
            }
        }
        if (betti < 0) throw validation_error("negative Betti number: inconsistent complex");
        report.betti[q] = betti;
    }
    return report;
}

enum class QuasiIsoVerdict { yes, no, window_insufficient };

inline const char* to_string(QuasiIsoVerdict v) {
    switch (v) {
        case QuasiIsoVerdict::yes: return "yes";
        case QuasiIsoVerdict::no: return "no";
        default: return "window-insufficient";
    }
}

// Chain map record: phi from A to B of degree 0, commuting with differentials.
struct ChainMap {
    ChainComplexSlice a;
    ChainComplexSlice b;
    LinearMap phi;

    void assert_chain_map() const {
        for (int j = 0; j < a.basis.size(); ++j) {
            SparseVec lhs = b.d.apply(phi.columns[j]);
            SparseVec rhs = phi.apply(a.d.columns[j]);
            if (!sv_sub(lhs, rhs).empty())
                throw validation_error("map fails to commute with differentials at " +
                                       a.basis.elements[j].label);
        }
    }
};

// Mapping cone of phi: cone_q = A_(q-1) + B_q with d(a, b) = (-d a, phi a + d b).
inline ChainComplexSlice mapping_cone(const ChainMap& f) {
    ChainComplexSlice cone;
    std::vector<int> a_to_cone(f.a.basis.size()), b_to_cone(f.b.basis.size());
    for (int j = 0; j < f.a.basis.size(); ++j)
        a_to_cone[j] = cone.basis.add("cone.a." + f.a.basis.elements[j].label,
                                      f.a.basis.elements[j].degree + 1,
                                      f.a.basis.elements[j].weight);
    for (int j = 0; j < f.b.basis.size(); ++j)
        b_to_cone[j] = cone.basis.add("cone.b." + f.b.basis.elements[j].label,
                                      f.b.basis.elements[j].degree,
                                      f.b.basis.elements[j].weight);
    cone.d = LinearMap(cone.basis, cone.basis, -1);
    for (int j = 0; j < f.a.basis.size(); ++j) {
        for (const auto& [i, c] : f.a.d.columns[j]) cone.d.add_to(a_to_cone[i], a_to_cone[j], -c);
        for (const auto& [i, c] : f.phi.columns[j]) cone.d.add_to(b_to_cone[i], a_to_cone[j], c);
    }
    for (int j = 0; j < f.b.basis.size(); ++j)
        for (const auto& [i, c] : f.b.d.columns[j]) cone.d.add_to(b_to_cone[i], b_to_cone[j], c);
    cone.window_lo = std::max(f.a.window_lo + 1, f.b.window_lo);
    cone.window_hi = std::min(f.a.window_hi + 1, f.b.window_hi);
    return cone;
}

inline QuasiIsoVerdict is_quasi_iso(const ChainMap& f, int lo, int hi) {
    f.assert_chain_map();
    int usable_lo = std::max(f.a.window_lo, f.b.window_lo) + 1;
    int usable_hi = std::min(f.a.window_hi, f.b.window_hi) - 1;
    if (lo < usable_lo || hi > usable_hi) return QuasiIsoVerdict::window_insufficient;
    HomologyReport ha = homology(f.a, lo, hi);
    HomologyReport hb = homology(f.b, lo, hi);
    for (int q = lo; q <= hi; ++q)
        if (ha.betti.at(q) != hb.betti.at(q)) return QuasiIsoVerdict::no;
    ChainComplexSlice cone = mapping_cone(f);
    cone.assert_complex();
    int cone_lo = std::max(lo, cone.window_lo + 1);
    int cone_hi = std::min(hi, cone.window_hi - 1);
    if (cone_lo > cone_hi) return QuasiIsoVerdict::window_insufficient;
    HomologyReport hc = homology(cone, cone_lo, cone_hi);
    for (auto& [q, b] : hc.betti)
        if (b != 0) return QuasiIsoVerdict::no;
    return QuasiIsoVerdict::yes;
}

}  // namespace coweq
