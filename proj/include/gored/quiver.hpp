#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "gored/common.hpp"
#include "gored/field.hpp"

namespace gored {

using VertexId = std::uint32_t;
using ArrowId = std::uint32_t;

struct Arrow {
    std::string label;
    VertexId src;
    VertexId tgt;
};

/// Finite quiver. Vertex and arrow order is the declaration order of the
/// source file; that order doubles as the precedence used by the path order,
/// so it is part of the data.
struct Quiver {
    std::vector<std::string> vertex_labels;
    std::vector<Arrow> arrows;

    std::size_t num_vertices() const { return vertex_labels.size(); }
    std::size_t num_arrows() const { return arrows.size(); }

    VertexId vertex_by_label(const std::string& label) const {
        for (std::size_t i = 0; i < vertex_labels.size(); ++i)
            if (vertex_labels[i] == label) return static_cast<VertexId>(i);
        throw Error("unknown vertex '" + label + "'");
    }

    ArrowId arrow_by_label(const std::string& label) const {
        for (std::size_t i = 0; i < arrows.size(); ++i)
            if (arrows[i].label == label) return static_cast<ArrowId>(i);
        throw Error("unknown arrow '" + label + "'");
    }

    bool operator==(const Quiver& o) const {
        if (vertex_labels != o.vertex_labels) return false;
        if (arrows.size() != o.arrows.size()) return false;
        for (std::size_t i = 0; i < arrows.size(); ++i)
            if (arrows[i].label != o.arrows[i].label || arrows[i].src != o.arrows[i].src ||
                arrows[i].tgt != o.arrows[i].tgt)
                return false;
        return true;
    }
};

/// Path in a quiver. Arrows are stored in application order: word[0] acts
/// first. Composition is read right to left, so the path written "b*a" has
/// word {a, b}. Trivial paths have an empty word and src == tgt.
struct Path {
    VertexId src = 0;
    VertexId tgt = 0;
    std::vector<ArrowId> word;

    static Path trivial(VertexId v) { return {v, v, {}}; }

    static Path of_arrow(const Quiver& q, ArrowId a) {
        return {q.arrows[a].src, q.arrows[a].tgt, {a}};
    }

    std::size_t length() const { return word.size(); }
    bool is_trivial() const { return word.empty(); }

    /// p.compose(q) = p after q (defined when src of p == tgt of q).
    Path compose_after(const Path& first) const {
        if (first.tgt != src) throw Error("paths do not compose");
        Path out;
        out.src = first.src;
        out.tgt = tgt;
        out.word = first.word;
        out.word.insert(out.word.end(), word.begin(), word.end());
        return out;
    }

    bool operator==(const Path& o) const { return src == o.src && tgt == o.tgt && word == o.word; }
    bool operator!=(const Path& o) const { return !(*this == o); }

    std::string str(const Quiver& q) const {
        if (word.empty()) return "e_" + q.vertex_labels[src];
        std::string out;
        for (std::size_t i = word.size(); i-- > 0;) {
            out += q.arrows[word[i]].label;
            if (i) out += "*";
        }
        return out;
    }
};

/// Length-lexicographic path order; arrow precedence is declaration order
/// (earlier-declared arrows are smaller). Total on all paths: trivial paths
/// compare by vertex. Compatible with concatenation, so it drives the
/// rewriting system.
inline int path_cmp(const Path& a, const Path& b) {
    if (a.length() != b.length()) return a.length() < b.length() ? -1 : 1;
    if (a.word < b.word) return -1;
    if (b.word < a.word) return 1;
    if (a.src != b.src) return a.src < b.src ? -1 : 1;
    if (a.tgt != b.tgt) return a.tgt < b.tgt ? -1 : 1;
    return 0;
}

inline bool path_lt(const Path& a, const Path& b) { return path_cmp(a, b) < 0; }

/// Formal scalar combination of parallel paths. Terms are kept sorted in
/// descending path order with no zero coefficients, so the leading term is
/// terms.front().
template <class F>
struct PathPoly {
    using Elem = typename F::Elem;

    struct Term {
        Elem coeff;
        Path path;
    };

    std::vector<Term> terms;

    bool is_zero() const { return terms.empty(); }
    const Term& lead() const { return terms.front(); }

    static PathPoly zero() { return {}; }

    static PathPoly monomial(const F& field, Elem c, Path p) {
        PathPoly out;
        if (!field.is_zero(c)) out.terms.push_back({std::move(c), std::move(p)});
        return out;
    }

    /// Merge-add; asserts parallel terms only via the order invariant.
    PathPoly add(const F& field, const PathPoly& o) const {
        PathPoly out;
        std::size_t i = 0, j = 0;
        while (i < terms.size() || j < o.terms.size()) {
            if (j == o.terms.size() ||
                (i < terms.size() && path_cmp(terms[i].path, o.terms[j].path) > 0)) {
                out.terms.push_back(terms[i++]);
            } else if (i == terms.size() || path_cmp(terms[i].path, o.terms[j].path) < 0) {
                out.terms.push_back(o.terms[j++]);
            } else {
                Elem c = field.add(terms[i].coeff, o.terms[j].coeff);
                if (!field.is_zero(c)) out.terms.push_back({std::move(c), terms[i].path});
                ++i;
                ++j;
            }
        }
        return out;
    }

    PathPoly scaled(const F& field, const Elem& c) const {
        if (field.is_zero(c)) return {};
        PathPoly out;
        out.terms.reserve(terms.size());
        for (const auto& t : terms) out.terms.push_back({field.mul(t.coeff, c), t.path});
        return out;
    }

    PathPoly negated(const F& field) const {
        PathPoly out;
        out.terms.reserve(terms.size());
        for (const auto& t : terms) out.terms.push_back({field.neg(t.coeff), t.path});
        return out;
    }

    bool parallel() const {
        for (std::size_t i = 1; i < terms.size(); ++i)
            if (terms[i].path.src != terms[0].path.src || terms[i].path.tgt != terms[0].path.tgt)
                return false;
        return true;
    }

    bool eq(const F& field, const PathPoly& o) const {
        if (terms.size() != o.terms.size()) return false;
        for (std::size_t i = 0; i < terms.size(); ++i)
            if (terms[i].path != o.terms[i].path || !field.eq(terms[i].coeff, o.terms[i].coeff))
                return false;
        return true;
    }

    std::string str(const F& field, const Quiver& q) const {
        if (terms.empty()) return "0";
        std::string out;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const auto& t = terms[i];
            std::string c = field.str(t.coeff);
            bool neg = !c.empty() && c[0] == '-';
            if (i == 0) {
                if (neg) out += "-", c = c.substr(1);
            } else {
                out += neg ? " - " : " + ";
                if (neg) c = c.substr(1);
            }
            if (c != "1") out += c + "*";
            out += t.path.str(q);
        }
        return out;
    }

    /// Normalized term list from arbitrary (coeff, path) pairs.
    static PathPoly collect(const F& field, std::vector<Term> raw) {
        std::sort(raw.begin(), raw.end(),
                  [](const Term& a, const Term& b) { return path_cmp(a.path, b.path) > 0; });
        PathPoly out;
        for (auto& t : raw) {
            if (!out.terms.empty() && out.terms.back().path == t.path) {
                out.terms.back().coeff = field.add(out.terms.back().coeff, t.coeff);
                if (field.is_zero(out.terms.back().coeff)) out.terms.pop_back();
            } else if (!field.is_zero(t.coeff)) {
                out.terms.push_back(std::move(t));
            }
        }
        return out;
    }
};

}  // namespace gored
