#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gored/common.hpp"
#include "gored/field.hpp"
#include "gored/matrix.hpp"
#include "gored/quiver.hpp"
#include "gored/rewrite.hpp"

namespace gored {

/// Quiver with scalar-weighted relations. The admissibility data (rewriting
/// system, nilpotency degree, normal-form basis) is computed on demand into
/// an Analysis, keeping this struct plain data.
template <class F>
struct Presentation {
    F field;
    Quiver quiver;
    std::vector<PathPoly<F>> relations;

    bool eq(const Presentation& o) const {
        if (!(field == o.field) || !(quiver == o.quiver) ||
            relations.size() != o.relations.size())
            return false;
        for (std::size_t i = 0; i < relations.size(); ++i)
            if (!relations[i].eq(field, o.relations[i])) return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// algebra file format
// ---------------------------------------------------------------------------

inline FieldSpec peek_field_spec(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw != "field") throw ParseError("expected a 'field' line first", lineno, 1);
        std::string val;
        if (!(ls >> val)) throw ParseError("missing field name", lineno, 7);
        if (val == "Q") return FieldSpec::rationals();
        if (val.rfind("GF(", 0) == 0 && val.back() == ')') {
            std::string num = val.substr(3, val.size() - 4);
            try {
                return FieldSpec::prime(std::stoull(num));
            } catch (const std::exception&) {
                throw ParseError("bad prime '" + num + "'", lineno, 7);
            }
        }
        throw ParseError("unknown field '" + val + "' (use Q or GF(p))", lineno, 7);
    }
    throw ParseError("empty algebra file", lineno ? lineno : 1, 1);
}

namespace detail {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

/// One signed term of a relation expression: optional scalar factor followed
/// by '*'-separated arrow labels, composed right to left.
template <class F>
typename PathPoly<F>::Term parse_term(const F& field, const Quiver& q, const std::string& text,
                                      bool negative, int lineno, int col) {
    std::vector<std::string> factors;
    std::string cur;
    for (char c : text) {
        if (c == '*') {
            factors.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    factors.push_back(trim(cur));
    typename F::Elem coeff = field.one();
    std::size_t first_arrow = 0;
    if (!factors.empty() && !factors[0].empty() && !is_ident_start(factors[0][0])) {
        try {
            coeff = field.parse(factors[0]);
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno, col);
        }
        first_arrow = 1;
    }
    if (negative) coeff = field.neg(coeff);
    std::vector<ArrowId> composition;  // written order, leftmost applied last
    for (std::size_t i = first_arrow; i < factors.size(); ++i) {
        if (factors[i].empty()) throw ParseError("empty factor in relation term", lineno, col);
        try {
            composition.push_back(q.arrow_by_label(factors[i]));
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno, col);
        }
    }
    if (composition.empty()) throw ParseError("relation term has no arrows", lineno, col);
    Path p;
    p.word.assign(composition.rbegin(), composition.rend());
    p.src = q.arrows[p.word.front()].src;
    p.tgt = q.arrows[p.word.back()].tgt;
    for (std::size_t i = 0; i + 1 < p.word.size(); ++i)
        if (q.arrows[p.word[i]].tgt != q.arrows[p.word[i + 1]].src)
            throw ParseError("arrows '" + q.arrows[p.word[i + 1]].label + "*" +
                                 q.arrows[p.word[i]].label + "' do not compose",
                             lineno, col);
    return {std::move(coeff), std::move(p)};
}

template <class F>
PathPoly<F> parse_relation_expr(const F& field, const Quiver& q, const std::string& expr,
                                int lineno, int col) {
    std::vector<typename PathPoly<F>::Term> raw;
    std::string cur;
    bool neg = false;
    auto flush = [&](int at_col) {
        std::string t = trim(cur);
        if (t.empty()) throw ParseError("empty relation term", lineno, at_col);
        raw.push_back(parse_term<F>(field, q, t, neg, lineno, at_col));
        cur.clear();
    };
    int term_col = col;
    for (std::size_t i = 0; i < expr.size(); ++i) {
        char c = expr[i];
        if ((c == '+' || c == '-') && !trim(cur).empty()) {
            flush(term_col);
            neg = c == '-';
            term_col = col + static_cast<int>(i) + 1;
        } else if (c == '-' && trim(cur).empty()) {
            neg = true;
        } else if (c == '+' && trim(cur).empty()) {
            neg = false;
        } else {
            cur += c;
        }
    }
    flush(term_col);
    return PathPoly<F>::collect(field, std::move(raw));
}

}  // namespace detail

/// Parse the algebra file format. Relations are validated: parallel terms,
/// every term of length at least two (the ideal must sit inside the square of
/// the arrow ideal).
template <class F>
Presentation<F> parse_presentation(const F& field, const std::string& text) {
    FieldSpec fs = peek_field_spec(text);
    if (!(fs == spec_of(field)))
        throw FieldMismatch("algebra file declares " + fs.str() + ", parser instantiated for " +
                            spec_of(field).str());
    Presentation<F> p{field, {}, {}};
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool seen_field = false;
    struct PendingRelation {
        std::string expr;
        int lineno;
        int col;
    };
    std::vector<PendingRelation> pending;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string body = detail::trim(line);
        if (body.empty()) continue;
        std::istringstream ls(body);
        std::string kw;
        ls >> kw;
        if (kw == "field") {
            if (seen_field) throw ParseError("duplicate field line", lineno, 1);
            seen_field = true;
        } else if (kw == "vertex") {
            std::string label;
            if (!(ls >> label)) throw ParseError("missing vertex label", lineno, 8);
            for (const auto& v : p.quiver.vertex_labels)
                if (v == label) throw ParseError("duplicate vertex '" + label + "'", lineno, 8);
            p.quiver.vertex_labels.push_back(label);
        } else if (kw == "arrow") {
            // arrow <label>: <src> -> <tgt>
            std::string rest = detail::trim(body.substr(5));
            auto colon = rest.find(':');
            if (colon == std::string::npos) throw ParseError("expected ':' in arrow line", lineno, 7);
            std::string label = detail::trim(rest.substr(0, colon));
            if (label.empty() || !detail::is_ident_start(label[0]))
                throw ParseError("bad arrow label '" + label + "'", lineno, 7);
            for (const auto& a : p.quiver.arrows)
                if (a.label == label) throw ParseError("duplicate arrow '" + label + "'", lineno, 7);
            std::string ends = rest.substr(colon + 1);
            auto arr = ends.find("->");
            if (arr == std::string::npos) throw ParseError("expected '->' in arrow line", lineno, 7);
            std::string s = detail::trim(ends.substr(0, arr));
            std::string t = detail::trim(ends.substr(arr + 2));
            VertexId sv, tv;
            try {
                sv = p.quiver.vertex_by_label(s);
                tv = p.quiver.vertex_by_label(t);
            } catch (const Error& e) {
                throw ParseError(e.what(), lineno, 7);
            }
            p.quiver.arrows.push_back({label, sv, tv});
        } else if (kw == "relation") {
            auto pos = body.find("relation") + 8;
            pending.push_back({detail::trim(body.substr(pos)), lineno, static_cast<int>(pos) + 1});
        } else {
            throw ParseError("unknown directive '" + kw + "'", lineno, 1);
        }
    }
    for (const auto& rel : pending) {
        PathPoly<F> poly =
            detail::parse_relation_expr<F>(field, p.quiver, rel.expr, rel.lineno, rel.col);
        if (poly.is_zero()) continue;
        if (!poly.parallel())
            throw ParseError("relation terms are not parallel", rel.lineno, rel.col);
        for (const auto& t : poly.terms)
            if (t.path.length() < 2)
                throw NotAdmissibleRelation("relation term '" + t.path.str(p.quiver) +
                                            "' has length < 2 (line " +
                                            std::to_string(rel.lineno) + ")");
        p.relations.push_back(std::move(poly));
    }
    return p;
}

/// Canonical serializer; emits exactly the format the parser accepts, with
/// terms in the stored (descending) order. parse(serialize(p)) reproduces p.
template <class F>
std::string serialize_presentation(const Presentation<F>& p) {
    std::string out = "field " + spec_of(p.field).str() + "\n";
    for (const auto& v : p.quiver.vertex_labels) out += "vertex " + v + "\n";
    for (const auto& a : p.quiver.arrows)
        out += "arrow " + a.label + ": " + p.quiver.vertex_labels[a.src] + " -> " +
               p.quiver.vertex_labels[a.tgt] + "\n";
    for (const auto& r : p.relations) {
        out += "relation ";
        for (std::size_t i = 0; i < r.terms.size(); ++i) {
            const auto& t = r.terms[i];
            std::string c = p.field.str(t.coeff);
            bool neg = !c.empty() && c[0] == '-';
            if (neg) c = c.substr(1);
            if (i == 0)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            if (c != "1") out += c + "*";
            out += t.path.str(p.quiver);
        }
        out += "\n";
    }
    return out;
}

template <class F>
std::uint64_t presentation_digest(const Presentation<F>& p) {
    return fnv1a64(serialize_presentation(p));
}

// ---------------------------------------------------------------------------
// completion + admissibility
// ---------------------------------------------------------------------------

template <class F>
RewriteSystem<F> complete_rewrite_system(const Presentation<F>& p, std::size_t degree_cap) {
    RewriteSystem<F> sys(p.field, p.quiver, degree_cap);
    sys.complete(p.relations);
    return sys;
}

/// Certified nilpotency degree: smallest N <= cap with J^N inside the ideal.
template <class F>
std::size_t check_admissible(const RewriteSystem<F>& sys, std::size_t cap) {
    return sys.nilpotency_degree(cap);
}

/// Presentation plus everything derived from it. Normal words are listed by
/// length, then by path order within a length; they form the basis of the
/// quotient algebra.
template <class F>
struct Analysis {
    Presentation<F> pres;
    RewriteSystem<F> system;
    std::size_t nilpotency;
    std::size_t cap_used;
    std::vector<Path> basis;

    std::size_t dimension() const { return basis.size(); }
};

/// Complete and certify with the default cap policy: probe with a cap from
/// the relation degrees, read off N, then settle on max(probe, 3N).
template <class F>
Analysis<F> analyze(const Presentation<F>& p, std::optional<std::size_t> cap = std::nullopt) {
    std::size_t max_deg = 2;
    for (const auto& r : p.relations)
        for (const auto& t : r.terms) max_deg = std::max(max_deg, t.path.length());
    // longest relation-free path still needs to die by admissibility; give
    // acyclic quivers room to certify N = longest path + 1
    std::size_t probe = std::max<std::size_t>({8, 2 * max_deg + 2, p.quiver.num_vertices() + 2});
    std::size_t use = cap.value_or(probe);
    RewriteSystem<F> sys = complete_rewrite_system(p, use);
    std::size_t n = check_admissible(sys, use);
    if (!cap && 3 * n > use) {
        use = 3 * n;
        sys = complete_rewrite_system(p, use);
        n = check_admissible(sys, use);
    }
    auto levels = sys.normal_words_by_length(n);
    std::vector<Path> basis;
    for (auto& level : levels) {
        std::sort(level.begin(), level.end(), path_lt);
        for (auto& w : level) basis.push_back(std::move(w));
    }
    return {p, std::move(sys), n, use, std::move(basis)};
}

// ---------------------------------------------------------------------------
// minimal generating sets of the relation ideal
// ---------------------------------------------------------------------------

namespace detail {

/// Linear-algebra model of the relation ideal inside the truncation by
/// J^(N+1): coordinates over all paths of length <= N, a spanning basis of
/// the ideal's image, and the subspace J*I + I*J.
template <class F>
struct RelationSpace {
    std::vector<Path> paths;  // all paths of length <= N, BFS order
    std::map<std::pair<std::vector<ArrowId>, VertexId>, std::size_t> index;
    std::vector<PathPoly<F>> ideal_basis;      // spanning set of the ideal image
    SpanBuilder<F> ideal_span;                 // same, as vectors
    SpanBuilder<F> boundary_span;              // J*I + I*J
    std::vector<std::size_t> minimal_rel_ids;  // relations forming a basis mod boundary

    RelationSpace(F f, std::size_t n) : ideal_span(f, n), boundary_span(f, n) {}
};

template <class F>
std::vector<typename F::Elem> poly_coords(
    const F& field, const std::map<std::pair<std::vector<ArrowId>, VertexId>, std::size_t>& index,
    std::size_t n, const PathPoly<F>& p) {
    std::vector<typename F::Elem> v(n, field.zero());
    for (const auto& t : p.terms) {
        auto it = index.find({t.path.word, t.path.src});
        if (it == index.end()) continue;  // beyond the truncation degree
        v[it->second] = t.coeff;
    }
    return v;
}

/// Multiply by a single arrow inside the truncation, dropping overflow terms
/// (they lie in J^(N+1), hence inside J*I already).
template <class F>
PathPoly<F> truncated_arrow_mul(const F& field, const Quiver& q, const PathPoly<F>& p, ArrowId a,
                                bool arrow_on_left, std::size_t max_len) {
    std::vector<typename PathPoly<F>::Term> raw;
    Path ap = Path::of_arrow(q, a);
    for (const auto& t : p.terms) {
        if (t.path.length() + 1 > max_len) continue;
        if (arrow_on_left) {
            if (t.path.tgt != ap.src) continue;
            raw.push_back({t.coeff, ap.compose_after(t.path)});
        } else {
            if (ap.tgt != t.path.src) continue;
            raw.push_back({t.coeff, t.path.compose_after(ap)});
        }
    }
    return PathPoly<F>::collect(field, std::move(raw));
}

template <class F>
RelationSpace<F> relation_space(const Analysis<F>& an) {
    const F& field = an.pres.field;
    const Quiver& q = an.pres.quiver;
    const std::size_t N = an.nilpotency;
    // all paths of length <= N
    std::vector<Path> paths;
    for (VertexId v = 0; v < q.num_vertices(); ++v) paths.push_back(Path::trivial(v));
    std::size_t level_begin = 0;
    for (std::size_t len = 1; len <= N; ++len) {
        std::size_t level_end = paths.size();
        for (std::size_t i = level_begin; i < level_end; ++i)
            for (ArrowId a = 0; a < q.num_arrows(); ++a)
                if (q.arrows[a].src == paths[i].tgt)
                    paths.push_back(Path::of_arrow(q, a).compose_after(paths[i]));
        if (paths.size() == level_end) break;
        level_begin = level_end;
    }
    RelationSpace<F> rs(field, paths.size());
    rs.paths = paths;
    for (std::size_t i = 0; i < paths.size(); ++i)
        rs.index[{paths[i].word, paths[i].src}] = i;

    auto coords = [&](const PathPoly<F>& p) {
        return poly_coords<F>(field, rs.index, rs.paths.size(), p);
    };
    auto truncate = [&](const PathPoly<F>& p) {
        PathPoly<F> out;
        for (const auto& t : p.terms)
            if (t.path.length() <= N) out.terms.push_back(t);
        return out;
    };

    // close the relation span under one-arrow multiplication on both sides
    std::vector<PathPoly<F>> work;
    for (const auto& r : an.pres.relations) {
        PathPoly<F> tr = truncate(r);
        if (tr.is_zero()) continue;
        if (rs.ideal_span.add(coords(tr))) {
            rs.ideal_basis.push_back(tr);
            work.push_back(tr);
        }
    }
    while (!work.empty()) {
        PathPoly<F> p = std::move(work.back());
        work.pop_back();
        for (ArrowId a = 0; a < q.num_arrows(); ++a)
            for (bool left : {true, false}) {
                PathPoly<F> ext = truncated_arrow_mul(field, q, p, a, left, N);
                if (ext.is_zero()) continue;
                if (rs.ideal_span.add(coords(ext))) {
                    rs.ideal_basis.push_back(ext);
                    work.push_back(std::move(ext));
                }
            }
    }
    // J^(N+1) also lies in J*I: paths of length exactly N belong to the
    // boundary once multiplied, and every length-N path is already in the
    // ideal, so J*I + I*J is spanned by one-arrow products of the ideal span.
    for (const auto& p : rs.ideal_basis)
        for (ArrowId a = 0; a < q.num_arrows(); ++a)
            for (bool left : {true, false}) {
                PathPoly<F> ext = truncated_arrow_mul(field, q, p, a, left, N);
                if (!ext.is_zero()) rs.boundary_span.add(coords(ext));
            }
    // minimal generating set: relations independent modulo the boundary
    SpanBuilder<F> mod = rs.boundary_span;
    for (std::size_t i = 0; i < an.pres.relations.size(); ++i) {
        PathPoly<F> tr = truncate(an.pres.relations[i]);
        if (tr.is_zero()) continue;
        if (mod.add(coords(tr))) rs.minimal_rel_ids.push_back(i);
    }
    return rs;
}

}  // namespace detail

/// Basis of I/(J*I + I*J), reported as representatives drawn from the given
/// relation list. The count is the minimal number of relations.
template <class F>
std::vector<PathPoly<F>> minimal_relation_space(const Analysis<F>& an) {
    auto rs = detail::relation_space(an);
    std::vector<PathPoly<F>> out;
    for (auto i : rs.minimal_rel_ids) out.push_back(an.pres.relations[i]);
    return out;
}

/// True when every minimal generating set of the ideal mentions the arrow.
/// False (the arrow-removal precondition) exactly when ideal elements
/// supported on arrow-free paths still span I/(J*I + I*J).
template <class F>
bool arrow_occurs_in_every_min_genset(const Analysis<F>& an, ArrowId arrow) {
    if (arrow >= an.pres.quiver.num_arrows()) throw Error("unknown arrow id");
    const F& field = an.pres.field;
    auto rs = detail::relation_space(an);
    std::size_t n = rs.paths.size();
    std::size_t target = rs.ideal_span.dim();
    if (target == rs.boundary_span.dim()) return false;  // I = J*I+I*J, nothing to generate
    // rows of the ideal basis living on paths that mention the arrow
    std::vector<std::size_t> tainted_rows;
    for (std::size_t i = 0; i < n; ++i)
        for (ArrowId a : rs.paths[i].word)
            if (a == arrow) {
                tainted_rows.push_back(i);
                break;
            }
    Mat<F> basis_cols(field, n, rs.ideal_basis.size());
    for (std::size_t j = 0; j < rs.ideal_basis.size(); ++j) {
        auto v = detail::poly_coords<F>(field, rs.index, n, rs.ideal_basis[j]);
        for (std::size_t i = 0; i < n; ++i) basis_cols.at(i, j) = v[i];
    }
    Mat<F> tainted(field, tainted_rows.size(), rs.ideal_basis.size());
    for (std::size_t r = 0; r < tainted_rows.size(); ++r)
        for (std::size_t j = 0; j < rs.ideal_basis.size(); ++j)
            tainted.at(r, j) = basis_cols.at(tainted_rows[r], j);
    Mat<F> avoiding_combos = tainted.kernel_basis();
    Mat<F> avoiding = basis_cols * avoiding_combos;
    SpanBuilder<F> sb = rs.boundary_span;
    for (std::size_t j = 0; j < avoiding.cols(); ++j) sb.add(avoiding.col(j));
    return sb.dim() < target;
}

/// Delete an arrow and every relation term that mentions it (set the arrow to
/// zero). Relations that lose all terms are dropped.
template <class F>
Presentation<F> quotient_by_arrow(const Presentation<F>& p, ArrowId arrow) {
    if (arrow >= p.quiver.num_arrows()) throw Error("unknown arrow id");
    Presentation<F> out{p.field, {}, {}};
    out.quiver.vertex_labels = p.quiver.vertex_labels;
    std::vector<std::optional<ArrowId>> remap(p.quiver.num_arrows());
    for (ArrowId a = 0; a < p.quiver.num_arrows(); ++a) {
        if (a == arrow) continue;
        remap[a] = static_cast<ArrowId>(out.quiver.arrows.size());
        out.quiver.arrows.push_back(p.quiver.arrows[a]);
    }
    for (const auto& r : p.relations) {
        PathPoly<F> nr;
        for (const auto& t : r.terms) {
            bool mentions = false;
            for (ArrowId a : t.path.word)
                if (a == arrow) {
                    mentions = true;
                    break;
                }
            if (mentions) continue;
            Path q = t.path;
            for (auto& a : q.word) a = *remap[a];
            nr.terms.push_back({t.coeff, std::move(q)});
        }
        if (!nr.is_zero()) out.relations.push_back(std::move(nr));
    }
    return out;
}

}  // namespace gored
