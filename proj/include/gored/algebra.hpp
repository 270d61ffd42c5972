#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gored/common.hpp"
#include "gored/matrix.hpp"
#include "gored/presentation.hpp"

namespace gored {

/// Finite-dimensional algebra given by a basis, structure constants, and a
/// complete set of primitive orthogonal idempotents. Every basis element is
/// vertex-graded: it lies in e_i * A * e_j for exactly one pair (i, j), read
/// as a map from vertex j to vertex i.
///
/// Construction verifies the idempotent axioms, grading consistency,
/// associativity on all basis triples, and that the span of non-idempotent
/// basis elements is a nilpotent ideal (this pins the radical and makes the
/// algebra basic with one simple per idempotent). Radical filtration degrees
/// are computed, not trusted.
template <class F>
class BasedAlgebra {
  public:
    using Elem = typename F::Elem;
    using Vec = std::vector<Elem>;

    struct SparseVec {
        std::vector<std::pair<std::size_t, Elem>> terms;  // sorted by index
    };

    BasedAlgebra(F field, std::vector<std::string> vertex_labels, std::vector<std::string> labels,
                 std::vector<std::pair<VertexId, VertexId>> grading,  // (tgt, src) per element
                 std::vector<std::size_t> idempotent_of_vertex,       // vertex -> basis index
                 std::vector<std::vector<SparseVec>> products)
        : field_(std::move(field)),
          vertex_labels_(std::move(vertex_labels)),
          labels_(std::move(labels)),
          grading_(std::move(grading)),
          idempotent_(std::move(idempotent_of_vertex)),
          products_(std::move(products)) {
        validate();
        compute_radical();
        digest_ = compute_digest();
    }

    const F& field() const { return field_; }
    std::size_t dim() const { return labels_.size(); }
    std::size_t num_vertices() const { return vertex_labels_.size(); }
    const std::vector<std::string>& vertex_labels() const { return vertex_labels_; }
    const std::vector<std::string>& labels() const { return labels_; }
    VertexId tgt_of(std::size_t b) const { return grading_[b].first; }
    VertexId src_of(std::size_t b) const { return grading_[b].second; }
    std::size_t idempotent(VertexId v) const { return idempotent_[v]; }
    bool is_idempotent_elem(std::size_t b) const { return rad_degree_[b] == 0; }
    std::size_t radical_degree(std::size_t b) const { return rad_degree_[b]; }
    std::size_t radical_length() const { return rad_length_; }
    const std::vector<std::size_t>& generators() const { return generators_; }
    std::uint64_t digest() const { return digest_; }

    const SparseVec& product(std::size_t i, std::size_t j) const { return products_[i][j]; }

    bool operator==(const BasedAlgebra& o) const { return digest_ == o.digest_; }
    bool operator!=(const BasedAlgebra& o) const { return digest_ != o.digest_; }

    /// Product of two coordinate vectors.
    Vec mult(const Vec& x, const Vec& y) const {
        Vec out(dim(), field_.zero());
        for (std::size_t i = 0; i < dim(); ++i) {
            if (field_.is_zero(x[i])) continue;
            for (std::size_t j = 0; j < dim(); ++j) {
                if (field_.is_zero(y[j])) continue;
                Elem c = field_.mul(x[i], y[j]);
                for (const auto& [k, ck] : products_[i][j].terms)
                    out[k] = field_.add(out[k], field_.mul(c, ck));
            }
        }
        return out;
    }

    Vec unit_vec(std::size_t b) const {
        Vec v(dim(), field_.zero());
        v[b] = field_.one();
        return v;
    }

    Vec identity_elem() const {
        Vec v(dim(), field_.zero());
        for (auto e : idempotent_) v[e] = field_.one();
        return v;
    }

    /// Basis indices spanning the radical (all non-idempotent elements).
    std::vector<std::size_t> radical_basis() const {
        std::vector<std::size_t> out;
        for (std::size_t b = 0; b < dim(); ++b)
            if (!is_idempotent_elem(b)) out.push_back(b);
        return out;
    }

    const SpanBuilder<F>& radical_square_span() const { return *rad2_span_; }

    std::string describe() const {
        std::string out = "dim " + std::to_string(dim()) + " over " + field_.name() + ", vertices";
        for (const auto& v : vertex_labels_) out += " " + v;
        return out;
    }

  private:
    void validate() {
        std::size_t n = dim();
        if (grading_.size() != n || products_.size() != n)
            throw DimensionMismatch("algebra table sizes");
        for (const auto& row : products_)
            if (row.size() != n) throw DimensionMismatch("algebra table sizes");
        if (idempotent_.size() != vertex_labels_.size())
            throw DimensionMismatch("one idempotent per vertex required");
        for (VertexId v = 0; v < idempotent_.size(); ++v) {
            std::size_t e = idempotent_[v];
            if (grading_[e] != std::make_pair(v, v))
                throw Error("idempotent of vertex " + vertex_labels_[v] + " is not graded (v,v)");
        }
        // grading consistency of all products, and the idempotent axioms
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const auto& p = products_[i][j];
                if (src_of(i) != tgt_of(j)) {
                    if (!p.terms.empty()) throw Error("nonzero product across mismatched vertices");
                    continue;
                }
                for (const auto& [k, c] : p.terms) {
                    if (field_.is_zero(c)) throw Error("zero coefficient stored in product table");
                    if (tgt_of(k) != tgt_of(i) || src_of(k) != src_of(j))
                        throw Error("product term violates the vertex grading");
                }
            }
        for (VertexId v = 0; v < idempotent_.size(); ++v) {
            std::size_t e = idempotent_[v];
            for (std::size_t b = 0; b < n; ++b) {
                if (tgt_of(b) == v && !is_unit_product(e, b, b))
                    throw Error("left idempotent action is not the identity");
                if (src_of(b) == v && !is_unit_product(b, e, b))
                    throw Error("right idempotent action is not the identity");
            }
        }
        // associativity on all basis triples
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (src_of(i) != tgt_of(j)) continue;
                for (std::size_t k = 0; k < n; ++k) {
                    if (src_of(j) != tgt_of(k)) continue;
                    Vec left = mult(sparse_to_vec(products_[i][j]), unit_vec(k));
                    Vec right = mult(unit_vec(i), sparse_to_vec(products_[j][k]));
                    for (std::size_t t = 0; t < n; ++t)
                        if (!field_.eq(left[t], right[t]))
                            throw Error("structure constants are not associative at (" +
                                        labels_[i] + "," + labels_[j] + "," + labels_[k] + ")");
                }
            }
    }

    bool is_unit_product(std::size_t i, std::size_t j, std::size_t expect) const {
        const auto& p = products_[i][j];
        return p.terms.size() == 1 && p.terms[0].first == expect &&
               field_.eq(p.terms[0].second, field_.one());
    }

    Vec sparse_to_vec(const SparseVec& s) const {
        Vec v(dim(), field_.zero());
        for (const auto& [k, c] : s.terms) v[k] = c;
        return v;
    }

    void compute_radical() {
        std::size_t n = dim();
        rad_degree_.assign(n, 0);
        // chain of subspaces rad^1, rad^2, ... until it vanishes
        std::vector<SpanBuilder<F>> chain;
        SpanBuilder<F> rad1(field_, n);
        std::vector<Vec> level;
        for (std::size_t b = 0; b < n; ++b) {
            bool idem = false;
            for (auto e : idempotent_) idem |= (e == b);
            if (!idem) {
                rad1.add(unit_vec(b));
                level.push_back(unit_vec(b));
            }
        }
        chain.push_back(rad1);
        std::vector<Vec> rad_basis_vecs = level;
        while (chain.back().dim() > 0) {
            if (chain.size() > n + 1)
                throw NotBasic(
                    "the complement of the idempotents is not nilpotent; "
                    "the given idempotents are not primitive orthogonal");
            SpanBuilder<F> next(field_, n);
            std::vector<Vec> next_level;
            for (const auto& x : level)
                for (const auto& r : rad_basis_vecs) {
                    Vec p = mult(x, r);
                    if (next.add(p)) next_level.push_back(p);
                    Vec q = mult(r, x);
                    if (next.add(q)) next_level.push_back(q);
                }
            chain.push_back(next);
            level = std::move(next_level);
        }
        rad_length_ = chain.size() - 1;  // rad^(rad_length_+1) = 0 with chain[0] = rad^1
        for (std::size_t b = 0; b < n; ++b) {
            std::size_t d = 0;
            for (std::size_t k = 0; k < chain.size(); ++k)
                if (chain[k].contains(unit_vec(b))) d = k + 1;
            rad_degree_[b] = d;
        }
        rad2_span_ = std::make_shared<SpanBuilder<F>>(chain.size() > 1 ? chain[1]
                                                                       : SpanBuilder<F>(field_, n));
        // generators: basis elements spanning rad / rad^2
        SpanBuilder<F> mod = *rad2_span_;
        for (std::size_t b = 0; b < n; ++b) {
            if (is_idempotent_elem(b)) continue;
            if (mod.add(unit_vec(b))) generators_.push_back(b);
        }
    }

    std::uint64_t compute_digest() const {
        std::string dump = field_.name() + "|";
        for (const auto& v : vertex_labels_) dump += v + ",";
        dump += "|";
        for (std::size_t b = 0; b < dim(); ++b)
            dump += labels_[b] + ":" + std::to_string(grading_[b].first) + ":" +
                    std::to_string(grading_[b].second) + ";";
        dump += "|";
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < dim(); ++j)
                for (const auto& [k, c] : products_[i][j].terms)
                    dump += std::to_string(i) + "*" + std::to_string(j) + "=" + std::to_string(k) +
                            "x" + field_.str(c) + ";";
        return fnv1a64(dump);
    }

    F field_;
    std::vector<std::string> vertex_labels_;
    std::vector<std::string> labels_;
    std::vector<std::pair<VertexId, VertexId>> grading_;
    std::vector<std::size_t> idempotent_;
    std::vector<std::vector<SparseVec>> products_;
    std::vector<std::size_t> rad_degree_;
    std::size_t rad_length_ = 0;
    std::vector<std::size_t> generators_;
    std::shared_ptr<SpanBuilder<F>> rad2_span_;
    std::uint64_t digest_ = 0;
};

template <class F>
using AlgebraHandle = std::shared_ptr<const BasedAlgebra<F>>;

/// Concrete carrier of the quotient algebra: basis = normal-form paths,
/// structure constants by concatenate-then-reduce, idempotents = trivial
/// paths.
template <class F>
AlgebraHandle<F> algebra_basis(const Analysis<F>& an) {
    const F& field = an.pres.field;
    const Quiver& q = an.pres.quiver;
    const auto& basis = an.basis;
    std::map<std::pair<std::vector<ArrowId>, VertexId>, std::size_t> index;
    for (std::size_t i = 0; i < basis.size(); ++i) index[{basis[i].word, basis[i].src}] = i;

    std::vector<std::string> labels;
    std::vector<std::pair<VertexId, VertexId>> grading;
    for (const auto& p : basis) {
        labels.push_back(p.str(q));
        grading.emplace_back(p.tgt, p.src);
    }
    std::vector<std::size_t> idem(q.num_vertices());
    for (VertexId v = 0; v < q.num_vertices(); ++v) idem[v] = index.at({{}, v});

    std::vector<std::vector<typename BasedAlgebra<F>::SparseVec>> products(
        basis.size(), std::vector<typename BasedAlgebra<F>::SparseVec>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j) {
            if (basis[i].src != basis[j].tgt) continue;
            PathPoly<F> composed = an.system.mul(
                PathPoly<F>::monomial(field, field.one(), basis[i]),
                PathPoly<F>::monomial(field, field.one(), basis[j]));
            auto& cell = products[i][j];
            for (const auto& t : composed.terms)
                cell.terms.emplace_back(index.at({t.path.word, t.path.src}), t.coeff);
            std::sort(cell.terms.begin(), cell.terms.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
        }
    return std::make_shared<BasedAlgebra<F>>(field, q.vertex_labels, std::move(labels),
                                             std::move(grading), std::move(idem),
                                             std::move(products));
}

/// Same basis, transposed structure constants, grading swapped.
template <class F>
AlgebraHandle<F> opposite(const BasedAlgebra<F>& a) {
    std::size_t n = a.dim();
    std::vector<std::pair<VertexId, VertexId>> grading(n);
    for (std::size_t b = 0; b < n; ++b) grading[b] = {a.src_of(b), a.tgt_of(b)};
    std::vector<std::size_t> idem(a.num_vertices());
    for (VertexId v = 0; v < a.num_vertices(); ++v) idem[v] = a.idempotent(v);
    std::vector<std::vector<typename BasedAlgebra<F>::SparseVec>> products(
        n, std::vector<typename BasedAlgebra<F>::SparseVec>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) products[i][j] = a.product(j, i);
    return std::make_shared<BasedAlgebra<F>>(a.field(), a.vertex_labels(), a.labels(),
                                             std::move(grading), std::move(idem),
                                             std::move(products));
}

template <class F>
AlgebraHandle<F> opposite(const AlgebraHandle<F>& a) {
    return opposite(*a);
}

/// Subset of the primitive idempotents; e is their sum.
struct IdempotentSpec {
    std::vector<VertexId> vertices;  // kept ascending and deduplicated

    static IdempotentSpec of(std::vector<VertexId> vs) {
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        return {std::move(vs)};
    }

    bool contains(VertexId v) const {
        return std::binary_search(vertices.begin(), vertices.end(), v);
    }
};

/// Corner algebra eAe together with the index bookkeeping the module layer
/// needs to cut modules down.
template <class F>
struct CornerData {
    AlgebraHandle<F> parent;
    IdempotentSpec spec;
    AlgebraHandle<F> algebra;               // eAe
    std::vector<std::size_t> basis_map;     // eAe basis index -> parent basis index
    std::vector<std::optional<std::size_t>> inverse_map;  // parent index -> eAe index
};

template <class F>
CornerData<F> corner_algebra(const AlgebraHandle<F>& a, const IdempotentSpec& e) {
    if (e.vertices.empty()) throw Error("empty idempotent set");
    for (auto v : e.vertices)
        if (v >= a->num_vertices()) throw Error("idempotent vertex out of range");
    CornerData<F> out;
    out.parent = a;
    out.spec = e;
    out.inverse_map.assign(a->dim(), std::nullopt);
    std::vector<std::string> labels, vlabels;
    std::vector<std::pair<VertexId, VertexId>> grading;
    std::vector<VertexId> new_vertex_of(a->num_vertices(), 0);
    for (std::size_t k = 0; k < e.vertices.size(); ++k) {
        new_vertex_of[e.vertices[k]] = static_cast<VertexId>(k);
        vlabels.push_back(a->vertex_labels()[e.vertices[k]]);
    }
    for (std::size_t b = 0; b < a->dim(); ++b) {
        if (!e.contains(a->tgt_of(b)) || !e.contains(a->src_of(b))) continue;
        out.inverse_map[b] = out.basis_map.size();
        out.basis_map.push_back(b);
        labels.push_back(a->labels()[b]);
        grading.emplace_back(new_vertex_of[a->tgt_of(b)], new_vertex_of[a->src_of(b)]);
    }
    std::vector<std::size_t> idem(e.vertices.size());
    for (std::size_t k = 0; k < e.vertices.size(); ++k)
        idem[k] = *out.inverse_map[a->idempotent(e.vertices[k])];
    std::size_t n = out.basis_map.size();
    std::vector<std::vector<typename BasedAlgebra<F>::SparseVec>> products(
        n, std::vector<typename BasedAlgebra<F>::SparseVec>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto& p = a->product(out.basis_map[i], out.basis_map[j]);
            for (const auto& [k, c] : p.terms) products[i][j].terms.emplace_back(*out.inverse_map[k], c);
        }
    out.algebra = std::make_shared<BasedAlgebra<F>>(a->field(), std::move(vlabels),
                                                    std::move(labels), std::move(grading),
                                                    std::move(idem), std::move(products));
    return out;
}

/// A-B-bimodule presented by commuting total action matrices on a chosen
/// basis of the underlying space.
template <class F>
struct BimoduleData {
    std::size_t dim = 0;
    std::vector<Mat<F>> left;   // one per basis element of A
    std::vector<Mat<F>> right;  // one per basis element of B
};

/// Triangular matrix algebra [A M; 0 B]. Vertices are A's followed by B's;
/// the bimodule sits in the off-diagonal component, mapping B-side columns
/// into the A-side. Incompatible action data fails the constructor's
/// associativity check.
template <class F>
AlgebraHandle<F> triangular_algebra(const AlgebraHandle<F>& a, const AlgebraHandle<F>& b,
                                    const BimoduleData<F>& m) {
    const F& field = a->field();
    if (!(field == b->field())) throw FieldMismatch("triangular algebra over mixed fields");
    std::size_t na = a->dim(), nb = b->dim(), nm = m.dim;
    if (m.left.size() != na || m.right.size() != nb)
        throw DimensionMismatch("bimodule action table sizes");
    // adapt the bimodule basis to the commuting idempotent projections
    Mat<F> basis(field, nm, 0);
    std::vector<std::pair<VertexId, VertexId>> m_grading;  // (A-vertex, B-vertex)
    for (VertexId i = 0; i < a->num_vertices(); ++i)
        for (VertexId j = 0; j < b->num_vertices(); ++j) {
            Mat<F> proj = m.left[a->idempotent(i)] * m.right[b->idempotent(j)];
            auto piv = proj.column_basis();
            for (auto c : piv) {
                basis = basis.hstack(Mat<F>::from_cols(field, {proj.col(c)}));
                m_grading.emplace_back(i, j);
            }
        }
    if (basis.cols() != nm)
        throw Error("bimodule idempotent projections do not decompose the space");
    auto basis_inv = basis.inverse();
    if (!basis_inv) throw Error("bimodule idempotent projections do not decompose the space");

    auto adapt = [&](const Mat<F>& act) { return (*basis_inv) * act * basis; };

    std::size_t n = na + nm + nb;
    std::vector<std::string> vlabels = a->vertex_labels();
    for (const auto& v : b->vertex_labels()) vlabels.push_back("B." + v);
    std::vector<std::string> labels;
    std::vector<std::pair<VertexId, VertexId>> grading;
    for (std::size_t i = 0; i < na; ++i) {
        labels.push_back("A." + a->labels()[i]);
        grading.emplace_back(a->tgt_of(i), a->src_of(i));
    }
    for (std::size_t k = 0; k < nm; ++k) {
        labels.push_back("M." + std::to_string(k));
        grading.emplace_back(m_grading[k].first,
                             static_cast<VertexId>(a->num_vertices() + m_grading[k].second));
    }
    for (std::size_t j = 0; j < nb; ++j) {
        labels.push_back("B." + b->labels()[j]);
        grading.emplace_back(static_cast<VertexId>(a->num_vertices() + b->tgt_of(j)),
                             static_cast<VertexId>(a->num_vertices() + b->src_of(j)));
    }
    std::vector<std::size_t> idem;
    for (VertexId v = 0; v < a->num_vertices(); ++v) idem.push_back(a->idempotent(v));
    for (VertexId v = 0; v < b->num_vertices(); ++v) idem.push_back(na + nm + b->idempotent(v));

    using SV = typename BasedAlgebra<F>::SparseVec;
    std::vector<std::vector<SV>> products(n, std::vector<SV>(n));
    auto put_col = [&](SV& cell, const Mat<F>& col_mat, std::size_t col, std::size_t offset) {
        for (std::size_t r = 0; r < col_mat.rows(); ++r)
            if (!field.is_zero(col_mat.at(r, col))) cell.terms.emplace_back(offset + r, col_mat.at(r, col));
    };
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) products[i][j] = a->product(i, j);
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            SV cell;
            for (const auto& [k, c] : b->product(i, j).terms) cell.terms.emplace_back(na + nm + k, c);
            products[na + nm + i][na + nm + j] = std::move(cell);
        }
    for (std::size_t i = 0; i < na; ++i) {
        Mat<F> act = adapt(m.left[i]);
        for (std::size_t k = 0; k < nm; ++k) put_col(products[i][na + k], act, k, na);
    }
    for (std::size_t j = 0; j < nb; ++j) {
        Mat<F> act = adapt(m.right[j]);
        for (std::size_t k = 0; k < nm; ++k) put_col(products[na + k][na + nm + j], act, k, na);
    }
    return std::make_shared<BasedAlgebra<F>>(field, std::move(vlabels), std::move(labels),
                                             std::move(grading), std::move(idem),
                                             std::move(products));
}

namespace detail {

inline bool plain_arrow_label(const std::string& s) {
    if (s.empty() || !is_ident_start(s[0])) return false;
    for (char c : s)
        if (!is_ident_char(c)) return false;
    return true;
}

}  // namespace detail

/// Gabriel quiver plus relations of a based algebra. Arrows come from a basis
/// of rad/rad^2 chosen among basis elements; relations are the reduced
/// rewriting rules of the kernel of the induced surjection from the path
/// algebra, found degree by degree.
template <class F>
Presentation<F> recover_presentation(const BasedAlgebra<F>& alg) {
    const F& field = alg.field();
    std::size_t n = alg.dim();
    Quiver q;
    q.vertex_labels = alg.vertex_labels();

    // arrow representatives: generator basis elements, in basis order
    std::vector<std::size_t> arrow_rep = alg.generators();
    std::vector<std::string> used_labels = q.vertex_labels;
    for (auto b : arrow_rep) {
        std::string label = alg.labels()[b];
        if (!detail::plain_arrow_label(label) ||
            std::find(used_labels.begin(), used_labels.end(), label) != used_labels.end()) {
            std::size_t k = 1;
            while (std::find(used_labels.begin(), used_labels.end(),
                             "x" + std::to_string(k)) != used_labels.end())
                ++k;
            label = "x" + std::to_string(k);
        }
        used_labels.push_back(label);
        q.arrows.push_back({label, alg.src_of(b), alg.tgt_of(b)});
    }

    // breadth-first Groebner recovery of the kernel of kQ' ->> A
    struct NormalWord {
        Path path;
        typename BasedAlgebra<F>::Vec image;
    };
    std::vector<NormalWord> normal;
    SpanBuilder<F> img_span(field, n);
    std::vector<Path> leads;
    std::vector<PathPoly<F>> relations;

    auto contains_lead = [&](const Path& w) {
        for (const auto& l : leads) {
            if (l.word.size() > w.word.size()) continue;
            for (std::size_t pos = 0; pos + l.word.size() <= w.word.size(); ++pos) {
                bool hit = true;
                for (std::size_t t = 0; t < l.word.size(); ++t)
                    if (w.word[pos + t] != l.word[t]) {
                        hit = false;
                        break;
                    }
                if (hit) return true;
            }
        }
        return false;
    };

    std::vector<NormalWord> level;
    for (VertexId v = 0; v < alg.num_vertices(); ++v) {
        NormalWord nw{Path::trivial(v), alg.unit_vec(alg.idempotent(v))};
        img_span.add(nw.image);
        normal.push_back(nw);
        level.push_back(std::move(nw));
    }
    while (!level.empty()) {
        // candidate words of the next length, in deterministic order
        std::vector<std::pair<Path, typename BasedAlgebra<F>::Vec>> candidates;
        for (const auto& nw : level)
            for (ArrowId a = 0; a < q.arrows.size(); ++a) {
                if (q.arrows[a].src != nw.path.tgt) continue;
                Path w = Path::of_arrow(q, a).compose_after(nw.path);
                if (contains_lead(w)) continue;
                auto img = alg.mult(alg.unit_vec(arrow_rep[a]), nw.image);
                candidates.emplace_back(std::move(w), std::move(img));
            }
        std::sort(candidates.begin(), candidates.end(),
                  [](const auto& x, const auto& y) { return path_lt(x.first, y.first); });
        std::vector<NormalWord> next;
        for (auto& [w, img] : candidates) {
            if (contains_lead(w)) continue;  // a lead recorded earlier this level
            if (img_span.add(img)) {
                next.push_back({w, img});
                normal.push_back(next.back());
                continue;
            }
            // dependent: express the image over the normal-word images
            Mat<F> cols(field, n, normal.size());
            for (std::size_t j = 0; j < normal.size(); ++j)
                for (std::size_t i = 0; i < n; ++i) cols.at(i, j) = normal[j].image[i];
            auto x = cols.solve(img);
            if (!x) throw Error("presentation recovery lost track of the image span");
            std::vector<typename PathPoly<F>::Term> terms;
            terms.push_back({field.one(), w});
            for (std::size_t j = 0; j < normal.size(); ++j)
                if (!field.is_zero((*x)[j]))
                    terms.push_back({field.neg((*x)[j]), normal[j].path});
            PathPoly<F> rel = PathPoly<F>::collect(field, std::move(terms));
            for (const auto& t : rel.terms)
                if (t.path.length() < 2)
                    throw Error("recovered relation has a term of length < 2");
            leads.push_back(w);
            relations.push_back(std::move(rel));
        }
        level = std::move(next);
    }
    if (normal.size() != n) throw NotBasic("basis not exhausted by path images");
    return Presentation<F>{field, std::move(q), std::move(relations)};
}

}  // namespace gored
