#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gored/algebra.hpp"
#include "gored/common.hpp"
#include "gored/matrix.hpp"

namespace gored {

/// Finite-dimensional left module, stored in a vertex-adapted basis: the
/// idempotent of vertex v acts as the coordinate projection onto block v, and
/// every algebra basis element acts by a single block (target block x source
/// block). Construction verifies the action against all structure constants.
template <class F>
class Module {
  public:
    using Elem = typename F::Elem;

    Module(AlgebraHandle<F> alg, std::vector<std::size_t> vdims, std::vector<Mat<F>> blocks)
        : d_(std::make_shared<Data>(Data{std::move(alg), std::move(vdims), {}, std::move(blocks)})) {
        auto& data = const_cast<Data&>(*d_);
        data.offsets.assign(data.alg->num_vertices() + 1, 0);
        for (std::size_t v = 0; v < data.vdims.size(); ++v)
            data.offsets[v + 1] = data.offsets[v] + data.vdims[v];
        verify();
    }

    /// Build from total action matrices with arbitrary (valid) idempotent
    /// actions; the basis is re-adapted so idempotents become coordinate
    /// projections.
    static Module from_total(AlgebraHandle<F> alg, std::size_t n,
                             const std::vector<Mat<F>>& total) {
        const F& field = alg->field();
        if (total.size() != alg->dim()) throw DimensionMismatch("one action matrix per basis element");
        std::size_t r = alg->num_vertices();
        // change of basis: concatenated column bases of the idempotent images
        Mat<F> u(field, n, 0);
        std::vector<std::size_t> vdims;
        for (VertexId v = 0; v < r; ++v) {
            const Mat<F>& p = total[alg->idempotent(v)];
            auto piv = p.column_basis();
            vdims.push_back(piv.size());
            for (auto c : piv) u = u.hstack(Mat<F>::from_cols(field, {p.col(c)}));
        }
        if (u.cols() != n) throw Error("idempotent actions do not decompose the space");
        auto u_inv = u.inverse();
        if (!u_inv) throw Error("idempotent actions do not decompose the space");
        std::vector<std::size_t> offsets(r + 1, 0);
        for (std::size_t v = 0; v < r; ++v) offsets[v + 1] = offsets[v] + vdims[v];
        std::vector<Mat<F>> blocks;
        for (std::size_t b = 0; b < alg->dim(); ++b) {
            Mat<F> t = (*u_inv) * total[b] * u;
            VertexId w = alg->tgt_of(b), v = alg->src_of(b);
            Mat<F> blk(field, vdims[w], vdims[v]);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (field.is_zero(t.at(i, j))) continue;
                    bool in_block = i >= offsets[w] && i < offsets[w + 1] && j >= offsets[v] &&
                                    j < offsets[v + 1];
                    if (!in_block) throw Error("action does not respect the vertex grading");
                    blk.at(i - offsets[w], j - offsets[v]) = t.at(i, j);
                }
            blocks.push_back(std::move(blk));
        }
        return Module(std::move(alg), std::move(vdims), std::move(blocks));
    }

    static Module zero(AlgebraHandle<F> alg) {
        std::vector<std::size_t> vdims(alg->num_vertices(), 0);
        std::vector<Mat<F>> blocks;
        for (std::size_t b = 0; b < alg->dim(); ++b) blocks.emplace_back(alg->field(), 0, 0);
        return Module(std::move(alg), std::move(vdims), std::move(blocks));
    }

    const AlgebraHandle<F>& algebra() const { return d_->alg; }
    const F& field() const { return d_->alg->field(); }
    std::size_t dim() const { return d_->offsets.back(); }
    std::size_t vdim(VertexId v) const { return d_->vdims[v]; }
    std::size_t offset(VertexId v) const { return d_->offsets[v]; }
    const std::vector<std::size_t>& dim_vector() const { return d_->vdims; }
    bool is_zero() const { return dim() == 0; }

    /// Action block of a basis element: block (tgt x src).
    const Mat<F>& block(std::size_t b) const { return d_->action[b]; }

    Mat<F> action_total(std::size_t b) const {
        const F& f = field();
        Mat<F> out(f, dim(), dim());
        VertexId w = d_->alg->tgt_of(b), v = d_->alg->src_of(b);
        for (std::size_t i = 0; i < d_->vdims[w]; ++i)
            for (std::size_t j = 0; j < d_->vdims[v]; ++j)
                out.at(d_->offsets[w] + i, d_->offsets[v] + j) = d_->action[b].at(i, j);
        return out;
    }

    /// Action of a vertex-graded algebra element (all nonzero coordinates
    /// graded (w, v)) as a single block.
    Mat<F> action_graded(const typename BasedAlgebra<F>::Vec& x, VertexId w, VertexId v) const {
        const F& f = field();
        Mat<F> out(f, d_->vdims[w], d_->vdims[v]);
        for (std::size_t b = 0; b < d_->alg->dim(); ++b) {
            if (f.is_zero(x[b])) continue;
            if (d_->alg->tgt_of(b) != w || d_->alg->src_of(b) != v)
                throw Error("element is not graded (w, v)");
            out = out + d_->action[b].scaled(x[b]);
        }
        return out;
    }

    /// Per-vertex spans of rad * M.
    std::vector<SpanBuilder<F>> radical_spans() const {
        const F& f = field();
        std::vector<SpanBuilder<F>> spans;
        for (VertexId w = 0; w < d_->alg->num_vertices(); ++w) spans.emplace_back(f, d_->vdims[w]);
        for (std::size_t b : d_->alg->radical_basis()) {
            VertexId w = d_->alg->tgt_of(b);
            for (std::size_t c = 0; c < d_->action[b].cols(); ++c)
                spans[w].add(d_->action[b].col(c));
        }
        return spans;
    }

    std::string describe() const {
        std::string out = "dim " + std::to_string(dim()) + " (";
        for (std::size_t v = 0; v < d_->vdims.size(); ++v) {
            if (v) out += ",";
            out += std::to_string(d_->vdims[v]);
        }
        return out + ")";
    }

  private:
    struct Data {
        AlgebraHandle<F> alg;
        std::vector<std::size_t> vdims;
        std::vector<std::size_t> offsets;
        std::vector<Mat<F>> action;
    };

    void verify() const {
        const auto& alg = *d_->alg;
        const F& f = field();
        if (d_->vdims.size() != alg.num_vertices()) throw DimensionMismatch("vertex dim vector");
        if (d_->action.size() != alg.dim()) throw DimensionMismatch("one action block per basis element");
        for (std::size_t b = 0; b < alg.dim(); ++b) {
            if (d_->action[b].rows() != d_->vdims[alg.tgt_of(b)] ||
                d_->action[b].cols() != d_->vdims[alg.src_of(b)])
                throw DimensionMismatch("action block shape for " + alg.labels()[b]);
        }
        for (VertexId v = 0; v < alg.num_vertices(); ++v)
            if (!(d_->action[alg.idempotent(v)] == Mat<F>::identity(f, d_->vdims[v])))
                throw Error("idempotent does not act as the identity on its block");
        // action respects every structure constant
        for (std::size_t i = 0; i < alg.dim(); ++i)
            for (std::size_t j = 0; j < alg.dim(); ++j) {
                if (alg.src_of(i) != alg.tgt_of(j)) continue;
                Mat<F> lhs = d_->action[i] * d_->action[j];
                Mat<F> rhs(f, lhs.rows(), lhs.cols());
                for (const auto& [k, c] : alg.product(i, j).terms)
                    rhs = rhs + d_->action[k].scaled(c);
                if (!(lhs == rhs))
                    throw Error("action violates the structure constant at (" + alg.labels()[i] +
                                ", " + alg.labels()[j] + ")");
            }
    }

    std::shared_ptr<const Data> d_;
};

template <class F>
void check_same_algebra(const Module<F>& a, const Module<F>& b) {
    if (*a.algebra() != *b.algebra()) throw Error("modules live over different algebras");
}

/// Module map, stored as one block per vertex. Construction verifies the
/// intertwining relation against every algebra basis element.
template <class F>
class Morphism {
  public:
    Morphism(Module<F> src, Module<F> tgt, std::vector<Mat<F>> blocks)
        : src_(std::move(src)), tgt_(std::move(tgt)), blocks_(std::move(blocks)) {
        check_same_algebra(src_, tgt_);
        const auto& alg = *src_.algebra();
        if (blocks_.size() != alg.num_vertices()) throw DimensionMismatch("one block per vertex");
        for (VertexId v = 0; v < alg.num_vertices(); ++v)
            if (blocks_[v].rows() != tgt_.vdim(v) || blocks_[v].cols() != src_.vdim(v))
                throw DimensionMismatch("morphism block shape at vertex " + std::to_string(v));
        for (std::size_t b = 0; b < alg.dim(); ++b) {
            VertexId w = alg.tgt_of(b), v = alg.src_of(b);
            if (!(tgt_.block(b) * blocks_[v] == blocks_[w] * src_.block(b)))
                throw Error("map does not intertwine the action of " + alg.labels()[b]);
        }
    }

    static Morphism zero(Module<F> src, Module<F> tgt) {
        const F& f = src.field();
        std::vector<Mat<F>> blocks;
        for (VertexId v = 0; v < src.algebra()->num_vertices(); ++v)
            blocks.emplace_back(f, tgt.vdim(v), src.vdim(v));
        return Morphism(std::move(src), std::move(tgt), std::move(blocks));
    }

    static Morphism identity(Module<F> m) {
        const F& f = m.field();
        std::vector<Mat<F>> blocks;
        for (VertexId v = 0; v < m.algebra()->num_vertices(); ++v)
            blocks.push_back(Mat<F>::identity(f, m.vdim(v)));
        Module<F> copy = m;
        return Morphism(std::move(copy), std::move(m), std::move(blocks));
    }

    const Module<F>& source() const { return src_; }
    const Module<F>& target() const { return tgt_; }
    const Mat<F>& block(VertexId v) const { return blocks_[v]; }

    Mat<F> total() const {
        const F& f = src_.field();
        Mat<F> out(f, tgt_.dim(), src_.dim());
        for (VertexId v = 0; v < blocks_.size(); ++v)
            for (std::size_t i = 0; i < blocks_[v].rows(); ++i)
                for (std::size_t j = 0; j < blocks_[v].cols(); ++j)
                    out.at(tgt_.offset(v) + i, src_.offset(v) + j) = blocks_[v].at(i, j);
        return out;
    }

    std::size_t rank() const {
        std::size_t r = 0;
        for (const auto& b : blocks_) r += b.rank();
        return r;
    }

    bool is_zero() const {
        for (const auto& b : blocks_)
            if (!b.is_zero()) return false;
        return true;
    }

    bool is_injective() const { return rank() == src_.dim(); }
    bool is_surjective() const { return rank() == tgt_.dim(); }
    bool is_invertible() const { return src_.dim() == tgt_.dim() && rank() == src_.dim(); }

    /// this after g.
    Morphism compose_after(const Morphism& g) const {
        std::vector<Mat<F>> blocks;
        for (VertexId v = 0; v < blocks_.size(); ++v) blocks.push_back(blocks_[v] * g.blocks_[v]);
        return Morphism(g.src_, tgt_, std::move(blocks));
    }

    Morphism add(const Morphism& o) const {
        std::vector<Mat<F>> blocks;
        for (VertexId v = 0; v < blocks_.size(); ++v) blocks.push_back(blocks_[v] + o.blocks_[v]);
        return Morphism(src_, tgt_, std::move(blocks));
    }

    Morphism scaled(const typename F::Elem& c) const {
        std::vector<Mat<F>> blocks;
        for (VertexId v = 0; v < blocks_.size(); ++v) blocks.push_back(blocks_[v].scaled(c));
        return Morphism(src_, tgt_, std::move(blocks));
    }

    std::optional<Morphism> inverse() const {
        if (src_.dim() != tgt_.dim()) return std::nullopt;
        std::vector<Mat<F>> blocks;
        for (VertexId v = 0; v < blocks_.size(); ++v) {
            auto inv = blocks_[v].rows() == blocks_[v].cols() ? blocks_[v].inverse() : std::nullopt;
            if (!inv) return std::nullopt;
            blocks.push_back(std::move(*inv));
        }
        return Morphism(tgt_, src_, std::move(blocks));
    }

  private:
    Module<F> src_, tgt_;
    std::vector<Mat<F>> blocks_;
};

// ---------------------------------------------------------------------------
// standard modules
// ---------------------------------------------------------------------------

template <class F>
Module<F> simple(AlgebraHandle<F> alg, VertexId v) {
    if (v >= alg->num_vertices()) throw Error("bad vertex index");
    const F& f = alg->field();
    std::vector<std::size_t> vdims(alg->num_vertices(), 0);
    vdims[v] = 1;
    std::vector<Mat<F>> blocks;
    for (std::size_t b = 0; b < alg->dim(); ++b) {
        std::size_t r = alg->tgt_of(b) == v ? 1 : 0;
        std::size_t c = alg->src_of(b) == v ? 1 : 0;
        Mat<F> blk(f, r, c);
        if (b == alg->idempotent(v)) blk.at(0, 0) = f.one();
        blocks.push_back(std::move(blk));
    }
    return Module<F>(std::move(alg), std::move(vdims), std::move(blocks));
}

/// Direct sum of projectives A*e_v, one summand per listed generator vertex,
/// with the coordinate bookkeeping needed to read differentials back as
/// algebra elements. Coordinates in block w: summands in order, inside a
/// summand the algebra basis elements with grading (w, v_s) in basis order.
template <class F>
struct ProjectiveSum {
    AlgebraHandle<F> alg;
    std::vector<VertexId> gen_vertices;
    std::vector<std::vector<std::size_t>> coord;  // [summand][algebra basis elt] -> coordinate
    std::optional<Module<F>> module;

    static ProjectiveSum build(AlgebraHandle<F> alg, std::vector<VertexId> gens) {
        const F& f = alg->field();
        ProjectiveSum ps;
        ps.alg = alg;
        ps.gen_vertices = std::move(gens);
        std::size_t nb = alg->dim();
        ps.coord.assign(ps.gen_vertices.size(), std::vector<std::size_t>(nb, SIZE_MAX));
        std::vector<std::size_t> vdims(alg->num_vertices(), 0);
        // layout per vertex block
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> layout(alg->num_vertices());
        for (std::size_t s = 0; s < ps.gen_vertices.size(); ++s)
            for (std::size_t b = 0; b < nb; ++b)
                if (alg->src_of(b) == ps.gen_vertices[s]) layout[alg->tgt_of(b)].emplace_back(s, b);
        std::vector<std::size_t> local(alg->num_vertices(), 0);
        for (VertexId w = 0; w < alg->num_vertices(); ++w) {
            std::sort(layout[w].begin(), layout[w].end());
            for (const auto& [s, b] : layout[w]) ps.coord[s][b] = vdims[w]++;
        }
        std::vector<Mat<F>> blocks;
        for (std::size_t g = 0; g < nb; ++g) {
            VertexId w2 = alg->tgt_of(g), w1 = alg->src_of(g);
            Mat<F> blk(f, vdims[w2], vdims[w1]);
            for (std::size_t s = 0; s < ps.gen_vertices.size(); ++s)
                for (std::size_t b = 0; b < nb; ++b) {
                    if (ps.coord[s][b] == SIZE_MAX || alg->tgt_of(b) != w1) continue;
                    for (const auto& [k, c] : alg->product(g, b).terms)
                        blk.at(ps.coord[s][k], ps.coord[s][b]) = c;
                }
            blocks.push_back(std::move(blk));
        }
        ps.module = Module<F>(alg, std::move(vdims), std::move(blocks));
        return ps;
    }

    /// Total module coordinate of the s-th generator (the idempotent of its
    /// vertex).
    std::size_t generator_coordinate(std::size_t s) const {
        return module->offset(gen_vertices[s]) + coord[s][alg->idempotent(gen_vertices[s])];
    }

    /// Read a vector of the summand-s block structure back as algebra
    /// coefficients: the unique x in A*e_{v_s} per summand with sum mapping
    /// to the vector.
    std::vector<typename BasedAlgebra<F>::Vec> components_of(
        const std::vector<typename F::Elem>& total_vec) const {
        std::vector<typename BasedAlgebra<F>::Vec> out(
            gen_vertices.size(), typename BasedAlgebra<F>::Vec(alg->dim(), alg->field().zero()));
        for (std::size_t s = 0; s < gen_vertices.size(); ++s)
            for (std::size_t b = 0; b < alg->dim(); ++b)
                if (coord[s][b] != SIZE_MAX) {
                    VertexId w = alg->tgt_of(b);
                    out[s][b] = total_vec[module->offset(w) + coord[s][b]];
                }
        return out;
    }
};

template <class F>
Module<F> projective(AlgebraHandle<F> alg, VertexId v) {
    if (v >= alg->num_vertices()) throw Error("bad vertex index");
    return *ProjectiveSum<F>::build(std::move(alg), {v}).module;
}

/// A as a left module over itself: the sum of all indecomposable projectives.
template <class F>
ProjectiveSum<F> regular_module(AlgebraHandle<F> alg) {
    std::vector<VertexId> gens;
    for (VertexId v = 0; v < alg->num_vertices(); ++v) gens.push_back(v);
    return ProjectiveSum<F>::build(std::move(alg), std::move(gens));
}

// ---------------------------------------------------------------------------
// hom spaces
// ---------------------------------------------------------------------------

template <class F>
Mat<F> hom_constraint_matrix(const Module<F>& m, const Module<F>& n) {
    check_same_algebra(m, n);
    const auto& alg = *m.algebra();
    const F& f = m.field();
    std::size_t r = alg.num_vertices();
    std::vector<std::size_t> unk_off(r + 1, 0);
    for (VertexId v = 0; v < r; ++v) unk_off[v + 1] = unk_off[v] + n.vdim(v) * m.vdim(v);
    std::size_t unknowns = unk_off[r];
    std::size_t rows = 0;
    for (auto g : alg.generators()) rows += n.vdim(alg.tgt_of(g)) * m.vdim(alg.src_of(g));
    Mat<F> sys(f, rows, unknowns);
    std::size_t row = 0;
    for (auto g : alg.generators()) {
        VertexId w = alg.tgt_of(g), v = alg.src_of(g);
        const Mat<F>& act_n = n.block(g);
        const Mat<F>& act_m = m.block(g);
        // equation: act_n * f_v - f_w * act_m = 0, entry (i, j)
        for (std::size_t i = 0; i < n.vdim(w); ++i)
            for (std::size_t j = 0; j < m.vdim(v); ++j) {
                for (std::size_t p = 0; p < n.vdim(v); ++p)
                    if (!f.is_zero(act_n.at(i, p)))
                        sys.at(row, unk_off[v] + p * m.vdim(v) + j) = act_n.at(i, p);
                for (std::size_t q = 0; q < m.vdim(w); ++q)
                    if (!f.is_zero(act_m.at(q, j)))
                        sys.at(row, unk_off[w] + i * m.vdim(w) + q) =
                            f.sub(sys.at(row, unk_off[w] + i * m.vdim(w) + q), act_m.at(q, j));
                ++row;
            }
    }
    return sys;
}

template <class F>
std::size_t hom_dim(const Module<F>& m, const Module<F>& n) {
    std::size_t unknowns = 0;
    for (VertexId v = 0; v < m.algebra()->num_vertices(); ++v) unknowns += n.vdim(v) * m.vdim(v);
    return unknowns - hom_constraint_matrix(m, n).rank();
}

/// Basis of the space of intertwiners, in the deterministic order produced by
/// the kernel computation.
template <class F>
std::vector<Morphism<F>> hom_basis(const Module<F>& m, const Module<F>& n) {
    const auto& alg = *m.algebra();
    const F& f = m.field();
    std::size_t r = alg.num_vertices();
    std::vector<std::size_t> unk_off(r + 1, 0);
    for (VertexId v = 0; v < r; ++v) unk_off[v + 1] = unk_off[v] + n.vdim(v) * m.vdim(v);
    Mat<F> ker = hom_constraint_matrix(m, n).kernel_basis();
    std::vector<Morphism<F>> out;
    for (std::size_t c = 0; c < ker.cols(); ++c) {
        std::vector<Mat<F>> blocks;
        for (VertexId v = 0; v < r; ++v) {
            Mat<F> blk(f, n.vdim(v), m.vdim(v));
            for (std::size_t i = 0; i < n.vdim(v); ++i)
                for (std::size_t j = 0; j < m.vdim(v); ++j)
                    blk.at(i, j) = ker.at(unk_off[v] + i * m.vdim(v) + j, c);
            blocks.push_back(std::move(blk));
        }
        out.emplace_back(m, n, std::move(blocks));
    }
    return out;
}

// ---------------------------------------------------------------------------
// kernels, cokernels, images
// ---------------------------------------------------------------------------

template <class F>
struct SubQuotient {
    Module<F> module;
    Morphism<F> map;  // inclusion (kernel/image) or projection (cokernel)
};

template <class F>
SubQuotient<F> kernel(const Morphism<F>& f) {
    const auto& alg = *f.source().algebra();
    std::vector<Mat<F>> incl;
    std::vector<std::size_t> vdims;
    for (VertexId v = 0; v < alg.num_vertices(); ++v) {
        incl.push_back(f.block(v).kernel_basis());
        vdims.push_back(incl.back().cols());
    }
    std::vector<Mat<F>> blocks;
    for (std::size_t b = 0; b < alg.dim(); ++b) {
        VertexId w = alg.tgt_of(b), v = alg.src_of(b);
        auto x = incl[w].solve_matrix(f.source().block(b) * incl[v]);
        if (!x) throw Error("kernel is not action-stable");
        blocks.push_back(std::move(*x));
    }
    Module<F> k(f.source().algebra(), std::move(vdims), std::move(blocks));
    Morphism<F> inc(k, f.source(), std::move(incl));
    return {std::move(k), std::move(inc)};
}

template <class F>
SubQuotient<F> cokernel(const Morphism<F>& f) {
    const auto& alg = *f.target().algebra();
    const F& fld = f.target().field();
    std::vector<Mat<F>> proj, section;
    std::vector<std::size_t> vdims;
    for (VertexId v = 0; v < alg.num_vertices(); ++v) {
        std::size_t d = f.target().vdim(v);
        auto piv = f.block(v).column_basis();
        Mat<F> img(fld, d, piv.size());
        for (std::size_t c = 0; c < piv.size(); ++c)
            for (std::size_t i = 0; i < d; ++i) img.at(i, c) = f.block(v).at(i, piv[c]);
        // complement coordinates: unit vectors independent of the image
        SpanBuilder<F> sb(fld, d);
        for (std::size_t c = 0; c < img.cols(); ++c) sb.add(img.col(c));
        std::vector<std::size_t> comp;
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<typename F::Elem> unit(d, fld.zero());
            unit[i] = fld.one();
            if (sb.add(unit)) comp.push_back(i);
        }
        Mat<F> sec(fld, d, comp.size());
        for (std::size_t c = 0; c < comp.size(); ++c) sec.at(comp[c], c) = fld.one();
        Mat<F> full = img.hstack(sec);
        auto inv = full.inverse();
        if (!inv) throw Error("cokernel basis construction failed");
        Mat<F> pr(fld, comp.size(), d);
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) pr.at(i, j) = inv->at(img.cols() + i, j);
        vdims.push_back(comp.size());
        proj.push_back(std::move(pr));
        section.push_back(std::move(sec));
    }
    std::vector<Mat<F>> blocks;
    for (std::size_t b = 0; b < alg.dim(); ++b) {
        VertexId w = alg.tgt_of(b), v = alg.src_of(b);
        blocks.push_back(proj[w] * f.target().block(b) * section[v]);
    }
    Module<F> c(f.target().algebra(), std::move(vdims), std::move(blocks));
    Morphism<F> pr(f.target(), c, std::move(proj));
    return {std::move(c), std::move(pr)};
}

template <class F>
SubQuotient<F> image(const Morphism<F>& f) {
    const auto& alg = *f.target().algebra();
    const F& fld = f.target().field();
    std::vector<Mat<F>> incl;
    std::vector<std::size_t> vdims;
    for (VertexId v = 0; v < alg.num_vertices(); ++v) {
        auto piv = f.block(v).column_basis();
        Mat<F> img(fld, f.target().vdim(v), piv.size());
        for (std::size_t c = 0; c < piv.size(); ++c)
            for (std::size_t i = 0; i < img.rows(); ++i) img.at(i, c) = f.block(v).at(i, piv[c]);
        vdims.push_back(piv.size());
        incl.push_back(std::move(img));
    }
    std::vector<Mat<F>> blocks;
    for (std::size_t b = 0; b < alg.dim(); ++b) {
        VertexId w = alg.tgt_of(b), v = alg.src_of(b);
        auto x = incl[w].solve_matrix(f.target().block(b) * incl[v]);
        if (!x) throw Error("image is not action-stable");
        blocks.push_back(std::move(*x));
    }
    Module<F> m(f.target().algebra(), std::move(vdims), std::move(blocks));
    Morphism<F> inc(m, f.target(), std::move(incl));
    return {std::move(m), std::move(inc)};
}

/// rad M = (rad A) * M with its inclusion.
template <class F>
SubQuotient<F> radical_submodule(const Module<F>& m) {
    const auto& alg = *m.algebra();
    auto spans = m.radical_spans();
    std::vector<Mat<F>> incl;
    std::vector<std::size_t> vdims;
    for (VertexId v = 0; v < alg.num_vertices(); ++v) {
        incl.push_back(spans[v].basis_matrix().transpose());
        vdims.push_back(incl.back().cols());
    }
    std::vector<Mat<F>> blocks;
    for (std::size_t b = 0; b < alg.dim(); ++b) {
        VertexId w = alg.tgt_of(b), v = alg.src_of(b);
        auto x = incl[w].solve_matrix(m.block(b) * incl[v]);
        if (!x) throw Error("radical is not action-stable");
        blocks.push_back(std::move(*x));
    }
    Module<F> rad(m.algebra(), std::move(vdims), std::move(blocks));
    Morphism<F> inc(rad, m, std::move(incl));
    return {std::move(rad), std::move(inc)};
}

// ---------------------------------------------------------------------------
// isomorphism testing
// ---------------------------------------------------------------------------

enum class IsoVerdict { Yes, No, Unknown };

template <class F>
struct IsoResult {
    IsoVerdict verdict;
    std::optional<Morphism<F>> witness;  // invertible intertwiner when Yes
    std::string reason;
};

namespace detail {

template <class F>
std::optional<std::vector<Mat<F>>> combo_blocks(const std::vector<Morphism<F>>& basis,
                                                const std::vector<typename F::Elem>& coeffs) {
    const F& f = basis[0].source().field();
    std::size_t r = basis[0].source().algebra()->num_vertices();
    std::vector<Mat<F>> blocks;
    for (VertexId v = 0; v < r; ++v) {
        Mat<F> blk(f, basis[0].target().vdim(v), basis[0].source().vdim(v));
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (f.is_zero(coeffs[i])) continue;
            blk = blk + basis[i].block(v).scaled(coeffs[i]);
        }
        if (blk.rows() != blk.cols() || blk.rank() != blk.rows()) return std::nullopt;
        blocks.push_back(std::move(blk));
    }
    return blocks;
}

}  // namespace detail

/// Certified isomorphism test. `yes` always carries a verified invertible
/// intertwiner. `no` comes from a dimension-vector or hom-dimension mismatch,
/// or from an exhaustive search over a small prime field. When a randomized
/// search over an infinite (or large) coefficient space fails, the result is
/// `unknown` - never silently `no`.
template <class F>
IsoResult<F> is_isomorphic(const Module<F>& m, const Module<F>& n, std::uint64_t seed,
                           std::size_t budget = 64) {
    check_same_algebra(m, n);
    const F& f = m.field();
    if (m.dim_vector() != n.dim_vector())
        return {IsoVerdict::No, std::nullopt, "dimension vectors differ"};
    if (m.dim() == 0) return {IsoVerdict::Yes, Morphism<F>::zero(m, n), "both zero"};
    std::size_t hmm = hom_dim(m, m), hmn = hom_dim(m, n), hnm = hom_dim(n, m),
                hnn = hom_dim(n, n);
    if (hmm != hmn || hmm != hnm || hmm != hnn)
        return {IsoVerdict::No, std::nullopt, "hom dimensions distinguish the modules"};
    auto basis = hom_basis(m, n);
    if (basis.empty()) return {IsoVerdict::No, std::nullopt, "no nonzero maps at all"};
    std::size_t k = basis.size();
    auto try_coeffs = [&](const std::vector<typename F::Elem>& coeffs) -> std::optional<Morphism<F>> {
        auto blocks = detail::combo_blocks(basis, coeffs);
        if (!blocks) return std::nullopt;
        return Morphism<F>(m, n, std::move(*blocks));
    };
    if constexpr (F::prime_field) {
        // exhaustive when the coefficient space is small enough
        std::uint64_t p = f.modulus();
        double space = 1;
        for (std::size_t i = 0; i < k && space <= 4096; ++i) space *= static_cast<double>(p);
        if (space <= 4096) {
            std::vector<typename F::Elem> coeffs(k, 0);
            while (true) {
                if (auto w = try_coeffs(coeffs)) return {IsoVerdict::Yes, std::move(w), "search"};
                std::size_t i = 0;
                while (i < k) {
                    if (++coeffs[i] < p) break;
                    coeffs[i++] = 0;
                }
                if (i == k) break;
            }
            return {IsoVerdict::No, std::nullopt, "exhaustive search found no isomorphism"};
        }
    }
    Rng rng(seed);
    // singletons and the all-ones vector first, then seeded random combos
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<typename F::Elem> coeffs(k, f.zero());
        coeffs[i] = f.one();
        if (auto w = try_coeffs(coeffs)) return {IsoVerdict::Yes, std::move(w), "search"};
    }
    {
        std::vector<typename F::Elem> coeffs(k, f.one());
        if (auto w = try_coeffs(coeffs)) return {IsoVerdict::Yes, std::move(w), "search"};
    }
    for (std::size_t t = 0; t < budget; ++t) {
        std::vector<typename F::Elem> coeffs;
        for (std::size_t i = 0; i < k; ++i) coeffs.push_back(f.from_long(rng.small_int(3)));
        if (auto w = try_coeffs(coeffs)) return {IsoVerdict::Yes, std::move(w), "search"};
    }
    return {IsoVerdict::Unknown, std::nullopt, "search budget exhausted"};
}

template <class F>
struct ShortExactSequence {
    Module<F> left, middle, right;
    Morphism<F> inject;
    Morphism<F> project;

    void verify() const {
        if (!inject.is_injective()) throw Error("left map is not injective");
        if (!project.is_surjective()) throw Error("right map is not surjective");
        if (!project.compose_after(inject).is_zero()) throw Error("composite is nonzero");
        if (left.dim() + right.dim() != middle.dim()) throw Error("dimensions do not add");
        // im = ker follows from the rank count once the composite vanishes
        if (inject.rank() + project.rank() != middle.dim()) throw Error("not exact in the middle");
    }
};

// ---------------------------------------------------------------------------
// projective covers and syzygies
// ---------------------------------------------------------------------------

template <class F>
struct Cover {
    ProjectiveSum<F> proj;
    Morphism<F> onto;
};

/// Minimal projective cover: one generator per top basis vector, lifted along
/// unit-vector representatives. Certified by a surjectivity check and by
/// kernel containment in rad P.
template <class F>
Cover<F> projective_cover(const Module<F>& m) {
    const auto& alg_h = m.algebra();
    const auto& alg = *alg_h;
    const F& f = m.field();
    auto rad = m.radical_spans();
    std::vector<VertexId> gen_vertices;
    std::vector<std::pair<VertexId, std::size_t>> reps;  // (vertex, unit coordinate)
    for (VertexId w = 0; w < alg.num_vertices(); ++w) {
        SpanBuilder<F> sb = rad[w];
        for (std::size_t i = 0; i < m.vdim(w); ++i) {
            std::vector<typename F::Elem> unit(m.vdim(w), f.zero());
            unit[i] = f.one();
            if (sb.add(unit)) {
                gen_vertices.push_back(w);
                reps.emplace_back(w, i);
            }
        }
    }
    ProjectiveSum<F> ps = ProjectiveSum<F>::build(alg_h, gen_vertices);
    std::vector<Mat<F>> blocks;
    for (VertexId w = 0; w < alg.num_vertices(); ++w) {
        Mat<F> blk(f, m.vdim(w), ps.module->vdim(w));
        for (std::size_t s = 0; s < gen_vertices.size(); ++s)
            for (std::size_t b = 0; b < alg.dim(); ++b) {
                if (ps.coord[s][b] == SIZE_MAX || alg.tgt_of(b) != w) continue;
                // phi(s-th copy of b) = b . m_s
                const Mat<F>& act = m.block(b);
                for (std::size_t i = 0; i < m.vdim(w); ++i)
                    blk.at(i, ps.coord[s][b]) = act.at(i, reps[s].second);
            }
        blocks.push_back(std::move(blk));
    }
    Morphism<F> onto(*ps.module, m, std::move(blocks));
    if (!onto.is_surjective()) throw Error("projective cover is not surjective");
    // minimality: the kernel sits inside rad P
    auto rad_p = ps.module->radical_spans();
    for (VertexId w = 0; w < alg.num_vertices(); ++w) {
        Mat<F> kb = onto.block(w).kernel_basis();
        for (std::size_t c = 0; c < kb.cols(); ++c)
            if (!rad_p[w].contains(kb.col(c)))
                throw Error("projective cover is not minimal");
    }
    return {std::move(ps), std::move(onto)};
}

template <class F>
Module<F> syzygy(const Module<F>& m, std::size_t k) {
    Module<F> cur = m;
    for (std::size_t i = 0; i < k; ++i) {
        if (cur.is_zero()) return cur;
        cur = kernel(projective_cover(cur).onto).module;
    }
    return cur;
}

template <class F>
bool is_projective_module(const Module<F>& m) {
    if (m.is_zero()) return true;
    return kernel(projective_cover(m).onto).module.is_zero();
}

// ---------------------------------------------------------------------------
// dualities
// ---------------------------------------------------------------------------

/// k-linear dual as a module over the opposite algebra: transposed blocks,
/// grading swapped.
template <class F>
Module<F> dual(const Module<F>& m) {
    AlgebraHandle<F> op = opposite(m.algebra());
    std::vector<std::size_t> vdims = m.dim_vector();
    std::vector<Mat<F>> blocks;
    for (std::size_t b = 0; b < op->dim(); ++b) blocks.push_back(m.block(b).transpose());
    return Module<F>(std::move(op), std::move(vdims), std::move(blocks));
}

template <class F>
Module<F> injective(AlgebraHandle<F> alg, VertexId v) {
    return dual(projective(opposite(alg), v));
}

/// Hom into the regular module, with the functional basis retained in the
/// final module coordinates: basis vector k of the module corresponds to
/// functionals[k], a total matrix M -> A.
template <class F>
struct StarDual {
    Module<F> module;               // over opposite(alg of M)
    std::vector<Mat<F>> functionals;
};

template <class F>
StarDual<F> star_dual_with_basis(const Module<F>& m) {
    const F& f = m.field();
    AlgebraHandle<F> alg = m.algebra();
    AlgebraHandle<F> op = opposite(alg);
    ProjectiveSum<F> reg = regular_module(alg);
    std::vector<Morphism<F>> homs = hom_basis(m, *reg.module);
    std::size_t p = homs.size();
    // functionals M -> A as total matrices, identifying regular-module
    // coordinates with algebra basis elements
    std::vector<std::size_t> coord_to_basis(reg.module->dim());
    for (std::size_t s = 0; s < reg.gen_vertices.size(); ++s)
        for (std::size_t b = 0; b < alg->dim(); ++b)
            if (reg.coord[s][b] != SIZE_MAX)
                coord_to_basis[reg.module->offset(alg->tgt_of(b)) + reg.coord[s][b]] = b;
    std::vector<Mat<F>> func;  // dim(A) x dim(M)
    for (const auto& h : homs) {
        Mat<F> tot = h.total();
        Mat<F> out(f, alg->dim(), m.dim());
        for (std::size_t i = 0; i < tot.rows(); ++i)
            for (std::size_t j = 0; j < tot.cols(); ++j)
                out.at(coord_to_basis[i], j) = tot.at(i, j);
        func.push_back(std::move(out));
    }
    // the right A-action (phi . a)(x) = phi(x) . a, expressed over the hom
    // basis by solving inside the flattened hom space
    std::size_t flat_dim = alg->dim() * m.dim();
    auto flatten = [&](const Mat<F>& total) {
        std::vector<typename F::Elem> v;
        v.reserve(flat_dim);
        for (std::size_t i = 0; i < total.rows(); ++i)
            for (std::size_t j = 0; j < total.cols(); ++j) v.push_back(total.at(i, j));
        return v;
    };
    Mat<F> basis_mat(f, flat_dim, p);
    for (std::size_t k = 0; k < p; ++k) {
        auto v = flatten(func[k]);
        for (std::size_t i = 0; i < flat_dim; ++i) basis_mat.at(i, k) = v[i];
    }
    // total action matrices of the opposite algebra on the hom space
    std::vector<Mat<F>> op_action;
    for (std::size_t b = 0; b < alg->dim(); ++b) {
        // phi -> R_b . phi where R_b(y) = y * b in A
        Mat<F> act(f, p, p);
        if (p > 0) {
            Mat<F> images(f, flat_dim, p);
            for (std::size_t k = 0; k < p; ++k) {
                Mat<F> composed(f, alg->dim(), m.dim());
                for (std::size_t j = 0; j < m.dim(); ++j) {
                    typename BasedAlgebra<F>::Vec y(alg->dim(), f.zero());
                    for (std::size_t i = 0; i < alg->dim(); ++i) y[i] = func[k].at(i, j);
                    auto yb = alg->mult(y, alg->unit_vec(b));
                    for (std::size_t i = 0; i < alg->dim(); ++i) composed.at(i, j) = yb[i];
                }
                auto v = flatten(composed);
                for (std::size_t i = 0; i < flat_dim; ++i) images.at(i, k) = v[i];
            }
            auto x = basis_mat.solve_matrix(images);
            if (!x) throw Error("right action leaves the hom space");
            act = std::move(*x);
        }
        op_action.push_back(std::move(act));
    }
    Module<F> mod = Module<F>::from_total(op, p, op_action);
    // carry the functional basis through the adaptation performed inside
    // from_total: recompute it by solving for each adapted unit vector
    // against the raw coordinates. from_total's change of basis is the
    // column-pivot basis of the idempotent projections, reproduced here.
    std::vector<Mat<F>> adapted_funcs;
    {
        Mat<F> u(f, p, 0);
        for (VertexId v = 0; v < op->num_vertices(); ++v) {
            const Mat<F>& pr = op_action[op->idempotent(v)];
            auto piv = pr.column_basis();
            for (auto c : piv) u = u.hstack(Mat<F>::from_cols(f, {pr.col(c)}));
        }
        for (std::size_t k = 0; k < p; ++k) {
            Mat<F> g(f, alg->dim(), m.dim());
            for (std::size_t j = 0; j < p; ++j) {
                if (f.is_zero(u.at(j, k))) continue;
                g = g + func[j].scaled(u.at(j, k));
            }
            adapted_funcs.push_back(std::move(g));
        }
    }
    return {std::move(mod), std::move(adapted_funcs)};
}

template <class F>
Module<F> star_dual(const Module<F>& m) {
    return star_dual_with_basis(m).module;
}

/// Canonical evaluation M -> M**; invertibility is one leg of the totally
/// reflexive criterion.
template <class F>
Morphism<F> evaluation_map(const Module<F>& m) {
    const F& f = m.field();
    AlgebraHandle<F> alg = m.algebra();
    StarDual<F> star = star_dual_with_basis(m);
    StarDual<F> dstar = star_dual_with_basis(star.module);
    // dstar.module lives over opposite(opposite(alg)), structurally equal to alg
    std::size_t p = star.module.dim(), q = dstar.module.dim();
    std::size_t flat = alg->dim() * p;
    Mat<F> basis_mat(f, flat, q);
    for (std::size_t k = 0; k < q; ++k)
        for (std::size_t i = 0; i < alg->dim(); ++i)
            for (std::size_t j = 0; j < p; ++j)
                basis_mat.at(i * p + j, k) = dstar.functionals[k].at(i, j);
    Mat<F> ev_total(f, q, m.dim());
    if (m.dim() > 0) {
        Mat<F> images(f, flat, m.dim());
        for (std::size_t j = 0; j < m.dim(); ++j)
            for (std::size_t i = 0; i < alg->dim(); ++i)
                for (std::size_t k = 0; k < p; ++k)
                    images.at(i * p + k, j) = star.functionals[k].at(i, j);
        auto x = basis_mat.solve_matrix(images);
        if (!x) throw Error("evaluation image leaves the double-dual hom space");
        ev_total = std::move(*x);
    }
    // rebuild as a morphism to the double dual over the original algebra
    Module<F> dd(alg, dstar.module.dim_vector(), [&] {
        std::vector<Mat<F>> blocks;
        for (std::size_t b = 0; b < alg->dim(); ++b) blocks.push_back(dstar.module.block(b));
        return blocks;
    }());
    std::vector<Mat<F>> blocks;
    for (VertexId v = 0; v < alg->num_vertices(); ++v) {
        Mat<F> blk(f, dd.vdim(v), m.vdim(v));
        for (std::size_t i = 0; i < dd.vdim(v); ++i)
            for (std::size_t j = 0; j < m.vdim(v); ++j)
                blk.at(i, j) = ev_total.at(dd.offset(v) + i, m.offset(v) + j);
        blocks.push_back(std::move(blk));
    }
    return Morphism<F>(m, dd, std::move(blocks));
}

// ---------------------------------------------------------------------------
// restriction and the corner functor
// ---------------------------------------------------------------------------

/// Algebra homomorphism given on bases; verified multiplicative and unital.
template <class F>
struct AlgebraMap {
    AlgebraHandle<F> src, tgt;
    Mat<F> matrix;  // dim(tgt) x dim(src)
    std::vector<VertexId> vertex_map;

    AlgebraMap(AlgebraHandle<F> s, AlgebraHandle<F> t, Mat<F> mat, std::vector<VertexId> vmap)
        : src(std::move(s)), tgt(std::move(t)), matrix(std::move(mat)), vertex_map(std::move(vmap)) {
        const F& f = src->field();
        for (std::size_t i = 0; i < src->dim(); ++i)
            for (std::size_t j = 0; j < src->dim(); ++j) {
                if (src->src_of(i) != src->tgt_of(j)) continue;
                auto lhs = tgt->mult(matrix.col(i), matrix.col(j));
                typename BasedAlgebra<F>::Vec rhs(tgt->dim(), f.zero());
                for (const auto& [k, c] : src->product(i, j).terms)
                    for (std::size_t tt = 0; tt < tgt->dim(); ++tt)
                        rhs[tt] = f.add(rhs[tt], f.mul(c, matrix.at(tt, k)));
                for (std::size_t tt = 0; tt < tgt->dim(); ++tt)
                    if (!f.eq(lhs[tt], rhs[tt])) throw Error("algebra map is not multiplicative");
            }
    }
};

/// The surjection A ->> A/<arrow>: basis paths map to their reduced images,
/// paths through the removed arrow map to zero.
template <class F>
AlgebraMap<F> quotient_map(const Analysis<F>& src_an, AlgebraHandle<F> src_alg, ArrowId removed,
                           const Analysis<F>& tgt_an, AlgebraHandle<F> tgt_alg) {
    const F& f = src_an.pres.field;
    std::map<std::pair<std::vector<ArrowId>, VertexId>, std::size_t> tgt_index;
    for (std::size_t i = 0; i < tgt_an.basis.size(); ++i)
        tgt_index[{tgt_an.basis[i].word, tgt_an.basis[i].src}] = i;
    Mat<F> mat(f, tgt_alg->dim(), src_alg->dim());
    for (std::size_t b = 0; b < src_an.basis.size(); ++b) {
        const Path& w = src_an.basis[b];
        bool mentions = false;
        for (ArrowId a : w.word)
            if (a == removed) mentions = true;
        if (mentions) continue;
        Path image = w;
        for (auto& a : image.word)
            if (a > removed) --a;
        PathPoly<F> nf = tgt_an.system.normal_form(
            PathPoly<F>::monomial(f, f.one(), image));
        for (const auto& t : nf.terms) mat.at(tgt_index.at({t.path.word, t.path.src}), b) = t.coeff;
    }
    std::vector<VertexId> vmap(src_alg->num_vertices());
    for (VertexId v = 0; v < vmap.size(); ++v) vmap[v] = v;
    return AlgebraMap<F>(std::move(src_alg), std::move(tgt_alg), std::move(mat), std::move(vmap));
}

/// View a module over the target of a surjection as a module over the source:
/// same space, action through the map.
template <class F>
Module<F> restrict_along_map(const AlgebraMap<F>& phi, const Module<F>& m) {
    if (*m.algebra() != *phi.tgt) throw Error("module does not live over the map's target");
    const F& f = m.field();
    std::vector<std::size_t> vdims(phi.src->num_vertices());
    for (VertexId v = 0; v < phi.src->num_vertices(); ++v) vdims[v] = m.vdim(phi.vertex_map[v]);
    std::vector<Mat<F>> blocks;
    for (std::size_t b = 0; b < phi.src->dim(); ++b) {
        VertexId w = phi.src->tgt_of(b), v = phi.src->src_of(b);
        Mat<F> blk(f, vdims[w], vdims[v]);
        for (std::size_t k = 0; k < phi.tgt->dim(); ++k) {
            if (f.is_zero(phi.matrix.at(k, b))) continue;
            blk = blk + m.block(k).scaled(phi.matrix.at(k, b));
        }
        blocks.push_back(std::move(blk));
    }
    return Module<F>(phi.src, std::move(vdims), std::move(blocks));
}

/// The corner functor on modules: M -> e M, over the corner algebra.
template <class F>
Module<F> corner_module(const CornerData<F>& corner, const Module<F>& m) {
    if (*m.algebra() != *corner.parent) throw Error("module does not live over the corner's parent");
    std::vector<std::size_t> vdims;
    for (auto v : corner.spec.vertices) vdims.push_back(m.vdim(v));
    std::vector<Mat<F>> blocks;
    for (std::size_t c = 0; c < corner.algebra->dim(); ++c)
        blocks.push_back(m.block(corner.basis_map[c]));
    return Module<F>(corner.algebra, std::move(vdims), std::move(blocks));
}

template <class F>
Morphism<F> corner_morphism(const CornerData<F>& corner, const Morphism<F>& f, const Module<F>& src,
                            const Module<F>& tgt) {
    std::vector<Mat<F>> blocks;
    for (auto v : corner.spec.vertices) blocks.push_back(f.block(v));
    return Morphism<F>(src, tgt, std::move(blocks));
}

/// e A as a left module over the corner algebra eAe.
template <class F>
Module<F> corner_left_module(const CornerData<F>& corner) {
    const auto& a = *corner.parent;
    const F& f = a.field();
    std::size_t r = corner.spec.vertices.size();
    // basis: parent elements with target inside e, grouped by corner vertex
    std::vector<std::vector<std::size_t>> layout(r);
    for (std::size_t b = 0; b < a.dim(); ++b)
        for (std::size_t k = 0; k < r; ++k)
            if (a.tgt_of(b) == corner.spec.vertices[k]) layout[k].push_back(b);
    std::vector<std::size_t> vdims;
    std::vector<std::size_t> pos(a.dim(), SIZE_MAX);
    for (std::size_t k = 0; k < r; ++k) {
        vdims.push_back(layout[k].size());
        for (std::size_t i = 0; i < layout[k].size(); ++i) pos[layout[k][i]] = i;
    }
    std::vector<Mat<F>> blocks;
    for (std::size_t c = 0; c < corner.algebra->dim(); ++c) {
        std::size_t pc = corner.basis_map[c];
        VertexId w2 = corner.algebra->tgt_of(c), w1 = corner.algebra->src_of(c);
        Mat<F> blk(f, vdims[w2], vdims[w1]);
        for (std::size_t x : layout[w1])
            if (a.src_of(pc) == a.tgt_of(x))
                for (const auto& [k, coeff] : a.product(pc, x).terms) blk.at(pos[k], pos[x]) = coeff;
        blocks.push_back(std::move(blk));
    }
    return Module<F>(corner.algebra, std::move(vdims), std::move(blocks));
}

/// A e as a left module over the opposite of the corner algebra.
template <class F>
Module<F> corner_right_module(const CornerData<F>& corner) {
    const auto& a = *corner.parent;
    const F& f = a.field();
    AlgebraHandle<F> op = opposite(corner.algebra);
    std::size_t r = corner.spec.vertices.size();
    std::vector<std::vector<std::size_t>> layout(r);
    for (std::size_t b = 0; b < a.dim(); ++b)
        for (std::size_t k = 0; k < r; ++k)
            if (a.src_of(b) == corner.spec.vertices[k]) layout[k].push_back(b);
    std::vector<std::size_t> vdims;
    std::vector<std::size_t> pos(a.dim(), SIZE_MAX);
    for (std::size_t k = 0; k < r; ++k) {
        vdims.push_back(layout[k].size());
        for (std::size_t i = 0; i < layout[k].size(); ++i) pos[layout[k][i]] = i;
    }
    std::vector<Mat<F>> blocks;
    for (std::size_t c = 0; c < op->dim(); ++c) {
        std::size_t pc = corner.basis_map[c];
        VertexId w2 = op->tgt_of(c), w1 = op->src_of(c);  // op grading
        Mat<F> blk(f, vdims[w2], vdims[w1]);
        for (std::size_t x : layout[w1])
            if (a.src_of(x) == a.tgt_of(pc))
                for (const auto& [k, coeff] : a.product(x, pc).terms) blk.at(pos[k], pos[x]) = coeff;
        blocks.push_back(std::move(blk));
    }
    return Module<F>(std::move(op), std::move(vdims), std::move(blocks));
}

// ---------------------------------------------------------------------------
// submodules, random modules, module files
// ---------------------------------------------------------------------------

/// Submodule generated by the given total vectors: the span is closed under
/// the action, then cut per vertex.
template <class F>
SubQuotient<F> submodule_generated(const Module<F>& m,
                                   const std::vector<std::vector<typename F::Elem>>& gens) {
    const auto& alg = *m.algebra();
    const F& f = m.field();
    SpanBuilder<F> span(f, m.dim());
    std::vector<std::vector<typename F::Elem>> work;
    for (const auto& g : gens)
        if (span.add(g)) work.push_back(g);
    while (!work.empty()) {
        auto v = std::move(work.back());
        work.pop_back();
        for (std::size_t b = 0; b < alg.dim(); ++b) {
            if (alg.is_idempotent_elem(b)) continue;
            VertexId w = alg.tgt_of(b), s = alg.src_of(b);
            std::vector<typename F::Elem> slice(m.vdim(s), f.zero());
            for (std::size_t j = 0; j < m.vdim(s); ++j) slice[j] = v[m.offset(s) + j];
            auto img = m.block(b) * slice;
            std::vector<typename F::Elem> total(m.dim(), f.zero());
            for (std::size_t i = 0; i < m.vdim(w); ++i) total[m.offset(w) + i] = img[i];
            if (span.add(total)) work.push_back(std::move(total));
        }
    }
    // per-vertex bases via idempotent slices of the span
    std::vector<Mat<F>> incl;
    std::vector<std::size_t> vdims;
    for (VertexId v = 0; v < alg.num_vertices(); ++v) {
        SpanBuilder<F> vb(f, m.vdim(v));
        for (const auto& row : span.basis()) {
            std::vector<typename F::Elem> slice(m.vdim(v), f.zero());
            for (std::size_t j = 0; j < m.vdim(v); ++j) slice[j] = row[m.offset(v) + j];
            vb.add(slice);
        }
        incl.push_back(vb.basis_matrix().transpose());
        vdims.push_back(incl.back().cols());
    }
    std::vector<Mat<F>> blocks;
    for (std::size_t b = 0; b < alg.dim(); ++b) {
        VertexId w = alg.tgt_of(b), v = alg.src_of(b);
        auto x = incl[w].solve_matrix(m.block(b) * incl[v]);
        if (!x) throw Error("generated span is not action-stable");
        blocks.push_back(std::move(*x));
    }
    Module<F> sub(m.algebra(), std::move(vdims), std::move(blocks));
    Morphism<F> inc(sub, m, std::move(incl));
    return {std::move(sub), std::move(inc)};
}

/// Seeded random module: a quotient of a random-multiplicity projective sum
/// by a random radical submodule. Dimension stays small for property suites.
template <class F>
Module<F> random_module(AlgebraHandle<F> alg, Rng& rng, std::size_t max_copies = 2,
                        std::size_t num_generators = 2) {
    const F& f = alg->field();
    std::vector<VertexId> gens;
    for (VertexId v = 0; v < alg->num_vertices(); ++v) {
        std::size_t copies = rng.below(max_copies + 1);
        for (std::size_t c = 0; c < copies; ++c) gens.push_back(v);
    }
    if (gens.empty()) gens.push_back(static_cast<VertexId>(rng.below(alg->num_vertices())));
    ProjectiveSum<F> ps = ProjectiveSum<F>::build(alg, gens);
    const Module<F>& p = *ps.module;
    // random vectors in rad P
    std::vector<std::size_t> rad_coords;
    for (std::size_t s = 0; s < gens.size(); ++s)
        for (std::size_t b = 0; b < alg->dim(); ++b)
            if (ps.coord[s][b] != SIZE_MAX && !alg->is_idempotent_elem(b))
                rad_coords.push_back(p.offset(alg->tgt_of(b)) + ps.coord[s][b]);
    std::vector<std::vector<typename F::Elem>> sub_gens;
    std::size_t k = rng.below(num_generators + 1);
    for (std::size_t i = 0; i < k && !rad_coords.empty(); ++i) {
        std::vector<typename F::Elem> v(p.dim(), f.zero());
        for (auto c : rad_coords) v[c] = f.from_long(rng.small_int(2));
        sub_gens.push_back(std::move(v));
    }
    if (sub_gens.empty()) return p;
    auto sub = submodule_generated(p, sub_gens);
    return cokernel(sub.map).module;
}

/// Module file loader. The format gives per-vertex dimensions and one matrix
/// per arrow (rows indexed by the arrow's target, columns by its source);
/// actions of longer basis paths are composed from these, and the relations
/// are verified to act by zero.
template <class F>
Module<F> load_module(const Analysis<F>& an, AlgebraHandle<F> alg, const std::string& text,
                      const std::string& expect_algebra_name = "") {
    const F& f = an.pres.field;
    const Quiver& q = an.pres.quiver;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::size_t> vdims(q.num_vertices(), 0);
    std::map<ArrowId, Mat<F>> arrow_mats;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string body = detail::trim(line);
        if (body.empty()) continue;
        std::istringstream ls(body);
        std::string kw;
        ls >> kw;
        if (kw == "algebra") {
            std::string name;
            ls >> name;
            if (!expect_algebra_name.empty() && name != expect_algebra_name)
                throw ParseError("module file names algebra '" + name + "', expected '" +
                                     expect_algebra_name + "'",
                                 lineno, 9);
            seen_header = true;
        } else if (kw == "dim") {
            std::string v, eq;
            std::size_t n;
            if (!(ls >> v >> eq >> n) || eq != "=")
                throw ParseError("expected 'dim <vertex> = <n>'", lineno, 5);
            vdims[q.vertex_by_label(v)] = n;
        } else if (kw == "matrix") {
            auto eq_pos = body.find('=');
            if (eq_pos == std::string::npos) throw ParseError("expected '=' in matrix line", lineno, 8);
            std::string label = detail::trim(body.substr(6, eq_pos - 6));
            ArrowId a = q.arrow_by_label(label);
            std::string lit = detail::trim(body.substr(eq_pos + 1));
            // parse [[...],[...]]
            std::vector<std::vector<typename F::Elem>> rows;
            std::size_t i = 0;
            auto expect_char = [&](char c) {
                while (i < lit.size() && std::isspace(static_cast<unsigned char>(lit[i]))) ++i;
                if (i >= lit.size() || lit[i] != c)
                    throw ParseError(std::string("expected '") + c + "' in matrix literal", lineno,
                                     static_cast<int>(i));
                ++i;
            };
            expect_char('[');
            while (true) {
                while (i < lit.size() && std::isspace(static_cast<unsigned char>(lit[i]))) ++i;
                if (i < lit.size() && lit[i] == ']') break;
                expect_char('[');
                std::vector<typename F::Elem> row;
                while (true) {
                    std::size_t start = i;
                    while (i < lit.size() && lit[i] != ',' && lit[i] != ']') ++i;
                    std::string tok = detail::trim(lit.substr(start, i - start));
                    if (!tok.empty()) row.push_back(f.parse(tok));
                    if (i < lit.size() && lit[i] == ',') {
                        ++i;
                        continue;
                    }
                    expect_char(']');
                    break;
                }
                rows.push_back(std::move(row));
                while (i < lit.size() && std::isspace(static_cast<unsigned char>(lit[i]))) ++i;
                if (i < lit.size() && lit[i] == ',') {
                    ++i;
                    continue;
                }
                break;
            }
            arrow_mats.emplace(a, Mat<F>::from_rows(f, std::move(rows)));
        } else {
            throw ParseError("unknown directive '" + kw + "'", lineno, 1);
        }
    }
    (void)seen_header;  // the header is informative; shape checks below do the work
    // default missing matrices to zero and check shapes
    std::vector<Mat<F>> arrows;
    for (ArrowId a = 0; a < q.num_arrows(); ++a) {
        auto it = arrow_mats.find(a);
        std::size_t r = vdims[q.arrows[a].tgt], c = vdims[q.arrows[a].src];
        if (it == arrow_mats.end()) {
            arrows.emplace_back(f, r, c);
        } else {
            if (it->second.rows() != r || it->second.cols() != c)
                throw DimensionMismatch("matrix for arrow " + q.arrows[a].label + " must be " +
                                        std::to_string(r) + "x" + std::to_string(c));
            arrows.push_back(it->second);
        }
    }
    auto act_of_path = [&](const Path& p) {
        Mat<F> acc = Mat<F>::identity(f, vdims[p.src]);
        for (ArrowId a : p.word) acc = arrows[a] * acc;
        return acc;
    };
    // relations must act by zero
    for (const auto& rel : an.pres.relations) {
        if (rel.terms.empty()) continue;
        VertexId s = rel.terms[0].path.src, t = rel.terms[0].path.tgt;
        Mat<F> acc(f, vdims[t], vdims[s]);
        for (const auto& term : rel.terms) acc = acc + act_of_path(term.path).scaled(term.coeff);
        if (!acc.is_zero())
            throw Error("module violates the relation " + rel.str(f, q));
    }
    std::vector<Mat<F>> blocks;
    for (const auto& p : an.basis) blocks.push_back(act_of_path(p));
    return Module<F>(std::move(alg), std::move(vdims), std::move(blocks));
}

}  // namespace gored
