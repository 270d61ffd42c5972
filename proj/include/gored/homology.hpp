#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gored/module.hpp"

namespace gored {

constexpr std::uint64_t kDefaultSeed = 0x5eed5eed;

/// Minimal projective resolution prefix. Terms are covers of the successive
/// syzygies; Betti data is the generator-vertex list of each term. When two
/// syzygies in the prefix are certified isomorphic the certificate is
/// attached, turning bounded checks into all-degree statements.
template <class F>
struct Resolution {
    Module<F> base;
    std::vector<ProjectiveSum<F>> terms;   // P_0 .. P_L (absent once the syzygy vanishes)
    std::vector<Morphism<F>> covers;       // P_k ->> Omega^k
    std::vector<Module<F>> syzygies;       // Omega^0 = base, Omega^1, ...
    std::vector<Morphism<F>> inclusions;   // Omega^(k+1) -> P_k
    std::optional<std::size_t> finite_pd;  // set when the resolution terminates
    struct Periodicity {
        std::size_t a, b;  // Omega^a iso Omega^b, a < b
        Morphism<F> iso;
    };
    std::optional<Periodicity> periodicity;

    std::size_t length_built() const { return terms.empty() ? 0 : terms.size() - 1; }

    std::vector<std::vector<VertexId>> betti() const {
        std::vector<std::vector<VertexId>> out;
        for (const auto& t : terms) out.push_back(t.gen_vertices);
        return out;
    }

    /// d_k : P_k -> P_/(k-1), k >= 1.
    Morphism<F> differential(std::size_t k) const {
        return inclusions[k - 1].compose_after(covers[k]);
    }
};

/// Build the minimal resolution out to `length` terms (or until it
/// terminates). Periodicity is detected by pairwise isomorphism tests among
/// equal-dimension-vector syzygies; an `unknown` outcome never produces a
/// certificate.
template <class F>
Resolution<F> min_resolution(const Module<F>& m, std::size_t length,
                             std::uint64_t seed = kDefaultSeed) {
    Resolution<F> res{m, {}, {}, {}, {}, std::nullopt, std::nullopt};
    res.syzygies.push_back(m);
    for (std::size_t k = 0; k <= length; ++k) {
        const Module<F>& cur = res.syzygies.back();
        if (cur.is_zero()) {
            res.finite_pd = k == 0 ? 0 : k - 1;
            break;
        }
        Cover<F> cover = projective_cover(cur);
        auto ker = kernel(cover.onto);
        res.terms.push_back(std::move(cover.proj));
        res.covers.push_back(std::move(cover.onto));
        res.inclusions.push_back(std::move(ker.map));
        res.syzygies.push_back(std::move(ker.module));
        if (!res.periodicity) {
            const Module<F>& latest = res.syzygies.back();
            if (!latest.is_zero()) {
                for (std::size_t a = 0; a + 1 < res.syzygies.size(); ++a) {
                    if (res.syzygies[a].dim_vector() != latest.dim_vector()) continue;
                    auto iso = is_isomorphic(res.syzygies[a], latest, seed);
                    if (iso.verdict == IsoVerdict::Yes) {
                        res.periodicity = {a, res.syzygies.size() - 1, std::move(*iso.witness)};
                        break;
                    }
                }
            }
        }
    }
    // termination at exactly the last built degree
    if (!res.finite_pd && res.syzygies.back().is_zero())
        res.finite_pd = res.syzygies.size() - 2;
    return res;
}

/// Row of Ext dimensions Ext^j(M, N) for 0 <= j <= jmax, computed from a
/// resolution of M with at least jmax+1 terms built (unless it terminated
/// earlier). Minimality is not assumed by the rank computation.
template <class F>
std::vector<std::size_t> ext_row(const Resolution<F>& res, const Module<F>& n, std::size_t jmax) {
    check_same_algebra(res.base, n);
    const F& f = n.field();
    std::size_t terms = res.terms.size();
    if (!res.finite_pd && terms < jmax + 2)
        throw Error("resolution prefix too short for the requested Ext range");
    // Hom(P_k, N) coordinates: one N-block per generator
    auto hom_offsets = [&](std::size_t k) {
        std::vector<std::size_t> off(1, 0);
        for (auto v : res.terms[k].gen_vertices) off.push_back(off.back() + n.vdim(v));
        return off;
    };
    // delta_k : Hom(P_(k-1), N) -> Hom(P_k, N)
    auto delta = [&](std::size_t k) {
        auto off_rows = hom_offsets(k), off_cols = hom_offsets(k - 1);
        Mat<F> d = res.differential(k).total();
        Mat<F> out(f, off_rows.back(), off_cols.back());
        for (std::size_t t = 0; t < res.terms[k].gen_vertices.size(); ++t) {
            auto comps = res.terms[k - 1].components_of(d.col(res.terms[k].generator_coordinate(t)));
            for (std::size_t s = 0; s < comps.size(); ++s) {
                Mat<F> blk = n.action_graded(comps[s], res.terms[k].gen_vertices[t],
                                             res.terms[k - 1].gen_vertices[s]);
                for (std::size_t i = 0; i < blk.rows(); ++i)
                    for (std::size_t j2 = 0; j2 < blk.cols(); ++j2)
                        out.at(off_rows[t] + i, off_cols[s] + j2) = blk.at(i, j2);
            }
        }
        return out;
    };
    std::vector<std::size_t> row;
    std::vector<std::size_t> ranks(jmax + 2, 0);
    std::vector<std::size_t> hom_dims(jmax + 1, 0);
    for (std::size_t k = 0; k <= jmax; ++k)
        if (k < terms) hom_dims[k] = hom_offsets(k).back();
    for (std::size_t k = 1; k <= jmax + 1; ++k)
        if (k < terms) ranks[k] = delta(k).rank();
    for (std::size_t j = 0; j <= jmax; ++j) row.push_back(hom_dims[j] - ranks[j] - ranks[j + 1]);
    return row;
}

template <class F>
std::size_t ext_dim(const Module<F>& m, const Module<F>& n, std::size_t j,
                    std::uint64_t seed = kDefaultSeed) {
    auto res = min_resolution(m, j + 1, seed);
    return ext_row(res, n, j)[j];
}

/// Bounded homological dimension verdict. Finite(d) certifies the exact
/// value; InfiniteCertified carries the syzygy period that repeats forever;
/// AtLeast(bound+1) is the honest fallback.
struct DimVerdict {
    enum class Kind { Finite, InfiniteCertified, AtLeast };
    Kind kind = Kind::AtLeast;
    std::size_t value = 0;  // Finite: the dimension; AtLeast: the lower bound
    std::size_t bound_used = 0;
    std::optional<std::pair<std::size_t, std::size_t>> period;

    bool is_finite() const { return kind == Kind::Finite; }
    bool is_certified() const { return kind != Kind::AtLeast; }

    std::string str() const {
        switch (kind) {
            case Kind::Finite: return "Finite(" + std::to_string(value) + ")";
            case Kind::InfiniteCertified:
                return "InfiniteCertified(Omega^" + std::to_string(period->first) +
                       " ~ Omega^" + std::to_string(period->second) + ")";
            default: return "AtLeast(" + std::to_string(value) + ")";
        }
    }
};

template <class F>
DimVerdict pd_bounded(const Module<F>& m, std::size_t bound, std::uint64_t seed = kDefaultSeed) {
    auto res = min_resolution(m, bound, seed);
    DimVerdict v;
    v.bound_used = bound;
    if (res.finite_pd) {
        v.kind = DimVerdict::Kind::Finite;
        v.value = *res.finite_pd;
    } else if (res.periodicity) {
        v.kind = DimVerdict::Kind::InfiniteCertified;
        v.period = {res.periodicity->a, res.periodicity->b};
    } else {
        v.kind = DimVerdict::Kind::AtLeast;
        v.value = bound + 1;
    }
    return v;
}

/// id_A(M) computed as pd over the opposite algebra of the dual module.
template <class F>
DimVerdict id_bounded(const Module<F>& m, std::size_t bound, std::uint64_t seed = kDefaultSeed) {
    return pd_bounded(dual(m), bound, seed);
}

/// Membership in the left perpendicular of the regular module:
/// Ext^j(M, A) = 0 for all j >= 1.
struct PerpVerdict {
    enum class Kind { CertifiedYes, CertifiedNo, UpToBound };
    Kind kind = Kind::UpToBound;
    std::size_t witness = 0;  // first nonvanishing degree for CertifiedNo
    std::size_t checked_to = 0;
    std::optional<std::pair<std::size_t, std::size_t>> period;

    bool certified_yes() const { return kind == Kind::CertifiedYes; }
    bool certified_no() const { return kind == Kind::CertifiedNo; }

    std::string str() const {
        switch (kind) {
            case Kind::CertifiedYes: return "CertifiedYes";
            case Kind::CertifiedNo: return "CertifiedNo(Ext^" + std::to_string(witness) + ")";
            default: return "UpToBound(" + std::to_string(checked_to) + ")";
        }
    }
};

template <class F>
PerpVerdict perp_test(const Module<F>& m, std::size_t bound, std::uint64_t seed = kDefaultSeed) {
    PerpVerdict v;
    if (m.is_zero()) {
        v.kind = PerpVerdict::Kind::CertifiedYes;
        return v;
    }
    // one extra term so that Ext rows reach the bound itself; when the
    // resolution terminates, the row reaches the projective dimension, where
    // minimality forces Ext^pd(M, A) nonzero
    auto res = min_resolution(m, bound + 1, seed);
    std::size_t limit = bound;
    if (res.finite_pd)
        limit = *res.finite_pd;  // at most bound + 1
    else if (res.periodicity && res.periodicity->b <= bound)
        limit = res.periodicity->b;
    auto reg = regular_module(m.algebra());
    auto row = ext_row(res, *reg.module, limit);
    v.checked_to = limit;
    for (std::size_t j = 1; j < row.size(); ++j)
        if (row[j] != 0) {
            v.kind = PerpVerdict::Kind::CertifiedNo;
            v.witness = j;
            return v;
        }
    if (res.finite_pd) {
        v.kind = PerpVerdict::Kind::CertifiedYes;  // vanishing beyond the projective dimension
    } else if (res.periodicity && res.periodicity->b <= bound) {
        v.kind = PerpVerdict::Kind::CertifiedYes;  // one full period checked
        v.period = {res.periodicity->a, res.periodicity->b};
    } else {
        v.kind = PerpVerdict::Kind::UpToBound;
    }
    return v;
}

}  // namespace gored
