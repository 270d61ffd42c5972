#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gored/common.hpp"
#include "gored/quiver.hpp"

namespace gored {

/// Rewrite rule: lead path maps to a strictly smaller polynomial.
template <class F>
struct RewriteRule {
    Path lead;
    PathPoly<F> tail;

    PathPoly<F> as_poly(const F& field) const {
        return PathPoly<F>::monomial(field, field.one(), lead).add(field, tail.negated(field));
    }
};

/// Confluent rewriting system for a path-algebra ideal, produced by overlap
/// completion with the length-lexicographic path order. Rules are kept
/// interreduced and sorted by lead, so normal forms are canonical and every
/// run over the same input produces the identical system.
template <class F>
class RewriteSystem {
  public:
    RewriteSystem(F field, Quiver quiver, std::size_t degree_cap)
        : field_(std::move(field)), quiver_(std::move(quiver)), cap_(degree_cap) {}

    const F& field() const { return field_; }
    const Quiver& quiver() const { return quiver_; }
    std::size_t degree_cap() const { return cap_; }
    const std::vector<RewriteRule<F>>& rules() const { return rules_; }

    /// Run completion starting from the given relations. Throws
    /// CompletionOverflow when a needed rule would exceed the degree cap.
    void complete(const std::vector<PathPoly<F>>& relations) {
        std::deque<PathPoly<F>> queue(relations.begin(), relations.end());
        std::size_t additions = 0;
        while (true) {
            while (!queue.empty()) {
                PathPoly<F> p = normal_form(queue.front());
                queue.pop_front();
                if (p.is_zero()) continue;
                if (p.lead().path.length() > cap_)
                    throw CompletionOverflow("completion produced a rule of degree " +
                                             std::to_string(p.lead().path.length()) +
                                             " beyond the cap " + std::to_string(cap_));
                if (++additions > kMaxRules)
                    throw CompletionOverflow("completion did not stabilize");
                add_rule(std::move(p), queue);
            }
            auto spoly = first_unresolved_overlap();
            if (!spoly) break;
            queue.push_back(std::move(*spoly));
        }
        confluent_ = true;
    }

    /// Canonical normal form. Requires a completed system for canonicity;
    /// termination holds for any rule set (each step strictly decreases).
    PathPoly<F> normal_form(PathPoly<F> p) const {
        while (true) {
            std::optional<std::size_t> red_term;
            std::size_t pos = 0, rule = 0;
            for (std::size_t ti = 0; ti < p.terms.size(); ++ti) {
                if (find_match(p.terms[ti].path, pos, rule)) {
                    red_term = ti;
                    break;  // terms are sorted descending: first hit is the largest
                }
            }
            if (!red_term) return p;
            const auto term = p.terms[*red_term];
            // subtract c * (lead - tail) embedded at the match position
            PathPoly<F> replaced = embed(rules_[rule].tail, term.path, pos, rules_[rule].lead.length());
            PathPoly<F> delta = replaced.add(field_, PathPoly<F>::monomial(field_, field_.one(), term.path).negated(field_));
            p = p.add(field_, delta.scaled(field_, term.coeff));
        }
    }

    bool is_normal_word(const Path& p) const {
        std::size_t pos, rule;
        return !find_match(p, pos, rule);
    }

    /// Multiply two polynomials in the quotient algebra: concatenate term
    /// pairs (right-to-left composition, vanishing when endpoints mismatch)
    /// and reduce.
    PathPoly<F> mul(const PathPoly<F>& a, const PathPoly<F>& b) const {
        std::vector<typename PathPoly<F>::Term> raw;
        for (const auto& ta : a.terms)
            for (const auto& tb : b.terms) {
                if (tb.path.tgt != ta.path.src) continue;
                raw.push_back({field_.mul(ta.coeff, tb.coeff), ta.path.compose_after(tb.path)});
            }
        return normal_form(PathPoly<F>::collect(field_, std::move(raw)));
    }

    /// Normal words grouped by length, enumerated up to and including
    /// max_len. Levels are ordered deterministically.
    std::vector<std::vector<Path>> normal_words_by_length(std::size_t max_len) const {
        std::vector<std::vector<Path>> levels;
        levels.emplace_back();
        for (VertexId v = 0; v < quiver_.num_vertices(); ++v)
            levels[0].push_back(Path::trivial(v));
        for (std::size_t len = 1; len <= max_len; ++len) {
            std::vector<Path> next;
            for (const Path& w : levels[len - 1]) {
                for (ArrowId a = 0; a < quiver_.num_arrows(); ++a) {
                    if (quiver_.arrows[a].src != w.tgt) continue;
                    Path ext = Path::of_arrow(quiver_, a).compose_after(w);
                    // w is normal, so a fresh lead occurrence must be a suffix
                    if (!lead_is_suffix(ext)) next.push_back(std::move(ext));
                }
            }
            if (next.empty()) break;
            levels.push_back(std::move(next));
        }
        return levels;
    }

    /// Smallest N <= cap such that every path of length N reduces to zero
    /// (the arrow ideal to the N-th power lies in the ideal). Throws
    /// NotAdmissibleUpToCap when no such N exists below the cap.
    std::size_t nilpotency_degree(std::size_t cap) const {
        auto levels = normal_words_by_length(cap);
        if (levels.size() > cap)
            throw NotAdmissibleUpToCap("normal-form paths of length " + std::to_string(cap) +
                                       " survive");
        // Index normal words; spans of reduced path powers live in these
        // coordinates.
        std::map<std::pair<std::vector<ArrowId>, VertexId>, std::size_t> index;
        std::vector<Path> all;
        for (const auto& level : levels)
            for (const auto& w : level) {
                index[{w.word, w.src}] = all.size();
                all.push_back(w);
            }
        auto coords = [&](const PathPoly<F>& p) {
            std::vector<typename F::Elem> v(all.size(), field_.zero());
            for (const auto& t : p.terms) v[index.at({t.path.word, t.path.src})] = t.coeff;
            return v;
        };
        // spanning set of the image of J^L, advanced one arrow at a time
        std::vector<PathPoly<F>> span;
        for (ArrowId a = 0; a < quiver_.num_arrows(); ++a)
            span.push_back(PathPoly<F>::monomial(field_, field_.one(), Path::of_arrow(quiver_, a)));
        for (std::size_t n = 1; n <= cap; ++n) {
            SpanBuilder<F> sb(field_, all.size());
            std::vector<PathPoly<F>> reduced;
            for (const auto& p : span) {
                PathPoly<F> nf = normal_form(p);
                if (nf.is_zero()) continue;
                if (sb.add(coords(nf))) reduced.push_back(std::move(nf));
            }
            if (sb.dim() == 0) return n;
            std::vector<PathPoly<F>> next;
            for (const auto& p : reduced)
                for (ArrowId a = 0; a < quiver_.num_arrows(); ++a) {
                    PathPoly<F> ext =
                        mul(PathPoly<F>::monomial(field_, field_.one(), Path::of_arrow(quiver_, a)), p);
                    if (!ext.is_zero()) next.push_back(std::move(ext));
                }
            span = std::move(next);
        }
        throw NotAdmissibleUpToCap("the arrow-ideal powers do not vanish by degree " +
                                   std::to_string(cap));
    }

    /// Re-check every critical pair of the final rule set. True on certified
    /// systems; independent of the bookkeeping done during completion.
    bool verify_confluence() const {
        for (std::size_t i = 0; i < rules_.size(); ++i)
            for (std::size_t j = 0; j < rules_.size(); ++j)
                for (const auto& ov : overlaps(rules_[i].lead, rules_[j].lead))
                    if (!normal_form(resolve_overlap(rules_[i], rules_[j], ov)).is_zero())
                        return false;
        return true;
    }

    bool confluence_flag() const { return confluent_; }

  private:
    static constexpr std::size_t kMaxRules = 20000;

    struct Overlap {
        std::size_t shared;  // suffix of lead1 == prefix of lead2, this long
    };

    void add_rule(PathPoly<F> p, std::deque<PathPoly<F>>& queue) {
        typename F::Elem lc_inv = field_.inv(p.lead().coeff);
        PathPoly<F> monic = p.scaled(field_, lc_inv);
        RewriteRule<F> rule;
        rule.lead = monic.lead().path;
        monic.terms.erase(monic.terms.begin());
        rule.tail = monic.negated(field_);
        // drop rules whose lead the new lead divides; requeue them
        std::vector<RewriteRule<F>> kept;
        for (auto& r : rules_) {
            if (contains_subword(r.lead.word, rule.lead.word))
                queue.push_back(r.as_poly(field_));
            else
                kept.push_back(std::move(r));
        }
        rules_ = std::move(kept);
        auto it = rules_.begin();
        while (it != rules_.end() && path_lt(it->lead, rule.lead)) ++it;
        rules_.insert(it, std::move(rule));
        for (auto& r : rules_) r.tail = normal_form(r.tail);
    }

    static bool contains_subword(const std::vector<ArrowId>& w, const std::vector<ArrowId>& sub) {
        if (sub.size() > w.size()) return false;
        for (std::size_t pos = 0; pos + sub.size() <= w.size(); ++pos) {
            bool hit = true;
            for (std::size_t k = 0; k < sub.size(); ++k)
                if (w[pos + k] != sub[k]) {
                    hit = false;
                    break;
                }
            if (hit) return true;
        }
        return false;
    }

    /// Leftmost match position and first matching rule, if any.
    bool find_match(const Path& p, std::size_t& pos_out, std::size_t& rule_out) const {
        for (std::size_t pos = 0; pos < p.word.size(); ++pos)
            for (std::size_t r = 0; r < rules_.size(); ++r) {
                const auto& lw = rules_[r].lead.word;
                if (pos + lw.size() > p.word.size()) continue;
                bool hit = true;
                for (std::size_t k = 0; k < lw.size(); ++k)
                    if (p.word[pos + k] != lw[k]) {
                        hit = false;
                        break;
                    }
                if (hit) {
                    pos_out = pos;
                    rule_out = r;
                    return true;
                }
            }
        return false;
    }

    bool lead_is_suffix(const Path& p) const {
        for (const auto& r : rules_) {
            const auto& lw = r.lead.word;
            if (lw.size() > p.word.size()) continue;
            bool hit = true;
            std::size_t off = p.word.size() - lw.size();
            for (std::size_t k = 0; k < lw.size(); ++k)
                if (p.word[off + k] != lw[k]) {
                    hit = false;
                    break;
                }
            if (hit) return true;
        }
        return false;
    }

    /// Replace the subword [pos, pos+len) of host by each term of the tail.
    PathPoly<F> embed(const PathPoly<F>& tail, const Path& host, std::size_t pos,
                      std::size_t len) const {
        std::vector<typename PathPoly<F>::Term> raw;
        for (const auto& t : tail.terms) {
            Path p;
            p.src = host.src;
            p.tgt = host.tgt;
            p.word.assign(host.word.begin(), host.word.begin() + pos);
            p.word.insert(p.word.end(), t.path.word.begin(), t.path.word.end());
            p.word.insert(p.word.end(), host.word.begin() + pos + len, host.word.end());
            raw.push_back({t.coeff, std::move(p)});
        }
        return PathPoly<F>::collect(field_, std::move(raw));
    }

    std::vector<Overlap> overlaps(const Path& l1, const Path& l2) const {
        std::vector<Overlap> out;
        std::size_t m = std::min(l1.length(), l2.length());
        for (std::size_t k = 1; k < m; ++k) {
            bool hit = true;
            for (std::size_t t = 0; t < k; ++t)
                if (l1.word[l1.length() - k + t] != l2.word[t]) {
                    hit = false;
                    break;
                }
            if (hit) out.push_back({k});
        }
        return out;
    }

    PathPoly<F> resolve_overlap(const RewriteRule<F>& r1, const RewriteRule<F>& r2,
                                const Overlap& ov) const {
        Path w;
        w.word = r1.lead.word;
        w.word.insert(w.word.end(), r2.lead.word.begin() + ov.shared, r2.lead.word.end());
        w.src = r1.lead.src;
        w.tgt = w.word.empty() ? w.src : quiver_.arrows[w.word.back()].tgt;
        PathPoly<F> via1 = embed(r1.tail, w, 0, r1.lead.length());
        PathPoly<F> via2 = embed(r2.tail, w, r1.lead.length() - ov.shared, r2.lead.length());
        return via1.add(field_, via2.negated(field_));
    }

    std::optional<PathPoly<F>> first_unresolved_overlap() const {
        for (std::size_t i = 0; i < rules_.size(); ++i)
            for (std::size_t j = 0; j < rules_.size(); ++j)
                for (const auto& ov : overlaps(rules_[i].lead, rules_[j].lead)) {
                    PathPoly<F> nf = normal_form(resolve_overlap(rules_[i], rules_[j], ov));
                    if (!nf.is_zero()) return nf;
                }
        return std::nullopt;
    }

    F field_;
    Quiver quiver_;
    std::size_t cap_;
    std::vector<RewriteRule<F>> rules_;
    bool confluent_ = false;
};

}  // namespace gored
