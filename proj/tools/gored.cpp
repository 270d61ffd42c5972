// gored - reductions and Gorenstein homological invariants of bound quiver
// algebras. Subcommands: check, reduce, gproj, ext, gorenstein.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gored/reduction.hpp"

using namespace gored;

namespace {

struct Options {
    std::string algebra_file;
    std::size_t bound = 20;
    std::size_t jmax = 12;
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::size_t> degree_cap;
    std::string format = "human";
    std::optional<std::string> field_override;
    std::vector<std::string> simples;
    std::vector<std::string> module_files;
    std::vector<std::string> idempotent;  // comma-separated lists
    bool no_ehi = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Apply a --field override by rewriting the field line before parsing.
std::string algebra_text(const Options& opt) {
    std::string text = read_file(opt.algebra_file);
    if (!opt.field_override) return text;
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    bool replaced = false;
    while (std::getline(in, line)) {
        if (!replaced && line.rfind("field", 0) == 0) {
            out << "field " << *opt.field_override << "\n";
            replaced = true;
        } else {
            out << line << "\n";
        }
    }
    return out.str();
}

nlohmann::json perp_to_json(const PerpVerdict& v) {
    nlohmann::json j;
    j["kind"] = v.kind == PerpVerdict::Kind::CertifiedYes  ? "CertifiedYes"
                : v.kind == PerpVerdict::Kind::CertifiedNo ? "CertifiedNo"
                                                           : "UpToBound";
    j["checked_to"] = v.checked_to;
    if (v.certified_no()) j["witness"] = v.witness;
    if (v.period) j["period"] = {v.period->first, v.period->second};
    return j;
}

void emit(const Options& opt, const nlohmann::json& structured, const std::string& human) {
    if (opt.format == "structured")
        std::cout << structured.dump(2) << "\n";
    else
        std::cout << human;
}

template <class F>
struct Loaded {
    F field;
    Analysis<F> an;
    AlgebraHandle<F> alg;
};

template <class F>
Loaded<F> load_algebra(const F& field, const Options& opt) {
    auto pres = parse_presentation(field, algebra_text(opt));
    auto an = analyze(pres, opt.degree_cap);
    auto alg = algebra_basis(an);
    return {field, std::move(an), std::move(alg)};
}

template <class F>
std::vector<std::pair<std::string, Module<F>>> select_modules(const Loaded<F>& lx,
                                                              const Options& opt) {
    std::vector<std::pair<std::string, Module<F>>> out;
    for (const auto& label : opt.simples) {
        VertexId v = lx.an.pres.quiver.vertex_by_label(label);
        out.emplace_back("S_" + label, simple(lx.alg, v));
    }
    for (const auto& path : opt.module_files)
        out.emplace_back(path, load_module(lx.an, lx.alg, read_file(path)));
    return out;
}

// ---------------------------------------------------------------------------

template <class F>
int cmd_check(const F& field, const Options& opt) {
    auto lx = load_algebra(field, opt);
    nlohmann::json j;
    j["field"] = spec_of(field).str();
    j["num_vertices"] = lx.an.pres.quiver.num_vertices();
    j["num_arrows"] = lx.an.pres.quiver.num_arrows();
    j["num_relations"] = lx.an.pres.relations.size();
    j["nilpotency"] = lx.an.nilpotency;
    j["degree_cap"] = lx.an.cap_used;
    j["dimension"] = lx.an.dimension();
    j["digest"] = hex64(presentation_digest(lx.an.pres));
    j["seed"] = opt.seed;
    j["basis"] = nlohmann::json::array();
    for (const auto& p : lx.an.basis) j["basis"].push_back(p.str(lx.an.pres.quiver));
    std::string human;
    human += "algebra " + opt.algebra_file + " over " + spec_of(field).str() + "\n";
    human += "  vertices: " + std::to_string(lx.an.pres.quiver.num_vertices()) +
             ", arrows: " + std::to_string(lx.an.pres.quiver.num_arrows()) +
             ", relations: " + std::to_string(lx.an.pres.relations.size()) + "\n";
    human += "  admissible with J^" + std::to_string(lx.an.nilpotency) +
             " inside the ideal (completion cap " + std::to_string(lx.an.cap_used) + ")\n";
    human += "  dimension: " + std::to_string(lx.an.dimension()) + "\n";
    human += "  basis:";
    for (const auto& p : lx.an.basis) human += " " + p.str(lx.an.pres.quiver);
    human += "\n  digest: " + hex64(presentation_digest(lx.an.pres)) + "\n";
    human += "  seed: " + std::to_string(opt.seed) + "\n";
    emit(opt, j, human);
    return 0;
}

template <class F>
int cmd_reduce(const F& field, const Options& opt) {
    auto pres = parse_presentation(field, algebra_text(opt));
    ReduceConfig cfg;
    cfg.bound = opt.bound;
    cfg.jmax = opt.jmax;
    cfg.seed = opt.seed;
    cfg.degree_cap = opt.degree_cap;
    cfg.run_ehi = !opt.no_ehi;
    for (const auto& list : opt.idempotent) {
        std::vector<std::string> labels;
        std::string cur;
        for (char c : list) {
            if (c == ',') {
                if (!cur.empty()) labels.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) labels.push_back(cur);
        cfg.idempotent_steps.push_back(std::move(labels));
    }
    auto result = reduce(pres, cfg);
    auto report = conjecture_report(result);
    nlohmann::json j;
    j["trace"] = trace_to_json(result.trace);
    j["conjectures"] = conjecture_report_to_json(report);
    std::string human = trace_to_text(result.trace) + conjecture_report_to_text(report);
    emit(opt, j, human);
    return result.trace.exit_code;
}

template <class F>
int cmd_gproj(const F& field, const Options& opt) {
    auto lx = load_algebra(field, opt);
    auto mods = select_modules(lx, opt);
    if (mods.size() != 1) throw Error("gproj needs exactly one --simple or --module");
    auto verdict = gproj_test(mods[0].second, opt.bound, opt.seed);
    nlohmann::json j;
    j["module"] = mods[0].first;
    j["verdict"] = verdict.is_gproj()   ? "CertifiedGproj"
                   : verdict.certified() ? "CertifiedNotGproj"
                                         : "Undetermined";
    if (!verdict.witness.empty()) j["witness"] = verdict.witness;
    j["perp_module"] = perp_to_json(verdict.perp_module);
    j["perp_star"] = perp_to_json(verdict.perp_star);
    j["evaluation_invertible"] = verdict.evaluation_invertible;
    j["bound"] = opt.bound;
    j["seed"] = opt.seed;
    std::string human = mods[0].first + ": " + verdict.str() + "\n";
    human += "  Ext^.(M, A): " + verdict.perp_module.str() + "\n";
    human += "  Ext^.(M*, A-op): " + verdict.perp_star.str() + "\n";
    human += std::string("  evaluation M -> M**: ") +
             (verdict.evaluation_invertible ? "invertible" : "not invertible") + "\n";
    human += "  bound: " + std::to_string(opt.bound) + ", seed: " + std::to_string(opt.seed) + "\n";
    emit(opt, j, human);
    return verdict.certified() ? 0 : 2;
}

template <class F>
int cmd_ext(const F& field, const Options& opt) {
    auto lx = load_algebra(field, opt);
    auto mods = select_modules(lx, opt);
    if (mods.size() != 2) throw Error("ext needs exactly two of --simple/--module");
    auto res = min_resolution(mods[0].second, opt.jmax + 1, opt.seed);
    auto row = ext_row(res, mods[1].second, opt.jmax);
    nlohmann::json j;
    j["m"] = mods[0].first;
    j["n"] = mods[1].first;
    j["jmax"] = opt.jmax;
    j["row"] = row;
    j["seed"] = opt.seed;
    std::string human = "dim Ext^j(" + mods[0].first + ", " + mods[1].first + ") for j = 0.." +
                        std::to_string(opt.jmax) + ":";
    for (auto d : row) human += " " + std::to_string(d);
    human += "\n  seed: " + std::to_string(opt.seed) + "\n";
    emit(opt, j, human);
    return 0;
}

template <class F>
int cmd_gorenstein(const F& field, const Options& opt) {
    auto lx = load_algebra(field, opt);
    auto [l, r] = gorenstein_test(lx.alg, opt.bound, opt.seed);
    bool yes = l.is_finite() && r.is_finite();
    bool no = (l.is_certified() && !l.is_finite()) || (r.is_certified() && !r.is_finite());
    nlohmann::json j;
    j["id_left"] = verdict_to_json(l);
    j["id_right"] = verdict_to_json(r);
    j["gorenstein"] = yes ? "yes" : (no ? "no" : "undetermined");
    j["bound"] = opt.bound;
    j["seed"] = opt.seed;
    std::string human = "injective dimensions: (" + l.str() + ", " + r.str() + ")\n";
    human += std::string("Gorenstein: ") + (yes ? "yes" : (no ? "no" : "undetermined")) + "\n";
    human += "  bound: " + std::to_string(opt.bound) + ", seed: " + std::to_string(opt.seed) + "\n";
    emit(opt, j, human);
    return (yes || no) ? 0 : 2;
}

template <class F>
int dispatch(const F& field, const std::string& cmd, const Options& opt) {
    if (cmd == "check") return cmd_check(field, opt);
    if (cmd == "reduce") return cmd_reduce(field, opt);
    if (cmd == "gproj") return cmd_gproj(field, opt);
    if (cmd == "ext") return cmd_ext(field, opt);
    return cmd_gorenstein(field, opt);
}

int run(const std::string& cmd, const Options& opt) {
    FieldSpec fs;
    if (opt.field_override) {
        std::string v = *opt.field_override;
        if (v == "Q")
            fs = FieldSpec::rationals();
        else if (v.rfind("GF(", 0) == 0 && v.back() == ')')
            fs = FieldSpec::prime(std::stoull(v.substr(3, v.size() - 4)));
        else
            throw Error("bad --field value '" + v + "' (use Q or GF(p))");
    } else {
        fs = peek_field_spec(read_file(opt.algebra_file));
    }
    if (fs.rational) return dispatch(Rationals{}, cmd, opt);
    return dispatch(PrimeField(fs.p), cmd, opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homological reductions for bound quiver algebras"};
    app.require_subcommand(1);
    Options opt;
    if (const char* env = std::getenv("GORED_BOUND")) opt.bound = std::stoul(env);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("algebra", opt.algebra_file, "algebra file")->required();
        sub->add_option("--bound", opt.bound, "resolution depth bound");
        sub->add_option("--seed", opt.seed, "seed for randomized searches");
        sub->add_option("--field", opt.field_override, "override the file's field (Q or GF(p))");
        sub->add_option("--degree-cap", opt.degree_cap, "completion degree cap");
        sub->add_option("--format", opt.format, "output format: human or structured")
            ->check(CLI::IsMember({"human", "structured"}));
    };

    auto* check = app.add_subcommand("check", "parse, complete, certify admissibility");
    add_common(check);
    auto* reduce_cmd = app.add_subcommand("reduce", "run the reduction pipeline");
    add_common(reduce_cmd);
    reduce_cmd->add_option("--idempotent", opt.idempotent,
                           "kept vertices of a corner step (comma-separated labels)");
    reduce_cmd->add_option("--jmax", opt.jmax, "Ext sampling depth for corner steps");
    reduce_cmd->add_flag("--no-ehi", opt.no_ehi, "skip the sampled Ext-tail comparison");
    auto* gproj_cmd = app.add_subcommand("gproj", "Gorenstein projectivity certificate");
    add_common(gproj_cmd);
    gproj_cmd->add_option("--simple", opt.simples, "simple module at a vertex label");
    gproj_cmd->add_option("--module", opt.module_files, "module file");
    auto* ext_cmd = app.add_subcommand("ext", "Ext dimension table");
    add_common(ext_cmd);
    ext_cmd->add_option("--simple", opt.simples, "simple module at a vertex label (twice)");
    ext_cmd->add_option("--module", opt.module_files, "module file");
    ext_cmd->add_option("--jmax", opt.jmax, "largest Ext degree");
    auto* gor = app.add_subcommand("gorenstein", "two-sided injective dimension of the algebra");
    add_common(gor);

    CLI11_PARSE(app, argc, argv);
    std::string cmd = app.get_subcommands().front()->get_name();
    try {
        return run(cmd, opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
