#include "ffdyn/arithdyn.hpp"
#include "ffdyn/capacity.hpp"
#include "ffdyn/heights.hpp"
#include "ffdyn/mapio.hpp"
#include "ffdyn/parser.hpp"
#include "ffdyn/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace ffdyn;

constexpr const char* kVersion = "0.1.0";

json provenance(const HomogMap& phi, const json& options) {
    return json{{"map_hash", map_hash(phi)}, {"version", kVersion}, {"options", options}};
}

json place_json(const Place& v) { return v.to_string(); }

json witness_json(const ConjWitness& w) {
    json lin = json::array();
    for (int i = 0; i < w.linear.size(); ++i) {
        json row = json::array();
        for (int j = 0; j < w.linear.size(); ++j) row.push_back(w.linear.at(i, j).to_string());
        lin.push_back(row);
    }
    json diag = json::array();
    for (const auto& s : w.diag.entries) diag.push_back(s.to_string());
    return json{{"linear", lin}, {"diag", diag}};
}

void emit(const json& report, bool as_json) {
    if (as_json) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    // plain text rendering: flat key traversal
    std::function<void(const json&, std::string)> walk = [&](const json& node, std::string prefix) {
        if (node.is_object()) {
            for (auto it = node.begin(); it != node.end(); ++it)
                walk(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
        } else if (node.is_array()) {
            int idx = 0;
            for (const auto& el : node) walk(el, prefix + "[" + std::to_string(idx++) + "]");
        } else {
            std::cout << prefix << ": " << (node.is_string() ? node.get<std::string>() : node.dump()) << "\n";
        }
    };
    walk(report, "");
}

std::vector<RatFunc> parse_point(const std::vector<std::string>& coords, const ConstantField& f) {
    std::vector<RatFunc> x;
    for (const auto& c : coords) x.push_back(parse_rat_func(c, f));
    return x;
}

int run(int argc, char** argv) {
    CLI::App app{"exact arithmetic dynamics over k(t): reduction, isotriviality, heights, capacities"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable JSON output");

    std::string map_path, points_path, place_str = "t", error_str = "1/1048576", recheck_path, field_str = "Q";
    std::vector<std::string> point;
    long bound = 3, max_iter = 32, seed = 1;
    int npm = 4, iter_r = 2, preper_n = 1, preper_m = 0, M = -1, m_lo = -1, m_hi = -1, fq_ext = 0;

    auto* c_eval = app.add_subcommand("eval", "evaluate a map at a point");
    c_eval->add_option("map", map_path)->required();
    c_eval->add_option("--point", point, "coordinates")->required();

    auto* c_res = app.add_subcommand("res", "resultant of a map with its place support");
    c_res->add_option("map", map_path)->required();

    auto* c_places = app.add_subcommand("places", "support, orders and log absolute values of an element");
    std::string expr;
    unsigned long fp_char = 0;
    c_places->add_option("expr", expr)->required();
    c_places->add_option("--fp", fp_char, "prime characteristic (default: field Q)");

    auto* c_red = app.add_subcommand("reduction", "good-reduction report per place");
    c_red->add_option("map", map_path)->required();

    auto* c_iso = app.add_subcommand("isotrivial", "isotriviality verdict with witness or certificate");
    c_iso->add_option("map", map_path);
    c_iso->add_option("--bound", bound, "diagonal search bound");
    c_iso->add_option("--npm", npm, "preperiodic search effort (max n+m)");
    c_iso->add_option("--recheck", recheck_path, "re-validate a previous report without searching");

    auto* c_itc = app.add_subcommand("iterate-check", "compare verdicts of a map and its iterate");
    c_itc->add_option("map", map_path)->required();
    c_itc->add_option("-r,--power", iter_r, "iterate exponent")->required();

    auto* c_h = app.add_subcommand("height", "homogeneous local height with certified error");
    c_h->add_option("map", map_path)->required();
    c_h->add_option("--point", point)->required();
    c_h->add_option("--place", place_str);
    c_h->add_option("--error", error_str, "target error bound (exact rational)");

    auto* c_j = app.add_subcommand("julia", "filled-Julia membership at a place");
    c_j->add_option("map", map_path)->required();
    c_j->add_option("--point", point)->required();
    c_j->add_option("--place", place_str);
    c_j->add_option("--max-iter", max_iter);

    auto* c_td = app.add_subcommand("tdiam", "M-diameters of a finite point set");
    c_td->add_option("points", points_path)->required();
    c_td->add_option("--place", place_str);
    c_td->add_option("-M", M, "single M");
    c_td->add_option("--m-lo", m_lo);
    c_td->add_option("--m-hi", m_hi);
    c_td->add_option("--fp", fp_char, "prime characteristic of the point field");

    auto* c_pp = app.add_subcommand("preper", "preperiodic points of type (n, m)");
    c_pp->add_option("map", map_path)->required();
    c_pp->add_option("-n", preper_n)->required();
    c_pp->add_option("-m", preper_m);
    c_pp->add_option("--fq", fq_ext, "exhaustive scan over F_{p^e} instead of K-rational roots");

    auto* c_st = app.add_subcommand("stabilizer", "PGL stabilizer of a constant map over F_p");
    c_st->add_option("map", map_path)->required();

    auto* c_v = app.add_subcommand("verify", "run the randomized invariant battery");
    c_v->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    if (c_eval->parsed()) {
        HomogMap phi = load_map(map_path);
        auto x = parse_point(point, phi.field());
        json img = json::array();
        for (const auto& c : phi.evaluate(x)) img.push_back(c.to_string());
        emit(json{{"image", img}, {"provenance", provenance(phi, json{{"point", point}})}}, as_json);
        return 0;
    }
    if (c_res->parsed()) {
        HomogMap phi = load_map(map_path);
        ResultantValue r = resultant(phi);
        json supp = json::array();
        if (!r.value.is_zero())
            for (const auto& [v, e] : support(r.value)) supp.push_back(json{{"place", place_json(v)}, {"ord", e}});
        emit(json{{"resultant", r.value.to_string()},
                  {"degenerate", r.degenerate},
                  {"support", supp},
                  {"provenance", provenance(phi, json::object())}},
             as_json);
        return 0;
    }
    if (c_places->parsed()) {
        ConstantField f = fp_char ? ConstantField::Fp(fp_char) : ConstantField::Q();
        RatFunc a = parse_rat_func(expr, f);
        json rows = json::array();
        for (const auto& [v, e] : support(a))
            rows.push_back(json{{"place", place_json(v)},
                                {"degree", v.degree()},
                                {"ord", e},
                                {"log_abs", log_abs(a, v).get_str()}});
        emit(json{{"element", a.to_string()},
                  {"support", rows},
                  {"product_formula_sum", product_formula_sum(a).get_str()}},
             as_json);
        return 0;
    }
    if (c_red->parsed()) {
        HomogMap phi = load_map(map_path);
        ReductionReport rr = reduction_report(phi);
        json entries = json::array();
        for (const auto& e : rr.entries)
            entries.push_back(json{{"place", place_json(e.place)},
                                   {"res_ord_normalized", e.res_ord_normalized},
                                   {"good", e.good}});
        json bad = json::array();
        for (const auto& v : rr.bad) bad.push_back(place_json(v));
        emit(json{{"entries", entries}, {"bad_places", bad}, {"provenance", provenance(phi, json::object())}},
             as_json);
        return 0;
    }
    if (c_iso->parsed()) {
        if (!recheck_path.empty()) {
            json rep = read_json_file(recheck_path);
            HomogMap phi = map_from_json(rep.at("map"));
            std::string status = rep.at("status").get<std::string>();
            bool ok = false;
            if (status == "isotrivial" && rep.contains("witness")) {
                // rebuild the witness and re-run the constancy test
                const json& w = rep.at("witness");
                LinearMap lin(phi.field(), phi.n_vars());
                for (int i = 0; i < phi.n_vars(); ++i)
                    for (int j = 0; j < phi.n_vars(); ++j)
                        lin.at(i, j) = parse_rat_func(w.at("linear")[i][j].get<std::string>(), phi.field());
                // diagonal entries were serialized through their defining data
                DiagConj diag;
                for (const auto& entry : rep.at("witness_diag_data")) {
                    FormalScalar s = FormalScalar::from(parse_rat_func(entry.at("base").get<std::string>(), phi.field()));
                    for (const auto& rad : entry.at("rad")) {
                        Place v = parse_place(rad.at("place").get<std::string>(), phi.field());
                        Rat q(rad.at("exp").get<std::string>());
                        q.canonicalize();
                        s.rad[v] = q;
                    }
                    for (const auto& cr : entry.at("croots")) {
                        Rat u(cr.at("unit").get<std::string>()), e(cr.at("exp").get<std::string>());
                        u.canonicalize();
                        e.canonicalize();
                        s.croots.emplace_back(u, e);
                    }
                    s.canonicalize();
                    diag.entries.push_back(s);
                }
                auto formal = conjugate_formal(conjugate(phi, lin), diag);
                const FormalScalar* ref = nullptr;
                for (const auto& f : formal)
                    for (const auto& [mm, ss] : f)
                        if (!ref && !ss.is_zero()) ref = &ss;
                ok = ref != nullptr;
                if (ok) {
                    FormalScalar refinv = ref->inv();
                    for (const auto& f : formal)
                        for (const auto& [mm, ss] : f) ok = ok && ss.mul(refinv).is_constant();
                }
            } else if (status == "non_isotrivial" && rep.contains("certificate")) {
                // recompute the named invariant from scratch; no search involved
                RatFunc cert = parse_rat_func(rep.at("certificate").get<std::string>(), phi.field());
                std::string kind = rep.at("certificate_kind").get<std::string>();
                if (kind.rfind("multiplier-sigma", 0) == 0) {
                    size_t dash = kind.find("-period");
                    int idx = std::stoi(kind.substr(16, dash - 16));
                    int period = std::stoi(kind.substr(dash + 7));
                    auto sigma = multiplier_sigma(phi, period);
                    ok = idx >= 1 && idx <= static_cast<int>(sigma.size()) &&
                         sigma[static_cast<size_t>(idx - 1)] == cert && !cert.is_constant();
                } else {
                    ok = !cert.is_constant();
                }
            }
            emit(json{{"recheck", ok ? "valid" : "INVALID"}}, as_json);
            return ok ? 0 : 1;
        }
        HomogMap phi = load_map(map_path);
        json options{{"bound", bound}, {"npm", npm}};
        if (phi.degree() == 1) {
            LinearMap lin(phi.field(), phi.n_vars());
            for (int i = 0; i < phi.n_vars(); ++i)
                for (int j = 0; j < phi.n_vars(); ++j) {
                    Monomial m(static_cast<size_t>(phi.n_vars()), 0);
                    m[static_cast<size_t>(j)] = 1;
                    lin.at(i, j) = phi.coeff(i, m);
                }
            IsotrivialityVerdict v = linear_isotriviality(lin);
            json rep{{"map", map_to_json(phi)},
                     {"status", v.status == IsotrivialityVerdict::Status::isotrivial ? "isotrivial" : "non_isotrivial"},
                     {"provenance", provenance(phi, options)}};
            if (v.certificate) {
                rep["certificate"] = v.certificate->to_string();
                rep["certificate_kind"] = v.certificate_kind;
            }
            if (v.witness) rep["witness"] = witness_json(*v.witness);
            emit(rep, as_json);
            return 0;
        }
        IsoOptions opts;
        opts.witness_bound = bound;
        opts.max_preper_effort = npm;
        IsotrivialityVerdict v = isotriviality(phi, opts);
        json rep{{"map", map_to_json(phi)}, {"provenance", provenance(phi, options)}};
        switch (v.status) {
            case IsotrivialityVerdict::Status::isotrivial: {
                rep["status"] = "isotrivial";
                if (v.witness) {
                    rep["witness"] = witness_json(*v.witness);
                    json diagdata = json::array();
                    for (const auto& s : v.witness->diag.entries) {
                        json rads = json::array();
                        for (const auto& [pl, q] : s.rad)
                            rads.push_back(json{{"place", pl.to_string()}, {"exp", q.get_str()}});
                        json crs = json::array();
                        for (const auto& [u, e] : s.croots)
                            crs.push_back(json{{"unit", u.get_str()}, {"exp", e.get_str()}});
                        diagdata.push_back(json{{"base", s.base.to_string()}, {"rad", rads}, {"croots", crs}});
                    }
                    rep["witness_diag_data"] = diagdata;
                }
                if (v.model_scale) rep["model_scale"] = v.model_scale->to_string();
                if (v.constant_model) rep["constant_model"] = v.constant_model->rendered;
                emit(rep, as_json);
                return 0;
            }
            case IsotrivialityVerdict::Status::non_isotrivial: {
                rep["status"] = "non_isotrivial";
                rep["certificate"] = v.certificate->to_string();
                rep["certificate_kind"] = v.certificate_kind;
                emit(rep, as_json);
                return 0;
            }
            case IsotrivialityVerdict::Status::unknown: {
                rep["status"] = "unknown";
                rep["note"] = v.note;
                emit(rep, as_json);
                return 2;
            }
        }
        return 1;
    }
    if (c_itc->parsed()) {
        HomogMap phi = load_map(map_path);
        IterateCheck c = iterate_isotriviality(phi, iter_r);
        auto name = [](IsotrivialityVerdict::Status s) {
            switch (s) {
                case IsotrivialityVerdict::Status::isotrivial: return "isotrivial";
                case IsotrivialityVerdict::Status::non_isotrivial: return "non_isotrivial";
                default: return "unknown";
            }
        };
        json rep{{"base", name(c.base.status)},
                 {"iterate", name(c.iterate.status)},
                 {"r", iter_r},
                 {"verdicts_agree", c.verdicts_agree},
                 {"reduction_transfers", c.reduction_transfers},
                 {"provenance", provenance(phi, json{{"r", iter_r}})}};
        emit(rep, as_json);
        bool unknown = c.base.status == IsotrivialityVerdict::Status::unknown ||
                       c.iterate.status == IsotrivialityVerdict::Status::unknown;
        if (!c.verdicts_agree || !c.reduction_transfers) return 1;
        return unknown ? 2 : 0;
    }
    if (c_h->parsed()) {
        HomogMap phi = load_map(map_path);
        Place v = parse_place(place_str, phi.field());
        HeightOptions opts;
        Rat err(error_str);
        err.canonicalize();
        opts.target_error = err;
        HeightEstimate h = local_height(phi, parse_point(point, phi.field()), v, opts);
        emit(json{{"value", h.value.get_str()},
                  {"error_bound", h.error_bound.get_str()},
                  {"exact", h.exact},
                  {"iterations_used", h.iterations_used},
                  {"place", v.to_string()},
                  {"provenance", provenance(phi, json{{"error", error_str}, {"place", place_str}})}},
             as_json);
        return 0;
    }
    if (c_j->parsed()) {
        HomogMap phi = load_map(map_path);
        Place v = parse_place(place_str, phi.field());
        JuliaVerdict jv = julia_membership(phi, parse_point(point, phi.field()), v, max_iter);
        json rep{{"place", v.to_string()}, {"provenance", provenance(phi, json{{"max_iter", max_iter}})}};
        switch (jv.status) {
            case JuliaVerdict::Status::escapes:
                rep["status"] = "escapes";
                rep["at_iteration"] = jv.at_iteration;
                rep["log_norm_seen"] = jv.log_norm_seen.get_str();
                break;
            case JuliaVerdict::Status::bounded_certified:
                rep["status"] = "bounded_certified";
                rep["witness"] = witness_json(*jv.witness);
                break;
            case JuliaVerdict::Status::bounded_so_far:
                rep["status"] = "bounded_so_far";
                rep["max_iter"] = jv.max_iter;
                break;
        }
        emit(rep, as_json);
        return jv.status == JuliaVerdict::Status::bounded_so_far ? 2 : 0;
    }
    if (c_td->parsed()) {
        ConstantField f = fp_char ? ConstantField::Fp(fp_char) : ConstantField::Q();
        Place v = parse_place(place_str, f);
        PointSet e{load_points(points_path, f), v};
        int lo = M > 0 ? M : (m_lo > 0 ? m_lo : static_cast<int>(e.points[0].size()));
        int hi = M > 0 ? M : (m_hi > 0 ? m_hi : static_cast<int>(e.points.size()));
        json rows = json::array();
        for (int mm = lo; mm <= hi; ++mm) {
            try {
                DiameterReport r = m_diameter(e, mm);
                json att = json::array();
                for (int idx : r.attaining) att.push_back(idx);
                rows.push_back(json{{"M", r.M},
                                    {"log_dM", r.log_dM.get_str()},
                                    {"J_M", r.J_M},
                                    {"attaining", att},
                                    {"degenerate_skipped", r.degenerate_skipped}});
            } catch (const std::domain_error& ex) {
                rows.push_back(json{{"M", mm}, {"error", ex.what()}});
            }
        }
        emit(json{{"place", v.to_string()}, {"reports", rows}}, as_json);
        return 0;
    }
    if (c_pp->parsed()) {
        HomogMap phi = load_map(map_path);
        json rep{{"n", preper_n}, {"m", preper_m}, {"provenance", provenance(phi, json{{"fq", fq_ext}})}};
        if (fq_ext > 0) {
            auto pts = preperiodic_points_fq(phi, preper_n, preper_m, fq_ext);
            json arr = json::array();
            for (const auto& p : pts) {
                json coords = json::array();
                for (const auto& c : p) coords.push_back(c.to_string());
                arr.push_back(coords);
            }
            rep["points"] = arr;
            rep["count"] = pts.size();
        } else {
            PreperSet ps = preperiodic_points(phi, preper_n, preper_m);
            json arr = json::array();
            for (const auto& p : ps.points) {
                json coords = json::array();
                for (const auto& c : p.point) coords.push_back(c.to_string());
                arr.push_back(json{{"point", coords}, {"multiplicity", p.multiplicity}});
            }
            json unres = json::array();
            for (const auto& u : ps.unresolved)
                unres.push_back(json{{"factor", u.factor.to_string()},
                                     {"degree", u.degree},
                                     {"multiplicity", u.multiplicity},
                                     {"irreducible_known", u.irreducible_known}});
            rep["points"] = arr;
            rep["unresolved"] = unres;
        }
        emit(rep, as_json);
        return 0;
    }
    if (c_st->parsed()) {
        HomogMap phi = load_map(map_path);
        auto st = stabilizer(phi);
        json arr = json::array();
        for (const auto& g : st) arr.push_back(witness_json(ConjWitness{g, DiagConj::identity(phi.field(), phi.n_vars())})["linear"]);
        emit(json{{"order", st.size()}, {"elements", arr}, {"provenance", provenance(phi, json::object())}}, as_json);
        return 0;
    }
    if (c_v->parsed()) {
        VerifyResult r = verify_suite(static_cast<unsigned long long>(seed));
        if (as_json) {
            emit(json{{"checks", r.checks}, {"failures", r.failures}, {"log", r.log}}, true);
        } else {
            std::cout << r.log;
            std::cout << (r.ok() ? "PASS" : "FAIL") << " (" << r.checks - r.failures << "/" << r.checks << ")\n";
        }
        return r.ok() ? 0 : 1;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
