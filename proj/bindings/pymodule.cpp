#include "ffdyn/arithdyn.hpp"
#include "ffdyn/capacity.hpp"
#include "ffdyn/heights.hpp"
#include "ffdyn/mapio.hpp"
#include "ffdyn/parser.hpp"
#include "ffdyn/verify.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace ffdyn;

namespace {

ConstantField field_from_args(unsigned long p) { return p ? ConstantField::Fp(p) : ConstantField::Q(); }

HomogMap map_from_str(const std::string& js) { return map_from_json(json::parse(js)); }

std::vector<RatFunc> point_from_strs(const std::vector<std::string>& coords, const ConstantField& f) {
    std::vector<RatFunc> x;
    for (const auto& c : coords) x.push_back(parse_rat_func(c, f));
    return x;
}

py::dict witness_dict(const ConjWitness& w) {
    py::dict d;
    py::list lin;
    for (int i = 0; i < w.linear.size(); ++i) {
        py::list row;
        for (int j = 0; j < w.linear.size(); ++j) row.append(w.linear.at(i, j).to_string());
        lin.append(row);
    }
    py::list diag;
    for (const auto& s : w.diag.entries) diag.append(s.to_string());
    d["linear"] = lin;
    d["diag"] = diag;
    return d;
}

} // namespace

PYBIND11_MODULE(_ffdyn, m) {
    m.doc() = "exact arithmetic dynamics over k(t): reduction, isotriviality, heights, capacities";
    m.attr("__version__") = "0.1.0";

    m.def(
        "ord",
        [](const std::string& a, const std::string& place, unsigned long p) {
            ConstantField f = field_from_args(p);
            return ord(parse_rat_func(a, f), parse_place(place, f));
        },
        py::arg("element"), py::arg("place"), py::arg("p") = 0);

    m.def(
        "log_abs",
        [](const std::string& a, const std::string& place, unsigned long p) {
            ConstantField f = field_from_args(p);
            return log_abs(parse_rat_func(a, f), parse_place(place, f)).get_str();
        },
        py::arg("element"), py::arg("place"), py::arg("p") = 0);

    m.def(
        "support",
        [](const std::string& a, unsigned long p) {
            ConstantField f = field_from_args(p);
            py::list out;
            for (const auto& [v, e] : support(parse_rat_func(a, f))) out.append(py::make_tuple(v.to_string(), e));
            return out;
        },
        py::arg("element"), py::arg("p") = 0);

    m.def(
        "product_formula_sum",
        [](const std::string& a, unsigned long p) {
            ConstantField f = field_from_args(p);
            return product_formula_sum(parse_rat_func(a, f)).get_str();
        },
        py::arg("element"), py::arg("p") = 0);

    m.def(
        "resultant",
        [](const std::string& map_json) {
            auto r = resultant(map_from_str(map_json));
            return py::make_tuple(r.value.to_string(), r.degenerate);
        },
        py::arg("map_json"));

    m.def(
        "res_ord",
        [](const std::string& map_json, const std::string& place) {
            HomogMap phi = map_from_str(map_json);
            return res_ord(phi, parse_place(place, phi.field()));
        },
        py::arg("map_json"), py::arg("place"));

    m.def(
        "reduction_report",
        [](const std::string& map_json) {
            HomogMap phi = map_from_str(map_json);
            ReductionReport rr = reduction_report(phi);
            py::dict d;
            py::list entries, bad;
            for (const auto& e : rr.entries)
                entries.append(py::make_tuple(e.place.to_string(), e.res_ord_normalized, e.good));
            for (const auto& v : rr.bad) bad.append(v.to_string());
            d["entries"] = entries;
            d["bad_places"] = bad;
            return d;
        },
        py::arg("map_json"));

    m.def(
        "isotriviality",
        [](const std::string& map_json, long bound, int npm) {
            HomogMap phi = map_from_str(map_json);
            IsoOptions opts;
            opts.witness_bound = bound;
            opts.max_preper_effort = npm;
            IsotrivialityVerdict v = isotriviality(phi, opts);
            py::dict d;
            switch (v.status) {
                case IsotrivialityVerdict::Status::isotrivial: d["status"] = "isotrivial"; break;
                case IsotrivialityVerdict::Status::non_isotrivial: d["status"] = "non_isotrivial"; break;
                default: d["status"] = "unknown"; break;
            }
            if (v.witness) d["witness"] = witness_dict(*v.witness);
            if (v.certificate) {
                d["certificate"] = v.certificate->to_string();
                d["certificate_kind"] = v.certificate_kind;
            }
            if (v.constant_model) d["constant_model"] = v.constant_model->rendered;
            if (!v.note.empty()) d["note"] = v.note;
            return d;
        },
        py::arg("map_json"), py::arg("bound") = 3, py::arg("npm") = 4);

    m.def(
        "local_height",
        [](const std::string& map_json, const std::vector<std::string>& point, const std::string& place,
           const std::string& target_error) {
            HomogMap phi = map_from_str(map_json);
            Place v = parse_place(place, phi.field());
            HeightOptions opts;
            Rat err(target_error);
            err.canonicalize();
            opts.target_error = err;
            HeightEstimate h = local_height(phi, point_from_strs(point, phi.field()), v, opts);
            py::dict d;
            d["value"] = h.value.get_str();
            d["error_bound"] = h.error_bound.get_str();
            d["exact"] = h.exact;
            d["iterations_used"] = h.iterations_used;
            return d;
        },
        py::arg("map_json"), py::arg("point"), py::arg("place"), py::arg("target_error") = "1/1048576");

    m.def(
        "julia_membership",
        [](const std::string& map_json, const std::vector<std::string>& point, const std::string& place,
           long max_iter) {
            HomogMap phi = map_from_str(map_json);
            Place v = parse_place(place, phi.field());
            JuliaVerdict jv = julia_membership(phi, point_from_strs(point, phi.field()), v, max_iter);
            py::dict d;
            switch (jv.status) {
                case JuliaVerdict::Status::escapes:
                    d["status"] = "escapes";
                    d["at_iteration"] = jv.at_iteration;
                    break;
                case JuliaVerdict::Status::bounded_certified:
                    d["status"] = "bounded_certified";
                    d["witness"] = witness_dict(*jv.witness);
                    break;
                default:
                    d["status"] = "bounded_so_far";
                    d["max_iter"] = jv.max_iter;
                    break;
            }
            return d;
        },
        py::arg("map_json"), py::arg("point"), py::arg("place"), py::arg("max_iter") = 32);

    m.def(
        "m_diameter",
        [](const std::vector<std::vector<std::string>>& points, const std::string& place, int M, unsigned long p) {
            ConstantField f = field_from_args(p);
            PointSet e{{}, parse_place(place, f)};
            for (const auto& pt : points) e.points.push_back(point_from_strs(pt, f));
            DiameterReport r = m_diameter(e, M);
            py::dict d;
            d["M"] = r.M;
            d["log_dM"] = r.log_dM.get_str();
            d["J_M"] = r.J_M;
            d["attaining"] = r.attaining;
            return d;
        },
        py::arg("points"), py::arg("place"), py::arg("M"), py::arg("p") = 0);

    m.def(
        "preperiodic_points",
        [](const std::string& map_json, int n, int mm) {
            HomogMap phi = map_from_str(map_json);
            PreperSet ps = preperiodic_points(phi, n, mm);
            py::list pts;
            for (const auto& pp : ps.points) {
                py::list coords;
                for (const auto& c : pp.point) coords.append(c.to_string());
                pts.append(py::make_tuple(coords, pp.multiplicity));
            }
            py::list unres;
            for (const auto& u : ps.unresolved)
                unres.append(py::make_tuple(u.factor.to_string(), u.degree, u.multiplicity, u.irreducible_known));
            return py::make_tuple(pts, unres);
        },
        py::arg("map_json"), py::arg("n"), py::arg("m") = 0);

    m.def(
        "stabilizer_order",
        [](const std::string& map_json) { return stabilizer(map_from_str(map_json)).size(); },
        py::arg("map_json"));

    m.def(
        "verify",
        [](unsigned long long seed) {
            VerifyResult r = verify_suite(seed);
            py::dict d;
            d["checks"] = r.checks;
            d["failures"] = r.failures;
            d["log"] = r.log;
            return d;
        },
        py::arg("seed") = 1);
}
