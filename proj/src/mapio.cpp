#include "ffdyn/mapio.hpp"
#include "ffdyn/parser.hpp"

#include <fstream>
#include <sstream>

namespace ffdyn {

ConstantField field_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "Q") return ConstantField::Q();
    if (kind == "Fp") return ConstantField::Fp(j.at("p").get<unsigned long>());
    throw std::invalid_argument("unknown field kind: " + kind);
}

json field_to_json(const ConstantField& f) {
    if (f.is_prime_field()) return json{{"kind", "Fp"}, {"p", f.p}};
    return json{{"kind", "Q"}};
}

HomogMap map_from_json(const json& j) {
    ConstantField f = field_from_json(j.at("field"));
    int nvars = j.at("n_vars").get<int>();
    int degree = j.at("degree").get<int>();
    HomogMap phi(f, nvars, degree);
    const json& forms = j.at("forms");
    if (static_cast<int>(forms.size()) != nvars) throw std::invalid_argument("wrong number of forms");
    for (int i = 0; i < nvars; ++i) {
        for (const auto& term : forms[static_cast<size_t>(i)]) {
            Monomial m = term.at("exp").get<std::vector<int>>();
            RatFunc c = parse_rat_func(term.at("coeff").get<std::string>(), f);
            if (!phi.coeff(i, m).is_zero()) throw std::invalid_argument("duplicate monomial in form");
            phi.set_coeff(i, m, c);
        }
    }
    return phi;
}

json map_to_json(const HomogMap& phi) {
    json forms = json::array();
    for (int i = 0; i < phi.n_vars(); ++i) {
        json form = json::array();
        for (const auto& [m, c] : phi.form(i))
            form.push_back(json{{"exp", m}, {"coeff", c.to_string()}});
        forms.push_back(form);
    }
    return json{{"field", field_to_json(phi.field())},
                {"n_vars", phi.n_vars()},
                {"degree", phi.degree()},
                {"forms", forms}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

HomogMap load_map(const std::string& path) { return map_from_json(read_json_file(path)); }

void save_map(const HomogMap& phi, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << map_to_json(phi).dump(2) << "\n";
}

std::vector<std::vector<RatFunc>> points_from_json(const json& j, const ConstantField& f) {
    std::vector<std::vector<RatFunc>> out;
    const json& pts = j.is_array() ? j : j.at("points");
    for (const auto& p : pts) {
        std::vector<RatFunc> v;
        for (const auto& c : p) v.push_back(parse_rat_func(c.get<std::string>(), f));
        out.push_back(v);
    }
    return out;
}

std::vector<std::vector<RatFunc>> load_points(const std::string& path, const ConstantField& f) {
    return points_from_json(read_json_file(path), f);
}

std::string map_hash(const HomogMap& phi) {
    std::string data = map_to_json(phi).dump();
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace ffdyn
