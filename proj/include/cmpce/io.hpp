#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmpce/conformal.hpp"
#include "cmpce/density.hpp"
#include "cmpce/errors.hpp"
#include "cmpce/pce.hpp"

namespace cmpce {

using Json = nlohmann::json;

namespace detail {

inline const Json& require(const Json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline double require_number(const Json& j, const std::string& key, const std::string& where) {
    const Json& v = require(j, key, where);
    if (!v.is_number()) throw ParseError(where + "/" + key + ": expected a number");
    return v.get<double>();
}

inline std::vector<double> number_array(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParseError(where + "/" + std::to_string(i) + ": expected a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

}  // namespace detail

/// {"kind":"uniform"} or {"kind":"beta","alpha":a,"beta":b}.
inline Json density_to_json(const UnivariateDensity& d) {
    if (d.is_uniform()) return {{"kind", "uniform"}};
    if (const auto* b = std::get_if<UnivariateDensity::Beta>(&d.kind()))
        return {{"kind", "beta"}, {"alpha", b->alpha}, {"beta", b->beta}};
    throw ArgumentError("only input densities (uniform, beta) have a file representation");
}

inline UnivariateDensity density_from_json(const Json& j, const std::string& where = "density") {
    const Json& kind = detail::require(j, "kind", where);
    if (!kind.is_string()) throw ParseError(where + "/kind: expected a string");
    const auto k = kind.get<std::string>();
    if (k == "uniform") return UnivariateDensity::uniform();
    if (k == "beta") {
        const double a = detail::require_number(j, "alpha", where);
        const double b = detail::require_number(j, "beta", where);
        try {
            return UnivariateDensity::beta(a, b);
        } catch (const ArgumentError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    throw ParseError(where + "/kind: unknown density kind '" + k + "'");
}

/// "identity", "sausage9" or {"odd_coefficients":[...]}.
inline Json map_to_json(const ConformalMap1D& g) {
    switch (g.kind()) {
        case ConformalMap1D::Kind::identity: return "identity";
        case ConformalMap1D::Kind::sausage9: return "sausage9";
        case ConformalMap1D::Kind::custom: break;
    }
    const auto raw = g.raw_coefficients();
    return {{"odd_coefficients", std::vector<double>(raw.begin(), raw.end())}};
}

inline ConformalMap1D map_from_json(const Json& j, const std::string& where = "map") {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "identity") return ConformalMap1D::identity();
        if (name == "sausage9") return ConformalMap1D::sausage9();
        throw ParseError(where + ": unknown map '" + name + "'");
    }
    if (j.is_object() && j.contains("odd_coefficients")) {
        try {
            return ConformalMap1D::odd_polynomial(detail::number_array(j.at("odd_coefficients"), where + "/odd_coefficients"));
        } catch (const InvalidMapError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    throw ParseError(where + ": expected \"identity\", \"sausage9\" or {\"odd_coefficients\": [...]}");
}

inline Json surrogate_to_json(const Surrogate& s) {
    const PCBasis& b = s.basis();
    Json j;
    j["format"] = "cmpce-surrogate";
    j["version"] = 1;
    j["dimension"] = b.dimension();
    j["degree"] = b.degree();
    j["densities"] = Json::array();
    j["maps"] = Json::array();
    j["recurrences"] = Json::array();
    for (std::size_t d = 0; d < b.dimension(); ++d) {
        j["densities"].push_back(density_to_json(b.density()[d]));
        j["maps"].push_back(map_to_json(b.map()[d]));
        const auto& r = b.univariate(d).recurrence();
        j["recurrences"].push_back({{"alpha", r.alpha}, {"beta", r.beta}});
    }
    j["multi_indices"] = Json::array();
    std::vector<double> re;
    std::vector<double> im;
    for (std::size_t k = 0; k < b.size(); ++k) {
        j["multi_indices"].push_back(b.index_set()[k].degrees);
        re.push_back(s.coefficients()[k].real());
        im.push_back(s.coefficients()[k].imag());
    }
    j["coefficients_real"] = re;
    j["coefficients_imag"] = im;
    j["metadata"] = {{"model", s.metadata().model},
                     {"quadrature_nodes_per_dim", s.metadata().quadrature_nodes_per_dim},
                     {"built", s.metadata().built}};
    return j;
}

/// Rebuilds a surrogate from its JSON form. Recurrence coefficients are
/// taken from the file, so evaluation reproduces the saved surrogate exactly.
inline Surrogate surrogate_from_json(const Json& j) {
    using detail::require;
    const std::string root = "surrogate";
    if (!j.is_object()) throw ParseError(root + ": expected a JSON object");
    const Json& dim_j = require(j, "dimension", root);
    const Json& deg_j = require(j, "degree", root);
    if (!dim_j.is_number_integer() || dim_j.get<long long>() <= 0)
        throw ParseError(root + "/dimension: expected a positive integer");
    if (!deg_j.is_number_integer() || deg_j.get<long long>() < 0)
        throw ParseError(root + "/degree: expected a nonnegative integer");
    const auto dim = dim_j.get<std::size_t>();
    const auto degree = deg_j.get<unsigned>();

    auto array_of_dim = [&](const std::string& key) -> const Json& {
        const Json& a = require(j, key, root);
        if (!a.is_array() || a.size() != dim)
            throw ParseError(root + "/" + key + ": expected " + std::to_string(dim) + " entries (one per dimension)");
        return a;
    };
    const Json& dens = array_of_dim("densities");
    const Json& maps = array_of_dim("maps");
    const Json& recs = array_of_dim("recurrences");

    std::vector<UnivariateDensity> densities;
    std::vector<ConformalMap1D> gs;
    std::vector<OrthonormalBasis1D> univariate;
    for (std::size_t d = 0; d < dim; ++d) {
        const std::string at = "/" + std::to_string(d);
        densities.push_back(density_from_json(dens[d], root + "/densities" + at));
        gs.push_back(map_from_json(maps[d], root + "/maps" + at));
        RecurrenceCoefficients r;
        r.alpha = detail::number_array(require(recs[d], "alpha", root + "/recurrences" + at), root + "/recurrences" + at + "/alpha");
        r.beta = detail::number_array(require(recs[d], "beta", root + "/recurrences" + at), root + "/recurrences" + at + "/beta");
        if (r.alpha.size() != r.beta.size() || r.alpha.size() < degree + 1)
            throw ParseError(root + "/recurrences" + at + ": needs at least degree+1 alpha and beta values");
        univariate.emplace_back(transform_density(densities.back(), gs.back()), std::move(r), degree);
    }
    PCBasis basis(JointDensity(std::move(densities)), MultivariateMap(std::move(gs)), std::move(univariate), degree);

    const Json& mi = require(j, "multi_indices", root);
    if (!mi.is_array() || mi.size() != basis.size())
        throw ParseError(root + "/multi_indices: expected " + std::to_string(basis.size()) + " entries");
    for (std::size_t k = 0; k < mi.size(); ++k) {
        const std::string at = root + "/multi_indices/" + std::to_string(k);
        if (!mi[k].is_array() || mi[k].size() != dim)
            throw ParseError(at + ": expected " + std::to_string(dim) + " degrees");
        for (std::size_t d = 0; d < dim; ++d)
            if (!mi[k][d].is_number_integer() || mi[k][d].get<long long>() < 0 || mi[k][d].get<unsigned>() != basis.index_set()[k].degrees[d])
                throw ParseError(at + ": does not match the tensor index set order");
    }
    const auto re = detail::number_array(require(j, "coefficients_real", root), root + "/coefficients_real");
    const auto im = detail::number_array(require(j, "coefficients_imag", root), root + "/coefficients_imag");
    if (re.size() != basis.size() || im.size() != basis.size())
        throw ParseError(root + ": coefficient arrays must have " + std::to_string(basis.size()) + " entries");
    std::vector<Complex> c(re.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = Complex(re[k], im[k]);

    SurrogateMetadata meta;
    if (j.contains("metadata") && j["metadata"].is_object()) {
        const Json& m = j["metadata"];
        if (m.contains("model") && m["model"].is_string()) meta.model = m["model"].get<std::string>();
        if (m.contains("quadrature_nodes_per_dim") && m["quadrature_nodes_per_dim"].is_number_integer())
            meta.quadrature_nodes_per_dim = m["quadrature_nodes_per_dim"].get<std::size_t>();
        if (m.contains("built") && m["built"].is_string()) meta.built = m["built"].get<std::string>();
    }
    return Surrogate(std::move(basis), std::move(c), std::move(meta));
}

inline Json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

inline void save(const Surrogate& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << surrogate_to_json(s).dump(2) << '\n';
}

inline Surrogate load(const std::string& path) {
    const Json j = read_json_file(path);
    try {
        return surrogate_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace cmpce
