#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ebrisk/bounds.hpp"
#include "ebrisk/errors.hpp"
#include "ebrisk/prior.hpp"
#include "ebrisk/risk.hpp"
#include "ebrisk/search.hpp"

namespace ebrisk {

using json = nlohmann::json;

// Fixed 17-significant-digit formatting: round-trips every double and keeps
// CSV output byte-identical across runs.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ============================================================================
// Prior JSON schema
// ============================================================================
//   {"type": "discrete", "atoms": [...], "weights": [...]}
//   {"type": "gaussian_mixture", "means": [...], "variances": [...], "weights": [...]}

namespace detail {

inline std::vector<double> number_list(const json& j, const char* object, const char* field) {
    if (!j.contains(field))
        throw InvalidSpec(std::string(object) + ": missing field '" + field + "'");
    const json& arr = j.at(field);
    if (!arr.is_array())
        throw InvalidSpec(std::string(object) + ": field '" + field + "' must be an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const json& v : arr) {
        if (!v.is_number())
            throw InvalidSpec(std::string(object) + ": field '" + field +
                              "' must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace detail

inline Prior prior_from_json(const json& j) {
    if (!j.is_object()) throw InvalidSpec("prior: must be a JSON object");
    if (!j.contains("type")) throw InvalidSpec("prior: missing field 'type'");
    if (!j.at("type").is_string()) throw InvalidSpec("prior: field 'type' must be a string");
    const std::string type = j.at("type").get<std::string>();
    if (type == "discrete") {
        return DiscretePrior(detail::number_list(j, "prior", "atoms"),
                             detail::number_list(j, "prior", "weights"));
    }
    if (type == "gaussian_mixture") {
        return GaussianMixturePrior(detail::number_list(j, "prior", "means"),
                                    detail::number_list(j, "prior", "variances"),
                                    detail::number_list(j, "prior", "weights"));
    }
    throw InvalidSpec("prior: field 'type' must be 'discrete' or 'gaussian_mixture' (got '" +
                      type + "')");
}

inline json prior_to_json(const DiscretePrior& g) {
    return {{"type", "discrete"}, {"atoms", g.atoms()}, {"weights", g.weights()}};
}

inline json prior_to_json(const GaussianMixturePrior& g) {
    return {{"type", "gaussian_mixture"},
            {"means", g.means()},
            {"variances", g.variances()},
            {"weights", g.weights()}};
}

inline json prior_to_json(const Prior& g) {
    return std::visit([](const auto& p) { return prior_to_json(p); }, g);
}

inline Prior load_prior(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpec("prior file: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidSpec("prior file: '" + path + "' is not valid JSON: " + e.what());
    }
    return prior_from_json(j);
}

// ============================================================================
// Report serialization
// ============================================================================

inline json spec_to_json(const QuadratureSpec& spec) {
    return {{"gh_nodes", spec.gh_nodes},
            {"theta_nodes", spec.theta_nodes},
            {"mc_samples", spec.mc_samples},
            {"seed", spec.seed}};
}

inline json report_to_json(const RiskReport& r) {
    json j{{"risk", r.risk},
           {"second_moment", r.second_moment},
           {"method", to_string(r.method)},
           {"sigma", r.sigma},
           {"n_evals", r.n_evals}};
    if (r.std_error) j["std_error"] = *r.std_error;
    return j;
}

inline json report_to_json(const BoundReport& r) {
    json j{{"name", r.name},
           {"lhs", r.lhs},
           {"rhs", r.rhs},
           {"margin", r.margin},
           {"satisfied", r.satisfied}};
    if (r.witness) j["witness"] = *r.witness;
    return j;
}

inline json search_result_to_json(const SearchResult& r) {
    json trace = json::array();
    for (const TracePoint& t : r.trace) trace.push_back({t.iteration, t.risk});
    return {{"best_g0", prior_to_json(r.best_g0)},
            {"best_g1", prior_to_json(r.best_g1)},
            {"best_sigma", r.best_sigma},
            {"best_risk", r.best_risk},
            {"trace", trace}};
}

// CSV for sweeps; the comment line carries the evaluation settings so every
// emitted file records its own provenance.
inline std::string sweep_to_csv(const std::vector<RiskReport>& reports,
                                const QuadratureSpec& spec) {
    std::ostringstream out;
    out << "# gh_nodes=" << spec.gh_nodes << " theta_nodes=" << spec.theta_nodes
        << " mc_samples=" << spec.mc_samples << " seed=" << spec.seed << "\n";
    out << "sigma,risk,second_moment,method,std_error\n";
    for (const RiskReport& r : reports) {
        out << fmt_double(r.sigma) << ',' << fmt_double(r.risk) << ','
            << fmt_double(r.second_moment) << ',' << to_string(r.method) << ','
            << (r.std_error ? fmt_double(*r.std_error) : "") << "\n";
    }
    return out.str();
}

}  // namespace ebrisk
