#include "sdm_cli/model_file.hpp"

#include "sdm/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace sdm::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        out.push_back(item);
    }
    return out;
}

double parse_real(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw InvalidModel("'" + text + "' is not a number");
    }
    return v;
}

json vector_json(const Vec& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vec vector_from(const json& j, int expected, const std::string& what) {
    const auto values = j.get<std::vector<double>>();
    if (static_cast<int>(values.size()) != expected) {
        throw InvalidModel(what + " has " + std::to_string(values.size()) + " entries, expected " +
                           std::to_string(expected));
    }
    return Eigen::Map<const Vec>(values.data(), expected);
}

json lag_map_json(const std::map<int, Vec>& m) {
    json out = json::object();
    for (const auto& [lag, v] : m) {
        out[std::to_string(lag)] = vector_json(v);
    }
    return out;
}

std::map<int, Vec> lag_map_from(const json& j, int k, const std::string& what) {
    std::map<int, Vec> out;
    for (const auto& [key, value] : j.items()) {
        out[static_cast<int>(parse_real(key))] = vector_from(value, k, what + "[" + key + "]");
    }
    return out;
}

}  // namespace

InitMode InitMode::parse(const std::string& text) {
    if (text == "stationary") {
        return {Kind::Stationary, 0};
    }
    if (text == "static") {
        return {Kind::Static, 0};
    }
    const std::string prefix = "seasonal:";
    if (text.rfind(prefix, 0) == 0) {
        const double p = parse_real(text.substr(prefix.size()));
        if (p < 1 || p != static_cast<int>(p)) {
            throw InvalidModel("seasonal period must be a positive integer");
        }
        return {Kind::Seasonal, static_cast<int>(p)};
    }
    throw InvalidModel("unknown initialization '" + text +
                       "' (expected stationary, static or seasonal:<period>)");
}

std::string InitMode::to_string() const {
    switch (kind) {
        case Kind::Stationary: return "stationary";
        case Kind::Static: return "static";
        case Kind::Seasonal: return "seasonal:" + std::to_string(period);
    }
    return {};
}

bool operator==(const ModelFile& a, const ModelFile& b) {
    return a.spec == b.spec && a.coefficients == b.coefficients && a.init == b.init &&
           a.initial_params.values == b.initial_params.values && a.fit == b.fit;
}

std::string link_token(const Link& link) {
    switch (link.kind) {
        case Link::Kind::Identity: return "id";
        case Link::Kind::Log:
            return link.lower == 0.0 ? "log" : "log:" + json(link.lower).dump();
        case Link::Kind::Logit:
            return "logit:" + json(link.lower).dump() + ":" + json(link.upper).dump();
    }
    return {};
}

Link parse_link_token(const std::string& token) {
    const auto parts = split(token, ':');
    if (parts.empty()) {
        throw InvalidModel("empty link token");
    }
    const std::string& kind = parts[0];
    if ((kind == "id" || kind == "identity") && parts.size() == 1) {
        return Link::identity();
    }
    if (kind == "log" && parts.size() <= 2) {
        return Link::log(parts.size() == 2 ? parse_real(parts[1]) : 0.0);
    }
    if (kind == "logit" && parts.size() == 3) {
        return Link::logit(parse_real(parts[1]), parse_real(parts[2]));
    }
    throw InvalidModel("unknown link '" + token + "' (expected id, log, log:a or logit:a:b)");
}

std::string to_json(const ModelFile& model) {
    const ModelSpec& spec = model.spec;
    json j;
    j["format"] = "sdm-model";
    j["format_version"] = 1;
    j["distribution"] = std::string(family_key(spec.family()));
    j["score_lags"] = spec.score_lags();
    j["ar_lags"] = spec.ar_lags();
    j["scaling"] = scaling_exponent(spec.scaling());
    std::vector<int> mask;
    for (int i : spec.time_varying()) mask.push_back(i + 1);
    j["time_varying"] = mask;
    std::vector<std::string> links;
    for (const auto& l : spec.links()) links.push_back(link_token(l));
    j["links"] = links;
    j["omega"] = vector_json(model.coefficients.omega);
    j["A"] = lag_map_json(model.coefficients.A);
    j["B"] = lag_map_json(model.coefficients.B);
    j["init"] = model.init.to_string();
    json rows = json::array();
    for (Eigen::Index r = 0; r < model.initial_params.values.rows(); ++r) {
        const Vec row = model.initial_params.values.row(r).transpose();
        rows.push_back(vector_json(row));
    }
    j["initial_params"] = rows;
    if (model.fit) {
        j["fit"] = {{"loglik", model.fit->loglik},   {"aic", model.fit->aic},
                    {"bic", model.fit->bic},         {"n_obs", model.fit->n_obs},
                    {"seed", model.fit->seed},       {"tool_version", model.fit->tool_version}};
    }
    return j.dump(2) + "\n";
}

ModelFile from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        if (j.value("format", std::string()) != "sdm-model") {
            throw InvalidModel("not an sdm model file");
        }
        const auto name = j.at("distribution").get<std::string>();
        const auto family = parse_family(name);
        if (!family) {
            throw InvalidModel("unknown distribution '" + name + "'");
        }
        const int k = distribution_spec(*family).num_params;
        std::vector<int> mask;
        for (int i : j.at("time_varying").get<std::vector<int>>()) mask.push_back(i - 1);
        LinkSet links;
        for (const auto& token : j.at("links").get<std::vector<std::string>>()) {
            links.push_back(parse_link_token(token));
        }
        ModelFile m{ModelSpec(*family, j.at("score_lags").get<LagSet>(),
                              j.at("ar_lags").get<LagSet>(),
                              scaling_from_exponent(j.at("scaling").get<double>()), mask, links),
                    {},
                    InitMode::parse(j.at("init").get<std::string>()),
                    {},
                    std::nullopt};
        m.coefficients.omega = vector_from(j.at("omega"), k, "omega");
        m.coefficients.A = lag_map_from(j.at("A"), k, "A");
        m.coefficients.B = lag_map_from(j.at("B"), k, "B");
        m.coefficients.validate(m.spec);
        const auto& rows = j.at("initial_params");
        if (!rows.is_array() || rows.empty()) {
            throw InvalidModel("initial_params must be a non-empty array of rows");
        }
        m.initial_params.values.resize(static_cast<Eigen::Index>(rows.size()), k);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            m.initial_params.values.row(static_cast<Eigen::Index>(r)) =
                vector_from(rows[r], k, "initial_params row").transpose();
        }
        if (j.contains("fit")) {
            const auto& f = j.at("fit");
            m.fit = FitMetadata{f.at("loglik").get<double>(),      f.at("aic").get<double>(),
                                f.at("bic").get<double>(),         f.at("n_obs").get<std::size_t>(),
                                f.at("seed").get<std::uint64_t>(), f.value("tool_version", "")};
        }
        return m;
    } catch (const json::exception& e) {
        throw InvalidModel(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidModel("cannot write '" + path.string() + "'");
    }
    out << to_json(model);
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidModel("cannot open model file '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

}  // namespace sdm::cli
