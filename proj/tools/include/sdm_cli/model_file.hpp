#pragma once

#include "sdm/gas.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace sdm::cli {

/// How the presample parameters were produced.
struct InitMode {
    enum class Kind { Stationary, Seasonal, Static };
    Kind kind = Kind::Stationary;
    int period = 0;  // Seasonal only

    /// "stationary", "static" or "seasonal:<period>".
    static InitMode parse(const std::string& text);
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const InitMode&, const InitMode&) = default;
};

struct FitMetadata {
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::size_t n_obs = 0;
    std::uint64_t seed = 0;
    std::string tool_version;

    friend bool operator==(const FitMetadata&, const FitMetadata&) = default;
};

/// Self-describing persisted model: structure, coefficients and presample rows.
struct ModelFile {
    ModelSpec spec;
    Coefficients coefficients;
    InitMode init;
    InitialParams initial_params;
    std::optional<FitMetadata> fit;

    friend bool operator==(const ModelFile& a, const ModelFile& b);
};

std::string to_json(const ModelFile& model);
/// Throws InvalidModel on malformed or inconsistent documents.
ModelFile from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

/// Token form used by --links and model files: id, log, log:a, logit:a:b.
std::string link_token(const Link& link);
Link parse_link_token(const std::string& token);

}  // namespace sdm::cli
