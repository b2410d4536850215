#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "unet/fibered.hpp"
#include "unet/lattice.hpp"
#include "unet/models.hpp"
#include "unet/mourre.hpp"

namespace unet::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Schema violation; `path` is the JSON path of the offending field.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct Tolerances {
    double gap_tol = 1e-6;
    double grad_tol = 1e-4;
    /// pass threshold for `verify`
    double residual = 1e-12;

    json to_json() const;
};

enum class ModelKind { Qw, Bb, Cmv, Cc };

struct Config {
    std::string text;
    std::uint64_t hash = 0;
    json raw;

    ModelKind kind = ModelKind::Qw;
    int d = 1;
    int L = 64;
    int grid = 0;
    std::optional<ArcSet> delta;
    std::optional<ArcSet> delta_prime;
    std::vector<int> sizes;
    Tolerances tol;

    /// Model block of the raw document.
    const json& model() const { return raw.at("model"); }
};

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Parses and validates the top-level schema. Throws SchemaError.
Config load_config(const std::string& path);

cplx parse_complex(const json& j, const std::string& path);

/// Homogeneous coin C_inf of a qw model (named or {alpha, beta, eta}).
UnitaryMatrix homogeneous_coin(const Config& cfg);
/// Optional perturbation descriptor of a qw model.
std::optional<PerturbationProfile> perturbation(const Config& cfg);

/// Operator of the configured model at side L (L = 0 uses the config).
NetworkOperator build_model(const Config& cfg, int L = 0);
/// Symbol of the homogeneous part (qw or cc).
Symbol model_symbol(const Config& cfg);

QwCoinParams qw_params(const Config& cfg, int L);
BbParams bb_params(const Config& cfg, int L);
CcParams cc_params(const Config& cfg, int L);
VerblunskiSeq verblunski(const Config& cfg, int L);

/// Random instances for `verify`, deterministic in the seed.
QwCoinParams random_qw_params(long L, std::uint64_t seed);
BbParams random_bb_params(long L, std::uint64_t seed, bool wrap_consistent_gamma);
CcParams random_cc_params(double phi, int L, std::uint64_t seed);

} // namespace unet::cli
