#include "config.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "unet/linalg.hpp"

namespace unet::cli {

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.is_object() || !obj.contains(key))
        throw SchemaError(path + "." + key, "missing");
    return obj.at(key);
}

double number(const json& j, const std::string& path)
{
    if (!j.is_number())
        throw SchemaError(path, "expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& path)
{
    if (!j.is_number_integer())
        throw SchemaError(path, "expected an integer");
    return j.get<int>();
}

ArcSet parse_arc(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2)
        throw SchemaError(path, "expected [lo, hi]");
    const double lo = number(j[0], path + "[0]");
    const double hi = number(j[1], path + "[1]");
    if (!(hi > lo))
        throw SchemaError(path, "need hi > lo");
    return ArcSet::interval(lo, hi);
}

// scalar or per-site array of length L
std::vector<double> site_values(const json& j, int L, const std::string& path)
{
    if (j.is_number())
        return std::vector<double>(L, j.get<double>());
    if (!j.is_array() || static_cast<int>(j.size()) != L)
        throw SchemaError(path, "expected a number or an array of length " + std::to_string(L));
    std::vector<double> v;
    for (std::size_t k = 0; k < j.size(); ++k)
        v.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
    return v;
}

std::uint64_t seed_of(const json& j, const std::string& path)
{
    if (!j.is_number_unsigned() && !j.is_number_integer())
        throw SchemaError(path, "expected a nonnegative integer seed");
    return j.get<std::uint64_t>();
}

} // namespace

json Tolerances::to_json() const
{
    return json{{"gap_tol", gap_tol}, {"grad_tol", grad_tol}, {"residual", residual}};
}

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

cplx parse_complex(const json& j, const std::string& path)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError(path, "expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Config load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SchemaError("$", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    Config cfg;
    cfg.text = buf.str();
    cfg.hash = fnv1a(cfg.text);
    try {
        cfg.raw = json::parse(cfg.text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!cfg.raw.is_object())
        throw SchemaError("$", "expected an object");
    const int version = integer(require(cfg.raw, "schema_version", "$"), "$.schema_version");
    if (version != kSchemaVersion)
        throw SchemaError("$.schema_version", "unsupported version " + std::to_string(version));

    const json& model = require(cfg.raw, "model", "$");
    const json& kind = require(model, "kind", "$.model");
    const std::string k = kind.is_string() ? kind.get<std::string>() : "";
    if (k == "qw")
        cfg.kind = ModelKind::Qw;
    else if (k == "bb")
        cfg.kind = ModelKind::Bb;
    else if (k == "cmv")
        cfg.kind = ModelKind::Cmv;
    else if (k == "cc")
        cfg.kind = ModelKind::Cc;
    else
        throw SchemaError("$.model.kind", "expected one of qw, bb, cmv, cc");
    cfg.d = model.contains("d") ? integer(model.at("d"), "$.model.d") : (cfg.kind == ModelKind::Cc ? 2 : 1);
    if (cfg.kind == ModelKind::Cc && cfg.d != 2)
        throw SchemaError("$.model.d", "Chalker-Coddington models are 2-dimensional");
    if ((cfg.kind == ModelKind::Bb || cfg.kind == ModelKind::Cmv) && cfg.d != 1)
        throw SchemaError("$.model.d", "BB and CMV models are 1-dimensional");
    cfg.L = integer(require(model, "L", "$.model"), "$.model.L");
    if (cfg.L < 4 || cfg.L % 2 != 0)
        throw SchemaError("$.model.L", "need an even side >= 4");
    cfg.grid = cfg.raw.contains("grid") ? integer(cfg.raw.at("grid"), "$.grid") : cfg.L;
    if (cfg.grid < 4)
        throw SchemaError("$.grid", "need grid >= 4");
    if (cfg.raw.contains("delta"))
        cfg.delta = parse_arc(cfg.raw.at("delta"), "$.delta");
    if (cfg.raw.contains("delta_prime"))
        cfg.delta_prime = parse_arc(cfg.raw.at("delta_prime"), "$.delta_prime");
    if (cfg.raw.contains("sizes")) {
        const json& s = cfg.raw.at("sizes");
        if (!s.is_array() || s.empty())
            throw SchemaError("$.sizes", "expected a nonempty array of sides");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const int v = integer(s[i], "$.sizes[" + std::to_string(i) + "]");
            if (v < 4 || v % 2 != 0)
                throw SchemaError("$.sizes[" + std::to_string(i) + "]", "need an even side >= 4");
            cfg.sizes.push_back(v);
        }
    }
    if (cfg.raw.contains("tolerances")) {
        const json& t = cfg.raw.at("tolerances");
        if (!t.is_object())
            throw SchemaError("$.tolerances", "expected an object");
        for (const auto& [key, val] : t.items()) {
            const std::string p = "$.tolerances." + key;
            if (key == "gap_tol")
                cfg.tol.gap_tol = number(val, p);
            else if (key == "grad_tol")
                cfg.tol.grad_tol = number(val, p);
            else if (key == "residual")
                cfg.tol.residual = number(val, p);
            else
                throw SchemaError(p, "unknown tolerance");
        }
    }
    return cfg;
}

UnitaryMatrix homogeneous_coin(const Config& cfg)
{
    if (cfg.kind != ModelKind::Qw)
        throw SchemaError("$.model.kind", "a homogeneous coin needs a qw model");
    const json& c = require(cfg.model(), "coin", "$.model");
    if (c.is_string())
        return named_coin(c.get<std::string>(), cfg.d);
    if (cfg.d != 1)
        throw SchemaError("$.model.coin", "parametrized coins are 1-dimensional");
    return qw_coin(parse_complex(require(c, "alpha", "$.model.coin"), "$.model.coin.alpha"),
                   parse_complex(require(c, "beta", "$.model.coin"), "$.model.coin.beta"),
                   number(require(c, "eta", "$.model.coin"), "$.model.coin.eta"), "model.coin");
}

std::optional<PerturbationProfile> perturbation(const Config& cfg)
{
    if (!cfg.model().contains("perturbation"))
        return std::nullopt;
    const json& p = cfg.model().at("perturbation");
    const std::string path = "$.model.perturbation";
    const json& kind = require(p, "kind", path);
    PerturbationProfile prof;
    prof.c = number(require(p, "c", path), path + ".c");
    const std::string k = kind.is_string() ? kind.get<std::string>() : "";
    if (k == "compact") {
        prof.kind = PerturbationProfile::Kind::Compact;
        prof.radius = number(require(p, "radius", path), path + ".radius");
    } else if (k == "single_site") {
        prof.kind = PerturbationProfile::Kind::Compact;
        prof.radius = 0.0;
    } else if (k == "power_law") {
        prof.kind = PerturbationProfile::Kind::PowerLaw;
        prof.eps = number(require(p, "eps", path), path + ".eps");
    } else {
        throw SchemaError(path + ".kind", "expected compact, single_site or power_law");
    }
    if (prof.c < 0.0 || prof.c > 2.0)
        throw SchemaError(path + ".c", "amplitude outside [0, 2]");
    return prof;
}

QwCoinParams qw_params(const Config& cfg, int L)
{
    const json& model = cfg.model();
    if (model.contains("random_coins"))
        return random_qw_params(L, seed_of(require(model.at("random_coins"), "seed", "$.model.random_coins"),
                                           "$.model.random_coins.seed"));
    if (model.contains("coins")) {
        const json& cs = model.at("coins");
        if (!cs.is_array() || static_cast<int>(cs.size()) != L)
            throw SchemaError("$.model.coins", "expected an array of length L = " + std::to_string(L));
        QwCoinParams p;
        for (std::size_t k = 0; k < cs.size(); ++k) {
            const std::string path = "$.model.coins[" + std::to_string(k) + "]";
            p.alpha.push_back(parse_complex(require(cs[k], "alpha", path), path + ".alpha"));
            p.beta.push_back(parse_complex(require(cs[k], "beta", path), path + ".beta"));
            p.eta.push_back(number(require(cs[k], "eta", path), path + ".eta"));
        }
        p.validate();
        return p;
    }
    const json& c = require(model, "coin", "$.model");
    if (c.is_string()) {
        const Matrix m = named_coin(c.get<std::string>(), 1).matrix();
        // recover (alpha, beta, eta) with eta = 0 when det = 1, else from det
        const double eta = -0.5 * std::arg(m.determinant());
        const cplx ph = std::polar(1.0, eta);
        return QwCoinParams::homogeneous(L, m(0, 0) * ph, m(1, 0) * ph, eta);
    }
    return QwCoinParams::homogeneous(L, parse_complex(require(c, "alpha", "$.model.coin"), "$.model.coin.alpha"),
                                     parse_complex(require(c, "beta", "$.model.coin"), "$.model.coin.beta"),
                                     number(require(c, "eta", "$.model.coin"), "$.model.coin.eta"));
}

BbParams bb_params(const Config& cfg, int L)
{
    const json& model = cfg.model();
    if (model.contains("random_scattering")) {
        const json& r = model.at("random_scattering");
        const bool wrap = r.contains("wrap_consistent_gamma") && r.at("wrap_consistent_gamma").get<bool>();
        return random_bb_params(L, seed_of(require(r, "seed", "$.model.random_scattering"), "$.model.random_scattering.seed"),
                                wrap);
    }
    const json& s = require(model, "scattering", "$.model");
    const std::string path = "$.model.scattering";
    BbParams p;
    p.r = site_values(require(s, "r", path), L, path + ".r");
    p.t = site_values(require(s, "t", path), L, path + ".t");
    p.theta = site_values(require(s, "theta", path), L, path + ".theta");
    p.nu = site_values(require(s, "nu", path), L, path + ".nu");
    p.gamma = site_values(require(s, "gamma", path), L, path + ".gamma");
    p.validate();
    return p;
}

CcParams cc_params(const Config& cfg, int L)
{
    const json& model = cfg.model();
    const double phi = number(require(model, "phi", "$.model"), "$.model.phi");
    CcParams p;
    if (model.contains("d_field") && model.at("d_field").is_object())
        p = random_cc_params(phi, L, seed_of(require(model.at("d_field"), "seed", "$.model.d_field"),
                                             "$.model.d_field.seed"));
    else if (!model.contains("d_field") || model.at("d_field") == "uniform")
        p = CcParams::uniform(phi, L);
    else
        throw SchemaError("$.model.d_field", "expected \"uniform\" or {\"seed\": n}");
    p.validate();
    return p;
}

VerblunskiSeq verblunski(const Config& cfg, int L)
{
    const json& v = require(cfg.model(), "verblunski", "$.model");
    if (!v.is_array() || v.empty())
        throw SchemaError("$.model.verblunski", "expected an array of [re, im]");
    VerblunskiSeq seq;
    for (int k = 0; k < L; ++k) {
        const std::size_t i = v.size() == 1 ? 0 : static_cast<std::size_t>(k);
        if (i >= v.size())
            throw SchemaError("$.model.verblunski", "expected 1 or L = " + std::to_string(L) + " coefficients");
        seq.a.push_back(parse_complex(v[i], "$.model.verblunski[" + std::to_string(i) + "]"));
    }
    seq.validate();
    return seq;
}

NetworkOperator build_model(const Config& cfg, int L)
{
    if (L == 0)
        L = cfg.L;
    switch (cfg.kind) {
    case ModelKind::Qw: {
        const auto prof = perturbation(cfg);
        const bool site_dependent = cfg.model().contains("coins") || cfg.model().contains("random_coins");
        if (site_dependent) {
            if (cfg.d != 1)
                throw SchemaError("$.model.coins", "site-dependent coins are 1-dimensional");
            if (prof)
                throw SchemaError("$.model.perturbation", "not combinable with site-dependent coins");
            return build_qw(coin_field_1d(qw_params(cfg, L)));
        }
        const LatticeShape shape = LatticeShape::make(cfg.d, L, 2 * cfg.d);
        const UnitaryMatrix c = homogeneous_coin(cfg);
        return build_qw(prof ? perturbed_field(shape, c, *prof) : CoinField::homogeneous(shape, c));
    }
    case ModelKind::Bb:
        return build_bb(bb_params(cfg, L));
    case ModelKind::Cmv:
        return build_cmv(verblunski(cfg, L));
    case ModelKind::Cc:
        return build_cc_qw(cc_params(cfg, L));
    }
    throw SchemaError("$.model.kind", "unknown kind");
}

Symbol model_symbol(const Config& cfg)
{
    if (cfg.kind == ModelKind::Qw) {
        if (cfg.model().contains("coins") || cfg.model().contains("random_coins"))
            throw SchemaError("$.model.coins", "a symbol needs a homogeneous coin");
        return symbol_qw(homogeneous_coin(cfg), cfg.d);
    }
    if (cfg.kind == ModelKind::Cc)
        return symbol_cc_walk(number(require(cfg.model(), "phi", "$.model"), "$.model.phi"));
    throw SchemaError("$.model.kind", "band structure needs a qw or cc model");
}

QwCoinParams random_qw_params(long L, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi), mix(0.0, kPi / 2);
    QwCoinParams p;
    for (long k = 0; k < L; ++k) {
        const double s = mix(rng);
        p.alpha.push_back(std::polar(std::cos(s), ang(rng)));
        p.beta.push_back(std::polar(std::sin(s), ang(rng)));
        p.eta.push_back(ang(rng));
    }
    return p;
}

BbParams random_bb_params(long L, std::uint64_t seed, bool wrap_consistent_gamma)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi), mix(0.0, kPi / 2);
    BbParams p;
    for (long k = 0; k < L; ++k) {
        const double s = mix(rng);
        p.r.push_back(std::cos(s));
        p.t.push_back(std::sin(s));
        p.theta.push_back(ang(rng));
        p.nu.push_back(ang(rng));
        p.gamma.push_back(ang(rng));
    }
    if (wrap_consistent_gamma) {
        double sum = 0.0;
        for (long k = 0; k + 1 < L; ++k)
            sum += p.gamma[k];
        p.gamma[L - 1] = wrap_phase(-sum);
    }
    return p;
}

CcParams random_cc_params(double phi, int L, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    CcParams p = CcParams::uniform(phi, L);
    for (auto& z : p.d_field)
        z = std::polar(1.0, ang(rng));
    return p;
}

} // namespace unet::cli
