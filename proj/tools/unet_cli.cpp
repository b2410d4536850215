// Command-line front end: reads an experiment config, runs one command and
// writes config.json, summary.json and CSV data files into the output directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "unet/dynamics.hpp"
#include "unet/equivalence.hpp"
#include "unet/linalg.hpp"
#include "unet/mourre.hpp"

namespace fs = std::filesystem;
using namespace unet;
using namespace unet::cli;

namespace {

struct Options {
    std::string config;
    std::string out = "out";
    int grid = 0;
    int truncation = 0;
    std::optional<double> gap_tol, grad_tol, residual_tol;
    std::string relation;
};

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json arcs_json(const ArcSet& s)
{
    json a = json::array();
    for (const Arc& arc : s.arcs())
        a.push_back(json::array({arc.lo, arc.hi()}));
    return a;
}

class Run {
public:
    Run(const Options& opt, Config cfg, std::string command)
        : opt_(opt), cfg_(std::move(cfg)), command_(std::move(command)), dir_(opt.out)
    {
        fs::create_directories(dir_);
        std::ofstream(dir_ / "config.json", std::ios::binary) << cfg_.text;
        summary_["schema_version"] = kSchemaVersion;
        summary_["command"] = command_;
        summary_["config_hash"] = "fnv1a64:" + hex64(cfg_.hash);
        summary_["tolerances"] = cfg_.tol.to_json();
    }

    json& summary() { return summary_; }
    std::ofstream csv(const std::string& name)
    {
        std::ofstream f(dir_ / name, std::ios::binary);
        f << std::setprecision(17);
        summary_["files"].push_back(name);
        return f;
    }
    void finish()
    {
        std::ofstream(dir_ / "summary.json", std::ios::binary) << summary_.dump(2) << "\n";
        std::cout << summary_.dump(2) << "\n";
    }

    const Config& cfg() const { return cfg_; }
    const Options& opt() const { return opt_; }

private:
    const Options& opt_;
    Config cfg_;
    std::string command_;
    fs::path dir_;
    json summary_;
};

const ArcSet& need_delta(const Config& cfg)
{
    if (!cfg.delta)
        throw SchemaError("$.delta", "missing; this command needs delta = [lo, hi]");
    return *cfg.delta;
}

std::vector<int> sizes_or_l(const Config& cfg) { return cfg.sizes.empty() ? std::vector<int>{cfg.L} : cfg.sizes; }

StateVector initial_state(const Config& cfg, const LatticeShape& shape, const char* block)
{
    int slot = 0;
    std::vector<int> site(shape.d, 0);
    if (cfg.raw.contains(block)) {
        const json& b = cfg.raw.at(block);
        const std::string path = std::string("$.") + block;
        if (b.contains("coin_slot"))
            slot = b.at("coin_slot").get<int>();
        if (b.contains("site")) {
            const json& s = b.at("site");
            if (!s.is_array() || static_cast<int>(s.size()) != shape.d)
                throw SchemaError(path + ".site", "expected d coordinates");
            for (int a = 0; a < shape.d; ++a)
                site[a] = s[a].get<int>();
        }
        if (slot < 0 || slot >= shape.coin_dim)
            throw SchemaError(path + ".coin_slot", "outside the coin space");
    }
    return StateVector::basis(shape, slot, shape.site_index(site));
}

int block_int(const Config& cfg, const char* block, const char* key, int fallback)
{
    if (!cfg.raw.contains(block) || !cfg.raw.at(block).contains(key))
        return fallback;
    const json& v = cfg.raw.at(block).at(key);
    if (!v.is_number_integer())
        throw SchemaError(std::string("$.") + block + "." + key, "expected an integer");
    return v.get<int>();
}

BandOptions band_options(const Config& cfg) { return BandOptions{cfg.tol.gap_tol, cfg.tol.grad_tol}; }

// ---------------------------------------------------------------- commands

void cmd_build(Run& run)
{
    const NetworkOperator u = build_model(run.cfg());
    auto f = run.csv("operator.csv");
    u.write_csv(f);
    json& s = run.summary();
    s["dimension"] = u.shape().dimension();
    s["nonzeros"] = u.nonzeros();
    s["bandwidth"] = u.bandwidth();
    s["unitarity_defect"] = u.unitarity_defect();
}

void cmd_bands(Run& run)
{
    const Config& cfg = run.cfg();
    const Symbol sym = model_symbol(cfg);
    const BandStructure bs = band_structure(sym, cfg.grid, band_options(cfg));
    auto f = run.csv("bands.csv");
    for (int a = 0; a < bs.d; ++a)
        f << "x" << a + 1 << ",";
    for (int k = 0; k < bs.dprime; ++k)
        f << "theta" << k << ",";
    for (int k = 0; k < bs.dprime; ++k)
        f << "grad" << k << (k + 1 < bs.dprime ? "," : "\n");
    for (long p = 0; p < bs.points(); ++p) {
        for (double x : bs.x(p))
            f << x << ",";
        for (int k = 0; k < bs.dprime; ++k)
            f << bs.phase(p, k) << ",";
        for (int k = 0; k < bs.dprime; ++k)
            f << std::sqrt(bs.grad_norm2(p, k)) << (k + 1 < bs.dprime ? "," : "\n");
    }
    json& s = run.summary();
    s["grid"] = cfg.grid;
    s["symbol"] = sym.name();
    s["arcs"] = arcs_json(bs.bands);
    s["tau_m"] = bs.tau_m;
    s["max_grad"] = bs.max_grad;
    if (cfg.delta) {
        const MGoodCertificate c = is_m_good(*cfg.delta, bs);
        s["delta"] = {{"arcs", arcs_json(*cfg.delta)},
                      {"m_good", c.pass},
                      {"c_delta", c.pass ? json(c.c_delta) : json(nullptr)},
                      {"reason", c.reason},
                      {"offending", c.offending}};
    }
}

void cmd_tau(Run& run)
{
    const Config& cfg = run.cfg();
    const BandStructure bs = band_structure(model_symbol(cfg), cfg.grid, band_options(cfg));
    auto f = run.csv("tau.csv");
    f << "kind,point,band_a,band_b,phase\n";
    for (const Crossing& c : bs.crossings)
        f << "crossing," << c.point << "," << c.band_a << "," << c.band_b << "," << c.phase << "\n";
    for (const Critical& c : bs.criticals)
        f << "critical," << c.point << "," << c.band << ",," << c.phase << "\n";
    json& s = run.summary();
    s["grid"] = cfg.grid;
    s["tau_m"] = bs.tau_m;
    s["crossings"] = bs.crossings.size();
    s["criticals"] = bs.criticals.size();
    s["resolution"] = bs.step() * bs.max_grad;
}

void cmd_verify(Run& run)
{
    const Config& cfg = run.cfg();
    std::string relation = run.opt().relation;
    const json vb = cfg.raw.contains("verify") ? cfg.raw.at("verify") : json::object();
    if (relation.empty() && vb.contains("relation"))
        relation = vb.at("relation").get<std::string>();
    if (relation.empty())
        throw SchemaError("$.verify.relation", "missing; pass --relation or set it in the config");
    const int instances = block_int(cfg, "verify", "instances", 1);
    const std::uint64_t seed = static_cast<std::uint64_t>(block_int(cfg, "verify", "seed", 1));
    const bool random = vb.contains("random") && vb.at("random").get<bool>();
    if (instances < 1)
        throw SchemaError("$.verify.instances", "need at least 1");

    Residual worst;
    worst.value = -1.0;
    json per = json::array();
    for (int i = 0; i < instances; ++i) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        Residual r;
        if (relation == "cc-qw") {
            if (cfg.kind != ModelKind::Cc)
                throw SchemaError("$.model.kind", "cc-qw needs a cc model");
            const double phi = cfg.model().at("phi").get<double>();
            r = verify_cc(random ? random_cc_params(phi, cfg.L, s) : cc_params(cfg, cfg.L));
        } else if (relation == "qw-bb") {
            if (cfg.kind != ModelKind::Qw || cfg.d != 1)
                throw SchemaError("$.model.kind", "qw-bb needs a 1-d qw model");
            r = verify_qw_bb(random ? random_qw_params(cfg.L, s) : qw_params(cfg, cfg.L));
        } else if (relation == "qw2-bb") {
            if (cfg.kind != ModelKind::Bb)
                throw SchemaError("$.model.kind", "qw2-bb needs a bb model");
            r = bb_to_qw_square(random ? random_bb_params(cfg.L, s, false) : bb_params(cfg, cfg.L)).residual;
        } else if (relation == "gauge") {
            if (cfg.kind != ModelKind::Bb)
                throw SchemaError("$.model.kind", "gauge needs a bb model");
            r = gauge_transform(random ? random_bb_params(cfg.L, s, true) : bb_params(cfg, cfg.L)).residual;
        } else if (relation == "cmv-bb") {
            if (cfg.kind != ModelKind::Cmv)
                throw SchemaError("$.model.kind", "cmv-bb needs a cmv model");
            const VerblunskiSeq seq = verblunski(cfg, cfg.L);
            r = residual_norm(build_cmv(seq).dense() - build_bb(cmv_to_bb(seq)).dense());
        } else {
            throw SchemaError("$.verify.relation", "expected cc-qw, qw-bb, qw2-bb, gauge or cmv-bb");
        }
        per.push_back(r.value);
        if (r.value > worst.value)
            worst = r;
    }
    const json report = {{"relation", relation},
                         {"dimension", worst.dimension},
                         {"residual", worst.value},
                         {"norm_kind", worst.norm_kind},
                         {"pass", worst.value <= cfg.tol.residual},
                         {"instances", per}};
    auto f = run.csv("verify.json");
    f << report.dump(2) << "\n";
    run.summary()["verify"] = report;
}

void cmd_mourre(Run& run)
{
    const Config& cfg = run.cfg();
    const ArcSet& delta = need_delta(cfg);
    const Symbol sym = model_symbol(cfg);
    json results = json::array();
    for (int L : sizes_or_l(cfg)) {
        const NetworkOperator u = build_model(cfg, L);
        const ConjugateOperator a = build_conjugate(sym, delta, u.shape());
        const MourreResult r = mourre_check(u, a, delta);
        auto f = run.csv("commutator_spectrum_L" + std::to_string(L) + ".csv");
        f << "index,eigenvalue\n";
        for (long i = 0; i < r.spectrum.size(); ++i)
            f << i << "," << r.spectrum[i] << "\n";
        results.push_back({{"L", L},
                           {"c_delta", r.c_delta},
                           {"lambda_min", r.lambda_min},
                           {"margin", r.margin},
                           {"cutoff_tail", r.tail},
                           {"resolution", r.resolution},
                           {"window_dim", r.window_dim},
                           {"transition_cells", a.transition_cells},
                           {"boxes", a.certificate.boxes.size()},
                           {"symmetry_defect", a.symmetry_defect},
                           {"pass", r.pass}});
    }
    json& s = run.summary();
    s["delta"] = arcs_json(delta);
    s["results"] = results;
    bool pass = true;
    for (const json& r : results)
        pass = pass && r.at("pass").get<bool>();
    s["pass"] = pass;
}

void cmd_evolve(Run& run)
{
    const Config& cfg = run.cfg();
    const NetworkOperator u = build_model(cfg);
    const int steps = block_int(cfg, "evolve", "steps", cfg.L / 2 - 2);
    const Trajectory tr = evolve(u, initial_state(cfg, u.shape(), "evolve"), steps);
    auto f = run.csv("trajectory.csv");
    f << "t,";
    for (int a = 0; a < u.shape().d; ++a)
        f << "mean_x" << a + 1 << ",";
    f << "x2,norm\n";
    double norm_dev = 0.0;
    for (int t = 0; t <= tr.steps; ++t) {
        f << t << ",";
        for (double m : tr.mean[t])
            f << m << ",";
        f << tr.second_moment[t] << "," << tr.norm[t] << "\n";
        norm_dev = std::max(norm_dev, std::abs(tr.norm[t] - 1.0));
    }
    json& s = run.summary();
    s["steps"] = steps;
    s["center_site"] = tr.center;
    s["norm_deviation"] = norm_dev;
    s["x2_final"] = tr.second_moment.back();
    try {
        s["spreading_exponent"] = spreading_exponent(tr);
    } catch (const NumericalError& e) {
        s["spreading_exponent"] = nullptr;
        s["spreading_note"] = e.what();
    }
}

void cmd_spectrum(Run& run)
{
    const Config& cfg = run.cfg();
    const NetworkOperator u = build_model(cfg);
    const int n_max = block_int(cfg, "spectrum", "n_max", u.shape().L / 2 - 1);
    const int points = block_int(cfg, "spectrum", "points", 1024);
    const SpectralDensity rho = spectral_measure_estimate(u, initial_state(cfg, u.shape(), "spectrum"), n_max, points);
    auto f = run.csv("density.csv");
    f << "theta,density\n";
    for (std::size_t p = 0; p < rho.theta.size(); ++p)
        f << rho.theta[p] << "," << rho.density[p] << "\n";
    json& s = run.summary();
    s["n_max"] = n_max;
    s["mass"] = rho.mass;
    s["min_density"] = *std::min_element(rho.density.begin(), rho.density.end());
    if (cfg.kind == ModelKind::Qw || cfg.kind == ModelKind::Cc) {
        if (!cfg.model().contains("coins") && !cfg.model().contains("random_coins")) {
            const BandStructure bs = band_structure(model_symbol(cfg), cfg.grid, band_options(cfg));
            s["mass_in_bands"] = mass_inside(rho, bs.bands);
        }
    }
}

void cmd_stability(Run& run)
{
    const Config& cfg = run.cfg();
    const ArcSet& delta = need_delta(cfg);
    if (!cfg.delta_prime)
        throw SchemaError("$.delta_prime", "missing; stability needs delta_prime = [lo, hi]");
    const StabilityReport rep = eigenvalue_stability([&](int L) { return build_model(cfg, L); }, model_symbol(cfg),
                                                     delta, *cfg.delta_prime, sizes_or_l(cfg));
    auto f = run.csv("isolated.csv");
    f << "L,phase\n";
    for (std::size_t i = 0; i < rep.L.size(); ++i)
        for (double ph : rep.isolated[i])
            f << rep.L[i] << "," << ph << "\n";
    json& s = run.summary();
    s["L"] = rep.L;
    s["counts"] = rep.counts;
    s["stable"] = rep.stable;
}

} // namespace

int main(int argc, char** argv)
{
    if (const char* env = std::getenv("NETMODELS_THREADS"))
        set_worker_threads(std::atoi(env));

    CLI::App app{"Unitary network models: construction, equivalences, bands, Mourre checks, dynamics"};
    app.require_subcommand(1);
    Options opt;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"build", "assemble the operator and export it as CSV"},
        {"bands", "band structure of the homogeneous symbol"},
        {"tau", "crossings, critical points and tau_M"},
        {"verify", "check a unitary equivalence"},
        {"mourre", "compressed-commutator positivity on Delta"},
        {"evolve", "time evolution and position moments"},
        {"spectrum", "Fejer-smoothed spectral density of a local state"},
        {"stability", "isolated eigenvalue counts across truncations"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--grid", opt.grid, "band grid N");
        sub->add_option("--truncation", opt.truncation, "lattice side L");
        sub->add_option("--gap-tol", opt.gap_tol, "crossing tolerance");
        sub->add_option("--grad-tol", opt.grad_tol, "critical point tolerance");
        sub->add_option("--residual-tol", opt.residual_tol, "verify pass threshold");
        if (name == "verify")
            sub->add_option("--relation", opt.relation, "cc-qw, qw-bb, qw2-bb, gauge or cmv-bb");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // usage problems (missing or unreadable config) are schema-level errors
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        Config cfg = load_config(opt.config);
        if (opt.truncation != 0) {
            if (opt.truncation < 4 || opt.truncation % 2 != 0)
                throw SchemaError("--truncation", "need an even side >= 4");
            cfg.L = opt.truncation;
        }
        if (opt.grid != 0) {
            if (opt.grid < 4)
                throw SchemaError("--grid", "need grid >= 4");
            cfg.grid = opt.grid;
        }
        if (opt.gap_tol)
            cfg.tol.gap_tol = *opt.gap_tol;
        if (opt.grad_tol)
            cfg.tol.grad_tol = *opt.grad_tol;
        if (opt.residual_tol)
            cfg.tol.residual = *opt.residual_tol;

        Run run(opt, std::move(cfg), command);
        if (command == "build")
            cmd_build(run);
        else if (command == "bands")
            cmd_bands(run);
        else if (command == "tau")
            cmd_tau(run);
        else if (command == "verify")
            cmd_verify(run);
        else if (command == "mourre")
            cmd_mourre(run);
        else if (command == "evolve")
            cmd_evolve(run);
        else if (command == "spectrum")
            cmd_spectrum(run);
        else if (command == "stability")
            cmd_stability(run);
        run.finish();
        return 0;
    } catch (const SchemaError& e) {
        std::cerr << "config error at " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
