// wwlab: command-line front end for the normal-form lab.
// Exit codes: 0 success, 2 resonance or small-divisor abort, 1 anything else.

#include <CLI11.hpp>

#include <bnf/darboux.hpp>
#include <bnf/drift.hpp>
#include <bnf/io.hpp>

#include <filesystem>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace bnf;
using nlohmann::json;

namespace {

// flag name → config key
const std::map<std::string, std::string> kFlags = {
    {"--out", "out"},         {"--kappa", "kappa"},   {"--grid", "grid"},   {"--order", "order"},
    {"--box", "box"},         {"--eps", "eps"},       {"--horizon", "horizon"}, {"--dt", "dt"},
    {"--tau-list", "tau_list"}, {"--threshold", "threshold"}, {"--model", "model"}, {"--seed", "seed"},
};

struct Invocation {
    std::string config;
    std::map<std::string, std::string> overrides;
};

RunConfig resolve(const Invocation& inv) {
    RunConfig c = load_config(inv.config);
    for (const auto& [key, value] : inv.overrides)
        if (!value.empty()) set_key(c, key, value);
    c.validate();
    return c;
}

fs::path out_dir(const RunConfig& c) {
    fs::create_directories(c.out);
    return c.out;
}

json index_json(const MultiIndex& m) {
    json a = json::array();
    for (const auto& e : m.entries()) a.push_back({e.mode, e.alpha, e.beta});
    return a;
}

PolyHamiltonian model_hamiltonian(const RunConfig& c) {
    if (!c.model.empty()) {
        PolyHamiltonian H = load_hamiltonian(c.model);
        if (H.box().J != c.J) throw ConfigError("model box differs from config box");
        return H;
    }
    return build_model(c.params, c.J).hamiltonian;
}

double threshold_for(const RunConfig& c, const PolyHamiltonian& H) {
    return c.threshold ? *c.threshold : default_threshold(Frequencies(H));
}

int cmd_scan(const RunConfig& c) {
    const auto kappas = c.grid.points();
    const fs::path dir = out_dir(c);
    std::ofstream csv(dir / "scan.csv");
    csv << "kappa,tau,nu,worst_divisor,worst_index\n";
    json res = json::array();
    for (double tau : c.tau) {
        const auto certs = scan(c.params, kappas, c.certificate_degree(), c.J, tau);
        int positive = 0;
        for (const auto& ct : certs) {
            positive += ct.nu > 0;
            csv << detail::fmt(ct.kappa) << "," << detail::fmt(tau) << "," << detail::fmt(ct.nu) << ","
                << detail::fmt(ct.worst.divisor) << "," << describe(ct.worst.index) << "\n";
        }
        const double frac = double(positive) / certs.size();
        res.push_back({{"tau", tau}, {"points", certs.size()}, {"positive_fraction", frac}});
        std::cout << "tau " << tau << ": nu > 0 on " << positive << "/" << certs.size() << " grid points\n";
    }
    json m = manifest("scan", c);
    m["results"] = res;
    write_json(dir / "scan.json", m);
    return 0;
}

int cmd_certify(const RunConfig& c) {
    const fs::path dir = out_dir(c);
    json res = json::array();
    bool resonant = false;
    for (double tau : c.tau) {
        const Certificate ct = certify(c.params, c.certificate_degree(), c.J, tau);
        res.push_back({{"tau", tau}, {"nu", ct.nu}, {"worst_divisor", ct.worst.divisor},
                       {"worst_index", index_json(ct.worst.index)}});
        std::cout << "tau " << tau << ": nu = " << ct.nu << ", worst index " << describe(ct.worst.index)
                  << " divisor " << ct.worst.divisor << "\n";
        if (!(ct.nu > 0)) {
            std::cerr << "resonant index " << describe(ct.worst.index) << "\n";
            resonant = true;
        }
    }
    json m = manifest("certify", c);
    m["results"] = res;
    m["resonant"] = resonant;
    write_json(dir / "certificate.json", m);
    return resonant ? 2 : 0;
}

int cmd_build_model(const RunConfig& c) {
    const fs::path dir = out_dir(c);
    const TruncatedModel model = build_model(c.params, c.J);
    save_hamiltonian(dir / "model.ham", model.hamiltonian);
    json m = manifest("build-model", c);
    m["terms"] = model.hamiltonian.size();
    m["provenance"] = model.provenance;
    write_json(dir / "model.json", m);
    std::cout << "model with " << model.hamiltonian.size() << " terms written to " << (dir / "model.ham") << "\n";
    return 0;
}

int cmd_normal_form(const RunConfig& c) {
    const fs::path dir = out_dir(c);
    const PolyHamiltonian H = model_hamiltonian(c);
    const NormalFormResult r = normal_form(H, c.N, threshold_for(c, H));
    save_hamiltonian(dir / "normal_form.ham", r.H);
    save_plurimap(dir / "map.pmap", r.map);
    for (size_t k = 0; k < r.generators.size(); ++k)
        save_hamiltonian(dir / ("generator_" + std::to_string(k + 1) + ".ham"), r.generators[k]);
    const SapReport sap = verify_sap(r);
    json m = manifest("normal-form", c);
    m["threshold"] = r.threshold;
    m["min_divisors"] = r.min_divisors;
    m["dropped"] = r.dropped;
    m["max_non_sap"] = sap.max_non_sap;
    m["max_bracket"] = sap.max_bracket;
    write_json(dir / "normal_form.json", m);
    std::cout << "normal form to order " << c.N << ": " << r.H.size() << " terms, max non-SAP "
              << sap.max_non_sap << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& c) {
    const fs::path dir = out_dir(c);
    const PolyHamiltonian H = model_hamiltonian(c);
    IntegratorOptions io;
    io.sample_every = c.sample_every;
    const Midpoint mp(H, io);
    const double dt = c.dt.value_or(0.25 / mp.max_frequency());
    const double T = c.horizon.value_or(50.0 / std::abs(omega(c.params, 1)));
    const TrajectoryLog log = mp.integrate(drift_initial_state(H.box(), c.seed, c.eps.front()), dt, T);
    std::ofstream csv(dir / "trajectory.csv");
    write_trajectory_csv(csv, H.box(), log);
    json m = manifest("simulate", c);
    m["dt"] = dt;
    m["horizon"] = T;
    m["samples"] = log.size();
    m["energy_drift"] = energy_drift(log);
    m["momentum_drift"] = momentum_drift(log);
    m["superaction_drift"] = superaction_drift(log);
    write_json(dir / "simulate.json", m);
    std::cout << log.size() << " samples, superaction drift " << superaction_drift(log) << "\n";
    return 0;
}

int cmd_drift(const RunConfig& c) {
    const fs::path dir = out_dir(c);
    TruncatedModel model{c.params, Box{c.J}, model_hamiltonian(c), {}};
    DriftOptions o;
    o.dt = c.dt.value_or(0);
    o.horizon = c.horizon.value_or(0);
    o.seed = c.seed;
    o.tau = c.tau.front();
    o.threshold = c.threshold.value_or(-1);
    std::ofstream csv(dir / "drift.csv");
    csv << "eps,pre,post\n";
    json res = json::array();
    for (double eps : c.eps) {
        const DriftReport r = drift_experiment(model, c.N, eps, o);
        for (const auto* run : {&r.full, &r.half})
            csv << detail::fmt(run->eps) << "," << detail::fmt(run->pre) << "," << detail::fmt(run->post) << "\n";
        res.push_back({{"eps", eps},
                       {"pre", {r.full.pre, r.half.pre}},
                       {"post", {r.full.post, r.half.post}},
                       {"ratio_pre", r.ratio_pre()},
                       {"ratio_post", r.ratio_post()},
                       {"expected_pre", r.expected_pre()},
                       {"expected_post", r.expected_post()},
                       {"dt", r.dt},
                       {"horizon", r.horizon}});
        std::cout << "eps " << eps << ": pre ratio " << r.ratio_pre() << " (expect " << r.expected_pre()
                  << "), post ratio " << r.ratio_post() << " (expect " << r.expected_post() << ")\n";
    }
    json m = manifest("drift", c);
    m["results"] = res;
    write_json(dir / "drift.json", m);
    return 0;
}

int cmd_darboux_check(const RunConfig& c) {
    const fs::path dir = out_dir(c);
    Rng rng(c.seed);
    const Box b{c.J};
    const int N = std::max(c.N, 1);
    DarbouxProblem P{PluriMap<Complex>::id_plus(random_linearly_symplectic(b, rng)), N};
    const SymplecticReport before = symplectic_up_to_N(P.B, N);
    const DarbouxSolution s = corrector(P);
    save_plurimap(dir / "input.pmap", P.B);
    save_plurimap(dir / "corrected.pmap", s.D);
    json m = manifest("darboux-check", c);
    m["input_residual"] = before.residual;
    m["corrected_residual"] = s.report.residual;
    m["equation_residual"] = s.equation_residual;
    m["stages"] = s.stages.size();
    m["ok"] = s.report.ok;
    write_json(dir / "darboux.json", m);
    std::cout << "symplectic residual " << before.residual << " -> " << s.report.residual << "\n";
    return s.report.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"water-wave Birkhoff normal form lab"};
    app.require_subcommand(1);
    Invocation inv;
    using Handler = int (*)(const RunConfig&);
    const std::vector<std::tuple<std::string, std::string, Handler>> cmds = {
        {"scan", "resonance scan over a kappa grid", cmd_scan},
        {"certify", "non-resonance certificate at one kappa", cmd_certify},
        {"build-model", "build and save the truncated model", cmd_build_model},
        {"normal-form", "Birkhoff normal form of the model", cmd_normal_form},
        {"simulate", "integrate the model and write the trajectory", cmd_simulate},
        {"drift", "super-action drift scaling experiment", cmd_drift},
        {"darboux-check", "Darboux corrector on a seeded random input", cmd_darboux_check},
    };
    std::map<std::string, Handler> handlers;
    for (const auto& [name, help, fn] : cmds) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", inv.config, "run configuration file")->required();
        for (const auto& [flag, key] : kFlags) sub->add_option(flag, inv.overrides[key], "overrides '" + key + "'");
        handlers[name] = fn;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    try {
        const RunConfig c = resolve(inv);
        return handlers.at(app.get_subcommands().front()->get_name())(c);
    } catch (const SmallDivisor& e) {
        std::cerr << "small divisor at index " << describe(e.index) << ": " << e.value << "\n";
        return 2;
    } catch (const CertificateFailure& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
