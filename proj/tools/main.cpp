// Batch front-end for the CRIO simulation library.
//
// Subcommands: protocol-run, sweep-fe, gate-sim, avg-fidelity.
// Config files use a flat key = value grammar with one optional [section]
// per command; see README for the full key list. Exit codes: 0 success,
// 2 config error, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "crio/cavity.hpp"
#include "crio/linalg.hpp"
#include "crio/master_equation.hpp"
#include "crio/protocol.hpp"
#include "crio/rydberg.hpp"

using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Config parsing: flat key = value lines, '#' comments, optional [command]
// section headers. Only the section matching the active command is read;
// sectionless keys apply to any command.

using Config = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Config parse_config(std::istream& in, const std::string& command) {
    Config cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw crio::InvalidInput("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        if (!section.empty() && section != command) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw crio::InvalidInput("config line " + std::to_string(lineno) +
                                     ": empty key");
        if (cfg.count(key))
            throw crio::InvalidInput("config: duplicate key " + key);
        cfg[key] = value;
    }
    return cfg;
}

Config load_config(const std::string& path, const std::string& command) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw crio::InvalidInput("config: cannot open " + path);
    return parse_config(in, command);
}

void reject_unknown(const Config& cfg, const std::set<std::string>& known) {
    for (const auto& [k, v] : cfg) {
        if (!known.count(k))
            throw crio::InvalidInput("config: unknown key " + k);
    }
}

std::string normalized_echo(const Config& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg) out += k + " = " + v + "\n";
    return out;
}

double to_double(const Config& cfg, const std::string& key, double fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    try {
        size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw crio::InvalidInput("config: key " + key +
                                 " is not a number: " + it->second);
    }
}

int to_int(const Config& cfg, const std::string& key, int fallback) {
    const double v = to_double(cfg, key, fallback);
    const int i = static_cast<int>(v);
    if (v != i) throw crio::InvalidInput("config: key " + key + " must be integer");
    return i;
}

bool to_bool(const Config& cfg, const std::string& key, bool fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    if (it->second == "true" || it->second == "on" || it->second == "1")
        return true;
    if (it->second == "false" || it->second == "off" || it->second == "0")
        return false;
    throw crio::InvalidInput("config: key " + key + " must be a boolean");
}

std::vector<double> to_list(const Config& cfg, const std::string& key,
                            std::vector<double> fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw crio::InvalidInput("config: key " + key +
                                     " has a non-numeric entry: " + tok);
        }
    }
    if (out.empty())
        throw crio::InvalidInput("config: key " + key + " is an empty list");
    return out;
}

// ---------------------------------------------------------------------------
// Atomic output.

void atomic_write(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

std::string fixed6(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(6) << v;
    return ss.str();
}

// ---------------------------------------------------------------------------
// Shared option plumbing.

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    unsigned long long seed = 0;
    double tol = 0.0;  // 0 -> module default
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "Config file path");
    cmd->add_option("--out", o.out_path, "Output file path (default stdout)");
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", o.seed, "Random seed (reserved, echoed)");
    cmd->add_option("--tol", o.tol, "Integrator relative tolerance");
}

crio::IntegratorOptions integrator_for(const CommonOpts& o, const Config& cfg) {
    crio::IntegratorOptions opt = crio::gate_integrator();
    if (o.tol > 0.0) {
        opt.rtol = o.tol;
        opt.atol = o.tol * 1e-2;
    }
    opt.n_samples = to_int(cfg, "n_samples", opt.n_samples);
    if (opt.n_samples < 2)
        throw crio::InvalidInput("config: n_samples must be >= 2");
    return opt;
}

void emit_envelope(const std::string& command, const Config& cfg,
                   const CommonOpts& o, double wall_s) {
    json env;
    env["artifact_version"] = kVersion;
    env["command"] = command;
    env["config"] = normalized_echo(cfg);
    env["format"] = o.format;
    env["payload_path"] = o.out_path.empty() ? "-" : o.out_path;
    env["seed"] = o.seed;
    env["wall_time_s"] = wall_s;
    std::cerr << env.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// protocol-run

int run_protocol(const CommonOpts& o) {
    Config cfg = load_config(o.config_path, "protocol-run");
    reject_unknown(cfg, {"n_parties", "alphas", "axis_thetas", "axis_phis",
                         "target_thetas", "target_phis", "alice_participates",
                         "transcript_out"});
    crio::CrioConfig pc;
    pc.n_parties = to_int(cfg, "n_parties", 3);
    const int nch = (pc.n_parties - 1) / 2;
    auto alphas = to_list(cfg, "alphas", std::vector<double>(nch, 0.0));
    auto athetas = to_list(cfg, "axis_thetas", std::vector<double>(nch, 0.0));
    auto aphis = to_list(cfg, "axis_phis", std::vector<double>(nch, 0.0));
    auto tthetas = to_list(cfg, "target_thetas", std::vector<double>(nch, 0.0));
    auto tphis = to_list(cfg, "target_phis", std::vector<double>(nch, 0.0));
    for (const auto* lst : {&alphas, &athetas, &aphis, &tthetas, &tphis}) {
        if (static_cast<int>(lst->size()) != nch)
            throw crio::InvalidInput(
                "config: protocol lists must have one entry per channel");
    }
    pc.alphas = alphas;
    for (int j = 0; j < nch; ++j) {
        pc.axes.push_back({athetas[j], aphis[j]});
        const double t = tthetas[j], p = tphis[j];
        pc.targets.push_back(crio::StateVector::qubit(
            std::cos(t / 2.0),
            crio::Complex(std::cos(p), std::sin(p)) * std::sin(t / 2.0)));
    }
    pc.alice_participates = to_bool(cfg, "alice_participates", true);

    const crio::CrioResult res = crio::run_crio(pc);

    if (cfg.count("transcript_out")) {
        std::ostringstream tr;
        res.transcript.write_jsonl(tr);
        atomic_write(cfg.at("transcript_out"), tr.str());
    }

    std::string payload;
    if (o.format == "csv") {
        std::ostringstream out;
        out << "branch,prob,fidelity\n";
        for (const auto& b : res.branches) {
            double fmin = 1.0;
            for (double f : b.fidelities) fmin = std::min(fmin, f);
            out << b.label << ',' << fixed6(b.prob) << ',' << fixed6(fmin)
                << '\n';
        }
        payload = out.str();
    } else {
        json j;
        j["branches"] = json::array();
        for (const auto& b : res.branches) {
            json bj;
            bj["fidelities"] = b.fidelities;
            bj["label"] = b.label;
            bj["prob"] = b.prob;
            j["branches"].push_back(bj);
        }
        j["n_parties"] = pc.n_parties;
        j["transcript_events"] = res.transcript.events().size();
        payload = j.dump(2) + "\n";
    }
    atomic_write(o.out_path, payload);
    return 0;
}

// ---------------------------------------------------------------------------
// sweep-fe

int run_sweep_fe(const CommonOpts& o) {
    Config cfg = load_config(o.config_path, "sweep-fe");
    reject_unknown(cfg, {"kappa_list", "gamma_list", "omega"});
    const auto kappas = to_list(cfg, "kappa_list", {1.0, 2.0});
    const auto gammas = to_list(cfg, "gamma_list", {0.1, 0.2});
    const double omega = to_double(cfg, "omega", 0.0);
    for (double k : kappas)
        if (k < 0) throw crio::InvalidInput("config: kappa_list must be >= 0");
    for (double g : gammas)
        if (g < 0) throw crio::InvalidInput("config: gamma_list must be >= 0");

    const auto rows = crio::fe_sweep(kappas, gammas, omega);
    std::string payload;
    if (o.format == "csv") {
        std::ostringstream out;
        crio::write_fe_csv(out, rows);
        payload = out.str();
    } else {
        json j;
        j["rows"] = json::array();
        for (const auto& r : rows) {
            json rj;
            rj["E"] = r.fe.E;
            rj["F"] = r.fe.F;
            rj["N"] = r.fe.N;
            rj["gamma_over_g"] = r.gamma_over_g;
            rj["kappa_over_g"] = r.kappa_over_g;
            rj["omega_over_g"] = r.omega_over_g;
            j["rows"].push_back(rj);
        }
        payload = j.dump(2) + "\n";
    }
    atomic_write(o.out_path, payload);
    return 0;
}

// ---------------------------------------------------------------------------
// gate-sim / avg-fidelity shared physics setup

struct GateSetup {
    crio::DrivingParams params;
    crio::NoiseParams noise;
    bool noisy = true;
    crio::GateMode mode = crio::GateMode::FullResonant;
    double theta = kPi / 2.0;
    double phi = kPi;
    double delta = 0.0;  // dynamical detuning (rad/us)
};

GateSetup gate_setup(const Config& cfg) {
    GateSetup s;
    s.mode = crio::gate_mode_from_string(
        cfg.count("mode") ? cfg.at("mode") : "FullResonant");
    s.theta = to_double(cfg, "theta", kPi / 2.0);
    s.phi = to_double(cfg, "phi", kPi);

    const crio::DrivingParams base = crio::DrivingParams::operating_point(0.0);
    const double omega = base.base_unit;
    const bool dynamical = (s.mode == crio::GateMode::EffectiveDynamical ||
                            s.mode == crio::GateMode::FullDynamical);
    s.delta = to_double(cfg, "delta", dynamical ? 0.336 * omega : 0.0);

    double v0;
    if (cfg.count("v0")) {
        v0 = to_double(cfg, "v0", 0.0);
        if (cfg.count("delta")) {
            // Reconcile delta = v0 + Delta_RR when both are pinned.
            crio::DrivingParams probe =
                crio::DrivingParams::for_angles(s.theta, s.phi, v0);
            const auto e = crio::effective_couplings(probe);
            if (std::abs(s.delta - e.delta) > 1e-9 * omega)
                throw crio::InvalidInput(
                    "config: delta and v0 disagree (delta != v0 + Delta_RR)");
        }
    } else if (dynamical) {
        v0 = crio::solve_dynamical_v0(s.delta, omega, base.delta0, base.delta1,
                                      base.delta2);
    } else {
        v0 = crio::solve_resonant_v0(omega, base.delta0, base.delta1,
                                     base.delta2);
    }
    s.params = crio::DrivingParams::for_angles(s.theta, s.phi, v0);

    s.noisy = to_bool(cfg, "noise", true);
    const double tau = to_double(cfg, "tau", 400.0);
    if (tau <= 0) throw crio::InvalidInput("config: tau must be positive");
    s.noise = crio::NoiseParams::lifetime(tau);
    s.noise.gamma0 = to_double(cfg, "gamma0", s.noise.gamma0);
    s.noise.gamma1 = to_double(cfg, "gamma1", s.noise.gamma1);
    s.noise.kappa_c = to_double(cfg, "kappa_c", s.noise.kappa_c);
    s.noise.kappa_t = to_double(cfg, "kappa_t", s.noise.kappa_t);
    for (double r : {s.noise.gamma0, s.noise.gamma1, s.noise.kappa_c,
                     s.noise.kappa_t}) {
        if (r < 0) throw crio::InvalidInput("config: noise rates must be >= 0");
    }
    return s;
}

json params_json(const GateSetup& s) {
    json p;
    p["delta"] = s.delta;
    p["delta0"] = s.params.delta0;
    p["delta1"] = s.params.delta1;
    p["delta2"] = s.params.delta2;
    p["gamma0"] = s.noisy ? s.noise.gamma0 : 0.0;
    p["gamma1"] = s.noisy ? s.noise.gamma1 : 0.0;
    p["kappa_c"] = s.noisy ? s.noise.kappa_c : 0.0;
    p["kappa_t"] = s.noisy ? s.noise.kappa_t : 0.0;
    p["omega"] = s.params.base_unit;
    p["phi"] = s.phi;
    p["tau"] = s.noise.tau;
    p["theta"] = s.theta;
    p["v0"] = s.params.v0;
    return p;
}

crio::StateVector default_psi0() {
    // (|0> + sqrt(2)|1>)/sqrt(3) (x) (sqrt(3)|0> + |1>)/2
    const crio::StateVector c =
        crio::StateVector::qubit(1.0 / std::sqrt(3.0), std::sqrt(2.0 / 3.0));
    const crio::StateVector t =
        crio::StateVector::qubit(std::sqrt(3.0) / 2.0, 0.5);
    return crio::kron(c, t);
}

int run_gate_sim(const CommonOpts& o) {
    Config cfg = load_config(o.config_path, "gate-sim");
    reject_unknown(cfg, {"mode", "theta", "phi", "v0", "delta", "noise", "tau",
                         "gamma0", "gamma1", "kappa_c", "kappa_t", "n_samples",
                         "beta1", "beta2", "beta3", "beta4", "beta5", "beta6"});
    const GateSetup s = gate_setup(cfg);
    const crio::IntegratorOptions opt = integrator_for(o, cfg);

    crio::StateVector psi0 = default_psi0();
    if (cfg.count("beta1") || cfg.count("beta2") || cfg.count("beta3") ||
        cfg.count("beta4") || cfg.count("beta5") || cfg.count("beta6")) {
        crio::InputStateParams ip;
        ip.beta1 = to_double(cfg, "beta1", 0.0);
        ip.beta2 = to_double(cfg, "beta2", 0.0);
        ip.beta3 = to_double(cfg, "beta3", 0.0);
        ip.beta4 = to_double(cfg, "beta4", 0.0);
        ip.beta5 = to_double(cfg, "beta5", 0.0);
        ip.beta6 = to_double(cfg, "beta6", 0.0);
        psi0 = crio::input_state(ip);
    }

    const crio::GateResult res = crio::simulate_gate(
        s.params, s.noisy ? &s.noise : nullptr, s.mode, psi0, opt);

    std::string payload;
    if (o.format == "json") {
        json j;
        j["T_us"] = res.t_gate;
        j["fidelity"] = res.fidelity;
        j["max_pRR"] = res.max_p_rr;
        j["mode"] = crio::to_string(res.mode);
        j["params"] = params_json(s);
        payload = j.dump(2) + "\n";
    } else {
        std::ostringstream out;
        out << "t_us,p00,p01,p10,p11,pRR,fidelity\n";
        const auto& obs = res.traj.observables;
        for (size_t i = 0; i < res.traj.times.size(); ++i) {
            out << fixed6(res.traj.times[i]) << ','
                << fixed6(obs.at("p00")[i]) << ',' << fixed6(obs.at("p01")[i])
                << ',' << fixed6(obs.at("p10")[i]) << ','
                << fixed6(obs.at("p11")[i]) << ',' << fixed6(obs.at("pRR")[i])
                << ',' << fixed6(obs.at("fidelity")[i]) << '\n';
        }
        payload = out.str();
    }
    atomic_write(o.out_path, payload);
    return 0;
}

int run_avg_fidelity(const CommonOpts& o) {
    Config cfg = load_config(o.config_path, "avg-fidelity");
    reject_unknown(cfg, {"kind", "mode", "theta", "phi", "v0", "delta", "noise",
                         "tau", "gamma0", "gamma1", "kappa_c", "kappa_t",
                         "n_samples", "n_theta", "n_phi", "n_linear",
                         "n_phase"});
    const GateSetup s = gate_setup(cfg);
    crio::IntegratorOptions opt = integrator_for(o, cfg);
    const std::string kind = cfg.count("kind") ? cfg.at("kind") : "angles";

    double avg;
    if (kind == "angles") {
        crio::AngleGrid grid;
        grid.n_theta = to_int(cfg, "n_theta", grid.n_theta);
        grid.n_phi = to_int(cfg, "n_phi", grid.n_phi);
        avg = crio::average_fidelity_angles(
            s.params, s.noisy ? &s.noise : nullptr, s.mode, default_psi0(),
            grid, opt);
    } else if (kind == "inputs") {
        crio::InputGrid grid;
        grid.n_linear = to_int(cfg, "n_linear", grid.n_linear);
        grid.n_phase = to_int(cfg, "n_phase", grid.n_phase);
        avg = crio::average_fidelity_inputs(s.params,
                                            s.noisy ? &s.noise : nullptr,
                                            s.mode, s.theta, s.phi, grid, opt);
    } else {
        throw crio::InvalidInput("config: kind must be angles or inputs");
    }

    std::string payload;
    if (o.format == "json") {
        json j;
        j["average_fidelity"] = avg;
        j["kind"] = kind;
        j["mode"] = crio::to_string(s.mode);
        j["params"] = params_json(s);
        payload = j.dump(2) + "\n";
    } else {
        std::ostringstream out;
        out << "kind,mode,average_fidelity\n"
            << kind << ',' << crio::to_string(s.mode) << ',' << fixed6(avg)
            << '\n';
        payload = out.str();
    }
    atomic_write(o.out_path, payload);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CRIO protocol simulation batch CLI"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string active;
    for (const char* name :
         {"protocol-run", "sweep-fe", "gate-sim", "avg-fidelity"}) {
        CLI::App* cmd = app.add_subcommand(name);
        add_common(cmd, opts);
        cmd->callback([&active, name] { active = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const auto start = std::chrono::steady_clock::now();
    int rc = 0;
    Config echo_cfg;
    try {
        echo_cfg = load_config(opts.config_path, active);
        if (active == "protocol-run") rc = run_protocol(opts);
        else if (active == "sweep-fe") rc = run_sweep_fe(opts);
        else if (active == "gate-sim") rc = run_gate_sim(opts);
        else rc = run_avg_fidelity(opts);
    } catch (const crio::InvalidInput& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const crio::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    emit_envelope(active, echo_cfg, opts, wall);
    return rc;
}
