// Command-line surface: build model Hamiltonians, classify spectra, construct
// conserved observables, run drift and Floquet analyses.

#include <cmath>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "intertwiner/dynamics.hpp"
#include "intertwiner/intertwine.hpp"
#include "intertwiner/json_io.hpp"
#include "intertwiner/models.hpp"
#include "intertwiner/spectral.hpp"

using nlohmann::json;
using namespace intertwiner;

namespace {

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(out_path, j);
}

int run_analyze(const std::string& matrix_path, double tol, double cluster_tol,
                const std::string& out_path) {
    const CMatrix h = matrix_from_json(read_json_file(matrix_path));
    const SpectralData spec = eig_biorthogonal(h, tol);
    const DegeneracyReport report = classify_degeneracies(h, spec, cluster_tol);

    std::vector<Complex> eigs(spec.eigenvalues.data(),
                              spec.eigenvalues.data() + spec.eigenvalues.size());
    const auto syms = spectrum_symmetry(eigs, tol);

    json jeigs = json::array();
    for (Complex e : eigs) jeigs.push_back({e.real(), e.imag()});
    json jclusters = json::array();
    for (const auto& c : report.clusters) {
        json jc{{"value", {c.value.real(), c.value.imag()}},
                {"algebraic", c.algebraic},
                {"geometric", c.geometric},
                {"kind", to_string(c.kind)}};
        if (c.kind == DegeneracyKind::exceptional) jc["order"] = c.ep_order;
        jclusters.push_back(std::move(jc));
    }
    json jsyms = json::array();
    for (const auto& s : syms) jsyms.push_back(symmetry_to_json(s));

    emit(json{{"n", h.rows()},
              {"eigenvalues", std::move(jeigs)},
              {"clusters", std::move(jclusters)},
              {"symmetries", std::move(jsyms)},
              {"diagonalizable", spec.diagonalizable}},
         out_path);
    return 0;
}

CMatrix resolve_seed(const CMatrix& h, const Relation& rel, const json& input,
                     const std::string& seed_arg, double tol) {
    if (seed_arg != "auto") {
        const CMatrix s = matrix_from_json(read_json_file(seed_arg));
        if (verify_relation(s, h, rel) > std::max(tol, 1e-12))
            throw NoSymmetryError("seed file does not satisfy the relation");
        return s;
    }
    if (input.contains("seed")) {
        const CMatrix s = matrix_from_json(input["seed"]);
        if (verify_relation(s, h, rel) <= std::max(tol, 1e-12)) return s;
    }
    const IntertwinerSet fallback = solve_relation(h, rel, tol);
    if (fallback.etas.empty())
        throw NoSymmetryError("no seed found: the relation has no Hermitian solutions");
    return fallback.etas.elements.front();
}

int run_conserve(const std::string& matrix_path, double phi, const std::string& method,
                 const std::string& seed_arg, double tol, const std::string& out_path) {
    const json input = read_json_file(matrix_path);
    const CMatrix h = matrix_from_json(input);
    const Relation rel = Relation::intertwine(phi);

    IntertwinerSet set;
    if (method == "nullspace") {
        set = solve_relation(h, rel, tol);
    } else if (method == "spectral") {
        if (rel.phi != 0.0)
            throw InputError("conserve: the spectral route covers phi = 0 only");
        const SpectralData spec = eig_biorthogonal(h, tol);
        const DegeneracyReport report = classify_degeneracies(h, spec);
        std::vector<JordanChain> chains;
        for (const auto& c : report.clusters)
            if (c.kind == DegeneracyKind::exceptional)
                chains.push_back(jordan_chain(h, c.value, tol));
        set = eta_from_spectrum(h, spec, report, chains, tol);
    } else if (method == "recursive") {
        const CMatrix seed = resolve_seed(h, rel, input, seed_arg, tol);
        set = recursive_tower(seed, h, rel, tol);
    } else {
        throw InputError("conserve: unknown method \"" + method + "\"");
    }

    emit(etaset_to_json(set), out_path);
    return 0;
}

int run_evolve(const std::string& matrix_path, const std::string& state_path,
               const std::string& etas_path, double t_max, int steps, double gamma_shift,
               double tol, const std::string& out_path) {
    const CMatrix h = matrix_from_json(read_json_file(matrix_path));

    StateVector psi0 = [&] {
        if (!state_path.empty()) return StateVector(vector_from_json(read_json_file(state_path)));
        CVector e1 = CVector::Zero(h.rows());
        e1(0) = 1.0;
        return StateVector(e1);
    }();

    IntertwinerSet etas;
    if (!etas_path.empty()) {
        etas = etaset_from_json(read_json_file(etas_path));
    } else {
        etas = solve_relation(h, Relation::intertwine(0.0), tol);
        if (etas.etas.empty())
            throw NoSymmetryError("evolve: no conserved observables found for this matrix");
    }

    const DriftReport rep = drift_report(h, etas, psi0, t_max, steps, gamma_shift);
    write_text_file(out_path, drift_csv(rep));

    double worst = 0.0;
    for (double d : rep.max_relative_drift) worst = std::max(worst, d);
    std::cout << "max_relative_drift " << worst << " over " << etas.size() << " operators, t_max "
              << t_max << ", steps " << steps << ", written " << out_path << "\n";
    if (rep.imag_residue_flagged)
        std::cerr << "warning: expectation values carry imaginary residue up to "
                  << rep.worst_imag_residue << "\n";
    return 0;
}

int run_model(const std::string& name, int d, double j, double gamma, double mu,
              const std::string& out_path) {
    json out;
    if (name == "pt-spin") {
        const PtSpinModel m = build_pt_spin({d, j, gamma});
        out = matrix_to_json(m.h);
        out["seed"] = matrix_to_json(*m.symmetry.linear_part);
        out["symmetries"] = json::array({symmetry_to_json(m.symmetry)});
        out["params"] = {{"D", d}, {"J", j}, {"gamma", gamma}};
    } else if (name == "hatano-nelson") {
        const HatanoNelsonModel m = build_hatano_nelson({d, j, gamma});
        out = matrix_to_json(m.h);
        out["seed"] = matrix_to_json(m.seed);
        out["rotation"] = matrix_to_json(m.rotation);
        out["symmetries"] = json::array({symmetry_to_json(m.symmetry)});
        out["params"] = {{"D", d}, {"J", j}, {"gamma", gamma}};
    } else if (name == "circuit") {
        CircuitParams p;
        p.gamma = gamma;
        p.mu = mu;
        const CircuitModel m = build_circuit(p);
        out = matrix_to_json(m.h);
        out["seed"] = matrix_to_json(m.seed);
        out["symmetries"] = json::array({symmetry_to_json(m.symmetry)});
        out["params"] = {{"gamma", gamma}, {"mu", mu},
                         {"gamma0", p.gamma0()}, {"gamma_pt", p.gamma_pt()}};
    } else if (name == "dimer") {
        const DimerModel m = build_dimer(j, gamma);
        out = matrix_to_json(m.h);
        out["seed"] = matrix_to_json(*m.symmetries.front().linear_part);
        json syms = json::array();
        for (const auto& s : m.symmetries) syms.push_back(symmetry_to_json(s));
        out["symmetries"] = std::move(syms);
        out["params"] = {{"J", j}, {"gamma", gamma}};
    } else {
        throw InputError("model: unknown name \"" + name + "\"");
    }
    out["model"] = name;

    const std::string path = out_path.empty() ? name + ".json" : out_path;
    write_json_file(path, out);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int run_floquet(const std::string& segments_path, int periods, const std::string& state_path,
                double tol, const std::string& gf_path, const std::string& etas_path,
                const std::string& csv_path) {
    const FloquetDrive drive = drive_from_json(read_json_file(segments_path));
    const CMatrix gf = floquet_propagator(drive);
    const IntertwinerSet etas = stroboscopic_etas(gf, tol);

    StateVector psi0 = [&] {
        if (!state_path.empty()) return StateVector(vector_from_json(read_json_file(state_path)));
        CVector e1 = CVector::Zero(drive.dim());
        e1(0) = 1.0;
        return StateVector(e1);
    }();
    if (periods < 1) throw InputError("floquet: --periods must be >= 1");

    const double period = drive.period();
    std::string csv = "t,norm";
    for (int e = 0; e < etas.size(); ++e) csv += ",eta_" + std::to_string(e + 1);
    csv += "\n";
    char buf[64];
    CVector psi = psi0.psi;
    std::vector<double> first(etas.size(), 0.0);
    double worst = 0.0;
    for (int p = 0; p <= periods; ++p) {
        if (p > 0) psi = gf * psi;
        if (!psi.allFinite()) throw NumericalError("floquet: state overflowed");
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", p * period, psi.squaredNorm());
        csv += buf;
        for (int e = 0; e < etas.size(); ++e) {
            const double val = psi.dot(etas.etas.elements[e] * psi).real();
            if (p == 0) first[e] = val;
            const double scale = std::max(std::abs(first[e]),
                                          etas.etas.elements[e].norm() * psi0.norm());
            worst = std::max(worst, std::abs(val - first[e]) / std::max(scale, 1e-300));
            std::snprintf(buf, sizeof(buf), ",%.17g", val);
            csv += buf;
        }
        csv += "\n";
    }

    write_json_file(gf_path, matrix_to_json(gf));
    write_json_file(etas_path, etaset_to_json(etas));
    write_text_file(csv_path, csv);
    std::cout << "stroboscopic operators " << etas.size() << ", max relative drift over "
              << periods << " periods " << worst << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conserved observables of finite-dimensional non-Hermitian Hamiltonians"};
    app.require_subcommand(1);
    app.fallthrough();

    double tol = default_tol;
    app.add_option("--tol", tol, "global tolerance")
        ->envname("INTERTWINER_TOL")
        ->check(CLI::PositiveNumber);

    std::string matrix_path, state_path, etas_path, seed_arg = "auto";
    std::string analyze_out, conserve_out, evolve_out = "drift.csv", model_out;
    std::string method = "nullspace", model_name, segments_path;
    std::string gf_path = "gf.json", strobe_etas_path = "floquet_etas.json",
                strobe_csv_path = "strobe.csv";
    double phi = 0.0, t_max = 20.0, gamma_shift = 0.0, cluster_tol = -1.0;
    double j_coupling = 1.0, gamma = 0.5, mu = 0.5;
    int steps = 2001, d = 3, periods = 100;

    auto* analyze = app.add_subcommand("analyze", "spectrum, degeneracies, symmetry classes");
    analyze->add_option("matrix", matrix_path, "matrix JSON file")->required();
    analyze->add_option("--cluster-tol", cluster_tol,
                        "relative eigenvalue clustering tolerance (default: automatic)");
    analyze->add_option("-o,--out", analyze_out, "output JSON path (default: stdout)");

    auto* conserve = app.add_subcommand("conserve", "construct conserved observables");
    conserve->add_option("matrix", matrix_path, "matrix JSON file")->required();
    conserve->add_option("--phi", phi, "relation phase: eta H = e^{i phi} H^+ eta");
    conserve->add_option("--method", method, "spectral | recursive | nullspace")
        ->check(CLI::IsMember({"spectral", "recursive", "nullspace"}));
    conserve->add_option("--seed", seed_arg, "auto, or a matrix JSON file (recursive route)");
    conserve->add_option("-o,--out", conserve_out, "output JSON path (default: stdout)");

    auto* evolve_cmd = app.add_subcommand("evolve", "time evolution and conservation drift");
    evolve_cmd->add_option("matrix", matrix_path, "matrix JSON file")->required();
    evolve_cmd->add_option("--state", state_path, "initial state JSON (default: e_1)");
    evolve_cmd->add_option("--etas", etas_path, "eta-set JSON from `conserve`");
    evolve_cmd->add_option("--tmax", t_max, "evolution horizon");
    evolve_cmd->add_option("--steps", steps, "grid points")->check(CLI::Range(2, 10000000));
    evolve_cmd->add_option("--gamma-shift", gamma_shift, "evolve under H - i Gamma, compensate");
    evolve_cmd->add_option("-o,--out", evolve_out, "CSV output path (default: drift.csv)");

    auto* model = app.add_subcommand("model", "emit a named model Hamiltonian");
    model->add_option("name", model_name, "pt-spin | hatano-nelson | circuit | dimer")
        ->required();
    model->add_option("-D,--dim", d, "spin model dimension");
    model->add_option("-J,--coupling", j_coupling, "coupling J");
    model->add_option("--gamma", gamma, "gain-loss strength");
    model->add_option("--mu", mu, "circuit mutual inductance, 0 <= mu < 1");
    model->add_option("-o,--out", model_out, "output path (default: <name>.json)");

    auto* floquet = app.add_subcommand("floquet", "one-period propagator and stroboscopic etas");
    floquet->add_option("segments", segments_path, "drive JSON file")->required();
    floquet->add_option("--periods", periods, "number of periods to sample");
    floquet->add_option("--state", state_path, "initial state JSON (default: e_1)");
    floquet->add_option("--out-gf", gf_path, "propagator output path");
    floquet->add_option("--out-etas", strobe_etas_path, "eta-set output path");
    floquet->add_option("--out-csv", strobe_csv_path, "per-period expectation CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(analyze))
            return run_analyze(matrix_path, tol, cluster_tol, analyze_out);
        if (app.got_subcommand(conserve))
            return run_conserve(matrix_path, phi, method, seed_arg, tol, conserve_out);
        if (app.got_subcommand(evolve_cmd))
            return run_evolve(matrix_path, state_path, etas_path, t_max, steps, gamma_shift, tol,
                              evolve_out);
        if (app.got_subcommand(model))
            return run_model(model_name, d, j_coupling, gamma, mu, model_out);
        if (app.got_subcommand(floquet))
            return run_floquet(segments_path, periods, state_path, tol, gf_path,
                               strobe_etas_path, strobe_csv_path);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const NoSymmetryError& e) {
        std::cerr << "no symmetry: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
