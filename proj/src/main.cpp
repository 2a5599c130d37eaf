#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "faultfem/experiments.hpp"

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        std::cerr << "cannot open output file: " << path << "\n";
        std::exit(2);
    }
    return f;
}

// Flat key=value config file ('#' starts a comment). Returns the parsed
// entries; unknown keys are reported by the caller.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        std::cerr << "cannot open config file: " << path << "\n";
        std::exit(2);
    }
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        if (!key.empty()) kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thin-fault elasticity experiments"};
    app.require_subcommand(1);

    std::string problem = "limit-uncoupled";
    int nmin = 8, nmax = 64;
    double eps = 0.1;
    std::string out_path;
    unsigned seed = 1234;
    double dt = 0.05, tfinal = 1.0, tol = 1e-12;
    std::string suite = "poincare";
    std::string mesh_csv;
    std::string config_path;

    // Config values become the defaults before parsing, so explicit
    // command-line flags always win.
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.rfind("--config=", 0) == 0)
            config_path = arg.substr(9);
        else if (arg == "--config" && i + 1 < argc)
            config_path = argv[i + 1];
    }
    if (!config_path.empty()) {
        for (const auto& [key, val] : read_config(config_path)) {
            try {
                if (key == "problem") problem = val;
                else if (key == "nmin") nmin = std::stoi(val);
                else if (key == "nmax") nmax = std::stoi(val);
                else if (key == "eps") eps = std::stod(val);
                else if (key == "out") out_path = val;
                else if (key == "seed") seed = static_cast<unsigned>(std::stoul(val));
                else if (key == "dt") dt = std::stod(val);
                else if (key == "tfinal") tfinal = std::stod(val);
                else if (key == "tol") tol = std::stod(val);
                else if (key == "suite") suite = val;
                else if (key == "mesh-csv") mesh_csv = val;
                else {
                    std::cerr << "unknown config key: " << key << "\n";
                    return 2;
                }
            } catch (const std::exception&) {
                std::cerr << "bad config value for " << key << ": " << val << "\n";
                return 2;
            }
        }
    }

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--problem", problem, "Problem variant");
        cmd->add_option("--nmin", nmin, "Coarsest refinement label (h = 1/nmin)");
        cmd->add_option("--nmax", nmax, "Finest refinement label");
        cmd->add_option("--eps", eps, "Fault strip width parameter");
        cmd->add_option("--out", out_path, "Output CSV path");
        cmd->add_option("--seed", seed, "Seed for randomized audits");
        cmd->add_option("--dt", dt, "Time step");
        cmd->add_option("--tfinal", tfinal, "Final time");
        cmd->add_option("--tol", tol, "Solver tolerance");
        cmd->add_option("--config", config_path,
                        "Optional key=value config file (flags win)");
    };

    CLI::App* converge = app.add_subcommand("converge", "Convergence sweep");
    add_common(converge);
    CLI::App* solve = app.add_subcommand("solve", "Single solve with field dump");
    add_common(solve);
    solve->add_option("--mesh-csv", mesh_csv, "Also dump the mesh to this path");
    CLI::App* evolve = app.add_subcommand("evolve", "Time evolution run");
    add_common(evolve);
    CLI::App* verify = app.add_subcommand("verify", "Verification suites");
    add_common(verify);
    verify->add_option("--suite", suite,
                       "poincare|coercivity|gamma|plasticity|energy");

    CLI11_PARSE(app, argc, argv);

    try {
        if (converge->parsed()) {
            const ffem::ConvergeTable t =
                ffem::run_convergence(problem, nmin, nmax, eps, tol);
            if (out_path.empty()) {
                ffem::write_convergence_csv(t, std::cout);
            } else {
                auto f = open_out(out_path);
                ffem::write_convergence_csv(t, f);
            }
        } else if (solve->parsed()) {
            const ffem::SolveDump d = ffem::run_solve(problem, nmin, eps, tol);
            if (!mesh_csv.empty()) {
                auto f = open_out(mesh_csv);
                ffem::write_mesh_csv(d.result.mesh, f);
            }
            if (out_path.empty()) {
                ffem::write_grid_csv(d.result, std::cout);
                ffem::write_interface_csv(d.result, std::cout);
            } else {
                auto f = open_out(out_path);
                ffem::write_grid_csv(d.result, f);
                auto fi = open_out(out_path + ".interface.csv");
                ffem::write_interface_csv(d.result, fi);
            }
        } else if (evolve->parsed()) {
            const ffem::EvolveResult r =
                ffem::run_evolve_problem(problem, nmin, eps, dt, tfinal);
            if (out_path.empty()) {
                ffem::write_trajectory_csv(r, std::cout);
            } else {
                auto f = open_out(out_path);
                ffem::write_trajectory_csv(r, f);
            }
        } else if (verify->parsed()) {
            bool ok;
            if (out_path.empty()) {
                ok = ffem::verify_suite(suite, seed, std::cout);
            } else {
                auto f = open_out(out_path);
                ok = ffem::verify_suite(suite, seed, f);
            }
            if (!ok) {
                std::cerr << "verification suite failed: " << suite << "\n";
                return 1;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
