#include "ertrans/cli/commands.hpp"
#include "ertrans/cli/config.hpp"
#include "ertrans/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using ertrans::cli::RunConfig;

void apply_window(RunConfig& cfg, const std::string& w) {
    const auto colon = w.find(':');
    if (colon == std::string::npos) {
        throw ertrans::Error(ertrans::ErrorKind::Config, "--window expects lo:hi in GHz, got '" + w + "'");
    }
    ertrans::cli::apply_override(cfg, "spin.window_lo_GHz=" + w.substr(0, colon));
    ertrans::cli::apply_override(cfg, "spin.window_hi_GHz=" + w.substr(colon + 1));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dark-state microwave-optical transduction and 167Er:YSO spin-level analysis"};
    app.set_version_flag("--version", std::string(ERTRANS_VERSION));
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string out_dir;
    bool print_config = false;
    int workers = 0;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "Run configuration file (key-value, see README)");
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");
    app.add_option("--workers", workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--set", sets, "Override one key: section.key=value (repeatable)");

    auto* protocol = app.add_subcommand("protocol", "Transfer protocol runs")->require_subcommand(1)->fallthrough();
    auto* p_run = protocol->add_subcommand("run", "Single transfer at the configured operating point")->fallthrough();
    auto* p_sweep = protocol->add_subcommand("sweep", "One-parameter sweep ([sweep] section)")->fallthrough();
    std::string sweep_param;
    double sweep_lo = 0, sweep_hi = 0, sweep_step = 0;
    p_sweep->add_option("--param", sweep_param, "alpha, time_ratio, temperature_K, gamma_star, gamma_s, kappa1, kappa2");
    p_sweep->add_option("--lo", sweep_lo);
    p_sweep->add_option("--hi", sweep_hi);
    p_sweep->add_option("--step", sweep_step);

    auto* spin = app.add_subcommand("spin", "Spin Hamiltonian analysis")->require_subcommand(1)->fallthrough();
    std::string B, window, axis, Bmax, steps, tol;
    auto* s_levels = spin->add_subcommand("levels", "Energy levels at one field")->fallthrough();
    auto* s_trans = spin->add_subcommand("transitions", "Transitions in a window ranked by T2")->fallthrough();
    auto* s_sweep = spin->add_subcommand("sweep", "Levels vs field along an axis")->fallthrough();
    auto* s_zefoz = spin->add_subcommand("zefoz", "Zero-gradient transitions at one field")->fallthrough();
    for (auto* s : {s_levels, s_trans, s_zefoz}) s->add_option("--B", B, "Field in tesla: Bx,By,Bz (D1, D2, b)");
    s_trans->add_option("--window", window, "Frequency window lo:hi in GHz");
    s_sweep->add_option("--axis", axis, "D1, D2 or b");
    s_sweep->add_option("--Bmax", Bmax, "Largest field in tesla");
    s_sweep->add_option("--steps", steps, "Number of field points");
    s_zefoz->add_option("--tol", tol, "Gradient tolerance in Hz/T");

    auto* reproduce = app.add_subcommand("reproduce", "Regenerate a figure or table")->fallthrough();
    std::string target;
    reproduce->add_option("target", target, "Target")
        ->required()
        ->check(CLI::IsMember(ertrans::cli::reproduce_targets()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig::defaults() : ertrans::cli::load_config(config_path);
        for (const auto& s : sets) ertrans::cli::apply_override(cfg, s);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (workers > 0) cfg.workers = workers;
        if (!B.empty()) ertrans::cli::apply_override(cfg, "spin.B_T=" + B);
        if (!window.empty()) apply_window(cfg, window);
        if (!axis.empty()) ertrans::cli::apply_override(cfg, "spin.sweep_axis=" + axis);
        if (!Bmax.empty()) ertrans::cli::apply_override(cfg, "spin.sweep_Bmax_T=" + Bmax);
        if (!steps.empty()) ertrans::cli::apply_override(cfg, "spin.sweep_steps=" + steps);
        if (!tol.empty()) ertrans::cli::apply_override(cfg, "spin.zefoz_tol_Hz_per_T=" + tol);
        if (!sweep_param.empty()) ertrans::cli::apply_override(cfg, "sweep.parameter=" + sweep_param);
        if (p_sweep->count("--lo")) cfg.sweep.lo = sweep_lo;
        if (p_sweep->count("--hi")) cfg.sweep.hi = sweep_hi;
        if (p_sweep->count("--step")) cfg.sweep.step = sweep_step;
        cfg.validate();

        if (print_config) {
            std::cout << ertrans::cli::print_config(cfg);
            return 0;
        }

        std::vector<std::filesystem::path> written;
        if (*p_run) written = ertrans::cli::cmd_protocol_run(cfg, std::cout);
        else if (*p_sweep) written = ertrans::cli::cmd_protocol_sweep(cfg, std::cout);
        else if (*s_levels) written = ertrans::cli::cmd_spin_levels(cfg, std::cout);
        else if (*s_trans) written = ertrans::cli::cmd_spin_transitions(cfg, std::cout);
        else if (*s_sweep) written = ertrans::cli::cmd_spin_sweep(cfg, std::cout);
        else if (*s_zefoz) written = ertrans::cli::cmd_spin_zefoz(cfg, std::cout);
        else if (*reproduce) written = ertrans::cli::cmd_reproduce(target, cfg, std::cout);
        else {
            std::cout << app.help();
            return 0;
        }
        for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
        return 0;
    } catch (const ertrans::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ertrans::ErrorKind::Config ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
