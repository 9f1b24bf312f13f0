// Demo usage:
//     ./dispersive-rbffd table1 --out out/table1
//     ./dispersive-rbffd fig2 fig3 fig4 --batch --out out
//     ./dispersive-rbffd my_run.json --out out/my_run --dump-operators

#include "dispersive/errors.hpp"
#include "dispersive/runner.hpp"

#include <CLI11.hpp>

#include <future>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_numerical = 1;
constexpr int exit_config = 2;

int run_one(const std::string& target, const dispersive::RunOptions& opts)
{
    try {
        const auto cfg = dispersive::load_config(target);
        dispersive::run_experiment(cfg, opts);
        std::cout << target << ": " << dispersive::experiment_name(cfg.experiment)
                  << " finished, outputs in " << opts.out_dir.string() << "\n";
        return exit_ok;
    } catch (const dispersive::NumericalError& e) {
        std::cerr << target << ": numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << target << ": configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << target << ": " << e.what() << "\n";
        return exit_numerical;
    }
}

std::string run_name(const std::string& target)
{
    if (dispersive::preset_text(target))
        return target;
    return std::filesystem::path(target).stem().string();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"RBF-FD solver for KdV- and BBM-type dispersive wave equations"};

    std::vector<std::string> targets;
    std::string out_dir = "out";
    bool dump_operators = false;
    bool batch = false;
    bool list_presets = false;

    app.add_option("targets", targets, "Preset name or path to a JSON run config");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_flag("--dump-operators", dump_operators,
                 "Write the sparse operators as 'row col value' text");
    app.add_flag("--batch", batch,
                 "Run several targets in parallel, each into <out>/<name>");
    app.add_flag("--list-presets", list_presets, "List the bundled presets and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    if (list_presets) {
        for (const auto& name : dispersive::preset_names())
            std::cout << name << "\n";
        return exit_ok;
    }
    if (targets.empty()) {
        std::cerr << "no preset or config given (try --list-presets)\n";
        return exit_config;
    }
    if (targets.size() > 1 && !batch) {
        std::cerr << "several targets need --batch\n";
        return exit_config;
    }

    if (!batch) {
        dispersive::RunOptions opts{out_dir, dump_operators};
        return run_one(targets.front(), opts);
    }

    std::vector<std::future<int>> jobs;
    for (const auto& t : targets) {
        dispersive::RunOptions opts{std::filesystem::path(out_dir) / run_name(t), dump_operators};
        jobs.push_back(std::async(std::launch::async, run_one, t, opts));
    }
    int worst = exit_ok;
    for (auto& j : jobs)
        worst = std::max(worst, j.get());
    return worst;
}
