// tangle_sim: command-line front end for the experiment commands.
//
//   tangle_sim <command> [options]
//   tangle_sim <command> --config run.ini [overrides]
//   tangle_sim <command> --config out/histogram.csv   (re-run from a CSV header)

#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "tangle/harness.hpp"

namespace {

// Reads either an INI file or the `# config: k=v ...` first line of an output CSV.
class RunConfig : public CLI::ConfigBase {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
        const std::string_view marker = "# config:";
        std::vector<CLI::ConfigItem> items;
        if (text.rfind(marker, 0) == 0) {
            std::istringstream line(text.substr(marker.size(), text.find('\n') - marker.size()));
            std::string token;
            while (line >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                CLI::ConfigItem item;
                item.name = token.substr(0, eq);
                item.inputs = {token.substr(eq + 1)};
                items.push_back(std::move(item));
            }
        } else {
            std::istringstream rest(text);
            items = CLI::ConfigBase::from_config(rest);
        }
        std::erase_if(items, [](const CLI::ConfigItem& i) { return i.name == "command"; });
        return items;
    }
};

} // namespace

int main(int argc, char** argv) {
    using namespace tangle;
    ExperimentConfig c;
    CLI::App app{"Tangle simulator, reference models and parasite-chain detection experiments"};
    app.config_formatter(std::make_shared<RunConfig>());
    app.set_config("--config", "", "INI file or output CSV whose header holds the parameters");
    app.require_subcommand(1, 1);

    std::string policy = "sem", selector = "urts", metric = "dp", unit = "window", attack = "spc", scale = "desk";

    app.add_option("--out", c.out, "Output directory")->capture_default_str();
    app.add_option("--seed", c.seed, "Master RNG seed")->capture_default_str();
    app.add_option("--lambda", c.lambda, "Honest tx rate per reveal delay h")->capture_default_str();
    app.add_option("--policy", policy, "Duplicate selection handling: sem | mem")->capture_default_str();
    app.add_option("--tip-selection", selector, "urts | urw (biased when --alpha > 0)")->capture_default_str();
    app.add_option("--alpha", c.alpha, "Cumulative-weight bias of the walk")->capture_default_str();
    app.add_option("--horizon", c.horizon, "Simulated time")->capture_default_str();
    app.add_option("--warmup", c.warmup, "Time excluded from measurement")->capture_default_str();
    app.add_option("--a", c.a, "Exit-profile slope of the reference model")->capture_default_str();
    app.add_option("--n-max", c.n_max, "Largest approver count in the models")->capture_default_str();
    app.add_option("--snapshots", c.snapshots, "Exit profile: independent tip sets")->capture_default_str();
    app.add_option("--walks", c.walks, "Exit profile: walks per tip set")->capture_default_str();
    app.add_option("--grid", c.grid, "Exit profile: grid points on (0, 1]")->capture_default_str();
    app.add_option("--S", c.sample_size, "Detector sample size")->capture_default_str();
    app.add_option("--metric", metric, "dp | dq")->capture_default_str();
    app.add_option("--eta", c.eta, "Detection threshold; calibrated when omitted");
    app.add_option("--fpr", c.fpr, "Calibration false-positive target")->capture_default_str();
    app.add_option("--calibration-samples", c.calibration_samples, "Distances in the calibration CDF")
        ->capture_default_str();
    app.add_option("--calibration-unit", unit, "window | walk")->capture_default_str();
    app.add_option("--safe-alpha", c.safe_alpha, "Walk bias after a detection")->capture_default_str();
    app.add_option("--attack", attack, "spc | pc1 | mimic")->capture_default_str();
    app.add_option("--mu", c.mu, "Attacker tx rate")->capture_default_str();
    app.add_option("--p-root", c.p_root, "pc1 root probability; PC_A value when omitted");
    app.add_option("--attack-start", c.attack_start, "Start of the secret build")->capture_default_str();
    app.add_option("--build-duration", c.build_duration, "Length of the secret build")->capture_default_str();
    app.add_option("--root", c.root, "Tx the chain is pinned to")->capture_default_str();
    app.add_option("--count-cap", c.count_cap, "pc1 approver-count cap")->capture_default_str();
    app.add_option("--locality", c.locality, "mimic: recent main-chain txs eligible for approvals")
        ->capture_default_str();
    app.add_option("--trials", c.trials, "Campaign trials")->capture_default_str();
    app.add_option("--selections", c.selections, "Tip selections per trial")->capture_default_str();
    app.add_option("--figure", c.figure, "2 | 3 | 4 | 5 | 7")->capture_default_str();
    app.add_option("--scale", scale, "desk | paper")->capture_default_str();

    for (const char* name : {"simulate", "analytic", "exit-profile", "calibrate", "attack-detect", "reproduce-figure"})
        app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        c.command = app.get_subcommands().front()->get_name();
        c.policy = parse_edge_policy(policy);
        c.selector = parse_selector(selector);
        c.metric = parse_metric(metric);
        c.unit = parse_calibration_unit(unit);
        c.attack = parse_attack_kind(attack);
        c.scale = parse_scale(scale);
        if (c.command == "reproduce-figure" && app.count("--seed") == 0)
            throw Error("reproduce-figure needs an explicit --seed");
        const CommandResult result = run_command(c);
        for (const auto& f : result.files) std::cout << f << '\n';
    } catch (const std::exception& e) {
        std::cerr << "tangle_sim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
