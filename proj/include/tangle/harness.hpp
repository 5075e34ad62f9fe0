#pragma once

// Experiment commands behind the tangle_sim CLI. Each command writes CSV files
// into ExperimentConfig::out, every file starting with a `# config:` line that
// holds the full parameter set, plus run.ini for re-running with --config.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "csv.hpp"
#include "detection.hpp"
#include "parasite_chain.hpp"
#include "simulator.hpp"
#include "snapshot_io.hpp"

namespace tangle {

enum class Scale : std::uint8_t { desk, paper };

inline std::string_view to_string(Scale s) { return s == Scale::desk ? "desk" : "paper"; }

inline Scale parse_scale(std::string_view s) {
    if (s == "desk") return Scale::desk;
    if (s == "paper") return Scale::paper;
    throw Error("unknown scale: " + std::string(s));
}

inline std::string_view to_string(TipSelectorKind k) { return k == TipSelectorKind::urts ? "urts" : "urw"; }

inline TipSelectorKind parse_selector(std::string_view s) {
    if (s == "urts") return TipSelectorKind::urts;
    if (s == "urw" || s == "walk" || s == "brw") return TipSelectorKind::walk;
    throw Error("unknown tip selection: " + std::string(s));
}

inline std::string_view to_string(CalibrationUnit u) { return u == CalibrationUnit::window ? "window" : "walk"; }

inline CalibrationUnit parse_calibration_unit(std::string_view s) {
    if (s == "window") return CalibrationUnit::window;
    if (s == "walk") return CalibrationUnit::walk;
    throw Error("unknown calibration unit: " + std::string(s));
}

struct ExperimentConfig {
    std::string command = "simulate";
    std::string out = "out";
    std::uint64_t seed = 1;

    // Honest Tangle.
    double lambda = 100.0;
    EdgePolicy policy = EdgePolicy::sem;
    TipSelectorKind selector = TipSelectorKind::urts;
    double alpha = 0.0;
    Time horizon = 200.0;
    Time warmup = 100.0;

    // Reference model.
    double a = 1.3;
    std::size_t n_max = 40;

    // Exit profiles.
    std::size_t snapshots = 100;
    std::size_t walks = 100000;
    std::size_t grid = 100;

    // Detection.
    std::size_t sample_size = 10;
    Metric metric = Metric::dp;
    /// NaN: calibrate on an honest Tangle.
    double eta = std::numeric_limits<double>::quiet_NaN();
    double fpr = 0.01;
    std::size_t calibration_samples = 10000;
    CalibrationUnit unit = CalibrationUnit::window;
    double safe_alpha = 0.1;

    // Attacks.
    AttackKind attack = AttackKind::spc;
    double mu = 50.0;
    /// NaN: 1 for spc, the PC_A value for pc1.
    double p_root = std::numeric_limits<double>::quiet_NaN();
    Time attack_start = 50.0;
    Time build_duration = 10.0;
    TxId root = kGenesis;
    std::size_t count_cap = 2;
    std::size_t locality = 10;
    std::size_t trials = 10;
    std::size_t selections = 1000;

    // Figures.
    int figure = 2;
    Scale scale = Scale::desk;

    SimConfig sim() const {
        SimConfig c;
        c.lambda = lambda;
        c.policy = policy;
        c.selector = selector;
        c.alpha = alpha;
        c.horizon = horizon;
        c.warmup = warmup;
        c.seed = seed;
        return c;
    }

    ModelParams model() const { return ModelParams{lambda, policy, a, n_max}; }

    void validate() const {
        sim().validate();
        if (a < 0.0 || a > 2.0) throw Error("exit slope a must lie in [0, 2]");
        if (sample_size == 0) throw Error("sample size S must be at least 1");
        if (!std::isnan(eta) && !(eta >= 0.0 && eta <= 1.0)) throw Error("threshold eta must lie in [0, 1]");
        if (!(fpr > 0.0 && fpr < 1.0)) throw Error("false-positive target must lie in (0, 1)");
        if (!(mu > 0.0)) throw Error("attacker rate mu must be positive");
        if (!std::isnan(p_root) && !(p_root > 0.0 && p_root <= 1.0)) throw Error("p_root must lie in (0, 1]");
        if (grid == 0 || walks == 0) throw Error("exit profiles need a grid and walks");
    }

    ConfigRecord record() const {
        ConfigRecord r;
        r.set("command", command);
        r.set("seed", static_cast<unsigned long long>(seed));
        r.set("lambda", lambda);
        r.set("policy", std::string(to_string(policy)));
        r.set("tip-selection", std::string(to_string(selector)));
        r.set("alpha", alpha);
        r.set("horizon", horizon);
        r.set("warmup", warmup);
        r.set("a", a);
        r.set("n-max", static_cast<unsigned long long>(n_max));
        if (command == "exit-profile") {
            r.set("snapshots", static_cast<unsigned long long>(snapshots));
            r.set("walks", static_cast<unsigned long long>(walks));
            r.set("grid", static_cast<unsigned long long>(grid));
        }
        if (command == "calibrate" || command == "attack-detect") {
            r.set("S", static_cast<unsigned long long>(sample_size));
            r.set("metric", std::string(to_string(metric)));
            if (!std::isnan(eta)) r.set("eta", eta);
            r.set("fpr", fpr);
            r.set("calibration-samples", static_cast<unsigned long long>(calibration_samples));
            r.set("calibration-unit", std::string(to_string(unit)));
        }
        if (command == "attack-detect") {
            r.set("safe-alpha", safe_alpha);
            r.set("attack", std::string(to_string(attack)));
            r.set("mu", mu);
            if (!std::isnan(p_root)) r.set("p-root", p_root);
            r.set("attack-start", attack_start);
            r.set("build-duration", build_duration);
            r.set("root", static_cast<unsigned long long>(root));
            r.set("count-cap", static_cast<unsigned long long>(count_cap));
            r.set("locality", static_cast<unsigned long long>(locality));
            r.set("trials", static_cast<unsigned long long>(trials));
            r.set("selections", static_cast<unsigned long long>(selections));
        }
        if (command == "reproduce-figure") {
            r.set("figure", static_cast<unsigned long long>(figure));
            r.set("scale", std::string(to_string(scale)));
        }
        return r;
    }
};

struct CommandResult {
    std::vector<std::string> files;
};

namespace detail {

class Outputs {
public:
    explicit Outputs(const ExperimentConfig& config) : config_(config), dir_(config.out) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_)) throw Error("cannot create output directory " + config.out);
    }

    CsvWriter csv(const std::string& name, std::string_view columns, const ConfigRecord* record = nullptr) {
        const std::string path = (dir_ / name).string();
        result_.files.push_back(path);
        return CsvWriter(path, record ? *record : config_.record(), columns);
    }

    std::string path(const std::string& name) {
        const std::string p = (dir_ / name).string();
        result_.files.push_back(p);
        return p;
    }

    CommandResult finish() {
        const std::string ini = path("run.ini");
        std::ofstream f(ini);
        f << "# " << config_.command << "\n" << config_.record().ini();
        f.close();
        if (!f) throw Error("failed writing " + ini);
        return result_;
    }

private:
    const ExperimentConfig& config_;
    std::filesystem::path dir_;
    CommandResult result_;
};

inline void write_histogram(CsvWriter& w, const ApproverHistogram& h) {
    for (const auto& [n, c] : h.counts)
        w.row(n, c, static_cast<double>(c) / static_cast<double>(h.sample_size));
    w.close();
}

inline std::string sample_suffix(std::size_t s) { return "_S" + std::to_string(s); }

inline Tangle honest_walk_tangle(const ExperimentConfig& c, Time horizon, std::uint64_t seed) {
    SimConfig s = c.sim();
    s.selector = TipSelectorKind::walk;
    s.horizon = horizon;
    s.warmup = 0.0;
    s.seed = seed;
    return run(s);
}

/// Honest history needed for walks to contain several S-windows: walks cover
/// about one path entry per 2h, independent of lambda.
inline Time calibration_horizon(std::size_t sample_size) {
    return std::max<Time>(60.0, 4.0 * static_cast<Time>(sample_size) + 40.0);
}

inline CalibrationOptions calibration_options(const ExperimentConfig& c, const Tangle& honest) {
    CalibrationOptions o;
    o.sample_size = c.sample_size;
    o.metric = c.metric;
    o.reference = p_urw_star(c.model());
    o.num_samples = c.calibration_samples;
    o.fpr_target = c.fpr;
    o.unit = c.unit;
    o.at = honest.clock();
    o.min_issue_time = 10.0;
    o.seed = c.seed;
    return o;
}

} // namespace detail

inline CommandResult cmd_simulate(const ExperimentConfig& config) {
    config.validate();
    detail::Outputs out(config);
    Simulation sim(config.sim());
    sim.run_until(config.horizon);
    {
        const std::string path = out.path("tangle.snapshot");
        std::ofstream f(path);
        if (!f) throw Error("cannot open output file " + path);
        write_snapshot(f, sim.tangle(), SnapshotMeta{config.lambda, config.policy, config.seed});
        f.close();
        if (!f) throw Error("failed writing " + path);
    }
    MeasureOptions m;
    m.warmup = config.warmup;
    m.horizon = config.horizon;
    m.seed = config.seed;
    {
        auto w = out.csv("histogram.csv", "n,count,probability");
        detail::write_histogram(w, measure_approver_distribution(sim.tangle(), m));
    }
    if (config.selector == TipSelectorKind::walk) {
        m.sampling = Sampling::along_walks;
        m.walks = 1000;
        auto w = out.csv("histogram_walks.csv", "n,count,probability");
        detail::write_histogram(w, measure_approver_distribution(sim.tangle(), m));
    }
    {
        auto w = out.csv("summary.csv", "transactions,honest_arrivals,mean_tip_count");
        w.row(sim.tangle().size(), sim.honest_arrivals(), sim.mean_tip_count());
        w.close();
    }
    return out.finish();
}

inline CommandResult cmd_analytic(const ExperimentConfig& config) {
    config.validate();
    detail::Outputs out(config);
    const auto params = config.model();
    const auto u = p_u(params);
    const auto w = p_urw(params);
    const auto s = p_urw_star(params);
    auto csv = out.csv("analytic.csv", "n,p_u,p_urw,p_urw_star");
    for (std::size_t n = 1; n <= params.n_max; ++n) csv.row(n, u[n], w[n], s[n]);
    csv.close();
    return out.finish();
}

inline CommandResult cmd_exit_profile(const ExperimentConfig& config) {
    config.validate();
    detail::Outputs out(config);
    const ExitProfile p = measure_exit_profile(config.sim(), config.snapshots, config.walks, config.grid);
    auto csv = out.csv("exit_profile.csv", "x,e");
    for (std::size_t i = 0; i < p.x.size(); ++i) csv.row(p.x[i], p.e[i]);
    csv.close();
    auto fit = out.csv("exit_fit.csv", "a,mean_tip_count,snapshots,walks_per_snapshot");
    fit.row(fit_linear_exit(p), p.mean_tip_count, p.num_snapshots, p.walks_per_snapshot);
    fit.close();
    return out.finish();
}

inline CommandResult cmd_calibrate(const ExperimentConfig& config) {
    config.validate();
    detail::Outputs out(config);
    const Tangle honest = detail::honest_walk_tangle(
        config, std::max(config.horizon, detail::calibration_horizon(config.sample_size)), config.seed);
    const auto cal = calibrate_eta(honest, detail::calibration_options(config, honest));
    auto cdf = out.csv("cdf.csv", "d,cumulative_probability");
    for (const auto& [d, p] : cal.cdf.steps()) cdf.row(d, p);
    cdf.close();
    auto sum = out.csv("calibration.csv", "S,metric,fpr_target,eta,samples,walks,distinct_values");
    sum.row(config.sample_size, to_string(config.metric), config.fpr, cal.eta, cal.cdf.size(), cal.walks,
            cal.cdf.distinct_values());
    sum.close();
    return out.finish();
}

struct TrialResult {
    AttackReport report;
    double eta = 0.0;
    double honest_flag_rate = 0.0;
    double pc_flag_rate = 0.0;
    double capture_unguarded = 0.0;
    double capture_guarded = 0.0;
};

/// One attack/detect trial: honest traffic with the chain built in secret,
/// detection rates on honest and main-PC windows, and tip capture of walks
/// from the root right after the reveal with and without the guard.
inline TrialResult run_attack_trial(const ExperimentConfig& config, double eta, std::uint64_t seed) {
    const ProbabilityVector reference = p_urw_star(config.model());
    SimConfig sc = config.sim();
    sc.selector = TipSelectorKind::walk;
    sc.seed = seed;
    sc.horizon = config.attack_start + config.build_duration + 1.0;
    sc.warmup = 0.0;
    Simulation sim(sc);

    AttackSpec spec;
    spec.kind = config.attack;
    spec.mu = config.mu;
    spec.root = config.root;
    spec.start = config.attack_start;
    spec.build_duration = config.build_duration;
    spec.count_cap = config.count_cap;
    spec.locality = config.locality;
    spec.seed = seed;
    if (spec.kind == AttackKind::pc1)
        spec.p_root = std::isnan(config.p_root) ? pc_a_root_probability(reference) : config.p_root;
    if (spec.kind == AttackKind::mimic) spec.target = reference;

    TrialResult r;
    r.eta = eta;
    r.report = build_parasite_chain(sim, spec);
    const Tangle& t = sim.tangle();
    const Time at = spec.reveal();

    const auto pc = window_distances(r.report.main_chain_counts, config.sample_size, config.metric, reference);
    r.pc_flag_rate = flag_rate(pc, eta);

    CalibrationOptions o;
    o.sample_size = config.sample_size;
    o.metric = config.metric;
    o.reference = reference;
    o.num_samples = std::max<std::size_t>(config.selections, 1);
    o.at = config.attack_start;  // honest view before the chain exists
    o.min_issue_time = std::min<Time>(10.0, 0.25 * config.attack_start);
    o.seed = derive_seed(seed, "honest-windows");
    o.max_walks = 100000;
    try {
        r.honest_flag_rate = flag_rate(honest_distances(t, o), eta);
    } catch (const Error&) {
        r.honest_flag_rate = std::nan("");
    }

    const std::set<TxId> members(r.report.members.begin(), r.report.members.end());
    DetectorConfig det;
    det.sample_size = config.sample_size;
    det.metric = config.metric;
    det.eta = eta;
    det.reference = reference;
    det.safe_alpha = config.safe_alpha;
    const WalkConfig walk{config.alpha, config.root, DuplicateEdgeWeighting::once};
    WeightCache weights(t, at);
    Rng plain = make_stream(seed, "capture-plain");
    Rng guarded = make_stream(seed, "capture-guarded");
    std::size_t cp = 0, cg = 0;
    for (std::size_t i = 0; i < config.selections; ++i) {
        cp += members.count(walk_tip(t, walk, at, plain, &weights));
        cg += members.count(guarded_tip_selection(t, walk, det, at, guarded, &weights).tip);
    }
    if (config.selections > 0) {
        r.capture_unguarded = static_cast<double>(cp) / static_cast<double>(config.selections);
        r.capture_guarded = static_cast<double>(cg) / static_cast<double>(config.selections);
    }
    return r;
}

inline void write_report_row(CsvWriter& w, const AttackReport& r) {
    w.row(to_string(r.kind), r.mu, r.p_root, r.num_malicious, r.root_links, r.effective_rate_r, r.mean_n_pc,
          r.residual_dp);
}

inline CommandResult cmd_attack_detect(const ExperimentConfig& config) {
    config.validate();
    if (config.attack == AttackKind::spc && !std::isnan(config.p_root) && config.p_root != 1.0)
        throw Error("spc requires p_root = 1");
    detail::Outputs out(config);
    auto campaign = out.csv("campaign.csv",
                            "trial,seed,kind,mu,p_root,num_malicious,root_links,r,mean_n_pc,residual_dp,eta,"
                            "honest_flag_rate,pc_flag_rate,capture_unguarded,capture_guarded");
    auto reports = out.csv("attack_reports.csv", "kind,mu,p_root,num_malicious,root_links,r,mean_n_pc,residual_dp");
    double eta = config.eta;
    if (config.trials > 0 && std::isnan(eta)) {
        const Tangle honest = detail::honest_walk_tangle(
            config, std::max(config.horizon, detail::calibration_horizon(config.sample_size)),
            derive_seed(config.seed, "calibration-tangle"));
        eta = calibrate_eta(honest, detail::calibration_options(config, honest)).eta;
    }
    for (std::size_t k = 0; k < config.trials; ++k) {
        const std::uint64_t seed = derive_seed(config.seed, "trial", k);
        const TrialResult r = run_attack_trial(config, eta, seed);
        campaign.row(k, seed, to_string(r.report.kind), r.report.mu, r.report.p_root, r.report.num_malicious,
                     r.report.root_links, r.report.effective_rate_r, r.report.mean_n_pc, r.report.residual_dp, r.eta,
                     r.honest_flag_rate, r.pc_flag_rate, r.capture_unguarded, r.capture_guarded);
        write_report_row(reports, r.report);
    }
    campaign.close();
    reports.close();
    return out.finish();
}

// ---------------------------------------------------------------------------
// Figures

namespace detail {

inline std::size_t scaled(Scale s, std::size_t desk, std::size_t paper) { return s == Scale::desk ? desk : paper; }

/// Approver distribution over [warmup, horizon] with about `eligible` samples.
inline ProbabilityVector simulated_distribution(const ExperimentConfig& c, double lambda, TipSelectorKind selector,
                                                EdgePolicy policy, std::size_t eligible, Sampling sampling,
                                                std::size_t walks) {
    SimConfig s;
    s.lambda = lambda;
    s.policy = policy;
    s.selector = selector;
    s.warmup = std::max(20.0, 2000.0 / lambda);
    s.horizon = s.warmup + static_cast<double>(eligible) / lambda + 2.0;
    s.seed = derive_seed(c.seed, "figure-lambda", static_cast<std::uint64_t>(lambda * 1000.0));
    const Tangle t = run(s);
    MeasureOptions m;
    m.sampling = sampling;
    m.walks = walks;
    m.warmup = s.warmup;
    m.horizon = s.horizon;
    m.seed = s.seed;
    return measure_approver_distribution(t, m).distribution();
}

} // namespace detail

inline CommandResult reproduce_figure_2(const ExperimentConfig& c, detail::Outputs& out) {
    const std::vector<double> lambdas = c.scale == Scale::desk
                                            ? std::vector<double>{0.5, 1, 2, 5, 10, 20, 50, 100}
                                            : std::vector<double>{0.2, 0.5, 1, 2, 3, 5, 7, 10, 15, 20, 30, 50, 70, 100};
    const std::size_t eligible = detail::scaled(c.scale, 20000, 100000);
    for (EdgePolicy policy : {EdgePolicy::sem, EdgePolicy::mem}) {
        const std::string tag(to_string(policy));
        auto sim = out.csv("fig2_" + tag + "_simulated.csv", "lambda,n,probability");
        auto model = out.csv("fig2_" + tag + "_analytic.csv", "lambda,n,probability");
        for (double lambda : lambdas) {
            const auto p = detail::simulated_distribution(c, lambda, TipSelectorKind::urts, policy, eligible,
                                                          Sampling::all, 0);
            const auto u = p_u({lambda, policy, 0.0, c.n_max});
            for (std::size_t n = 1; n <= 4; ++n) {
                sim.row(lambda, n, p[n]);
                model.row(lambda, n, u[n]);
            }
        }
        sim.close();
        model.close();
    }
    return out.finish();
}

inline CommandResult reproduce_figure_3(const ExperimentConfig& c, detail::Outputs& out) {
    const std::size_t snapshots = detail::scaled(c.scale, 20, 1000);
    const std::size_t walks = detail::scaled(c.scale, 100000, 1000000);
    auto fits = out.csv("fig3_fit.csv", "tip_selection,a,mean_tip_count,snapshots,walks_per_snapshot");
    for (TipSelectorKind selector : {TipSelectorKind::walk, TipSelectorKind::urts}) {
        SimConfig s;
        s.lambda = c.lambda;
        s.policy = c.policy;
        s.selector = selector;
        s.horizon = 40.0;
        s.warmup = 0.0;
        s.seed = derive_seed(c.seed, "figure3", static_cast<std::uint64_t>(selector));
        const ExitProfile p = measure_exit_profile(s, snapshots, walks, c.grid);
        const std::string tag(to_string(selector));
        auto csv = out.csv("fig3_" + tag + ".csv", "x,e");
        for (std::size_t i = 0; i < p.x.size(); ++i) csv.row(p.x[i], p.e[i]);
        csv.close();
        fits.row(tag, fit_linear_exit(p), p.mean_tip_count, p.num_snapshots, p.walks_per_snapshot);
    }
    fits.close();
    auto linear = out.csv("fig3_linear_model.csv", "x,e");
    for (std::size_t k = 1; k <= c.grid; ++k) {
        const double x = static_cast<double>(k) / static_cast<double>(c.grid);
        linear.row(x, 1.0 - c.a * (x - 0.5));  // descending rank order
    }
    linear.close();
    return out.finish();
}

inline CommandResult reproduce_figure_4(const ExperimentConfig& c, detail::Outputs& out) {
    const std::size_t steps = detail::scaled(c.scale, 40, 200);
    auto w = out.csv("fig4_p_urw.csv", "a,n,probability");
    auto s = out.csv("fig4_p_urw_star.csv", "a,n,probability");
    for (std::size_t k = 0; k <= steps; ++k) {
        const double a = 2.0 * static_cast<double>(k) / static_cast<double>(steps);
        const ModelParams p{c.lambda, c.policy, a, c.n_max};
        const auto pw = p_urw(p);
        const auto ps = p_urw_star(p);
        for (std::size_t n = 1; n <= 5; ++n) {
            w.row(a, n, pw[n]);
            s.row(a, n, ps[n]);
        }
    }
    w.close();
    s.close();
    return out.finish();
}

inline CommandResult reproduce_figure_5(const ExperimentConfig& c, detail::Outputs& out) {
    const std::vector<double> lambdas = c.scale == Scale::desk ? std::vector<double>{1, 2, 5, 10, 20, 50, 100}
                                                               : std::vector<double>{1, 2, 3, 5, 7, 10, 15, 20, 30,
                                                                                     50, 70, 100};
    const std::size_t eligible = detail::scaled(c.scale, 10000, 50000);
    const std::size_t walks = detail::scaled(c.scale, 1000, 10000);
    auto all = out.csv("fig5_simulated_all.csv", "lambda,n,probability");
    auto along = out.csv("fig5_simulated_along_walks.csv", "lambda,n,probability");
    auto model = out.csv("fig5_p_urw.csv", "lambda,n,probability");
    auto star = out.csv("fig5_p_urw_star.csv", "lambda,n,probability");
    for (double lambda : lambdas) {
        const auto pa = detail::simulated_distribution(c, lambda, TipSelectorKind::walk, c.policy, eligible,
                                                       Sampling::all, 0);
        const auto pw = detail::simulated_distribution(c, lambda, TipSelectorKind::walk, c.policy, eligible,
                                                       Sampling::along_walks, walks);
        const ModelParams p{lambda, c.policy, c.a, c.n_max};
        const auto mw = p_urw(p);
        const auto ms = p_urw_star(p);
        for (std::size_t n = 1; n <= 4; ++n) {
            all.row(lambda, n, pa[n]);
            along.row(lambda, n, pw[n]);
            model.row(lambda, n, mw[n]);
            star.row(lambda, n, ms[n]);
        }
    }
    all.close();
    along.close();
    model.close();
    star.close();
    return out.finish();
}

inline CommandResult reproduce_figure_7(const ExperimentConfig& c, detail::Outputs& out) {
    const std::size_t samples = detail::scaled(c.scale, 10000, 100000);
    const std::vector<std::size_t> sizes{10, 25, 50, 100};
    const Tangle honest = detail::honest_walk_tangle(c, detail::calibration_horizon(sizes.back()),
                                                     derive_seed(c.seed, "figure7"));
    for (Metric metric : {Metric::dp, Metric::dq})
        for (std::size_t s : sizes) {
            ExperimentConfig cc = c;
            cc.sample_size = s;
            cc.metric = metric;
            cc.calibration_samples = samples;
            const auto cal = calibrate_eta(honest, detail::calibration_options(cc, honest));
            auto csv = out.csv("fig7_" + std::string(to_string(metric)) + detail::sample_suffix(s) + ".csv",
                               "d,cumulative_probability");
            for (const auto& [d, p] : cal.cdf.steps()) csv.row(d, p);
            csv.close();
        }
    return out.finish();
}

inline CommandResult cmd_reproduce_figure(const ExperimentConfig& config) {
    config.validate();
    switch (config.figure) {
    case 2: case 3: case 4: case 5: case 7: break;
    default: throw Error("unknown figure id " + std::to_string(config.figure) + " (expected 2, 3, 4, 5 or 7)");
    }
    detail::Outputs out(config);
    switch (config.figure) {
    case 2: return reproduce_figure_2(config, out);
    case 3: return reproduce_figure_3(config, out);
    case 4: return reproduce_figure_4(config, out);
    case 5: return reproduce_figure_5(config, out);
    default: return reproduce_figure_7(config, out);
    }
}

inline CommandResult run_command(const ExperimentConfig& config) {
    if (config.command == "simulate") return cmd_simulate(config);
    if (config.command == "analytic") return cmd_analytic(config);
    if (config.command == "exit-profile") return cmd_exit_profile(config);
    if (config.command == "calibrate") return cmd_calibrate(config);
    if (config.command == "attack-detect") return cmd_attack_detect(config);
    if (config.command == "reproduce-figure") return cmd_reproduce_figure(config);
    throw Error("unknown command " + config.command);
}

} // namespace tangle
