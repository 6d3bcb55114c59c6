#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "moretro/config.hpp"
#include "moretro/oracle.hpp"
#include "moretro/report.hpp"

using namespace moretro;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> strategy;
    std::optional<double> epsilon;
    std::optional<std::size_t> budget;
};

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "JSON run manifest")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "search seed (weight sampling)");
    cmd->add_option("--out", o.out, "output path");
    cmd->add_option("--strategy", o.strategy, "moretro-bo | moretro-grid | moretro-sobol | retro-star | fixed");
    cmd->add_option("--epsilon", o.epsilon, "pruning slack");
    cmd->add_option("--budget", o.budget, "expansion budget N_B");
}

RunConfig load(const Overrides& o)
{
    nlohmann::json j;
    {
        std::ifstream in(o.config);
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw Error(o.config + ": " + e.what());
        }
    }
    if (!j.is_object()) {
        throw Error(o.config + ": expected a JSON object");
    }
    // flags override top-level fields before strategy defaults are resolved
    if (o.strategy) j["strategy"] = *o.strategy;
    if (o.seed) j["seed"] = *o.seed;
    if (o.out) j["out"] = *o.out;
    if (o.epsilon) j["epsilon"] = *o.epsilon;
    if (o.budget) j["budget"] = *o.budget;
    return RunConfig::from_json(j);
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(p);
    out << text;
    if (!out) {
        throw Error("cannot write " + path);
    }
}

int cmd_run(const Overrides& o)
{
    const RunConfig config = load(o);
    const RunOutput output = run_single(config);
    if (config.out.empty() || config.out == "-") {
        std::cout << output.run.dump(2) << '\n';
    } else {
        write_run(output, config.out);
    }
    const auto& m = output.run.at("metrics");
    std::cerr << "routes " << m.at("n_routes") << ", hv_raw " << m.at("hv_raw") << ", termination "
              << output.run.at("stats").at("termination").get<std::string>() << '\n';
    return output.exit_code;
}

int cmd_bench(const Overrides& o)
{
    const RunConfig config = load(o);
    const auto runs = run_benchmark(config, bench_workers());
    std::size_t failures = 0;
    if (!config.out.empty() && config.out != "-") {
        const std::filesystem::path dir(config.out);
        std::filesystem::create_directories(dir / "runs");
        for (const auto& run : runs) {
            std::string world = run.at("world_seed").is_null() ? "x" : run.at("world_seed").dump();
            std::ofstream f(dir / "runs" / (run.at("strategy").get<std::string>() + "_" + world + ".json"));
            f << run.dump(2) << '\n';
        }
    }
    for (const auto& run : runs) {
        if (run.contains("error")) {
            ++failures;
            std::cerr << "run " << run.at("strategy").get<std::string>() << " world " << run.at("world_seed")
                      << " failed: " << run.at("error").get<std::string>() << '\n';
        }
    }
    const std::string csv = aggregate_csv(aggregate_rows(runs));
    emit(csv, config.out.empty() || config.out == "-" ? "" : config.out + "/aggregate.csv");
    std::cerr << runs.size() << " runs, " << failures << " failed\n";
    return kExitOk;
}

int cmd_oracle(const Overrides& o)
{
    const RunConfig config = load(o);
    const auto provider = config.make_provider();
    const auto world = enumerate_routes(*provider, config.objectives(), config.target_key(), config.oracle_cap);
    emit(dump(world).dump(2) + "\n", config.out);
    std::cerr << world.routes.size() << " routes" << (world.overflow ? " (overflow)" : "") << '\n';
    return kExitOk;
}

int cmd_plotdata(const std::string& run_path, const std::string& out)
{
    std::ifstream in(run_path);
    nlohmann::json run;
    try {
        run = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(run_path + ": " + e.what());
    }
    emit(front_plotdata(run), out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-objective retrosynthesis search"};
    app.require_subcommand(1);

    Overrides run_opts, bench_opts, oracle_opts;
    auto* run = app.add_subcommand("run", "search one target, write run JSON and HV trace");
    add_common(run, run_opts);
    auto* bench = app.add_subcommand("bench", "run a world suite across strategies, write aggregate CSV");
    add_common(bench, bench_opts);
    auto* oracle = app.add_subcommand("oracle", "enumerate every route of a bounded world");
    add_common(oracle, oracle_opts);

    std::string plot_in;
    std::string plot_out;
    auto* plot = app.add_subcommand("plotdata", "front points of a run JSON as CSV");
    plot->add_option("run", plot_in, "run JSON")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", plot_out, "CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_opts);
        if (bench->parsed()) return cmd_bench(bench_opts);
        if (oracle->parsed()) return cmd_oracle(oracle_opts);
        if (plot->parsed()) return cmd_plotdata(plot_in, plot_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
    return kExitOk;
}
