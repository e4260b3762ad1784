#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>

#include "uavcgan/cli/experiments.hpp"
#include "uavcgan/cli/svg.hpp"

namespace fs = std::filesystem;
using namespace uavcgan;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string config;
  long seed = -1;
  std::string out_dir = "out";
  int workers = 1;
};

cli::ScenarioConfig resolve(const Options& o) {
  auto c = o.config.empty() ? cli::parse_config("") : cli::load_config(o.config);
  if (o.seed >= 0) c.training.seeds = {o.seed};
  return c;
}

std::uint64_t topo_seed(const cli::ScenarioConfig& c) { return static_cast<std::uint64_t>(c.training.seeds.front()); }

fs::path prepare(const Options& o, const cli::ScenarioConfig& c) {
  const fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create '" + dir.string() + "': " + ec.message());
  csv::write_file((dir / "config.snapshot").string(), cli::config_snapshot(c));
  return dir;
}

void write(const fs::path& dir, const std::string& name, const std::string& text) {
  csv::write_file((dir / name).string(), text);
}

void write_run(const fs::path& dir, const cli::LearningRun& run) {
  fs::create_directories(dir / "checkpoints");
  write(dir, "metrics.csv", protocol::metrics_to_csv(run.metrics));
  if (!run.topology_csv.empty()) write(dir, "topology.csv", run.topology_csv);
  for (std::size_t g = 0; g < run.checkpoints.size(); ++g)
    write(dir / "checkpoints", "node_" + std::to_string(g) + ".txt", run.checkpoints[g]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed conditional-GAN channel modelling for UAV fleets"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "YAML scenario file (defaults when omitted)");
  app.add_option("--seed", opt.seed, "override the seed list with a single seed");
  app.add_option("--out-dir", opt.out_dir, "directory for CSV/SVG artifacts");
  app.add_option("--workers", opt.workers, "worker threads for per-node updates")->check(CLI::PositiveNumber);

  auto* topo = app.add_subcommand("topology", "topology tools");
  topo->require_subcommand(1);
  auto* topo_build = topo->add_subcommand("build", "ring construction plus augmentation");
  int blocks = -1, fleet_size = -1;
  topo_build->add_option("--blocks", blocks, "resource blocks (default: fleet.resource_blocks)");
  topo_build->add_option("--fleet-size", fleet_size, "fleet size (default: fleet.size)");

  auto* conv = app.add_subcommand("convergence", "closed-form convergence tools");
  conv->require_subcommand(1);
  auto* conv_curve = conv->add_subcommand("curve", "convergence probability against iterations");
  bool with_oracle = false;
  conv_curve->add_option("--blocks", blocks, "resource blocks");
  conv_curve->add_option("--fleet-size", fleet_size, "fleet size");
  conv_curve->add_flag("--oracle", with_oracle, "add the Monte Carlo propagation estimate");

  auto* sim = app.add_subcommand("simulate", "one training run with full artifacts");
  std::string scheme = "distributed";
  int rounds = -1;
  sim->add_option("--scheme", scheme, "distributed | standalone | centralized | parameter_averaging");
  sim->add_option("--rounds", rounds, "override training.rounds");

  auto* exp = app.add_subcommand("experiment", "reproduce the evaluation studies");
  exp->require_subcommand(1);
  auto* fig3 = exp->add_subcommand("fig3", "convergence against resource blocks");
  auto* fig4 = exp->add_subcommand("fig4", "convergence against fleet size");
  auto* jsd = exp->add_subcommand("jsd", "average JSD per scheme");
  auto* overhead = exp->add_subcommand("overhead", "communication load against resource blocks");
  auto* rate = exp->add_subcommand("rate", "learned versus genie beam rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto c = resolve(opt);
    ordered_json result;
    if (topo_build->parsed()) {
      const int g = fleet_size > 0 ? fleet_size : c.fleet.size;
      const int b = blocks > 0 ? blocks : std::max(c.fleet.resource_blocks, g);
      const auto dir = prepare(opt, c);
      const auto graph = cli::build_topology(c, g, b, topo_seed(c));
      write(dir, "topology.csv", topology::edges_to_csv(graph));
      result = topology::topology_summary(graph);
    } else if (conv_curve->parsed()) {
      const int g = fleet_size > 0 ? fleet_size : c.fleet.size;
      const int b = blocks > 0 ? blocks : std::max(c.fleet.resource_blocks, g);
      const auto dir = prepare(opt, c);
      const auto graph = cli::build_topology(c, g, b, topo_seed(c));
      std::string text;
      if (with_oracle) {
        text = cli::convergence_with_oracle(c, graph, topo_seed(c));
      } else {
        const auto p = cli::convergence_params(c, graph);
        const auto curve = convergence::convergence_curve(p, c.convergence.max_iterations);
        text = "iteration,probability\n";
        for (std::size_t i = 0; i < curve.size(); ++i) {
          csv::Row row;
          row << static_cast<long>(i) << curve[i];
          text += row.str() + "\n";
        }
      }
      write(dir, "convergence.csv", text);
      write(dir, "topology.csv", topology::edges_to_csv(graph));
      const auto p = cli::convergence_params(c, graph);
      result["l_max"] = p.l_max;
      result["l_loop_min"] = p.l_loop_min;
      result["max_in_degree"] = p.in_degree;
      try {
        result["iterations_to_target"] = convergence::iterations_for_target(p);
      } catch (const Error& e) {
        result["iterations_to_target"] = nullptr;
      }
    } else if (sim->parsed()) {
      if (rounds > 0) c.training.rounds = rounds;
      const auto dir = prepare(opt, c);
      const auto scenario = cli::learning_scenario(c, c.fleet.size);
      const auto run = cli::run_learning(c, scenario, protocol::parse_scheme(scheme), topo_seed(c), opt.workers);
      write_run(dir, run);
      result["scheme"] = scheme;
      result["seed"] = run.seed;
      result["final_jsd"] = run.final_jsd;
      result["rate_ratio"] = run.rate.ratio();
      result["shared_load"] = run.metrics.empty() ? 0.0 : run.metrics.back().load_cum;
      result["wall_seconds"] = run.wall_seconds;
    } else if (fig3->parsed() || fig4->parsed()) {
      const auto dir = prepare(opt, c);
      const bool is3 = fig3->parsed();
      const auto study = is3 ? cli::experiment_fig3(c, c.experiments.fig3_blocks, topo_seed(c))
                             : cli::experiment_fig4(c, c.experiments.fig4_fleet_sizes, topo_seed(c));
      const std::string name = is3 ? "fig3" : "fig4";
      const std::string key = is3 ? "blocks" : "fleet_size";
      write(dir, name + ".csv", study.csv);
      write(dir, name + "_summary.csv", study.summary);
      write(dir, name + ".svg", cli::svg_line_plot(study.csv, "iteration", "probability", key,
                                                   "Convergence probability by " + key));
      result["csv"] = (dir / (name + ".csv")).string();
    } else if (jsd->parsed()) {
      const auto dir = prepare(opt, c);
      const auto study = cli::experiment_jsd(c, c.experiments.jsd_schemes, c.training.seeds, opt.workers);
      write(dir, "jsd.csv", study.trace);
      write(dir, "jsd_summary.csv", study.summary);
      write(dir, "jsd.svg", cli::svg_line_plot(study.trace, "round", "jsd", "scheme", "Average JSD"));
      for (const auto& run : study.runs)
        write_run(dir / (std::string(protocol::to_string(run.scheme)) + "_seed" + std::to_string(run.seed)), run);
      for (const auto& run : study.runs)
        result["runs"].push_back({{"scheme", protocol::to_string(run.scheme)},
                                  {"seed", run.seed},
                                  {"final_jsd", run.final_jsd},
                                  {"rate_ratio", run.rate.ratio()},
                                  {"wall_seconds", run.wall_seconds}});
    } else if (overhead->parsed()) {
      const auto dir = prepare(opt, c);
      const auto text = cli::experiment_overhead(c, c.experiments.overhead_blocks, topo_seed(c));
      write(dir, "overhead.csv", text);
      std::string plot = "series,blocks,load\n";
      for (const auto& r : csv::parse_table(text).rows) plot += "fixed_iterations," + r[0] + "," + r[3] + "\n";
      write(dir, "overhead.svg", cli::svg_line_plot(plot, "blocks", "load", "series", "Communication load"));
      result["csv"] = (dir / "overhead.csv").string();
    } else if (rate->parsed()) {
      const auto dir = prepare(opt, c);
      const auto text = cli::experiment_rate(c, c.experiments.rate_fleet_sizes, c.training.seeds, opt.workers);
      write(dir, "rate.csv", text);
      write(dir, "rate.svg", cli::svg_line_plot(text, "fleet_size", "rate_ratio", "seed", "Learned / genie rate"));
      result["csv"] = (dir / "rate.csv").string();
    }
    std::cout << result.dump(2) << std::endl;
    return 0;
  } catch (const Error& e) {
    std::cout << ordered_json{{"error", to_string(e.kind())}, {"message", e.detail()}}.dump() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cout << ordered_json{{"error", "Internal"}, {"message", e.what()}}.dump() << std::endl;
    return 1;
  }
}
