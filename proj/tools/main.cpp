#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "biharm/cli/cli.hpp"
#include "biharm/errors.hpp"

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw biharm::ConfigError("cannot open output file '" + path + "'");
  f << content;
  if (!f) throw biharm::ConfigError("failed writing to '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw biharm::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verifies closed-form biharmonicity conditions for holomorphic maps "
               "between Hermitian charts"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "json", cond_id, example;
  int points = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;

  CLI::App* verify = app.add_subcommand("verify", "run a config file and write reports");
  verify->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  CLI::Option* opt_points =
      verify->add_option("--points", points, "sample count override")->check(CLI::PositiveNumber);
  CLI::Option* opt_seed = verify->add_option("--seed", seed, "sampler seed override");
  CLI::Option* opt_tol =
      verify->add_option("--tol", tol, "tolerance override")->check(CLI::PositiveNumber);
  verify->add_option("--out", out_path, "output path (stem when --format both)");
  verify->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "csv", "both"}));

  app.add_subcommand("list-examples", "table of the built-in example bundles");

  CLI::App* explain_cmd =
      app.add_subcommand("explain", "equation and tolerance semantics of a condition id");
  explain_cmd->add_option("id", cond_id, "condition id")->required();

  CLI::App* export_cmd =
      app.add_subcommand("export-example", "write a built-in bundle as a config file");
  export_cmd->add_option("name", example, "bundle name")->required();
  export_cmd->add_option("--out", out_path, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) {
      biharm::cli::RunConfig cfg = biharm::cli::parse_config(read_file(config_path));
      if (opt_points->count() > 0) cfg.run.points = points;
      if (opt_seed->count() > 0) cfg.run.seed = seed;
      if (opt_tol->count() > 0) cfg.run.tol = tol;
      if (format == "both" && out_path.empty())
        throw biharm::ConfigError("--format both requires --out");

      const biharm::cli::RunReport rep = biharm::cli::run_verify(cfg);
      for (const std::string& d : rep.diagnostics) std::cerr << d << "\n";

      if (format == "json" || format == "both") {
        const std::string json = biharm::cli::to_json(rep);
        const std::string path = format == "both" ? out_path + ".json" : out_path;
        if (path.empty())
          std::cout << json;
        else
          write_file(path, json);
      }
      if (format == "csv" || format == "both") {
        const std::string csv = biharm::cli::to_csv(rep);
        const std::string path = format == "both" ? out_path + ".csv" : out_path;
        if (path.empty())
          std::cout << csv;
        else
          write_file(path, csv);
      }
      if (!out_path.empty())
        std::cerr << rep.items.size() << " items, exit status " << rep.exit_code << "\n";
      return rep.exit_code;
    }
    if (app.get_subcommand("list-examples")->parsed()) {
      std::cout << biharm::cli::list_examples();
      return 0;
    }
    if (explain_cmd->parsed()) {
      std::cout << biharm::cli::explain(cond_id);
      return 0;
    }
    if (export_cmd->parsed()) {
      const std::string text = biharm::cli::export_example(example);
      if (out_path.empty())
        std::cout << text;
      else
        write_file(out_path, text);
      return 0;
    }
  } catch (const biharm::PreconditionError& e) {
    std::cerr << "precondition failure: " << e.what() << "\n";
    return 3;
  } catch (const biharm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const biharm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
