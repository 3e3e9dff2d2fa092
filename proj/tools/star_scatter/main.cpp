#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace cli = star_scatter_cli;

int main(int argc, char **argv)
{
  CLI::App app{"Frequency-domain scattering on star-shaped LC line networks"};
  app.require_subcommand(1);

  cli::ForwardArgs fwd;
  std::string plot;
  CLI::App *forward = app.add_subcommand("forward", "Sweep R1(k) and T_j(k) over a uniform k grid");
  forward->add_option("--config", fwd.config, "Network configuration (JSON)")->required();
  forward->add_option("--kmin", fwd.k_min, "First frequency")->required();
  forward->add_option("--kmax", fwd.k_max, "Last frequency (inclusive)")->required();
  forward->add_option("--dk", fwd.dk, "Frequency step")->required();
  forward->add_option("--out", fwd.out, "Output CSV")->required();
  forward->add_option("--plot", plot, "Also write k, |R1|, arg R1, g(k) to this CSV");

  cli::InvertArgs inv;
  CLI::App *invert = app.add_subcommand("invert", "Recover m and travel times from a reflectogram");
  invert->add_option("--csv", inv.csv, "Reflectogram CSV written by forward")->required();
  invert->add_option("--max-n", inv.max_n, "Maximum number of finite branches to extract")
    ->default_val(8);
  invert->add_option("--out", inv.out, "Output JSON report")->required();

  std::string validate_config;
  CLI::App *validate = app.add_subcommand("validate", "Run the invariant battery on a network");
  validate->add_option("--config", validate_config, "Network configuration (JSON)")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    app.exit(e);
    return cli::kExitConfig;
  }

  try
  {
    if (*forward)
    {
      if (!plot.empty())
      {
        fwd.plot = plot;
      }
      return cli::RunForward(fwd, std::cerr);
    }
    if (*invert)
    {
      return cli::RunInvert(inv, std::cout, std::cerr);
    }
    return cli::RunValidate(validate_config, std::cout, std::cerr);
  }
  catch (const cli::ConfigError &e)
  {
    std::cerr << "error: configuration: " << e.what() << '\n';
    return cli::kExitConfig;
  }
}
