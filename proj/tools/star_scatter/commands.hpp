#ifndef STAR_SCATTER_COMMANDS_HPP
#define STAR_SCATTER_COMMANDS_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>

namespace star_scatter_cli
{

enum ExitCode : int
{
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitInsufficientData = 4,
  kExitValidation = 5
};

struct ForwardArgs
{
  std::filesystem::path config;
  double k_min = 0.0;
  double k_max = 0.0;
  double dk = 0.0;
  std::filesystem::path out;
  std::optional<std::filesystem::path> plot;
  unsigned threads = 0;  // 0: DefaultThreadCount()
};

struct InvertArgs
{
  std::filesystem::path csv;
  std::size_t max_n = 8;
  std::filesystem::path out;
};

int RunForward(const ForwardArgs &args, std::ostream &log);
int RunInvert(const InvertArgs &args, std::ostream &out, std::ostream &log);
int RunValidate(const std::filesystem::path &config, std::ostream &out, std::ostream &log);

}  // namespace star_scatter_cli

#endif  // STAR_SCATTER_COMMANDS_HPP
