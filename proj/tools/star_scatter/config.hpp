#ifndef STAR_SCATTER_CONFIG_HPP
#define STAR_SCATTER_CONFIG_HPP

#include <filesystem>
#include <string>

#include <starscatter/scattering.hpp>

namespace star_scatter_cli
{

// Malformed or inconsistent network configuration. key names the offending JSON path,
// e.g. "branches[2].direct.tau".
class ConfigError : public std::runtime_error
{
public:
  ConfigError(std::string key, const std::string &what);
  const std::string &Key() const { return key_; }

private:
  std::string key_;
};

struct NetworkConfig
{
  starscatter::StarNetwork network;
  starscatter::SolverOptions solver;
  std::filesystem::path source;
};

inline constexpr int kSchemaVersion = 1;

// Reads a JSON network description. Relative table paths resolve against the directory
// of the configuration file.
NetworkConfig LoadNetworkConfig(const std::filesystem::path &path);
NetworkConfig ParseNetworkConfig(const std::string &text, const std::filesystem::path &base_dir);

}  // namespace star_scatter_cli

#endif  // STAR_SCATTER_CONFIG_HPP
