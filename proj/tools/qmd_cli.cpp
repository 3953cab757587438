#include <string>

#include "CLI11.hpp"
#include "qmd/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "qmd: mixing diagnostics for inhomogeneous quantum channel sequences"};
  std::string config_path;
  app.add_option("config", config_path,
                 "JSON run configuration (self-describing; the 'command' "
                 "field selects analyze-channel, simulate, mps, classical, "
                 "or report)")
      ->required()
      ->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);
  return qmd::run_from_file(config_path);
}
