#pragma once

// Subcommand registration. Each run function returns the process exit code
// or throws; main maps exceptions onto the exit-code contract.

#include <functional>
#include <vector>

namespace CLI {
class App;
}

namespace momlab::cli {

struct Command {
  CLI::App* app;
  std::function<int()> run;
};

std::vector<Command> register_commands(CLI::App& app);

/// Parses argv (with `--config` files expanded in front of the flags) and
/// runs the selected subcommand.
int run(int argc, char** argv);

}  // namespace momlab::cli
