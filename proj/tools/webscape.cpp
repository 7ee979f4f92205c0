#include <unistd.h>

#include <iostream>
#include <string>
#include <vector>

#include "webscape/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    webscape::CliContext context;
    context.interactive = isatty(STDIN_FILENO) != 0;
    return webscape::run_cli(args, std::cin, std::cout, std::cerr, context);
}
