#include <rra/cli.hpp>

int main(int argc, char** argv) { return rra::cli::run(argc, argv); }
