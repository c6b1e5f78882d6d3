#include "rotcav/cli/app.hpp"

int main(int argc, char** argv) { return rotcav::cli::run(argc, argv); }
