// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/cli.hpp"

int main(int argc, char** argv) { return tsvlm::run_cli(argc, argv); }
