// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit status 0 only when all criteria pass.

#include <cstdlib>

#include "flowlab/cli/verify.hpp"

int main() {
    flowlab::VerifyOptions opt;
    opt.out_dir = "acceptance_out";
    if (const char* env = std::getenv("FLOWLAB_OUT")) opt.out_dir = env;
    const auto results = flowlab::run_acceptance(opt);
    return flowlab::print_and_summarize(results);
}
