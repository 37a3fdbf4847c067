#pragma once

#include <ostream>
#include <string>
#include <vector>

// The command-line tools as functions, so tests can drive them in-process.
// Arguments exclude the program name. Return values are exit codes.
namespace neno::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int error = 1;        // usage, parse/compile errors, missing class/method/machine
inline constexpr int unreachable = 2;  // store cannot be reached
inline constexpr int fault = 3;        // the machine faulted
inline constexpr int claimed = 4;      // another process holds the machine
} // namespace exit_code

// Environment variable naming the default store target.
inline constexpr const char* kStoreEnv = "NENO_STORE";

// nenofhat FILE... [-o ntriple] [-t TARGET] [--seed N] [--ontology]
int nenofhat(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// fhat -vmc neno:Fhat -c CLASS -cm METHOD [-t TARGET]   fresh machine
// fhat -vmi MACHINE [-t TARGET]                        resume a halted one
//      [--engine fhat|rfhat] [--max-steps N] [--seed N] [--reuse BOOL] [--steal]
int fhat(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// neno-store [--host H] [--port P] [--data FILE]
int store_server(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace neno::cli
