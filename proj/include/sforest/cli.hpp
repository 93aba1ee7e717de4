#pragma once

#include <json.hpp>

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sforest/io.hpp"
#include "sforest/rational.hpp"

namespace sforest {

using Json = nlohmann::ordered_json;

// Exit codes of cli_main.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;  // also: instance rejected by the sp solver
inline constexpr int kExitUsage = 2;       // usage or parse error
inline constexpr int kExitSelfCheck = 3;   // an envelope failed its own re-verification
inline constexpr int kExitLimit = 4;       // a configured size cap was exceeded

class SelfCheckFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveRequest {
    std::string algorithm;  // gw, pc-cluster, sp, tw-ptas, pipeline, oracle
    Rational eps{1};
    int k = 3;
};

const std::vector<std::string>& algorithm_names();

// Runs one algorithm and returns its verified envelope. Throws Infeasible,
// NotSeriesParallel, LimitExceeded, InvalidInput, or SelfCheckFailed.
Json solve_envelope(const InstanceFile& inst, const SolveRequest& req);

// Empty when the envelope is consistent with the instance.
std::vector<std::string> check_envelope(const InstanceFile& inst, const Json& env);

// NDJSON lines {"t":"num/den","kind":...,"args":[...]} with 1-based ids.
std::string growth_trace_ndjson(const InstanceFile& inst, const Rational& eps);

// args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sforest
