#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pslip/config.hpp"

namespace pslip {

enum class Engine { classical, quantum, bifurcation };

[[nodiscard]] const char* engine_name(Engine e);

// Regime after resolving `auto`. In the crossover between the damping limits
// the underdamped engine is primary and the bifurcation engine is added
// when it applies.
struct ResolvedRegime {
    Engine engine = Engine::quantum;
    bool also_bifurcation = false;
    std::vector<std::string> warnings;
};

[[nodiscard]] ResolvedRegime resolve_regime(const RunConfig& c, const OscParams& p);

struct CommandIO {
    std::ostream& out;       // data when no prefix is given, selfcheck report
    std::ostream& err;       // warnings
    std::optional<std::string> prefix;
    unsigned threads = 1;
};

// Each returns the process exit status; engine errors propagate as exceptions.
int cmd_rate(const RunConfig& c, CommandIO& io);
int cmd_spectrum(const RunConfig& c, CommandIO& io);
int cmd_portrait(const RunConfig& c, CommandIO& io);
int cmd_selfcheck(const RunConfig& c, CommandIO& io);

struct CheckResult {
    std::string id;  // module/invariant
    bool pass = false;
    std::string detail;
};

[[nodiscard]] std::vector<CheckResult> run_selfcheck(const RunConfig& c);

}  // namespace pslip
