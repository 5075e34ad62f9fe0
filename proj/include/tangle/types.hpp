#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tangle {

/// Dense transaction index; assigned in issue-time order, genesis is 0.
using TxId = std::uint32_t;

/// Simulation time in units of the reveal delay h.
using Time = double;

inline constexpr TxId kGenesis = 0;
inline constexpr Time kNever = std::numeric_limits<Time>::infinity();

enum class Provenance : std::uint8_t { honest, malicious };

/// What happens when both tip selections return the same tip.
/// sem: one edge is created. mem: two edges to the same tx.
enum class EdgePolicy : std::uint8_t { sem, mem };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string_view to_string(Provenance p) {
    return p == Provenance::honest ? "honest" : "malicious";
}

inline std::string_view to_string(EdgePolicy p) {
    return p == EdgePolicy::sem ? "sem" : "mem";
}

inline Provenance parse_provenance(std::string_view s) {
    if (s == "honest") return Provenance::honest;
    if (s == "malicious") return Provenance::malicious;
    throw Error("unknown provenance: " + std::string(s));
}

inline EdgePolicy parse_edge_policy(std::string_view s) {
    if (s == "sem" || s == "SEM") return EdgePolicy::sem;
    if (s == "mem" || s == "MEM") return EdgePolicy::mem;
    throw Error("unknown edge policy: " + std::string(s));
}

} // namespace tangle
