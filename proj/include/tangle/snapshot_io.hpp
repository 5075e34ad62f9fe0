#pragma once

// Line-oriented Tangle snapshots:
//
//   #tangle lambda=<λ> policy=<sem|mem> seed=<seed> h=<reveal delay>
//   id,issue_time,reveal_time[,approvee1[,approvee2]],provenance
//
// Genesis is the only line without approvees. Times use the shortest
// round-trip decimal form, so write(read(file)) reproduces the file exactly.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "tangle.hpp"

namespace tangle {

struct SnapshotMeta {
    double lambda = 0.0;
    EdgePolicy policy = EdgePolicy::sem;
    std::uint64_t seed = 0;
};

inline void write_snapshot(std::ostream& out, const Tangle& t, const SnapshotMeta& meta) {
    out << "#tangle lambda=" << format_double(meta.lambda) << " policy=" << to_string(t.policy())
        << " seed=" << meta.seed << " h=" << format_double(t.reveal_delay()) << '\n';
    for (const Transaction& tx : t.transactions()) {
        out << tx.id << ',' << format_double(tx.issue_time) << ',' << format_double(tx.reveal_time);
        for (TxId a : tx.approvees()) out << ',' << a;
        out << ',' << to_string(tx.provenance) << '\n';
    }
}

struct Snapshot {
    SnapshotMeta meta;
    Tangle tangle;
};

inline Snapshot read_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("#tangle", 0) != 0) throw Error("missing #tangle header line");
    SnapshotMeta meta;
    Time h = 1.0;
    for (auto field : split(std::string_view(line).substr(7), ' ')) {
        if (field.empty()) continue;
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) throw Error("malformed header field");
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "lambda") meta.lambda = parse_double(value);
        else if (key == "policy") meta.policy = parse_edge_policy(value);
        else if (key == "seed") meta.seed = parse_uint(value);
        else if (key == "h") h = parse_double(value);
    }
    Snapshot snap{meta, Tangle(meta.policy, h)};
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() < 4 || cells.size() > 6) throw Error("malformed snapshot line " + std::to_string(lineno));
        const auto id = static_cast<TxId>(parse_uint(cells[0]));
        const Time issue = parse_double(cells[1]);
        const Time reveal = parse_double(cells[2]);
        const Provenance prov = parse_provenance(cells.back());
        std::vector<TxId> approvees;
        for (std::size_t i = 3; i + 1 < cells.size(); ++i) approvees.push_back(static_cast<TxId>(parse_uint(cells[i])));
        if (id == kGenesis) {
            if (!approvees.empty()) throw Error("genesis cannot approve transactions");
            continue;
        }
        if (id != snap.tangle.size()) throw Error("snapshot ids must be dense and ordered");
        snap.tangle.attach(issue, approvees, prov, reveal);
    }
    return snap;
}

} // namespace tangle
