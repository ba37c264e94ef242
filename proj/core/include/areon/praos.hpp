#pragma once

#include <cstdint>

#include "areon/config.hpp"
#include "areon/sim.hpp"

namespace areon {

// Single-parent longest-chain baseline. Each eligible validator extends its
// current tip; nodes adopt a strictly longer chain and keep the current one
// on ties; reorg depth counts the entries dropped from the old chain. The
// adversary withholds a private extension of the public tip and releases it
// while still strictly ahead once the public chain closes within one block.
//
// DAG-specific outputs (tips, dispersion, liveness) are reported as their
// chain analogues: tips is always 1, the ledger is the chain.
RunResult run_praos(const Config& cfg);

}  // namespace areon
