#pragma once

#include <memory>
#include <string>

#include "areon/dag.hpp"
#include "areon/expected.hpp"

namespace areon {

// Text form of a DAG, one block per line in ascending (slot, y, id) order,
// tab-separated fields:
//
//   id  slot  validator  y  refs  conflict_key  tx_id
//
// id, conflict_key and tx_id are lowercase hex without 0x; y is the shortest
// round-tripping decimal; validator is decimal or '-' for none; refs is
// 'a,b,c|L' (comma-separated short-ref ids, '|', long-ref id), either side
// '-' when empty; conflict_key and tx_id are '-' for an empty payload.
// The first line must be the slot-0 genesis block.
std::string dump_dag(const DagStore& store, const DagView& view);

// The store lives on the heap so the view's back-reference survives moves.
struct ParsedDag {
  std::unique_ptr<DagStore> store;
  DagView view;
};

struct ParseError {
  int line = 0;
  std::string message;
};

// Inverse of dump_dag. Lines may arrive in any order; blocks are inserted in
// key order, which is reference-safe because references point to strictly
// older slots.
Expected<ParsedDag, ParseError> parse_dag(const std::string& text);

}  // namespace areon
