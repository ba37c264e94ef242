#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace areon {

using BlockId = std::uint64_t;
using Vid = std::uint32_t;

inline constexpr Vid kNoValidator = 0xFFFFFFFFu;

struct Payload {
  std::uint64_t tx_id = 0;
  std::uint64_t conflict_key = 0;
  bool is_empty = true;
};

// Two payloads conflict when both are non-empty, contend for the same key,
// and carry different transactions. Equal tx_id means the same transaction
// and is never a conflict.
inline bool conflicts(const Payload& a, const Payload& b) {
  return !a.is_empty && !b.is_empty && a.conflict_key == b.conflict_key &&
         a.tx_id != b.tx_id;
}

struct Block {
  BlockId id = 0;
  std::int32_t slot = 0;
  Vid validator = kNoValidator;
  double y = 0.0;
  std::vector<BlockId> short_refs;
  std::optional<BlockId> long_ref;
  Payload payload;
  bool auth_valid = true;
};

// Total order used everywhere a deterministic tie-break is needed:
// (slot, y, id) ascending.
struct BlockKey {
  std::int32_t slot = 0;
  double y = 0.0;
  BlockId id = 0;

  friend bool operator<(const BlockKey& a, const BlockKey& b) {
    if (a.slot != b.slot) return a.slot < b.slot;
    if (a.y != b.y) return a.y < b.y;
    return a.id < b.id;
  }
  friend bool operator==(const BlockKey& a, const BlockKey& b) {
    return a.slot == b.slot && a.y == b.y && a.id == b.id;
  }
};

// Content digest over every field except the id itself; block identity is a
// function of what the block says.
BlockId compute_block_id(const Block& b);

Block make_genesis();

}  // namespace areon
