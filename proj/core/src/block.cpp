#include "areon/block.hpp"

#include <bit>

#include "areon/rng.hpp"

namespace areon {

BlockId compute_block_id(const Block& b) {
  std::uint64_t h = 0x41524E2D424C4BULL;
  auto absorb = [&h](std::uint64_t v) { h = rng::mix64(h ^ v); };
  absorb(std::uint64_t(std::uint32_t(b.slot)));
  absorb(b.validator);
  absorb(std::bit_cast<std::uint64_t>(b.y));
  absorb(b.short_refs.size());
  for (BlockId r : b.short_refs) absorb(r);
  absorb(b.long_ref ? 1 : 0);
  if (b.long_ref) absorb(*b.long_ref);
  absorb(b.payload.is_empty ? 1 : 0);
  if (!b.payload.is_empty) {
    absorb(b.payload.tx_id);
    absorb(b.payload.conflict_key);
  }
  absorb(b.auth_valid ? 1 : 0);
  return h ? h : 1;
}

Block make_genesis() {
  Block g;
  g.slot = 0;
  g.validator = kNoValidator;
  g.y = 0.0;
  g.payload.is_empty = true;
  g.auth_valid = true;
  g.id = compute_block_id(g);
  return g;
}

}  // namespace areon
