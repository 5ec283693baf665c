#pragma once

#include <cstdint>

namespace rvdse::mem {

enum class Mesi : std::uint8_t { Modified, Exclusive, Shared, Invalid };

// 4-bit bus message kinds. The numeric values are ours.
enum class BusMsg : std::uint8_t {
  NoReq = 0,
  Read = 1,
  ReadForOwnership = 2,
  WriteBack = 3,
  FlushReq = 4,        // L2 asks L1s to give up a line it is evicting
  InvalidateAck = 5,
  FlushDone = 6,
  WriteIntent = 7,     // S -> M upgrade
  Flush = 8,           // processor flush of a line, whole hierarchy
  Invalidate = 9,      // processor invalidate of a line, whole hierarchy
};

const char* mesi_name(Mesi s);
const char* bus_msg_name(BusMsg m);

enum class SnoopAction : std::uint8_t {
  None,
  WriteBack,            // supply the dirty line on the bus, keep a copy
  Invalidate,           // drop the line and acknowledge
  WriteBackInvalidate,  // supply the dirty line, then drop it
};

struct SnoopResult {
  SnoopAction action = SnoopAction::None;
  Mesi next = Mesi::Invalid;
  bool operator==(const SnoopResult&) const = default;
};

// Reaction of a cache holding a line in `local` to another cache's message
// for that line. Throws ProtocolViolation for pairs that cannot occur in a
// coherent system (e.g. E/M while someone else upgrades from S).
SnoopResult mesi_snoop(Mesi local, BusMsg observed);

struct LocalWriteResult {
  BusMsg bus = BusMsg::NoReq;  // NoReq: silent
  Mesi next = Mesi::Modified;
  bool operator==(const LocalWriteResult&) const = default;
};

// Processor write to a line in `local`. Invalid means a write miss.
LocalWriteResult mesi_local_write(Mesi local);

}  // namespace rvdse::mem
