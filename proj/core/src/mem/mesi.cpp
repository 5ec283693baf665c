#include "rvdse/mem/mesi.hpp"

#include <string>

#include "rvdse/error.hpp"

namespace rvdse::mem {

const char* mesi_name(Mesi s) {
  switch (s) {
    case Mesi::Modified: return "MODIFIED";
    case Mesi::Exclusive: return "EXCLUSIVE";
    case Mesi::Shared: return "SHARED";
    case Mesi::Invalid: return "INVALID";
  }
  return "INVALID";
}

const char* bus_msg_name(BusMsg m) {
  switch (m) {
    case BusMsg::NoReq: return "NO_REQ";
    case BusMsg::Read: return "READ";
    case BusMsg::ReadForOwnership: return "READ_FOR_OWNERSHIP";
    case BusMsg::WriteBack: return "WRITE_BACK";
    case BusMsg::FlushReq: return "FLUSH_REQ";
    case BusMsg::InvalidateAck: return "INVALIDATE_ACK";
    case BusMsg::FlushDone: return "FLUSH_DONE";
    case BusMsg::WriteIntent: return "WRITE_INTENT";
    case BusMsg::Flush: return "FLUSH";
    case BusMsg::Invalidate: return "INVALIDATE";
  }
  return "NO_REQ";
}

namespace {
[[noreturn]] void violation(Mesi s, BusMsg m) {
  throw Error(ErrorKind::ProtocolViolation,
              std::string(mesi_name(s)) + " line observed remote " + bus_msg_name(m));
}
}  // namespace

SnoopResult mesi_snoop(Mesi local, BusMsg m) {
  if (local == Mesi::Invalid) return {SnoopAction::None, Mesi::Invalid};
  switch (m) {
    case BusMsg::NoReq:
    case BusMsg::InvalidateAck:
    case BusMsg::FlushDone:
      return {SnoopAction::None, local};
    case BusMsg::Read:
      if (local == Mesi::Modified) return {SnoopAction::WriteBack, Mesi::Shared};
      return {SnoopAction::None, Mesi::Shared};
    case BusMsg::ReadForOwnership:
    case BusMsg::FlushReq:
    case BusMsg::Flush:
      if (local == Mesi::Modified) return {SnoopAction::WriteBackInvalidate, Mesi::Invalid};
      return {SnoopAction::Invalidate, Mesi::Invalid};
    case BusMsg::WriteIntent:
      if (local != Mesi::Shared) violation(local, m);
      return {SnoopAction::Invalidate, Mesi::Invalid};
    case BusMsg::Invalidate:
      return {SnoopAction::Invalidate, Mesi::Invalid};
    case BusMsg::WriteBack:
      // Only an M holder writes back; nobody else may hold the line.
      violation(local, m);
  }
  return {SnoopAction::None, local};
}

LocalWriteResult mesi_local_write(Mesi local) {
  switch (local) {
    case Mesi::Modified:
    case Mesi::Exclusive:
      return {BusMsg::NoReq, Mesi::Modified};
    case Mesi::Shared:
      return {BusMsg::WriteIntent, Mesi::Modified};
    case Mesi::Invalid:
      return {BusMsg::ReadForOwnership, Mesi::Modified};
  }
  return {BusMsg::NoReq, Mesi::Modified};
}

}  // namespace rvdse::mem
