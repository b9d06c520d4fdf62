#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "bridged/diagram.hpp"

// Internal port-level view of a diagram: every tile leg and boundary endpoint
// is a port; wires join open ends between slices, mates join legs through a
// tile (or through a coupon pair's handle). Shared by tracing, validation,
// admissibility, and the move engine's redex inspection.
namespace bridged::detail {

enum PortRole : uint8_t {
  PBottom, PTop, PCupL, PCupR, PCapL, PCapR,
  PXInL, PXInR, PXOutL, PXOutR, PCinSlot, PCoutSlot
};

struct PortMeta {
  int panel = -1, slice = -1, pos = -1;  // slice -1 for boundary ports
  uint8_t role = PBottom;
};

struct PortGraph {
  const Diagram* d = nullptr;
  int nports = 0;
  std::vector<int> wire;          // partner across a vertical segment, -1 none
  std::vector<int> mate;          // partner through the tile / coupon handle
  std::vector<uint8_t> mate_rel;  // 1 if directions are opposite across mate
  std::vector<int8_t> pin;        // declared direction: 0 none, +1 up, -1 down
  std::vector<PortMeta> meta;
  std::vector<int> slot_of, cross_of, pair_of;  // -1 where not applicable

  struct XRec {
    int panel, slice, pos, tsign;
    int inL, inR, outL, outR;
  };
  std::vector<XRec> xs;
  std::vector<CouponLoc> coupons;                    // per pair id
  std::vector<std::vector<int>> cin_ports, cout_ports;
  std::vector<int> bottom_ports, top_ports;

  std::vector<int8_t> bit;  // resolved directions (after solve)

  // levels[panel][s] = live (up-facing) ports at the boundary just below
  // word[s]; index word.size() is the top of the panel. Filled by build().
  std::vector<std::vector<std::vector<int>>> levels;

  // Simulates the slice words; structural errors are appended. Returns false
  // if the structure is too broken to continue.
  bool build(const Diagram& dia, std::vector<ValidationError>& errs);
  // Parity-solves direction constraints (optionally with the b-strip closure
  // relations); on conflict appends one error carrying a cycle witness.
  bool solve_dirs(bool with_bstrips, std::vector<ValidationError>& errs);
};

std::vector<ValidationError> direction_errors(const Diagram& d);

}  // namespace bridged::detail
