#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "aoi/rng.hpp"

namespace aoi::geo {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

struct CellIndex {
  std::int64_t row = 0;
  std::int64_t col = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// cells_per_side^2 equal cells, each split into subcells_per_side^2 subcells.
struct GridSpec {
  std::int64_t cells_per_side = 1;
  std::int64_t subcells_per_side = 1;
};

/// Nodes on the square [0, area_side]^2 with a source -> destination map.
struct Network {
  double area_side = 1.0;
  std::vector<Point> positions;
  std::vector<std::size_t> pairing;  ///< pairing[i] is node i's destination
  GridSpec grid;

  std::size_t size() const { return positions.size(); }
  double cell_width() const { return area_side / static_cast<double>(grid.cells_per_side); }
  double subcell_width() const {
    return cell_width() / static_cast<double>(grid.subcells_per_side);
  }
  CellIndex cell_of(Point p) const;
  /// Subcell coordinates on the global subcell lattice.
  CellIndex subcell_of(Point p) const;
  std::int64_t cell_id(Point p) const;

  /// Throws std::invalid_argument on points outside the square, a pairing
  /// that is not a fixed-point-free permutation, or side counts < 1.
  void validate() const;
};

/// Uniform i.i.d. placement and a uniformly random derangement (rejection
/// over shuffles). Requires n >= 2.
Network generate_network(std::size_t n, double area_side, GridSpec grid, RngStream& rng);

/// CSV with header `node_id,x,y,dest_id`, one row per node.
void write_network_csv(const Network& net, std::ostream& out);
Network read_network_csv(std::istream& in, double area_side, GridSpec grid);

struct Link {
  Point transmitter;
  Point receiver;
};

struct ActivationSet {
  std::vector<Link> links;
  double gamma = 0.0;
};

/// Receiver of links[receiver_link] is too close to the transmitter of
/// links[interferer_link].
struct Violation {
  std::size_t receiver_link = 0;
  std::size_t interferer_link = 0;
  double intended_distance = 0.0;
  double interferer_distance = 0.0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ProtocolVerdict {
  bool feasible = true;
  std::vector<Violation> violations;  ///< ordered by (receiver_link, interferer_link)
};

/// Protocol model: every receiver j with transmitter i needs
/// d(j, k) >= (1 + gamma) d(j, i) for every other active transmitter k.
/// Receivers are checked in parallel.
ProtocolVerdict check_protocol_model(const ActivationSet& set);

/// Single-threaded reference of check_protocol_model.
ProtocolVerdict check_protocol_model_serial(const ActivationSet& set);

/// Nine slots keyed by (row mod 3) * 3 + (col mod 3); slot s lists its cells
/// in row-major order.
std::array<std::vector<CellIndex>, 9> nine_tdma_schedule(std::int64_t grid_side);

struct TdmaViolation {
  int slot = 0;
  CellIndex victim_cell;
  CellIndex interferer_cell;
  double intended_distance = 0.0;
  double interferer_distance = 0.0;
};

struct TdmaVerdict {
  bool feasible = true;
  double gamma = 0.0;
  std::int64_t grid_side = 0;
  std::array<std::size_t, 9> active_cells{};
  std::array<std::size_t, 9> slot_violations{};
  std::size_t scenarios_checked = 0;
  std::vector<TdmaViolation> violations;
};

/// Worst case on a grid_side x grid_side lattice of square cells.
TdmaVerdict validate_tdma_worst_case(std::int64_t grid_side, double cell_width, double gamma);

enum class TdmaLevel { kCell, kSubcell };

/// 9-TDMA check of a network.
///
/// worst_case: geometry only. Every active cell hosts a link spanning its
/// diagonal with the receiver at each corner in turn, and each other cell of
/// the slot transmits from its point closest to that receiver. For cells of
/// width w the nearest same-slot cell lies 2w away edge to edge, so the check
/// 2w >= (1 + gamma) * sqrt(2) w holds exactly when gamma <= sqrt(2) - 1.
///
/// Otherwise: in each active cell the two nodes farthest apart form the
/// link (lower id transmits) and all such links of the slot are checked
/// together. Cells with fewer than two nodes stay silent.
TdmaVerdict validate_tdma_against_protocol(const Network& net, double gamma, bool worst_case,
                                           TdmaLevel level = TdmaLevel::kCell);

}  // namespace aoi::geo
