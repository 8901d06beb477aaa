#include "aoi/geometry.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <random>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace aoi::geo {

namespace {

std::int64_t lattice_index(double coord, double width, std::int64_t count) {
  const auto idx = static_cast<std::int64_t>(std::floor(coord / width));
  return std::clamp<std::int64_t>(idx, 0, count - 1);
}

}  // namespace

CellIndex Network::cell_of(Point p) const {
  const double w = cell_width();
  return {lattice_index(p.y, w, grid.cells_per_side), lattice_index(p.x, w, grid.cells_per_side)};
}

CellIndex Network::subcell_of(Point p) const {
  const double w = subcell_width();
  const std::int64_t side = grid.cells_per_side * grid.subcells_per_side;
  return {lattice_index(p.y, w, side), lattice_index(p.x, w, side)};
}

std::int64_t Network::cell_id(Point p) const {
  const auto c = cell_of(p);
  return c.row * grid.cells_per_side + c.col;
}

void Network::validate() const {
  if (!(area_side > 0.0)) throw std::invalid_argument("network: area side must be positive");
  if (grid.cells_per_side < 1 || grid.subcells_per_side < 1) {
    throw std::invalid_argument("network: grid side counts must be >= 1");
  }
  for (const auto& p : positions) {
    if (p.x < 0.0 || p.x > area_side || p.y < 0.0 || p.y > area_side) {
      throw std::invalid_argument("network: node outside the square");
    }
  }
  if (pairing.size() != positions.size()) {
    throw std::invalid_argument("network: pairing size mismatch");
  }
  std::vector<bool> seen(pairing.size(), false);
  for (std::size_t i = 0; i < pairing.size(); ++i) {
    const std::size_t d = pairing[i];
    if (d >= pairing.size() || seen[d]) throw std::invalid_argument("network: pairing not a permutation");
    if (d == i) throw std::invalid_argument("network: node paired with itself");
    seen[d] = true;
  }
}

Network generate_network(std::size_t n, double area_side, GridSpec grid, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("network: need at least 2 nodes");
  Network net;
  net.area_side = area_side;
  net.grid = grid;
  std::uniform_real_distribution<double> coord{0.0, area_side};
  net.positions.resize(n);
  for (auto& p : net.positions) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  net.pairing.resize(n);
  auto has_fixed_point = [&net] {
    for (std::size_t i = 0; i < net.pairing.size(); ++i) {
      if (net.pairing[i] == i) return true;
    }
    return false;
  };
  do {
    std::iota(net.pairing.begin(), net.pairing.end(), std::size_t{0});
    std::shuffle(net.pairing.begin(), net.pairing.end(), rng);
  } while (has_fixed_point());
  net.validate();
  return net;
}

void write_network_csv(const Network& net, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "node_id,x,y,dest_id\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    out << i << ',' << net.positions[i].x << ',' << net.positions[i].y << ',' << net.pairing[i]
        << '\n';
  }
  out.precision(old_precision);
}

Network read_network_csv(std::istream& in, double area_side, GridSpec grid) {
  std::string line;
  if (!std::getline(in, line) || line != "node_id,x,y,dest_id") {
    throw std::invalid_argument("network csv: missing header node_id,x,y,dest_id");
  }
  Network net;
  net.area_side = area_side;
  net.grid = grid;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t id = 0;
    std::size_t dest = 0;
    Point p;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(row >> id >> c1 >> p.x >> c2 >> p.y >> c3 >> dest) || c1 != ',' || c2 != ',' ||
        c3 != ',') {
      throw std::invalid_argument("network csv: malformed row: " + line);
    }
    if (id != net.positions.size()) throw std::invalid_argument("network csv: ids must be 0..n-1");
    net.positions.push_back(p);
    net.pairing.push_back(dest);
  }
  net.validate();
  return net;
}

// ---- protocol model -------------------------------------------------------

namespace {

void check_receiver(const ActivationSet& set, std::size_t j, std::vector<Violation>& out) {
  const Link& own = set.links[j];
  const double intended = distance(own.receiver, own.transmitter);
  const double guard = (1.0 + set.gamma) * intended;
  for (std::size_t k = 0; k < set.links.size(); ++k) {
    if (k == j) continue;
    const double d = distance(own.receiver, set.links[k].transmitter);
    if (d < guard) out.push_back({j, k, intended, d});
  }
}

void require_gamma(double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("protocol model: gamma must be >= 0");
}

}  // namespace

ProtocolVerdict check_protocol_model_serial(const ActivationSet& set) {
  require_gamma(set.gamma);
  ProtocolVerdict verdict;
  for (std::size_t j = 0; j < set.links.size(); ++j) check_receiver(set, j, verdict.violations);
  verdict.feasible = verdict.violations.empty();
  return verdict;
}

ProtocolVerdict check_protocol_model(const ActivationSet& set) {
  require_gamma(set.gamma);
  const auto count = static_cast<std::int64_t>(set.links.size());
  std::vector<std::vector<Violation>> per_receiver(set.links.size());
#pragma omp parallel for schedule(static) if (count > 256)
  for (std::int64_t j = 0; j < count; ++j) {
    check_receiver(set, static_cast<std::size_t>(j), per_receiver[static_cast<std::size_t>(j)]);
  }
  ProtocolVerdict verdict;
  for (auto& v : per_receiver) {
    verdict.violations.insert(verdict.violations.end(), v.begin(), v.end());
  }
  verdict.feasible = verdict.violations.empty();
  return verdict;
}

std::array<std::vector<CellIndex>, 9> nine_tdma_schedule(std::int64_t grid_side) {
  if (grid_side < 1) throw std::invalid_argument("9-TDMA: grid side must be >= 1");
  std::array<std::vector<CellIndex>, 9> slots;
  for (std::int64_t r = 0; r < grid_side; ++r) {
    for (std::int64_t c = 0; c < grid_side; ++c) slots[(r % 3) * 3 + c % 3].push_back({r, c});
  }
  return slots;
}

// ---- 9-TDMA validation ----------------------------------------------------

namespace {

struct Box {
  double x0, y0, x1, y1;

  Point closest_to(Point p) const { return {std::clamp(p.x, x0, x1), std::clamp(p.y, y0, y1)}; }
  Point farthest_from(Point p) const {
    return {p.x - x0 > x1 - p.x ? x0 : x1, p.y - y0 > y1 - p.y ? y0 : y1};
  }
  std::array<Point, 4> corners() const { return {{{x0, y0}, {x1, y0}, {x0, y1}, {x1, y1}}}; }
};

Box cell_box(CellIndex c, double width) {
  const double x0 = static_cast<double>(c.col) * width;
  const double y0 = static_cast<double>(c.row) * width;
  return {x0, y0, x0 + width, y0 + width};
}

void finish(TdmaVerdict& v) {
  v.feasible = v.violations.empty();
  for (const auto& viol : v.violations) ++v.slot_violations[static_cast<std::size_t>(viol.slot)];
}

}  // namespace

TdmaVerdict validate_tdma_worst_case(std::int64_t grid_side, double cell_width, double gamma) {
  require_gamma(gamma);
  if (!(cell_width > 0.0)) throw std::invalid_argument("9-TDMA: cell width must be positive");
  const auto slots = nine_tdma_schedule(grid_side);
  TdmaVerdict verdict;
  verdict.gamma = gamma;
  verdict.grid_side = grid_side;

  for (int s = 0; s < 9; ++s) {
    const auto& cells = slots[static_cast<std::size_t>(s)];
    verdict.active_cells[static_cast<std::size_t>(s)] = cells.size();
    for (std::size_t v = 0; v < cells.size(); ++v) {
      const Box victim = cell_box(cells[v], cell_width);
      for (const Point rx : victim.corners()) {
        // Link 0 spans the victim diagonal; link i > 0 transmits from the point
        // of cell `others[i-1]` nearest to rx.
        ActivationSet set;
        set.gamma = gamma;
        set.links.push_back({victim.farthest_from(rx), rx});
        std::vector<std::size_t> others;
        for (std::size_t o = 0; o < cells.size(); ++o) {
          if (o == v) continue;
          const Box box = cell_box(cells[o], cell_width);
          const Point tx = box.closest_to(rx);
          set.links.push_back({tx, box.farthest_from(tx)});
          others.push_back(o);
        }
        ++verdict.scenarios_checked;
        for (const auto& viol : check_protocol_model_serial(set).violations) {
          if (viol.receiver_link != 0) continue;
          verdict.violations.push_back({s, cells[v], cells[others[viol.interferer_link - 1]],
                                        viol.intended_distance, viol.interferer_distance});
        }
      }
    }
  }
  finish(verdict);
  return verdict;
}

TdmaVerdict validate_tdma_against_protocol(const Network& net, double gamma, bool worst_case,
                                           TdmaLevel level) {
  net.validate();
  const bool sub = level == TdmaLevel::kSubcell;
  const std::int64_t side = sub ? net.grid.cells_per_side * net.grid.subcells_per_side
                                : net.grid.cells_per_side;
  const double width = sub ? net.subcell_width() : net.cell_width();
  if (worst_case) return validate_tdma_worst_case(side, width, gamma);

  require_gamma(gamma);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(side * side));
  for (std::size_t i = 0; i < net.size(); ++i) {
    const CellIndex c = sub ? net.subcell_of(net.positions[i]) : net.cell_of(net.positions[i]);
    members[static_cast<std::size_t>(c.row * side + c.col)].push_back(i);
  }

  const auto slots = nine_tdma_schedule(side);
  TdmaVerdict verdict;
  verdict.gamma = gamma;
  verdict.grid_side = side;
  for (int s = 0; s < 9; ++s) {
    ActivationSet set;
    set.gamma = gamma;
    std::vector<CellIndex> owner;
    for (const CellIndex& c : slots[static_cast<std::size_t>(s)]) {
      const auto& nodes = members[static_cast<std::size_t>(c.row * side + c.col)];
      if (nodes.size() < 2) continue;
      std::size_t best_i = nodes[0];
      std::size_t best_j = nodes[1];
      double best = -1.0;
      for (std::size_t p = 0; p < nodes.size(); ++p) {
        for (std::size_t q = p + 1; q < nodes.size(); ++q) {
          const double d = distance(net.positions[nodes[p]], net.positions[nodes[q]]);
          if (d > best) {
            best = d;
            best_i = nodes[p];
            best_j = nodes[q];
          }
        }
      }
      set.links.push_back({net.positions[best_i], net.positions[best_j]});
      owner.push_back(c);
    }
    verdict.active_cells[static_cast<std::size_t>(s)] = set.links.size();
    ++verdict.scenarios_checked;
    for (const auto& viol : check_protocol_model(set).violations) {
      verdict.violations.push_back({s, owner[viol.receiver_link], owner[viol.interferer_link],
                                    viol.intended_distance, viol.interferer_distance});
    }
  }
  finish(verdict);
  return verdict;
}

}  // namespace aoi::geo
