#include "torimem/lattice.hpp"

namespace torimem {

LatticeGeometry::LatticeGeometry(int size) : L_(size) {
  if (size < 2)
    throw std::invalid_argument("lattice size must be >= 2 (homology is ill-defined below)");

  const int n = n_edges();
  edge_faces_.resize(n);
  edge_stars_.resize(n);
  face_edges_.resize(n_sites());
  star_edges_.resize(n_sites());
  cut_mask_.assign(n, 0);

  for (int y = 0; y < L_; ++y) {
    for (int x = 0; x < L_; ++x) {
      const int eh = edge_index(x, y, kHorizontal);
      const int ev = edge_index(x, y, kVertical);

      // horizontal edge (x,y): top of face (x,y-1), bottom of face (x,y)
      edge_faces_[eh] = {site_index(x, y), site_index(x, y - 1)};
      // vertical edge (x,y): right of face (x-1,y), left of face (x,y)
      edge_faces_[ev] = {site_index(x, y), site_index(x - 1, y)};

      edge_stars_[eh] = {site_index(x, y), site_index(x + 1, y)};
      edge_stars_[ev] = {site_index(x, y), site_index(x, y + 1)};

      const int f = site_index(x, y);
      face_edges_[f] = {edge_index(x, y, kHorizontal), edge_index(x, y + 1, kHorizontal),
                        edge_index(x, y, kVertical), edge_index(x + 1, y, kVertical)};

      const int s = site_index(x, y);
      star_edges_[s] = {edge_index(x, y, kHorizontal), edge_index(x - 1, y, kHorizontal),
                        edge_index(x, y, kVertical), edge_index(x, y - 1, kVertical)};
    }
  }

  // Cuts are fixed at the x = 0 and y = 0 lines. An x-error chain is a path
  // on the dual lattice, so its horizontal winding is counted on the column
  // of vertical edges at x = 0 and its vertical winding on the row of
  // horizontal edges at y = 0; for the z-error chain (a path on the direct
  // lattice) the two edge orientations swap roles.
  for (int t = 0; t < L_; ++t) {
    cut_edges_[kCutXWindH].push_back(edge_index(0, t, kVertical));
    cut_edges_[kCutXWindV].push_back(edge_index(t, 0, kHorizontal));
    cut_edges_[kCutZWindH].push_back(edge_index(0, t, kHorizontal));
    cut_edges_[kCutZWindV].push_back(edge_index(t, 0, kVertical));
  }
  for (int c = 0; c < 4; ++c)
    for (int e : cut_edges_[c]) cut_mask_[e] |= static_cast<std::uint8_t>(1 << c);
}

void SystemState::apply_flip(int edge, ErrorKind kind) {
  const LatticeGeometry& g = *geom_;
  if (kind == ErrorKind::x) {
    xchain_.toggle(edge);
    for (int f : g.faces_of_edge(edge)) {
      plaq_defects_.toggle(f);
      plaq_set_.toggle(f);
    }
    const std::uint8_t m = g.cut_mask(edge);
    if (m & (1 << LatticeGeometry::kCutXWindH)) winding_[LatticeGeometry::kCutXWindH] ^= true;
    if (m & (1 << LatticeGeometry::kCutXWindV)) winding_[LatticeGeometry::kCutXWindV] ^= true;
  } else {
    zchain_.toggle(edge);
    for (int s : g.stars_of_edge(edge)) {
      star_defects_.toggle(s);
      star_set_.toggle(s);
    }
    const std::uint8_t m = g.cut_mask(edge);
    if (m & (1 << LatticeGeometry::kCutZWindH)) winding_[LatticeGeometry::kCutZWindH] ^= true;
    if (m & (1 << LatticeGeometry::kCutZWindV)) winding_[LatticeGeometry::kCutZWindV] ^= true;
  }
}

std::pair<bool, bool> SystemState::xchain_class() const {
  if (defect_count_p() != 0)
    throw DefectsPresentError("x-error chain has open ends; winding class undefined");
  return {winding_[LatticeGeometry::kCutXWindH], winding_[LatticeGeometry::kCutXWindV]};
}

std::pair<bool, bool> SystemState::zchain_class() const {
  if (defect_count_s() != 0)
    throw DefectsPresentError("z-error chain has open ends; winding class undefined");
  return {winding_[LatticeGeometry::kCutZWindH], winding_[LatticeGeometry::kCutZWindV]};
}

HomologyClass SystemState::homology_class() const {
  const auto [xh, xv] = xchain_class();
  const auto [zh, zv] = zchain_class();
  return HomologyClass{xh, xv, zh, zv};
}

}  // namespace torimem
