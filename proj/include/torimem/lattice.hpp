#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace torimem {

// Thrown when a homology class is queried while the corresponding chain
// still has open ends (nonzero defect count).
class DefectsPresentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ErrorKind { x, z };

// Packed bit field over edges or cells.
class BitField {
 public:
  BitField() = default;
  explicit BitField(int n) : n_(n), words_((n + 63) / 64, 0) {}

  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
  void toggle(int i) { words_[i >> 6] ^= 1ULL << (i & 63); }
  int size() const { return n_; }

  int count() const {
    int c = 0;
    for (auto w : words_) c += __builtin_popcountll(w);
    return c;
  }

  bool operator==(const BitField&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

// L x L square lattice on the torus. Spins sit on the N = 2L^2 edges, star
// operators on vertices, plaquette operators on faces.
//
// Conventions: the horizontal edge (x, y, h) joins vertices (x, y) and
// (x+1, y); the vertical edge (x, y, v) joins (x, y) and (x, y+1). Face
// (x, y) has corners (x, y) .. (x+1, y+1), so its boundary is the edges
// (x,y,h), (x,y+1,h), (x,y,v), (x+1,y,v). All coordinates are mod L.
class LatticeGeometry {
 public:
  static constexpr int kHorizontal = 0;
  static constexpr int kVertical = 1;

  // Winding cuts. Flipping an edge toggles the matching chain parity iff
  // the edge lies in the cut:
  //   kCutXWindH / kCutXWindV : x-error chain winding (horizontal/vertical),
  //                             tested against plaquette-defect-free chains;
  //   kCutZWindH / kCutZWindV : z-error chain winding, star sector.
  static constexpr int kCutXWindH = 0;
  static constexpr int kCutXWindV = 1;
  static constexpr int kCutZWindH = 2;
  static constexpr int kCutZWindV = 3;

  explicit LatticeGeometry(int size);

  int L() const { return L_; }
  int n_edges() const { return 2 * L_ * L_; }
  int n_sites() const { return L_ * L_; }  // stars = plaquettes = L^2

  int edge_index(int x, int y, int orient) const {
    return orient * L_ * L_ + wrap(y) * L_ + wrap(x);
  }
  int edge_x(int e) const { return (e % (L_ * L_)) % L_; }
  int edge_y(int e) const { return (e % (L_ * L_)) / L_; }
  int edge_orient(int e) const { return e / (L_ * L_); }

  int site_index(int x, int y) const { return wrap(y) * L_ + wrap(x); }
  int site_x(int s) const { return s % L_; }
  int site_y(int s) const { return s / L_; }

  // the two faces incident to an edge (plaquette defects live here)
  const std::array<int, 2>& faces_of_edge(int e) const { return edge_faces_[e]; }
  // the two endpoint vertices of an edge (star defects live here)
  const std::array<int, 2>& stars_of_edge(int e) const { return edge_stars_[e]; }

  const std::array<int, 4>& edges_of_face(int f) const { return face_edges_[f]; }
  const std::array<int, 4>& edges_of_star(int s) const { return star_edges_[s]; }

  // bit c of cut_mask(e) set <=> edge e lies in cut c
  std::uint8_t cut_mask(int e) const { return cut_mask_[e]; }
  const std::vector<int>& cut_edges(int cut) const { return cut_edges_[cut]; }

  int wrap(int v) const {
    v %= L_;
    return v < 0 ? v + L_ : v;
  }

 private:
  int L_;
  std::vector<std::array<int, 2>> edge_faces_;
  std::vector<std::array<int, 2>> edge_stars_;
  std::vector<std::array<int, 4>> face_edges_;
  std::vector<std::array<int, 4>> star_edges_;
  std::vector<std::uint8_t> cut_mask_;
  std::array<std::vector<int>, 4> cut_edges_;
};

// Dense defect list with O(1) membership, insertion and swap-remove erase.
class DefectSet {
 public:
  DefectSet() = default;
  explicit DefectSet(int n_sites) : slot_(n_sites, -1) {}

  bool contains(int site) const { return slot_[site] >= 0; }
  int size() const { return static_cast<int>(sites_.size()); }
  const std::vector<std::int32_t>& sites() const { return sites_; }

  void toggle(int site) {
    if (contains(site))
      erase(site);
    else
      insert(site);
  }

  void insert(int site) {
    slot_[site] = static_cast<std::int32_t>(sites_.size());
    sites_.push_back(site);
  }

  void erase(int site) {
    const std::int32_t at = slot_[site];
    const std::int32_t last = sites_.back();
    sites_[at] = last;
    slot_[last] = at;
    sites_.pop_back();
    slot_[site] = -1;
  }

  bool operator==(const DefectSet&) const = default;

 private:
  std::vector<std::int32_t> sites_;
  std::vector<std::int32_t> slot_;
};

struct HomologyClass {
  bool x_winds_h = false;
  bool x_winds_v = false;
  bool z_winds_h = false;
  bool z_winds_v = false;

  bool trivial() const { return !(x_winds_h || x_winds_v || z_winds_h || z_winds_v); }
  bool operator==(const HomologyClass&) const = default;
};

// Accumulated error chains plus the derived bookkeeping that the dynamics
// keep incrementally: defect bit fields and position lists, winding
// parities across the four cuts, and the cached interaction energy.
class SystemState {
 public:
  explicit SystemState(const LatticeGeometry& g)
      : geom_(&g),
        xchain_(g.n_edges()),
        zchain_(g.n_edges()),
        plaq_defects_(g.n_sites()),
        star_defects_(g.n_sites()),
        plaq_set_(g.n_sites()),
        star_set_(g.n_sites()) {}

  const LatticeGeometry& geometry() const { return *geom_; }

  const BitField& xchain() const { return xchain_; }
  const BitField& zchain() const { return zchain_; }
  const BitField& plaquette_defects() const { return plaq_defects_; }
  const BitField& star_defects() const { return star_defects_; }
  const DefectSet& plaq_set() const { return plaq_set_; }
  const DefectSet& star_set() const { return star_set_; }

  int defect_count_p() const { return plaq_set_.size(); }
  int defect_count_s() const { return star_set_.size(); }
  int defect_count() const { return defect_count_p() + defect_count_s(); }

  bool winding(int cut) const { return winding_[cut]; }

  // Toggles one chain bit and updates the incident defects, defect lists
  // and winding parities. Does not touch cached_energy; the dynamics add
  // the move's energy delta on acceptance.
  void apply_flip(int edge, ErrorKind kind);

  // Winding parities of the x-error chain; only defined when the plaquette
  // sector is defect-free.
  std::pair<bool, bool> xchain_class() const;
  // Same for the z-error chain / star sector.
  std::pair<bool, bool> zchain_class() const;
  // All four parities; requires both sectors defect-free.
  HomologyClass homology_class() const;

  bool same_configuration(const SystemState& o) const {
    return xchain_ == o.xchain_ && zchain_ == o.zchain_;
  }

  double cached_energy = 0.0;

 private:
  const LatticeGeometry* geom_;
  BitField xchain_, zchain_;
  BitField plaq_defects_, star_defects_;
  DefectSet plaq_set_, star_set_;
  std::array<bool, 4> winding_{false, false, false, false};
};

}  // namespace torimem
