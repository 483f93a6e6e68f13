#include "torimem/potential.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

#include "torimem/fft.hpp"

namespace torimem {

namespace {

double int_pow(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

// lattice Laplacian eigenvalue at k = 2*pi*(nx, ny)/L
double lap_eig(int nx, int ny, int L) {
  const double kx = 2.0 * std::numbers::pi * nx / L;
  const double ky = 2.0 * std::numbers::pi * ny / L;
  return (2.0 - 2.0 * std::cos(kx)) + (2.0 - 2.0 * std::cos(ky));
}

}  // namespace

void CouplingParams::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(g_omega > 0.0)) throw std::invalid_argument("g_omega must be positive");
  if (!(v_omega > 0.0)) throw std::invalid_argument("v_omega must be positive");
  if (!(v_Omega > 0.0)) throw std::invalid_argument("v_Omega must be positive");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (z < 1) throw std::invalid_argument("dispersion exponent z must be >= 1");
  if (a != 1.0) throw std::invalid_argument("lattice constant a is fixed to 1");
}

PotentialTable PotentialTable::compute(int L, const CouplingParams& params) {
  if (L < 2) throw std::invalid_argument("potential table needs L >= 2");
  params.validate();

  const double pref = params.g_omega * params.g_omega / (params.v_omega * params.v_omega);

  // fill 1/D^z over the Brillouin zone, zero mode excluded, and transform
  std::vector<fft::cdouble> f(static_cast<std::size_t>(L) * L, fft::cdouble{0.0, 0.0});
  for (int nx = 0; nx < L; ++nx)
    for (int ny = 0; ny < L; ++ny) {
      if (nx == 0 && ny == 0) continue;
      f[static_cast<std::size_t>(nx) * L + ny] =
          fft::cdouble{1.0 / int_pow(lap_eig(nx, ny, L), params.z), 0.0};
    }
  fft::transform_2d(f, static_cast<std::size_t>(L));

  std::vector<double> raw(static_cast<std::size_t>(L) * L);
  const double scale = -pref / (static_cast<double>(L) * L);
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = scale * f[i].real();

  // Enforce the dihedral symmetry exactly: every entry takes the value of
  // its canonical representative (sorted minimal-image components).
  std::vector<double> u(raw.size());
  for (int dx = 0; dx < L; ++dx)
    for (int dy = 0; dy < L; ++dy) {
      int mx = std::min(dx, L - dx);
      int my = std::min(dy, L - dy);
      if (mx < my) std::swap(mx, my);
      u[static_cast<std::size_t>(dx) * L + dy] = raw[static_cast<std::size_t>(mx) * L + my];
    }

  const double nn = u[static_cast<std::size_t>(1) * L];  // (1, 0)
  for (double& v : u) v -= nn;

  return PotentialTable(L, std::move(u), nn, params.log_prefactor());
}

void PotentialTable::write_csv(std::ostream& os) const {
  os << "dx,dy,u\n";
  char buf[64];
  for (int dx = 0; dx < L_; ++dx)
    for (int dy = 0; dy < L_; ++dy) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", dx, dy, at(dx, dy));
      os << buf;
    }
}

double tuned_g_Omega(const CouplingParams& params, int L) {
  const double xi = params.effective_xi(L);
  if (!(xi > params.a))
    throw std::invalid_argument("tuning requires xi_L > a (log would be nonpositive)");
  const double ratio2 = params.g_omega * params.g_omega / (params.v_omega * params.v_omega);
  const double V = static_cast<double>(L) * L;
  return params.v_Omega *
         std::sqrt(ratio2 * V / (2.0 * std::numbers::pi) * std::log(xi / params.a));
}

double chemical_compensation(const CouplingParams& params, int L) {
  const double xi = params.effective_xi(L);
  const double ratio2 = params.g_omega * params.g_omega / (params.v_omega * params.v_omega);
  const double V = static_cast<double>(L) * L;
  const double delta_reg0 = 1.0;  // defect smeared over one unit cell
  return ratio2 / (4.0 * std::numbers::pi) * V * std::log(xi / params.a) * 2.0 * delta_reg0;
}

DecompositionCheck verify_decomposition(const std::vector<std::pair<int, int>>& positions,
                                        int L, const CouplingParams& params) {
  params.validate();
  if (L < 2) throw std::invalid_argument("verify_decomposition needs L >= 2");
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      const int dx = ((positions[i].first - positions[j].first) % L + L) % L;
      const int dy = ((positions[i].second - positions[j].second) % L + L) % L;
      if (dx == 0 && dy == 0)
        throw std::invalid_argument("defect positions must be distinct mod L");
    }

  DecompositionCheck out;
  const auto n = static_cast<double>(positions.size());
  if (positions.empty()) return out;

  const double gOm = params.g_Omega > 0.0 ? params.g_Omega : tuned_g_Omega(params, L);
  const double gw2 = params.g_omega * params.g_omega;
  const double vw2 = params.v_omega * params.v_omega;
  const double gO2_over_vO2 = gOm * gOm / (params.v_Omega * params.v_Omega);
  const double V = static_cast<double>(L) * L;

  // route 1: -(1/V) sum_{k!=0} |rho(k)|^2 [ g_w^2/(2 w_k^2) + g_O^2/(2 v_O^2) ]
  // (on the lattice the in-plane factor |k|^2 / Omega_k^2 is exactly 1/v_O^2)
  double e_k = 0.0;
  for (int nx = 0; nx < L; ++nx)
    for (int ny = 0; ny < L; ++ny) {
      if (nx == 0 && ny == 0) continue;
      const double kx = 2.0 * std::numbers::pi * nx / L;
      const double ky = 2.0 * std::numbers::pi * ny / L;
      std::complex<double> rho{0.0, 0.0};
      for (const auto& [px, py] : positions) {
        const double phase = kx * px + ky * py;
        rho += std::complex<double>{std::cos(phase), std::sin(phase)};
      }
      const double w2 = vw2 * int_pow(lap_eig(nx, ny, L), params.z);
      e_k -= std::norm(rho) / V * (gw2 / (2.0 * w2) + 0.5 * gO2_over_vO2);
    }

  const PotentialTable table = PotentialTable::compute(L, params);
  const double v_omega_self = table.raw_at(0, 0);
  const double v_Omega_self = -gO2_over_vO2 * (1.0 - 1.0 / V);
  out.direct_energy = e_k - 0.5 * n * (v_omega_self + v_Omega_self);

  // route 2: pairwise kernel + constant in-plane contribution at r != 0
  const double v_Omega_pair = gO2_over_vO2 / V;
  double e_pairs = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      const int dx = positions[i].first - positions[j].first;
      const int dy = positions[i].second - positions[j].second;
      e_pairs += table.raw_at(dx, dy) + v_Omega_pair;
    }
  out.table_energy = e_pairs;

  const double mag = std::max(std::abs(out.direct_energy), std::abs(out.table_energy));
  out.rel_discrepancy = mag > 0.0 ? std::abs(out.direct_energy - out.table_energy) / mag : 0.0;
  return out;
}

namespace {

// sum of u(cell, d) over all defects d, skipping up to two same-type sites
double interaction_sum(const SystemState& s, const PotentialTable& t, int cell,
                       bool cell_is_plaq, int skip_a, int skip_b) {
  const LatticeGeometry& g = s.geometry();
  const int L = g.L();
  const int cx = g.site_x(cell);
  const int cy = g.site_y(cell);
  double sum = 0.0;
  for (int d : s.plaq_set().sites()) {
    if (cell_is_plaq && (d == skip_a || d == skip_b)) continue;
    const auto [dx, dy] = defect_displacement(cx, cy, cell_is_plaq, g.site_x(d), g.site_y(d), true, L);
    sum += t.at(dx, dy);
  }
  for (int d : s.star_set().sites()) {
    if (!cell_is_plaq && (d == skip_a || d == skip_b)) continue;
    const auto [dx, dy] = defect_displacement(cx, cy, cell_is_plaq, g.site_x(d), g.site_y(d), false, L);
    sum += t.at(dx, dy);
  }
  return sum;
}

double pair_term(const LatticeGeometry& g, const PotentialTable& t, int a, int b, bool is_plaq) {
  const auto [dx, dy] = defect_displacement(g.site_x(a), g.site_y(a), is_plaq,
                                            g.site_x(b), g.site_y(b), is_plaq, g.L());
  return t.at(dx, dy);
}

}  // namespace

double pair_energy_delta(const SystemState& state, const PotentialTable* table,
                         const CouplingParams& params, int edge, ErrorKind kind) {
  const LatticeGeometry& g = state.geometry();
  const bool is_plaq = (kind == ErrorKind::x);
  const auto& cells = is_plaq ? g.faces_of_edge(edge) : g.stars_of_edge(edge);
  const BitField& defects = is_plaq ? state.plaquette_defects() : state.star_defects();
  const int c1 = cells[0], c2 = cells[1];
  const bool o1 = defects.test(c1), o2 = defects.test(c2);

  double delta_e = params.delta * ((o1 ? -1.0 : 1.0) + (o2 ? -1.0 : 1.0));
  if (table == nullptr) return delta_e;

  if (!o1 && !o2) {
    // pair creation: both new defects interact with everything, plus each other
    delta_e += pair_term(g, *table, c1, c2, is_plaq);
    delta_e += interaction_sum(state, *table, c1, is_plaq, -1, -1);
    delta_e += interaction_sum(state, *table, c2, is_plaq, -1, -1);
  } else if (o1 && o2) {
    delta_e -= pair_term(g, *table, c1, c2, is_plaq);
    delta_e -= interaction_sum(state, *table, c1, is_plaq, c1, c2);
    delta_e -= interaction_sum(state, *table, c2, is_plaq, c1, c2);
  } else {
    const int from = o1 ? c1 : c2;
    const int to = o1 ? c2 : c1;
    delta_e += interaction_sum(state, *table, to, is_plaq, from, -1);
    delta_e -= interaction_sum(state, *table, from, is_plaq, from, -1);
  }
  return delta_e;
}

Recomputed recompute_from_scratch(const SystemState& state, const PotentialTable* table,
                                  const CouplingParams& params) {
  const LatticeGeometry& g = state.geometry();
  Recomputed out{BitField(g.n_sites()), BitField(g.n_sites()), 0, 0, 0.0};

  std::vector<std::pair<int, bool>> defects;  // (site, is_plaq)
  for (int c = 0; c < g.n_sites(); ++c) {
    int par = 0;
    for (int e : g.edges_of_face(c)) par ^= state.xchain().test(e) ? 1 : 0;
    if (par) {
      out.plaq_defects.toggle(c);
      ++out.defect_count_p;
      defects.emplace_back(c, true);
    }
    par = 0;
    for (int e : g.edges_of_star(c)) par ^= state.zchain().test(e) ? 1 : 0;
    if (par) {
      out.star_defects.toggle(c);
      ++out.defect_count_s;
      defects.emplace_back(c, false);
    }
  }

  out.energy = params.delta * static_cast<double>(defects.size());
  if (table != nullptr) {
    for (std::size_t i = 0; i < defects.size(); ++i)
      for (std::size_t j = i + 1; j < defects.size(); ++j) {
        const auto [ai, pi] = defects[i];
        const auto [aj, pj] = defects[j];
        const auto [dx, dy] = defect_displacement(g.site_x(ai), g.site_y(ai), pi,
                                                  g.site_x(aj), g.site_y(aj), pj, g.L());
        out.energy += table->at(dx, dy);
      }
  }
  return out;
}

}  // namespace torimem
