#include "latcomp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>

#include <Eigen/Dense>
#include <fftw3.h>

#include "latcomp/units.hpp"

namespace latcomp::spectral {

using units::hbar;
using units::pi;
using cplx = std::complex<double>;

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

SpatialGrid SpatialGrid::make(double length_m, int num_points) {
  if (length_m <= 0.0) throw std::invalid_argument("grid length must be positive");
  if (num_points < 16 || !is_power_of_two(num_points))
    throw std::invalid_argument("grid size must be a power of two >= 16");
  return {length_m, num_points};
}

double SpatialGrid::momentum_cutoff() const { return pi * hbar * num_points / length_m; }

double Wavefunction::norm() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return std::sqrt(s * grid.dx());
}

void Wavefunction::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero state");
  for (auto& a : amp) a /= n;
}

cplx overlap(const Wavefunction& a, const Wavefunction& b) {
  if (!(a.grid == b.grid)) throw GridMismatch("overlap of states on different grids");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.amp.size(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
  return s * a.grid.dx();
}

// ---------------------------------------------------------------------------
// Workspace
// ---------------------------------------------------------------------------

struct SpectralWorkspace::Impl {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  cplx* buf_a = nullptr;
  cplx* buf_b = nullptr;
  std::vector<double> kinetic;          // p^2 / 2m in FFT ordering
  std::vector<double> momentum;         // p in FFT ordering
  std::vector<cplx> scratch[4];

  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (buf_a) fftw_free(buf_a);
    if (buf_b) fftw_free(buf_b);
  }
};

SpectralWorkspace::SpectralWorkspace(SpatialGrid grid, double mass_kg)
    : grid_(grid), mass_(mass_kg) {
  if (mass_kg <= 0.0) throw std::invalid_argument("mass must be positive");
  SpatialGrid::make(grid.length_m, grid.num_points);  // re-validate
  impl_ = new Impl;
  const int n = grid_.num_points;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    impl_->buf_a = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * n));
    impl_->buf_b = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * n));
    impl_->fwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(impl_->buf_a),
                                  reinterpret_cast<fftw_complex*>(impl_->buf_b),
                                  FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(impl_->buf_b),
                                  reinterpret_cast<fftw_complex*>(impl_->buf_a),
                                  FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  impl_->kinetic.resize(n);
  impl_->momentum.resize(n);
  for (int i = 0; i < n; ++i) {
    const int f = i < n / 2 ? i : i - n;
    const double p = 2.0 * pi * hbar * f / grid_.length_m;
    impl_->momentum[i] = p;
    impl_->kinetic[i] = p * p / (2.0 * mass_);
  }
}

SpectralWorkspace::~SpectralWorkspace() { delete impl_; }

SpectralWorkspace::SpectralWorkspace(SpectralWorkspace&& other) noexcept
    : grid_(other.grid_), mass_(other.mass_), impl_(other.impl_) {
  other.impl_ = nullptr;
}

SpectralWorkspace& SpectralWorkspace::operator=(SpectralWorkspace&& other) noexcept {
  if (this != &other) {
    delete impl_;
    grid_ = other.grid_;
    mass_ = other.mass_;
    impl_ = other.impl_;
    other.impl_ = nullptr;
  }
  return *this;
}

void SpectralWorkspace::check(const Wavefunction& psi) const {
  if (!(psi.grid == grid_) || static_cast<int>(psi.amp.size()) != grid_.num_points)
    throw GridMismatch("state does not match the workspace grid");
}

void SpectralWorkspace::apply_hamiltonian(std::span<const cplx> psi,
                                          std::span<const double> potential,
                                          std::span<cplx> out) {
  const int n = grid_.num_points;
  if (static_cast<int>(psi.size()) != n || static_cast<int>(potential.size()) != n ||
      static_cast<int>(out.size()) != n)
    throw GridMismatch("apply_hamiltonian size mismatch");
  std::copy(psi.begin(), psi.end(), impl_->buf_a);
  fftw_execute(impl_->fwd);
  const double inv_n = 1.0 / n;
  for (int i = 0; i < n; ++i) impl_->buf_b[i] *= impl_->kinetic[i] * inv_n;
  fftw_execute(impl_->bwd);
  for (int i = 0; i < n; ++i) out[i] = impl_->buf_a[i] + potential[i] * psi[i];
}

double SpectralWorkspace::energy(const Wavefunction& psi, std::span<const double> potential) {
  check(psi);
  auto& h_psi = impl_->scratch[3];
  h_psi.resize(psi.amp.size());
  apply_hamiltonian(psi.amp, potential, h_psi);
  cplx s = 0.0;
  for (std::size_t i = 0; i < h_psi.size(); ++i) s += std::conj(psi.amp[i]) * h_psi[i];
  return s.real() * grid_.dx();
}

void SpectralWorkspace::chebychev_step(Wavefunction& psi, std::span<const double> potential,
                                       const ChebychevConfig& config,
                                       ChebychevStepInfo* info) {
  check(psi);
  if (config.dt_s == 0.0) {
    if (info) *info = {0, 1.0};
    return;
  }
  const double de = config.e_max_j - config.e_min_j;
  if (de <= 0.0) throw std::invalid_argument("spectral bounds must satisfy e_max > e_min");
  const double arg = de * config.dt_s / (2.0 * hbar);

  // Truncation point: smallest k past the Bessel turnover with |b_k| < tol.
  int kmax = static_cast<int>(std::ceil(arg)) + 24;
  std::vector<double> j;
  int cutoff = -1;
  for (int attempt = 0; attempt < 8 && cutoff < 0; ++attempt) {
    j = bessel_jn(kmax, arg);
    for (int k = std::max(2, static_cast<int>(std::ceil(arg))); k <= kmax; ++k) {
      if (2.0 * std::abs(j[k]) < config.tolerance) {
        cutoff = k;
        break;
      }
    }
    if (cutoff < 0) kmax *= 2;
    if (kmax > config.max_order)
      throw ConvergenceFailure("chebychev expansion exceeds the configured order cap");
  }

  const int n = grid_.num_points;
  auto& prev = impl_->scratch[0];
  auto& cur = impl_->scratch[1];
  auto& next = impl_->scratch[2];
  auto& acc = impl_->scratch[3];
  prev.assign(psi.amp.begin(), psi.amp.end());
  cur.resize(n);
  next.resize(n);
  acc.resize(n);

  const double norm_before = psi.norm();
  const double alpha = 2.0 / de;

  // cur = H' prev
  apply_hamiltonian(prev, potential, cur);
  for (int i = 0; i < n; ++i)
    cur[i] = alpha * (cur[i] - config.e_min_j * prev[i]) - prev[i];

  const cplx unit_powers[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
  for (int i = 0; i < n; ++i) acc[i] = j[0] * prev[i] + 2.0 * unit_powers[1] * j[1] * cur[i];

  for (int k = 2; k <= cutoff; ++k) {
    apply_hamiltonian(cur, potential, next);
    for (int i = 0; i < n; ++i)
      next[i] = 2.0 * (alpha * (next[i] - config.e_min_j * cur[i]) - cur[i]) - prev[i];
    const cplx coeff = 2.0 * unit_powers[k % 4] * j[k];
    for (int i = 0; i < n; ++i) acc[i] += coeff * next[i];
    std::swap(prev, cur);
    std::swap(cur, next);
  }

  const double phase_arg = -(0.5 * de + config.e_min_j) * config.dt_s / hbar;
  const cplx phase(std::cos(phase_arg), std::sin(phase_arg));
  for (int i = 0; i < n; ++i) psi.amp[i] = acc[i] * phase;

  const double norm_after = psi.norm();
  if (std::abs(norm_after - norm_before) > 1e-8)
    throw SpectralBoundViolation("norm drifted by more than 1e-8 in one step");
  if (info) *info = {cutoff, 2.0 * std::abs(j[cutoff])};
}

Wavefunction SpectralWorkspace::translated(const Wavefunction& psi, double displacement_m,
                                           double velocity_m_per_s) {
  check(psi);
  const int n = grid_.num_points;
  std::copy(psi.amp.begin(), psi.amp.end(), impl_->buf_a);
  fftw_execute(impl_->fwd);
  const double inv_n = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    const double ph = -impl_->momentum[i] * displacement_m / hbar;
    impl_->buf_b[i] *= cplx(std::cos(ph), std::sin(ph)) * inv_n;
  }
  fftw_execute(impl_->bwd);
  Wavefunction out{psi.grid, std::vector<cplx>(impl_->buf_a, impl_->buf_a + n)};
  if (velocity_m_per_s != 0.0) {
    const double scale = mass_ * velocity_m_per_s / hbar;
    for (int i = 0; i < n; ++i) {
      const double ph = scale * grid_.position(i);
      out.amp[i] *= cplx(std::cos(ph), std::sin(ph));
    }
  }
  return out;
}

double SpectralWorkspace::high_momentum_population(const Wavefunction& psi, double fraction) {
  check(psi);
  const int n = grid_.num_points;
  std::copy(psi.amp.begin(), psi.amp.end(), impl_->buf_a);
  fftw_execute(impl_->fwd);
  const double p_edge = fraction * grid_.momentum_cutoff();
  double tail = 0.0, total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = std::norm(impl_->buf_b[i]);
    total += w;
    if (std::abs(impl_->momentum[i]) >= p_edge) tail += w;
  }
  return total > 0.0 ? tail / total : 0.0;
}

Wavefunction apply_hamiltonian(const Wavefunction& psi, std::span<const double> potential,
                               double mass_kg) {
  SpectralWorkspace ws(psi.grid, mass_kg);
  Wavefunction out{psi.grid, std::vector<cplx>(psi.amp.size())};
  ws.apply_hamiltonian(psi.amp, potential, out.amp);
  return out;
}

// ---------------------------------------------------------------------------
// Dense bound states
// ---------------------------------------------------------------------------

std::vector<std::pair<double, Wavefunction>> bound_states(const SpatialGrid& grid,
                                                          std::span<const double> potential,
                                                          double mass_kg, int n_states) {
  SpatialGrid::make(grid.length_m, grid.num_points);
  const int n = grid.num_points;
  if (static_cast<int>(potential.size()) != n) throw GridMismatch("potential size mismatch");
  if (n_states < 1 || n_states > n) throw std::invalid_argument("n_states out of range");
  if (n > 4096) throw std::invalid_argument("dense diagonalization limited to 4096 points");

  // Circulant kinetic matrix row t[d] = (1/N) sum_j T(p_j) exp(i p_j d dx / hbar).
  std::vector<double> t_row(n, 0.0);
  for (int d = 0; d < n; ++d) {
    double s = 0.0;
    for (int jj = 1; jj < n / 2; ++jj) {
      const double p = 2.0 * pi * hbar * jj / grid.length_m;
      s += 2.0 * (p * p / (2.0 * mass_kg)) * std::cos(2.0 * pi * jj * d / n);
    }
    const double p_top = 2.0 * pi * hbar * (n / 2) / grid.length_m;
    s += (p_top * p_top / (2.0 * mass_kg)) * ((d % 2 == 0) ? 1.0 : -1.0);
    t_row[d] = s / n;
  }

  Eigen::MatrixXd h(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) h(r, c) = t_row[std::abs(r - c)];
  for (int d = 0; d < n; ++d) h(d, d) += potential[d];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success)
    throw ConvergenceFailure("dense eigensolver failed to converge");

  const double inv_sqrt_dx = 1.0 / std::sqrt(grid.dx());
  std::vector<std::pair<double, Wavefunction>> out;
  out.reserve(n_states);
  for (int s = 0; s < n_states; ++s) {
    Wavefunction psi{grid, std::vector<cplx>(n)};
    for (int i = 0; i < n; ++i) psi.amp[i] = solver.eigenvectors()(i, s) * inv_sqrt_dx;
    out.emplace_back(solver.eigenvalues()(s), std::move(psi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time-dependent driver
// ---------------------------------------------------------------------------

PropagationResult propagate_time_dependent(SpectralWorkspace& ws, const Wavefunction& psi0,
                                           const PotentialSampler& sample_potential,
                                           double total_time_s, const ChebychevConfig& config,
                                           int record_stride, const RecordHook& hook) {
  ws.grid();
  if (total_time_s <= 0.0) throw std::invalid_argument("total time must be positive");
  if (config.dt_s <= 0.0) throw std::invalid_argument("time step must be positive");
  if (record_stride < 1) throw std::invalid_argument("record stride must be >= 1");

  const int n_steps = static_cast<int>(std::ceil(total_time_s / config.dt_s - 1e-12));
  ChebychevConfig cfg = config;
  cfg.dt_s = total_time_s / n_steps;

  PropagationResult result{.final_state = psi0};
  std::vector<double> potential(static_cast<std::size_t>(psi0.amp.size()));

  auto record = [&](double t) {
    sample_potential(t, potential);
    TrajectoryPoint point;
    point.t_s = t;
    point.energy_j = ws.energy(result.final_state, potential);
    point.norm = result.final_state.norm();
    point.overlap_initial = std::norm(overlap(psi0, result.final_state));
    result.trajectory.push_back(point);
    if (hook) hook(t, result.final_state);
  };

  record(0.0);
  double prev_norm = result.final_state.norm();
  ChebychevStepInfo info;
  for (int step = 0; step < n_steps; ++step) {
    const double t_mid = (step + 0.5) * cfg.dt_s;
    sample_potential(t_mid, potential);
    ws.chebychev_step(result.final_state, potential, cfg, &info);
    result.max_order_used = std::max(result.max_order_used, info.order_used);
    const double norm_now = result.final_state.norm();
    result.max_step_norm_drift =
        std::max(result.max_step_norm_drift, std::abs(norm_now - prev_norm));
    prev_norm = norm_now;
    if ((step + 1) % record_stride == 0 || step + 1 == n_steps)
      record((step + 1) * cfg.dt_s);
  }
  result.final_norm_drift = std::abs(prev_norm - 1.0);
  return result;
}

// ---------------------------------------------------------------------------
// Bessel J_k by Miller's downward recurrence
// ---------------------------------------------------------------------------

std::vector<double> bessel_jn(int kmax, double x) {
  if (kmax < 0) throw std::invalid_argument("kmax must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double ax = std::abs(x);
  const int start = kmax + 16 +
                    static_cast<int>(std::ceil(std::sqrt(40.0 * std::max<double>(kmax, ax))));
  double jp = 0.0;          // J_{k+1}
  double jc = 1e-300;       // J_k seed
  double norm_acc = 0.0;    // J_0 + 2 sum_{even k} J_k
  for (int k = start; k >= 1; --k) {
    const double jm = (2.0 * k / ax) * jc - jp;
    jp = jc;
    jc = jm;
    if (k - 1 <= kmax) out[static_cast<std::size_t>(k - 1)] = jc;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm_acc += 2.0 * jc;
    if (std::abs(jc) > 1e250) {  // rescale to avoid overflow
      const double scale = 1e-250;
      jc *= scale;
      jp *= scale;
      norm_acc *= scale;
      for (auto& v : out) v *= scale;
    }
  }
  norm_acc += out[0];  // normalization identity J_0 + 2 sum_{m>=1} J_{2m} = 1
  const double scale = 1.0 / norm_acc;
  for (auto& v : out) v *= scale;
  if (x < 0.0)
    for (int k = 1; k <= kmax; k += 2) out[static_cast<std::size_t>(k)] = -out[static_cast<std::size_t>(k)];
  return out;
}

// ---------------------------------------------------------------------------
// Snapshot io
// ---------------------------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'L', 'C', 'W', 'F', '0', '0', '0', '1'};
}

void save_wavefunction(const std::string& path, const Wavefunction& psi) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t n = static_cast<std::uint64_t>(psi.amp.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&psi.grid.length_m), sizeof(double));
  for (const auto& a : psi.amp) {
    const double re = a.real(), im = a.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(double));
    out.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

Wavefunction load_wavefunction(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a wavefunction snapshot: " + path);
  std::uint64_t n = 0;
  double length = 0.0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&length), sizeof(length));
  Wavefunction psi{SpatialGrid::make(length, static_cast<int>(n)),
                   std::vector<cplx>(static_cast<std::size_t>(n))};
  for (auto& a : psi.amp) {
    double re = 0.0, im = 0.0;
    in.read(reinterpret_cast<char*>(&re), sizeof(double));
    in.read(reinterpret_cast<char*>(&im), sizeof(double));
    a = {re, im};
  }
  if (!in) throw std::runtime_error("truncated snapshot: " + path);
  return psi;
}

}  // namespace latcomp::spectral
