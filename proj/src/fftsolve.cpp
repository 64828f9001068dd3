#include "localdpm/fftsolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "localdpm/error.hpp"

namespace localdpm {

namespace {

// FFTW's planner is not thread safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t count)
      : data(static_cast<double*>(fftw_malloc(sizeof(double) * count))) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* data;
};

// Cached in-place 1D RODFT00 plans, one per length; never destroyed.
fftw_plan plan_1d(int n) {
  static std::map<int, fftw_plan> plans;
  std::lock_guard lock(planner_mutex());
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  FftwBuffer buf(static_cast<std::size_t>(n));
  fftw_plan p = fftw_plan_r2r_1d(n, buf.data, buf.data, FFTW_RODFT00, FFTW_ESTIMATE);
  require(p != nullptr, ErrorCode::InvalidParameter, "FFTW could not plan a sine transform");
  plans.emplace(n, p);
  return p;
}

// Weights of the centered second difference, offsets -r..r.
constexpr double kW2[3] = {1.0, -2.0, 1.0};
constexpr double kW4[5] = {-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};

const double* weights(Order order) { return order == Order::O2 ? kW2 : kW4; }

// Value at node index i (0..n+1 with zero ring) with antisymmetric reflection
// across the ring: i = -k maps to -u(k), i = n+1+k to -u(n+1-k).
template <class Get>
double reflected(Get get, int i, int n, bool& ok) {
  if (i >= 1 && i <= n) return get(i);
  if (i == 0 || i == n + 1) return 0.0;
  if (i < 0 && -i <= n) return -get(-i);
  if (i > n + 1 && 2 * (n + 1) - i >= 1) return -get(2 * (n + 1) - i);
  ok = false;
  return 0.0;
}

}  // namespace

double eigenvalue(Order order, int j, int n) {
  require(n >= 1 && j >= 1 && j <= n, ErrorCode::InvalidParameter,
          "eigenvalue index " + std::to_string(j) + " outside 1.." + std::to_string(n));
  const double c = std::cos(j * std::numbers::pi / (n + 1));
  if (order == Order::O2) return 2.0 * (c - 1.0);
  return -(c - 1.0) * (c - 7.0) / 3.0;
}

std::vector<double> dst_direct(std::span<const double> v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> out(v.size(), 0.0);
  // sin(j k pi/(n+1)) depends on j*k mod 2(n+1); tabulate once.
  const int period = 2 * (n + 1);
  std::vector<double> table(static_cast<std::size_t>(period));
  for (int m = 0; m < period; ++m) table[m] = std::sin(m * std::numbers::pi / (n + 1));
  for (int j = 1; j <= n; ++j) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += table[(static_cast<long>(j) * k) % period] * v[k - 1];
    out[j - 1] = acc;
  }
  return out;
}

std::vector<double> dst_fast(std::span<const double> v) {
  const int n = static_cast<int>(v.size());
  if (n == 0) return {};
  fftw_plan p = plan_1d(n);
  FftwBuffer buf(v.size());
  for (int i = 0; i < n; ++i) buf.data[i] = v[i];
  fftw_execute_r2r(p, buf.data, buf.data);
  std::vector<double> out(v.size());
  for (int i = 0; i < n; ++i) out[i] = 0.5 * buf.data[i];
  return out;
}

std::vector<double> dst(std::span<const double> v) {
  return v.size() <= 64 ? dst_direct(v) : dst_fast(v);
}

struct SpectralPlan::Fft {
  fftw_plan plan = nullptr;
  // Long double twin, planned on first extended solve.
  std::once_flag extended_once;
  fftwl_plan plan_ext = nullptr;
  std::vector<long double> scale_ext;
  ~Fft() {
    std::lock_guard lock(planner_mutex());
    if (plan != nullptr) fftw_destroy_plan(plan);
    if (plan_ext != nullptr) fftwl_destroy_plan(plan_ext);
  }
};

SpectralPlan::SpectralPlan(const AuxGrid& grid, Order order, double sigma)
    : n_(grid.n()), h_(grid.h()), sigma_(sigma), order_(order), fft_(std::make_unique<Fft>()) {
  require(n_ >= 1, ErrorCode::InvalidParameter, "spectral plan needs n >= 1");
  require(sigma >= 0.0 && std::isfinite(sigma), ErrorCode::InvalidParameter,
          "sigma must be finite and non-negative");
  lambda_.resize(static_cast<std::size_t>(n_));
  for (int j = 1; j <= n_; ++j) lambda_[j - 1] = eigenvalue(order, j, n_);

  // Two unnormalized transforms contribute 16 (S x S)^2; the inverse needs
  // (2/(n+1))^2 (S x S) D^-1 (S x S).
  const double np1 = n_ + 1.0;
  const double h2 = h_ * h_;
  scale_.resize(static_cast<std::size_t>(n_) * n_);
  for (int k = 0; k < n_; ++k)
    for (int j = 0; j < n_; ++j)
      scale_[k * n_ + j] = 1.0 / (4.0 * np1 * np1 * ((lambda_[j] + lambda_[k]) / h2 - sigma_));

  std::lock_guard lock(planner_mutex());
  FftwBuffer buf(scale_.size());
  fft_->plan = fftw_plan_r2r_2d(n_, n_, buf.data, buf.data, FFTW_RODFT00, FFTW_RODFT00,
                                FFTW_ESTIMATE);
  require(fft_->plan != nullptr, ErrorCode::InvalidParameter,
          "FFTW could not plan a 2D sine transform");
}

SpectralPlan::~SpectralPlan() = default;

void SpectralPlan::solve_inplace(std::span<double> data) const {
  require(data.size() == scale_.size(), ErrorCode::InvalidParameter,
          "right-hand side size does not match the plan");
  FftwBuffer buf(scale_.size());
  std::copy(data.begin(), data.end(), buf.data);
  fftw_execute_r2r(fft_->plan, buf.data, buf.data);
  for (std::size_t i = 0; i < scale_.size(); ++i) buf.data[i] *= scale_[i];
  fftw_execute_r2r(fft_->plan, buf.data, buf.data);
  std::copy(buf.data, buf.data + scale_.size(), data.begin());
}

void SpectralPlan::solve_inplace_extended(std::span<long double> data) const {
  require(data.size() == scale_.size(), ErrorCode::InvalidParameter,
          "extended solve expects n*n values");
  Fft& fft = *fft_;
  std::call_once(fft.extended_once, [&] {
    const long double np1 = n_ + 1.0L;
    const long double h2 = static_cast<long double>(h_) * h_;
    std::vector<long double> lambda(static_cast<std::size_t>(n_));
    for (int j = 1; j <= n_; ++j) {
      const long double c = std::cos(j * std::numbers::pi_v<long double> / np1);
      lambda[j - 1] = order_ == Order::O2 ? 2.0L * (c - 1.0L) : -(c - 1.0L) * (c - 7.0L) / 3.0L;
    }
    fft.scale_ext.resize(scale_.size());
    for (int k = 0; k < n_; ++k)
      for (int j = 0; j < n_; ++j)
        fft.scale_ext[k * n_ + j] =
            1.0L / (4.0L * np1 * np1 * ((lambda[j] + lambda[k]) / h2 - sigma_));
    std::lock_guard lock(planner_mutex());
    auto* buf = static_cast<long double*>(fftwl_malloc(sizeof(long double) * scale_.size()));
    if (buf == nullptr) throw std::bad_alloc();
    fft.plan_ext =
        fftwl_plan_r2r_2d(n_, n_, buf, buf, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    fftwl_free(buf);
    require(fft.plan_ext != nullptr, ErrorCode::InvalidParameter,
            "FFTW could not plan a long double sine transform");
  });
  auto* buf = static_cast<long double*>(fftwl_malloc(sizeof(long double) * data.size()));
  if (buf == nullptr) throw std::bad_alloc();
  std::copy(data.begin(), data.end(), buf);
  fftwl_execute_r2r(fft.plan_ext, buf, buf);
  for (std::size_t i = 0; i < data.size(); ++i) buf[i] *= fft.scale_ext[i];
  fftwl_execute_r2r(fft.plan_ext, buf, buf);
  std::copy(buf, buf + data.size(), data.begin());
  fftwl_free(buf);
}

GridFunction SpectralPlan::solve(const GridFunction& q) const {
  require(q.n() == n_, ErrorCode::InvalidParameter, "grid function size does not match the plan");
  GridFunction u = q;
  solve_inplace(u.values());
  return u;
}

GridFunction solve_aux(const GridFunction& q, const SpectralPlan& plan) { return plan.solve(q); }

double apply_Lh_at(const GridFunction& u, const SpectralPlan& plan, Node p) {
  const int n = plan.n();
  const int r = stencil_radius(plan.order());
  const double* w = weights(plan.order());
  bool ok = true;
  double acc = 0.0;
  for (int s = -r; s <= r; ++s) {
    acc += w[s + r] * reflected([&](int i) { return u.at({i, p.iy}); }, p.ix + s, n, ok);
    acc += w[s + r] * reflected([&](int i) { return u.at({p.ix, i}); }, p.iy + s, n, ok);
  }
  if (!ok) {
    fail(ErrorCode::StencilRange, "stencil at node (" + std::to_string(p.ix) + "," +
                                      std::to_string(p.iy) + ") leaves the reflected range");
  }
  const double h = plan.h();
  return acc / (h * h) - plan.sigma() * u.at(p);
}

std::vector<double> apply_Lh(const GridFunction& u, const SpectralPlan& plan,
                             std::span<const int> at) {
  std::vector<double> out;
  out.reserve(at.size());
  const int n = plan.n();
  for (int f : at) out.push_back(apply_Lh_at(u, plan, {f % n + 1, f / n + 1}));
  return out;
}

GridFunction apply_Lh(const GridFunction& u, const SpectralPlan& plan) {
  const int n = plan.n();
  GridFunction out(n);
  for (int f = 0; f < n * n; ++f) out[f] = apply_Lh_at(u, plan, {f % n + 1, f / n + 1});
  return out;
}

std::vector<double> solve_aux_1d(std::span<const double> q, Order order, double h,
                                 double sigma) {
  const int n = static_cast<int>(q.size());
  require(n >= 1, ErrorCode::InvalidParameter, "1D solve needs n >= 1");
  std::vector<double> qhat = dst(q);
  for (int j = 1; j <= n; ++j)
    qhat[j - 1] *= (2.0 / (n + 1)) / (eigenvalue(order, j, n) / (h * h) - sigma);
  return dst(qhat);
}

double apply_Lh_1d_at(std::span<const double> u, Order order, double h, double sigma, int i) {
  const int n = static_cast<int>(u.size());
  const int r = stencil_radius(order);
  const double* w = weights(order);
  bool ok = true;
  double acc = 0.0;
  // Node numbers are 1-based: array index i is node i+1.
  for (int s = -r; s <= r; ++s)
    acc += w[s + r] * reflected([&](int k) { return u[k - 1]; }, i + 1 + s, n, ok);
  if (!ok) fail(ErrorCode::StencilRange, "1D stencil leaves the reflected range");
  return acc / (h * h) - sigma * u[i];
}

}  // namespace localdpm
