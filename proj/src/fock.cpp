#include "gaussqfi/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SparseCore>
#include <unsupported/Eigen/MatrixFunctions>

namespace gaussqfi {

double FockDistribution::probability(const std::vector<int>& outcome) const {
  if (outcome.size() != detected_modes.size()) {
    throw std::invalid_argument("outcome has the wrong number of modes");
  }
  size_t idx = 0;
  for (int n : outcome) {
    if (n < 0 || n > cutoff) throw std::out_of_range("photon number outside the cutoff");
    idx = idx * (cutoff + 1) + n;
  }
  return probabilities[idx];
}

namespace {

constexpr size_t kMaxEntries = size_t{1} << 25;

void check_cutoff(int cutoff, int limit) {
  if (cutoff < 0 || cutoff > limit) {
    throw std::invalid_argument("cutoff must lie in [0, " + std::to_string(limit) + "], got " +
                                std::to_string(cutoff));
  }
}

size_t ipow(size_t base, int exp) {
  size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

double sum_of(const std::vector<double>& p) { return std::accumulate(p.begin(), p.end(), 0.0); }

}  // namespace

FockDistribution fock_probabilities(const GaussianState& state, std::vector<int> detected, int cutoff) {
  check_cutoff(cutoff, kMaxCutoff);
  const int n_modes = state.modes();
  if (detected.empty()) {
    detected.resize(n_modes);
    std::iota(detected.begin(), detected.end(), 0);
  }
  std::sort(detected.begin(), detected.end());
  if (std::adjacent_find(detected.begin(), detected.end()) != detected.end()) {
    throw std::invalid_argument("detected modes must be distinct");
  }
  std::vector<int> dropped;
  for (int m = 0; m < n_modes; ++m) {
    if (!std::binary_search(detected.begin(), detected.end(), m)) dropped.push_back(m);
  }
  for (int m : detected) {
    if (m < 0 || m >= n_modes) throw std::out_of_range("detected mode out of range");
  }
  const GaussianState reduced = dropped.empty() ? state : trace_out(state, dropped);

  const int k = static_cast<int>(detected.size());
  const int dims = 2 * k;
  const size_t side = cutoff + 1;
  const size_t total = ipow(side, dims);
  if (total > kMaxEntries) {
    throw std::invalid_argument("Fock table of " + std::to_string(total) + " entries exceeds the limit; lower the cutoff");
  }

  const ComplexGaussianState cs = to_complex(reduced);
  const ComplexMatrix id = ComplexMatrix::Identity(dims, dims);
  const ComplexMatrix q = 0.5 * (cs.cov + id);
  const Eigen::PartialPivLU<ComplexMatrix> q_lu(q);
  const ComplexMatrix q_inv = q_lu.inverse();
  ComplexMatrix x = ComplexMatrix::Zero(dims, dims);
  x.topRightCorner(k, k).setIdentity();
  x.bottomLeftCorner(k, k).setIdentity();
  const ComplexMatrix a = x * (id - q_inv);
  const ComplexVector& beta = cs.mean;
  const ComplexVector gamma = beta.conjugate() - a * beta;
  const Complex det_q = q_lu.determinant();
  if (!(det_q.real() > 0.0)) throw NumericalError("fock_probabilities: invalid covariance (det Q <= 0)");
  const Complex prefactor = std::exp(-0.5 * beta.dot(q_inv * beta)) / std::sqrt(det_q.real());

  std::vector<size_t> stride(dims);
  for (int r = 0; r < dims; ++r) stride[r] = ipow(side, dims - 1 - r);
  std::vector<double> root(side + 1);
  for (size_t n = 0; n <= side; ++n) root[n] = std::sqrt(static_cast<double>(n));

  // G_{K+e_i} = (gamma_i G_K + sum_j A_ij sqrt(K_j) G_{K-e_j}) / sqrt(K_i + 1)
  std::vector<Complex> g(total);
  g[0] = prefactor;
  std::vector<int> digit(dims, 0);
  for (size_t idx = 1; idx < total; ++idx) {
    for (int r = dims - 1; r >= 0; --r) {
      if (++digit[r] < static_cast<int>(side)) break;
      digit[r] = 0;
    }
    int i = dims - 1;
    while (digit[i] == 0) --i;
    const size_t prev = idx - stride[i];
    Complex v = gamma(i) * g[prev];
    for (int j = 0; j < dims; ++j) {
      const int kj = digit[j] - (j == i ? 1 : 0);
      if (kj > 0) v += a(i, j) * root[kj] * g[prev - stride[j]];
    }
    g[idx] = v / root[digit[i]];
  }

  FockDistribution out;
  out.detected_modes = detected;
  out.cutoff = cutoff;
  const size_t outcomes = ipow(side, k);
  out.probabilities.resize(outcomes);
  for (size_t o = 0; o < outcomes; ++o) {
    size_t rem = o;
    size_t idx = 0;
    for (int m = k - 1; m >= 0; --m) {
      const size_t n = rem % side;
      rem /= side;
      idx += n * (stride[m] + stride[m + k]);
    }
    double p = g[idx].real();
    if (p < 0.0) {
      if (p < -1e-10) throw NumericalError("fock_probabilities: negative probability " + std::to_string(p));
      p = 0.0;
    }
    out.probabilities[o] = p;
  }
  out.truncation_mass = std::max(0.0, 1.0 - sum_of(out.probabilities));
  return out;
}

FockDistribution saturating_fock_probabilities(const GaussianState& state, std::vector<int> detected, int cutoff) {
  // The marginals run at cutoff - 1, so one level more than the plain table is fine.
  check_cutoff(cutoff, kMaxCutoff + 1);
  if (cutoff < 1) throw std::invalid_argument("saturating readout needs cutoff >= 1");
  if (detected.empty()) {
    detected.resize(state.modes());
    std::iota(detected.begin(), detected.end(), 0);
  }
  std::sort(detected.begin(), detected.end());
  const int k = static_cast<int>(detected.size());
  const size_t side = cutoff + 1;

  // P(exact counts n_S on S, >= cutoff on the rest) is the sum over T in the
  // rest of (-1)^|T| P_{S+T}(n_S, n_T < cutoff). Each marginal P_W below feeds
  // every split W = S + T.
  std::vector<double> p(ipow(side, k), 0.0);
  p.back() = 1.0;
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<int> on;
    for (int m = 0; m < k; ++m)
      if (mask >> m & 1) on.push_back(detected[m]);
    const int w = static_cast<int>(on.size());
    const FockDistribution marginal = fock_probabilities(state, on, cutoff - 1);
    std::vector<int> n(w);
    for (size_t idx = 0; idx < marginal.probabilities.size(); ++idx) {
      size_t rem = idx;
      for (int j = w - 1; j >= 0; --j) {
        n[j] = static_cast<int>(rem % cutoff);
        rem /= cutoff;
      }
      const double pw = marginal.probabilities[idx];
      for (int exact = 0; exact < (1 << w); ++exact) {
        size_t target = 0;
        int j = 0;
        for (int m = 0; m < k; ++m) {
          int level = cutoff;
          if (mask >> m & 1) {
            if (exact >> j & 1) level = n[j];
            ++j;
          }
          target = target * side + level;
        }
        const bool odd = (w - std::popcount(static_cast<unsigned>(exact))) % 2 == 1;
        p[target] += odd ? -pw : pw;
      }
    }
  }
  for (double& v : p) {
    if (v < 0.0) {
      if (v < -1e-10) throw NumericalError("saturating_fock_probabilities: negative probability " + std::to_string(v));
      v = 0.0;
    }
  }
  FockDistribution out;
  out.detected_modes = detected;
  out.cutoff = cutoff;
  out.readout = Readout::saturating;
  out.truncation_mass = std::max(0.0, 1.0 - sum_of(p));
  out.probabilities = std::move(p);
  return out;
}

FockDistribution fock_probabilities(const GaussianState& state, std::vector<int> detected, int cutoff,
                                    Readout readout) {
  return readout == Readout::saturating ? saturating_fock_probabilities(state, std::move(detected), cutoff)
                                        : fock_probabilities(state, std::move(detected), cutoff);
}

namespace {

using Sparse = Eigen::SparseMatrix<Complex>;

// Dense density matrix over modes with `dim` levels each, mode 0 most
// significant.
struct DenseState {
  int dim;
  int modes;
  ComplexMatrix rho;

  size_t size() const { return ipow(dim, modes); }

  int digit(size_t idx, int mode) const { return static_cast<int>(idx / ipow(dim, modes - 1 - mode) % dim); }

  size_t with_digit(size_t idx, int mode, int value) const {
    const size_t s = ipow(dim, modes - 1 - mode);
    return idx - (idx / s % dim) * s + value * s;
  }

  // Local operator on `on` (first listed mode most significant) lifted to the
  // full space.
  Sparse lift(const ComplexMatrix& local, const std::vector<int>& on) const {
    const size_t n = size();
    const int k = static_cast<int>(on.size());
    std::vector<Eigen::Triplet<Complex>> entries;
    for (size_t in = 0; in < n; ++in) {
      size_t l_in = 0;
      for (int m : on) l_in = l_in * dim + digit(in, m);
      for (Eigen::Index l_out = 0; l_out < local.rows(); ++l_out) {
        const Complex v = local(l_out, l_in);
        if (v == Complex(0.0, 0.0)) continue;
        size_t out = in;
        size_t rem = l_out;
        for (int j = k - 1; j >= 0; --j) {
          out = with_digit(out, on[j], static_cast<int>(rem % dim));
          rem /= dim;
        }
        entries.emplace_back(out, in, v);
      }
    }
    Sparse s(n, n);
    s.setFromTriplets(entries.begin(), entries.end());
    return s;
  }

  void conjugate_by(const Sparse& u) {
    const ComplexMatrix left = u * rho;
    rho = left * u.adjoint();
  }

  void apply_local(const ComplexMatrix& local, const std::vector<int>& on) { conjugate_by(lift(local, on)); }

  void loss(int mode, double t) {
    ComplexMatrix next = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (int j = 0; j < dim; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
      for (int n = j; n < dim; ++n) {
        const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0));
        e(n - j, n) = std::sqrt(binom * std::pow(t, n - j) * std::pow(1.0 - t, j));
      }
      const Sparse kraus = lift(e, {mode});
      const ComplexMatrix left = kraus * rho;
      next += left * kraus.adjoint();
    }
    rho = next;
  }

  void trace_out(int mode) {
    const int rest = modes - 1;
    const size_t n = ipow(dim, rest);
    ComplexMatrix next = ComplexMatrix::Zero(n, n);
    auto expand = [&](size_t r, int v) {
      // Insert digit v at position `mode` of the reduced index r.
      const size_t low = ipow(dim, rest - mode);
      return (r / low) * low * dim + v * low + r % low;
    };
    for (size_t r = 0; r < n; ++r)
      for (size_t c = 0; c < n; ++c)
        for (int v = 0; v < dim; ++v) next(r, c) += rho(expand(r, v), expand(c, v));
    rho = next;
    modes = rest;
  }
};

ComplexMatrix annihilation(int dim) {
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

ComplexMatrix kron(const ComplexMatrix& x, const ComplexMatrix& y) {
  ComplexMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

// Fock-space unitary of a phase shift, beam splitter or two-mode squeezer,
// recognized from its symplectic matrix.
ComplexMatrix fock_unitary(const SymplecticOp& op, int dim) {
  const RealMatrix& f = op.matrix;
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  if (op.modes.size() == 1) {
    const double phi = std::atan2(f(0, 1), f(0, 0));
    ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) u(n, n) = std::exp(Complex(0.0, -phi * n));
    return u;
  }
  if (op.modes.size() != 2) throw std::invalid_argument("dense oracle handles one- and two-mode ops only");
  const ComplexMatrix a = kron(annihilation(dim), id);
  const ComplexMatrix b = kron(id, annihilation(dim));
  const double t = f(0, 0);
  if (t <= 1.0 + 1e-12) {
    // a -> sqrt(eta) a + sqrt(1 - eta) b
    const double angle = std::atan2(f(0, 2), f(0, 0));
    const ComplexMatrix gen = angle * (a.adjoint() * b - a * b.adjoint());
    return gen.exp();
  }
  const double r = std::acosh(t);
  const double theta = std::atan2(-f(0, 3), -f(0, 2));
  const Complex zeta = std::polar(r, theta);
  const ComplexMatrix gen = std::conj(zeta) * a * b - zeta * a.adjoint() * b.adjoint();
  return gen.exp();
}

}  // namespace

FockDistribution dense_fock_oracle(const Circuit& circuit, double phi, int cutoff, int internal_dim) {
  validate(circuit);
  check_cutoff(cutoff, 8);
  if (circuit.n_modes > 3) throw std::invalid_argument("dense oracle handles at most 3 modes");
  const int dim = internal_dim > 0 ? internal_dim : cutoff + 6;
  if (dim < cutoff + 1) throw std::invalid_argument("internal dimension must exceed the cutoff");
  if (ipow(dim, circuit.n_modes) > 4096) throw std::invalid_argument("dense oracle dimension overflow");

  ComplexVector psi = ComplexVector::Ones(1);
  for (const Complex& alpha : circuit.seeds) {
    ComplexVector c(dim);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    psi = kron(psi, c);
  }
  DenseState s{dim, circuit.n_modes, psi * psi.adjoint()};

  for (const Step& step : circuit.steps) {
    if (const auto* op = std::get_if<SymplecticOp>(&step)) {
      s.apply_local(fock_unitary(*op, dim), op->modes);
    } else if (const auto* p = std::get_if<PhaseSlot>(&step)) {
      s.apply_local(fock_unitary(make_phase_shift(phi, p->mode), dim), {p->mode});
    } else if (const auto* l = std::get_if<LossStep>(&step)) {
      s.loss(l->mode, l->transmission);
    } else if (const auto* d = std::get_if<DiscardStep>(&step)) {
      std::vector<int> modes = d->modes;
      std::sort(modes.rbegin(), modes.rend());
      for (int m : modes) s.trace_out(m);
    }
  }

  FockDistribution out;
  out.detected_modes.resize(s.modes);
  std::iota(out.detected_modes.begin(), out.detected_modes.end(), 0);
  out.cutoff = cutoff;
  const size_t side = cutoff + 1;
  const size_t outcomes = ipow(side, s.modes);
  out.probabilities.resize(outcomes);
  for (size_t o = 0; o < outcomes; ++o) {
    size_t rem = o;
    size_t idx = 0;
    size_t scale = 1;
    for (int m = s.modes - 1; m >= 0; --m) {
      idx += (rem % side) * scale;
      rem /= side;
      scale *= dim;
    }
    out.probabilities[o] = std::max(0.0, s.rho(idx, idx).real());
  }
  out.truncation_mass = std::max(0.0, 1.0 - sum_of(out.probabilities));
  return out;
}

namespace {

struct FisherSum {
  double value = 0.0;
  int dropped = 0;
  double mass = 0.0;
};

FisherSum fisher_sum(const Circuit& circuit, double phi, int cutoff, double h, Readout readout) {
  auto dist = [&](double at) { return fock_probabilities(evolve(circuit, at), {}, cutoff, readout); };
  const FockDistribution p0 = dist(phi);
  const FockDistribution pp = dist(phi + h);
  const FockDistribution pm = dist(phi - h);
  const FockDistribution pp2 = dist(phi + 2.0 * h);
  const FockDistribution pm2 = dist(phi - 2.0 * h);

  FisherSum r;
  r.mass = p0.truncation_mass;
  std::vector<double> terms(p0.probabilities.size(), 0.0);
  std::vector<bool> flipped(p0.probabilities.size(), false);
  for (size_t i = 0; i < terms.size(); ++i) {
    const double p = p0.probabilities[i];
    if (p < 1e-12) {
      ++r.dropped;
      continue;
    }
    const double d1 = (pp.probabilities[i] - pm.probabilities[i]) / (2.0 * h);
    const double d2 = (pp2.probabilities[i] - pm2.probabilities[i]) / (4.0 * h);
    terms[i] = d1 * d1 / p;
    flipped[i] = d1 * d2 < 0.0;
    r.value += terms[i];
  }
  for (size_t i = 0; i < terms.size(); ++i) {
    // Terms below ~1e-10 are rounding noise in p (of order eps / h) and carry no sign.
    if (flipped[i] && terms[i] > std::max(1e-6 * r.value, 1e-10)) {
      throw NumericalError("cfi: derivative sign unstable between steps h and 2h; the step is too small");
    }
  }
  return r;
}

}  // namespace

CfiResult cfi(const ScenarioConfig& config, int cutoff, double h, Readout readout) {
  if (!(h > 0.0)) throw std::invalid_argument("derivative step must be positive");
  const Circuit circuit = build(config);
  const FisherSum main = fisher_sum(circuit, config.phi, cutoff, h, readout);

  CfiResult r;
  r.value = main.value;
  r.phi = config.phi;
  r.cutoff = cutoff;
  r.derivative_step = h;
  r.dropped_terms = main.dropped;
  r.truncation_mass = main.mass;
  r.readout = readout;
  if (readout == Readout::truncated) {
    // Levels 0..cutoff stay resolved and everything above lands in one bin.
    const FisherSum binned = fisher_sum(circuit, config.phi, cutoff + 1, h, Readout::saturating);
    r.truncation_bound = std::max(0.0, binned.value - main.value);
  }
  return r;
}

}  // namespace gaussqfi
