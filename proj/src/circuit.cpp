#include "gaussqfi/circuit.hpp"

#include <string>

namespace gaussqfi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

RealMatrix keep_rows(const RealMatrix& m, const std::vector<int>& idx) {
  RealMatrix out(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j) out(i, j) = m(idx[i], idx[j]);
  return out;
}

std::vector<int> kept_quadratures(int n_modes, const std::vector<int>& dropped) {
  std::vector<bool> drop(n_modes, false);
  for (int m : dropped) drop[m] = true;
  std::vector<int> keep;
  for (int m = 0; m < n_modes; ++m) {
    if (!drop[m]) {
      keep.push_back(2 * m);
      keep.push_back(2 * m + 1);
    }
  }
  return keep;
}

// Walks the circuit, optionally carrying the phi-derivative of the moments.
struct Walker {
  GaussianState state;
  RealVector d_mean;
  RealMatrix d_cov;
  bool track = false;

  void symplectic(const SymplecticOp& op) {
    const RealMatrix f = embed(op, state.modes());
    state = apply(state, op);
    if (track) {
      d_mean = f * d_mean;
      d_cov = f * d_cov * f.transpose();
      d_cov = 0.5 * (d_cov + d_cov.transpose());
    }
  }

  void phase(int mode, double phi) {
    const SymplecticOp op = make_phase_shift(phi, mode);
    if (track) {
      const int n = state.modes();
      const RealMatrix f = embed(op, n);
      RealMatrix g = RealMatrix::Zero(2 * n, 2 * n);
      g.block(2 * mode, 2 * mode, 2, 2) = phase_shift_derivative(phi);
      const RealMatrix& s = state.cov();
      d_mean = f * d_mean + g * state.mean();
      RealMatrix ds = f * d_cov * f.transpose() + g * s * f.transpose() + f * s * g.transpose();
      d_cov = 0.5 * (ds + ds.transpose());
    }
    state = apply(state, op);
  }

  void loss(int mode, double t) {
    if (track) {
      // Same ancilla construction as apply_loss; the ancilla carries no
      // phi-dependence.
      const int n = state.modes();
      const RealMatrix f = embed(make_beam_splitter(t, mode, n), n + 1);
      RealVector dd = RealVector::Zero(2 * n + 2);
      dd.head(2 * n) = d_mean;
      RealMatrix ds = RealMatrix::Zero(2 * n + 2, 2 * n + 2);
      ds.topLeftCorner(2 * n, 2 * n) = d_cov;
      d_mean = (f * dd).head(2 * n);
      d_cov = (f * ds * f.transpose()).topLeftCorner(2 * n, 2 * n);
    }
    state = apply_loss(state, mode, t);
  }

  void discard(const std::vector<int>& modes) {
    if (track) {
      const std::vector<int> keep = kept_quadratures(state.modes(), modes);
      RealVector dd(keep.size());
      for (size_t i = 0; i < keep.size(); ++i) dd(i) = d_mean(keep[i]);
      d_mean = dd;
      d_cov = keep_rows(d_cov, keep);
    }
    state = trace_out(state, modes);
  }
};

Walker walk(const Circuit& circuit, double phi, bool track) {
  validate(circuit);
  Walker w{input_state(circuit), RealVector::Zero(2 * circuit.n_modes),
           RealMatrix::Zero(2 * circuit.n_modes, 2 * circuit.n_modes), track};
  for (const Step& step : circuit.steps) {
    std::visit(overloaded{[&](const SymplecticOp& op) { w.symplectic(op); },
                          [&](const PhaseSlot& p) { w.phase(p.mode, phi); },
                          [&](const LossStep& l) { w.loss(l.mode, l.transmission); },
                          [&](const DiscardStep& d) { w.discard(d.modes); }},
               step);
  }
  return w;
}

}  // namespace

void validate(const Circuit& circuit) {
  if (circuit.n_modes < 1) throw std::invalid_argument("circuit needs at least one mode");
  if (static_cast<int>(circuit.seeds.size()) != circuit.n_modes) {
    throw std::invalid_argument("circuit needs one seed amplitude per mode");
  }
  int n = circuit.n_modes;
  int phase_slots = 0;
  auto check = [&](int m) {
    if (m < 0 || m >= n) throw std::invalid_argument("circuit step refers to mode " + std::to_string(m));
  };
  for (const Step& step : circuit.steps) {
    std::visit(overloaded{[&](const SymplecticOp& op) {
                            for (int m : op.modes) check(m);
                            if (symplectic_defect(op.matrix) > kSymplecticTol) {
                              throw std::invalid_argument("circuit contains a non-symplectic op");
                            }
                          },
                          [&](const PhaseSlot& p) {
                            check(p.mode);
                            ++phase_slots;
                          },
                          [&](const LossStep& l) {
                            check(l.mode);
                            if (!(l.transmission >= 0.0 && l.transmission <= 1.0)) {
                              throw std::invalid_argument("loss transmission outside [0, 1]");
                            }
                          },
                          [&](const DiscardStep& d) {
                            for (int m : d.modes) check(m);
                            n -= static_cast<int>(d.modes.size());
                            if (n < 1) throw std::invalid_argument("circuit discards every mode");
                          }},
               step);
  }
  if (phase_slots != 1) {
    throw std::invalid_argument("circuit must contain exactly one phase slot, found " +
                                std::to_string(phase_slots));
  }
}

GaussianState input_state(const Circuit& circuit) {
  GaussianState s = vacuum_state(circuit.n_modes);
  for (int m = 0; m < circuit.n_modes; ++m) s = displace(s, m, circuit.seeds[m]);
  return s;
}

GaussianState evolve(const Circuit& circuit, double phi) { return walk(circuit, phi, false).state; }

Tangent evolve_with_derivative(const Circuit& circuit, double phi) {
  Walker w = walk(circuit, phi, true);
  return {w.state, w.d_mean, w.d_cov};
}

double photons_at_phase(const Circuit& circuit) {
  validate(circuit);
  Circuit prefix = circuit;
  prefix.steps.clear();
  int mode = 0;
  for (const Step& step : circuit.steps) {
    if (const auto* p = std::get_if<PhaseSlot>(&step)) {
      mode = p->mode;
      break;
    }
    prefix.steps.push_back(step);
  }
  prefix.steps.push_back(PhaseSlot{mode});
  return mean_photon_number(evolve(prefix, 0.0), mode);
}

}  // namespace gaussqfi
