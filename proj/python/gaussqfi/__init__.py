"""Gaussian-state quantum Fisher information of MZI, Yurke and Mandel interferometers."""

from ._gaussqfi import (
    CfiResult,
    Evaluator,
    Family,
    FisherResult,
    GaussianState,
    InfeasibleScenario,
    InnerSpec,
    NumericalError,
    OptimizationResult,
    Readout,
    RouteNotApplicable,
    Scenario,
    analytic,
    cfi,
    fock_probabilities,
    maximize_bounded,
    n_phi,
    optimize,
    output_state,
    qfi,
    r1_max,
    scenario_qfi,
    seed_for_target,
    t_critical_numeric,
    with_dose,
)

__version__ = "0.1.0"


def scenario(family="yurke", **fields):
    """Scenario with the named fields set, e.g. scenario("mandel", r1=0.3, eta=0.8)."""
    s = Scenario()
    s.family = Family.__members__[family] if isinstance(family, str) else family
    for name, value in fields.items():
        if not hasattr(s, name):
            raise AttributeError(f"Scenario has no field {name!r}")
        setattr(s, name, value)
    return s
