"""Dissipative two-spin adiabatic transport on the Bloch sphere.

Simulation library and CLI for the reduced pseudospin dynamics of a
spin dimer: coherent field sweeps, white-dephasing trajectories and
their noise average, the angular/radial split of the damped dynamics,
biased trajectory ensembles, and the phase structure they induce
(spectral transition, fixed-point skeleton, pole disconnection, and
dynamical free energies).
"""

from .core import (
    BallState,
    EntanglementReport,
    FieldSchedule,
    ModelParams,
    NormalizationError,
    ProjectionError,
    bloch_to_spinor,
    embed_two_spin,
    entanglement_measures,
    north_pole,
    project_two_spin,
    south_pole,
    spinor_to_bloch,
    stereo_project,
    stereo_unproject,
)
from .flows import BiasSpec, NoiseSpec, angular_field, biased_field, lindblad_field, radial_rate, sde_terms, unitary_field
from .integrate import (
    EnsembleSpec,
    EnsembleStats,
    IntegratorConfig,
    NonConvergenceError,
    Trajectory,
    integrate_angular_radial,
    integrate_ode,
    integrate_sde,
    run_ensemble,
    run_sweep,
)

__version__ = "0.1.0"
