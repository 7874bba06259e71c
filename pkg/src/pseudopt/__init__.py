"""pseudopt: spherically separable Schroedinger/Dirac eigenproblems with a
non-Hermitian, reflection-conjugation-symmetric azimuthal sector.

The library solves the three descendant one-dimensional eigenproblems
obtained by separating H = -laplacian + V(r) + [V(theta) + V(phi)]/(r^2
sin^2 theta) in spherical coordinates, supports complex azimuthal
interactions with real spectra, and composes full wavefunctions, densities
and isospectral potential families.
"""

__version__ = "0.1.0"

from .errors import (
    BoundStateError,
    ConvergenceError,
    ExclusionZoneError,
    NoPeriodicSolutionError,
    NormalizationUnderflowError,
    PseudoPTError,
    RealityToleranceError,
    SchemaError,
    SolverError,
)
from .specfun import (
    SeriesControl,
    assoc_legendre,
    bessel_i,
    bessel_i_deriv,
    bessel_k,
    hyp2f1_terminating,
    quad_periodic,
)
from .symmetry import (
    AzimuthalGrid,
    ComplexExp,
    Coulomb,
    Dirac,
    EffectivePotentials,
    GeneratedFrom,
    HalfPolar,
    InverseCosSquared,
    PolarGrid,
    PotentialSpec,
    RadialGrid,
    Schroedinger,
    SeparationConstants,
    ZeroPolar,
    ZeroRadial,
    apply_parity_phi,
    apply_timereversal_phi,
    effective_potential,
    lambda_map,
    preset_spec,
    pt_defect,
)
from .azimuthal import (
    AzimuthalSolution,
    GeneratorFunction,
    analytic_phi_solution,
    generator_from_potential,
    potential_from_generator,
    pt_normalization,
    single_valuedness_defect,
    solve_phi_numeric,
)
from .polar import (
    AngularSolution,
    legendre_branch,
    solve_theta_numeric,
    theta_closed_form_half,
    theta_closed_form_sec2,
)
from .radial import (
    QuantumNumbers,
    RadialSolution,
    coulomb_lambda,
    dirac_self_consistent,
    effective_l,
    hydrogenic_radial_solution,
    solve_radial_numeric,
)
from .assembly import (
    DensityGrid,
    Wavefunction,
    assemble,
    density,
    density_integral,
    export_density,
    isospectral_experiment,
    localization_ratio,
)
from .config import RunConfig, config_from_preset, load_config
