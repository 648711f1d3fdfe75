"""Spherical pendulum on the cotangent bundle of the sphere.

Explicit quadrature flows for any admissible axisymmetric potential, elliptic
closed forms and action-angle coordinates for the quadratic potential, and a
constrained ODE oracle that adjudicates every closed-form constant.
"""

from .action_angle import (
    ActionAngleCoords,
    PeriodLattice,
    action_A2,
    action_angle_coords,
    angles,
    focus_loop,
    monodromy_transition,
    period_generators,
    period_scale_variants,
    section_times,
)
from .dynamics_general import (
    FlowState,
    R_eps,
    flow_H,
    flow_H_point,
    flow_J,
    joint_flow,
    joint_flow_point,
    rhs_H,
    vector_fields,
)
from .dynamics_quadratic import (
    QuadraticFiberParams,
    R_eps_closed,
    fiber_params,
    joint_flow_from_point,
    joint_flow_quadratic,
    section_start_point,
    section_trajectory,
)
from .elliptic import (
    ellint_F,
    ellint_K,
    ellint_Pi,
    ellint_Pi_complete,
    jacobi_am,
    jacobi_cn,
    jacobi_sn,
)
from .errors import (
    BranchExhausted,
    ChartDomainError,
    DegenerateInput,
    DomainError,
    InvalidPotential,
    NearSingularFiber,
    OutsideFiber,
    QuadratureFailure,
    SectionMissed,
    SphpendError,
    StepFailure,
    StratumError,
)
from .oracle import (
    IntegratorConfig,
    VerificationReport,
    build_report,
    integrate_reference,
    loop_action,
    measure_period,
    poisson_bracket_fd,
    quadrature_elliptic,
)
from .phase_space import (
    Chart,
    ChartPoint,
    MomentumValue,
    PhasePoint,
    Potential,
    Stratum,
    classify,
    from_chart,
    momentum_map,
    project,
    symplectic_eval,
    symplectic_matrix,
    to_chart,
)

__version__ = "0.1.0"
