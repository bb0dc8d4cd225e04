"""No-slip billiards and nonholonomic rolling systems.

An event-driven simulation library for the rigid-ball bouncing model whose
collisions couple linear and angular velocity (no-slip billiards, dimensions
2 and 3, optional constant gravity) and for the smooth rolling systems one
dimension higher that approximate them as the ball radius shrinks.
"""

from .billiards import (
    Billiard2D,
    BilliardCylinder3D,
    NoSlipState2D,
    NoSlipState3D,
    billiard_trajectory,
    collide_2d,
    collide_3d,
    collide_general,
    flight,
    make_rolling_impact_state,
    project_axis,
    rolling_impact,
)
from .errors import (
    ConfigError,
    CornerEventError,
    DomainError,
    FocalPointError,
    GrazingEventError,
    NoSlipError,
    StiffnessError,
)
from .geometry import (
    ArclengthProfile,
    DiscSection,
    SinaiSquareSection,
    SinaiTorusSection,
    StripSection,
    TubeChart,
    boundary_data,
    curvature_factors,
    make_section,
    shape_eigen,
    stadium_profile,
)
from .inertia import (
    InertiaParams,
    beta_from_gamma,
    eta_from_gamma,
    eta_from_noslip_gamma,
    gamma_from_eta,
    match_inertia,
)
from .integrate import IntegratorConfig, energy_monitor, integrate_to_event
from .rolling import (
    RollState,
    curved_edge_pass,
    cylinder3d_rhs,
    cylinder4d_rhs,
    edge_map_flat,
    edge_rotation,
    noslip_limit_check,
    roll3d_trajectory,
    roll4d_trajectory,
    strip_closed_form,
)
from .trace import EventTrace, events_to_trace, read_trace, write_trace

__version__ = "0.1.0"
