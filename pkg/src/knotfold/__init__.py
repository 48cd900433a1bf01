"""knotfold: fold knots in midair with a team of cable-carrying robots.

Pipeline: Gauss code -> grid diagram -> opened corner polyline ->
multi-catenary curve -> dipped-waypoint quintic trajectory -> delayed
leader-follower simulation -> extracted Gauss code check.
"""

from .gauss import OVER, UNDER, GaussCode, canonicalize, parse_gauss_code
from .grid import (
    Crossing,
    GridDiagram,
    GridReport,
    KnotPolyline,
    OpenGridDiagram,
    closed_gauss_code,
    grid_search,
    open_diagram,
    planar_gauss_code,
    trace_polyline,
    validate_grid,
)
from .curve_code import (
    CurveCrossing,
    DegenerateCrossingError,
    extract_crossings,
    gauss_code_of_curve,
)
from .catenary import (
    CatenaryParams,
    CatenarySegment,
    MultiCatenaryCurve,
    StraightSegment,
    TautCableError,
    arc_length,
    compose,
    crossing_clearances,
    eval_curve,
    eval_local,
    fit_segment_to_length,
    h_max_bound,
    make_segment,
    sample_curve,
    solve_from_length,
    solve_intrinsic,
)
from .plan import (
    KnotPlan,
    VerifyReport,
    assign_heights,
    build_plan,
    cable_cut_list,
    plan_from_json_dict,
    plan_to_json_dict,
    rescale_for_cable,
    verify_plan,
    verify_topology,
)
from .trajectory import (
    FoldSchedule,
    Trajectory,
    augment_waypoints,
    default_t_d,
    eval_trajectory,
    grasp_points,
    make_schedule,
    quintic_spline,
    transit_chord_margins,
)
from .sim import (
    CableState,
    MarginAudit,
    RobotPhase,
    SimConfig,
    SimTrace,
    audit_margins,
    cable_state,
    control,
    run,
    step,
)
from .assets import bundled_names, load_bundled, load_grid_file

__version__ = "0.1.0"
