"""sketchnav: draw a path, store it, have a simulated robot follow it, and
score the drawing against a target corridor."""

from .drawing import DEFAULT_WAYPOINT_SPACING, DrawingSession, DrawnPath
from .errors import (
    DatabaseFormatError,
    DegeneratePathError,
    DegenerateSampleError,
    DuplicatePathIdError,
    GridMismatchError,
    InvalidStartError,
    MapFormatError,
    NoPathAvailableError,
    NothingToSendError,
    OutOfBoundsError,
    PathNotFoundError,
    PathTooShortError,
    PersistenceError,
    ProtocolError,
    SketchNavError,
    StoreError,
    UnsupportedVersionError,
)
from .evaluator import (
    ConfusionCounts,
    MetricReport,
    RegionMask,
    Scenario,
    build_gt_region,
    confusion,
    evaluate_path,
    load_scenario,
    make_stage,
    metrics,
    pct_within_gt,
    rasterize_drawn,
    save_scenario,
    scenario_grid,
)
from .geometry import (
    AnchorTransform,
    Point2D,
    Pose2D,
    normalize_angle,
    polyline_length,
    resample_uniform,
)
from .planner import GlobalPath, PlannerSlot, assign_orientations, goal_pose
from .pure_pursuit import (
    ControllerParams,
    Twist,
    compute_command,
    compute_twist,
    goal_reached,
    local_transform,
    select_target,
)
from .session import Session, SessionConfig, SessionMode
from .simulator import (
    GridGeometry,
    OccupancyGrid,
    Outcome,
    RobotState,
    Trajectory,
    TrajectorySample,
    cross_track_errors,
    load_map,
    run_follow,
    step,
)
from .stats import PairedSample, StatResult, effect_size_r, wilcoxon_signed_rank
from .store import PathDatabase, PathStore, deserialize, load, save_atomic, serialize

__version__ = "0.1.0"
