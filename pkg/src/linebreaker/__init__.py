"""Line-breaking pass detection from synchronized event and tracking data.

The pipeline: load a normalized match, smooth trajectories, snapshot
each completed pass with the opposing team frozen at release, cluster
the opponents into vertical bands, classify line-breaks, score space
gain, link chains inside possessions, and aggregate per team/player.
"""

from .aggregation import EntityStats, aggregate, top_n
from .chains import (
    ChainConfig,
    ChainKind,
    ChainOutcome,
    ChainRecord,
    Possession,
    cumulative_sbr,
    detect_chains,
    detect_lbpch1,
    detect_lbpch2,
    segment_possessions,
)
from .errors import (
    BoundsError,
    EmptyOpponentsError,
    LinebreakerError,
    MissingInputError,
    MissingPlayerError,
    OrientationError,
    PlanInfeasibleError,
    SchemaError,
    SyncError,
    UnknownMetricError,
)
from .geometry import (
    PassVector,
    Point2,
    nearest_opponent_distance,
    point_to_segment_distance,
    segment_intersects_band,
)
from .ingestion import (
    EventOutcome,
    EventType,
    MatchEvent,
    NormalizedMatch,
    PassSnapshot,
    PitchMeta,
    Roster,
    RosterEntry,
    TrackingFrame,
    load_match,
    load_match_dir,
    matches_equal,
    normalize_orientation,
    save_match,
    smooth_positions,
    snapshot_pass,
)
from .lbp_detection import (
    DetectConfig,
    LbpRecord,
    count_bypassed_opponents,
    detect_all,
    detect_lbp,
)
from .metrics import (
    SpaceEstimate,
    compute_sbr,
    compute_verticality,
    pass_distance,
)
from .team_shape import (
    ClusterLine,
    ShapeConfig,
    TeamShape,
    cluster_team_shape,
    count_lines_crossed,
)
from .testkit import (
    GroundTruthLedger,
    PlantedChainSpec,
    PlantedLbpSpec,
    SyntheticPlan,
    generate_match,
    oracle_cluster_1d,
    oracle_lbp,
    write_fixture,
)

__version__ = "0.1.0"
