"""Traffic-analytics chatbot engine.

Answers natural-language questions over a loop-detector traffic warehouse
by orchestrating four agent roles through a plan / generate-SQL / validate /
execute / interpret loop, and ships a benchmark harness that grades any
pipeline variant with a three-tier rubric.
"""

__version__ = "0.1.0"

from .traffic import (  # noqa: F401
    Detector,
    Direction,
    LaneClass,
    LoopObservation,
    NetworkConfig,
    Segment,
    TrafficIndexRecord,
    compute_tps,
    compute_vmt,
    estimate_emissions,
)
from .schema import SchemaCatalog, default_catalog  # noqa: F401
from .sqlguard import ValidationReport, Verdict, validate_sql  # noqa: F401
from .gateway import QueryResult, TrafficStore  # noqa: F401
from .synth import SyntheticDataset, generate_synthetic_network  # noqa: F401
from .orchestrator import (  # noqa: F401
    FeatureFlags,
    Orchestrator,
    OrchestratorConfig,
    Outcome,
    PipelineTrace,
)
from .bench import (  # noqa: F401
    BenchmarkTask,
    Category,
    ScoreTally,
    build_tasks,
    classify,
    run_benchmark,
    score,
)
