"""Asymptotic counts of prime cycles in a homology class on weighted multigraphs."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BudgetError,
    CalibrationError,
    ConsistencyError,
    ConvergenceError,
    GraphFormatError,
    HomocycleError,
    InadmissibleGraphError,
)
from .graph import (  # noqa: E402
    MultiGraph,
    homology_labeling,
    load_graph,
    oriented_double,
    parse_graph,
    validate_graph,
)
from .lengths import ExactLength  # noqa: E402
