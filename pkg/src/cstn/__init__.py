"""Dynamic controllability toolkit for conditional simple temporal networks."""

from .core import (
    Cstn,
    CstnError,
    Label,
    LabeledConstraint,
    PartialScenario,
    Scenario,
    Schedule,
    WD1Violation,
    label_holds,
    project,
    schedule_satisfies,
    validate_wd1,
)
from .stn import Stn, stn_consistent, stn_solve
from .strategy import (
    LEAF,
    Leaf,
    Node,
    StrategyError,
    TableStrategy,
    TreeStrategy,
    check_single_flip,
    history,
    tree_to_table,
    verify_dynamic,
    verify_viable,
)
from .solver import (
    Configuration,
    DiscretizationParams,
    NotControllable,
    dc,
    dc_bounded,
    dc_extract,
    dc_from,
    discretize,
    is_terminal_and_dc,
)
from .qbf import Q3SatFormula, qbf_eval, qbf_extract_existential, qbf_extract_universal
from .reduction import adversary, reduce, witness_strategy

__version__ = "0.1.0"
