"""
This package repairs the clock constants of timed automata:
the constants are abstracted into parameters, tests generated from the
parametric zone graph are labeled by an oracle, the parameter valuations
agreeing with every verdict are synthesized and the closest one to the
original constants is picked.
It contains:
- the Session class - use to configure and run subcommands
- the PipelineConfig class - settings of a run
- constants TOOL_NAME and TOOL_VERSION
- the WarningMode and ErrorMode enums used to configure the Session class
- the RepairError and RepairWarning classes
- run_pipeline and run_experiment to use the pipeline as a library
"""

from .defaults import PipelineConfig, Session
from .defs import TOOL_NAME, TOOL_VERSION
from .errors import ErrorMode, RepairError, RepairWarning, WarningMode
from .evaluation import run_experiment, run_pipeline

__author__ = "tarepair developers"
__email__ = ""
__version__ = TOOL_VERSION
__description__ = (
    "Repair of timed automata clock guards from oracle verdicts"
    " by parameter synthesis"
)
__license__ = "MIT"
__url__ = ""

__all__ = (
    "PipelineConfig",
    "Session",
    "TOOL_NAME",
    "TOOL_VERSION",
    "ErrorMode",
    "RepairError",
    "RepairWarning",
    "WarningMode",
    "run_experiment",
    "run_pipeline",
)
