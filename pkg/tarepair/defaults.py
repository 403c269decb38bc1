"""
This module adds all default subcommands to
the Session class variables.
"""

from .commands import (
    Cmd_Abstract,
    Cmd_Epzg,
    Cmd_Eval,
    Cmd_GenTests,
    Cmd_Label,
    Cmd_Pipeline,
    Cmd_Repair,
    Cmd_ScWords,
    Cmd_Synth,
)
from .session import PipelineConfig, Session

# one subcommand per step, in pipeline order

Session.commands["abstract"] = Cmd_Abstract()
Session.commands["epzg"] = Cmd_Epzg()
Session.commands["gen-tests"] = Cmd_GenTests()
Session.commands["label"] = Cmd_Label()
Session.commands["synth"] = Cmd_Synth()
Session.commands["repair"] = Cmd_Repair()

# composed

Session.commands["eval"] = Cmd_Eval()
Session.commands["pipeline"] = Cmd_Pipeline()
Session.commands["sc-words"] = Cmd_ScWords()

__all__ = ("PipelineConfig", "Session")
