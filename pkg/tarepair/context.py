"""This module is used to trace diagnostics back to pipeline steps and input files

It contains:

- class ContextElement
    stores a current context with
    - a description (ex: "step 5 (constraint generation)")
    - an optional source file

- class ContextStack:
    a stack of ContextElements
    add elements on top with .new(), remove them with .pop()
    .trace() shows a trace leading to the topmost context
"""

from typing import List, Optional


class ContextElement:
    """Context for diagnostic tracing"""

    description: str
    source: Optional[str]

    def __init__(
        self: "ContextElement",
        description: str,
        source: Optional[str] = None,
    ) -> None:
        self.description = description
        self.source = source

    def location(self: "ContextElement") -> str:
        """the source file, "" when there is none"""
        return self.source or ""


class EmptyContextStack(ValueError):
    """Exception raised when context stack
    is empty"""


class ContextStack:
    """Class used to store context information to print in traceback"""

    _stack: List[ContextElement]

    def __init__(self: "ContextStack") -> None:
        self._stack = []

    @property
    def top(self: "ContextStack") -> ContextElement:
        """returns the top element
        raises EmptyContextStack if empty"""
        if not self.is_empty():
            return self._stack[-1]
        raise EmptyContextStack

    def new(
        self: "ContextStack",
        description: str,
        source: Optional[str] = None,
    ) -> None:
        """adds a new context on top of the stack
        description is a short string (ex "in step synth")"""
        self._stack.append(ContextElement(description, source))

    def pop(self: "ContextStack") -> None:
        """removes the topmost Context from the stack"""
        if self._stack:
            del self._stack[-1]
        else:
            raise EmptyContextStack

    def trace(self: "ContextStack") -> str:
        """Returns a string trace for error solving.
        It is in the format:
        "tarepair: outer desc
        path/to/file: inner desc
        "
        Returns an empty string when the stack is empty"""
        trace = ""
        for elem in self._stack:
            location = elem.location()
            if location:
                trace += "{}: {}\n".format(location, elem.description)
            else:
                trace += "{}\n".format(elem.description)
        return trace

    def is_empty(self: "ContextStack") -> bool:
        """returns True if stack is empty, False otherwise"""
        return self._stack == []
