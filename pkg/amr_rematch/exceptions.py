"""
Exceptions Module

Typed errors raised across parsing, motif extraction, rewiring and evaluation.
"""

from typing import Optional


class AmrRematchError(Exception):
    """Base class for every error raised by the toolkit."""


# Penman text errors

class PenmanError(AmrRematchError):
    """Malformed Penman text, located by line and column (both 1-based)."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")


class UnbalancedParens(PenmanError):
    pass


class DuplicateVariableDefinition(PenmanError):
    pass


class UndefinedVariableReference(PenmanError):
    pass


class EmptyGraph(PenmanError):
    pass


class PenmanSyntaxError(PenmanError):
    pass


class InvalidGraphStructure(PenmanError):
    """Well-formed text whose graph breaks an AMR invariant (cycle, multiedge, ...)."""

    def __init__(self, message: str, constraint: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        self.constraint = constraint
        super().__init__(message, line, column)


# Graph invariant errors

class GraphInvariantError(AmrRematchError):
    constraint = "invariant"

    def __init__(self, message: str):
        self.message = message
        super().__init__(f"{self.constraint}: {message}")


class DisconnectedGraph(GraphInvariantError):
    constraint = "connectivity"


class CyclicGraph(GraphInvariantError):
    constraint = "acyclicity"


class MultiEdge(GraphInvariantError):
    constraint = "multiedge"


class UnknownNodeReference(GraphInvariantError):
    constraint = "node-reference"


class MissingRoot(GraphInvariantError):
    constraint = "root"


# Motif extraction

class UnknownNode(AmrRematchError, KeyError):
    def __str__(self):
        return f"unknown node: {self.args[0]!r}"


class UnknownEdge(AmrRematchError, IndexError):
    def __str__(self):
        return f"unknown relation index: {self.args[0]!r}"


# Files

class CorpusError(AmrRematchError):
    """A corpus block failed to parse; wraps the underlying error."""

    def __init__(self, block_index: int, cause: Exception, path: Optional[str] = None):
        self.block_index = block_index
        self.cause = cause
        self.path = path
        where = f"{path}: " if path else ""
        super().__init__(f"{where}block {block_index}: {cause}")


class MalformedRow(AmrRematchError):
    def __init__(self, line: int, row: str):
        self.line = line
        self.row = row
        super().__init__(f"malformed frame map row at line {line}: {row!r}")


class MalformedRecord(AmrRematchError, ValueError):
    """A JSON-lines record with a missing or unusable field."""

    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}: line {line}: {message}")


# RARE generation

class SpectrumInfeasible(AmrRematchError):
    def __init__(self, level: float, achieved: int, target: int):
        self.level = level
        self.achieved = achieved
        self.target = target
        super().__init__(f"level {level:g}: reached {achieved} of {target} swapped edges")


class EmptyCorpus(AmrRematchError):
    pass


# Evaluation

class DegenerateInput(AmrRematchError):
    """Rank correlation is undefined: too few pairs or a constant score column."""

    def __init__(self, side: str, message: Optional[str] = None):
        self.side = side
        super().__init__(message or f"degenerate input: {side} scores are constant")


class NonFiniteScore(AmrRematchError, ValueError):
    pass


class InsufficientCorpus(AmrRematchError):
    pass


class DuplicateEntryId(AmrRematchError):
    pass


class CorpusLengthMismatch(AmrRematchError):
    def __init__(self, left: int, right: int):
        self.left = left
        self.right = right
        super().__init__(f"paired corpora differ in length: {left} vs {right} graphs")
