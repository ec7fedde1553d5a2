"""The path-editing language: grammar, parser, AST, canonical printer.

One operation call per line; blank lines and `#` comments are allowed, and
markdown code fences around the program are ignored. Parsing is total:
a malformed line becomes an Invalid record with its source span while the
remaining lines still parse.

Operations:
    select_path(path_index, agent)
    modify_translation(step, dx, dy, agent)
    modify_rotation(step, dtheta, agent)
    wait(step, t, agent)
    insert_waypoint(step, x, y[, theta], agent)

Agent references may be quoted or bare identifiers; quotes are stripped.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional, Tuple, Union


@dataclass(frozen=True)
class SourceSpan:
    line: int  # 1-based
    col: int   # 1-based column of the first offending/first token


@dataclass(frozen=True)
class SelectPath:
    path_index: int
    agent: str


@dataclass(frozen=True)
class ModifyTranslation:
    step: int
    dx: float
    dy: float
    agent: str


@dataclass(frozen=True)
class ModifyRotation:
    step: int
    dtheta: float
    agent: str


@dataclass(frozen=True)
class Wait:
    step: int
    t: int
    agent: str


@dataclass(frozen=True)
class InsertWaypoint:
    step: int
    x: float
    y: float
    theta: Optional[float]
    agent: str


Statement = Union[SelectPath, ModifyTranslation, ModifyRotation, Wait, InsertWaypoint]


@dataclass(frozen=True)
class ParseError:
    line: int
    col: int
    message: str


@dataclass(frozen=True)
class ProgramLine:
    span: SourceSpan
    text: str
    statement: Optional[Statement] = None
    error: Optional[ParseError] = None

    @property
    def valid(self) -> bool:
        return self.statement is not None


@dataclass(frozen=True)
class EditProgram:
    lines: Tuple[ProgramLine, ...] = ()

    @property
    def statements(self) -> Tuple[Statement, ...]:
        return tuple(l.statement for l in self.lines if l.statement is not None)

    @property
    def errors(self) -> Tuple[ParseError, ...]:
        return tuple(l.error for l in self.lines if l.error is not None)

    @classmethod
    def from_statements(cls, statements) -> "EditProgram":
        lines = tuple(
            ProgramLine(SourceSpan(i + 1, 1), print_statement(s), statement=s)
            for i, s in enumerate(statements)
        )
        return cls(lines)


_CALL_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\s*$")
_NUMBER_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")
_BARE_AGENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _split_args(body: str) -> list[str]:
    args, buf, quote = [], [], None
    for ch in body:
        if quote:
            buf.append(ch)
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
            buf.append(ch)
        elif ch == ",":
            args.append("".join(buf).strip())
            buf = []
        else:
            buf.append(ch)
    last = "".join(buf).strip()
    if last or args:
        args.append(last)
    return args


def _parse_number(tok: str) -> Optional[float]:
    if _NUMBER_RE.match(tok):
        v = float(tok)
        if math.isfinite(v):
            return v
    return None


def _parse_agent(tok: str) -> Optional[str]:
    if len(tok) >= 2 and tok[0] == tok[-1] and tok[0] in "\"'":
        inner = tok[1:-1].strip()
        return inner or None
    if _BARE_AGENT_RE.match(tok):
        return tok
    return None


def _nonneg_int(v: float) -> Optional[int]:
    if v >= 0 and float(v).is_integer():
        return int(v)
    return None


# op name -> (positional numeric arg count options)
_ARITY = {
    "select_path": (2,),
    "modify_translation": (4,),
    "modify_rotation": (3,),
    "wait": (3,),
    "insert_waypoint": (4, 5),
}


def _build_statement(op: str, nums: list[float], agent: str) -> Optional[Statement]:
    if op == "select_path":
        idx = _nonneg_int(nums[0])
        return None if idx is None else SelectPath(idx, agent)
    if op == "modify_translation":
        step = _nonneg_int(nums[0])
        return None if step is None else ModifyTranslation(step, nums[1], nums[2], agent)
    if op == "modify_rotation":
        step = _nonneg_int(nums[0])
        return None if step is None else ModifyRotation(step, nums[1], agent)
    if op == "wait":
        step, t = _nonneg_int(nums[0]), _nonneg_int(nums[1])
        return None if step is None or t is None else Wait(step, t, agent)
    if op == "insert_waypoint":
        step = _nonneg_int(nums[0])
        if step is None:
            return None
        theta = nums[3] if len(nums) == 4 else None
        return InsertWaypoint(step, nums[1], nums[2], theta, agent)
    return None


def _parse_line(text: str, lineno: int) -> Optional[ProgramLine]:
    stripped = text.strip()
    if not stripped or stripped.startswith("#") or stripped.startswith("```"):
        return None
    span = SourceSpan(lineno, len(text) - len(text.lstrip()) + 1)

    def invalid(msg: str, col: int = span.col) -> ProgramLine:
        return ProgramLine(span, text, error=ParseError(lineno, col, msg))

    m = _CALL_RE.match(text)
    if not m:
        return invalid(f"not a call: {stripped!r}")
    op = m.group(1)
    if op not in _ARITY:
        return invalid(f"UnknownOperation: {op!r}", col=m.start(1) + 1)
    args = _split_args(m.group(2))
    if len(args) not in _ARITY[op]:
        expected = " or ".join(str(a) for a in _ARITY[op])
        return invalid(f"{op} expects {expected} arguments, got {len(args)}")
    *num_toks, agent_tok = args
    nums: list[float] = []
    for tok in num_toks:
        v = _parse_number(tok)
        if v is None:
            return invalid(f"expected a number, got {tok!r}")
        nums.append(v)
    agent = _parse_agent(agent_tok)
    if agent is None:
        return invalid(f"expected an agent name, got {agent_tok!r}")
    stmt = _build_statement(op, nums, agent)
    if stmt is None:
        return invalid(f"non-negative integer argument required in {op}")
    return ProgramLine(span, text, statement=stmt)


def parse(text: str) -> EditProgram:
    """Parse program text. Total: never raises on any input string."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parsed = _parse_line(raw, lineno)
        if parsed is not None:
            lines.append(parsed)
    return EditProgram(tuple(lines))


def format_number(v: float) -> str:
    """Shortest exact decimal form: integral floats print without a dot.

    The grammar has no exponent notation, so values repr would render in
    scientific form are expanded positionally (still exact).
    """
    if float(v).is_integer():
        return str(int(v))
    s = repr(float(v))
    if "e" in s or "E" in s:
        return format(Decimal(s), "f")
    return s


def print_statement(stmt: Statement) -> str:
    a = f'"{stmt.agent}"'
    if isinstance(stmt, SelectPath):
        return f"select_path({stmt.path_index}, {a})"
    if isinstance(stmt, ModifyTranslation):
        return (f"modify_translation({stmt.step}, {format_number(stmt.dx)}, "
                f"{format_number(stmt.dy)}, {a})")
    if isinstance(stmt, ModifyRotation):
        return f"modify_rotation({stmt.step}, {format_number(stmt.dtheta)}, {a})"
    if isinstance(stmt, Wait):
        return f"wait({stmt.step}, {stmt.t}, {a})"
    if isinstance(stmt, InsertWaypoint):
        if stmt.theta is None:
            return (f"insert_waypoint({stmt.step}, {format_number(stmt.x)}, "
                    f"{format_number(stmt.y)}, {a})")
        return (f"insert_waypoint({stmt.step}, {format_number(stmt.x)}, "
                f"{format_number(stmt.y)}, {format_number(stmt.theta)}, {a})")
    raise TypeError(f"unknown statement type {type(stmt)!r}")


def print_program(program: EditProgram) -> str:
    """Canonical text: one call per line, agents double-quoted."""
    return "\n".join(print_statement(s) for s in program.statements)
