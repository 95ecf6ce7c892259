"""External SMT solver client: one child process per script."""

from __future__ import annotations

import os
import shlex
import subprocess
from dataclasses import dataclass

from .smtlib import SexpError, Symbol, parse_sexps

DEFAULT_SOLVER = "z3 -in"
SOLVER_ENV = "FOAUTOMATA_SOLVER"


class SolverSpawnError(RuntimeError):
    pass


@dataclass(frozen=True)
class Sat:
    model: str


@dataclass(frozen=True)
class Unsat:
    pass


@dataclass(frozen=True)
class Unknown:
    reason: str


@dataclass(frozen=True)
class SolverError:
    diagnostics: str


def solver_command(command: str | None = None) -> list[str]:
    """Explicit command, else $FOAUTOMATA_SOLVER, else ``z3 -in``."""
    text = command or os.environ.get(SOLVER_ENV) or DEFAULT_SOLVER
    argv = shlex.split(text)
    if not argv:
        raise SolverSpawnError("empty solver command")
    return argv


def solve(script: str, command: str | None = None, timeout: float = 30.0):
    """Run the solver on ``script`` and classify its answer."""
    if timeout <= 0:
        raise ValueError("timeout must be positive")
    argv = solver_command(command)
    try:
        proc = subprocess.run(argv, input=script, capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        return Unknown("timeout")
    except OSError as e:
        raise SolverSpawnError(f"cannot start solver {argv[0]!r}: {e}") from e
    return classify_output(proc.stdout, proc.stderr)


def classify_output(out: str, err: str = ""):
    # get-model after unsat/unknown produces an error response; that is expected.
    lines = [ln.strip() for ln in out.splitlines() if ln.strip()]
    if not lines:
        return SolverError(f"no output from solver; stderr: {err.strip()}")
    head, rest = lines[0], "\n".join(lines[1:])
    if head == "sat":
        return Sat(rest)
    if head == "unsat":
        return Unsat()
    if head == "unknown":
        return Unknown("solver answered unknown")
    return SolverError(out.strip() + ("\n" + err.strip() if err.strip() else ""))


# -- model reading ------------------------------------------------------------


class ModelError(ValueError):
    pass


def parse_value(v):
    """Ground Int/Real/Bool value in solver syntax to a Python value."""
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    if isinstance(v, Symbol):
        if v == "true":
            return True
        if v == "false":
            return False
        try:
            return _decimal(v)
        except ValueError:
            raise ModelError(f"non-literal value {v}") from None
    if isinstance(v, list) and v:
        op = v[0]
        if op == "-" and len(v) == 2:
            return -parse_value(v[1])
        if op == "/" and len(v) == 3:
            from fractions import Fraction

            return Fraction(parse_value(v[1])) / Fraction(parse_value(v[2]))
    raise ModelError(f"cannot read value {v!r}")


def _decimal(text: str):
    from fractions import Fraction

    if "." in text:
        return Fraction(text)
    return int(text)


def parse_model(text: str) -> dict:
    """Map of constant names to raw value s-expressions.

    Function definitions with arguments are kept as ``("fun", params, body)``.
    """
    try:
        sexps = parse_sexps(text)
    except SexpError as e:
        raise ModelError(str(e)) from e
    if len(sexps) == 1 and isinstance(sexps[0], list) and sexps[0][:1] == ["model"]:
        body = sexps[0][1:]
    elif len(sexps) == 1 and isinstance(sexps[0], list):
        body = sexps[0]
    else:
        body = sexps
    out = {}
    for item in body:
        if not (isinstance(item, list) and item and item[0] == "define-fun" and len(item) == 5):
            continue
        _, name, params, _sort, value = item
        out[str(name)] = value if not params else ("fun", params, value)
    return out
