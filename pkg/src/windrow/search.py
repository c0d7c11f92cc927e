"""Generalized pattern search over a box, maximising a black-box objective.

Polls the 2d coordinate directions scaled by the current mesh, moves to an
improving point and expands the mesh, otherwise contracts; terminates when
the mesh drops below tolerance or the evaluation budget is spent.  Points
outside the box project onto it.  Constraint violations are folded into the
score as a large penalty so the search can recover from infeasible regions
while feasible incumbents are never displaced by infeasible ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError

Objective = Callable[[np.ndarray], Union[float, tuple[float, float]]]


@dataclass(frozen=True)
class PatternSearchOptions:
    initial_mesh: float = 0.1
    mesh_tol: float = 1e-5
    max_evals: int = 10_000
    poll: str = "best"  # "best": full poll; "first": accept first improvement
    expand: float = 2.0
    contract: float = 0.5
    penalty: float = 1e6

    def __post_init__(self) -> None:
        if self.poll not in ("best", "first"):
            raise DomainError("poll must be 'best' or 'first'")
        if not (0.0 < self.mesh_tol <= self.initial_mesh):
            raise DomainError("require 0 < mesh_tol <= initial_mesh")


@dataclass
class PatternSearchResult:
    x: np.ndarray
    value: float
    violation: float
    score: float
    evaluations: int = 0
    iterations: int = 0
    final_mesh: float = 0.0
    budget_exhausted: bool = False
    history: list[float] = field(default_factory=list, repr=False)


def _normalise(raw: Union[float, tuple[float, float]]) -> tuple[float, float]:
    if isinstance(raw, tuple):
        return float(raw[0]), float(raw[1])
    return float(raw), 0.0


def pattern_search(
    objective: Objective,
    x0: Sequence[float],
    lower: Sequence[float],
    upper: Sequence[float],
    options: PatternSearchOptions = PatternSearchOptions(),
) -> PatternSearchResult:
    """Maximise ``objective`` on the box ``[lower, upper]`` starting at ``x0``.

    ``objective`` returns either a plain value or ``(value, violation)``;
    the search ranks points by ``value - penalty * violation``.  Tie-breaks
    go to the lexicographically smallest poll direction, which keeps the
    trajectory deterministic.
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    if x.shape != lo.shape or x.shape != hi.shape:
        raise DomainError("x0, lower and upper must share one shape")
    if np.any(lo > hi):
        raise DomainError("lower bound exceeds upper bound")

    def score_of(value: float, violation: float) -> float:
        return value - options.penalty * violation

    evals = 0

    def evaluate(pt: np.ndarray) -> tuple[float, float, float]:
        nonlocal evals
        evals += 1
        value, violation = _normalise(objective(pt))
        return value, violation, score_of(value, violation)

    value, violation, score = evaluate(x)
    if not np.isfinite(score):
        raise DomainError("objective is not finite at the initial point")

    result = PatternSearchResult(x=x.copy(), value=value, violation=violation, score=score)
    mesh = options.initial_mesh
    d = x.size

    while mesh >= options.mesh_tol and evals < options.max_evals:
        result.iterations += 1
        best_cand: tuple[np.ndarray, float, float, float] | None = None
        for i in range(d):
            for sign in (1.0, -1.0):
                if evals >= options.max_evals:
                    break
                cand = x.copy()
                cand[i] = min(max(cand[i] + sign * mesh, lo[i]), hi[i])
                if cand[i] == x[i]:
                    continue
                c_value, c_viol, c_score = evaluate(cand)
                if c_score > score and (best_cand is None or c_score > best_cand[3]):
                    best_cand = (cand, c_value, c_viol, c_score)
                    if options.poll == "first":
                        break
            else:
                continue
            break
        if best_cand is not None:
            x, value, violation, score = best_cand
            mesh *= options.expand
        else:
            mesh *= options.contract
        result.history.append(score)

    result.x = x.copy()
    result.value = value
    result.violation = violation
    result.score = score
    result.evaluations = evals
    result.final_mesh = mesh
    result.budget_exhausted = evals >= options.max_evals
    return result
