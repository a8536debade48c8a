"""Grid sweeps that certify the volume inequalities cell by cell."""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple, Union

from .bounds import (
    CONSTANTS,
    MODES,
    HalfOpenInterval,
    ParamRectangle,
    delta_ab,
    m_near,
    rect_bounds,
    v_far,
    v_n_star,
)
from .errors import ConvergenceError, DomainError
from .numerics import DEFAULT_TOLERANCES

__all__ = [
    "GridSpec",
    "CellResult",
    "VerificationReport",
    "EVIL_STAR_INTERVALS",
    "LEMMA_IDS",
    "verify_evil_star",
    "verify_no_short_geodesic",
    "verify_short_geodesic",
    "cell_bounds",
]

LEMMA_IDS = ("evil_star", "no_short_geodesic", "short_geodesic")
EVIL_STAR_INTERVALS = ((0.58, 0.63), (0.63, 0.67), (0.67, 0.68), (0.68, 0.69), (0.69, 0.7))
CHI_THRESHOLD = 0.1

Region = Union[HalfOpenInterval, ParamRectangle]
Cell = Region


def _edge(lo, hi, i, n):
    """i-th of n+1 equally spaced points on [lo, hi]; the ends are exact."""
    if i == 0:
        return lo
    if i == n:
        return hi
    return lo + i * (hi - lo) / n


@dataclass(frozen=True)
class GridSpec:
    base_regions: Tuple[Region, ...]
    subdivisions: Tuple[Any, ...]
    refinement_factor: int = 1

    def __post_init__(self):
        object.__setattr__(self, "base_regions", tuple(self.base_regions))
        object.__setattr__(self, "subdivisions", tuple(self.subdivisions))
        if len(self.base_regions) != len(self.subdivisions):
            raise DomainError("need one subdivision count per base region")
        if int(self.refinement_factor) != self.refinement_factor or self.refinement_factor < 1:
            raise DomainError(f"refinement factor must be an integer >= 1, got {self.refinement_factor!r}")
        for region, count in zip(self.base_regions, self.subdivisions):
            if isinstance(region, ParamRectangle):
                if not (isinstance(count, (tuple, list)) and len(count) == 2):
                    raise DomainError(f"rectangles need a pair of subdivision counts, got {count!r}")
                counts = count
            else:
                counts = (count,)
            if any(int(c) != c or c < 1 for c in counts):
                raise DomainError(f"subdivision counts must be positive integers, got {count!r}")

    @classmethod
    def no_short_geodesic_default(cls, refinement=1):
        c = CONSTANTS
        edges = (c.delta0, 0.598, 0.608, 0.618, 0.7, c.lambda0)
        regions = tuple(HalfOpenInterval(a, b) for a, b in zip(edges, edges[1:]))
        return cls(regions, (20,) * len(regions), refinement)

    @classmethod
    def short_geodesic_default(cls, refinement=1):
        regions = (
            ParamRectangle(0.003, 0.103, 0.0, 0.5),
            ParamRectangle(0.1, 0.5, 0.0, 0.5),
            ParamRectangle(0.5, CONSTANTS.delta0, 0.0, 0.5),
        )
        return cls(regions, ((40, 100), (50, 100), (80, 100)), refinement)

    def cells(self):
        """Cells in evaluation order: regions as declared, row-major inside each."""
        k = self.refinement_factor
        out = []
        for region, count in zip(self.base_regions, self.subdivisions):
            if isinstance(region, ParamRectangle):
                nl, ny = count[0] * k, count[1] * k
                for i in range(nl):
                    l0 = _edge(region.l_lo, region.l_hi, i, nl)
                    l1 = _edge(region.l_lo, region.l_hi, i + 1, nl)
                    for j in range(ny):
                        out.append(ParamRectangle(
                            l0, l1,
                            _edge(region.y_lo, region.y_hi, j, ny),
                            _edge(region.y_lo, region.y_hi, j + 1, ny),
                        ))
            else:
                n = count * k
                out.extend(
                    HalfOpenInterval(_edge(region.lo, region.hi, i, n), _edge(region.lo, region.hi, i + 1, n))
                    for i in range(n)
                )
        return out


@dataclass(frozen=True)
class CellResult:
    cell: Cell
    value: float
    branch_info: Dict[str, Any]


@dataclass
class VerificationReport:
    lemma_id: str
    cells: List[CellResult]
    min_value: float
    min_cell: Cell
    threshold: float
    passed: bool
    mode: str = "sound"
    extras: Dict[str, Any] = field(default_factory=dict)
    timing: float = field(default=0.0, compare=False)

    @property
    def cell_count(self):
        return len(self.cells)


def cell_bounds(cell):
    """Endpoints of a cell as a plain dict."""
    if isinstance(cell, ParamRectangle):
        return {"lo": cell.l_lo, "hi": cell.l_hi, "y_lo": cell.y_lo, "y_hi": cell.y_hi}
    return {"lo": cell.lo, "hi": cell.hi}


def _argmin(results):
    # strict < keeps the first occurrence on ties
    best = 0
    for i, r in enumerate(results):
        if r.value < results[best].value:
            best = i
    return results[best]


def _describe(cell):
    return ", ".join(f"{k}={v!r}" for k, v in cell_bounds(cell).items())


def _guarded(fn, cell, *args):
    try:
        return fn(cell, *args)
    except ConvergenceError as exc:
        raise ConvergenceError(f"cell {_describe(cell)}: {exc}") from exc
    except DomainError as exc:
        raise DomainError(f"cell {_describe(cell)}: {exc}") from exc


def _run(fn, cells, args, threads):
    if threads and threads > 1 and len(cells) > 1:
        chunk = max(1, len(cells) // (8 * threads))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            # map returns results in submission order, so the reduction is
            # independent of scheduling
            return list(pool.map(_guarded, [fn] * len(cells), cells,
                                 *[[a] * len(cells) for a in args], chunksize=chunk))
    return [_guarded(fn, cell, *args) for cell in cells]


def _report(lemma_id, results, threshold, mode, extras, t0, extra_ok=True):
    worst = _argmin(results)
    return VerificationReport(
        lemma_id=lemma_id,
        cells=results,
        min_value=worst.value,
        min_cell=worst.cell,
        threshold=threshold,
        passed=bool(worst.value > threshold and extra_ok),
        mode=mode,
        extras=extras,
        timing=time.perf_counter() - t0,
    )


def _evil_cell(cell, tol):
    d = delta_ab(cell.lo, cell.hi, tol)
    # the inequality holds when delta < 0; store the margin -delta so that the
    # report's minimum and threshold keep their usual meaning
    return CellResult(cell, -d, {"delta": d, "sense": "margin = -delta; holds when delta < 0"})


def verify_evil_star(tol=DEFAULT_TOLERANCES):
    t0 = time.perf_counter()
    cells = [HalfOpenInterval(a, b) for a, b in EVIL_STAR_INTERVALS]
    results = [_guarded(_evil_cell, c, tol) for c in cells]
    return _report("evil_star", results, 0.0, "sound", {}, t0)


def _near_cell(cell, mode, tol):
    lam = CONSTANTS.lambda0
    near = m_near(cell, mode, tol)
    right = near + v_far(cell.hi, lam, tol)
    left = near + v_far(cell.lo, lam, tol)
    branch = "t3" if cell.lo >= 0.7 else "nought"
    return CellResult(cell, right, {"m_near": near, "left_endpoint_value": left, "branch": branch})


def verify_no_short_geodesic(grid=None, mode="sound", threads=None, tol=DEFAULT_TOLERANCES):
    """Check m_near(I) + v_far(I.hi, lambda0) > threshold on every cell.

    The left-endpoint reading v_far(I.lo, lambda0) is recorded per cell and
    summarised in ``extras`` but does not gate the verdict.
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    grid = grid or GridSpec.no_short_geodesic_default()
    t0 = time.perf_counter()
    cells = grid.cells()
    bad = [c for c in cells if not isinstance(c, HalfOpenInterval) or not c.useful]
    if bad:
        raise DomainError(f"cell {_describe(bad[0])} is not a useful interval")
    results = _run(_near_cell, cells, (mode, tol), threads)
    left = min(range(len(results)), key=lambda i: (results[i].branch_info["left_endpoint_value"], i))
    extras = {
        "left_endpoint_min_value": results[left].branch_info["left_endpoint_value"],
        "left_endpoint_min_cell": cell_bounds(results[left].cell),
    }
    return _report("no_short_geodesic", results, CONSTANTS.vol_threshold, mode, extras, t0)


def _rect_cell(cell, chi_threshold, tol):
    rb = rect_bounds(cell, chi_threshold, tol)
    info = {
        "chi_S": rb.chi_S,
        "V_plus": rb.V_plus,
        "V_minus": rb.V_minus,
        "V_N_S": rb.V_N_S,
        "branch": "plus" if rb.used_plus else "minus",
    }
    return CellResult(cell, rb.W_S, info)


def verify_short_geodesic(grid=None, threads=None, chi_threshold=CHI_THRESHOLD, tol=DEFAULT_TOLERANCES):
    """Check W_S > threshold on every rectangle, plus the closure bound
    V*_N(delta0, 0.5) covering offsets beyond the grid."""
    grid = grid or GridSpec.short_geodesic_default()
    t0 = time.perf_counter()
    cells = grid.cells()
    if not all(isinstance(c, ParamRectangle) for c in cells):
        raise DomainError("short-geodesic grids must consist of rectangles")
    results = _run(_rect_cell, cells, (chi_threshold, tol), threads)
    closure = v_n_star(CONSTANTS.delta0, 0.5)
    threshold = CONSTANTS.vol_threshold
    extras = {
        "closure_value": closure,
        "closure_passed": closure > threshold,
        "plus_cells": sum(r.branch_info["branch"] == "plus" for r in results),
    }
    return _report("short_geodesic", results, threshold, "sound", extras, t0, closure > threshold)

