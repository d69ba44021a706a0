"""
Derivative-free scalar minimization: coarse grid, then golden section in the best bracket
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple
import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

@dataclass
class MinimizeResult:
    """Outcome of grid_golden_minimize"""
    argmin: float
    minimum: float
    n_evals: int
    bracket: Tuple[float, float]
    grid_profile: List[Tuple[float, float]] = field(default_factory=list)
    converged: bool = True

def coarse_grid(lower: float, upper: float, step: float) -> np.ndarray:
    """lower, lower + step, ... up to upper; upper itself is always the last point"""
    if not lower < upper:
        raise ValueError(f"empty interval [{lower}, {upper}]")
    if step <= 0:
        raise ValueError(f"grid step must be positive, got {step}")
    count = int(math.floor((upper - lower) / step + 1e-9))
    points = lower + step * np.arange(count + 1)
    if upper - points[-1] > 1e-12:
        points = np.append(points, upper)
    else:
        points[-1] = upper
    return points

def grid_golden_minimize(objective: Callable[[float], float], lower: float, upper: float,
                         step: float, tol: float = 1e-5, max_iterations: int = 200) -> MinimizeResult:
    """
    Minimize objective over [lower, upper]

    The first minimal grid point (lowest abscissa on ties) seeds the bracket
    formed by its two neighbours; golden-section search then shrinks the
    bracket to width tol. The returned point is the best evaluated one, so
    the minimum never exceeds the best grid value.

    Args:
        objective: scalar function of one variable
        lower, upper: search interval
        step: coarse grid spacing
        tol: final bracket width

    Returns:
        MinimizeResult with the argmin, the minimum, the evaluation count,
        the final bracket and the grid profile
    """
    cache: Dict[float, float] = {}

    def evaluate(x: float) -> float:
        x = float(x)
        if x not in cache:
            cache[x] = float(objective(x))
        return cache[x]

    points = coarse_grid(lower, upper, step)
    values = np.array([evaluate(x) for x in points])
    if np.all(np.isnan(values)):
        raise ValueError("objective is NaN at every grid point")
    best = int(np.nanargmin(values))
    profile = [(float(x), float(v)) for x, v in zip(points, values)]

    a = float(points[max(best - 1, 0)])
    b = float(points[min(best + 1, points.size - 1)])
    h = b - a
    c = b - INV_PHI * h
    d = a + INV_PHI * h
    fc, fd = evaluate(c), evaluate(d)
    iterations = 0
    while h > tol and iterations < max_iterations:
        if fc <= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - INV_PHI * h
            fc = evaluate(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + INV_PHI * h
            fd = evaluate(d)
        iterations += 1

    finite = {x: v for x, v in cache.items() if not math.isnan(v)}
    # lowest abscissa wins ties
    argmin = min(finite, key=lambda x: (finite[x], x))
    return MinimizeResult(
        argmin=argmin,
        minimum=finite[argmin],
        n_evals=len(cache),
        bracket=(a, b),
        grid_profile=profile,
        converged=h <= tol,
    )
