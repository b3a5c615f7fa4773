"""Differential equations driven by truncated Weierstrass sums and their lifts.

Two solvers for dY = M(Y) dW on [0, t_end]:

* solve_ode_truncated: the driver is the smooth level-N truncation, so the
  equation is a classical ODE Y' = M(Y) W_N'(t); a fixed-step fourth-order
  Runge-Kutta scheme integrates it, with stage times on an exact rational
  half-grid so driver phases never degrade.  The default step resolves the
  fastest driver mode b^N pi (explicit schemes must resolve the driver).

* solve_rough: one explicit second-order rough step per interval,

      Y += sigma_j(Y) X^j + (D sigma_j sigma_i)(Y) A^(i,j),

  consuming both levels of the lift increment over each step.  Increments
  come from a uniform-grid lift table composed via the Chen identity and
  validated against direct evaluation in the tests.

Linear-in-state fields admit a vectorized RK4 propagator (each step is a
d x d matrix acting on Y, built from batched stage matrices and reduced in
fixed pairwise order); the plain stepping loop remains the reference path
and the two agree to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError
from .iterated import iterated_pairs
from .phase import AffineNodes, TrigTable, to_fraction, unit_time
from .roughpath import _resolve_level
from .weierstrass import (
    TruncationPolicy,
    VectorWeierstrass,
    eval_derivative,
    eval_derivative_affine,
    eval_truncated_grid,
)

__all__ = [
    "LinearStateField",
    "BilinearField",
    "ScalarLinearField",
    "ZeroField",
    "RdeProblem",
    "PathSample",
    "solve_ode_truncated",
    "solve_rough",
    "approximation_gap",
    "default_ode_step",
]


class LinearStateField:
    """Field M(Y) linear in Y: M(Y)[p, j] = sum_q tensor[p, j, q] Y_q.

    Column j of M(Y) is the vector field multiplying dW^j; its Jacobian in
    Y is the constant matrix tensor[:, j, :].
    """

    is_linear = True

    def __init__(self, tensor: np.ndarray):
        tensor = np.asarray(tensor, dtype=np.float64)
        if tensor.ndim != 3 or tensor.shape[0] != tensor.shape[1] or tensor.shape[0] != tensor.shape[2]:
            raise ParameterError("field tensor must have shape (d, d, d)")
        tensor.setflags(write=False)
        self.tensor = tensor

    @property
    def d(self) -> int:
        return self.tensor.shape[0]

    def matrix(self, y: np.ndarray) -> np.ndarray:
        return self.tensor @ np.asarray(y, dtype=np.float64)

    def jacobian(self, y: np.ndarray) -> np.ndarray:
        # jac[j] = D sigma_j, constant for linear fields
        return np.transpose(self.tensor, (1, 0, 2))

    def state_matrix(self, wprime: np.ndarray) -> np.ndarray:
        """G with Y' = G Y for driver derivative values wprime (d,) or (n, d)."""
        return np.tensordot(np.asarray(wprime, dtype=np.float64), self.tensor, axes=([-1], [1]))


class BilinearField(LinearStateField):
    """The 2 x 2 field M(Y) = [[0, Y_2/3], [Y_1/2, 0]]."""

    def __init__(self):
        tensor = np.zeros((2, 2, 2))
        tensor[0, 1, 1] = 1.0 / 3.0
        tensor[1, 0, 0] = 1.0 / 2.0
        super().__init__(tensor)


class ScalarLinearField(LinearStateField):
    """d = 1 field M(Y) = [[Y]]; the chain-rule solution is y0 exp(dW)."""

    def __init__(self):
        super().__init__(np.ones((1, 1, 1)))


class ZeroField(LinearStateField):
    """M identically zero; solutions are constant (testing aid)."""

    def __init__(self, d: int):
        super().__init__(np.zeros((d, d, d)))


@dataclass(frozen=True)
class RdeProblem:
    """Equation dY = M(Y) dW: field, driving vector function, start state."""

    field: object
    driver: VectorWeierstrass
    y0: np.ndarray
    t_end: Fraction = Fraction(1)
    step: Optional[Fraction] = None

    def __post_init__(self):
        y0 = np.asarray(self.y0, dtype=np.float64)
        if y0.ndim != 1 or not np.all(np.isfinite(y0)):
            raise ParameterError("y0 must be a finite vector")
        d = self.driver.d
        if getattr(self.field, "d", d) != d or y0.shape[0] != d:
            raise ParameterError(
                f"dimensions disagree: driver d={d}, field d={getattr(self.field, 'd', '?')}, "
                f"y0 length {y0.shape[0]}"
            )
        t_end = unit_time(self.t_end)
        if t_end <= 0:
            raise ParameterError("t_end must lie in (0, 1]")
        step = self.step
        if step is not None:
            step = to_fraction(step)
            if not (0 < step <= t_end):
                raise ParameterError("step must satisfy 0 < step <= t_end")
        y0.setflags(write=False)
        object.__setattr__(self, "y0", y0)
        object.__setattr__(self, "t_end", t_end)
        object.__setattr__(self, "step", step)


@dataclass(frozen=True)
class PathSample:
    """Solution values on an increasing time grid from 0 to t_end."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if times.ndim != 1 or values.ndim != 2 or values.shape[0] != times.size:
            raise ParameterError("times (n,) and values (n, d) must align")
        if times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise ParameterError("times must increase from 0")
        if not np.all(np.isfinite(values)):
            raise ParameterError("path values must be finite")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def csv_rows(self) -> list[tuple]:
        return [(self.times[k], *self.values[k]) for k in range(self.times.size)]

    def endpoint(self) -> np.ndarray:
        return self.values[-1]


def default_ode_step(driver: VectorWeierstrass, N: int) -> Fraction:
    """Power-of-two step resolving the fastest truncated mode b_max^N pi."""
    b_max = max(c.b for c in driver.components)
    target = min(1e-3, 0.1 * float(b_max) ** (-N))
    k = max(10, math.ceil(-math.log2(target)))
    return Fraction(1, 1 << k)


def _step_guard(driver: VectorWeierstrass, N: int, step: Fraction) -> None:
    b_max = max(c.b for c in driver.components)
    if float(step) * float(b_max) ** N > 0.5:
        raise ParameterError(
            f"step {float(step):g} too large for the level-{N} driver "
            f"(fastest mode {b_max}^{N} pi): decrease step to at most "
            f"{0.5 * float(b_max) ** (-N):g}"
        )


def _grid_layout(t_end: Fraction, step: Fraction, output_points: int) -> tuple[int, int]:
    """Total step count K (multiple of the output interval count) and stride."""
    k0 = math.ceil(t_end / step)
    m = min(output_points - 1, k0)
    k = math.ceil(k0 / m) * m
    return k, k // m


def _rk4_step(f, t: Fraction, y: np.ndarray, h: Fraction) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + h / 2, y + (float(h) / 2.0) * k1)
    k3 = f(t + h / 2, y + (float(h) / 2.0) * k2)
    k4 = f(t + h, y + float(h) * k3)
    return y + (float(h) / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _local_error_check(problem: RdeProblem, N: int, h: Fraction, tol: float) -> None:
    """Richardson spot check of the local error on the first few steps."""
    f = lambda t, y: problem.field.matrix(y) @ np.array(
        [eval_derivative(c, N, t) for c in problem.driver.components]
    )
    y = problem.y0.copy()
    t = Fraction(0)
    for _ in range(min(4, math.ceil(problem.t_end / h))):
        full = _rk4_step(f, t, y, h)
        half = _rk4_step(f, t + h / 2, _rk4_step(f, t, y, h / 2), h / 2)
        err = float(np.max(np.abs(full - half)))
        if err > tol * max(1.0, float(np.max(np.abs(y)))):
            raise ParameterError(
                f"local error estimate {err:g} exceeds tolerance {tol:g} at the "
                f"level-{N} stiffness: decrease step below {float(h) / 2:g}"
            )
        y = half
        t = t + h


def _stage_matrices(problem: RdeProblem, N: int, seg_start: Fraction, h: Fraction,
                    steps: int) -> np.ndarray:
    """RK4 propagator matrices for `steps` consecutive steps from seg_start."""
    nodes = AffineNodes(seg_start, h / 2, 2 * steps + 1)
    wp = np.stack(
        [eval_derivative_affine(c, N, nodes) for c in problem.driver.components], axis=1
    )
    g = problem.field.state_matrix(wp)  # (2*steps+1, d, d)
    g1 = g[0:-1:2]
    g2 = g[1::2]
    g3 = g[2::2]
    hf = float(h)
    d = problem.driver.d
    eye = np.eye(d)
    k1 = g1
    k2 = g2 + (hf / 2.0) * (g2 @ k1)
    k3 = g2 + (hf / 2.0) * (g2 @ k2)
    k4 = g3 + hf * (g3 @ k3)
    return eye + (hf / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _ordered_product(mats: np.ndarray) -> np.ndarray:
    """Product mats[-1] @ ... @ mats[0] by pairwise reduction (fixed topology)."""
    while mats.shape[0] > 1:
        n = mats.shape[0]
        half = n // 2
        paired = mats[1 : 2 * half : 2] @ mats[0 : 2 * half : 2]
        if n % 2:
            mats = np.concatenate([paired, mats[-1:]], axis=0)
        else:
            mats = paired
    return mats[0]


_PROPAGATOR_MIN_STEPS = 4096


def solve_ode_truncated(problem: RdeProblem, N: int, *, output_points: int = 1025,
                        local_error_tol: float = 1e-6) -> PathSample:
    """Fixed-step RK4 solution of Y' = M(Y) W_N'(t) with dense uniform output.

    The step (problem.step or the resolving default) is validated against
    the fastest driver mode and spot-checked by step halving; violations
    raise with a prescribed smaller step.
    """
    if output_points < 2:
        raise ParameterError("output_points must be >= 2")
    step = problem.step if problem.step is not None else default_ode_step(problem.driver, N)
    _step_guard(problem.driver, N, step)
    _local_error_check(problem, N, step, local_error_tol)
    K, stride = _grid_layout(problem.t_end, step, output_points)
    h = problem.t_end / K
    d = problem.driver.d

    use_propagator = getattr(problem.field, "is_linear", False) and K >= _PROPAGATOR_MIN_STEPS
    out_times = [Fraction(0)]
    out_values = [problem.y0.copy()]
    y = problem.y0.copy()
    if use_propagator:
        for seg in range(K // stride):
            seg_start = h * (seg * stride)
            mats = _stage_matrices(problem, N, seg_start, h, stride)
            y = _ordered_product(mats) @ y
            out_times.append(h * ((seg + 1) * stride))
            out_values.append(y)
    else:
        nodes = AffineNodes(Fraction(0), h / 2, 2 * K + 1)
        wp = np.stack(
            [eval_derivative_affine(c, N, nodes) for c in problem.driver.components], axis=1
        )
        hf = float(h)
        for k in range(K):
            g1, g2, g3 = wp[2 * k], wp[2 * k + 1], wp[2 * k + 2]
            k1 = problem.field.matrix(y) @ g1
            k2 = problem.field.matrix(y + (hf / 2) * k1) @ g2
            k3 = problem.field.matrix(y + (hf / 2) * k2) @ g2
            k4 = problem.field.matrix(y + hf * k3) @ g3
            y = y + (hf / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if (k + 1) % stride == 0:
                out_times.append(h * (k + 1))
                out_values.append(y)
    return PathSample(
        times=np.array([float(t) for t in out_times]),
        values=np.vstack(out_values),
    )


def _lift_table(driver: VectorWeierstrass, N: int, h: Fraction, K: int):
    """Per-step first and second level increments of the level-N lift.

    For table-sized denominators the whole uniform grid is evaluated at
    once with exact phases; otherwise entries fall back to scalar calls.
    """
    d = driver.d
    den = (h / 1).denominator
    num = h.numerator
    if den <= (1 << 20) and num * K <= den:
        table = TrigTable(den)
        idx = num * np.arange(K + 1, dtype=np.int64)
        w = np.stack([eval_truncated_grid(c, N, table, idx) for c in driver.components], axis=1)
        first = np.diff(w, axis=0)  # (K, d)
        second = np.zeros((K, d, d))
        for i in range(d):
            for j in range(d):
                second[:, i, j] = iterated_pairs(
                    driver.components[i], driver.components[j], N, table, idx[:-1], idx[1:]
                )
        return first, second
    first = np.zeros((K, d))
    second = np.zeros((K, d, d))
    from .roughpath import lift_truncated  # local import to avoid a cycle

    for k in range(K):
        inc = lift_truncated(driver, N, h * k, h * (k + 1))
        first[k] = inc.first
        second[k] = inc.second
    return first, second


def solve_rough(problem: RdeProblem, truncation, step=None, *,
                output_points: int = 1025) -> PathSample:
    """Second-order rough stepping driven by lift increments per step.

    ``truncation`` is a level N or a TruncationPolicy; tolerance policies
    resolve to a truncation deep enough that the lift tail is below the
    requested tolerance (components must then have alpha > 1/3).
    """
    if output_points < 2:
        raise ParameterError("output_points must be >= 2")
    if isinstance(truncation, TruncationPolicy) and truncation.mode == "tolerance":
        problem.driver.require_lift_range()
    N = _resolve_level(problem.driver, truncation)
    step = to_fraction(step) if step is not None else (problem.step or Fraction(1, 1 << 10))
    if not (0 < step <= problem.t_end):
        raise ParameterError("step must satisfy 0 < step <= t_end")
    K, stride = _grid_layout(problem.t_end, step, output_points)
    h = problem.t_end / K
    first, second = _lift_table(problem.driver, N, h, K)

    d = problem.driver.d
    y = problem.y0.copy()
    out_times = [Fraction(0)]
    out_values = [y.copy()]
    for k in range(K):
        m = problem.field.matrix(y)  # columns sigma_j(y)
        jac = problem.field.jacobian(y)  # jac[j] = D sigma_j
        dy = m @ first[k]
        a = second[k]
        for i in range(d):
            sig_i = m[:, i]
            for j in range(d):
                dy = dy + a[i, j] * (jac[j] @ sig_i)
        y = y + dy
        if (k + 1) % stride == 0:
            out_times.append(h * (k + 1))
            out_values.append(y.copy())
    return PathSample(
        times=np.array([float(t) for t in out_times]),
        values=np.vstack(out_values),
    )


def approximation_gap(problem: RdeProblem, Ns: Sequence[int], *,
                      output_points: int = 1025) -> list[tuple[int, int, float]]:
    """Sup distance between ODE solutions at consecutive truncation levels.

    Solutions share the output grid, so the sup is over common times.
    Returns rows (N_lo, N_hi, sup_gap); expected to decrease as the levels
    deepen.
    """
    Ns = sorted(set(int(N) for N in Ns))
    if len(Ns) < 2:
        return []
    paths = {N: solve_ode_truncated(problem, N, output_points=output_points) for N in Ns}
    rows = []
    for lo, hi in zip(Ns, Ns[1:]):
        gap = float(np.max(np.abs(paths[lo].values - paths[hi].values)))
        rows.append((lo, hi, gap))
    return rows
