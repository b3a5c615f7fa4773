"""Assembly and diagnostics of the rough lift above a vector Weierstrass function.

The lift of the level-N truncation over [s, t] is the pair

    ( W_N(t) - W_N(s),  A_N(s, t) )

where A_N[i][j] is the iterated integral of component i against component j
(diagonal included).  This module builds truncated and limit lifts, checks
the algebraic rough-path axioms (increment consistency and the Chen
relation), estimates the two Hoelder-type seminorm parts on dyadic grids,
and measures the geometric rate at which truncated lifts converge.

Grid sweeps exploit that the canonical lift of a smooth truncation
satisfies the Chen relation exactly: A_N(s, t) is recovered from the
prefix values A_N(0, .) and the first level, so a full pair sweep costs
O(points^2) instead of O(points^2 * modes^2).  All results are sups over
finite grids and therefore lower bounds of the true seminorms.

Pure functions on immutable inputs throughout; reductions are max/sup, so
evaluation order cannot change any result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError, ToleranceUnreachable
from .iterated import (
    geometric_tail_bound,
    _calibrate_tail_constant,
    _truncated_best_path,
    iterated_grid_prefix,
    iterated_integral_limit,
)
from .phase import TrigTable, unit_time
from .weierstrass import (
    TruncationPolicy,
    VectorWeierstrass,
    eval_limit,
    eval_truncated_grid,
    eval_vector,
)

__all__ = [
    "RoughIncrement",
    "RoughNormEstimate",
    "ConvergenceReport",
    "lift_truncated",
    "lift_limit",
    "chen_residual",
    "levy_area",
    "rough_norm",
    "area_holder_sup",
    "convergence_report",
    "polyline_signed_area",
    "MAX_GRID_DEPTH",
    "FULL_SWEEP_DEPTH",
]

MAX_GRID_DEPTH = 14
FULL_SWEEP_DEPTH = 11  # beyond this, pair sweeps subsample fine separations


@dataclass(frozen=True)
class RoughIncrement:
    """One two-level increment: first in R^d, second in R^(d x d), over [s, t]."""

    s: Fraction
    t: Fraction
    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        first = np.asarray(self.first, dtype=np.float64)
        second = np.asarray(self.second, dtype=np.float64)
        d = first.shape[0]
        if first.shape != (d,) or second.shape != (d, d):
            raise ParameterError("first must be a d-vector and second a d x d matrix")
        if not (np.all(np.isfinite(first)) and np.all(np.isfinite(second))):
            raise ParameterError("rough increment entries must be finite")
        first.setflags(write=False)
        second.setflags(write=False)
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)

    @property
    def d(self) -> int:
        return self.first.shape[0]


@dataclass(frozen=True)
class RoughNormEstimate:
    """Grid estimate of the two seminorm parts (a lower bound of the sup)."""

    holder_part: float
    area_part: float
    alpha_used: float
    grid_spec: str
    growth_flagged: Optional[bool] = None

    def to_json_dict(self) -> dict:
        out = {
            "holderPart": self.holder_part,
            "areaPart": self.area_part,
            "alphaUsed": self.alpha_used,
            "gridSpec": self.grid_spec,
        }
        if self.growth_flagged is not None:
            out["growthFlagged"] = self.growth_flagged
        return out


def _interval(s, t) -> tuple[Fraction, Fraction]:
    s = unit_time(s)
    t = unit_time(t)
    if s > t:
        raise ParameterError("requires 0 <= s <= t <= 1")
    return s, t


def lift_truncated(v: VectorWeierstrass, N: int, s, t) -> RoughIncrement:
    """Canonical lift of the level-N truncation over [s, t].

    The first level is the increment of the truncated sums; the second
    level is the full matrix of iterated integrals, diagonal included.
    """
    s, t = _interval(s, t)
    d = v.d
    first = eval_vector(v, N, t) - eval_vector(v, N, s)
    second = np.zeros((d, d))
    if s != t:
        for i in range(d):
            for j in range(d):
                second[i, j] = _truncated_best_path(
                    v.components[i], v.components[j], N, s, t, v.phase
                )
    else:
        first = np.zeros(d)
    return RoughIncrement(s=s, t=t, first=first, second=second)


def lift_limit(v: VectorWeierstrass, policy: TruncationPolicy, s, t) -> RoughIncrement:
    """Limit lift over [s, t]: tail-exact first level, tolerance-bounded second.

    Requires every component exponent above 1/3 (the validity range of the
    level-2 lift); the error message names the offending component.
    """
    s, t = _interval(s, t)
    v.require_lift_range()
    if policy.mode == "fixed":
        return lift_truncated(v, policy.N, s, t)
    policy.check_eps_prime(min(v.alphas))
    d = v.d
    if s == t:
        return RoughIncrement(s=s, t=t, first=np.zeros(d), second=np.zeros((d, d)))
    first = np.array([eval_limit(c, t) - eval_limit(c, s) for c in v.components])
    second = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            res = iterated_integral_limit(
                v.components[i], v.components[j], s, t,
                tol=policy.tol, eps_prime=policy.eps_prime,
            )
            second[i, j] = res.value
    return RoughIncrement(s=s, t=t, first=first, second=second)


def chen_residual(v: VectorWeierstrass, N: int, s, u, t) -> np.ndarray:
    """Defect of the Chen relation at (s, u, t) for the level-N lift.

    Returns second(s,t) - second(s,u) - second(u,t) - first(s,u) x first(u,t);
    algebraically zero for canonical lifts, so only roundoff should remain.
    """
    s = unit_time(s)
    u = unit_time(u)
    t = unit_time(t)
    if not (s <= u <= t):
        raise ParameterError("requires s <= u <= t")
    whole = lift_truncated(v, N, s, t)
    left = lift_truncated(v, N, s, u)
    right = lift_truncated(v, N, u, t)
    return whole.second - left.second - right.second - np.outer(left.first, right.first)


def levy_area(inc: RoughIncrement, i: int, j: int) -> float:
    """Antisymmetric part second[i][j] - second[j][i] of one entry pair."""
    d = inc.d
    if not (0 <= i < d and 0 <= j < d):
        raise ParameterError(f"indices ({i}, {j}) outside dimension {d}")
    return float(inc.second[i, j] - inc.second[j, i])


def polyline_signed_area(x: np.ndarray, y: np.ndarray) -> float:
    """Signed area of the closed polygon through (x_k, y_k) (shoelace rule).

    For a planar curve sampled finely enough, this is the Green-Stokes area
    swept between the curve and its closing chord.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 3:
        raise ParameterError("need two equal-length coordinate arrays of size >= 3")
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


# ---------------------------------------------------------------------------
# dyadic grid sweeps


def _validate_depth(depth: int) -> int:
    if not isinstance(depth, (int, np.integer)) or isinstance(depth, bool):
        raise ParameterError("depth must be an integer")
    if depth < 1 or depth > MAX_GRID_DEPTH:
        raise ParameterError(f"depth must lie in [1, {MAX_GRID_DEPTH}] (cost guard), got {depth}")
    return int(depth)


def _level_tables(v: VectorWeierstrass, levels: Sequence[int], depth: int):
    """First-level values and second-level prefixes on the dyadic grid."""
    den = 1 << depth
    table = TrigTable(den)
    idx = np.arange(den + 1, dtype=np.int64)
    W = {
        (ci, N): eval_truncated_grid(v.components[ci], N, table, idx)
        for ci in range(v.d)
        for N in levels
    }
    Q = {
        (i, j): iterated_grid_prefix(v.components[i], v.components[j], table, idx, levels)
        for i in range(v.d)
        for j in range(v.d)
    }
    return idx, W, Q


def _grid_spec(depth: int, what: str) -> str:
    den = 1 << depth
    if depth <= FULL_SWEEP_DEPTH:
        pairs = den * (den + 1) // 2
        return f"dyadic(depth={depth}, pairs={pairs}, {what})"
    stride = 1 << (depth - FULL_SWEEP_DEPTH)
    return (
        f"dyadic(depth={depth}, subsampled: full pairs at stride {stride} "
        f"plus separations <= {8 * stride}/2^{depth}, {what})"
    )


_ROW_CHUNK = 256


def _pair_blocks(den: int, depth: int):
    """Yield (rows, cols, separations, mask) blocks covering the pair sweep.

    Up to FULL_SWEEP_DEPTH every pair (s, t), s < t, of grid indices is
    covered.  Beyond that the sweep subsamples: one pass over all pairs of a
    stride-2^(depth-11) subgrid (the coarse structure) and one pass over all
    fine pairs with separation <= 8 strides.  Estimates remain lower bounds
    of the true sup.
    """
    if depth <= FULL_SWEEP_DEPTH:
        cols = np.arange(den + 1, dtype=np.int64)
        for lo in range(0, den, _ROW_CHUNK):
            rows = np.arange(lo, min(lo + _ROW_CHUNK, den), dtype=np.int64)
            sep = cols[None, :] - rows[:, None]
            yield rows, cols, sep, (sep > 0)
        return
    stride = 1 << (depth - FULL_SWEEP_DEPTH)
    sub = np.arange(0, den + 1, stride, dtype=np.int64)
    for lo in range(0, sub.size - 1, _ROW_CHUNK):
        rows = sub[lo : min(lo + _ROW_CHUNK, sub.size - 1)]
        sep = sub[None, :] - rows[:, None]
        yield rows, sub, sep, (sep > 0)
    max_sep = 8 * stride
    for lo in range(0, den, _ROW_CHUNK):
        hi = min(lo + _ROW_CHUNK, den)
        rows = np.arange(lo, hi, dtype=np.int64)
        cols = np.arange(lo + 1, min(hi - 1 + max_sep, den) + 1, dtype=np.int64)
        sep = cols[None, :] - rows[:, None]
        yield rows, cols, sep, (sep > 0) & (sep <= max_sep)


def _second_level_rows(q, wi, wj, rows, cols):
    """A(s, t) for selected s rows and t cols, via the Chen prefix identity."""
    return (
        q[cols][None, :]
        - q[rows, None]
        - (wi[rows, None] - wi[0]) * (wj[cols][None, :] - wj[rows, None])
    )


def _norm_parts(v: VectorWeierstrass, N: int, alpha: float, depth: int) -> tuple[float, float]:
    den = 1 << depth
    idx, W, Q = _level_tables(v, [N], depth)

    holder = 0.0
    area = 0.0
    for rows, cols, sep, mask in _pair_blocks(den, depth):
        dt = np.where(mask, sep, 1) / den
        w1 = np.where(mask, dt**-alpha, 0.0)
        w2 = np.where(mask, dt ** (-2 * alpha), 0.0)
        for ci in range(v.d):
            wv = W[(ci, N)]
            m = float(np.max(np.abs(wv[cols][None, :] - wv[rows, None]) * w1))
            holder = max(holder, m)
        for i in range(v.d):
            wi = W[(i, N)]
            for j in range(v.d):
                a = _second_level_rows(Q[(i, j)][N], wi, W[(j, N)], rows, cols)
                area = max(area, float(np.max(np.abs(a) * w2)))
    return holder, area


def _fine_scale_area_sup(v: VectorWeierstrass, N: int, alpha: float, depth: int) -> float:
    """Adjacent-pair area ratio sup: grows with depth iff alpha is too large."""
    den = 1 << depth
    idx, W, Q = _level_tables(v, [N], depth)
    dt = 1.0 / den
    sup = 0.0
    k = np.arange(den, dtype=np.int64)
    for i in range(v.d):
        wi = W[(i, N)]
        for j in range(v.d):
            q = Q[(i, j)][N]
            wj = W[(j, N)]
            a = q[k + 1] - q[k] - (wi[k] - wi[0]) * (wj[k + 1] - wj[k])
            sup = max(sup, float(np.max(np.abs(a))) / dt ** (2 * alpha))
    return sup


def _resolve_level(v: VectorWeierstrass, truncation) -> int:
    """Truncation level for a sweep: fixed N, or deep enough for the tolerance."""
    if isinstance(truncation, (int, np.integer)) and not isinstance(truncation, bool):
        if truncation < 0:
            raise ParameterError("truncation level must be nonnegative")
        return int(truncation)
    if not isinstance(truncation, TruncationPolicy):
        raise ParameterError("truncation must be an int level or a TruncationPolicy")
    if truncation.mode == "fixed":
        return truncation.N
    min_alpha = min(v.alphas)
    truncation.check_eps_prime(min_alpha)
    tol = truncation.tol
    eps_prime = truncation.eps_prime
    best = 0
    s0, t0 = Fraction(0), Fraction(1)
    for i in range(v.d):
        for j in range(v.d):
            c1, c2 = v.components[i], v.components[j]
            constant = _calibrate_tail_constant(c1, c2, s0, t0, eps_prime, v.phase)
            level = None
            for N in range(129):
                if geometric_tail_bound(c1, c2, N, eps_prime, constant) <= tol:
                    level = N
                    break
            if level is None:
                reachable = geometric_tail_bound(c1, c2, 128, eps_prime, constant)
                raise ToleranceUnreachable(
                    f"tolerance unreachable for entry ({i}, {j}): reachable {reachable:g}",
                    reachable_bound=reachable, cap=128,
                )
            best = max(best, level)
    for c in v.components:
        n = 0
        while 2 * c.a ** (n + 1) / (1 - c.a) > tol and n < 4096:
            n += 1
        best = max(best, n)
    return best


def rough_norm(v: VectorWeierstrass, truncation, alpha: float, depth: int,
               *, enforce_alpha_range: bool = True,
               flag_growth: bool = False) -> RoughNormEstimate:
    """Grid estimate of the alpha/2-alpha seminorm parts of the lift.

    ``truncation`` is a fixed level N or a TruncationPolicy; alpha must lie
    in (1/3, min_i alpha_i] unless ``enforce_alpha_range`` is lifted for
    negative controls.  With ``flag_growth`` the area part is re-measured on
    two coarser grids and flagged when it keeps growing with depth (the
    signature of an exponent outside the valid range).
    """
    depth = _validate_depth(depth)
    alpha = float(alpha)
    min_alpha = min(v.alphas)
    if enforce_alpha_range and not (1 / 3 < alpha <= min_alpha):
        raise ParameterError(
            f"alpha = {alpha} outside (1/3, min alpha] = (1/3, {min_alpha:.6f}]"
        )
    if not (alpha > 0):
        raise ParameterError("alpha must be positive")
    N = _resolve_level(v, truncation)
    holder, area = _norm_parts(v, N, alpha, depth)
    flagged = None
    if flag_growth:
        if depth < 6:
            raise ParameterError("flag_growth needs depth >= 6")
        coarse = _fine_scale_area_sup(v, N, alpha, depth - 4)
        fine = _fine_scale_area_sup(v, N, alpha, depth)
        flagged = bool(fine > 1.05 * coarse)
    return RoughNormEstimate(
        holder_part=holder,
        area_part=area,
        alpha_used=alpha,
        grid_spec=_grid_spec(depth, f"level N={N}"),
        growth_flagged=flagged,
    )


def area_holder_sup(v: VectorWeierstrass, levels: Sequence[int], eps: float, depth: int,
                    *, exponent: Optional[float] = None) -> dict[int, float]:
    """Sup over dyadic pairs of |second(s,t)| / |t-s|^exponent, per level.

    With ``exponent=None`` each entry (i, j) uses alpha_i + alpha_j - 2 eps;
    otherwise the supplied uniform exponent applies to every entry.  The
    point of the diagnostic is stability of the result across levels: one
    constant serves all truncations.
    """
    depth = _validate_depth(depth)
    if not (eps > 0):
        raise ParameterError("eps must be positive")
    levels = sorted(set(int(N) for N in levels))
    den = 1 << depth
    idx, W, Q = _level_tables(v, levels, depth)
    out = {N: 0.0 for N in levels}
    for rows, cols, sep, mask in _pair_blocks(den, depth):
        dt = np.where(mask, sep, 1) / den
        for i in range(v.d):
            for j in range(v.d):
                expo = (
                    exponent
                    if exponent is not None
                    else v.components[i].alpha + v.components[j].alpha - 2 * eps
                )
                w = np.where(mask, dt**-expo, 0.0)
                for N in levels:
                    a = _second_level_rows(Q[(i, j)][N], W[(i, N)], W[(j, N)], rows, cols)
                    m = float(np.max(np.abs(a) * w))
                    if m > out[N]:
                        out[N] = m
    return out


# ---------------------------------------------------------------------------
# convergence measurement


@dataclass(frozen=True)
class ConvergenceReport:
    """Measured sup distances to a deep reference truncation, with rate fits.

    sup_second tracks the off-diagonal entries for d >= 2 (the diagonal is
    determined by the first level, whose rate sup_first already reports);
    the full per-entry matrix is kept in sup_second_entries.
    """

    Ns: tuple
    sup_first: tuple
    sup_second: tuple
    fitted_ratio: Optional[float]
    theoretical_rho: float
    kappa: float
    beta: float
    eps: float
    eps_prime: float
    alpha: float
    reference_level: int
    monotone: bool
    rate_ok: Optional[bool]
    fitted_ratio_first: Optional[float]
    fitted_ratio_second: Optional[float]
    sup_second_entries: np.ndarray
    fitted_ratio_entries: Optional[np.ndarray]
    grid_spec: str

    def to_json_dict(self) -> dict:
        return {
            "Ns": list(self.Ns),
            "supFirst": list(self.sup_first),
            "supSecond": list(self.sup_second),
            "fittedRatio": self.fitted_ratio,
            "theoreticalRho": self.theoretical_rho,
            "kappa": self.kappa,
            "beta": self.beta,
            "eps": self.eps,
            "epsPrime": self.eps_prime,
            "alpha": self.alpha,
            "referenceLevel": self.reference_level,
            "monotone": self.monotone,
            "rateOk": self.rate_ok,
            "fittedRatioFirst": self.fitted_ratio_first,
            "fittedRatioSecond": self.fitted_ratio_second,
            "supSecondEntries": self.sup_second_entries.tolist(),
            "fittedRatioEntries": (
                None if self.fitted_ratio_entries is None else self.fitted_ratio_entries.tolist()
            ),
            "gridSpec": self.grid_spec,
        }

    def csv_rows(self) -> list[tuple]:
        return [
            (N, self.sup_first[k], self.sup_second[k])
            for k, N in enumerate(self.Ns)
        ]


def _fit_ratio(Ns, values) -> Optional[float]:
    vals = np.asarray(values, dtype=np.float64)
    if np.any(vals <= 0):
        return None
    slope = np.polyfit(np.asarray(Ns, dtype=np.float64), np.log(vals), 1)[0]
    return float(math.exp(slope))


def convergence_report(v: VectorWeierstrass, Ns: Sequence[int], *,
                       alpha: Optional[float] = None, eps: float = 0.02,
                       beta: Optional[float] = None, eps_prime: float = 0.1,
                       depth: int = 8, margin: float = 1.25,
                       reference_offset: int = 10,
                       strict: bool = False) -> ConvergenceReport:
    """Measure sup-grid distances between lifts at each N and a deep reference.

    The reference is the truncation at max(Ns) + reference_offset (the true
    limit is unobservable; the geometric tail justifies the proxy).  Fits a
    log-linear rate per level and compares the worst fitted ratio against
    (max_i b_i^(-alpha_i + eps'))^kappa with kappa = 1 - (alpha - eps)/beta.
    Distances that fail to decrease monotonically flag the report and skip
    the fit.  With ``strict`` a rate-bound violation raises ParameterError.
    """
    depth = _validate_depth(depth)
    Ns = sorted(set(int(N) for N in Ns))
    if len(Ns) < 2:
        raise ParameterError("insufficient truncation levels to fit a rate (need >= 2)")
    if Ns[0] < 0:
        raise ParameterError("truncation levels must be nonnegative")
    min_alpha = min(v.alphas)
    if alpha is None:
        alpha = min_alpha
    if not (0 < alpha <= min_alpha):
        raise ParameterError(f"alpha must lie in (0, {min_alpha:.6f}]")
    if not (0 < eps < alpha):
        raise ParameterError(f"eps must lie in (0, alpha) = (0, {alpha:.6f})")
    if beta is None:
        beta = alpha - eps / 2
    if not (alpha - eps < beta < alpha):
        raise ParameterError(
            f"beta must lie in (alpha - eps, alpha) = ({alpha - eps:.6f}, {alpha:.6f})"
        )
    if not (0 < eps_prime < alpha):
        raise ParameterError(f"eps_prime must lie in (0, alpha) = (0, {alpha:.6f})")

    ref = Ns[-1] + reference_offset
    levels = Ns + [ref]
    den = 1 << depth
    idx, W, Q = _level_tables(v, levels, depth)

    sup_first = []
    for N in Ns:
        worst = 0.0
        for ci in range(v.d):
            diff = W[(ci, ref)] - W[(ci, N)]
            worst = max(worst, float(diff.max() - diff.min()))
        sup_first.append(worst)

    d = v.d
    entries = np.zeros((len(Ns), d, d))
    for rows, cols, sep, mask in _pair_blocks(den, depth):
        inv = np.where(mask, 1.0, 0.0)
        for i in range(d):
            for j in range(d):
                a_ref = _second_level_rows(Q[(i, j)][ref], W[(i, ref)], W[(j, ref)], rows, cols)
                for k, N in enumerate(Ns):
                    a_n = _second_level_rows(Q[(i, j)][N], W[(i, N)], W[(j, N)], rows, cols)
                    m = float(np.max(np.abs(a_ref - a_n) * inv))
                    if m > entries[k, i, j]:
                        entries[k, i, j] = m

    if d >= 2:
        mask = ~np.eye(d, dtype=bool)
        sup_second = [float(entries[k][mask].max()) for k in range(len(Ns))]
    else:
        sup_second = [float(entries[k, 0, 0]) for k in range(len(Ns))]

    monotone = all(x > y for x, y in zip(sup_first, sup_first[1:])) and all(
        x > y for x, y in zip(sup_second, sup_second[1:])
    )
    kappa = 1 - (alpha - eps) / beta
    rho = max(c.b ** (-c.alpha + eps_prime) for c in v.components) ** kappa

    if monotone:
        fit_first = _fit_ratio(Ns, sup_first)
        fit_second = _fit_ratio(Ns, sup_second)
        fit_entries = np.zeros((d, d))
        for i in range(d):
            for j in range(d):
                r = _fit_ratio(Ns, entries[:, i, j])
                fit_entries[i, j] = math.nan if r is None else r
        fitted = None
        if fit_first is not None and fit_second is not None:
            fitted = max(fit_first, fit_second)
        rate_ok = None if fitted is None else bool(fitted <= rho * margin)
    else:
        fit_first = fit_second = fitted = None
        fit_entries = None
        rate_ok = None

    report = ConvergenceReport(
        Ns=tuple(Ns),
        sup_first=tuple(sup_first),
        sup_second=tuple(sup_second),
        fitted_ratio=fitted,
        theoretical_rho=float(rho),
        kappa=float(kappa),
        beta=float(beta),
        eps=float(eps),
        eps_prime=float(eps_prime),
        alpha=float(alpha),
        reference_level=ref,
        monotone=monotone,
        rate_ok=rate_ok,
        fitted_ratio_first=fit_first,
        fitted_ratio_second=fit_second,
        sup_second_entries=entries,
        fitted_ratio_entries=fit_entries,
        grid_spec=_grid_spec(depth, f"reference N={ref}"),
    )
    if strict and rate_ok is False:
        raise ParameterError(
            f"fitted ratio {fitted:.4f} exceeds theoretical rho*margin = {rho * margin:.4f}"
        )
    return report
