"""Fisher information of measurement tasks and plans, with Cramér-Rao bounds.

Two computation modes are first-class and kept deliberately independent:

* closed-form: the published per-entry expressions evaluated verbatim;
* first-principles: the per-outcome sum of (d p_k / d w_i)(d p_k / d w_j) / p_k
  with analytic derivatives of the outcome distributions.

The two agree to high precision everywhere except the single-link LZM entry,
where the closed form is exactly twice the first-principles value.  Both are
exposed so the discrepancy stays inspectable; the `validate` CLI command
reports it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .network import MeasurementTask, MonitoringPlan, Scheme, UsageLedger, channel_uses
from .schemes import scheme_distribution

SYM_ATOL = 1e-12
PSD_ATOL = 1e-10
# Eigenvalue ratio below which a matrix is reported as singular (condition
# number above 1e12).
SINGULAR_RTOL = 1e-12


class FisherMode(Enum):
    CLOSED_FORM = "closed-form"
    FIRST_PRINCIPLES = "first-principles"


@dataclass(frozen=True)
class FisherMatrix:
    """Symmetric PSD information matrix over an ordered link-parameter vector.

    Entries may be +inf where a probability vanishes and the information
    diverges; such coordinates are treated as exactly known by the bound
    computations.  ``ledger`` records the channel-use normalization when
    ``normalized`` is set.
    """

    entries: np.ndarray
    order: tuple
    mode: FisherMode
    normalized: bool = False
    ledger: UsageLedger | None = None

    def __post_init__(self) -> None:
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] != len(self.order):
            raise ValueError("entries must be square over the parameter order")
        finite = np.isfinite(e)
        if not np.array_equal(finite, finite.T):
            raise ValueError("infinite entries must be placed symmetrically")
        masked = np.where(finite, e, 0.0)
        if np.any(np.abs(masked - masked.T) > SYM_ATOL):
            raise ValueError("matrix is not symmetric within tolerance")
        if np.all(finite) and e.size and np.linalg.eigvalsh(e)[0] < -PSD_ATOL:
            raise ValueError("matrix is not positive semidefinite within tolerance")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "order", tuple(self.order))

    @property
    def has_infinite(self) -> bool:
        return bool(np.any(~np.isfinite(self.entries)))


def _leave_one_out(ws: Sequence[float]) -> list:
    return [math.prod(ws[:i]) * math.prod(ws[i + 1 :]) for i in range(len(ws))]


def _safe_ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf if num != 0.0 else 0.0
    return num / den


def _closed_entry(scheme: Scheme, ws: Sequence[float], i: int, j: int) -> float:
    """Published closed-form information entry for one task path."""
    product = math.prod(ws)
    g = _leave_one_out(ws)
    if scheme is Scheme.LZM:
        if len(ws) == 1:
            return _safe_ratio(2.0, (1.0 + product) * (1.0 - product))
        return _safe_ratio(g[i] * g[j], (1.0 + product) * (1.0 - product))
    if scheme is Scheme.JBM:
        sq_i = math.prod(w * w for k, w in enumerate(ws) if k != i)
        sq_j = math.prod(w * w for k, w in enumerate(ws) if k != j)
        num = 12.0 * ws[i] * ws[j] * sq_i * sq_j
        den = (1.0 + 3.0 * product * product) * (1.0 - product * product)
        return _safe_ratio(num, den)
    return _safe_ratio(
        3.0 * g[i] * g[j], (1.0 + 3.0 * product) * (1.0 - product)
    )


def _outcome_derivatives(scheme: Scheme, product: float) -> np.ndarray:
    """d p_k / d(path product) for the scheme's outcome order."""
    if scheme is Scheme.LZM:
        return np.array([0.25, -0.25, -0.25, 0.25])
    if scheme is Scheme.JBM:
        return np.array([1.5 * product, -0.5 * product, -0.5 * product, -0.5 * product])
    return np.array([0.75, -0.25, -0.25, -0.25])


def _first_principles_block(scheme: Scheme, ws: Sequence[float]) -> np.ndarray:
    """Information block over the path coordinates from the outcome sum."""
    product = math.prod(ws)
    probs = np.array(scheme_distribution(scheme, product).probabilities)
    dprob = _outcome_derivatives(scheme, product)
    g = _leave_one_out(ws)
    n = len(ws)
    block = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for p_k, dp_k in zip(probs, dprob):
                num = (dp_k * g[i]) * (dp_k * g[j])
                if p_k <= 0.0:
                    if num != 0.0:
                        acc = math.inf
                        break
                    continue
                acc += num / p_k
            block[i, j] = block[j, i] = acc
    return block


def _closed_block(scheme: Scheme, ws: Sequence[float]) -> np.ndarray:
    n = len(ws)
    block = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            block[i, j] = block[j, i] = _closed_entry(scheme, ws, i, j)
    return block


def task_qfim(
    task: MeasurementTask,
    params: Mapping[str, float],
    mode: FisherMode,
    order: Sequence[str] | None = None,
) -> FisherMatrix:
    """Information matrix of one task over the full parameter vector.

    Entries outside the task's path coordinates are zero.  Parameters may sit
    on the closed interval [0, 1]; where a probability vanishes the affected
    entries are +inf rather than a silent overflow.
    """
    param_order = tuple(order) if order is not None else tuple(sorted(params))
    index = {lid: k for k, lid in enumerate(param_order)}
    for lid in task.path.link_ids:
        if lid not in index:
            raise ValueError(f"path link {lid!r} missing from the parameter vector")
    ws = [params[lid] for lid in task.path.link_ids]
    for lid, w in zip(task.path.link_ids, ws):
        if not 0.0 <= w <= 1.0:
            raise ValueError(f"parameter for link {lid!r} outside [0, 1]")
    if mode is FisherMode.CLOSED_FORM:
        block = _closed_block(task.scheme, ws)
    else:
        block = _first_principles_block(task.scheme, ws)
    n = len(param_order)
    entries = np.zeros((n, n))
    coords = [index[lid] for lid in task.path.link_ids]
    entries[np.ix_(coords, coords)] = block
    return FisherMatrix(entries=entries, order=param_order, mode=mode)


def plan_qfim(
    plan: MonitoringPlan,
    params: Mapping[str, float],
    mode: FisherMode,
    normalize: bool = False,
) -> FisherMatrix:
    """Sum of per-task information, optionally per total channel use.

    Tasks are independent experiments, so their information matrices add.
    Normalization divides by the plan's total channel uses for one round.
    """
    order = tuple(sorted(params))
    n = len(order)
    total = np.zeros((n, n))
    for task in plan.tasks:
        total = total + task_qfim(task, params, mode, order).entries
    ledger = None
    if normalize:
        ledger = channel_uses(plan)
        total = total / ledger.total
    return FisherMatrix(
        entries=total, order=order, mode=mode, normalized=normalize, ledger=ledger
    )


def crb_diagonal(matrix: FisherMatrix, scale: float = 1.0) -> dict:
    """Per-parameter variance bounds: diagonal of the scaled matrix inverse.

    Coordinates with infinite information contribute a bound of 0.  If the
    finite part is singular (eigenvalue ratio below 1e-12), its coordinates
    get +inf: the parameters are not jointly identifiable.
    """
    e = matrix.entries
    n = len(matrix.order)
    bounds = {}
    finite = [k for k in range(n) if math.isfinite(e[k, k])]
    for k in range(n):
        if k not in finite:
            bounds[matrix.order[k]] = 0.0
    if not finite:
        return bounds
    sub = e[np.ix_(finite, finite)]
    if not np.all(np.isfinite(sub)):
        raise ValueError("off-diagonal infinity with finite diagonal is not supported")
    eig = np.linalg.eigvalsh(sub)
    if eig[-1] <= 0.0 or eig[0] <= 0.0 or eig[0] / eig[-1] < SINGULAR_RTOL:
        for k in finite:
            bounds[matrix.order[k]] = math.inf
        return bounds
    diag = np.diag(np.linalg.inv(sub))
    for pos, k in enumerate(finite):
        bounds[matrix.order[k]] = float(diag[pos]) / scale
    return bounds


def qcrb(matrix: FisherMatrix) -> float:
    """Trace of the matrix inverse: summed per-parameter variance bounds.

    Returns +inf for a singular matrix, signalling unidentifiable parameters.
    """
    return sum(crb_diagonal(matrix).values())


def _per_sample_uses(scheme: Scheme) -> int:
    return 2 if scheme is Scheme.JBM else 1


def single_link_fisher(
    scheme: Scheme, w: float, mode: FisherMode, normalize: bool = False
) -> float:
    """Scalar information of a direct single-link task.

    With ``normalize`` the value is divided by the channel uses one sample
    costs (2 for the fused-copies scheme, otherwise 1).
    """
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"w={w} outside [0, 1]")
    if mode is FisherMode.CLOSED_FORM:
        value = _closed_entry(scheme, [w], 0, 0)
    else:
        value = float(_first_principles_block(scheme, [w])[0, 0])
    if normalize:
        value = value / _per_sample_uses(scheme)
    return value


def single_link_qcrb(
    scheme: Scheme, w: float, mode: FisherMode, normalize: bool = False
) -> float:
    """Variance bound of a direct single-link task; +inf when information is 0."""
    info = single_link_fisher(scheme, w, mode, normalize)
    if info == 0.0:
        return math.inf
    if math.isinf(info):
        return 0.0
    return 1.0 / info


def crossover(
    scheme_a: Scheme,
    scheme_b: Scheme,
    mode: FisherMode,
    normalize: bool = False,
) -> float | None:
    """Single-link parameter where the two schemes' information curves cross.

    Bisection to 1e-10 on (0, 1); returns None when the curves do not cross
    (identical schemes included).
    """

    def gap(w: float) -> float:
        return single_link_fisher(scheme_a, w, mode, normalize) - single_link_fisher(
            scheme_b, w, mode, normalize
        )

    lo, hi = 1e-9, 1.0 - 1e-9
    glo, ghi = gap(lo), gap(hi)
    if glo == 0.0 and ghi == 0.0:
        return None
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0.0) == (ghi > 0.0):
        return None
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        gmid = gap(mid)
        if gmid == 0.0:
            return mid
        if (gmid > 0.0) == (glo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
