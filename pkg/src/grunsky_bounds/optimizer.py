"""Certified branch-and-bound maximisation over boxes.

Each box gets an upper bound from the natural interval extension, tightened
by the mean-value form ``f(c) + sum_i f_i'(X) (X_i - c_i)`` whenever the
interval gradient exists, and clipped to the parent's bound.  Lower bounds
come from interval evaluation at box midpoints, so ``max_lo`` is a certified
value attained at a recorded feasible point.

Boxes are processed best-first in fixed-size batches.  The batch size is a
configuration value, not the worker count, so the sequence of boxes examined
(and hence the resulting :class:`Enclosure`) is identical whether the batch is
evaluated serially or by a process pool.
"""

from __future__ import annotations

import heapq
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .catalog import BoundProblem
from .expr import eval_derivative, eval_interval, eval_interval_derivative, eval_point
from .interval import DomainError, Interval, box_width

log = logging.getLogger(__name__)

__all__ = [
    "Status",
    "OptimizerConfig",
    "Enclosure",
    "VerificationReport",
    "maximize",
    "verify_bound",
    "stationary_residual_f6",
    "refine_argmax",
]


class Status(str, Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class OptimizerConfig:
    tolerance: float = 1e-9
    max_boxes: int = 10_000_000
    use_derivative_pruning: bool = True
    constraint_feasibility_eps: float = 1e-14
    batch_size: int = 8
    workers: int = 1
    polish: bool = True

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_boxes <= 0:
            raise ValueError("max_boxes must be positive")
        if self.batch_size <= 0 or self.workers <= 0:
            raise ValueError("batch_size and workers must be positive")


@dataclass(frozen=True)
class Enclosure:
    max_lo: float
    max_hi: float
    argmax_box: tuple[Interval, ...]
    witness: tuple[float, ...]
    argmax: tuple[float, ...]
    boxes_processed: int
    status: Status

    @property
    def width(self) -> float:
        return self.max_hi - self.max_lo

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


@dataclass
class VerificationReport:
    bound_id: str
    max_lo: float
    max_hi: float
    argmax_box: tuple[tuple[float, float], ...]
    argmax: tuple[float, ...]
    expected_value: float
    expected_argmax: tuple[float, ...]
    value_pass: bool
    argmax_pass: bool
    convergence_pass: bool
    closed_form: Optional[float]
    closed_form_pass: Optional[bool]
    status: str
    boxes_processed: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        flags = [self.value_pass, self.argmax_pass, self.convergence_pass]
        if self.closed_form_pass is not None:
            flags.append(self.closed_form_pass)
        return all(flags)


# -- box assessment -----------------------------------------------------------

@dataclass
class _Assessed:
    box: tuple[Interval, ...]
    ub: float
    witness: Optional[tuple[float, ...]]
    witness_lo: float
    keep: bool


def _touches_domain_edge(box, domain_box) -> bool:
    return any(b.lo <= d.lo or b.hi >= d.hi for b, d in zip(box, domain_box))


def _witness(problem: BoundProblem, box, inside: bool):
    p = tuple(iv.mid for iv in box)
    dom = problem.domain
    if dom.constraint is not None and not inside:
        if dom.project is None:
            return None, -math.inf
        p = dom.project(p)
        p = tuple(min(max(v, iv.lo), iv.hi) for v, iv in zip(p, box))
        pbox = tuple(Interval(v) for v in p)
        # require certified feasibility; step y down a few ulps if rounding bites
        for _ in range(4):
            if eval_interval(dom.constraint, pbox).lo >= 0.0:
                break
            p = p[:-1] + (math.nextafter(p[-1], -math.inf) if p[-1] > 0 else 0.0,)
            pbox = tuple(Interval(v) for v in p)
        else:
            return None, -math.inf
    pbox = tuple(Interval(v) for v in p)
    try:
        return p, eval_interval(problem.objective, pbox).lo
    except DomainError:
        return None, -math.inf


def _assess(problem: BoundProblem, cfg: OptimizerConfig, box, parent_ub: float) -> _Assessed:
    dom = problem.domain
    inside = True
    if dom.constraint is not None:
        g = eval_interval(dom.constraint, box)
        if g.hi < -cfg.constraint_feasibility_eps:
            return _Assessed(box, -math.inf, None, -math.inf, False)
        inside = g.lo >= 0.0
    try:
        ub = eval_interval(problem.objective, box).hi
    except DomainError:
        return _Assessed(box, -math.inf, None, -math.inf, False)

    wit, wlo = _witness(problem, box, inside)

    grads = None
    try:
        grads = [eval_interval_derivative(problem.objective, box, i) for i in range(problem.arity)]
    except DomainError:
        pass
    if grads is not None:
        c = tuple(iv.mid for iv in box)
        mv = eval_interval(problem.objective, tuple(Interval(v) for v in c))
        for g, iv, ci in zip(grads, box, c):
            mv = mv + g * (iv - ci)
        ub = min(ub, mv.hi)
        if (
            cfg.use_derivative_pruning
            and inside
            and not _touches_domain_edge(box, dom.box)
            and any(g.lo > 0.0 or g.hi < 0.0 for g in grads)
        ):
            # gradient cannot vanish here and the box holds no domain boundary
            return _Assessed(box, min(ub, parent_ub), wit, wlo, False)
    return _Assessed(box, min(ub, parent_ub), wit, wlo, True)


def _split(box):
    k = max(range(len(box)), key=lambda i: (box[i].width, -i))
    iv = box[k]
    m = iv.mid
    if not (iv.lo < m < iv.hi):
        return None
    left = box[:k] + (Interval(iv.lo, m),) + box[k + 1:]
    right = box[:k] + (Interval(m, iv.hi),) + box[k + 1:]
    return left, right


# process-pool plumbing: the problem is shipped once per worker
_WORKER_STATE: dict = {}


def _init_worker(problem, cfg):
    _WORKER_STATE["problem"] = problem
    _WORKER_STATE["cfg"] = cfg


def _assess_many(jobs):
    problem, cfg = _WORKER_STATE["problem"], _WORKER_STATE["cfg"]
    return [_assess(problem, cfg, box, pub) for box, pub in jobs]


def _key(ub: float, box) -> tuple:
    return (-ub, -box_width(box), tuple(iv.lo for iv in box))


def maximize(problem: BoundProblem, cfg: OptimizerConfig | None = None) -> Enclosure:
    """Certified enclosure of the global maximum of ``problem.objective``.

    On budget exhaustion the best-so-far enclosure is returned with
    ``status == Status.BUDGET_EXHAUSTED``.
    """
    cfg = cfg or OptimizerConfig()
    root = tuple(problem.domain.box)
    first = _assess(problem, cfg, root, math.inf)
    if first.ub == -math.inf:
        raise DomainError(f"{problem.id}: the initial box is infeasible")

    best_lo, best_pt = first.witness_lo, first.witness
    heap: list = []
    counter = 0

    def push(a: _Assessed):
        nonlocal counter
        heapq.heappush(heap, (_key(a.ub, a.box), counter, a))
        counter += 1

    push(first)
    processed = 0
    status = Status.CONVERGED

    pool = None
    if cfg.workers > 1:
        pool = ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(problem, cfg))
    try:
        while True:
            while heap and heap[0][2].ub < best_lo:
                heapq.heappop(heap)
            top_ub = heap[0][2].ub
            if top_ub - best_lo <= cfg.tolerance:
                break
            if processed >= cfg.max_boxes:
                status = Status.BUDGET_EXHAUSTED
                break
            batch = []
            unsplittable = []
            while heap and len(batch) < cfg.batch_size and processed + len(batch) < cfg.max_boxes:
                _, _, a = heapq.heappop(heap)
                if a.ub < best_lo:
                    continue
                halves = _split(a.box)
                if halves is None:
                    unsplittable.append(a)
                    continue
                batch.append((a, halves))
            if not batch:
                # every candidate is at floating-point resolution
                for a in unsplittable:
                    push(a)
                log.warning("%s: boxes reached float resolution before tolerance", problem.id)
                break
            for a in unsplittable:
                push(a)
            jobs = [(h, a.ub) for a, halves in batch for h in halves]
            if pool is None:
                results = [_assess(problem, cfg, b, pub) for b, pub in jobs]
            else:
                n = len(jobs)
                chunk = max(1, math.ceil(n / cfg.workers))
                parts = [jobs[i:i + chunk] for i in range(0, n, chunk)]
                results = [r for part in pool.map(_assess_many, parts) for r in part]
            processed += len(batch)
            for r in results:
                if r.witness is not None and r.witness_lo > best_lo:
                    best_lo, best_pt = r.witness_lo, r.witness
            for r in results:
                if r.keep and r.ub >= best_lo:
                    push(r)
    finally:
        if pool is not None:
            pool.shutdown()

    live = [entry[2] for entry in heap if entry[2].ub >= best_lo]
    max_hi = max([best_lo] + [a.ub for a in live])
    if live:
        dims = range(problem.arity)
        argmax_box = tuple(
            Interval(min(a.box[i].lo for a in live), max(a.box[i].hi for a in live)) for i in dims
        )
    else:
        argmax_box = tuple(Interval(v) for v in best_pt)
    # the witness always lies in the argmax hull's neighbourhood; widen to include it
    argmax_box = tuple(
        Interval(min(iv.lo, v), max(iv.hi, v)) for iv, v in zip(argmax_box, best_pt)
    )
    argmax = refine_argmax(problem, best_pt, argmax_box) if cfg.polish else best_pt
    return Enclosure(best_lo, max_hi, argmax_box, best_pt, argmax, processed, status)


# -- argmax refinement ------------------------------------------------------

def _gradient(problem: BoundProblem, p) -> np.ndarray:
    return np.array([eval_derivative(problem.objective, p, i) for i in range(problem.arity)])


def refine_argmax(problem: BoundProblem, start, box, steps: int = 30) -> tuple[float, ...]:
    """Polish a witness with projected Newton steps inside ``box``.

    The Hessian is a central difference of the forward-mode gradient.  Steps
    are accepted only while they stay feasible and improve either the
    objective or, at equal objective (float resolution), the gradient norm.
    The certified bounds never depend on this point.
    """
    lo = np.array([iv.lo for iv in box])
    hi = np.array([iv.hi for iv in box])
    p = np.array(start, dtype=float)
    dom = problem.domain

    def feasible(q):
        return dom.contains(tuple(q), eps=0.0)

    try:
        fp = eval_point(problem.objective, p)
        gp = _gradient(problem, p)
    except DomainError:
        return tuple(start)
    for _ in range(steps):
        n = len(p)
        h = 1e-6
        H = np.empty((n, n))
        try:
            for i in range(n):
                e = np.zeros(n)
                e[i] = h
                H[:, i] = (_gradient(problem, p + e) - _gradient(problem, p - e)) / (2 * h)
            d = -np.linalg.solve(H, gp)
        except (DomainError, np.linalg.LinAlgError):
            break
        if not np.all(np.isfinite(d)):
            break
        q = np.clip(p + d, lo, hi)
        if np.array_equal(q, p) or not feasible(q):
            break
        try:
            fq = eval_point(problem.objective, q)
            gq = _gradient(problem, q)
        except DomainError:
            break
        slack = 4 * math.ulp(abs(fp))
        if fq > fp or (fq >= fp - slack and np.linalg.norm(gq) < np.linalg.norm(gp)):
            p, fp, gp = q, fq, gq
        else:
            break
    return tuple(float(v) for v in p)


# -- problem-specific helpers ------------------------------------------------

def stationary_residual_f6(x: float, y: float) -> float:
    """``x^2 (9y - 4) + 12 y^2``, i.e. ``3y dF6/dx - x dF6/dy`` with radicals cancelled."""
    return x * x * (9.0 * y - 4.0) + 12.0 * y * y


def _argmax_ok(problem: BoundProblem, enc: Enclosure) -> bool:
    tol = problem.argmax_tolerance
    exp = problem.expected_argmax
    near_point = all(abs(a - e) <= tol for a, e in zip(enc.argmax, exp))
    # distance from the expected point to the certified argmax hull
    near_box = all(
        max(iv.lo - e, e - iv.hi, 0.0) <= tol for iv, e in zip(enc.argmax_box, exp)
    )
    return near_point and near_box


def verify_bound(problem: BoundProblem, cfg: OptimizerConfig | None = None) -> VerificationReport:
    """Run :func:`maximize` and grade the result against the expected constant."""
    cfg = cfg or OptimizerConfig()
    t0 = time.perf_counter()
    enc = maximize(problem, cfg)
    wall = time.perf_counter() - t0
    tol = problem.value_tolerance
    value_ok = enc.max_lo - tol <= problem.expected_value <= enc.max_hi + tol
    cf_ok = None
    if problem.closed_form is not None:
        cf = problem.closed_form
        cf_ok = enc.max_lo - 1e-12 <= cf <= enc.max_hi + 1e-12
    return VerificationReport(
        bound_id=problem.id,
        max_lo=enc.max_lo,
        max_hi=enc.max_hi,
        argmax_box=tuple((iv.lo, iv.hi) for iv in enc.argmax_box),
        argmax=enc.argmax,
        expected_value=problem.expected_value,
        expected_argmax=problem.expected_argmax,
        value_pass=value_ok,
        argmax_pass=_argmax_ok(problem, enc),
        convergence_pass=enc.converged,
        closed_form=problem.closed_form,
        closed_form_pass=cf_ok,
        status=enc.status.value,
        boxes_processed=enc.boxes_processed,
        wall_time=wall,
    )
