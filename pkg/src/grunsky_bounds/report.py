"""Deterministic text and JSON rendering of verification and sampling results."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .catalog import get_problem
from .grunsky import GrunskyWindow, SampleReport
from .identities import IdentityRow
from .optimizer import VerificationReport


def num(v: float | None) -> str:
    if v is None:
        return "null"
    return format(float(v) + 0.0, ".17g")  # + 0.0 folds -0.0


def _flag(b: bool | None) -> str:
    return "null" if b is None else ("true" if b else "false")


def _vec(v) -> str:
    return "(" + ", ".join(num(c) for c in v) + ")"


def _box(b) -> str:
    return " x ".join(f"[{num(lo)}, {num(hi)}]" for lo, hi in b)


def verification_dict(r: VerificationReport, timing: bool = False) -> dict:
    p = get_problem(r.bound_id)
    d = {
        "bound_id": r.bound_id,
        "bound": p.theorem_tag,
        "enclosure": {"max_lo": r.max_lo, "max_hi": r.max_hi},
        "argmax_box": [list(iv) for iv in r.argmax_box],
        "argmax": list(r.argmax),
        "expected_value": r.expected_value,
        "expected_argmax": list(r.expected_argmax),
        "closed_form": r.closed_form,
        "closed_form_label": p.closed_form_label or None,
        "pass": {
            "value": r.value_pass,
            "argmax": r.argmax_pass,
            "convergence": r.convergence_pass,
            "closed_form": r.closed_form_pass,
        },
        "status": r.status,
        "boxes_processed": r.boxes_processed,
        "passed": r.passed,
    }
    if timing:
        d["wall_time"] = r.wall_time
    return d


def render_verification(r: VerificationReport, timing: bool = False) -> str:
    p = get_problem(r.bound_id)
    lines = [
        f"bound_id: {r.bound_id}",
        f"bound: {p.theorem_tag}",
        f"objective: {p.description}",
        f"status: {r.status}",
        f"max_lo: {num(r.max_lo)}",
        f"max_hi: {num(r.max_hi)}",
        f"width: {num(r.max_hi - r.max_lo)}",
        f"argmax: {_vec(r.argmax)}",
        f"argmax_box: {_box(r.argmax_box)}",
        f"expected_value: {num(r.expected_value)}",
        f"expected_argmax: {_vec(r.expected_argmax)}",
    ]
    if r.closed_form is not None:
        lines.append(f"closed_form: {num(r.closed_form)}  # {p.closed_form_label}")
    lines += [
        f"value_pass: {_flag(r.value_pass)}",
        f"argmax_pass: {_flag(r.argmax_pass)}",
        f"convergence_pass: {_flag(r.convergence_pass)}",
        f"closed_form_pass: {_flag(r.closed_form_pass)}",
        f"boxes_processed: {r.boxes_processed}",
    ]
    if timing:
        lines.append(f"wall_time: {r.wall_time:.3f}")
    lines.append(f"result: {'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class SuiteReport:
    rows: list[VerificationReport]
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and all(c.passed for c in self.checks)


def suite_checks(rows: list[VerificationReport]) -> list[Check]:
    by = {r.bound_id: r for r in rows}
    checks = []
    f2, f4 = by["f2"], by["f4"]
    cf = get_problem("f2").closed_form
    ok = (
        abs(f2.max_hi - f4.max_hi) <= 1e-12
        and f2.max_lo - 1e-12 <= cf <= f2.max_hi + 1e-12
        and f4.max_lo - 1e-12 <= cf <= f4.max_hi + 1e-12
    )
    checks.append(Check(
        "f2_f4_coincidence", ok,
        f"f2.max_hi={num(f2.max_hi)} f4.max_hi={num(f4.max_hi)} closed_form={num(cf)}",
    ))
    f6 = by["f6"]
    for eid in ("f6_edge_0", "f6_edge_y0", "f6_edge_curve"):
        e = by[eid]
        checks.append(Check(
            f"edge_dominance_{eid}", e.max_hi < f6.max_lo,
            f"edge.max_hi={num(e.max_hi)} < f6.max_lo={num(f6.max_lo)}",
        ))
    for pid in ("a5_a2zero", "a5_minus_a3_odd"):
        r = by[pid]
        p = get_problem(pid)
        checks.append(Check(
            f"closed_form_{pid}", bool(r.closed_form_pass),
            f"{p.closed_form_label} = {num(p.closed_form)} in [{num(r.max_lo)}, {num(r.max_hi)}]",
        ))
    return checks


def render_suite(s: SuiteReport) -> str:
    head = f"{'id':<16} {'max_lo':>20} {'max_hi':>20} {'expected':>20}  {'status':<16} pass"
    lines = [head, "-" * len(head)]
    for r in s.rows:
        lines.append(
            f"{r.bound_id:<16} {num(r.max_lo):>20} {num(r.max_hi):>20} {num(r.expected_value):>20}  "
            f"{r.status:<16} {'PASS' if r.passed else 'FAIL'}"
        )
    lines.append("")
    for c in s.checks:
        lines.append(f"check {c.name}: {'PASS' if c.passed else 'FAIL'}  {c.detail}")
    lines.append(f"result: {'PASS' if s.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def suite_dict(s: SuiteReport) -> dict:
    return {
        "bounds": [verification_dict(r) for r in s.rows],
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in s.checks],
        "passed": s.passed,
    }


def _window_pairs(w: GrunskyWindow) -> dict:
    names = ("w11", "w13", "w15", "w17", "w33", "w35")
    return {k: [complex(v).real, complex(v).imag] for k, v in zip(names, w.astuple())}


def render_sample(r: SampleReport) -> str:
    lines = [
        f"scenario: {r.scenario}",
        f"n: {r.n}",
        f"seed: {r.seed}",
        f"attempts: {r.attempts}",
        f"acceptance_rate: {num(r.acceptance_rate)}",
    ]
    for name in r.bound_ids:
        lines.append(
            f"objective {name}: observed_max={num(r.maxima[name])} bound={num(r.bounds[name])} "
            f"({r.bound_ids[name]}) violations={r.violations[name]}"
        )
        pairs = _window_pairs(r.argmax_windows[name])
        lines.append(
            f"argmax_window {name}: "
            + " ".join(f"{k}=({num(re)}, {num(im)})" for k, (re, im) in pairs.items())
        )
    lines.append(f"violations: {r.violation_count}")
    lines.append(f"result: {'PASS' if r.violation_count == 0 else 'FAIL'}")
    return "\n".join(lines) + "\n"


def sample_dict(r: SampleReport) -> dict:
    return {
        "scenario": r.scenario,
        "n": r.n,
        "seed": r.seed,
        "attempts": r.attempts,
        "acceptance_rate": r.acceptance_rate,
        "objectives": {
            name: {
                "observed_max": r.maxima[name],
                "bound": r.bounds[name],
                "bound_id": r.bound_ids[name],
                "violations": r.violations[name],
                "argmax_window": _window_pairs(r.argmax_windows[name]),
            }
            for name in r.bound_ids
        },
        "violations": r.violation_count,
    }


def render_identities(rows: list[IdentityRow]) -> str:
    lines = []
    for r in rows:
        lines.append(
            f"{r.name:<32} max_residual={num(r.max_residual):<24} threshold={r.threshold:g} "
            f"{'PASS' if r.passed else 'FAIL'}  {r.detail}"
        )
    ok = all(r.passed for r in rows)
    lines.append(f"result: {'PASS' if ok else 'FAIL'}")
    return "\n".join(lines) + "\n"


def identities_dict(rows: list[IdentityRow]) -> dict:
    return {
        "identities": [
            {"name": r.name, "max_residual": r.max_residual, "threshold": r.threshold,
             "passed": r.passed, "detail": r.detail}
            for r in rows
        ],
        "passed": all(r.passed for r in rows),
    }


def to_json(d: dict) -> str:
    return json.dumps(d, indent=2, sort_keys=False) + "\n"
