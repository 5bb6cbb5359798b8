"""Command-line interface.

Exit codes: 0 success, 1 a check failed, 2 optimizer budget exhausted,
3 sampler rejection budget exceeded, 64 usage error (unknown id, bad flag).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import report
from .catalog import UnknownProblemError, get_problem, problem_ids
from .expr import eval_array
from .grunsky import RejectionBudgetError, Scenario, sample
from .identities import run_identities
from .optimizer import OptimizerConfig, Status, verify_bound

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_REJECTION, EXIT_USAGE = 0, 1, 2, 3, 64


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text)


def _problem(bound_id: str):
    try:
        return get_problem(bound_id)
    except UnknownProblemError:
        raise click.UsageError(
            f"unknown bound id {bound_id!r}; choose from: {', '.join(problem_ids())}"
        ) from None


_out = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                    help="Write the report here instead of stdout.")
_json = click.option("--json", "as_json", is_flag=True, help="Emit a JSON document.")
_workers = click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True,
                        help="Worker processes (results do not depend on this).")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Certified enclosures of coefficient-bound constants for univalent functions."""


@cli.command()
@click.argument("bound_id")
@click.option("--tol", type=float, default=1e-9, show_default=True, help="Enclosure width target.")
@click.option("--max-boxes", type=click.IntRange(min=1), default=10_000_000, show_default=True)
@click.option("--timing", is_flag=True, help="Include wall time (makes output nondeterministic).")
@_workers
@_out
@_json
def verify(bound_id, tol, max_boxes, timing, workers, out, as_json):
    """Certify the maximum of one catalog bound."""
    problem = _problem(bound_id)
    cfg = OptimizerConfig(tolerance=tol, max_boxes=max_boxes, workers=workers)
    r = verify_bound(problem, cfg)
    text = report.to_json(report.verification_dict(r, timing)) if as_json else report.render_verification(r, timing)
    _emit(text, out)
    if r.status == Status.BUDGET_EXHAUSTED.value:
        return EXIT_BUDGET
    return EXIT_OK if r.passed else EXIT_FAIL


@cli.command("verify-all")
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--max-boxes", type=click.IntRange(min=1), default=10_000_000, show_default=True)
@_workers
@_out
@_json
def verify_all(tol, max_boxes, workers, out, as_json):
    """Certify every catalog bound and the three F6 edge curves."""
    cfg = OptimizerConfig(tolerance=tol, max_boxes=max_boxes, workers=workers)
    rows = [verify_bound(get_problem(pid), cfg) for pid in problem_ids()]
    suite = report.SuiteReport(rows, report.suite_checks(rows))
    _emit(report.to_json(report.suite_dict(suite)) if as_json else report.render_suite(suite), out)
    return EXIT_OK if suite.passed else EXIT_FAIL


@cli.command("sample")
@click.option("--scenario", type=click.Choice([s.value for s in Scenario]), required=True)
@click.option("--n", "n", type=click.IntRange(min=1), default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@_workers
@_out
@_json
def sample_cmd(scenario, n, seed, workers, out, as_json):
    """Stress-test a scenario's bounds on random feasible Grunsky windows."""
    try:
        r = sample(scenario, n, seed, workers=workers)
    except RejectionBudgetError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_REJECTION
    _emit(report.to_json(report.sample_dict(r)) if as_json else report.render_sample(r), out)
    return EXIT_OK if r.violation_count == 0 else EXIT_FAIL


@cli.command()
@click.option("--n", "n", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@_out
@_json
def identities(n, seed, out, as_json):
    """Check the reduced coefficient identities against the general route."""
    rows = run_identities(n, seed)
    _emit(report.to_json(report.identities_dict(rows)) if as_json else report.render_identities(rows), out)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def grid_rows(problem, resolution: int) -> tuple[list[str], np.ndarray]:
    axes = [np.linspace(iv.lo, iv.hi, resolution) for iv in problem.domain.box]
    if problem.arity == 1:
        pts = [axes[0]]
    else:
        X, Y = np.meshgrid(axes[0], axes[1], indexing="ij")
        pts = [X.ravel(), Y.ravel()]
    if problem.domain.constraint is not None:
        keep = eval_array(problem.domain.constraint, pts) >= -1e-12
        pts = [p[keep] for p in pts]
    vals = eval_array(problem.objective, pts)
    names = ["x", "y"][: problem.arity]
    return names, np.column_stack(pts + [vals])


@cli.command()
@click.argument("bound_id")
@click.option("--resolution", type=click.IntRange(min=2), default=101, show_default=True,
              help="Grid nodes per axis.")
@_out
def grid(bound_id, resolution, out):
    """Write objective values on a uniform grid as CSV."""
    problem = _problem(bound_id)
    names, data = grid_rows(problem, resolution)
    lines = [",".join(names + [problem.id])]
    lines += [",".join(report.num(v) for v in row) for row in data]
    _emit("\n".join(lines) + "\n", out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> None:
    try:
        rv = cli.main(args=argv, prog_name="grunsky-bounds", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        sys.exit(EXIT_USAGE)
    except click.ClickException as e:
        e.show()
        sys.exit(EXIT_FAIL)
    except click.Abort:
        sys.exit(EXIT_FAIL)
    sys.exit(rv if isinstance(rv, int) else EXIT_OK)


if __name__ == "__main__":
    main()
