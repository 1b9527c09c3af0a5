"""
Command-line front end.

Every command prints one JSON document (or writes it to --out) that embeds
the configuration it ran with. Logs go to stderr. Exit codes: 0 ok,
1 validation failure, 2 domain or geometry error, 3 I/O or JSON error.
"""

import functools
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Tuple

import click
from pydantic import ValidationError

from qfbounds_project import settings
from qfbounds_project.logging_config import setup_logging
from qfbounds_project.startup import StartupValidator

from .bounds import (
    BoundInputs,
    UniformBoundInputs,
    audit_separation_bound,
    covering_constants,
    separation_bound,
    uniform_separation_bound,
)
from .config import RunConfig
from .cylinder import (
    check_minimality,
    classify,
    equidistant_path_lengths,
    generate_cyl,
    solve_axis,
)
from .exceptions import DomainViolation, GeometryError
from .fixtures import FIXTURES
from .oracles import DistanceOracle
from .records import (
    CombinatoricsRecord,
    CylQuadRecord,
    GenerateRecord,
    OracleRecord,
    SurfaceRecord,
    dump_json,
    load_record,
    report_to_dict,
)
from .surface import (
    Combinatorics,
    comparison_polyhedron,
    curvature_class,
    intrinsic_distance,
    metric_deviation,
)
from .verify import check_registry, run_check

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DOMAIN = 2
EXIT_IO = 3


def reports_errors(func):
    """Map library errors onto the exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (GeometryError, ValidationError) as e:
            logger.error(f"{func.__name__} failed: {type(e).__name__}: {e}")
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_DOMAIN)
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"{func.__name__} could not read or write: {e}")
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_IO)

    return wrapper


def emit(config: RunConfig, payload: Dict[str, Any], status: int = EXIT_OK):
    payload = dict(payload, config=config.embedded())
    text = dump_json(payload)
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
        logger.info(f"Report written to {config.out}")
    else:
        click.echo(text, nl=False)
    if status != EXIT_OK:
        sys.exit(status)


@click.group()
@click.option("--margulis-eps", type=float, default=settings.DEFAULT_MARGULIS_EPS, show_default=True)
@click.option("--tol", type=float, default=settings.DEFAULT_TOL, show_default=True)
@click.option("--seed", type=int, default=None, help="Required by every randomized command.")
@click.option("--refinement", type=int, default=settings.DEFAULT_REFINEMENT, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the report here.")
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--log-level", default=None, help="Defaults to QFBOUNDS_LOG_LEVEL.")
@click.pass_context
@reports_errors
def cli(ctx, margulis_eps, tol, seed, refinement, out, threads, log_level):
    """Hyperbolic geometry toolkit for boundary-separation bounds."""
    setup_logging((log_level or settings.LOG_LEVEL).upper(), settings.LOG_DIR)
    ctx.obj = RunConfig(
        margulis_eps=margulis_eps,
        tol=tol,
        seed=seed,
        refinement=refinement,
        out=out,
        threads=threads,
    )


@cli.command()
@click.argument("surface_path", type=click.Path())
@click.pass_obj
@reports_errors
def validate(config: RunConfig, surface_path):
    """Validate a surface file and classify its curvature."""
    surface = load_record(surface_path, SurfaceRecord).to_surface()
    report = surface.report()
    if not report.clean:
        emit(config, report_to_dict(report), EXIT_VALIDATION)
        return
    cls = curvature_class(surface, tol=config.tol)
    payload = report_to_dict(report, cls)
    payload["cone_angles"] = list(surface.cone_angles())
    emit(config, payload, EXIT_OK if cls.accepted else EXIT_VALIDATION)


def _deviation_pairs(oracle: DistanceOracle, comb: Combinatorics) -> List[Tuple[int, int]]:
    edges = set(comb.edges())
    return [p for p in oracle.declared_pairs() if p not in edges and p[0] != p[1]]


@cli.command()
@click.argument("oracle_path", type=click.Path())
@click.argument("combinatorics_path", type=click.Path(), required=False)
@click.option("--surface-out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
@reports_errors
def approximate(config: RunConfig, oracle_path, combinatorics_path, surface_out):
    """Build the comparison polyhedron of a distance oracle."""
    oracle = load_record(oracle_path, OracleRecord).to_oracle()
    if combinatorics_path is not None:
        comb = load_record(combinatorics_path, CombinatoricsRecord).to_combinatorics()
    elif hasattr(oracle, "combinatorics"):
        comb = oracle.combinatorics()
    else:
        raise DomainViolation("a pair-table oracle needs a combinatorics file")

    surface = comparison_polyhedron(oracle, comb)
    pairs = _deviation_pairs(oracle, comb)
    deviation = metric_deviation(
        oracle.distance,
        lambda u, v: intrinsic_distance(surface, u, v, config.refinement),
        pairs,
    )
    cls = curvature_class(surface, tol=config.tol)
    record = SurfaceRecord.from_surface(surface)
    if surface_out:
        Path(surface_out).write_text(dump_json(record.model_dump()), encoding="utf-8")
    emit(
        config,
        {
            "surface": record.model_dump(),
            "metric_deviation": deviation,
            "deviation_pairs": len(pairs),
            "max_cone_angle_excess": max(abs(a - 2.0 * math.pi) for a in surface.cone_angles()),
            "curvature_class": {"accepted": cls.accepted, "label": cls.label},
        },
    )


@cli.command()
@click.argument("surface_path", type=click.Path())
@click.argument("u", type=int)
@click.argument("v", type=int)
@click.pass_obj
@reports_errors
def distance(config: RunConfig, surface_path, u, v):
    """Intrinsic distance between two vertices of a surface."""
    surface = load_record(surface_path, SurfaceRecord).to_surface()
    value = intrinsic_distance(surface, u, v, config.refinement)
    emit(config, {"u": u, "v": v, "distance": value})


@cli.command()
@click.argument("l_plus_1", type=float)
@click.argument("l_minus_1", type=float)
@click.argument("l_plus_2", type=float)
@click.argument("l_minus_2", type=float)
@click.option("--audit-dps", type=int, default=None, help="Re-evaluate every term with mpmath.")
@click.pass_obj
@reports_errors
def bound(config: RunConfig, l_plus_1, l_minus_1, l_plus_2, l_minus_2, audit_dps):
    """Upper bound on the distance between the two boundary surfaces."""
    inputs = BoundInputs(
        l_plus_1=l_plus_1,
        l_minus_1=l_minus_1,
        l_plus_2=l_plus_2,
        l_minus_2=l_minus_2,
        eps3=config.margulis_eps,
    )
    payload = separation_bound(inputs).model_dump()
    if audit_dps is not None:
        payload["audit"] = audit_separation_bound(inputs, dps=audit_dps).model_dump()
    emit(config, payload)


@cli.command("bound-uniform")
@click.argument("upper_plus_1", type=float)
@click.argument("lower_plus_1", type=float)
@click.argument("upper_minus_1", type=float)
@click.argument("lower_minus_1", type=float)
@click.argument("upper_plus_2", type=float)
@click.argument("lower_plus_2", type=float)
@click.argument("upper_minus_2", type=float)
@click.argument("lower_minus_2", type=float)
@click.pass_obj
@reports_errors
def bound_uniform(config: RunConfig, **envelopes):
    """Uniform bound from upper and lower length envelopes (Omega, omega per curve)."""
    fields = {}
    for name, value in envelopes.items():
        kind, rest = name.split("_", 1)
        fields[("Omega_" if kind == "upper" else "omega_") + rest] = value
    inputs = UniformBoundInputs(eps3=config.margulis_eps, **fields)
    emit(config, uniform_separation_bound(inputs).model_dump())


@cli.command()
@click.argument("delta_s", type=float)
@click.argument("sigma_s", type=float)
@click.pass_obj
@reports_errors
def covering(config: RunConfig, delta_s, sigma_s):
    """Covering constants delta_M, neighbor radius and rho_hat."""
    emit(config, covering_constants(delta_s, sigma_s).model_dump())


@cli.command()
@click.argument("name", type=click.Choice(sorted(FIXTURES)))
@click.pass_obj
@reports_errors
def fixture(config: RunConfig, name):
    """Print a built-in surface as a surface file."""
    emit(config, SurfaceRecord.from_surface(FIXTURES[name]()).model_dump())


@cli.command()
@click.pass_obj
@reports_errors
def check(config: RunConfig):
    """Validate the interpreter, the stack and the settings."""
    validator = StartupValidator()
    passed = validator.run_all_validations()
    emit(
        config,
        {
            "passed": passed,
            "errors": validator.errors,
            "warnings": validator.warnings,
            "versions": validator.versions,
        },
        EXIT_OK if passed else EXIT_VALIDATION,
    )


@cli.group()
def cyl():
    """Flattened cylinders of type Cyl."""


@cyl.command()
@click.argument("params_path", type=click.Path())
@click.pass_obj
@reports_errors
def generate(config: RunConfig, params_path):
    """Generate a quad from {translation_length, offset_plus, offset_minus, phase}."""
    params = load_record(params_path, GenerateRecord)
    q = generate_cyl(seed=config.seed, **params.model_dump())
    emit(config, {"quad": CylQuadRecord.from_quad(q).model_dump()})


@cyl.command()
@click.argument("quad_path", type=click.Path())
@click.option("--sweep", type=click.Choice(["R", "Q"]), default="R", show_default=True)
@click.pass_obj
@reports_errors
def solve(config: RunConfig, quad_path, sweep):
    """Solve for the axis and fill in the derived fields."""
    q = load_record(quad_path, CylQuadRecord).to_quad()
    solved = solve_axis(q.sides(), sweep=sweep, tol=config.tol)
    minimality = check_minimality(solved)
    emit(
        config,
        {
            "quad": CylQuadRecord.from_quad(solved).model_dump(),
            "minimality": minimality._asdict(),
        },
    )


@cyl.command("classify")
@click.argument("quad_path", type=click.Path())
@click.pass_obj
@reports_errors
def classify_command(config: RunConfig, quad_path):
    """Situation class and equidistant path lengths of a quad."""
    q = load_record(quad_path, CylQuadRecord).to_quad()
    if not q.solved:
        q = solve_axis(q, tol=config.tol)
    emit(
        config,
        {
            "situation": classify(q).value,
            "path_lengths": equidistant_path_lengths(q)._asdict(),
        },
    )


@cyl.command()
@click.argument("name", type=click.Choice(check_registry.names() + ["all"]))
@click.option("--instances", type=int, default=500, show_default=True)
@click.option("--progress/--no-progress", default=False)
@click.pass_obj
@reports_errors
def verify(config: RunConfig, name, instances, progress):
    """Monte-Carlo verification of the cylinder guarantees."""
    if config.seed is None:
        raise DomainViolation("cyl verify is randomized and needs an explicit --seed")
    names = check_registry.names() if name == "all" else [name]
    results = [
        run_check(
            check_registry.get_check(n),
            instances,
            config.seed,
            config.margulis_eps,
            threads=config.threads,
            progress=progress,
        )
        for n in names
    ]
    failed = any(not r.ok for r in results)
    emit(
        config,
        {"results": [r.model_dump() for r in results], "failed": failed},
        EXIT_VALIDATION if failed else EXIT_OK,
    )