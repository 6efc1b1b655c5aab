"""Command-line interface.

Exit status: 0 when the strongest conclusion is certified, 2 when it is
Inconclusive, 1 on any error (including usage errors).
"""

from __future__ import annotations

import json
import os
import sys

import click

from .birth_death import BirthDeathSpec, TailHint, classify_birth_death, write_rho_csv
from .chain_model import BUILTINS, build_builtin, read_spec_file
from .criteria import classify
from .drift_analysis import drift_profile
from .errors import DriftcertError
from .simulator import estimate_return_stats
from .tails import PowerLawTail

HORIZON_ENV = "DRIFTCERT_HORIZON"
DEFAULT_HORIZON = 100_000
EXIT_CERTIFIED, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


def _split_top_level(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside parentheses, so expressions may contain commas."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _parse_params(values: tuple[str, ...]) -> dict:
    out = {}
    for chunk in values:
        for item in _split_top_level(chunk):
            key, eq, value = item.partition("=")
            if not eq:
                raise click.BadParameter(f"expected key=value, got {item!r}", param_hint="--params")
            out[key.strip()] = value.strip()
    return out


def _default_horizon() -> int:
    raw = os.environ.get(HORIZON_ENV)
    if raw is None:
        return DEFAULT_HORIZON
    try:
        return int(float(raw))
    except ValueError:
        raise click.BadParameter(f"{HORIZON_ENV}={raw!r} is not a number") from None


def _load(specfile, builtin, params):
    if (specfile is None) == (builtin is None):
        raise click.UsageError("give exactly one of SPECFILE or --builtin")
    if specfile is not None:
        if params:
            raise click.UsageError("--params only applies to --builtin")
        return read_spec_file(specfile)
    return build_builtin(builtin, _parse_params(params))


def _emit(text: str, out) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


spec_source = [
    click.argument("specfile", required=False, type=click.Path(exists=True, dir_okay=False)),
    click.option("--builtin", help="Name of a built-in chain (see `examples`)."),
    click.option("--params", multiple=True, help="Builtin parameters, e.g. m=1,n=2."),
]


def with_spec_source(fn):
    for deco in reversed(spec_source):
        fn = deco(fn)
    return fn


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact")
def cli():
    """Classify Markov chains on the nonnegative integers by drift criteria."""


@cli.command("classify")
@with_spec_source
@click.option("--horizon", type=int, default=None, help=f"Scan horizon H [env {HORIZON_ENV}, default 1e5].")
@click.option("--theta", default="0.9,1.1", show_default=True, help="Comma-separated Lamperti thetas.")
@click.option("--tail", "tail_text", default=None, help="Power-law drift tail C,alpha[,D[,cutoff]].")
@click.option("--simulate", default=None, help="Add a return simulation: n,max_steps,seed.")
@click.option("--workers", type=int, default=1, show_default=True, help="Simulation threads.")
@click.option("--timings", is_flag=True, help="Record wall-clock time per stage in the report.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the report here.")
def classify_cmd(specfile, builtin, params, horizon, theta, tail_text, simulate, workers, timings, out):
    """Run every criterion and print a JSON report."""
    spec = _load(specfile, builtin, params)
    H = horizon if horizon is not None else _default_horizon()
    thetas = tuple(float(t) for t in _split_top_level(theta))
    tail = None
    if tail_text:
        fields = _split_top_level(tail_text)
        if not 2 <= len(fields) <= 4:
            raise click.BadParameter("expected C,alpha[,D[,cutoff]]", param_hint="--tail")
        if len(fields) == 4:
            try:
                fields[3] = int(fields[3])
            except ValueError:
                raise click.BadParameter("cutoff must be an integer", param_hint="--tail") from None
        tail = PowerLawTail(*fields)
    report = classify(spec, H, tail=tail, thetas=thetas, timings=timings)
    if simulate:
        try:
            n, steps, seed = (int(float(x)) for x in _split_top_level(simulate))
        except ValueError:
            raise click.BadParameter("expected n,max_steps,seed", param_hint="--simulate") from None
        stats = estimate_return_stats(spec, 0, n, steps, seed, workers=workers)
        report = report.with_simulation(stats.to_dict())
    _emit(report.to_json(), out)
    sys.exit(EXIT_CERTIFIED if report.certified else EXIT_INCONCLUSIVE)


@cli.command("drifts")
@with_spec_source
@click.option("--range", "state_range", required=True, help="State range lo:hi.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="CSV output path.")
def drifts_cmd(specfile, builtin, params, state_range, csv_path):
    """Tabulate the mean and second-moment drifts (CSV: i, gamma, sigma)."""
    spec = _load(specfile, builtin, params)
    try:
        lo, hi = (int(x) for x in state_range.split(":"))
    except ValueError:
        raise click.BadParameter("expected lo:hi", param_hint="--range") from None
    profile = drift_profile(spec, lo, hi)
    if csv_path is None:
        profile.write_csv(click.get_text_stream("stdout"))
    else:
        profile.to_csv(csv_path)


@cli.command("bd-oracle")
@click.option("--p-expr", required=True, help="Up-probability p_i as an expression in i.")
@click.option("--q-expr", default=None, help="Down-probability q_i (default 1 - p_i).")
@click.option("--horizon", type=int, default=None, help="Horizon H (>= 10).")
@click.option("--tail", "tail_text", default=None, help="Asserted rho tail: power:beta or geometric:r.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Also write i, rho_i, partial_sum.")
def bd_oracle_cmd(p_expr, q_expr, horizon, tail_text, csv_path):
    """Karlin rho-product test for a birth-death chain."""
    spec = BirthDeathSpec.from_exprs(p_expr, q_expr)
    H = horizon if horizon is not None else _default_horizon()
    hint = None
    if tail_text:
        kind, _, value = tail_text.partition(":")
        try:
            hint = TailHint(kind.strip(), float(value))
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--tail") from None
    verdict = classify_birth_death(spec, H, hint)
    if csv_path:
        write_rho_csv(spec, H, csv_path)
    click.echo(json.dumps(verdict.to_dict(), indent=2))
    sys.exit(EXIT_CERTIFIED if verdict.certified else EXIT_INCONCLUSIVE)


@cli.command("examples")
def examples_cmd():
    """List the built-in chains."""
    for b in BUILTINS.values():
        params = ",".join(b.params) or "-"
        click.echo(f"{b.name}\t{params}\t{b.provenance}")


def main(argv=None) -> int:
    """Entry point; maps every failure to exit status 1."""
    try:
        cli.main(args=argv, prog_name="driftcert", standalone_mode=False)
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_ERROR
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except (DriftcertError, ValueError, OSError) as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_ERROR
    return EXIT_CERTIFIED


if __name__ == "__main__":
    sys.exit(main())
