"""Command-line front end emitting CSV/JSON artifacts.

Exit codes: 0 success, 1 a verification contract failed (details as JSON on
stderr), 2 usage errors such as unknown flags, 3 invalid parameter ranges,
4 file I/O failures.  All artifacts are deterministic: floats use 15
significant digits, rows are emitted in a fixed order, CSV uses LF endings
and a leading "# schema_version=..." comment, JSON carries schema_version.
"""

from __future__ import annotations

import json
import math
import sys
from functools import wraps

import click
import numpy as np

from . import analysis, combinatorics, graph, orbits, spectrum, trace
from .model import NStepPotential, ScaledStepPotential, build_nstep, build_potential

SCHEMA_VERSION = 1

EXIT_CONTRACT = 1
EXIT_RANGE = 3
EXIT_IO = 4


class ContractFailure(RuntimeError):
    """A requested verification did not hold."""


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def _error_json(kind: str, message: str) -> str:
    return json.dumps({"error": {"type": kind, "message": message}}, sort_keys=True)


def _guard(fn):
    """Map exception classes onto the documented exit codes."""

    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except ValueError as exc:
            click.echo(_error_json("invalid-parameter", str(exc)), err=True)
            sys.exit(EXIT_RANGE)
        except OSError as exc:
            click.echo(_error_json("io-failure", str(exc)), err=True)
            sys.exit(EXIT_IO)
        except (ContractFailure, spectrum.CompletenessError) as exc:
            click.echo(_error_json("contract-violation", str(exc)), err=True)
            sys.exit(EXIT_CONTRACT)

    return wrapper


def _apply_config(ctx: click.Context, opts: dict) -> dict:
    """Fill defaulted options from the --config JSON file, flags winning.

    Config keys mirror the flag spellings ("lambda", "max-length", ...).
    """
    path = opts.get("config")
    if not path:
        return opts
    with open(path, "r", encoding="utf-8") as fh:
        loaded = json.load(fh)
    if not isinstance(loaded, dict):
        raise ValueError(f"config file {path!r} must hold a JSON object")
    dests = {}
    for param in ctx.command.params:
        for flag in param.opts:
            dests[flag.lstrip("-").replace("-", "_")] = param.name
    for key, value in loaded.items():
        name = dests.get(key.replace("-", "_"))
        if name is None or name not in opts:
            raise ValueError(f"config key {key!r} is not an option of this command")
        if ctx.get_parameter_source(name) == click.core.ParameterSource.DEFAULT:
            opts[name] = value
    return opts


def _write_text(path: str, text: str) -> None:
    if path == "-":
        click.echo(text, nl=False)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _csv_text(kind: str, header: list[str], rows: list[list[str]], trailer: list[str] = ()) -> str:
    lines = [f"# schema_version={SCHEMA_VERSION} kind={kind}"]
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    lines.extend(f"# {note}" for note in trailer)
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ValueError(f"{flag} must be a comma-separated list of numbers, got {text!r}")


def _potential_from(opts: dict):
    """Either a single step from --b/--lambda or a chain from the list flags."""
    if opts.get("breakpoints") is not None or opts.get("lambdas") is not None:
        if opts.get("breakpoints") is None or opts.get("lambdas") is None:
            raise ValueError("--breakpoints and --lambdas must be given together")
        return build_nstep(
            _parse_floats(opts["breakpoints"], "--breakpoints"),
            _parse_floats(opts["lambdas"], "--lambdas"),
        )
    if opts.get("b") is None or opts.get("lam") is None:
        raise ValueError("either --b and --lambda or --breakpoints and --lambdas are required")
    return build_potential(opts["b"], opts["lam"])


def _common(fn):
    fn = click.option("--out", default="-", show_default=True,
                      help="Output path for the main artifact ('-' = stdout).")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                      default="csv", show_default=True)(fn)
    fn = click.option("--threads", type=int, default=1, show_default=True,
                      envvar="RAYSPLIT_THREADS",
                      help="Worker threads where supported (env RAYSPLIT_THREADS).")(fn)
    fn = click.option("--config", type=click.Path(), default=None,
                      help="JSON file supplying defaults for any option of this command.")(fn)
    return fn


def _step_options(fn):
    fn = click.option("--b", type=float, default=None, help="Step position in (0, 1).")(fn)
    fn = click.option("--lambda", "lam", type=float, default=None,
                      help="Scaling constant in [0, 1).")(fn)
    return fn


def _chain_options(fn):
    fn = click.option("--breakpoints", default=None,
                      help="Comma-separated region boundaries 0,...,1 for a chain.")(fn)
    fn = click.option("--lambdas", default=None,
                      help="Comma-separated per-region scaling constants.")(fn)
    return fn


@click.group()
@click.version_option(package_name="raysplit")
def main() -> None:
    """Spectra of scaled step potentials and their periodic-orbit analysis."""


@main.command("spectrum")
@_step_options
@_chain_options
@click.option("--kmax", type=float, default=100.0, show_default=True)
@_common
@click.pass_context
@_guard
def spectrum_cmd(ctx, **opts):
    """Compute all roots up to --kmax with a completeness report."""
    opts = _apply_config(ctx, opts)
    pot = _potential_from(opts)
    if isinstance(pot, NStepPotential):
        result = spectrum.nstep_find_roots(pot, opts["kmax"], threads=opts["threads"])
        residual_fn = spectrum._real_secular_chain(pot)
    else:
        result = spectrum.find_roots(pot, opts["kmax"], threads=opts["threads"])
        residual_fn = lambda k: spectrum.secular(pot, k)
    roots = result.roots
    residuals = np.abs(np.asarray(residual_fn(roots))) if len(roots) else np.empty(0)
    rep = result.completeness
    if opts["fmt"] == "csv":
        rows = [
            [str(i + 1), _fmt(k), _fmt(k * k), _fmt(res)]
            for i, (k, res) in enumerate(zip(roots, residuals))
        ]
        trailer = [
            f"max_staircase_deviation={_fmt(rep.max_staircase_deviation)}",
            f"staircase_tolerance={_fmt(rep.tolerance)}",
            f"rescans={rep.rescans}",
            f"near_degenerate_count={len(rep.near_degenerate)}",
        ]
        _write_text(opts["out"], _csv_text("spectrum", ["n", "k", "E", "residual"], rows, trailer))
    else:
        payload = {
            "kind": "spectrum",
            "k_max": result.k_max,
            "roots": [
                {"n": i + 1, "k": k, "E": k * k, "residual": res}
                for i, (k, res) in enumerate(zip(roots.tolist(), residuals.tolist()))
            ],
            "completeness": {
                "max_staircase_deviation": rep.max_staircase_deviation,
                "tolerance": rep.tolerance,
                "near_degenerate": list(rep.near_degenerate),
                "rescans": rep.rescans,
            },
        }
        _write_text(opts["out"], _json_text(payload))


def _sized_records(pot: ScaledStepPotential, max_length: int | None, count: int | None):
    """Primitive orbit records in (length, action, word) order, truncated."""
    if count is None:
        codes = orbits.enumerate_primitive(max_length)
        recs = [orbits.orbit_record(c, pot) for c in codes]
    else:
        recs = []
        length = 0
        while len(recs) < count:
            length += 1
            if length > 32:
                raise ValueError(f"count {count} needs orbits longer than 32 symbols")
            for code in orbits.enumerate_necklaces(length):
                if code.nu == 1:
                    recs.append(orbits.orbit_record(code, pot))
    recs.sort(key=lambda rec: (rec.code.length, rec.s0, rec.code.word))
    if count is not None:
        recs = recs[:count]
    return recs


@main.command("orbits")
@_step_options
@click.option("--max-length", type=int, default=7, show_default=True,
              help="Truncate by binary code length.")
@click.option("--count", type=int, default=None,
              help="Truncate to exactly this many shortest orbits instead.")
@_common
@click.pass_context
@_guard
def orbits_cmd(ctx, **opts):
    """Tabulate primitive periodic orbits with counts, signs and actions."""
    opts = _apply_config(ctx, opts)
    if opts["b"] is None or opts["lam"] is None:
        raise ValueError("--b and --lambda are required")
    pot = build_potential(opts["b"], opts["lam"])
    recs = _sized_records(pot, opts["max_length"], opts["count"])
    header = ["code", "length", "nu", "nL", "nR", "sigma", "tau2", "sign", "S0"]
    if opts["fmt"] == "csv":
        rows = [
            [r.code.word, str(r.code.length), str(r.code.nu), str(r.n_l), str(r.n_r),
             str(r.sigma), str(r.tau2), str(r.sign), _fmt(r.s0)]
            for r in recs
        ]
        _write_text(opts["out"], _csv_text("orbits", header, rows))
    else:
        payload = {
            "kind": "orbits",
            "orbits": [
                {"code": r.code.word, "length": r.code.length, "nu": r.code.nu,
                 "nL": r.n_l, "nR": r.n_r, "sigma": r.sigma, "tau2": r.tau2,
                 "sign": r.sign, "S0": r.s0}
                for r in recs
            ],
        }
        _write_text(opts["out"], _json_text(payload))


@main.command("trace")
@_step_options
@click.option("--kmin", type=float, default=1.0, show_default=True)
@click.option("--kmax", type=float, default=30.0, show_default=True)
@click.option("--points", type=int, default=2000, show_default=True)
@click.option("--max-length", type=int, default=7, show_default=True)
@click.option("--nu-max", type=int, default=10, show_default=True)
@click.option("--eta", type=float, default=0.0, show_default=True)
@click.option("--domain", type=click.Choice(["energy", "k"]), default="energy",
              show_default=True)
@click.option("--resummed", is_flag=True, default=False,
              help="Close the repetition sum into its geometric form.")
@click.option("--report", type=click.Path(), default=None,
              help="Also write a JSON report with density peaks and the ballistic comb.")
@_common
@click.pass_context
@_guard
def trace_cmd(ctx, **opts):
    """Reconstruct the level density from periodic orbits on a k grid."""
    opts = _apply_config(ctx, opts)
    pot = _potential_from(opts)
    if not isinstance(pot, ScaledStepPotential):
        raise ValueError("trace reconstruction supports the single-step potential only")
    if opts["kmin"] <= 0 or opts["kmax"] <= opts["kmin"]:
        raise ValueError("need 0 < kmin < kmax")
    if opts["points"] < 2:
        raise ValueError(f"points must be >= 2, got {opts['points']!r}")
    recs = _sized_records(pot, opts["max_length"], None)
    k_grid = np.linspace(opts["kmin"], opts["kmax"], opts["points"])
    if opts["resummed"]:
        profile = trace.rho_resummed(pot, recs, k_grid, eta=opts["eta"], domain=opts["domain"])
    else:
        profile = trace.rho_trace(pot, recs, opts["nu_max"], k_grid,
                                  eta=opts["eta"], domain=opts["domain"])
    vals = profile.values
    inner = (vals[1:-1] > vals[:-2]) & (vals[1:-1] >= vals[2:])
    peaks = k_grid[1:-1][inner]
    comb = trace.newtonian_prediction(pot, max(1, int(opts["kmax"] * pot.omega1 / np.pi) + 1))
    comb = comb[(comb >= opts["kmin"]) & (comb <= opts["kmax"])]
    if opts["fmt"] == "csv":
        rows = [[_fmt(k), _fmt(v)] for k, v in zip(k_grid, vals)]
        _write_text(opts["out"], _csv_text("trace", ["k", "rho"], rows))
    else:
        _write_text(opts["out"], _json_text({
            "kind": "trace",
            "k": k_grid.tolist(), "rho": vals.tolist(),
            "truncation": profile.truncation,
        }))
    if opts["report"]:
        nearest = [float(np.min(np.abs(comb - p))) if len(comb) else math.inf for p in peaks]
        _write_text(opts["report"], _json_text({
            "kind": "trace-peaks",
            "density_maxima": peaks.tolist(),
            "newtonian_comb": comb.tolist(),
            "maxima_to_comb_distance": nearest,
        }))


def _read_roots_csv(path: str) -> np.ndarray:
    ks = []
    with open(path, "r", encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if header is None:
                header = parts
                if "k" not in header:
                    raise ValueError(f"roots file {path!r} has no 'k' column")
                idx = header.index("k")
                continue
            ks.append(float(parts[idx]))
    if not ks:
        raise ValueError(f"roots file {path!r} holds no roots")
    return np.asarray(ks)


@main.command("fourier")
@_step_options
@click.option("--roots", "roots_path", type=click.Path(), default=None,
              help="CSV of precomputed roots (any file with a 'k' column).")
@click.option("--kmax", type=float, default=None,
              help="Compute roots up to here when --roots is not given.")
@click.option("--smin", type=float, default=0.2, show_default=True)
@click.option("--smax", type=float, default=10.0, show_default=True)
@click.option("--ds", type=float, default=None,
              help="Action grid step (default pi / (4 k_max)).")
@click.option("--threshold", type=float, default=0.05, show_default=True,
              help="Peak threshold as a fraction of the root count.")
@click.option("--max-length", type=int, default=7, show_default=True,
              help="Orbit code length for the candidate action set.")
@click.option("--report", type=click.Path(), default=None,
              help="Also write the JSON peak-match report here.")
@_common
@click.pass_context
@_guard
def fourier_cmd(ctx, **opts):
    """Transform the level sequence and match |F(s)| peaks to orbit actions."""
    opts = _apply_config(ctx, opts)
    if opts["smin"] <= 0 or opts["smax"] <= opts["smin"]:
        raise ValueError("need 0 < smin < smax")
    pot = build_potential(opts["b"], opts["lam"]) \
        if opts["b"] is not None and opts["lam"] is not None else None
    if opts["roots_path"]:
        roots = _read_roots_csv(opts["roots_path"])
    else:
        if pot is None or opts["kmax"] is None:
            raise ValueError("--roots or (--b, --lambda, --kmax) is required")
        roots = spectrum.find_roots(pot, opts["kmax"], threads=opts["threads"]).roots
    k_top = float(roots.max())
    ds = opts["ds"] if opts["ds"] is not None else analysis.default_s_spacing(k_top)
    s_grid = np.arange(opts["smin"], opts["smax"] + ds, ds)
    profile = analysis.fourier_transform(roots, s_grid)
    peaks = analysis.detect_peaks(profile, opts["threshold"])
    tol = analysis.default_tolerance(k_top)
    report = None
    if pot is not None:
        codes = orbits.enumerate_primitive(opts["max_length"])
        recs = [orbits.orbit_record(c, pot) for c in codes]
        min_s0 = min(r.s0 for r in recs)
        spect = orbits.action_spectrum(recs, int(opts["smax"] / min_s0) + 1, opts["smax"] + tol)
        report = analysis.match_peaks(peaks, [s for s, _ in spect], tol)
    if opts["fmt"] == "csv":
        rows = [[_fmt(s), _fmt(m)] for s, m in zip(profile.s_grid, profile.magnitude)]
        _write_text(opts["out"], _csv_text("fourier", ["s", "absF"], rows))
    else:
        _write_text(opts["out"], _json_text({
            "kind": "fourier",
            "s": profile.s_grid.tolist(), "absF": profile.magnitude.tolist(),
            "j_roots": profile.j_roots, "k_max": profile.k_max,
        }))
    if opts["report"]:
        if report is None:
            raise ValueError("--report needs --b and --lambda for the candidate actions")
        _write_text(opts["report"], _json_text({
            "kind": "fourier-peaks",
            "tolerance": report.tolerance,
            "matched_fraction": report.matched_fraction,
            "worst_residual": report.worst_residual,
            "peaks": [
                {"s": p, "action": (None if math.isnan(a) else a),
                 "residual": (None if math.isinf(rsd) else rsd)}
                for p, a, rsd in report.pairs
            ],
        }))


@main.command("graph-check")
@_step_options
@_chain_options
@click.option("--kmax", type=float, default=100.0, show_default=True)
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--nmax", type=int, default=12, show_default=True)
@click.option("--roots", "n_roots", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@_common
@click.pass_context
@_guard
def graph_check_cmd(ctx, **opts):
    """Verify unitarity, odd-trace vanishing, trace sums and quantization."""
    opts = _apply_config(ctx, opts)
    pot = _potential_from(opts)
    rng = np.random.default_rng(opts["seed"])
    ks = rng.uniform(0.0, opts["kmax"], opts["samples"])
    unit_dev = 0.0
    odd_dev = 0.0
    word_dev = 0.0
    is_step = isinstance(pot, ScaledStepPotential)
    for k in ks:
        S = graph.build_smatrix(pot, k)
        unit_dev = max(unit_dev, float(np.max(np.abs(S.conj().T @ S - np.eye(S.shape[0])))))
        power = np.eye(S.shape[0], dtype=complex)
        traces = []
        for _ in range(2 * opts["nmax"] + 1):
            power = power @ S
            traces.append(complex(np.trace(power)))
        odd_dev = max(odd_dev, max(abs(traces[m]) for m in range(0, len(traces), 2)))
        if is_step:
            for n in range(1, opts["nmax"] + 1):
                word_dev = max(word_dev, abs(traces[2 * n - 1] - graph.orbit_trace_sum(pot, k, n)))
    if is_step:
        result = spectrum.find_roots(pot, (opts["n_roots"] + 1.5) * np.pi / pot.omega1)
    else:
        result = spectrum.nstep_find_roots(pot, (opts["n_roots"] + 1.5) * np.pi / pot.total_length)
    roots = result.roots[:opts["n_roots"]]
    det_dev = float(np.max(np.abs(graph.det_one_minus_s(pot, roots)))) if len(roots) else 0.0
    checks = {
        "unitarity": {"max_deviation": unit_dev, "tolerance": 1e-12},
        "odd_traces": {"max_deviation": odd_dev, "tolerance": 1e-12},
        "det_at_roots": {"max_deviation": det_dev, "tolerance": 1e-8, "roots": len(roots)},
    }
    if is_step:
        checks["trace_word_sums"] = {"max_deviation": word_dev, "tolerance": 1e-10}
    for entry in checks.values():
        entry["ok"] = bool(entry["max_deviation"] < entry["tolerance"])
    _write_text(opts["out"], _json_text({"kind": "graph-check", "checks": checks}))
    if not all(entry["ok"] for entry in checks.values()):
        raise ContractFailure(
            "graph oracle deviations exceed tolerances: "
            + ", ".join(name for name, entry in checks.items() if not entry["ok"])
        )


@main.command("identity")
@click.option("--m", "m_single", type=int, default=None, help="Verify one half-length M.")
@click.option("--max-m", type=int, default=None, help="Verify every M up to here.")
@click.option("--poisson", "poisson_lam", type=float, default=None,
              help="Also check the equal-weight geometry at this lambda.")
@_common
@click.pass_context
@_guard
def identity_cmd(ctx, **opts):
    """Verify the exact cyclic-word sum rules in rational arithmetic."""
    opts = _apply_config(ctx, opts)
    if opts["m_single"] is None and opts["max_m"] is None:
        raise ValueError("one of --m or --max-m is required")
    ms = [opts["m_single"]] if opts["m_single"] is not None else list(range(1, opts["max_m"] + 1))
    failures = []
    records = []
    for m in ms:
        sums = combinatorics.binomial_sums(m)
        coeffs, poly_ok = combinatorics.verify_sum_rule(m)
        row_ok = all(s == math.comb(m, i) for i, s in enumerate(sums))
        ok = poly_ok and row_ok
        if not ok:
            failures.append(m)
        records.append((m, sums, coeffs, ok))
    poisson_report = None
    if opts["poisson_lam"] is not None:
        poisson_report = combinatorics.poisson_special_case_check(opts["poisson_lam"])
        if not poisson_report.ok:
            failures.append("poisson")
    if opts["fmt"] == "json":
        payload = {
            "kind": "identity",
            "results": [
                {"M": m, "beta_sums": [str(s) for s in sums],
                 "polynomial": [str(c) for c in coeffs], "ok": ok}
                for m, sums, coeffs, ok in records
            ],
        }
        if poisson_report is not None:
            payload["poisson"] = {
                "lambda": poisson_report.lam, "b": poisson_report.b,
                "max_root_deviation": poisson_report.max_root_deviation,
                "max_action_deviation": poisson_report.max_action_deviation,
                "ok": poisson_report.ok,
            }
        _write_text(opts["out"], _json_text(payload))
    else:
        lines = []
        for m, sums, coeffs, ok in records:
            lines.append(f"M={m}")
            lines.append("  beta sums: " + ", ".join(str(s) for s in sums))
            lines.append("  binomial : " + ", ".join(str(math.comb(m, i)) for i in range(m + 1)))
            lines.append("  P(x) coefficients: " + ", ".join(str(c) for c in coeffs))
            lines.append(f"  {'PASS' if ok else 'FAIL'}")
        if poisson_report is not None:
            lines.append(
                f"poisson lambda={_fmt(poisson_report.lam)} b={_fmt(poisson_report.b)} "
                f"root_dev={_fmt(poisson_report.max_root_deviation)} "
                f"action_dev={_fmt(poisson_report.max_action_deviation)} "
                f"{'PASS' if poisson_report.ok else 'FAIL'}"
            )
        _write_text(opts["out"], "\n".join(lines) + "\n")
    if failures:
        raise ContractFailure(f"identity verification failed for {failures!r}")


if __name__ == "__main__":
    main()
