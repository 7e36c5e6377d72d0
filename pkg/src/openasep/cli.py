"""
Command-line entry point.

Every subcommand takes its rates from flags, a named preset or a JSON
config file (flags override the config, the config overrides the preset).
Results go to stdout or ``--out`` as JSON or CSV.

Exit codes: 0 success, 1 validation error, 2 identity-check failure,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from math import comb
from typing import List, Optional, Sequence

import jsonschema
import numpy as np

from . import bethe, chiral, generic, gillespie, integrability, observables, presets, steady
from .errors import (
    AsepError,
    ConstraintError,
    DenseLimitError,
    NullSpaceError,
    ParameterError,
    SingularPointError,
)
from .model import (
    DENSE_LIMIT,
    BoundaryRates,
    build_markov_generator,
    constraint_class,
    solve_beta,
    solve_delta,
    theta,
)

SCHEMA_VERSION = "openasep.cli/1"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IDENTITY = 2
EXIT_NUMERICAL = 3

COMMANDS = ("spectrum", "baes", "steady", "observables", "scan", "simulate", "verify")
PRESETS = ("table1", "table2", "table3", "table4", "table5")
FIGURES = ("2-left", "2-right", "3", "4")

_RATE_KEYS = ("alpha", "beta", "gamma", "delta", "q", "n_sites")

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "preset": {"enum": list(PRESETS)},
        "rates": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                **{k: {"type": "number", "minimum": 0} for k in _RATE_KEYS[:4]},
                "q": {"type": "number", "exclusiveMinimum": 0},
                "n_sites": {"type": "integer", "minimum": 2},
            },
        },
        "solve": {
            "type": "object",
            "additionalProperties": False,
            "required": ["parameter", "m"],
            "properties": {
                "parameter": {"enum": ["delta", "beta"]},
                "m": {"type": "number"},
            },
        },
        "m": {"type": "integer", "minimum": 0},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "figure": {"enum": list(FIGURES)},
                "vary": {"enum": ["theta", "delta", "N"]},
                "grid": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            },
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "starts": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "events": {"type": "integer", "minimum": 1},
                "burn_in": {"type": "integer", "minimum": 0},
                "batches": {"type": "integer", "minimum": 10},
                "workers": {"type": "integer", "minimum": 1},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "format": {"enum": ["json", "csv"]},
            },
        },
    },
}


class IdentityFailure(AsepError):
    """An identity check exceeded its tolerance."""


class NumericalFailure(AsepError):
    """A computation finished but did not meet its own acceptance test."""


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("rates")
    g.add_argument("--n", type=int, dest="n_sites", help="number of sites")
    for name in ("q", "alpha", "beta", "gamma", "delta"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--preset", choices=PRESETS)
    g.add_argument("--config", help="JSON run configuration")
    solve = g.add_mutually_exclusive_group()
    solve.add_argument("--solve-delta", nargs="?", type=float, const=-1.0, metavar="M",
                       help="choose delta for constraint class M (default: --m)")
    solve.add_argument("--solve-beta", nargs="?", type=float, const=-1.0, metavar="M",
                       help="choose beta for constraint class M (default: --m)")
    o = common.add_argument_group("output")
    o.add_argument("--out", help="output path (default stdout)")
    o.add_argument("--format", choices=("json", "csv"))
    s = common.add_argument_group("solver")
    s.add_argument("--starts", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--tol", type=float)
    s.add_argument("--workers", type=int)

    parser = argparse.ArgumentParser(prog="openasep", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="exact generator spectrum")
    sub.add_parser("baes", parents=[common], help="Bethe root sets matched to the spectrum")
    p = sub.add_parser("steady", parents=[common], help="exact steady state of a constraint class")
    p.add_argument("--m", type=int)
    p = sub.add_parser("observables", parents=[common], help="current and density profile")
    p.add_argument("--m", type=int)
    p = sub.add_parser("scan", parents=[common], help="parameter scans and figure data")
    p.add_argument("--figure", choices=FIGURES)
    p.add_argument("--vary", choices=("theta", "delta", "N"))
    p.add_argument("--grid", help="comma list or start:stop:count")
    p = sub.add_parser("simulate", parents=[common], help="kinetic Monte Carlo estimates")
    p.add_argument("--events", type=int)
    p.add_argument("--burn-in", type=int, dest="burn_in")
    p.add_argument("--batches", type=int)
    sub.add_parser("verify", parents=[common], help="run the identity suite")
    return parser


def _parse_grid(text: str) -> List[float]:
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return list(np.linspace(float(start), float(stop), int(count)))
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParameterError(f"cannot parse grid {text!r}") from None


def build_config(args: argparse.Namespace) -> dict:
    """Merge preset, config file and flags into one validated run configuration."""
    config: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read config {args.config}: {exc}") from None
        jsonschema.validate(config, CONFIG_SCHEMA)
        if config.get("command", args.command) != args.command:
            raise ParameterError(f"config is for {config['command']!r}, not {args.command!r}")
    config["command"] = args.command
    if args.preset:
        config["preset"] = args.preset
    rates = dict(config.get("rates", {}))
    for key in _RATE_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            rates[key] = value
    config["rates"] = rates
    if getattr(args, "m", None) is not None:
        config["m"] = args.m
    for param in ("delta", "beta"):
        flag = getattr(args, f"solve_{param}")
        if flag is not None:
            m = config.get("m") if flag == -1.0 else flag
            if m is None:
                raise ParameterError(f"--solve-{param} needs a class M (give it or --m)")
            config["solve"] = {"parameter": param, "m": m}
    sweep = dict(config.get("sweep", {}))
    for key in ("figure", "vary"):
        if getattr(args, key, None):
            sweep[key] = getattr(args, key)
    if getattr(args, "grid", None):
        sweep["grid"] = _parse_grid(args.grid)
    if sweep:
        config["sweep"] = sweep
    solver = dict(config.get("solver", {}))
    for key in ("starts", "seed", "tol", "workers", "events", "burn_in", "batches"):
        value = getattr(args, key, None)
        if value is not None:
            solver[key] = value
    config["solver"] = solver
    output = dict(config.get("output", {}))
    if args.out:
        output["path"] = args.out
    if args.format:
        output["format"] = args.format
    config["output"] = output
    jsonschema.validate(config, CONFIG_SCHEMA)
    return config


def resolve_rates(config: dict, required: bool = True) -> Optional[BoundaryRates]:
    """BoundaryRates from preset, explicit rates and the optional solve step."""
    preset = config.get("preset")
    base = presets.table_rates(preset).as_dict() if preset else {}
    base.update(config.get("rates", {}))
    solve = config.get("solve")
    if solve:
        # the solved parameter need not be supplied
        base.setdefault(solve["parameter"], 1.0)
    missing = [k for k in _RATE_KEYS if k not in base]
    if missing:
        if not required:
            return None
        raise ParameterError(f"missing rate parameters: {', '.join(missing)}")
    rates = BoundaryRates(**base)
    if solve:
        fn = solve_delta if solve["parameter"] == "delta" else solve_beta
        rates = fn(rates, solve["m"])
    return rates


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def format_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore",
                            quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(row.get(k)) for k in columns})
    return buf.getvalue()


def _csv_cell(value):
    if isinstance(value, (complex, np.complexfloating)):
        return repr(complex(value)).strip("()")
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def emit(config: dict, record: dict, rows: Optional[Sequence[dict]] = None,
         columns: Optional[Sequence[str]] = None, stream=None) -> None:
    """Write ``record`` as JSON, or ``rows`` as CSV when the format is csv."""
    fmt = config["output"].get("format", "json")
    if fmt == "csv":
        if rows is None:
            raise ParameterError(f"command {config['command']!r} has no CSV form")
        text = format_csv(rows, columns)
    else:
        record = {"schema": SCHEMA_VERSION, "command": config["command"], **record}
        text = json.dumps(_jsonable(record), indent=2) + "\n"
    path = config["output"].get("path")
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)


def _sorted_spectrum(rates: BoundaryRates) -> np.ndarray:
    if rates.n_sites > DENSE_LIMIT:
        raise DenseLimitError(f"N={rates.n_sites} exceeds the dense limit {DENSE_LIMIT}")
    ev = np.linalg.eigvals(build_markov_generator(rates))
    ev = np.where(np.abs(ev.imag) <= 1e-12 * max(1.0, np.abs(ev).max()), ev.real + 0j, ev)
    order = np.lexsort((np.round(ev.imag, 12), np.round(ev.real, 12)))[::-1]
    return ev[order]


def _solver(config: dict, key: str, default):
    return config["solver"].get(key, default)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_spectrum(config: dict) -> int:
    """Eigenvalues sorted by descending real part, then imaginary part."""
    rates = resolve_rates(config)
    ev = _sorted_spectrum(rates)
    rows = [{"index": i, "re": float(z.real), "im": float(z.imag)} for i, z in enumerate(ev)]
    emit(config, {"rates": rates.as_dict(), "eigenvalues": ev}, rows, ("index", "re", "im"))
    return EXIT_OK


def bethe_report(rates: BoundaryRates, starts: int = 10000, seed: int = 0,
                 tol: float = 1e-8) -> dict:
    """Solve every applicable T-Q kind and match the root sets to the exact spectrum."""
    exact = _sorted_spectrum(rates)
    cls = constraint_class(rates)
    sets: List[bethe.BetheRootSet] = []
    if cls is None:
        sets += bethe.solve_baes("I", rates, starts, seed, conjugate_closure=True)
        sets.append(bethe.BetheRootSet("II"))
    else:
        sets += bethe.solve_baes("III", rates, starts, seed, conjugate_closure=True)
        sets += bethe.solve_baes("IV", rates, starts, seed, conjugate_closure=True)
        sets.append(bethe.string_solution(cls.m))
    report = bethe.match_spectrum(sets, exact, rates, tol=tol)
    by_level = {level: (i, err) for level, i, err in report.matched}
    levels = []
    for j, e in enumerate(exact):
        row = {"level": j, "E_exact": complex(e)}
        if j in by_level:
            i, err = by_level[j]
            s = sets[i]
            row.update(kind=s.kind.value, string=s.is_infinite_string, roots=s.roots,
                       E_bethe=complex(report.energies[i]), error=err, residual=s.residual)
        levels.append(row)
    return {
        "rates": rates.as_dict(),
        "constraint_class": None if cls is None else cls.m,
        "levels": levels,
        "summary": report.summary(),
        "root_sets": [s.to_record(rates) for s in sets],
        "complete": report.complete,
    }


def _roots_text(roots) -> str:
    return " ".join(f"{z.real:.4f}{z.imag:+.4f}i" for z in roots)


def cmd_baes(config: dict) -> int:
    rates = resolve_rates(config)
    rep = bethe_report(rates, _solver(config, "starts", 10000), _solver(config, "seed", 0),
                       _solver(config, "tol", 1e-8))
    rows = []
    for lv in rep["levels"]:
        e = lv["E_exact"]
        rows.append({
            "level": lv["level"], "E_re": e.real, "E_im": e.imag,
            "kind": lv.get("kind", ""),
            "roots": "string" if lv.get("string") else _roots_text(lv.get("roots", [])),
            "error": lv.get("error", ""), "residual": lv.get("residual", ""),
        })
    emit(config, rep, rows, ("level", "E_re", "E_im", "kind", "roots", "error", "residual"))
    if not rep["complete"]:
        raise NumericalFailure(f"{rep['summary']['unmatched_levels']} levels have no root set")
    return EXIT_OK


def _class_of(config: dict, rates: BoundaryRates) -> int:
    m = config.get("m")
    if m is None and config.get("solve"):
        m = config["solve"]["m"]
    if m is None:
        cls = constraint_class(rates)
        if cls is None:
            raise ConstraintError("rates satisfy no constraint class; pass --m with --solve-delta")
        m = cls.m
    if m != int(m):
        raise ParameterError(f"class M must be an integer, got {m}")
    return int(m)


def _closed_forms(rates: BoundaryRates, m: int) -> dict:
    out = {}
    if m == 0:
        out["current"] = 0.0
        out["density"] = observables.density_m0(rates)
    elif m == 1:
        out["current"] = observables.current_m1(rates)
        out["density"] = observables.density_m1(rates)
    elif m == 2:
        out["current"] = observables.current_m2(rates)
    return out


def cmd_steady(config: dict) -> int:
    rates = resolve_rates(config)
    m = _class_of(config, rates)
    vec = steady.steady_state(rates, m, normalize=True)
    null = float(np.linalg.norm(build_markov_generator(rates) @ vec) / np.linalg.norm(vec))
    obs = observables.observables(vec, rates)
    record = {"rates": rates.as_dict(), "m": m, "null_residual": null,
              "current": obs.current, "density": obs.density,
              "closed_form": _closed_forms(rates, m),
              "state": steady.state_table(vec, rates.n_sites)}
    emit(config, record, record["state"], list(record["state"][0]))
    if null > 1e-10:
        raise NumericalFailure(f"steady state residual {null:.2e} exceeds 1e-10")
    return EXIT_OK


def cmd_observables(config: dict) -> int:
    rates = resolve_rates(config)
    vec = generic.numeric_steady_state(rates)
    obs = observables.observables(vec, rates)
    record = {"rates": rates.as_dict(), "current": obs.current, "density": obs.density,
              "bond_currents": observables.bond_currents(vec, rates)}
    cls = constraint_class(rates)
    if config.get("m") is not None or cls is not None:
        m = _class_of(config, rates)
        record["m"] = m
        record["closed_form"] = _closed_forms(rates, m)
    rows = [{"site": k + 1, "density": float(d)} for k, d in enumerate(obs.density)]
    emit(config, record, rows, ("site", "density"))
    return EXIT_OK


CURRENT_COLUMNS = ("vary_value", "theta", "current")
DENSITY_COLUMNS = ("theta", "site", "density")


def _omega_columns(n: int):
    return ("delta", "theta", *(f"omega_{k}" for k in range(n + 1)), "residual")


def figure_rows(figure: str, workers: int = 1):
    """(rows, columns, extra) for a figure preset; series are labelled by a leading q column."""
    if figure == "2-left":
        rows = []
        for t in presets.fig2_left_templates():
            grid = presets.fig2_left_thetas(t.n_sites)
            rows += [{"q": t.q, **r} for r in generic.scan_current(t, "theta", grid, workers)]
        return rows, ("q",) + CURRENT_COLUMNS
    if figure == "2-right":
        t = presets.FIG2_RIGHT
        rows = [{"q": t.q, **r} for r in generic.scan_current(t, "N", presets.FIG2_RIGHT_SIZES, workers)]
        return rows, ("q",) + CURRENT_COLUMNS
    if figure == "3":
        rows = []
        for t in presets.fig3_templates():
            rows += [{"q": t.q, **r} for r in generic.scan_density(t, presets.fig3_thetas(t.n_sites), workers)]
        return rows, ("q",) + DENSITY_COLUMNS
    if figure == "4":
        t = presets.FIG4
        deltas = sorted(set(presets.fig4_deltas()) | set(presets.fig4_integer_deltas()))
        return generic.scan_omega(t, deltas, workers), _omega_columns(t.n_sites)
    raise ParameterError(f"unknown figure {figure!r}")


def cmd_scan(config: dict) -> int:
    sweep = config.get("sweep", {})
    workers = _solver(config, "workers", 1)
    if "figure" in sweep:
        rows, columns = figure_rows(sweep["figure"], workers)
    else:
        vary = sweep.get("vary")
        grid = sweep.get("grid")
        if not vary or not grid:
            raise ParameterError("scan needs --figure, or --vary with --grid")
        template = resolve_rates(_with_swept_default(config, vary))
        rows = generic.scan_current(template, vary, grid, workers)
        columns = CURRENT_COLUMNS
    if "current" in columns:
        agree = generic.sign_agreement(rows)
        extra = {"sign_agreement": agree}
    else:
        agree, extra = True, {}
    config["output"].setdefault("format", "csv")
    emit(config, {"rows": rows, **extra}, rows, columns)
    if not agree:
        raise IdentityFailure("current sign disagrees with sign(q^theta - 1)")
    return EXIT_OK


def _with_swept_default(config: dict, vary: str) -> dict:
    # the swept parameter is overwritten at every grid point
    key = "n_sites" if vary == "N" else "delta"
    cfg = dict(config)
    cfg["rates"] = {key: 2 if key == "n_sites" else 1.0, **config.get("rates", {})}
    return cfg


def cmd_simulate(config: dict) -> int:
    rates = resolve_rates(config)
    sim = gillespie.SimConfig(rates, _solver(config, "events", 10 ** 7),
                              _solver(config, "burn_in", None), _solver(config, "seed", 0),
                              _solver(config, "batches", 20))
    est = gillespie.simulate(sim)
    record = {"rates": rates.as_dict(), **est.as_dict()}
    rows = [{"site": k + 1, "density": d, "stderr": e}
            for k, (d, e) in enumerate(zip(est.density_mean, est.density_stderr))]
    emit(config, record, rows, ("site", "density", "stderr"))
    return EXIT_OK


def identity_suite(rates: BoundaryRates, seed: int = 0, points: int = 100) -> dict:
    """Residuals of the integrability and steady-state identities at ``rates``.

    Returns a mapping name -> (value, tolerance). Random spectral points are
    drawn from a seeded generator on an annulus around the unit circle.
    """
    rng = np.random.default_rng(seed)

    def draw(k):
        return np.exp(rng.uniform(-0.5, 0.5, k) + 1j * rng.uniform(-np.pi, np.pi, k))

    checks = {}
    if rates.n_sites > integrability.TRANSFER_LIMIT:
        raise DenseLimitError(f"N={rates.n_sites} exceeds the transfer-matrix limit")
    ybe = max(integrability.ybe_residual(*draw(3), rates.q) for _ in range(points))
    checks["ybe"] = (ybe, 1e-11)
    re_vals = [integrability.re_residual(x, y, rates) for x, y in draw(2 * points).reshape(-1, 2)]
    checks["reflection"] = (max(v[0] for v in re_vals), 1e-11)
    checks["dual_reflection"] = (max(v[1] for v in re_vals), 1e-11)
    if rates.n_sites <= 6:
        com = max(integrability.commutator_residual(*draw(2), rates) for _ in range(5))
        checks["transfer_commutator"] = (com, 1e-9)
        gcom = max(integrability.generator_commutator_residual(draw(1)[0], rates) for _ in range(3))
        checks["generator_commutator"] = (gcom, 1e-9)
    gen = build_markov_generator(rates)
    scale = np.linalg.norm(gen)
    for method, tol in (("analytic", 1e-8), ("fd", 1e-6)):
        rec = integrability.markov_from_transfer(rates, method)
        checks[f"generator_from_transfer_{method}"] = (float(np.linalg.norm(rec - gen) / scale), tol)
    if min(rates.alpha, rates.gamma) > 0:
        local = chiral.verify_local_relations(rates, draw(10))
        checks["local_relations"] = (local["max"], 1e-10)
    cls = constraint_class(rates)
    if cls is not None:
        m = cls.m
        fam = chiral.invariant_family(rates, m)
        checks["invariant_subspace"] = (chiral.check_invariant_subspace(fam, gen), 1e-10)
        expected = sum(comb(rates.n_sites, k) for k in range(m + 1))
        checks["chiral_rank"] = (float(abs(chiral.numerical_rank(fam) - expected)), 0.5)
        if min(rates.alpha, rates.beta, rates.gamma, rates.delta) > 0:
            vec = steady.steady_state(rates, m)
            checks["steady_null"] = (float(np.linalg.norm(gen @ vec) / np.linalg.norm(vec)), 1e-10)
            if m == 1:
                checks["single_kink_recursion"] = (steady.verify_m1_recursion(rates)["max"], 1e-10)
    return checks


def cmd_verify(config: dict) -> int:
    rates = resolve_rates(config)
    checks = identity_suite(rates, _solver(config, "seed", 0))
    rows = [{"check": name, "value": v, "tolerance": tol, "pass": bool(v <= tol)}
            for name, (v, tol) in checks.items()]
    ok = all(r["pass"] for r in rows)
    emit(config, {"rates": rates.as_dict(), "theta": _theta_or_none(rates), "checks": rows,
                  "all_pass": ok}, rows, ("check", "value", "tolerance", "pass"))
    if not ok:
        failed = ", ".join(r["check"] for r in rows if not r["pass"])
        raise IdentityFailure(f"identity checks failed: {failed}")
    return EXIT_OK


def _theta_or_none(rates: BoundaryRates):
    try:
        return theta(rates)
    except ParameterError:
        return None


HANDLERS = {
    "spectrum": cmd_spectrum,
    "baes": cmd_baes,
    "steady": cmd_steady,
    "observables": cmd_observables,
    "scan": cmd_scan,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = build_config(args)
        return HANDLERS[config["command"]](config)
    except (jsonschema.ValidationError, ParameterError, ConstraintError) as exc:
        code, exc_msg = EXIT_VALIDATION, getattr(exc, "message", str(exc))
    except IdentityFailure as exc:
        code, exc_msg = EXIT_IDENTITY, str(exc)
    except (NumericalFailure, NullSpaceError, SingularPointError,
            np.linalg.LinAlgError, FloatingPointError) as exc:
        code, exc_msg = EXIT_NUMERICAL, str(exc)
    print(f"openasep {args.command}: error: {exc_msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
