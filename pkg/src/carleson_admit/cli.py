"""Command-line front end: ``carleson-admit <command> --input FILE [options]``.

Inputs are JSON documents holding either a measure (``{"atoms": [...]}``) or
a diagonal system (``{"q": ..., "modes": [...]}``, optionally with an
``"input"`` signal).  Each run emits one JSON report, or a CSV table for the
commands that produce one.

Exit codes: 0 success, 1 I/O or schema error, 2 domain error (the offending
field is named), 3 unbounded norm.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .admissibility import (
    DiagonalSystem,
    auto_shift,
    decide_finite_time_admissible,
    decide_linf_admissible,
    decide_phi_exp_admissible,
    input_to_state,
    propequiv_crosscheck,
    shift_generator,
    theta_norm_estimate,
    to_measure,
    witness_details,
    zero_class_report,
)
from .embedding import (
    KAPPA_CARLESON,
    embedding_estimate,
    exp_orlicz_embedding_check,
    finite_time_check,
    hausdorff_young_constant,
    strip_embedding_check,
)
from .errors import DomainError, UnboundedNormError
from .measure import DiscreteMeasure, best_square, intensity_table
from .orlicz import KAPPA_HOLDER, LINF, ExpYoung
from .serialize import dumps, emit_strip_csv, rows_to_csv, validate, write_atomic
from .signals import InputSignal, zero_signal

__all__ = ["RunSpec", "InputError", "run", "render", "main", "build_parser", "COMMANDS"]

COMMANDS = (
    "intensity",
    "embed-check",
    "finite-time",
    "exp-orlicz",
    "admissible",
    "witness-phi",
    "theta",
    "crosscheck",
    "zero-class",
)

_CSV_COMMANDS = ("intensity", "admissible", "finite-time", "exp-orlicz", "witness-phi", "zero-class")


class InputError(Exception):
    """Unreadable input, malformed JSON or a schema violation (exit code 1)."""


@dataclass
class RunSpec:
    command: str
    input_path: str = None
    params: dict = field(default_factory=dict)
    output_path: str = None
    format: str = "json"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}", "command")
        if self.format not in ("json", "csv"):
            raise DomainError(f"unknown format {self.format!r}", "format")
        if self.format == "csv" and self.command not in _CSV_COMMANDS:
            raise DomainError(f"{self.command} has no tabular output", "format")
        budget = self.params.get("budget") or 0
        if budget < 0:
            raise DomainError("budget must be non-negative", "budget")
        if budget > 0 and self.params.get("seed") is None:
            raise DomainError("a seed is required when budget > 0", "seed")
        if self.input_path is None:
            raise DomainError("an input file is required", "input")

    def to_dict(self):
        return {
            "command": self.command,
            "input_path": self.input_path,
            "params": {k: v for k, v in sorted(self.params.items()) if v is not None},
            "output_path": self.output_path,
            "format": self.format,
        }


# --- input --------------------------------------------------------------------------


def _cplx(v):
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def load_document(path):
    """Read and schema-check an input file; returns ``("measure" | "system", doc)``."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if isinstance(doc, list):
        doc = {"atoms": doc}
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object or an array of atoms")
    kind = "measure" if "atoms" in doc else "system"
    import jsonschema

    try:
        validate(doc, kind)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"{path}: {kind} schema violation at {where}: {exc.message}") from exc
    return kind, doc


def _system(doc):
    lam = [_cplx(m["lambda"]) for m in doc["modes"]]
    b = [_cplx(m["b"]) for m in doc["modes"]]
    return DiagonalSystem(doc["q"], lam, b, doc.get("stability_class"))


def _measure(kind, doc, exponent=None):
    if kind == "measure":
        return DiscreteMeasure.from_list(doc["atoms"])
    return to_measure(_system(doc), exponent)


def _need_system(kind, command):
    if kind != "system":
        raise DomainError(f"{command} needs a system document with modes", "input")


def _q(params, kind, doc):
    q = params.get("q")
    if q is None:
        if kind == "system":
            return float(doc["q"])
        raise DomainError("q is required for a measure input", "q")
    return float(q)


def _constants(params):
    """Overrides in the keyword form of the upper-bound routines."""
    return {
        "kappa_carleson": params.get("kappa_carleson"),
        "hausdorff_young": params.get("hausdorff_young"),
        "kappa_holder": params.get("kappa_holder"),
    }


# --- commands -----------------------------------------------------------------------


def _cmd_intensity(kind, doc, params, warnings):
    alpha = params.get("alpha")
    if alpha is None:
        if kind != "system":
            raise DomainError("alpha is required for the intensity command", "alpha")
        alpha = float(doc["q"])
    mu = _measure(kind, doc)
    best = best_square(mu, alpha)
    table = intensity_table(mu, alpha)
    results = {
        "alpha": float(alpha),
        "atoms": len(mu),
        "intensity": best.value,
        "maximiser": {"center": best.center, "length": best.length, "mass": best.mass},
        "per_strip": table.to_dict()["strips"],
        "strip_sum": table.strip_sum,
    }
    return results, {}, table


def _cmd_embed_check(kind, doc, params, warnings):
    q = _q(params, kind, doc)
    p = params.get("p")
    mu = _measure(kind, doc, q if kind == "system" else None)
    if p is not None and p != math.inf:
        est = strip_embedding_check(mu, p, q)
        results = {
            "q": q,
            "p": p,
            "exponent": est.metadata["exponent"],
            "functional_value": est.functional_value,
            "strip": est.metadata["strip"] if mu else None,
            "strip_ratio": est.metadata["strip_ratio"],
        }
        return results, {}, None
    est = embedding_estimate(
        mu, q, LINF, params.get("budget") or 0, params.get("seed"), **_constants(params)
    )
    results = est.to_dict()
    results.pop("constants_used")
    results["p"] = "inf"
    return results, est.constants_used, None


def _cmd_finite_time(kind, doc, params, warnings):
    tau0 = params.get("tau0")
    if tau0 is None:
        raise DomainError("tau0 is required for the finite-time command", "tau0")
    if kind == "system":
        sys_ = _system(doc)
        if params.get("q") is not None and float(params["q"]) != sys_.q:
            raise DomainError("q conflicts with the system exponent", "q")
        rep = decide_finite_time_admissible(sys_, tau0, auto=bool(params.get("auto_shift")))
        if rep.shift_applied:
            warnings.append(f"auto-shift applied: spectrum moved left by {rep.shift_applied!r}")
        results = rep.to_dict()
        return results, {}, rep.per_strip
    mu = _measure(kind, doc)
    q = _q(params, kind, doc)
    est = finite_time_check(mu, q, tau0)
    results = {"q": q, "tau0": tau0, "functional_value": est.functional_value, **est.metadata}
    return results, {}, intensity_table(mu, q)


def _cmd_exp_orlicz(kind, doc, params, warnings):
    alpha = params.get("alpha")
    alpha = 1.0 if alpha is None else float(alpha)
    if kind == "system":
        sys_ = _system(doc)
        if alpha == 1.0:
            rep = decide_phi_exp_admissible(sys_)
            shift, results = rep.shift_applied, rep.to_dict()
            table = rep.per_strip
        else:
            shift = auto_shift(sys_)
            mu = to_measure(shift_generator(sys_, shift), exponent=2.0)
            est = exp_orlicz_embedding_check(mu, alpha)
            results = {"functional_value": est.functional_value, "shift_applied": shift, **est.metadata}
            table = intensity_table(mu, 2.0)
        if shift:
            warnings.append(f"auto-shift applied: spectrum moved left by {shift!r}")
        return results, {}, table
    mu = _measure(kind, doc)
    est = exp_orlicz_embedding_check(mu, alpha)
    results = {"functional_value": est.functional_value, **est.metadata}
    return results, {}, intensity_table(mu, 2.0)


def _cmd_admissible(kind, doc, params, warnings):
    _need_system(kind, "admissible")
    sys_ = _system(doc)
    rep = decide_linf_admissible(sys_)
    return rep.to_dict(), {}, rep.per_strip


def _phi_table(phi, q):
    qp = q / (q - 1.0)
    ts = [math.ldexp(1.0, k) for k in range(-6, 7)]
    return [[t, float(phi(t)), t**qp] for t in ts]


def _cmd_witness_phi(kind, doc, params, warnings):
    _need_system(kind, "witness-phi")
    sys_ = _system(doc)
    if sys_.q <= 1:
        raise DomainError("the witness needs q > 1", "q")
    w = witness_details(sys_)
    results = w.to_dict()
    results["q"] = sys_.q
    results["tabulation"] = _phi_table(w.phi, sys_.q)
    return results, {}, w


def _cmd_theta(kind, doc, params, warnings):
    _need_system(kind, "theta")
    sys_ = _system(doc)
    u = InputSignal.from_dict(doc["input"]) if "input" in doc else zero_signal()
    if "input" not in doc:
        warnings.append("no input signal given; using u = 0")
    t0 = params.get("tau0")
    t0 = math.inf if t0 is None else float(t0)
    state = input_to_state(sys_, u, t0)
    results = {
        "t0": "inf" if t0 == math.inf else t0,
        "state": [[z.real, z.imag] for z in state.x],
        "state_norm": state.norm,
    }
    if params.get("budget") is not None or sys_.strongly_stable or t0 != math.inf:
        results["operator_norm_lower"] = theta_norm_estimate(
            sys_, LINF, t0, params.get("budget") or 0, params.get("seed")
        )
    return results, {}, None


def _cmd_crosscheck(kind, doc, params, warnings):
    _need_system(kind, "crosscheck")
    sys_ = _system(doc)
    horizons = params.get("tau_grid") or ()
    inputs = [InputSignal.from_dict(doc["input"])] if "input" in doc else None
    res = propequiv_crosscheck(
        sys_, LINF, params.get("budget") or 0, params.get("seed"), inputs, horizons
    )
    return res.to_dict(), {}, None


def _cmd_zero_class(kind, doc, params, warnings):
    _need_system(kind, "zero-class")
    sys_ = _system(doc)
    taus = params.get("tau_grid") or (1.0, 1e-1, 1e-2, 1e-3, 1e-4)
    tau0 = params.get("tau0")
    tau0 = max(taus) if tau0 is None else float(tau0)
    phi = None
    if params.get("phi") == "exp":
        if sys_.q != 2:
            raise DomainError("the Phi_exp witness is only available for q = 2", "phi")
        phi = ExpYoung()
    rep = zero_class_report(sys_, phi, taus, tau0, **_constants(params))
    results = rep.to_dict()
    constants = results["metadata"].pop("constants")
    return results, constants, rep


_HANDLERS = {
    "intensity": _cmd_intensity,
    "embed-check": _cmd_embed_check,
    "finite-time": _cmd_finite_time,
    "exp-orlicz": _cmd_exp_orlicz,
    "admissible": _cmd_admissible,
    "witness-phi": _cmd_witness_phi,
    "theta": _cmd_theta,
    "crosscheck": _cmd_crosscheck,
    "zero-class": _cmd_zero_class,
}


def _default_constants(params, q):
    kc = params.get("kappa_carleson")
    hy = params.get("hausdorff_young")
    kh = params.get("kappa_holder")
    return {
        "kappa_carleson": KAPPA_CARLESON if kc is None else float(kc),
        "hausdorff_young": (hausdorff_young_constant(q) if q and q >= 2 else None) if hy is None else float(hy),
        "kappa_holder": KAPPA_HOLDER if kh is None else float(kh),
    }


def run(spec):
    """Execute ``spec``; returns ``(report, table)`` where ``table`` feeds CSV output."""
    kind, doc = load_document(spec.input_path)
    params = dict(spec.params)
    warnings = []
    results, constants, table = _HANDLERS[spec.command](kind, doc, params, warnings)
    q = params.get("q") or (doc.get("q") if kind == "system" else None)
    used = _default_constants(params, q)
    used.update(constants)
    report = {
        "command": spec.command,
        "spec": spec.to_dict(),
        "results": results,
        "constants_used": used,
        "warnings": warnings,
        "version": __version__,
    }
    return report, table


def render(spec, report, table):
    """Report text in the requested format; JSON output is schema-checked."""
    if spec.format == "csv":
        return _render_csv(spec, report, table)
    warnings = list(report["warnings"])
    text = dumps(report, warnings=warnings)
    if warnings != report["warnings"]:
        report = dict(report, warnings=warnings)
        text = dumps(report)
    validate(json.loads(text), "report")
    return text


def _render_csv(spec, report, table):
    res = report["results"]
    if spec.command == "zero-class":
        return rows_to_csv(["tau", "bound"], [[t, v] for t, v in table.zero_class_curve])
    if spec.command == "witness-phi":
        return rows_to_csv(["t", "phi", "t_qprime"], res["tabulation"])
    if spec.command == "exp-orlicz":
        alpha = spec.params.get("alpha") or 1.0
        entries = {n: c for n, c in table if n >= 1}
        if alpha == 1.0:
            return emit_strip_csv(entries, "n_squared")
        return emit_strip_csv(entries, "n_pow", alpha)
    weights = spec.params.get("weights") or "unit"
    if spec.command == "finite-time" and "M" in res.get("metadata", res):
        M = res.get("metadata", res)["M"]
        return emit_strip_csv({n: c for n, c in table if n >= -M}, weights, spec.params.get("alpha"))
    return emit_strip_csv(table, weights, spec.params.get("alpha"))


# --- argument parsing ---------------------------------------------------------------


def _float_list(text):
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from exc


def _add_common(cmd):
    cmd.add_argument("--input", "-i", required=True, help="measure or system JSON file")
    cmd.add_argument("--output", "-o", default=None, help="report path (default: stdout)")
    cmd.add_argument("--format", choices=["json", "csv"], default="json")
    cmd.add_argument("--q", type=float, default=None, help="intensity exponent / state space l^q")
    cmd.add_argument("--p", type=float, default=None, help="input space L^p (default inf)")
    cmd.add_argument("--alpha", type=float, default=None)
    cmd.add_argument("--tau0", type=float, default=None, help="time horizon")
    cmd.add_argument("--tau-grid", type=_float_list, default=None, help="comma-separated horizons")
    cmd.add_argument("--budget", type=int, default=None, help="number of random trial signals")
    cmd.add_argument("--seed", type=int, default=None)
    cmd.add_argument("--weights", choices=["unit", "n_squared", "n_pow"], default=None)
    cmd.add_argument("--phi", choices=["witness", "exp"], default=None, help="zero-class Young function")
    cmd.add_argument("--kappa-carleson", type=float, default=None)
    cmd.add_argument("--kappa-holder", type=float, default=None)
    cmd.add_argument("--hausdorff-young", type=float, default=None)
    cmd.add_argument("--auto-shift", action="store_true", help="shift unstable spectra left")


_HELP = {
    "intensity": "alpha-Carleson intensity and per-strip table",
    "embed-check": "Laplace-Carleson embedding bounds",
    "finite-time": "finite-horizon L^inf admissibility functional",
    "exp-orlicz": "exponential-Orlicz admissibility functional",
    "admissible": "infinite-time L^inf admissibility functional",
    "witness-phi": "construct and verify a witness Young function",
    "theta": "apply the input-to-state map to the system's input",
    "crosscheck": "compare ||Theta u|| with ||L u||_{L^q(mu)}",
    "zero-class": "zero-class bound curve tau -> bound",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="carleson-admit",
        description="Carleson intensities, Laplace-Carleson embeddings and admissibility checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_common(sub.add_parser(name, help=_HELP[name]))
    return parser


def spec_from_args(args):
    params = {
        "q": args.q,
        "p": args.p,
        "alpha": args.alpha,
        "tau0": args.tau0,
        "tau_grid": args.tau_grid,
        "budget": args.budget,
        "seed": args.seed,
        "weights": args.weights,
        "phi": args.phi,
        "kappa_carleson": args.kappa_carleson,
        "kappa_holder": args.kappa_holder,
        "hausdorff_young": args.hausdorff_young,
        "auto_shift": True if args.auto_shift else None,
    }
    if params["p"] is not None and math.isinf(params["p"]):
        params["p"] = None
    return RunSpec(args.command, args.input, params, args.output, args.format)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
        report, table = run(spec)
        text = render(spec, report, table)
        if spec.output_path:
            write_atomic(spec.output_path, text)
        else:
            sys.stdout.write(text)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"domain error [{exc.field}]: {exc}", file=sys.stderr)
        return 2
    except UnboundedNormError as exc:
        print(f"unbounded norm: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
