"""Command-line front end: ``algclt <command> [flags]``.

Results go to stdout as JSON (default) or CSV. Exact values are rendered as
rational strings next to float approximations. Exit codes: 0 success, 1 input
error, 2 evaluation error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import clt, fock, opvalued, verification
from .moments import Kind, MissingMomentError, SiteDistribution
from .scalars import GaussianRational, QPoly, RootNScaled, approx, format_exact, parse_scalar

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

SCHEMA_VERSION = 1
KINDS = ("tensor", "free", "boolean", "monotone", "q", "opvalued-boolean")


class InputError(Exception):
    def __init__(self, message: str, field: str | None = None, position: dict | None = None):
        super().__init__(message)
        self.field = field
        self.position = position


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _exact_str(x) -> str:
    if isinstance(x, RootNScaled):
        return "0" if x.coeff == 0 else str(x)
    if isinstance(x, QPoly):
        return str(x)
    if isinstance(x, np.ndarray):
        return [[_exact_str(v) for v in row] for row in x]
    if isinstance(x, float):
        return repr(x)
    return format_exact(x)


def _approx(x):
    if isinstance(x, RootNScaled):
        return float(x)
    if isinstance(x, np.ndarray):
        return [[_approx(v) for v in row] for row in x]
    if isinstance(x, float):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)):
        return approx(x)
    return None


def number(x) -> dict:
    return {"exact": _exact_str(x), "approx": _approx(x)}


# -- config ------------------------------------------------------------------


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", "file") from None
    except tomllib.TOMLDecodeError as exc:
        pos = {"line": exc.lineno, "column": exc.colno} if getattr(exc, "lineno", None) else None
        raise InputError(f"{path}: {exc}", "file", pos) from None


def _scalar_field(value, field: str):
    if isinstance(value, float):
        raise InputError("exact values must be strings like \"1/3\", not floats", field)
    try:
        return parse_scalar(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InputError(f"not an exact rational: {value!r}", field) from None


def distribution_from_table(table: dict, where: str = "distribution") -> SiteDistribution:
    """Build a site distribution from a parsed TOML table.

    Either ``power_moments = ["m1", "m2", ...]`` (with optional ``label``) for
    a single self-adjoint label, or ``[moments]`` keyed by space-separated
    label-words, with an optional ``adjoint`` table.
    """
    if "power_moments" in table:
        label = table.get("label", "b")
        ms = [
            _scalar_field(v, f"{where}.power_moments[{k}]")
            for k, v in enumerate(table["power_moments"])
        ]
        return SiteDistribution.single_label(ms, label)
    if "moments" not in table:
        raise InputError("expected 'power_moments' or a [moments] table", where)
    moments = {}
    for key, v in table["moments"].items():
        moments[tuple(key.split())] = _scalar_field(v, f"{where}.moments.{key!r}")
    adjoint = table.get("adjoint", {})
    try:
        d = SiteDistribution(moments, adjoint=adjoint, labels=table.get("labels"))
    except ValueError as exc:
        raise InputError(str(exc), f"{where}.adjoint") from None
    return d


def _blocks_from_table(label: str, t: dict, where: str) -> opvalued.ObservableBlocks:
    def mat(name):
        if name not in t:
            raise InputError(f"missing block {name!r}", f"{where}.{name}")
        rows = t[name]
        return np.array(
            [[_scalar_field(v, f"{where}.{name}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)],
            dtype=object,
        )

    try:
        return opvalued.ObservableBlocks(label, mat("alpha"), mat("beta"), mat("gamma"), mat("delta"))
    except opvalued.DimensionMismatch as exc:
        raise InputError(str(exc), where) from None


def _resolve(args) -> dict:
    """Merge the optional ``--config`` file with command-line flags (flags win)."""
    cfg = _load_toml(args.config) if getattr(args, "config", None) else {}
    out = {
        "kind": cfg.get("kind"),
        "degrees": cfg.get("degrees"),
        "N_values": cfg.get("N_values"),
        "labels": cfg.get("labels"),
        "fock": cfg.get("fock", {}),
        "qccr": cfg.get("qccr", {}),
        "opvalued": cfg.get("opvalued", {}),
        "distribution": cfg.get("distribution"),
    }
    for flag, key in (("kind", "kind"), ("n", "degrees"), ("N", "N_values"), ("labels", "labels")):
        v = getattr(args, flag, None)
        if v is not None:
            out[key] = v
    if getattr(args, "dist", None):
        t = _load_toml(args.dist)
        out["distribution"] = t.get("distribution", t)
    if out["kind"] is not None and out["kind"] not in KINDS:
        raise InputError(f"unknown kind {out['kind']!r}; choose from {', '.join(KINDS)}", "kind")
    return out


def _dist(prob) -> SiteDistribution:
    if prob["distribution"] is None:
        return SiteDistribution.symmetric_bernoulli()
    return distribution_from_table(prob["distribution"])


def _problems(prob, dist):
    kind = prob["kind"] or "tensor"
    if prob["labels"]:
        yield clt.CltProblem(kind, dist, prob["labels"])
        return
    degrees = prob["degrees"] or [2, 4, 6]
    label = dist.labels[0]
    for n in degrees:
        if n < 1:
            raise InputError(f"degree must be positive, got {n}", "degrees")
        yield clt.CltProblem(kind, dist, [label] * n)


# -- commands -----------------------------------------------------------------


def cmd_limit(args, prob):
    kind = prob["kind"] or "tensor"
    if kind == "q":
        return cmd_qlimit(args, prob)
    if kind == "opvalued-boolean":
        return cmd_opvalued(args, prob)
    dist = _dist(prob)
    rows = []
    for p in _problems(prob, dist):
        rows.append({"n": p.n, "labels": list(p.labels), "N": "limit", **number(clt.limit_moment(p))})
    return {"kind": kind}, rows


def cmd_finite_n(args, prob):
    kind = prob["kind"] or "tensor"
    if kind not in [k.value for k in Kind]:
        raise InputError(f"finite-n needs one of tensor/free/boolean/monotone, got {kind!r}", "kind")
    dist = _dist(prob)
    Ns = prob["N_values"] or [1, 2, 4, 8]
    if any(N < 1 for N in Ns):
        raise InputError("N values must be positive", "N_values")
    rows = []
    for p in _problems(prob, dist):
        table = clt.convergence_table(p, sorted(Ns), jobs=args.jobs)
        for r in table.rows:
            row = {"n": r.n, "labels": list(p.labels), "N": r.N, **number(r.exact)}
            if r.N != "limit":
                e = number(r.error)
                row["error_exact"], row["error_approx"] = e["exact"], e["approx"]
            rows.append(row)
    return {"kind": kind, "N_values": sorted(Ns)}, rows


def cmd_qlimit(args, prob):
    degrees = prob["degrees"] or [2, 4, 6]
    q = _scalar_field(args.q, "q") if args.q is not None else None
    rows = []
    for n in degrees:
        poly = clt.q_limit_moment(n)
        row = {"n": n, "N": "limit", "exact": str(poly), "approx": None,
               "coefficients": [int(c) for c in poly.coeffs]}
        if q is not None:
            row.update({"q": format_exact(q), "value": number(poly(q))})
        rows.append(row)
    return {"kind": "q", "q": None if q is None else format_exact(q)}, rows


def cmd_fock(args, prob):
    fcfg = prob["fock"]
    flavor = args.flavor or fcfg.get("flavor", "full")
    try:
        flavor = fock.Flavor(flavor)
    except ValueError:
        raise InputError(f"unknown Fock flavor {flavor!r}", "fock.flavor") from None
    qv = args.q if args.q is not None else fcfg.get("q")
    q = _scalar_field(qv, "q") if qv is not None else None
    ls = fock.LadderSpec(flavor, q)
    rows = []
    for n in prob["degrees"] or [2, 4, 6]:
        v = fock.vacuum_moment(ls, n)
        row = {"n": n, "N": "limit", **number(v)}
        if isinstance(v, QPoly):
            row["coefficients"] = [int(c) for c in v.coeffs]
        elif not (flavor is fock.Flavor.QFOCK and q is None):
            row["matrix_approx"] = fock.vacuum_moment_matrix(ls, n)
        rows.append(row)
    return {"flavor": flavor.value, "q": None if q is None else format_exact(q)}, rows


def cmd_qccr(args, prob):
    cfg = prob["qccr"]
    q = args.q if args.q is not None else cfg.get("q", "1/2")
    depth = args.depth or cfg.get("depth", 32)
    k_max = args.k_max if args.k_max is not None else cfg.get("k_max", 6)
    qf = _scalar_field(q, "qccr.q")
    try:
        m = fock.qccr_build(qf, depth)
        pairs = fock.qccr_projections(m, k_max)
    except ValueError as exc:
        raise InputError(str(exc), "qccr") from None
    rel = fock.qccr_check_relations(m)
    pr = fock.projection_report(m, pairs)
    neu = fock.qccr_projections(m, k_max, method="neumann")
    rec = fock.qccr_reconstruct_gamma(m, pairs, k_max)
    agree = max(float(np.abs(a[0] - b[0]).max()) for a, b in zip(pairs, neu))
    rows = [
        {"check": "ccr_interior_residual", "value": rel.ccr_interior, "bound": 1e-12},
        {"check": "commutation_interior_residual", "value": rel.commutation_interior, "bound": 1e-12},
        {"check": "ccr_boundary_residual", "value": rel.ccr_boundary, "expected": rel.expected_boundary},
        {"check": "alpha_norm", "value": rel.alpha_norm, "bound": 1.0},
        {"check": "gamma_norm", "value": rel.gamma_norm, "bound": 1.0},
        {"check": "projection_idempotency", "value": pr.idempotency, "bound": 1e-9},
        {"check": "projection_gap_min_eigenvalue", "value": pr.min_gap_eigenvalue, "bound": -1e-9},
        {"check": "E_k_rank_one_error", "value": pr.rank_one_error, "bound": 1e-9},
        {"check": "E_k_orthogonality", "value": pr.orthogonality, "bound": 1e-9},
        {"check": "neumann_vs_solve", "value": agree, "bound": 1e-10},
        {"check": "gamma_reconstruction", "value": rec.norm_error, "bound": rec.bound + 1e-9},
        {"check": "level_shift_isometry", "value": rec.isometry_error, "bound": 1e-9},
    ]
    for r in rows:
        if "bound" in r:
            r["ok"] = r["value"] >= r["bound"] if r["check"] == "projection_gap_min_eigenvalue" else r["value"] <= r["bound"]
    return {"q": format_exact(qf), "depth": depth, "k_max": k_max}, rows


def cmd_opvalued(args, prob):
    cfg = prob["opvalued"]
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    Ns = prob["N_values"] or []
    if "observables" in cfg:
        obs = {j: _blocks_from_table(j, t, f"opvalued.observables.{j}") for j, t in cfg["observables"].items()}
        source = "config"
    else:
        import random

        rng = random.Random(seed)
        obs = opvalued.random_observables(rng, cfg.get("d", 2), cfg.get("m", 2))
        source = f"random(seed={seed})"
    if prob["labels"]:
        sequences = [list(prob["labels"])]
    else:
        first = sorted(obs)[0]
        sequences = [[first] * n for n in prob["degrees"] or [2, 4]]
    rows = []
    for labels in sequences:
        unknown = set(labels) - set(obs)
        if unknown:
            raise InputError(f"unknown observable label(s) {sorted(unknown)}", "labels")
        seq = [obs[j] for j in labels]
        try:
            lim = opvalued.opvalued_limit_formula(seq)
        except ValueError as exc:
            raise InputError(str(exc), "opvalued.observables") from None
        vac = opvalued.opvalued_vacuum_moment(seq)
        rows.append({"n": len(labels), "labels": labels, "N": "limit", **number(lim),
                     "vacuum_equals_limit": opvalued.bequal(vac, lim)})
        if Ns:
            coeffs = opvalued.opvalued_finite_n_coefficients(obs, labels)
            for N in sorted(Ns):
                v = opvalued.opvalued_finite_n_moment(obs, labels, N, coeffs)
                row = {"n": len(labels), "labels": labels, "N": N, **number(v)}
                if len(labels) % 2 == 0:
                    e = number(v - lim)
                    row["error_exact"], row["error_approx"] = e["exact"], e["approx"]
                rows.append(row)
    return {"source": source, "N_values": sorted(Ns)}, rows


def cmd_check_hypotheses(args, prob):
    dist = _dist(prob)
    kinds = [prob["kind"]] if prob["kind"] else [k.value for k in Kind]
    n_max = max(prob["degrees"]) if prob["degrees"] else 5
    rows = []
    for kind in kinds:
        if kind not in [k.value for k in Kind]:
            raise InputError(f"hypothesis checks need a built-in kind, got {kind!r}", "kind")
        reps = [
            clt.check_singleton(kind, dist, n_max),
            clt.check_spreadability(kind, dist, n_max),
            clt.check_spreadability(kind, dist, min(n_max, 5), order_preserving=False),
        ]
        for rep in reps:
            w = rep.witness
            if w is not None:
                w = {k: (list(v) if isinstance(v, tuple) else number(v)) for k, v in w.items()}
            rows.append({"kind": kind, "hypothesis": rep.name, "passed": rep.passed,
                         "checked": rep.checked, "witness": w})
        for n in range(1, n_max + 1):
            rows.append({"kind": kind, "hypothesis": "bound", "n": n,
                         "C_n": number(clt.check_bound(kind, dist, n))})
    return {"n_max": n_max}, rows


COMMANDS = {
    "limit": cmd_limit,
    "finite-n": cmd_finite_n,
    "qlimit": cmd_qlimit,
    "fock": cmd_fock,
    "qccr": cmd_qccr,
    "opvalued": cmd_opvalued,
    "check-hypotheses": cmd_check_hypotheses,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="algclt", description="Exact moments for algebraic central limit theorems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="TOML problem file")
        p.add_argument("--kind", help="|".join(KINDS))
        p.add_argument("--n", type=_int_list, help="degrees, comma separated")
        p.add_argument("--N", type=_int_list, help="N values, comma separated")
        p.add_argument("--dist", help="TOML file with a site distribution")
        p.add_argument("--labels", type=_str_list, help="explicit label sequence j1,...,jn")
        p.add_argument("--q")
        p.add_argument("--depth", type=int)
        p.add_argument("--k-max", dest="k_max", type=int)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--seed", type=int)
        p.add_argument("--flavor", help="Fock flavor: full|boson|boolean|q")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
        fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
        p.set_defaults(fmt="json")

    for name in COMMANDS:
        common(sub.add_parser(name))
    v = sub.add_parser("verify", help="run the cross-validation suite")
    v.add_argument("--only", type=_str_list, action="extend", help="check names or groups")
    v.add_argument("--json", dest="fmt", action="store_const", const="json", default="text")
    return parser


def _flatten(value):
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return " ".join(value)
    return json.dumps(value, separators=(",", ":")) if isinstance(value, (list, dict)) else value


def render(doc: dict, fmt: str) -> str:
    if fmt == "csv":
        rows = doc["results"]
        keys: list[str] = []
        for r in rows:
            keys.extend(k for k in r if k not in keys)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _flatten(r.get(k)) for k in keys})
        return buf.getvalue()
    return json.dumps(doc, indent=2) + "\n"


def _error_doc(command, kind, exc, field=None, position=None) -> str:
    err = {"type": kind, "message": str(exc)}
    if field:
        err["field"] = field
    if position:
        err.update(position)
    return json.dumps({"schema_version": SCHEMA_VERSION, "command": command, "error": err}, indent=2) + "\n"


def _verify(args, out) -> int:
    try:
        checks = verification.select(args.only)
    except KeyError as exc:
        out.write(_error_doc("verify", "input", exc.args[0]))
        return 1
    echo = out.write if args.fmt == "text" else None
    results = [verification.run_check(c) for c in checks]
    if echo:
        for r in results:
            echo(r.line() + "\n")
        failed = [r.name for r in results if not r.passed]
        echo(f"{len(results) - len(failed)}/{len(results)} checks passed"
             + (f"; failed: {', '.join(failed)}\n" if failed else "\n"))
    else:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": "verify",
            "inputs": {"only": args.only},
            "results": [{"check": r.name, "group": r.group, "passed": r.passed, "detail": r.detail} for r in results],
            "timings": {r.name: round(r.seconds, 3) for r in results},
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    return 0 if all(r.passed for r in results) else 3


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    command = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        if command == "verify":
            return _verify(args, out)
        prob = _resolve(args)
        inputs, rows = COMMANDS[command](args, prob)
    except InputError as exc:
        out.write(_error_doc(command, "input", exc, exc.field, exc.position))
        return 1
    except MissingMomentError as exc:
        out.write(_error_doc(command, "missing-moment", f"no moment for label-word {list(exc.args[0])}"))
        return 2
    except (ValueError, KeyError) as exc:
        out.write(_error_doc(command, "input", exc))
        return 1
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs, "results": rows, "timings": {}}
    out.write(render(doc, args.fmt))
    return 0


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
