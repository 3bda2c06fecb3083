"""Command-line front end.

Every subcommand reads its matrix with ``--in`` (JSON or CSV, see
:mod:`grothendieck.io`) and writes a JSON report to ``--out`` or standard
output. Exit codes: 0 on success, 1 on a domain error or bad input, 2 when
``--strict`` is given and some result did not reach status ``ok``.
"""

import argparse
from dataclasses import replace
import sys

import numpy as np

from . import __version__
from .config import DEFAULT_BUDGET, DEFAULT_TOL, KG_LITTLE, GrothendieckError
from .experiments import block_embedding, inequality_suite, ratio_scan
from .factorizations import cbb_factorization, cbf_vector, fact_split, schur_factorization
from .geometry import decompose_geo, decompose_geo2, v_membership
from .haagerup import haagerup_construction
from .io import read_matrix, write_report
from .linalg import op_norm
from .norms import _kind, norm

__all__ = ["main", "build_parser"]

#: kinds whose bracket comes from an SDP primal/dual pair or is exact
_UPPER_VALUE = {"op", "hs", "cbF", "cbB", "S", "T", "proj_inf_inf", "proj_2_inf"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract here is 1
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _item(name, value=None, bracket=None, status="ok", slack=None, **values):
    out = {"name": name, "value": value, "bracket": bracket, "status": status, "slack": slack}
    if values:
        out["values"] = values
    return out


def _budget(args):
    b = DEFAULT_BUDGET.with_(seed=args.seed)
    if args.budget is not None:
        b = b.with_(n_starts=args.budget, n_rounding=args.budget)
    b.validate()
    return b


def _tol(args):
    if args.tol is None:
        return DEFAULT_TOL
    return replace(DEFAULT_TOL, feas_tol=args.tol)


def _cmd_norm(args, X, budget, tol):
    kind = _kind(args.kind or "cbB")
    br = norm(X, kind, budget, tol)
    value = br.upper if kind.value in _UPPER_VALUE else br.lower
    return [_item(kind.value, value, [br.lower, br.upper], br.status, br.upper - br.lower)]


def _cmd_factorize(args, X, budget, tol):
    kind = args.kind or "cbB"
    if kind == "cbB":
        f = cbb_factorization(X, tol)
        res = float(np.linalg.norm(X - f.matrix()))
        return [_item("cbB_factorization", f.value, status="ok", slack=res, eta=f.eta, xi=f.xi, B=f.B, residual=res)]
    if kind == "cbF":
        xi, Z = cbf_vector(X, tol)
        return [_item("cbF_vector", op_norm(Z), xi=xi, Z=Z)]
    if kind == "S":
        f = schur_factorization(X, tol)
        res = float(np.linalg.norm(X - f.matrix()))
        return [_item("schur_factorization", f.value, status="ok", slack=res, L=f.L, R=f.R, residual=res)]
    if kind == "split":
        f = fact_split(X, tol)
        res = float(np.linalg.norm(X - f.matrix()))
        return [_item("fact_split", f.factorization.value, slack=res, C=f.C, D=f.D, residual=res)]
    raise GrothendieckError(f"unknown factorization kind {kind!r} (use cbB, cbF, S or split)")


def _cmd_haagerup(args, X, budget, tol):
    d = haagerup_construction(X, budget, tol)
    br = d.f_norm_bracket
    status = "ok" if d.certified or br.status == "ok" else br.status
    return [
        _item(
            "haagerup",
            d.f_norm,
            [br.lower, br.upper],
            status,
            float(np.sqrt(2) - op_norm(d.Z)),
            u=d.u,
            lam=d.lam,
            xi=d.xi,
            Z_norm=op_norm(d.Z),
            scaled_norm=d.scaled_norm,
            certified=d.certified,
        )
    ]


def _cmd_decompose(args, X, budget, tol):
    kind = args.kind or "geo"
    alpha = args.alpha if args.alpha is not None else KG_LITTLE
    if kind == "geo":
        d = decompose_geo(X, alpha, budget, tol)
        return [
            _item(
                "decompose_geo",
                d.min_eig_achieved,
                status=d.status,
                slack=d.min_eig_achieved + tol.feas_tol,
                alpha=alpha,
                iterations=d.iterations,
                atoms=d.R.atoms,
                weights=d.R.weights,
            )
        ]
    if kind == "geo2":
        d = decompose_geo2(X, alpha, budget=budget, tol=tol)
        return [
            _item(
                "decompose_geo2",
                d.residual,
                status=d.status,
                slack=1e-3 - d.residual,
                alpha=alpha,
                c_plus=d.c_plus,
                c_minus=d.c_minus,
                failed_depth=d.failed_depth,
                atoms_plus=len(d.R_plus.atoms),
                atoms_minus=len(d.R_minus.atoms),
            )
        ]
    if kind == "v":
        # v_membership wants unit Schur norm; the atoms are rescaled back
        scale = norm(X, "S", budget, tol).upper
        r = v_membership(X / scale, alpha, budget=budget, tol=tol)
        mix = r["mixture"]
        return [
            _item(
                "v_membership",
                r["rho"],
                status=r["status"],
                slack=alpha / (2 - alpha) + 1e-2 - r["rho"],
                reconstruction_error=r["reconstruction_error"],
                source=r["source"],
                schur_norm=scale,
                left=mix.left,
                right=mix.right,
                coef=mix.coef * scale,
            )
        ]
    raise GrothendieckError(f"unknown decomposition kind {kind!r} (use geo, geo2 or v)")


def _cmd_embed(args, X, budget, tol):
    e = block_embedding(X, budget, tol)
    c = e.checks
    return [
        _item("cbb_P", c["cbb_P"], status="ok", slack=-abs(c["cbb_P"] - 4)),
        _item("trace_QP", c["trace_QP"], status="ok", slack=-abs(c["trace_QP"] - 4)),
        _item("schur_Q", c["schur_Q"], status="ok", slack=-abs(c["schur_Q"] - 1)),
        _item(
            "B_P",
            None,
            c["B_P"],
            "ok" if c["B_P_consistent"] else "inconsistent",
            None,
            predicted=c["predicted_B_P"],
        ),
        _item(
            "displayed_inequality",
            c["displayed_slack"],
            status="ok" if c["displayed_slack"] >= -1e-6 else "violated",
            slack=c["displayed_slack"],
        ),
    ]


def _cmd_scan(args, X, budget, tol):
    kind = args.kind or "positive"
    rep = ratio_scan(kind, args.n, args.count, args.seed, args.ensemble, budget, tol)
    d = rep.to_dict()
    status = "ok" if d["within_bound"] else "bound_exceeded"
    return [_item(f"scan_{kind}", d["max_ratio"], status=status, slack=d["bound"] - d["max_ratio"], **d)]


def _cmd_verify(args, X, budget, tol):
    r = inequality_suite(args.seed, samples=args.count)
    items = [
        _item(c["name"], c["min_slack"], status="ok" if c["pass"] else "violated", slack=c["min_slack"], count=c["count"])
        for c in r["checks"]
    ]
    return items


_COMMANDS = {
    "norm": (_cmd_norm, True, "bracket a norm (--kind op|hs|F|cbF|B|cbB|S|T|proj_inf_inf|proj_2_inf)"),
    "factorize": (_cmd_factorize, True, "optimal factorization (--kind cbB|cbF|S|split)"),
    "haagerup": (_cmd_haagerup, True, "phase vector, scaling vector and normalized factor"),
    "decompose": (_cmd_decompose, True, "elliptope decomposition (--kind geo|geo2|v, --alpha)"),
    "embed": (_cmd_embed, True, "PSD block embedding and its checks"),
    "scan": (_cmd_scan, False, "constant-ratio scan (--kind positive|general|little)"),
    "verify": (_cmd_verify, False, "run the inequality suite"),
}


def build_parser():
    p = _Parser(prog="grothendieck", description="Brackets and factorizations for the Grothendieck matrix norms.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    for name, (_, needs_input, help_) in _COMMANDS.items():
        s = sub.add_parser(name, help=help_, description=help_)
        s.add_argument("--in", dest="inp", metavar="PATH", required=needs_input, help="input matrix file")
        s.add_argument("--out", metavar="PATH", help="report file (default: standard output)")
        s.add_argument("--format", choices=("json", "csv"), help="input format (default: from the extension)")
        s.add_argument("--kind", metavar="K", help="norm, factorization, decomposition or scan kind")
        s.add_argument("--alpha", type=float, metavar="F", help="decomposition constant (default 4/pi)")
        s.add_argument("--seed", type=int, default=0, metavar="N", help="random seed (default 0)")
        s.add_argument("--tol", type=float, metavar="F", help="feasibility tolerance for decompositions")
        s.add_argument("--budget", type=int, metavar="N", help="torus search starts and roundings")
        s.add_argument("--strict", action="store_true", help="exit 2 if any result is not ok")
        s.add_argument("--dry-run", action="store_true", help="validate inputs without computing")
        if name in ("scan", "verify"):
            s.add_argument("--count", type=int, default=50, metavar="N", help="samples (per family for verify)")
        if name == "scan":
            s.add_argument("--n", type=int, default=4, metavar="N", help="matrix size")
            s.add_argument("--ensemble", default="ginibre", help="ginibre, gram, nonnegative or rank_one")
    return p


def _emit(report, path):
    text = write_report(report, path)
    if path is None:
        sys.stdout.write(text)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    if args.command is None:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        return 1
    report = {"tool": "grothendieck", "version": __version__, "command": argv, "seed": args.seed}
    try:
        budget, tol = _budget(args), _tol(args)
        X = read_matrix(args.inp, args.format) if args.inp else None
        if args.command == "norm" and args.kind:
            _kind(args.kind)
        if args.dry_run:
            report["results"] = []
            report["status"] = "dry_run"
            if X is not None:
                report["input"] = {"rows": X.shape[0], "cols": X.shape[1]}
            _emit(report, args.out)
            return 0
        results = _COMMANDS[args.command][0](args, X, budget, tol)
    except (GrothendieckError, ValueError) as e:
        code = getattr(e, "code", "domain")
        print(f"grothendieck {args.command}: {e}", file=sys.stderr)
        report["results"] = []
        report["status"] = "error"
        report["error"] = {"code": code, "message": str(e)}
        if args.out:
            write_report(report, args.out)
        return 1
    report["results"] = results
    ok = all(r["status"] in ("ok", "pass") for r in results)
    report["status"] = "ok" if ok else "incomplete"
    _emit(report, args.out)
    return 2 if args.strict and not ok else 0


if __name__ == "__main__":
    sys.exit(main())
