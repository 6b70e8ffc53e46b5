"""
Command line front end ``prony-nd``.

Reports are JSON on standard output (or ``--out``); progress and error
messages go to standard error.  Exit codes: 0 success, 1 a computation or
file failed (a JSON error report is still written), 2 bad usage.
"""

import argparse
import json
import sys
from dataclasses import dataclass

from . import __version__
from .errors import PronyError
from .hankel import DEFAULT_TOL, Tolerances, family_set, rank_scan
from .indexsets import set_sum, simplex
from .io import (
    WindowSpecError,
    dumps,
    load_model,
    load_polynomial,
    load_signal,
    parse_window,
    write_text,
)
from .pronysolve import DEFAULT_SEED, annihilator_check, reconstruct
from .signalmodel import random_model, sample, sis_dimension
from .structure import factorize

COMMANDS = ("gen", "sample", "rankscan", "reconstruct", "verify", "factorize")

#: seed of ``gen`` when ``--seed`` is not given
DEFAULT_GEN_SEED = 0


class UsageError(Exception):
    """Bad combination of flags; mapped to exit code 2."""


@dataclass
class CommandConfig:
    command: str
    s: int = None
    terms: int = 1
    degree: int = 0
    seed: int = None
    window: str = None
    kmax: int = None
    family: str = "simplex"
    tol: Tolerances = DEFAULT_TOL
    inp: str = None
    model: str = None
    poly: str = None
    out: str = None

    @classmethod
    def from_args(cls, ns):
        try:
            tol = Tolerances(
                rank_rtol=ns.tol_rank if ns.tol_rank is not None else DEFAULT_TOL.rank_rtol,
                cluster_rtol=(
                    ns.tol_cluster if ns.tol_cluster is not None else DEFAULT_TOL.cluster_rtol
                ),
                residual_atol=DEFAULT_TOL.residual_atol,
                commute_rtol=DEFAULT_TOL.commute_rtol,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        cfg = cls(
            command=ns.command,
            s=ns.s,
            terms=ns.terms,
            degree=ns.degree,
            seed=ns.seed,
            window=ns.window,
            kmax=ns.kmax,
            family=ns.family,
            tol=tol,
            inp=ns.inp,
            model=ns.model,
            poly=ns.poly,
            out=ns.out,
        )
        cfg.validate()
        return cfg

    def validate(self):
        if self.s is not None and self.s < 1:
            raise UsageError("--s must be at least 1")
        if self.command == "gen":
            if self.terms is None or self.terms < 1:
                raise UsageError("--terms must be at least 1")
            if self.degree < 0:
                raise UsageError("--degree must be nonnegative")
        if self.kmax is not None and self.kmax < 0:
            raise UsageError("--kmax must be nonnegative")
        if self.window is not None and not self.window.strip():
            raise UsageError("empty window spec")
        if self.command == "sample" and (self.model is None or self.window is None):
            raise UsageError("sample needs --model and --window")
        if self.command in ("rankscan", "reconstruct", "verify"):
            if (self.inp is None) == (self.model is None):
                raise UsageError(f"{self.command} needs exactly one of --in and --model")
        if self.command == "verify" and self.poly is None:
            raise UsageError("verify needs --poly")
        if self.command == "factorize" and self.model is None:
            raise UsageError("factorize needs --model")


def build_parser():
    p = argparse.ArgumentParser(
        prog="prony-nd",
        description="Multivariate Prony reconstruction and Hankel structure checks.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--s", type=int, default=None, help="dimension (gen; window specs)")
    p.add_argument("--terms", type=int, default=1, help="number of terms (gen)")
    p.add_argument("--degree", type=int, default=0, help="coefficient degree bound (gen)")
    p.add_argument("--seed", type=int, default=None, help="random seed")
    p.add_argument("--window", default=None, help="simplex:k | cross:n | box:lo..hi[,lo..hi]")
    p.add_argument("--kmax", type=int, default=None, help="largest order of the rank scan")
    p.add_argument("--family", choices=("simplex", "cross"), default="simplex")
    p.add_argument("--tol-rank", dest="tol_rank", type=float, default=None)
    p.add_argument("--tol-cluster", dest="tol_cluster", type=float, default=None)
    p.add_argument("--in", dest="inp", default=None, help="signal CSV")
    p.add_argument("--model", default=None, help="model JSON")
    p.add_argument("--poly", default=None, help="polynomial JSON (verify)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    return p


def _window(cfg, s):
    try:
        return parse_window(cfg.window, s)
    except WindowSpecError as exc:
        raise UsageError(str(exc)) from None


def _signal(cfg, default_window=None):
    """Samples from ``--in`` (restricted to ``--window``) or from ``--model`` on ``--window``."""
    if cfg.inp is not None:
        f = load_signal(cfg.inp)
        if cfg.window is not None and cfg.command != "verify":
            f = f.restrict(_window(cfg, f.s))
        return f
    m = load_model(cfg.model)
    if cfg.window is not None:
        W = _window(cfg, m.s)
    else:
        W = default_window(m)
    return sample(m, W)


def _largest_scan_order(window, family, s):
    k = -1
    while set_sum(family_set(family, k + 1, s), family_set(family, k + 1, s)).issubset(window):
        k += 1
        if k > 64:
            break
    return k


def cmd_gen(cfg):
    seed = DEFAULT_GEN_SEED if cfg.seed is None else cfg.seed
    m = random_model(cfg.s or 1, cfg.terms, degree=cfg.degree, seed=seed)
    print(f"generated {len(m)} term(s) in s={m.s}", file=sys.stderr)
    return dumps(m.to_json())


def cmd_sample(cfg):
    m = load_model(cfg.model)
    f = sample(m, _window(cfg, m.s))
    print(f"sampled {len(f.window)} point(s)", file=sys.stderr)
    return f.to_csv()


def cmd_rankscan(cfg):
    def default_window(m):
        k = cfg.kmax if cfg.kmax is not None else sis_dimension(m) + 1
        A = family_set(cfg.family, k, m.s)
        return set_sum(A, A) if len(A) else simplex(0, m.s)

    f = _signal(cfg, default_window)
    kmax = cfg.kmax
    if kmax is None:
        # a window without the origin makes rank_scan report the footprint
        kmax = max(_largest_scan_order(f.window, cfg.family, f.s), 0)
    scan = rank_scan(f, kmax, cfg.family, cfg.tol)
    print(f"k_star = {scan.k_star}", file=sys.stderr)
    return dumps(scan.to_json())


def _reconstruction_window(m):
    return simplex(2 * sis_dimension(m) + 1, m.s)


def cmd_reconstruct(cfg):
    f = _signal(cfg, _reconstruction_window)
    seed = DEFAULT_SEED if cfg.seed is None else cfg.seed
    rec = reconstruct(f, cfg.tol, seed)
    print(f"recovered {len(rec.model)} term(s), rank {rec.rank}", file=sys.stderr)
    return dumps(rec.to_json())


def cmd_verify(cfg):
    f = _signal(cfg, _reconstruction_window)
    q = load_polynomial(cfg.poly, s=f.s)
    if q.s != f.s:
        raise UsageError("polynomial and signal dimension differ")
    E = None
    if cfg.window is not None and cfg.inp is not None:
        E = _window(cfg, f.s)
    res = annihilator_check(f, q, E)
    print(f"max residual {res:.6g}", file=sys.stderr)
    return dumps({"residual": res, "poly": q.to_json()})


def cmd_factorize(cfg):
    m = load_model(cfg.model)
    if cfg.window is not None:
        A = _window(cfg, m.s)
    else:
        A = simplex(sis_dimension(m), m.s)
    res = factorize(m, A, A, cfg.tol)
    print(
        f"residual {res.residual:.3e}, blocks {res.block_sizes}",
        file=sys.stderr,
    )
    out = res.to_json()
    out["rank"] = res.rank
    return dumps(out)


HANDLERS = {
    "gen": cmd_gen,
    "sample": cmd_sample,
    "rankscan": cmd_rankscan,
    "reconstruct": cmd_reconstruct,
    "verify": cmd_verify,
    "factorize": cmd_factorize,
}


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        cfg = CommandConfig.from_args(ns)
        text = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"prony-nd: error: {exc}", file=sys.stderr)
        return 2
    except PronyError as exc:
        print(f"prony-nd: {exc}", file=sys.stderr)
        _write_error(exc.to_json(), ns.out)
        return 1
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"prony-nd: {exc}", file=sys.stderr)
        _write_error({"error": "input", "message": str(exc)}, ns.out)
        return 1
    try:
        write_text(text, cfg.out)
    except OSError as exc:
        print(f"prony-nd: {exc}", file=sys.stderr)
        return 1
    return 0


def _write_error(report, out):
    try:
        write_text(dumps(report), out)
    except OSError:
        write_text(dumps(report), None)


if __name__ == "__main__":
    sys.exit(main())
