"""Command-line entry point: ``edocs <command> ...``.

File formats
------------
design   ``n m d`` header then one line per column with its 0-based row support
scheme   key=value header; universal schemes append ``[M]`` and ``[A2]`` design sections
signal   JSON ``{"dim": n, "entries": {"<0-based index>": value, ...}}``
bits     a single line of ``0``/``1`` characters
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import oracle
from .core import FLOAT_TOL, BinaryDesign, MeasurementBits, SparseSignal
from .foreach import EeScheme, build_ee, kalpha
from .harness import SIGNALS, TrialConfig, rows_to_csv, run_sweep, run_trials
from .universal import UniversalScheme, build_aa, build_ae


def _write(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def load_scheme(text: str):
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if "universal" in first:
        return UniversalScheme.loads(text)
    if "ee" in first.split():
        return EeScheme.loads(text)
    raise ValueError("unrecognised scheme file")


def load_signal(text: str) -> SparseSignal:
    raw = json.loads(text)
    return SparseSignal(int(raw["dim"]), {int(i): float(v) for i, v in raw["entries"].items()})


def dump_signal(x: SparseSignal) -> str:
    return json.dumps({"dim": x.dim, "entries": {str(i): v for i, v in x.entries.items()}}) + "\n"


def _ints(s: str) -> list:
    return [int(float(t)) for t in s.split(",") if t]


def _floats(s: str) -> list:
    return [float(t) for t in s.split(",") if t]


def cmd_build_universal(a):
    kw = dict(c_rows=a.c_rows, c_weight=a.c_weight, uf_rows=a.uf_rows, uf_weight=a.uf_weight,
              verify=a.verify)
    if a.kind == "aa":
        if a.eps is None:
            raise SystemExit("--eps is required for --kind aa")
        scheme = build_aa(a.n, a.k, a.eps, a.seed, **kw)
    else:
        scheme = build_ae(a.n, a.k, a.seed, **kw)
    _write(scheme.dumps(), a.out)
    print(f"kind={scheme.kind} n={scheme.n} k={scheme.k} m={scheme.m} m'={scheme.m_prime} "
          f"m''={scheme.A_second.rows} d''={scheme.d2} verified={scheme.verified}", file=sys.stderr)


def cmd_build_ee(a):
    scheme = build_ee(a.n, a.k, a.alpha, a.C, a.seed, a.coeffs)
    _write(scheme.dumps(), a.out)
    print(f"n={scheme.n} k={scheme.k} k_alpha={scheme.k_alpha} m_B={scheme.m_B} m={scheme.m}",
          file=sys.stderr)


def cmd_encode(a):
    scheme = load_scheme(_read(a.scheme))
    x = load_signal(_read(a.signal))
    _write(scheme.measure(x, tol=a.tol).to_string() + "\n", a.out)


def cmd_decode(a):
    scheme = load_scheme(_read(a.scheme))
    y = MeasurementBits.from_string(_read(a.bits))
    res = scheme.decode(y)
    if isinstance(scheme, UniversalScheme):
        out = {"support": sorted(res.indices), "stage1_size": res.stage1_size,
               "column_reads": res.column_reads}
    else:
        out = {"support": sorted(res.positives), "failed": res.failed,
               "candidates_peak": res.candidates_peak, "visits": res.visits}
    _write(json.dumps(out) + "\n", a.out)


def cmd_verify_design(a):
    design = BinaryDesign.loads(_read(a.design))
    prop = a.property
    if prop == "distinguishable":
        params = {"k": a.k, "l": a.l}
        verdict = oracle.check_distinguishable(design, a.k, a.l, a.budget)
    elif prop == "strongly-distinguishable":
        params = {"k": a.k, "eps": a.eps}
        verdict = oracle.check_strongly_distinguishable(design, a.k, a.eps, a.budget)
    elif prop == "list-uf":
        params = {"k": a.k, "l": a.l, "alpha": a.alpha}
        verdict = oracle.check_list_uf(design, a.k, a.l, a.alpha, a.budget)
    else:
        params = {"k": a.k, "eps": a.eps, "alpha": a.alpha}
        verdict = oracle.check_strongly_list_uf(design, a.k, a.eps, a.alpha, a.budget)
    _write(oracle.verdict_record(design, prop, params, verdict) + "\n", a.out)
    return 0 if verdict else 1


def _trial_config(a, n, k, p):
    return TrialConfig(a.scheme, n, k, eps=p if a.scheme == "aa" else None,
                       alpha=p if a.scheme == "ee" else None, signal=a.signal, trials=a.trials,
                       seed=a.seed, verify=a.verify, C=a.C, exact_k=a.exact_k)


def cmd_trial(a):
    p = a.eps if a.scheme == "aa" else a.alpha
    rep = run_trials(_trial_config(a, a.n, a.k, p), timing=not a.no_timing)
    _write(json.dumps(rep.summary(), indent=2) + "\n", a.out)


def cmd_sweep(a):
    params = _floats(a.param) if a.param else [None]
    grid = [_trial_config(a, n, k, p) for n in _ints(a.n) for k in _ints(a.k) for p in params]
    _write(rows_to_csv(run_sweep(grid, timing=not a.no_timing)), a.out)


def cmd_bib_sim(a):
    threshold = a.threshold
    if threshold is None:
        if a.alpha is None:
            raise SystemExit("give --threshold or --alpha")
        threshold = kalpha(a.balls, a.alpha, a.bins // a.balls) if a.bins % a.balls == 0 else None
        if threshold is None:
            raise SystemExit("--alpha needs bins to be a multiple of balls")
    cfg = oracle.BibConfig(a.balls, a.bins, threshold, a.trials, a.seed, a.levels)
    p = oracle.bib_simulate(cfg)
    _write(json.dumps({**asdict(cfg), "probability": p}) + "\n", a.out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="edocs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output file (default stdout)")
        return p

    def verify_flags(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--verify", dest="verify", action="store_true", default=None)
        g.add_argument("--no-verify", dest="verify", action="store_false")

    p = add("build-universal", cmd_build_universal, "build an AA or AE scheme")
    p.add_argument("--kind", choices=["aa", "ae"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float)
    for name, default in (("c-rows", 4.0), ("c-weight", 4.0), ("uf-rows", 48.0), ("uf-weight", 8.0)):
        p.add_argument(f"--{name}", type=float, default=default)
    verify_flags(p)

    p = add("build-ee", cmd_build_ee, "build an EE scheme")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--C", type=int, default=16)
    p.add_argument("--coeffs", choices=["gaussian", "hilbert"], default="gaussian")

    p = add("encode", cmd_encode, "measure a signal with a scheme")
    p.add_argument("--scheme", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--tol", type=float, default=FLOAT_TOL)

    p = add("decode", cmd_decode, "recover the support from measurement bits")
    p.add_argument("--scheme", required=True)
    p.add_argument("--bits", required=True)

    p = add("verify-design", cmd_verify_design, "brute-force check a design property")
    p.add_argument("--design", required=True)
    p.add_argument("--property", required=True,
                   choices=["distinguishable", "strongly-distinguishable", "list-uf", "strongly-list-uf"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)

    for name, fn, help_ in (("trial", cmd_trial, "run seeded recovery trials"),
                            ("sweep", cmd_sweep, "run a grid of trials, CSV output")):
        p = add(name, fn, help_)
        p.add_argument("--scheme", choices=["aa", "ae", "ee"], required=True)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--signal", choices=SIGNALS, default="gaussian")
        p.add_argument("--C", type=int, default=16)
        p.add_argument("--exact-k", action="store_true")
        p.add_argument("--no-timing", action="store_true")
        verify_flags(p)
        if name == "trial":
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--k", type=int, required=True)
            p.add_argument("--eps", type=float)
            p.add_argument("--alpha", type=float)
        else:
            p.add_argument("--n", required=True, help="comma-separated list")
            p.add_argument("--k", required=True, help="comma-separated list")
            p.add_argument("--param", default="", help="comma-separated eps (aa) or alpha (ee)")

    p = add("bib-sim", cmd_bib_sim, "balls-into-bins max-load simulation")
    p.add_argument("--balls", type=int, required=True)
    p.add_argument("--bins", type=int, required=True)
    p.add_argument("--threshold", type=int)
    p.add_argument("--alpha", type=float, help="derive threshold as k_alpha with k = balls")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--levels", type=int, default=1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = args.func(args)
    except (ValueError, oracle.BudgetExceeded) as exc:
        print(f"edocs: error: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
