"""Command-line entry point.

Every verb computes all of its outputs in memory first, then writes them
atomically, so a failing run leaves no partial files.  Domain errors exit
with status 2 and one diagnostic line on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .analytics import (
    NE_STARTS,
    closed_form_measure,
    g_eval,
    ratio_report,
    threshold_sign,
)
from .constructions import (
    classify_pair,
    d_walk,
    extremal_pair,
    extremal_subscripts,
    f_line_family,
    frt,
    near_extremal,
    partition,
)
from .rational import DomainError, decimal17, format_rational, parse_rational
from .search import max_cross, max_single
from .sets import (
    SetFamily,
    cross_t_intersecting,
    dual,
    measure,
    predicates,
    shift_fixpoint,
    shift_ij,
)
from .textio import format_family, format_subset, parse_family, parse_subset
from .walks import alpha, f_line_measure, simulate_hits


class UsageError(DomainError):
    pass


@dataclass
class Outputs:
    """Named text artifacts; '-' is stdout."""

    items: list[tuple[str, str]] = field(default_factory=list)

    def add(self, dest: str, text: str) -> None:
        self.items.append((dest, text))


def _sidecar(dest: str, tag: str) -> str:
    p = Path(dest)
    return str(p.with_name(f"{p.stem}_{tag}{p.suffix}"))


def _atomic_write(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None


def _load_family(path: str) -> SetFamily:
    return parse_family(_read(path))


def _p(text: str):
    return parse_rational(text)


def _emit_pair(out: Outputs, dest: str, A: SetFamily, B: SetFamily) -> None:
    if dest == "-":
        out.add("-", "# family A\n" + format_family(A) + "# family B\n" + format_family(B))
    else:
        out.add(_sidecar(dest, "A"), format_family(A))
        out.add(_sidecar(dest, "B"), format_family(B))


# verbs


def cmd_measure(args, out: Outputs) -> None:
    p = _p(args.p)
    if args.family:
        val = measure(_load_family(args.family), p)
    else:
        if args.t is None or args.r is None:
            raise UsageError("measure needs --family or both --t and --r")
        if args.n is not None:
            val = measure(frt(args.n, args.t, args.r), p)
        else:
            val = closed_form_measure(args.t, args.r, p)
    out.add(args.out, f"{format_rational(val)} {decimal17(val)}\n")


def cmd_construct(args, out: Outputs) -> None:
    kind = args.kind
    need = {
        "frt": ("n", "t", "r"),
        "near-extremal": ("n", "t", "r"),
        "extremal-pair": ("n", "t", "s", "s_prime"),
        "f-line": ("n", "ell"),
        "partition": ("n", "ell"),
        "d-walk": ("n", "t", "s", "i"),
    }[kind]
    missing = [f"--{k.replace('_', '-')}" for k in need if getattr(args, k) is None]
    if missing:
        raise UsageError(f"construct {kind} needs {' '.join(missing)}")
    if kind == "frt":
        out.add(args.out, format_family(frt(args.n, args.t, args.r)))
    elif kind == "near-extremal":
        A, _ = near_extremal(args.n, args.t, args.r)
        out.add(args.out, format_family(A))
    elif kind == "extremal-pair":
        _emit_pair(out, args.out, *extremal_pair(args.n, args.t, args.s, args.s_prime))
    elif kind == "f-line":
        out.add(args.out, format_family(f_line_family(args.n, args.ell)))
    elif kind == "partition":
        part = partition(args.n, args.ell)
        pieces = (("tilde", part.tilde), ("dot", part.dot), ("ddot", part.ddot))
        if args.out == "-":
            out.add("-", "".join(f"# {tag}\n{format_family(F)}" for tag, F in pieces))
        else:
            for tag, F in pieces:
                out.add(_sidecar(args.out, tag), format_family(F))
    else:
        D = d_walk(args.n, args.t, args.s, args.i, args.variant)
        out.add(args.out, format_subset(D) + "\n")


def cmd_check(args, out: Outputs) -> None:
    F = _load_family(args.family)
    pr = predicates(F, args.t)
    rec = {
        "t": args.t,
        "t_intersecting": pr.t_intersecting,
        "up_closed": pr.up_closed,
        "shifted": pr.shifted,
        "t_nice": pr.t_nice,
    }
    if args.other:
        G = _load_family(args.other)
        rec["cross_t_intersecting"] = cross_t_intersecting(F, G, args.t)
    out.add(args.out, json.dumps(rec, sort_keys=True) + "\n")


def cmd_shift(args, out: Outputs) -> None:
    F = _load_family(args.family)
    if (args.i is None) != (args.j is None):
        raise UsageError("shift needs both --i and --j, or neither for the fixpoint")
    G = shift_fixpoint(F) if args.i is None else shift_ij(F, args.i, args.j)
    out.add(args.out, format_family(G))


def cmd_dual(args, out: Outputs) -> None:
    A = parse_subset(args.set, args.n)
    out.add(args.out, format_subset(dual(A, args.t)) + "\n")


def cmd_classify(args, out: Outputs) -> None:
    A, B = _load_family(args.a), _load_family(args.b)
    pc = classify_pair(A, B, args.t, args.r)
    out.add(args.out, json.dumps(pc.as_record(), sort_keys=False) + "\n")


def cmd_search(args, out: Outputs) -> None:
    p = _p(args.p)
    fn = max_single if args.mode == "single" else max_cross
    cert = fn(args.n, args.t, p, shifted_only=args.shifted_only, force=args.force)
    if args.mode == "single":
        out.add(args.out, format_family(cert.argmax))
    else:
        _emit_pair(out, args.out, *cert.argmax)
    summary = (f"value={format_rational(cert.value)} nodes={cert.nodes_explored} "
               f"exhaustive={str(cert.exhaustive).lower()}")
    if args.mode == "cross":
        summary += " note=conjecture-exploration"
    # the summary always goes to stdout, after any family text printed there
    out.add("-", summary + "\n")


def _grid(spec: str):
    try:
        lo, hi, steps = spec.split(":")
        steps = int(steps)
    except ValueError:
        raise UsageError(f"--p-grid must look like a/b:c/d:steps, got {spec!r}") from None
    lo, hi = parse_rational(lo), parse_rational(hi)
    if steps < 1:
        raise UsageError("--p-grid needs at least one step")
    if steps == 1:
        return [lo]
    return [lo + (hi - lo) * k / (steps - 1) for k in range(steps)]


def _sweep_subscripts(r: int) -> list[tuple[int, int]]:
    pairs = set(extremal_subscripts(r))
    for (ds, dsp), _ in NE_STARTS:
        if r + ds >= 0 and r + dsp >= 0:
            pairs.add((r + ds, r + dsp))
    return sorted(pairs)


def _sweep_row(t: int, r: int, p, subs):
    mu = closed_form_measure(t, r, p)
    row = [p, mu]
    sign = threshold_sign(t, r, p)
    gs = []
    for s, sp in subs:
        try:
            gs.append(g_eval(t, r, s, sp, p))
        except DomainError:
            gs.append(None)
    ratios = {rep.key: rep for rep in ratio_report(t, r, p)}
    return row, sign.name, gs, ratios


def _cell(x) -> list[str]:
    if x is None:
        return ["", ""]
    return [format_rational(x), decimal17(x)]


def cmd_sweep(args, out: Outputs) -> None:
    grid = _grid(args.p_grid)
    for p in grid:
        if not 0 < p < 1:
            raise DomainError(f"grid point {format_rational(p)} outside (0, 1)")
    subs = _sweep_subscripts(args.r)
    keys = ["pair_r+1_r", "single_r+1"] + (["pair_r_r-1", "single_r-1"] if args.r >= 1 else [])
    header = ["p", "p_dec", "mu_Frt", "mu_Frt_dec", "threshold_sign"]
    for s, sp in subs:
        header += [f"g_{s}_{sp}", f"g_{s}_{sp}_dec"]
    for k in keys:
        header += [f"ratio_{k}", f"ratio_{k}_dec", f"first_order_{k}"]
    job = [(args.t, args.r, p, subs) for p in grid]
    if args.jobs > 1 and len(job) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_row, *zip(*job)))
    else:
        rows = [_sweep_row(*j) for j in job]
    lines = [",".join(header)]
    for (p, mu), sign, gs, ratios in rows:
        cells = _cell(p) + _cell(mu) + [sign]
        for g in gs:
            cells += _cell(g)
        for k in keys:
            rep = ratios[k]
            cells += _cell(rep.ratio) + [f"{rep.first_order:.17g}"]
        lines.append(",".join(cells))
    out.add(args.out, "\n".join(lines) + "\n")


def cmd_walk_sim(args, out: Outputs) -> None:
    p = _p(args.p)
    res = simulate_hits(p, args.ell, args.steps, args.trials, args.seed, jobs=args.jobs)
    exact = f_line_measure(args.steps, args.ell, p)
    apow = alpha(p) ** args.ell
    text = "estimate,stderr,exact,alpha_pow_ell\n"
    text += f"{res.estimate:.17g},{res.stderr:.17g},{decimal17(exact)},{decimal17(apow)}\n"
    out.add(args.out, text)


# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise UsageError(f"seed must be an unsigned 64-bit integer, got {text!r}") from None
    if not 0 <= v < 1 << 64:
        raise UsageError(f"seed must be an unsigned 64-bit integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="aklab", description="Exact tools for cross t-intersecting families.")
    ap.add_argument("--version", action="version", version=f"aklab {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def verb(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")
        sp.add_argument("--manifest", help="where to write the run manifest")
        sp.add_argument("--jobs", type=int, default=1, help="worker cap; never changes results")
        sp.set_defaults(fn=fn)
        return sp

    sp = verb("measure", cmd_measure, "exact measure of a family or of F_r^t")
    sp.add_argument("--p", required=True)
    sp.add_argument("--family")
    sp.add_argument("--n", type=int)
    sp.add_argument("--t", type=int)
    sp.add_argument("--r", type=int)

    sp = verb("construct", cmd_construct, "build a named family or walk")
    sp.add_argument("kind", choices=["frt", "near-extremal", "extremal-pair", "f-line", "partition", "d-walk"])
    for flag in ("--n", "--t", "--r", "--s", "--s-prime", "--ell", "--i"):
        sp.add_argument(flag, type=int)
    sp.add_argument("--variant", choices=["plain", "tilde"], default="plain")

    sp = verb("check", cmd_check, "predicates of a family file")
    sp.add_argument("--family", required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--other", help="second family for the cross check")

    sp = verb("shift", cmd_shift, "one (i,j)-shift, or shift to a fixpoint")
    sp.add_argument("--family", required=True)
    sp.add_argument("--i", type=int)
    sp.add_argument("--j", type=int)

    sp = verb("dual", cmd_dual, "dual walk of one set")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--set", required=True, help="members, e.g. '2 4 6'")

    sp = verb("classify", cmd_classify, "case split of a t-nice pair")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)

    sp = verb("search", cmd_search, "exhaustive extremal search")
    sp.add_argument("mode", choices=["single", "cross"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--p", required=True)
    sp.add_argument("--shifted-only", action="store_true")
    sp.add_argument("--force", action="store_true")

    sp = verb("sweep", cmd_sweep, "analytic quantities over a p-grid, as CSV")
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--p-grid", required=True)

    sp = verb("walk-sim", cmd_walk_sim, "Monte Carlo line hitting")
    sp.add_argument("--p", required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=_u64, required=True)
    return ap


def _manifest(argv, args, outputs: Outputs, started: float, status: int) -> dict:
    sums: dict[str, list[str]] = {}
    for dest, text in outputs.items:
        sums.setdefault("<stdout>" if dest == "-" else dest, []).append(text)
    checksums = {k: hashlib.sha256("".join(v).encode()).hexdigest() for k, v in sums.items()}
    return {
        "tool": "aklab",
        "version": __version__,
        "argv": list(argv),
        "seed": getattr(args, "seed", None),
        "wall_time_s": round(time.perf_counter() - started, 6),
        "exit_status": status,
        "outputs": checksums,
    }


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    started = time.perf_counter()
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        outputs = Outputs()
        args.fn(args, outputs)
    except (DomainError, RecursionError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"aklab: error: {msg}", file=sys.stderr)
        if args is not None and getattr(args, "manifest", None):
            _atomic_write(args.manifest, json.dumps(_manifest(argv, args, Outputs(), started, 2),
                                                    indent=2) + "\n")
        return 2
    stdout_parts = []
    for dest, text in outputs.items:
        if dest == "-":
            stdout_parts.append(text)
        else:
            _atomic_write(dest, text)
    if stdout_parts:
        sys.stdout.write("".join(stdout_parts))
        sys.stdout.flush()
    man = json.dumps(_manifest(argv, args, outputs, started, 0), indent=2) + "\n"
    if args.manifest:
        _atomic_write(args.manifest, man)
    elif args.out != "-":
        _atomic_write(args.out + ".manifest.json", man)
    else:
        sys.stderr.write(man)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
