"""Command line front end: per-weight computations and the verification suite.

Reports are deterministic for a fixed (command, prime, weight, seed): JSON
key order is pinned, randomized steps are seeded, and timings go to stderr
so stdout stays byte-identical across runs.  Exit codes: 0 all requested
checks pass, 1 a check or internal invariant fails, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .cartan import build_p_envelope
from .checks import ALL_CHECKS, CheckResult, run_check
from .induction import InducedModule, build_induced
from .primefield import validate_prime
from .repstructure import (MatrixModule, WeightPair, catalog,
                           composition_series, is_simple, maximal_vectors,
                           simple_realization)
from .wittrestrict import (balanced_toral_check, direct_factors,
                           guided_restriction, restrict_module,
                           closed_form_restriction)

CACHE_ENV = "HAMREP_CACHE_DIR"


class UsageError(Exception):
    pass


def parse_weight(text: str, p: int) -> tuple[int, int]:
    """Parse 'a,b' with signed or canonical entries, normalized mod p."""
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"invalid weight {text!r}: expected two "
                         "comma-separated integers")
    try:
        l1, l2 = (int(s.strip()) for s in parts)
    except ValueError:
        raise UsageError(f"invalid weight {text!r}: expected two "
                         "comma-separated integers") from None
    return l1 % p, l2 % p


def _timing(label: str, t0: float) -> None:
    print(f"[time] {label}: {time.perf_counter() - t0:.2f}s",
          file=sys.stderr)


# -- module cache -----------------------------------------------------------

def _cache_path(cache_dir: str, p: int, weight: tuple[int, int]) -> Path:
    return Path(cache_dir) / f"z_p{p}_{weight[0]}_{weight[1]}.npz"


def save_module(path: Path, z: InducedModule) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez_compressed(
        path, mats=np.stack(z.mats), wt_x=z.wt_x, wt_y=z.wt_y,
        meta=np.array([z.p, z.n], dtype=np.int64),
        version=np.array(__version__))


def load_module(path: Path, p: int, weight: tuple[int, int]
                ) -> tuple[MatrixModule, int] | None:
    """Reload a cached module; any mismatch or corruption is a miss."""
    if not path.exists():
        return None
    try:
        with np.load(path) as data:
            if str(data["version"]) != __version__:
                return None
            meta = data["meta"]
            if int(meta[0]) != p:
                return None
            n = int(meta[1])
            mats, wt_x, wt_y = data["mats"], data["wt_x"], data["wt_y"]
        alg = build_p_envelope(p)
        dim = p * p * (n + 1)
        if mats.shape != (alg.dim, dim, dim) or wt_x.shape != (dim,):
            raise ValueError("cached arrays have wrong shapes")
        return MatrixModule(p=p, alg=alg, mats=list(mats), wt_x=wt_x,
                            wt_y=wt_y,
                            label=f"Z({weight[0]},{weight[1]})"), n
    except Exception as exc:  # corrupt cache: warn and rebuild
        print(f"warning: ignoring unreadable cache {path}: {exc}",
              file=sys.stderr)
        return None


def induced_for(p: int, weight: tuple[int, int], cache_dir: str | None
                ) -> tuple[InducedModule | MatrixModule, int]:
    """Z(weight) from the cache when possible, else built and cached."""
    if cache_dir:
        hit = load_module(_cache_path(cache_dir, p, weight), p, weight)
        if hit is not None:
            print(f"[cache] hit for Z({weight[0]},{weight[1]})",
                  file=sys.stderr)
            return hit
    z = build_induced(p, weight)
    if cache_dir:
        save_module(_cache_path(cache_dir, p, weight), z)
    return z, z.n


# -- report assembly --------------------------------------------------------

def _weight_list(weight: tuple[int, int]) -> list[int]:
    return [int(weight[0]), int(weight[1])]


def _catalog_payload(p: int) -> list[dict]:
    return [
        {"weight": _weight_list(e.weight), "dim": e.dim,
         "aliases": [_weight_list(a) for a in e.aliases],
         "realization": e.realization}
        for e in catalog(p, verify=False)
    ]


def _finish(report: dict, seed: int) -> dict:
    report["version"] = __version__
    report["seed"] = seed
    return report


def _entry_ok(job: tuple[int, tuple[int, int], int]
              ) -> tuple[tuple[int, int], bool]:
    """Re-verify one catalog entry (worker: returns a plain descriptor)."""
    p, weight, dim = job
    w = WeightPair.of(p, weight)
    if w.is_exceptional:
        mod = simple_realization(p, w.pair)
        return w.pair, mod.dim == dim and is_simple(mod)
    z = build_induced(p, w.pair)
    return w.pair, z.dim == dim and is_simple(
        z, generator_index=z.flat_index(0, 0, z.n))


def cmd_classify(p: int, seed: int, jobs: int) -> dict:
    t0 = time.perf_counter()
    if jobs > 1:
        entries = catalog(p, verify=False)
        work = [(p, e.weight, e.dim) for e in entries]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_entry_ok, work))
        bad = [w for w, ok in results.items() if not ok]
        if bad:
            raise AssertionError(f"catalog verification failed at {bad}")
    else:
        catalog(p, verify=True)
    _timing("classify", t0)
    return _finish({"prime": p, "command": "classify",
                    "catalog": _catalog_payload(p)}, seed)


def cmd_induce(p: int, weight: tuple[int, int], seed: int,
               cache_dir: str | None) -> dict:
    t0 = time.perf_counter()
    z, n = induced_for(p, weight, cache_dir)
    maximal = [{"weight": _weight_list(wt), "count": int(rows.shape[0])}
               for wt, rows in maximal_vectors(z)]
    _timing("induce", t0)
    module = {"label": f"Z({weight[0]},{weight[1]})", "dim": z.dim,
              "components": n + 1, "maximal": maximal}
    return _finish({"prime": p, "command": "induce",
                    "weight": _weight_list(weight), "module": module}, seed)


def cmd_factors(p: int, weight: tuple[int, int], seed: int,
                cache_dir: str | None) -> dict:
    t0 = time.perf_counter()
    z, _ = induced_for(p, weight, cache_dir)
    rng = np.random.default_rng(seed)
    series = [{"weight": _weight_list(f.weight), "dim": f.dim}
              for f in composition_series(z, rng=rng)]
    _timing("factors", t0)
    return _finish({"prime": p, "command": "factors",
                    "weight": _weight_list(weight), "series": series}, seed)


def cmd_restrict(p: int, weight: tuple[int, int], seed: int) -> dict:
    t0 = time.perf_counter()
    want = closed_form_restriction(p, weight)
    mod = simple_realization(p, weight)
    rng = np.random.default_rng(seed)
    direct = direct_factors(restrict_module(mod), rng=rng)
    guided, _ = guided_restriction(p, weight)
    if not direct == want == guided:
        raise AssertionError(
            f"restriction routes disagree at {weight}: direct {dict(direct)}"
            f" closed-form {dict(want)} graded {dict(guided)}")
    _timing("restrict", t0)
    witt = {str(r): int(direct[r]) for r in sorted(direct)}
    return _finish({"prime": p, "command": "restrict",
                    "weight": _weight_list(weight), "witt": witt}, seed)


def cmd_balanced(p: int, seed: int) -> dict:
    t0 = time.perf_counter()
    alg = build_p_envelope(p)
    rep = balanced_toral_check(alg, alg.coords(alg.named["hdiff"]))
    _timing("balanced", t0)
    dims = ", ".join(f"{c}:{d}" for c, d in sorted(rep.eigendims.items()))
    detail = (f"eigendims {{{dims}}}; common nonzero dim "
              f"{rep.nonzero_common}")
    check = {"name": "balanced-toral", "pass": rep.is_toral
             and rep.is_balanced, "detail": detail}
    return _finish({"prime": p, "command": "balanced",
                    "checks": [check]}, seed)


def cmd_verify(p: int, seed: int, jobs: int) -> dict:
    t0 = time.perf_counter()
    names = [name for name, _ in ALL_CHECKS]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {name: pool.submit(run_check, name, seed)
                       for name in names}
        results = [futures[name].result() for name in names]
    else:
        results = [run_check(name, seed) for name in names]
    _timing("verify", t0)
    checks = [{"name": r.name, "pass": r.passed, "detail": r.detail}
              for r in results]
    return _finish({"prime": p, "command": "verify", "checks": checks}, seed)


# -- rendering --------------------------------------------------------------

def render_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def _md_weight(w: list[int]) -> str:
    return f"({w[0]},{w[1]})"


def render_markdown(report: dict) -> str:
    lines = ["# hamrep report", "",
             f"- command: {report['command']}",
             f"- prime: {report['prime']}"]
    if "weight" in report:
        lines.append(f"- weight: {_md_weight(report['weight'])}")
    lines += [f"- version: {report['version']}",
              f"- seed: {report['seed']}", ""]
    if "catalog" in report:
        lines += [f"## catalog ({len(report['catalog'])} classes)", "",
                  "| weight | dim | aliases | realization |",
                  "| --- | --- | --- | --- |"]
        for e in report["catalog"]:
            aliases = " ".join(_md_weight(a) for a in e["aliases"]) or "-"
            lines.append(f"| {_md_weight(e['weight'])} | {e['dim']} | "
                         f"{aliases} | {e['realization']} |")
        lines.append("")
    if "module" in report:
        m = report["module"]
        lines += [f"## module {m['label']}", "",
                  f"- dim: {m['dim']}", f"- components: {m['components']}",
                  "", "| maximal weight | count |", "| --- | --- |"]
        for row in m["maximal"]:
            lines.append(f"| {_md_weight(row['weight'])} | {row['count']} |")
        lines.append("")
    if "series" in report:
        lines += ["## composition series", "", "| factor | dim |",
                  "| --- | --- |"]
        for f in report["series"]:
            lines.append(f"| L{_md_weight(f['weight'])} | {f['dim']} |")
        lines.append("")
    if "witt" in report:
        lines += ["## Witt restriction", "", "| r | multiplicity |",
                  "| --- | --- |"]
        for r, mult in report["witt"].items():
            lines.append(f"| {r} | {mult} |")
        lines.append("")
    if "checks" in report:
        lines += ["## checks", "", "| check | result | detail |",
                  "| --- | --- | --- |"]
        for c in report["checks"]:
            word = "PASS" if c["pass"] else "FAIL"
            lines.append(f"| {c['name']} | {word} | {c['detail']} |")
        lines.append("")
    return "\n".join(lines)


# -- argument parsing -------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser, weight: bool = False,
                jobs: bool = False, cache: bool = False) -> None:
    sub.add_argument("--p", type=int, default=5, help="prime, at least 5")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for randomized steps")
    sub.add_argument("--format", choices=("json", "markdown"),
                     default="json", help="report format")
    if weight:
        sub.add_argument("--weight", required=True,
                         help="weight 'a,b'; signed entries allowed")
    if jobs:
        sub.add_argument("--jobs", type=int, default=1,
                         help="worker processes for independent subtasks")
    if cache:
        sub.add_argument("--cache-dir", default=None,
                         help=f"module cache directory (or ${CACHE_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hamrep",
        description="Simple restricted modules of a non-graded Hamiltonian "
                    "Lie algebra: catalogs, composition series, Witt "
                    "restrictions, and a verification battery.")
    subs = parser.add_subparsers(dest="command", required=True)
    _add_common(subs.add_parser(
        "classify", help="catalog of simple modules"), jobs=True)
    _add_common(subs.add_parser(
        "induce", help="build one induced module"), weight=True, cache=True)
    _add_common(subs.add_parser(
        "factors", help="composition series of one induced module"),
        weight=True, cache=True)
    _add_common(subs.add_parser(
        "restrict", help="Witt restriction of one simple module"),
        weight=True)
    _add_common(subs.add_parser(
        "balanced", help="toral element eigenspace report"))
    _add_common(subs.add_parser(
        "verify", help="run the full verification battery"), jobs=True)
    return parser


def run(args: argparse.Namespace) -> tuple[dict, bool]:
    p = validate_prime(args.p)
    seed = args.seed
    if args.command == "classify":
        return cmd_classify(p, seed, args.jobs), True
    if args.command == "induce":
        cache = args.cache_dir or os.environ.get(CACHE_ENV)
        weight = parse_weight(args.weight, p)
        return cmd_induce(p, weight, seed, cache), True
    if args.command == "factors":
        cache = args.cache_dir or os.environ.get(CACHE_ENV)
        weight = parse_weight(args.weight, p)
        return cmd_factors(p, weight, seed, cache), True
    if args.command == "restrict":
        weight = parse_weight(args.weight, p)
        return cmd_restrict(p, weight, seed), True
    if args.command == "balanced":
        report = cmd_balanced(p, seed)
        return report, all(c["pass"] for c in report["checks"])
    report = cmd_verify(p, seed, args.jobs)
    return report, all(c["pass"] for c in report["checks"])


_SIGNED_WEIGHT = re.compile(r"-\d+\s*,\s*-?\d+$")


def _glue_signed_weights(argv: list[str]) -> list[str]:
    # argparse reads a leading-dash value like "-1,-2" as an option token;
    # fold it into --weight=... so signed weights work in the space form too.
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok == "--weight" and i + 1 < len(argv)
                and _SIGNED_WEIGHT.match(argv[i + 1])):
            out.append(f"--weight={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_signed_weights(
        sys.argv[1:] if argv is None else list(argv)))
    try:
        report, ok = run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 1
    text = (render_json(report) if args.format == "json"
            else render_markdown(report))
    sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
