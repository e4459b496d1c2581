"""Command-line driver: reproducible experiments with run manifests.

Every command writes its artifacts plus ``run.json`` recording the resolved
parameters, input/output hashes, seed and wall time.  ``lacunaria verify
--manifest run.json`` re-executes the run into a scratch directory and
compares artifacts byte for byte (Monte Carlo included: sample values are
pure functions of the seed).

All randomness flows from the single ``--seed`` through labeled sub-streams
("seq", "perm", "x"); an explicit ``random:seed=K`` permutation overrides
the derived stream.  Exit codes: 0 success, 1 verification mismatch,
2 usage, 3 domain error, 4 resource budget, 5 I/O.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import LacunariaError, WorkBudgetExceeded
from . import diophantine, permute, seqgen, simulate, spectra
from .rng import derive_seed

EXIT_OK = 0
EXIT_VERIFY_MISMATCH = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_RESOURCE = 4
EXIT_IO = 5


# ----------------------------------------------------------------------
# Spec resolution
# ----------------------------------------------------------------------

def resolve_sequence(spec: str, default_count: int | None, seed: int | None):
    """A path to a sequence file, or an inline spec.

    Inline forms: ``pow2[:N]``, ``pow2m1[:N]``, ``geometric:q:n1[:N]``,
    ``smooth:p1,p2[:N]``, ``rstar:alpha:a[:N[:seed]]``.  A missing N falls
    back to ``default_count`` (the experiment window).
    """
    path = Path(spec)
    if path.exists():
        return seqgen.read_sequence(path)
    fields = spec.split(":")
    kind = fields[0]

    def tail_count(position: int) -> int:
        if len(fields) > position:
            return int(fields[position])
        if default_count is None:
            raise ValueError(f"sequence spec {spec!r} needs an explicit length")
        return default_count

    if kind == "pow2":
        return seqgen.gen_power(2, 0, tail_count(1))
    if kind == "pow2m1":
        return seqgen.gen_power(2, -1, tail_count(1))
    if kind == "geometric":
        if len(fields) < 3:
            raise ValueError("geometric spec is geometric:q:n1[:N]")
        return seqgen.gen_geometric(Fraction(fields[1]), int(fields[2]), tail_count(3))
    if kind == "smooth":
        if len(fields) < 2:
            raise ValueError("smooth spec is smooth:p1,p2[:N]")
        primes = {int(p) for p in fields[1].split(",")}
        return seqgen.gen_smooth(primes, tail_count(2))
    if kind == "rstar":
        if len(fields) < 3:
            raise ValueError("rstar spec is rstar:alpha:a[:N[:seed]]")
        rseed = int(fields[4]) if len(fields) > 4 else (
            derive_seed(seed, "seq") if seed is not None else 0)
        params = seqgen.RStarParams(alpha=float(fields[1]), a=int(fields[2]),
                                    count=tail_count(3), seed=rseed)
        return seqgen.gen_random_rstar(params)
    raise ValueError(f"cannot resolve sequence spec {spec!r} (no such file, unknown kind)")


def resolve_permutation(spec: str | None, window: int, seed: int | None):
    """``identity`` (default), ``random[:seed=K]``, or a permutation file."""
    if spec is None or spec == "identity":
        return permute.identity(window)
    if spec.startswith("random"):
        _, _, rest = spec.partition(":")
        if rest.startswith("seed="):
            pseed = int(rest[len("seed="):])
        elif rest:
            pseed = int(rest)
        elif seed is not None:
            pseed = derive_seed(seed, "perm")
        else:
            raise ValueError("random permutation needs a seed")
        return permute.random_perm(window, pseed)
    path = Path(spec)
    if path.exists():
        return permute.read_permutation(path)
    raise ValueError(f"cannot resolve permutation spec {spec!r}")


# ----------------------------------------------------------------------
# Manifest plumbing
# ----------------------------------------------------------------------

def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(out_dir: Path, subcommand: str, params: dict,
                   outputs: list[Path], inputs: list[Path],
                   wall_time: float) -> Path:
    config_text = json.dumps({"subcommand": subcommand, "params": params},
                             sort_keys=True)
    manifest = {
        "tool": "lacunaria",
        "version": __version__,
        "subcommand": subcommand,
        "params": params,
        "config_sha256": hashlib.sha256(config_text.encode()).hexdigest(),
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {p.name: _sha256(p) for p in outputs},
        "wall_time_s": wall_time,
    }
    path = out_dir / "run.json"
    _write_json(path, manifest)
    return path


# ----------------------------------------------------------------------
# Command executors (shared by the CLI path and verify's replay)
# ----------------------------------------------------------------------

def run_seq(params: dict, out_dir: Path) -> list[Path]:
    kind = params["kind"]
    count = params["count"]
    if kind == "geometric":
        seq = seqgen.gen_geometric(Fraction(params["q"]), params["n1"], count)
    elif kind == "power":
        seq = seqgen.gen_power(params["base"], params["offset"], count)
    elif kind == "smooth":
        seq = seqgen.gen_smooth(set(params["primes"]), count,
                                include_one=params.get("include_one", True))
    elif kind == "rstar":
        seq = seqgen.gen_random_rstar(seqgen.RStarParams(
            alpha=params["alpha"], a=params["a"], count=count,
            seed=params["seed"], interval_form=params.get("interval_form", "trailing"),
        ))
    else:
        raise ValueError(f"unknown sequence kind {kind!r}")
    out = out_dir / "sequence.txt"
    seqgen.write_sequence(seq, out)
    return [out]

def run_dio(params: dict, out_dir: Path) -> list[Path]:
    seq = resolve_sequence(params["seq"], params.get("count"), params.get("seed"))
    count = params["count"]
    mode = params["mode"]
    outputs = []
    if mode in ("profile", "star-profile"):
        if mode == "profile":
            reports = diophantine.d2_profile(seq, params["coeff_bound"], count)
        else:
            reports = diophantine.d2star_profile(
                seq, params["coeff_bound"], count,
                diagonal=params.get("diagonal", "sum_zero"))
        jpath = out_dir / "dio_profile.json"
        with open(jpath, "w", encoding="utf-8") as fh:
            fh.write(diophantine.profile_to_json(reports))
        cpath = out_dir / "dio_profile.csv"
        diophantine.write_profile_csv(reports, cpath)
        outputs += [jpath, cpath]
    elif mode == "two-term":
        a, b, c = params["a"], params["b"], params["c"]
        n, wits = diophantine.count_two_term(
            seq, diophantine.TwoTermQuery(
                a=a, b=b, c=c, count=count,
                require_distinct=params.get("require_distinct", False)))
        jpath = out_dir / "dio_two_term.json"
        _write_json(jpath, {"a": a, "b": b, "c": str(c), "count": n,
                            "witnesses": [[k, l] for k, l in wits[:1000]]})
        outputs.append(jpath)
    elif mode == "multi":
        n, wits = diophantine.count_multi_term(
            seq, diophantine.MultiTermQuery(
                p=params["p"], coeff_bound=params["coeff_bound"], count=count,
                budget=params.get("budget", diophantine.DEFAULT_BUDGET)))
        jpath = out_dir / "dio_multi.json"
        _write_json(jpath, {
            "p": params["p"], "coeff_bound": params["coeff_bound"], "count": n,
            "witness_sample": [
                {"indices": list(idx), "coefficients": list(cs)}
                for idx, cs in wits],
        })
        outputs.append(jpath)
    elif mode == "signed":
        n, sols = diophantine.count_signed_nondegenerate(
            seq, params["p"], count,
            budget=params.get("budget", diophantine.DEFAULT_BUDGET))
        jpath = out_dir / "dio_signed.json"
        _write_json(jpath, {
            "p": params["p"], "count": n,
            "solutions": [
                {"indices": list(idx), "signs": list(signs)}
                for idx, signs in sols[:1000]],
        })
        outputs.append(jpath)
    elif mode == "ratio":
        ratios = diophantine.aibe_ratio(seq, params["a"], params["b"], count)
        jpath = out_dir / "dio_ratio.json"
        _write_json(jpath, {"a": params["a"], "b": params["b"],
                            "ratios": [[n, r] for n, r in ratios]})
        outputs.append(jpath)
    else:
        raise ValueError(f"unknown dio mode {mode!r}")
    return outputs

def run_perm(params: dict, out_dir: Path) -> list[Path]:
    mode = params["mode"]
    outputs = []
    if mode == "identity":
        perm = permute.identity(params["window"])
    elif mode == "random":
        perm = permute.random_perm(params["window"], params["perm_seed"])
    elif mode == "pairing":
        seq = resolve_sequence(params["seq"], None, params.get("seed"))
        sched_fields = params["blocks"].split(":")
        if sched_fields[0] == "paper":
            schedule = permute.BlockSchedule.paper_doubly_exponential(int(sched_fields[1]))
        elif sched_fields[0] == "geometric":
            schedule = permute.BlockSchedule.geometric_dominant(
                int(sched_fields[1]),
                factor=int(sched_fields[2]) if len(sched_fields) > 2 else 4,
                base_len=int(sched_fields[3]) if len(sched_fields) > 3 else 4)
        else:
            raise ValueError("blocks spec is paper:M or geometric:M[:factor[:base]]")
        gap_ratio = Fraction(params["gap_ratio"]) if params.get("gap_ratio") else None
        perm, cert = permute.build_pairing_counterexample(
            seq, params["a"], params["b"], schedule, gap_ratio,
            allow_zero_c=params.get("allow_zero_c", False))
        cpath = out_dir / "certificate.json"
        permute.write_certificate(cert, cpath)
        outputs.append(cpath)
    else:
        raise ValueError(f"unknown perm mode {mode!r}")
    ppath = out_dir / "permutation.txt"
    permute.write_permutation(perm, ppath)
    return [ppath] + outputs

def run_var(params: dict, out_dir: Path) -> list[Path]:
    poly = spectra.TrigPolynomial.parse(params["f"])
    payload = {"f": poly.format(), "l2_norm_sq": str(spectra.l2_norm_sq(poly)),
               "kac_variance": str(spectra.kac_variance(poly))}
    if params.get("seq"):
        count = params["count"]
        seq = resolve_sequence(params["seq"], count, params.get("seed"))
        perm = resolve_permutation(params.get("perm"), params.get("window", count),
                                   params.get("seed"))
        value = spectra.exact_variance(poly, seq, perm, count)
        payload.update({"count": count, "exact_variance": str(value),
                        "exact_variance_float": float(value)})
    out = out_dir / "variance.json"
    _write_json(out, payload)
    return [out]

def run_mix(params: dict, out_dir: Path) -> list[Path]:
    poly = spectra.TrigPolynomial.parse(params["f"])
    seq = resolve_sequence(params["seq"], None, params.get("seed"))
    perm = permute.read_permutation(params["perm"])
    cert = permute.read_certificate(params["cert"])
    profile = spectra.mixture_profile(poly, seq, perm, cert,
                                      freq_cutoff=params.get("cutoff"))
    payload = {"profile": profile.to_json_dict()}
    if params.get("charfn"):
        tol = params.get("quad_tol", 1e-10)
        payload["charfn"] = {
            str(s): spectra.mixture_charfn(profile, float(s), tol)
            for s in params["charfn"]
        }
    out = out_dir / "mixture.json"
    _write_json(out, payload)
    return [out]

def run_clt(params: dict, out_dir: Path) -> list[Path]:
    poly = spectra.TrigPolynomial.parse(params["f"])
    count = params["count"]
    seq = resolve_sequence(params["seq"], params.get("window", count), params.get("seed"))
    perm = resolve_permutation(params.get("perm"), params.get("window", count),
                               params.get("seed"))
    seed = derive_seed(params["seed"], "x")
    emp = simulate.clt_experiment(poly, seq, perm, count, params["samples"], seed,
                                  workers=params.get("threads", 1))
    stats = emp.summary()
    coeff_mass = sum(abs(float(a)) + abs(float(b)) for _, a, b in poly.terms())
    per_term_bound = 2 * math.pi * (2.0**-64 + 2.0**-53) * coeff_mass
    payload = {
        "f": poly.format(), "count": count, "samples": params["samples"],
        "seed": params["seed"], "sampling_stream_seed": seed,
        "mantissa_bits": emp.meta["mantissa_bits"],
        "statistics": stats.to_json_dict(),
        "error_bounds": {
            "per_term_eval_abs": per_term_bound,
            "sum_eval_abs": per_term_bound * count / (count ** 0.5),
        },
    }
    if params.get("ks"):
        kind, _, arg = params["ks"].partition(":")
        if kind == "gaussian":
            target = simulate.GaussianTarget(float(Fraction(arg)))
        elif kind == "mixture":
            with open(arg, "r", encoding="utf-8") as fh:
                data = json.load(fh)
            profile = spectra.MixtureProfile.from_json_dict(data["profile"])
            target = simulate.MixtureTarget(profile)
        else:
            raise ValueError("ks spec is gaussian:VAR or mixture:FILE")
        ks = simulate.ks_distance(emp, target)
        payload["ks"] = {"target": params["ks"], "distance": ks.distance,
                         "cdf_tolerance": ks.cdf_tolerance}
    outputs = []
    if params.get("keep_samples"):
        spath = out_dir / "samples.csv"
        with open(spath, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "value"])
            for i, v in enumerate(emp.samples):
                writer.writerow([i, repr(float(v))])
        outputs.append(spath)
    out = out_dir / "clt_summary.json"
    _write_json(out, payload)
    return [out] + outputs

def run_lil(params: dict, out_dir: Path) -> list[Path]:
    poly = spectra.TrigPolynomial.parse(params["f"])
    n_max = params["count"]
    seq = resolve_sequence(params["seq"], n_max, params.get("seed"))
    perm = resolve_permutation(params.get("perm"), n_max, params.get("seed"))
    variance = float(Fraction(params["variance"]))
    probe = simulate.PartialSumEvaluator(poly, seq, perm, n_max)
    xs = simulate.sample_points(probe.required, params["points"],
                                derive_seed(params["seed"], "x"))
    rows = []
    for i, x in enumerate(xs):
        traj = simulate.lil_trajectory(poly, seq, perm, x, n_max, variance)
        for n, ratio in traj.checkpoints:
            rows.append((i, n, ratio))
    cpath = out_dir / "lil_trajectories.csv"
    with open(cpath, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["point", "N", "running_max_ratio"])
        for i, n, ratio in rows:
            writer.writerow([i, n, repr(ratio)])
    finals = {}
    for i, n, ratio in rows:
        finals[i] = ratio
    jpath = out_dir / "lil_summary.json"
    _write_json(jpath, {
        "f": poly.format(), "n_max": n_max, "points": params["points"],
        "variance": params["variance"],
        "normalization": "|S_N| / sqrt(2 * variance * N * ln(ln(N)))",
        "final_ratios": {str(i): finals[i] for i in sorted(finals)},
    })
    return [cpath, jpath]


_EXECUTORS = {
    "seq": run_seq,
    "dio": run_dio,
    "perm": run_perm,
    "var": run_var,
    "mix": run_mix,
    "clt": run_clt,
    "lil": run_lil,
}


def execute(subcommand: str, params: dict, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    outputs = _EXECUTORS[subcommand](params, out_dir)
    wall = time.perf_counter() - started
    inputs = []
    for key in ("seq", "perm", "cert"):
        value = params.get(key)
        if value and Path(str(value)).exists():
            inputs.append(Path(str(value)))
    ks = params.get("ks", "")
    if ks.startswith("mixture:") and Path(ks.partition(":")[2]).exists():
        inputs.append(Path(ks.partition(":")[2]))
    return write_manifest(out_dir, subcommand, params, outputs, inputs, wall)


# ----------------------------------------------------------------------
# Verification
# ----------------------------------------------------------------------

def _first_json_divergence(a, b, path="$"):
    if type(a) is not type(b):
        return f"{path}: type {type(a).__name__} != {type(b).__name__}"
    if isinstance(a, dict):
        for key in sorted(set(a) | set(b)):
            if key not in a:
                return f"{path}.{key}: missing in original"
            if key not in b:
                return f"{path}.{key}: missing in replay"
            sub = _first_json_divergence(a[key], b[key], f"{path}.{key}")
            if sub:
                return sub
        return None
    if isinstance(a, list):
        if len(a) != len(b):
            return f"{path}: length {len(a)} != {len(b)}"
        for i, (x, y) in enumerate(zip(a, b)):
            sub = _first_json_divergence(x, y, f"{path}[{i}]")
            if sub:
                return sub
        return None
    if a != b:
        return f"{path}: {a!r} != {b!r}"
    return None


def verify_manifest(manifest_path: Path) -> tuple[bool, str | None]:
    """Replay the manifest's run and compare artifacts byte for byte."""
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    run_dir = manifest_path.parent
    for rel, digest in manifest["inputs"].items():
        p = Path(rel)
        if not p.exists():
            return False, f"input missing: {rel}"
        if _sha256(p) != digest:
            return False, f"input changed since the run: {rel}"
    for name, digest in manifest["outputs"].items():
        p = run_dir / name
        if not p.exists():
            return False, f"output missing: {name}"
        if _sha256(p) != digest:
            return False, f"output edited since the run: {name}"
    with tempfile.TemporaryDirectory() as tmp:
        replay_dir = Path(tmp)
        _EXECUTORS[manifest["subcommand"]](manifest["params"], replay_dir)
        for name, digest in manifest["outputs"].items():
            replayed = replay_dir / name
            if not replayed.exists():
                return False, f"replay produced no {name}"
            if _sha256(replayed) != digest:
                original = run_dir / name
                if name.endswith(".json"):
                    with open(original) as fa, open(replayed) as fb:
                        diff = _first_json_divergence(json.load(fa), json.load(fb))
                    return False, f"replay diverges in {name} at {diff}"
                return False, f"replay diverges in {name}"
    return True, None


# ----------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lacunaria",
        description="Exact-arithmetic and Monte Carlo experiments on permuted "
                    "lacunary trigonometric sums.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("seq", help="generate a sequence file")
    p.add_argument("--kind", required=True,
                   choices=["geometric", "power", "smooth", "rstar"])
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--q", help="geometric ratio, e.g. 3/2")
    p.add_argument("--n1", type=int, default=1)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--offset", type=int, default=0)
    p.add_argument("--primes", help="comma separated, e.g. 2,3")
    p.add_argument("--exclude-one", action="store_true")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--scale", type=int, default=50, help="rstar scale a")
    p.add_argument("--interval-form", choices=["trailing", "current"],
                   default="trailing")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("dio", help="Diophantine solution counting")
    p.add_argument("--seq", required=True)
    p.add_argument("--count", type=int, required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--profile", action="store_true")
    mode.add_argument("--star-profile", action="store_true")
    mode.add_argument("--two-term", nargs=3, metavar=("A", "B", "C"))
    mode.add_argument("--multi", type=int, metavar="P")
    mode.add_argument("--signed", type=int, metavar="P")
    mode.add_argument("--ratio", nargs=2, metavar=("A", "B"))
    p.add_argument("--coeff-bound", type=int, default=2)
    p.add_argument("--diagonal", choices=["sum_zero", "literal"], default="sum_zero")
    p.add_argument("--require-distinct", action="store_true")
    p.add_argument("--budget", type=int, default=diophantine.DEFAULT_BUDGET)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("perm", help="build a permutation window")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--identity", type=int, metavar="N")
    mode.add_argument("--random", nargs=2, metavar=("N", "SEED"))
    mode.add_argument("--pairing", nargs=2, metavar=("A", "B"))
    p.add_argument("--seq")
    p.add_argument("--blocks", default="geometric:2",
                   help="paper:M or geometric:M[:factor[:base]]")
    p.add_argument("--gap-ratio")
    p.add_argument("--allow-zero-c", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("var", help="exact variance computations")
    p.add_argument("--f", required=True, help='e.g. "cos:1=1,cos:2=1"')
    p.add_argument("--seq")
    p.add_argument("--perm")
    p.add_argument("--count", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("mix", help="limiting variance-mixture profile")
    p.add_argument("--f", required=True)
    p.add_argument("--seq", required=True)
    p.add_argument("--perm", required=True)
    p.add_argument("--cert", required=True)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--charfn", help="comma separated s values")
    p.add_argument("--quad-tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("clt", help="Monte Carlo of S_N / sqrt(N)")
    p.add_argument("--f", required=True)
    p.add_argument("--seq", required=True)
    p.add_argument("--perm")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--window", type=int)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--ks", help="gaussian:VAR or mixture:FILE")
    p.add_argument("--keep-samples", action="store_true")
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("lil", help="iterated-logarithm trajectories")
    p.add_argument("--f", required=True)
    p.add_argument("--seq", required=True)
    p.add_argument("--perm")
    p.add_argument("--count", type=int, required=True, help="N_max, a power of 2")
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--variance", required=True, help="limit variance, e.g. 1/2")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("verify", help="re-run a manifest and compare artifacts")
    p.add_argument("--manifest", required=True)
    return parser


def _params_from_args(args: argparse.Namespace) -> dict:
    sc = args.subcommand
    if sc == "seq":
        params = {"kind": args.kind, "count": args.count}
        if args.kind == "geometric":
            if not args.q:
                raise ValueError("geometric needs --q")
            params.update({"q": args.q, "n1": args.n1})
        elif args.kind == "power":
            params.update({"base": args.base, "offset": args.offset})
        elif args.kind == "smooth":
            if not args.primes:
                raise ValueError("smooth needs --primes")
            params.update({"primes": [int(p) for p in args.primes.split(",")],
                           "include_one": not args.exclude_one})
        elif args.kind == "rstar":
            params.update({"alpha": args.alpha, "a": args.scale,
                           "seed": args.seed, "interval_form": args.interval_form})
        return params
    if sc == "dio":
        params = {"seq": args.seq, "count": args.count, "seed": args.seed,
                  "coeff_bound": args.coeff_bound, "budget": args.budget}
        if args.profile:
            params["mode"] = "profile"
        elif args.star_profile:
            params.update({"mode": "star-profile", "diagonal": args.diagonal})
        elif args.two_term:
            a, b, c = args.two_term
            params.update({"mode": "two-term", "a": int(a), "b": int(b),
                           "c": int(c), "require_distinct": args.require_distinct})
        elif args.multi is not None:
            params.update({"mode": "multi", "p": args.multi})
        elif args.signed is not None:
            params.update({"mode": "signed", "p": args.signed})
        else:
            a, b = args.ratio
            params.update({"mode": "ratio", "a": int(a), "b": int(b)})
        return params
    if sc == "perm":
        if args.identity is not None:
            return {"mode": "identity", "window": args.identity}
        if args.random is not None:
            return {"mode": "random", "window": int(args.random[0]),
                    "perm_seed": int(args.random[1])}
        a, b = args.pairing
        if not args.seq:
            raise ValueError("pairing needs --seq")
        return {"mode": "pairing", "a": int(a), "b": int(b), "seq": args.seq,
                "blocks": args.blocks, "gap_ratio": args.gap_ratio,
                "allow_zero_c": args.allow_zero_c, "seed": args.seed}
    if sc == "var":
        params = {"f": args.f, "seed": args.seed}
        if args.seq:
            if args.count is None:
                raise ValueError("var over a sequence needs --count")
            params.update({"seq": args.seq, "count": args.count})
            if args.perm:
                params["perm"] = args.perm
            if args.window:
                params["window"] = args.window
        return params
    if sc == "mix":
        params = {"f": args.f, "seq": args.seq, "perm": args.perm,
                  "cert": args.cert, "seed": args.seed,
                  "quad_tol": args.quad_tol}
        if args.cutoff is not None:
            params["cutoff"] = args.cutoff
        if args.charfn:
            params["charfn"] = [float(s) for s in args.charfn.split(",")]
        return params
    if sc == "clt":
        params = {"f": args.f, "seq": args.seq, "count": args.count,
                  "samples": args.samples, "seed": args.seed,
                  "threads": args.threads, "keep_samples": args.keep_samples}
        if args.perm:
            params["perm"] = args.perm
        if args.window:
            params["window"] = args.window
        if args.ks:
            params["ks"] = args.ks
        return params
    if sc == "lil":
        params = {"f": args.f, "seq": args.seq, "count": args.count,
                  "points": args.points, "variance": args.variance,
                  "seed": args.seed}
        if args.perm:
            params["perm"] = args.perm
        return params
    raise ValueError(f"unknown subcommand {sc!r}")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "verify":
            ok, problem = verify_manifest(Path(args.manifest))
            if ok:
                print("verify: OK")
                return EXIT_OK
            print(f"verify: MISMATCH -- {problem}", file=sys.stderr)
            return EXIT_VERIFY_MISMATCH
        params = _params_from_args(args)
        manifest = execute(args.subcommand, params, Path(args.out_dir))
        print(f"wrote {manifest}")
        return EXIT_OK
    except WorkBudgetExceeded as err:
        print(f"resource limit: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except LacunariaError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
