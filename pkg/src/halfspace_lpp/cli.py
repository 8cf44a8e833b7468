"""Command-line orchestration for the simulation/kernel experiments.

Subcommands: simulate, exact-law, kernel-eval, converge, verify-lemmas,
distribution, report.  A single JSON config drives each run; --seed,
--workers, --out override the corresponding config fields.  Every output
embeds the fully resolved config, the seed, and a sha256 content hash of the
resolved config, and rerunning with the same config reproduces the files
byte for byte.

Exit codes: 0 success, 1 usage/config error, 2 acceptance-contract failure,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .checks import converge_check, verify_descent_grid
from .contours import ContourError, QuadratureError
from .kernels import (AiryParameterError, KernelContext, KernelDomainError,
                      PrelimitContext, TruncationError, airy_wanderer, kgeo,
                      limit_rhs, prelimit_kernel)
from .mc import (g1_corner_samples, lln_profile, profile_samples,
                 top_curve_fluctuations)
from .model import (ModelParams, ParameterError, RangeError, lambda_profile,
                    rescale, sample_weights)
from .pfaffian import TailBoundError, gap_probability
from .schur import GuardError, SchurWeightContext, enumerate_law
from .scaling import DomainError, scaling_constants
from .tw import EmpiricalDistribution, FredholmError, ks_distance, tw_gue

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONTRACT = 2
EXIT_NUMERICAL = 3

_SCHEMA = "# schema=v1"


class ContractFailure(RuntimeError):
    pass


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(_canonical_json(cfg).encode()).hexdigest()


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [_SCHEMA, ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _metadata(cfg: dict, extra: dict | None = None) -> dict:
    meta = {"config": cfg, "config_sha256": _config_hash(cfg),
            "seed": cfg.get("seed", 0), "tool_version": __version__}
    if extra:
        meta.update(extra)
    return meta


def _model_params(cfg: dict) -> ModelParams:
    spikes = tuple((int(l), float(a)) for l, a in cfg.get("spikes", []))
    return ModelParams(q=float(cfg["q"]), N=int(cfg["N"]),
                       c=float(cfg.get("c", 0.0)),
                       kappa=float(cfg.get("kappa", 0.5)), spikes=spikes,
                       critical_mode=bool(cfg.get("critical_mode", False)),
                       varpi=float(cfg.get("varpi", 0.0)),
                       seed=int(cfg.get("seed", 0)))


def cmd_simulate(cfg: dict, out: Path, workers: int) -> int:
    params = _model_params(cfg)
    reps = int(cfg.get("samples", 1))
    t_grid = [float(t) for t in cfg.get("t_grid", [])]
    num_curves = int(cfg.get("curves", 6))
    consts = params.constants
    profs = profile_samples(params, reps, workers=workers)
    rows = []
    for rep, lambdas in enumerate(profs):
        for m, lam in enumerate(lambdas):
            for i, part in enumerate(lam[:num_curves]):
                rows.append((rep, m, i + 1, part))
    write_csv(out / "profiles.csv", ["sample", "m", "curve", "value"], rows)
    if t_grid:
        rrows = []
        for rep in range(reps):
            from .model import LambdaProfile
            prof = LambdaProfile(N=params.N,
                                 lambdas=[tuple(l) for l in profs[rep]])
            ens = rescale(prof, consts, t_grid, num_curves=num_curves)
            for i in range(num_curves):
                for k, t in enumerate(t_grid):
                    rrows.append((rep, t, i + 1, float(ens.values[i, k])))
        write_csv(out / "rescaled.csv", ["sample", "t", "curve", "value"], rrows)
    extra = {"constants": consts.as_dict(),
             "zero_boundary": params.c == 0.0 and not params.critical_mode}
    if cfg.get("lln"):
        prof = lln_profile(params, reps, workers=workers)
        q = params.q
        ms = np.arange(1, params.N + 1)
        hfun = q * (q + 2.0 * np.sqrt(ms / params.N) + q * ms / params.N) / (1 - q * q)
        lo = int(cfg.get("lln_m_min", max(1, params.N // 10)))
        sup = float(np.max(np.abs(prof[lo - 1:] - hfun[lo - 1:])))
        extra["lln"] = {"sup_deviation": sup, "m_min": lo,
                        "threshold": cfg.get("lln_threshold", 0.1)}
        write_csv(out / "lln.csv", ["m", "mean_lambda1_over_N", "h_m_over_N"],
                  [(int(m), float(prof[m - 1]), float(hfun[m - 1])) for m in ms])
        if sup >= float(cfg.get("lln_threshold", 0.1)):
            write_json(out / "metadata.json", _metadata(cfg, extra))
            raise ContractFailure(f"LLN sup deviation {sup} above threshold")
    write_json(out / "metadata.json", _metadata(cfg, extra))
    return EXIT_OK


def cmd_exact_law(cfg: dict, out: Path, workers: int) -> int:
    params = _model_params(cfg)
    if params.N > 3:
        raise ParameterError("exact-law requires N <= 3")
    cap = int(cfg.get("weight_cap", 25))
    n_samples = int(cfg.get("samples", 10 ** 5))
    a = [params.q] * params.N
    ctx = SchurWeightContext(a, params.c)
    law, deficit = enumerate_law(ctx, cap)
    write_json(out / "law.json", _metadata(cfg, {
        "deficit": deficit,
        "law": {repr(k): v for k, v in sorted(law.items())},
    }))
    profs = profile_samples(params, n_samples, workers=workers)
    from collections import Counter
    counts = Counter()
    for lambdas in profs:
        seq = tuple(tuple(lam) for lam in lambdas[1:][::-1])  # (lam(N,N)..lam(1,N))
        counts[seq] += 1
    pooled_expected = 0.0
    pooled_observed = 0
    zrows = []
    min_expected = float(cfg.get("min_expected", 10.0))
    for seq, p in sorted(law.items()):
        e = n_samples * p
        obs = counts.get(seq, 0)
        if e < min_expected:
            pooled_expected += e
            pooled_observed += obs
            continue
        z = (obs - e) / np.sqrt(e * (1.0 - p))
        zrows.append((repr(seq), p, obs, float(z)))
    seen = {seq for seq, p in law.items() if n_samples * p >= min_expected}
    rest_obs = n_samples - sum(counts[s] for s in counts if s in seen)
    rest_p = 1.0 - sum(p for s, p in law.items() if s in seen)
    if rest_p > 0:
        z = (rest_obs - n_samples * rest_p) / np.sqrt(n_samples * rest_p * (1 - rest_p))
        zrows.append(("<pooled remainder>", rest_p, rest_obs, float(z)))
    write_csv(out / "zscores.csv", ["sequence", "probability", "observed", "z"],
              zrows)
    zmax = max(abs(z) for _, _, _, z in zrows)
    write_json(out / "comparison.json", _metadata(cfg, {
        "samples": n_samples, "max_abs_z": zmax, "deficit": deficit,
        "pooling_note": f"cells with expected count < {min_expected} pooled",
    }))
    if deficit >= float(cfg.get("deficit_tol", 1e-6)):
        raise ContractFailure(f"truncated mass deficit {deficit} too large "
                              f"(raise weight_cap)")
    if zmax >= float(cfg.get("z_threshold", 4.0)):
        raise ContractFailure(f"max |z| = {zmax} >= threshold")
    return EXIT_OK


def cmd_kernel_eval(cfg: dict, out: Path, workers: int) -> int:
    kind = cfg.get("kernel", "geo")
    rows = []
    if kind == "geo":
        ctx = KernelContext(N=int(cfg["N"]), M=tuple(cfg["M"]), q=float(cfg["q"]),
                            c=float(cfg.get("c", 0.0)),
                            spike_a=tuple(cfg.get("spike_a", [])))
        for comp, u, x, v, y in cfg["points"]:
            val = kgeo(str(comp), int(u), int(x), int(v), int(y), ctx)
            rows.append((comp, u, x, v, y, val.real, val.imag))
        header = ["component", "u", "x", "v", "y", "re", "im"]
    elif kind == "prelimit":
        consts = scaling_constants(float(cfg["q"]), float(cfg["kappa"]))
        pctx = PrelimitContext(consts=consts, N=int(cfg["N"]),
                               mode=cfg.get("mode", "subcritical"),
                               c=float(cfg.get("c", 0.0)),
                               spikes_alpha=tuple(cfg.get("spikes_alpha", [])),
                               varpi=float(cfg.get("varpi", 0.0)))
        for comp, s, x, t, y in cfg["points"]:
            val = prelimit_kernel(str(comp), float(s), float(x), float(t),
                                  float(y), pctx)
            rows.append((comp, s, x, t, y, complex(val).real, complex(val).imag))
        header = ["component", "s", "x", "t", "y", "re", "im"]
    elif kind == "airy":
        for t1, x1, t2, x2 in cfg["points"]:
            val = airy_wanderer(float(t1), float(x1), float(t2), float(x2),
                                A=tuple(cfg.get("A", [])),
                                B=tuple(cfg.get("B", [])))
            rows.append((t1, x1, t2, x2, val))
        header = ["t1", "x1", "t2", "x2", "value"]
    elif kind == "limit":
        consts = scaling_constants(float(cfg["q"]), float(cfg["kappa"]))
        for s, x, t, y in cfg["points"]:
            val = limit_rhs(float(s), float(x), float(t), float(y), consts,
                            spikes_alpha=tuple(cfg.get("spikes_alpha", [])),
                            mode=cfg.get("mode", "subcritical"),
                            varpi=float(cfg.get("varpi", 0.0)))
            rows.append((s, x, t, y, val))
        header = ["s", "x", "t", "y", "value"]
    else:
        raise ParameterError(f"unknown kernel kind {kind!r}")
    write_csv(out / "kernel.csv", header, rows)
    write_json(out / "metadata.json", _metadata(cfg))
    return EXIT_OK


def cmd_converge(cfg: dict, out: Path, workers: int) -> int:
    consts = scaling_constants(float(cfg.get("q", 0.5)), float(cfg.get("kappa", 0.25)))
    points = [tuple(float(v) for v in p) for p in
              cfg.get("points", [(0, 0, 0, 0), (0.3, 0.5, -0.2, -0.4), (1, -1, 0, 2)])]
    n_list = [int(n) for n in cfg.get("N_list", [100, 1000, 10000, 100000, 1000000])]
    mode = cfg.get("mode", "subcritical")
    rep = converge_check(points, n_list, consts, mode=mode,
                         c=float(cfg.get("c", 0.5)),
                         spikes_alpha=tuple(cfg.get("spikes_alpha", [])),
                         varpi=float(cfg.get("varpi", 0.0)),
                         threshold=float(cfg.get("threshold", 2e-2)),
                         monotone_from=int(cfg.get("monotone_from", 0)))
    write_csv(out / "convergence.csv",
              ["s", "x", "t", "y", "N", "kernel_re", "kernel_im", "limit",
               "abs_err", "rel_err"],
              [(r.point[0], r.point[1], r.point[2], r.point[3], r.N,
                r.kernel.real, r.kernel.imag, r.limit, r.abs_err, r.rel_err)
               for r in rep.rows])
    write_json(out / "convergence.json", _metadata(cfg, rep.as_dict()))
    ok, fails = rep.contract()
    if not ok:
        raise ContractFailure("; ".join(fails))
    return EXIT_OK


def cmd_verify_lemmas(cfg: dict, out: Path, workers: int) -> int:
    qs = tuple(cfg.get("q_values", (0.3, 0.5, 0.7)))
    ks = tuple(cfg.get("kappa_values", (0.2, 0.5, 0.8)))
    reports = verify_descent_grid(q_values=qs, kappa_values=ks)
    rows = []
    for rep in reports:
        for r in rep.rows:
            rows.append((rep.q, rep.kappa, r.name, r.point, int(r.passed), r.detail))
    write_csv(out / "descent.csv",
              ["q", "kappa", "check", "point", "passed", "detail"], rows)
    all_ok = all(rep.passed for rep in reports)
    write_json(out / "descent.json", _metadata(cfg, {
        "passed": all_ok, "reports": [rep.as_dict() for rep in reports]}))
    if not all_ok:
        raise ContractFailure("descent-lemma grid has failures (see descent.csv)")
    return EXIT_OK


def cmd_distribution(cfg: dict, out: Path, workers: int) -> int:
    kind = cfg.get("distribution", "tw")
    params = _model_params(cfg)
    n_samples = int(cfg.get("samples", 5000))
    if kind == "tw":
        samples = top_curve_fluctuations(params, n_samples, workers=workers)
        grid = np.linspace(float(cfg.get("s_min", -6.0)),
                           float(cfg.get("s_max", 4.0)),
                           int(cfg.get("grid_points", 201)))
        table = tw_gue(grid)
        emp = EmpiricalDistribution(samples)
        ks = ks_distance(emp, lambda x: float(np.interp(x, table.s, table.cdf,
                                                        left=0.0, right=1.0)))
        write_csv(out / "cdf.csv", ["s", "F2", "empirical"],
                  [(float(s), float(c), float(emp.cdf(s)))
                   for s, c in zip(table.s, table.cdf)])
        result = {"ks": float(ks), "samples": n_samples,
                  "tw_mean": table.mean, "tw_variance": table.variance,
                  "threshold": float(cfg.get("ks_threshold", 0.08))}
        write_json(out / "distribution.json", _metadata(cfg, result))
        if ks >= result["threshold"]:
            raise ContractFailure(f"KS distance {ks} above threshold")
        return EXIT_OK
    if kind == "finite_n":
        samples = g1_corner_samples(params, n_samples, workers=workers)
        ctx = KernelContext(N=params.N, M=(params.N,), q=params.q, c=params.c)
        qs = np.quantile(samples, [0.02, 0.98])
        grid = np.arange(int(qs[0]) - 1, int(qs[1]) + 2)
        rows = []
        worst = 0.0
        for sthr in grid:
            p_exact = gap_probability(int(sthr), 1, ctx)
            p_emp = float(np.mean(samples <= sthr))
            se = np.sqrt(max(p_exact * (1 - p_exact), 1e-12) / n_samples)
            zdev = abs(p_emp - p_exact) / se
            worst = max(worst, zdev)
            rows.append((int(sthr), p_exact, p_emp, float(se), float(zdev)))
        write_csv(out / "cdf.csv",
                  ["s", "gap_probability", "empirical", "stderr", "z"], rows)
        result = {"max_z": worst, "samples": n_samples,
                  "threshold": float(cfg.get("z_threshold", 3.0))}
        write_json(out / "distribution.json", _metadata(cfg, result))
        if worst >= result["threshold"]:
            raise ContractFailure(f"finite-N CDF deviates {worst} standard errors")
        return EXIT_OK
    raise ParameterError(f"unknown distribution kind {kind!r}")


def cmd_report(cfg: dict, out: Path, workers: int) -> int:
    src = Path(cfg.get("dir", out))
    found = sorted(src.rglob("*.json"))
    found = [p for p in found if p.name != "report.json"]
    if not found:
        raise ParameterError(f"no experiments found under {src}")
    merged = {}
    overall = True
    for p in found:
        try:
            doc = json.loads(p.read_text())
        except json.JSONDecodeError:
            continue
        merged[str(p.relative_to(src))] = doc
        for key in ("passed", "contract_ok"):
            if key in doc and doc[key] is False:
                overall = False
        if "ks" in doc and "threshold" in doc:
            overall = overall and doc["ks"] < doc["threshold"]
    write_json(out / "report.json", _metadata(cfg, {
        "experiments": sorted(merged), "overall_pass": overall,
        "documents": merged}))
    return EXIT_OK if overall else EXIT_CONTRACT


_COMMANDS = {
    "simulate": cmd_simulate,
    "exact-law": cmd_exact_law,
    "kernel-eval": cmd_kernel_eval,
    "converge": cmd_converge,
    "verify-lemmas": cmd_verify_lemmas,
    "distribution": cmd_distribution,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hslpp",
        description="half-space geometric LPP: simulation, exact kernels, limits")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--seed", type=int, help="override config seed")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", type=Path, default=Path("."))
    parser.add_argument("--set", action="append", default=[], metavar="KEY=JSONVAL",
                        help="override a config field, e.g. --set N=100")
    args = parser.parse_args(argv)

    cfg = {}
    try:
        if args.config is not None:
            cfg = json.loads(Path(args.config).read_text())
        for item in args.set:
            key, _, raw = item.partition("=")
            if not _:
                raise ParameterError(f"--set needs KEY=VALUE, got {item!r}")
            try:
                cfg[key] = json.loads(raw)
            except json.JSONDecodeError:
                cfg[key] = raw
        if args.seed is not None:
            cfg["seed"] = args.seed
        args.out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, args.out, args.workers)
    except ContractFailure as exc:
        print(f"contract failure: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (ParameterError, DomainError, GuardError, KeyError, RangeError,
            json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"config error: {exc!r}", file=sys.stderr)
        return EXIT_USAGE
    except (KernelDomainError, TruncationError, ContourError, QuadratureError,
            AiryParameterError, FredholmError, TailBoundError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
