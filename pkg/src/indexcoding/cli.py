"""Command-line surface: rank sweeps, single solves, solution verification.

Commands
--------
sweep   solve every requested rank with one or both solvers; write the
        tradeoff CSV plus a JSON run manifest (config echo, seeds, timings,
        per-rank status).
solve   solve a single rank; write a solution JSON with the code matrix,
        pattern, side-information sets and rates.
verify  reload a solution JSON and re-check alignment, numerical rank and
        operational decoding.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
Result files (CSV, solution JSON) are byte-identical across runs with the
same configuration, seed and kernel backend; the manifest records wall-clock
timings and is exempt from that guarantee.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, ic_model, kernels, linalg
from .altmin import AltMinConfig, altmin_solve
from .errors import IndexCodingError, InvalidInputError
from .pipeline import (
    SOLVER_ALTMIN,
    SOLVER_RIEMANNIAN,
    PipelineConfig,
    solve_one,
)
from .trust_region import TrustRegionConfig

# flat config-file keys mirroring the run configuration; CLI flags override
# file values, file values override these defaults
DEFAULTS = {
    "K": 16,
    "ranks": None,  # None means 1..K
    "solver": SOLVER_RIEMANNIAN,
    "seed": 0,
    "rho": 0.001,
    "eps": 0.01,
    "restarts": 10,
    "feasibility_tol": 1e-6,
    "tr_max_iterations": 100,
    "tr_grad_norm_tol": 1e-6,
    "altmin_max_outer": 50,
    "altmin_zero_tol": 1e-6,
    "altmin_stall_tol": 1e-8,
    "out": None,
    "format": "csv",
}

VERIFY_DEFAULT_TRIALS = 1000


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_verify(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


class _UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="indexcoding",
        description="Sparsity / low-rankness tradeoff solver for index coding.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p):
        p.add_argument("--K", type=int, default=None, help="number of users")
        p.add_argument(
            "--solver",
            choices=[SOLVER_RIEMANNIAN, SOLVER_ALTMIN, "both"],
            default=None,
        )
        p.add_argument("--seed", type=int, default=None, help="64-bit master seed")
        p.add_argument("--rho", type=float, default=None, help="sparsity weight")
        p.add_argument("--eps", type=float, default=None, help="smoothing parameter")
        p.add_argument("--restarts", type=int, default=None)
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--verbose", action="store_true")

    ps = sub.add_parser("sweep", help="solve ranks 1..K and emit the tradeoff curve")
    add_run_flags(ps)
    ps.add_argument("--ranks", default=None, help="rank range a..b or list a,b,c")

    pv = sub.add_parser("solve", help="solve a single rank")
    add_run_flags(pv)
    pv.add_argument("--rank", type=int, default=None, required=False)

    pf = sub.add_parser("verify", help="re-verify a solution JSON")
    pf.add_argument("solution_file")
    pf.add_argument("--tol", type=float, default=1e-6)
    pf.add_argument("--trials", type=int, default=VERIFY_DEFAULT_TRIALS)
    pf.add_argument("--seed", type=int, default=0)
    return parser


def _load_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise _UsageError(f"cannot read config file {args.config}: {exc}")
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise _UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    if getattr(args, "ranks", None) is not None:
        cfg["ranks"] = args.ranks
    if cfg["K"] is None or cfg["K"] < 1:
        raise _UsageError(f"--K must be >= 1, got {cfg['K']}")
    return cfg


def _parse_ranks(spec, K: int) -> list:
    if spec is None:
        return list(range(1, K + 1))
    if isinstance(spec, list):
        ranks = [int(r) for r in spec]
    else:
        text = str(spec)
        try:
            if ".." in text:
                lo, hi = text.split("..")
                ranks = list(range(int(lo), int(hi) + 1))
            else:
                ranks = [int(t) for t in text.split(",") if t.strip()]
        except ValueError:
            raise _UsageError(f"cannot parse ranks specification {text!r}")
    ranks = sorted(set(ranks))
    if not ranks or ranks[0] < 1 or ranks[-1] > K:
        raise _UsageError(f"ranks must lie in 1..{K}, got {ranks}")
    return ranks


def _pipeline_config(cfg: dict) -> PipelineConfig:
    tr = TrustRegionConfig(
        max_iterations=int(cfg["tr_max_iterations"]),
        grad_norm_tol=float(cfg["tr_grad_norm_tol"]),
    )
    return PipelineConfig(
        rho=float(cfg["rho"]),
        eps=float(cfg["eps"]),
        restarts=int(cfg["restarts"]),
        seed=int(cfg["seed"]),
        tr_config=tr,
        feasibility_tol=float(cfg["feasibility_tol"]),
    )


def _altmin_config(cfg: dict) -> AltMinConfig:
    return AltMinConfig(
        max_outer=int(cfg["altmin_max_outer"]),
        zero_tol=float(cfg["altmin_zero_tol"]),
        seed=int(cfg["seed"]),
        stall_tol=float(cfg["altmin_stall_tol"]),
    )


def _trace_printer(enabled: bool):
    if not enabled:
        return None

    def emit(rec):
        print(
            f"    tr iter={rec.iteration} f={rec.value:.6e} "
            f"|g|={rec.grad_norm:.3e} delta={rec.delta:.3e} "
            f"rho={rec.ratio:.3f} inner={rec.inner_iterations} "
            f"accepted={rec.accepted}",
            file=sys.stderr,
        )

    return emit


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    K = int(cfg["K"])
    ranks = _parse_ranks(cfg["ranks"], K)
    solver = cfg["solver"]
    run_riem = solver in (SOLVER_RIEMANNIAN, "both")
    run_altmin = solver in (SOLVER_ALTMIN, "both")
    pipe_cfg = _pipeline_config(cfg)
    alt_cfg = _altmin_config(cfg)
    trace = _trace_printer(args.verbose)

    per_rank = []
    t_start = time.perf_counter()
    for r in ranks:
        entry = {"rank": r}
        t0 = time.perf_counter()
        if run_riem:
            try:
                sol = solve_one(K, r, pipe_cfg, trace_fn=trace)
                entry["riemannian"] = {
                    "side_info_amount": sol.side_info_amount,
                    "feasible": sol.feasible,
                    "alignment_residual": sol.alignment_residual,
                }
            except IndexCodingError as exc:
                entry["riemannian"] = {"error": str(exc), "feasible": False}
        if run_altmin:
            try:
                sol = altmin_solve(K, r, alt_cfg)
                entry["altmin"] = {
                    "side_info_amount": sol.side_info_amount,
                    "feasible": sol.feasible,
                    "alignment_residual": sol.alignment_residual,
                }
            except IndexCodingError as exc:
                entry["altmin"] = {"error": str(exc), "feasible": False}
        entry["seconds"] = round(time.perf_counter() - t0, 6)
        per_rank.append(entry)
        if args.verbose:
            print(f"rank {r}: {entry}", file=sys.stderr)
    total_seconds = time.perf_counter() - t_start

    out_path = cfg["out"] or f"tradeoff_K{K}.{cfg['format']}"
    _write_sweep_output(out_path, cfg, ranks, per_rank, run_riem, run_altmin)
    manifest_path = _manifest_path(out_path)
    manifest = {
        "command": "sweep",
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "rng": "numpy PCG64 via SeedSequence(master, spawn_key=(solver, rank, restart))",
        "config": {k: cfg[k] for k in sorted(cfg)},
        "ranks": ranks,
        "per_rank": per_rank,
        "total_seconds": round(total_seconds, 6),
    }
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out_path} and {manifest_path}")
    return 0


def _sweep_table(ranks, rows, run_riem, run_altmin):
    """Column names plus one list of cell values per rank."""
    header = ["rank"]
    if run_riem:
        header.append("sparsity_riemannian")
    if run_altmin:
        header.append("sparsity_altmin")
    if run_riem:
        header.append("feasible_riemannian")
    if run_altmin:
        header.append("feasible_altmin")
    if run_riem:
        header.append("envelope_riemannian")

    table = []
    best = None
    for entry in rows:
        cells = [entry["rank"]]
        if run_riem:
            info = entry.get("riemannian", {})
            cells.append(info.get("side_info_amount", ""))
        if run_altmin:
            info = entry.get("altmin", {})
            cells.append(info.get("side_info_amount", ""))
        if run_riem:
            info = entry.get("riemannian", {})
            cells.append(bool(info.get("feasible", False)))
        if run_altmin:
            info = entry.get("altmin", {})
            cells.append(bool(info.get("feasible", False)))
        if run_riem:
            info = entry.get("riemannian", {})
            if info.get("feasible", False):
                s = info["side_info_amount"]
                best = s if best is None else min(best, s)
            cells.append("" if best is None else best)
        table.append(cells)
    return header, table


def _write_sweep_output(path, cfg, ranks, rows, run_riem, run_altmin) -> None:
    header, table = _sweep_table(ranks, rows, run_riem, run_altmin)
    if cfg["format"] == "csv":
        lines = [",".join(header)]
        for cells in table:
            lines.append(",".join(_csv_cell(c) for c in cells))
        data = "\n".join(lines) + "\n"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
    else:
        doc = {"columns": header, "rows": [[_json_cell(c) for c in r] for r in table]}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def _csv_cell(c) -> str:
    if isinstance(c, bool):
        return "true" if c else "false"
    return str(c)


def _json_cell(c):
    if c == "":
        return None
    return c


def _manifest_path(out_path: str) -> str:
    stem, dot, _ = out_path.rpartition(".")
    return (stem if dot else out_path) + "_manifest.json"


def _cmd_solve(args) -> int:
    cfg = _load_config(args)
    K = int(cfg["K"])
    rank = getattr(args, "rank", None)
    if rank is None:
        raise _UsageError("solve requires --rank")
    if not (1 <= rank <= K):
        raise _UsageError(f"--rank must lie in 1..{K}, got {rank}")
    solver = cfg["solver"]
    if solver == "both":
        raise _UsageError("solve requires a single solver (riemannian or altmin)")
    trace = _trace_printer(args.verbose)

    if solver == SOLVER_RIEMANNIAN:
        sol = solve_one(K, rank, _pipeline_config(cfg), trace_fn=trace)
    else:
        sol = altmin_solve(K, rank, _altmin_config(cfg))

    side = sol.side_information()
    doc = {
        "K": K,
        "rank": rank,
        "side_info_amount": sol.side_info_amount,
        "feasible": sol.feasible,
        "X": [[_sig12(v) for v in row] for row in sol.X],
        "pattern": [[int(v) for v in row] for row in sol.pattern.P],
        "side_info_sets": [[j + 1 for j in s] for s in side.sets],
        "sum_rate": _sig12(ic_model.sum_rate(K, rank)),
    }
    out_path = cfg["out"] or f"solution_K{K}_r{rank}.json"
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out_path} (s={sol.side_info_amount}, feasible={sol.feasible})")
    return 0


def _sig12(v: float) -> float:
    """Round to 12 significant digits for stable serialized output."""
    return float(f"{float(v):.12g}")


def _cmd_verify(args) -> int:
    try:
        with open(args.solution_file, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot parse {args.solution_file}: {exc}", file=sys.stderr)
        return 2

    try:
        K = int(doc["K"])
        rank = int(doc["rank"])
        X = np.array(doc["X"], dtype=np.float64)
        from .objectives import SparsityPattern

        pattern = SparsityPattern(np.array(doc["pattern"], dtype=np.float64))
        sets = tuple(tuple(int(j) - 1 for j in s) for s in doc["side_info_sets"])
        side = ic_model.SideInformation(K, sets)
        if X.shape != (K, K):
            raise InvalidInputError(f"X has shape {X.shape}, expected ({K}, {K})")
    except (KeyError, TypeError, ValueError, InvalidInputError) as exc:
        print(f"error: malformed solution document: {exc}", file=sys.stderr)
        return 2

    tol = args.tol
    failures = []

    report = ic_model.verify_alignment(X, pattern, tol)
    print(
        f"alignment: max residual {report.max_residual:.3e} at "
        f"{report.location} (tol {tol:.1e}) -> "
        f"{'pass' if report.passed else 'FAIL'}"
    )
    if not report.passed:
        failures.append("alignment")

    nrank = linalg.numerical_rank(X)
    print(f"numerical rank: {nrank} (declared {rank}) -> "
          f"{'pass' if nrank <= rank else 'FAIL'}")
    if nrank > rank:
        failures.append("rank")

    try:
        code = _code_from_matrix(X, nrank)
        err = ic_model.decode_simulation(code, side, args.trials, args.seed)
        print(
            f"decode: max relative error {err:.3e} over {args.trials} trials "
            f"-> {'pass' if err <= tol else 'FAIL'}"
        )
        if err > tol:
            failures.append("decode")
    except (InvalidInputError, IndexCodingError) as exc:
        print(f"decode: cannot simulate ({exc}) -> FAIL")
        failures.append("decode")

    if failures:
        print(f"verification FAILED: {', '.join(failures)}")
        return 1
    print("verification passed")
    return 0


def _code_from_matrix(X: np.ndarray, nrank: int) -> ic_model.IndexCode:
    """Factor X via SVD truncated at its numerical rank to recover a code."""
    nrank = max(nrank, 1)
    u, s, vt = np.linalg.svd(X)
    decoders = u[:, :nrank] * s[:nrank]
    precoders = vt[:nrank, :].T
    return ic_model.IndexCode(N=nrank, precoders=precoders, decoders=decoders)


if __name__ == "__main__":
    sys.exit(main())
