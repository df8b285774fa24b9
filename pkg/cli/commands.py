"""
EntroFlux 命令调度模块

六个子命令各自组装实验、写出产物并返回判定报告;
dispatch 把判定映射为退出码 (0 通过 / 1 失败 / 2 错误)
"""

import dataclasses
import logging
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from config import config
from harness import uniqueness_probe
from hypotheses import (
    SampleDesign,
    check_derivatives,
    check_H1,
    check_H2,
    check_H2prime,
    check_H3,
    check_H4,
    check_H5,
    estimate_H5_constant,
    sample_box,
    sample_directions,
)
from measures import check_domination, family_concentration, family_relations, radon_nikodym, recession_sweep, time_slices
from orlicz import NFUNCTIONS, essentially_stronger_check, fenchel_young_check, validate_nfunction
from reporting import metadata_header, overall_verdict, summarize_reports, write_csv, write_json_report
from reporting.snapshots import save_trajectory
from solver import coarse_average, coarsening_ratio, run, run_family, weak_residual
from systems import default_box
from systems.base import SystemSpec
from utils.errors import EntroFluxError, MaskedAll
from utils.helpers import format_verdict, is_nonincreasing

from .runconfig import RunConfig, config_hash

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2
RELATIVE = ("eta_rel", "F_rel")
# 数值共轭的黄金分割精度
FENCHEL_YOUNG_TOL = 1e-6

Reports = Dict[str, Dict]


@dataclasses.dataclass
class Context:
    """一次命令运行的环境: 配置、系统、输出位置与元数据头"""

    cfg: RunConfig
    system: SystemSpec
    out_dir: Path
    report_path: Path
    meta: Dict
    threads: int


def _layout(out: Optional[Path], cfg: RunConfig, default_name: str) -> Tuple[Path, Path]:
    """--out 以 .json 结尾时即为报告路径, 否则视为输出目录"""
    out = Path(cfg.output["dir"]) if out is None else Path(out)
    if out.suffix == ".json":
        return out.parent, out
    return out, out / default_name


def _designs(ctx: Context) -> Tuple[SampleDesign, SampleDesign]:
    """假设检验用的 u 与 U 采样设计"""
    h = ctx.cfg.hypotheses
    box = tuple(tuple(b) for b in h["box"]) if h["box"] is not None else default_box(ctx.system)
    s_grid = np.geomspace(h["s_min"], h["s_max"], int(h["s_points"]))
    design = SampleDesign(
        compact_box=box,
        n_samples=int(h["samples"]),
        ray_directions=int(h["ray_directions"]),
        s_grid=s_grid,
        seed=ctx.cfg.seed,
    )
    design_U = dataclasses.replace(design, n_samples=int(h["reference_samples"]), seed=ctx.cfg.seed + 1)
    return design, design_U


# ─── check-hypotheses ──────────────────────────────────────────────

def run_check_hypotheses(ctx: Context) -> Reports:
    system = ctx.system
    design, design_U = _designs(ctx)
    print(f"Checking structural hypotheses for {system.name} ({design.n_samples} samples, seed {ctx.cfg.seed})...")
    checks = [
        lambda: check_H1(system, design),
        lambda: check_H2(system, design),
        lambda: check_H3(system, design),
        lambda: check_derivatives(system, design),
        lambda: check_H4(system, design),
        lambda: check_H5(system, design, design_U),
    ]
    if system.constraint is not None:
        ladder = ctx.cfg.hypotheses["constraint_ladder"]
        checks.append(lambda: check_H2prime(system, N_ladder=ladder, seed=ctx.cfg.seed))

    results = []
    for check in checks:
        report = check()
        print(f"  {report.summary_line()}")
        results.append(report)

    payload = {"system": system.name, "hypotheses": [r.to_dict() for r in results]}
    write_json_report(ctx.report_path, payload, ctx.meta)
    return {r.hypothesis: r.to_dict() for r in results}


# ─── simulate ──────────────────────────────────────────────────────

def run_simulate(ctx: Context) -> Reports:
    cfg, system = ctx.cfg, ctx.system
    spec = cfg.build_initial()
    grid = cfg.build_grid(store_every_step=True)
    print(f"Simulating {system.name} ({spec.kind}) on N={grid.N}, d={grid.d} to T={grid.T:g}...")
    traj = run(system, grid, spec, scheme=cfg.grid["scheme"])

    # 快照只保留快照时间上的状态
    marks = grid.snapshot_times()
    kept = [s for s in traj.snapshots if np.any(np.isclose(marks, s.t, rtol=0.0, atol=1e-12))]
    files = save_trajectory(dataclasses.replace(traj, snapshots=kept), ctx.out_dir / "snapshots")
    write_csv(ctx.out_dir / "production.csv", traj.production, ctx.meta)
    weak = weak_residual(traj, system)
    write_csv(ctx.out_dir / "weak_residual.csv", weak, ctx.meta)
    print(f"  wrote {len(files)} snapshots and {len(traj.production)} production rows")

    mass = traj.total(system, "A")
    scale = max(float(np.max(np.abs(mass[0]))), 1.0)
    drift = float(np.max(np.abs(mass - mass[0]))) / scale
    entropy = traj.total(system)
    entropy_tests = weak.loc[weak["kind"] == "entropy", "residual"]
    report = {
        "system": system.name,
        "scheme": cfg.grid["scheme"],
        "N": grid.N,
        "T": grid.T,
        "steps": int(len(traj.production)),
        "snapshots": len(files),
        "clamps": int(traj.final.clamps),
        "conservation_drift": drift,
        "entropy_nonincreasing": is_nonincreasing(entropy, atol=config.CONSERVATION_TOL),
        "entropy_test_min": float(entropy_tests.min()) if len(entropy_tests) else None,
        "flux_residual_max": float(weak.loc[weak["kind"] == "flux", "residual"].abs().max()),
    }
    report["verdict"] = bool(drift <= config.CONSERVATION_TOL and report["entropy_nonincreasing"])
    write_json_report(ctx.report_path, report, ctx.meta)
    return {"simulate": report}


# ─── concentration ─────────────────────────────────────────────────

def _mass_frame(conc) -> pd.DataFrame:
    return pd.DataFrame(conc.to_records(), columns=["cell", "k", "mass"])


def run_concentration(ctx: Context) -> Reports:
    cfg, system = ctx.cfg, ctx.system
    m = cfg.measures
    spec = cfg.build_initial()
    ladder = cfg.grid["N_ladder"]
    print(f"Generating {system.name} family on N={ladder}...")
    family = run_family(system, cfg.build_grid(N=ladder[0]), spec, ladder, cfg.grid["scheme"], max_workers=ctx.threads)

    reports: Reports = {}
    fields = {}
    payload = {"system": system.name, "N_ladder": ladder, "k_ladder": m["k_ladder"], "masses": {}, "slices": {}}
    for quantity in m["quantities"]:
        conc = family_concentration(system, family, quantity, m["k_ladder"], m["coarse_N"], m["slab_edges"])
        fields[quantity] = conc
        payload["masses"][quantity] = conc.to_records()
        payload["slices"][quantity] = [
            {"edges": piece.slab_edges.tolist(), "total": piece.total_extrapolated().tolist()}
            for piece in time_slices(conc)
        ]
        write_csv(ctx.out_dir / f"concentration_{quantity}.csv", _mass_frame(conc), ctx.meta)
        total = conc.total_extrapolated()
        print(f"  m_{quantity}: extrapolated total {np.array2string(total, precision=3)}")
        if conc.nonnegative:
            reports[f"m_{quantity}"] = {"verdict": bool(np.all(conc.extrapolated >= -1e-12)), "total": total}

    if "eta" in fields and "A" in fields:
        design, design_U = _designs(ctx)
        C_A = check_H4(system, design).constants["C_A"]
        dom = check_domination(fields["A"].extrapolated, fields["eta"].extrapolated, C_A)
        reports["domination"] = {"verdict": dom["passed"], "C_A": C_A, **dom}
        print(f"  |m_A| <= C_A m_eta: {format_verdict(dom['passed'])} (worst ratio {dom['worst_ratio']:.3e})")

        C = estimate_H5_constant(system, design, design_U)["C"]
        finest = family[max(family)]
        ratio = coarsening_ratio(finest.grid.N, m["coarse_N"])
        V = coarse_average(finest.final.v, system.space_dim, ratio).reshape(-1, system.state_dim)
        U, _ = system.invert(V, False)
        rel = family_relations(system, family, U, C, m["k_ladder"], m["coarse_N"])
        reports["relations"] = {"verdict": rel["positive_holds"] and rel["bound_holds"], "C": C, **rel}

        if m["epsilon_ladder"] is not None:
            try:
                density = radon_nikodym(
                    fields["A"].extrapolated, fields["eta"].extrapolated[:, 0],
                    m["coarse_N"], system.space_dim, m["epsilon_ladder"],
                )
                payload["radon_nikodym"] = {
                    "epsilons": density.epsilons,
                    "masked_cells": int(density.mask.sum()),
                    "estimate": density.estimate,
                }
            except MaskedAll as exc:
                logger.info("%s", exc)
                payload["radon_nikodym"] = {"masked_cells": "all"}

    payload["checks"] = reports
    write_json_report(ctx.report_path, payload, ctx.meta)
    return reports


# ─── recession ─────────────────────────────────────────────────────

def run_recession(ctx: Context) -> Reports:
    cfg, system = ctx.cfg, ctx.system
    m = cfg.measures
    count = int(m["recession_probes"])
    rng = np.random.default_rng(cfg.seed)
    directions = sample_directions(system, count, rng)
    design, _ = _designs(ctx)
    U_samples = sample_box(design, count, rng)
    s_grid = np.geomspace(1.0, float(m["recession_s_max"]), 9)
    print(f"Probing recession functions of {system.name} along {count} directions...")

    reports: Reports = {}
    rows = []
    for quantity in m["recession_quantities"]:
        results = recession_sweep(system, quantity, directions, U_samples if quantity in RELATIVE else None, s_grid)
        norms = [float(np.max(np.abs(np.atleast_1d(r["value"])))) for r in results]
        values = [float(np.min(np.atleast_1d(r["value"]))) for r in results]
        for r, norm in zip(results, norms):
            rows.append({
                "quantity": quantity,
                "probe": r["probe"],
                "value_norm": norm,
                "cauchy": r["cauchy"],
                "discrepancy": r.get("discrepancy", np.nan),
                "truncated": r["truncated"],
            })
        passed = all(np.isfinite(norms))
        if quantity in RELATIVE:
            passed = passed and all(r["agrees"] for r in results)
        if quantity == "eta_rel":
            passed = passed and min(values) >= -config.RATIO_LIMIT_TOL
        if quantity == "A" and system.name == "euler":
            passed = passed and max(norms) <= config.RATIO_LIMIT_TOL
        reports[f"recession_{quantity}"] = {"verdict": bool(passed), "max_norm": max(norms), "min_value": min(values)}

    frame = pd.DataFrame(rows, columns=["quantity", "probe", "value_norm", "cauchy", "discrepancy", "truncated"])
    write_csv(ctx.out_dir / "recession.csv", frame, ctx.meta)
    write_json_report(ctx.report_path, {"system": system.name, "s_grid": s_grid, "checks": reports}, ctx.meta)
    return reports


# ─── probe-uniqueness ──────────────────────────────────────────────

def run_probe_uniqueness(ctx: Context) -> Reports:
    cfg, system = ctx.cfg, ctx.system
    hz = cfg.harness
    spec = cfg.build_initial()
    ladder = cfg.grid["N_ladder"]
    print(f"Probing uniqueness for {system.name} on N={ladder} against N_ref={int(hz['N_ref'])}...")
    report = uniqueness_probe(
        system,
        spec,
        ladder,
        T=float(cfg.grid["T"]),
        N_ref=int(hz["N_ref"]),
        scheme=cfg.grid["scheme"],
        coarsening=int(hz["coarsening"]),
        snapshot_dt=cfg.grid["snapshot_dt"],
        control=bool(hz["control"]),
        data_mismatch=float(hz["data_mismatch"]),
        max_workers=ctx.threads,
    )
    series = report.pop("series")
    for N, item in series.items():
        write_csv(ctx.out_dir / f"probe_N{N}.csv", item.to_frame(), ctx.meta)
        print(f"  N={N}: H(T)={item.terminal:.3e}")
    write_json_report(ctx.report_path, report, ctx.meta)
    return {"uniqueness": report}


# ─── orlicz-suite ──────────────────────────────────────────────────

def run_orlicz_suite(ctx: Context) -> Reports:
    o = ctx.cfg.orlicz
    rng = np.random.default_rng(ctx.cfg.seed)
    pairs = int(o["pairs"])
    print(f"Running Orlicz suite on {', '.join(o['functions'])} ({pairs} pairs)...")

    reports: Reports = {}
    for name in o["functions"]:
        M = NFUNCTIONS[name]
        v = rng.uniform(0.0, o["sample_max"], pairs)
        w = rng.uniform(0.0, o["sample_max"], pairs)
        fy = fenchel_young_check(M, v, w, tol=FENCHEL_YOUNG_TOL)
        conditions = validate_nfunction(M)
        reports[f"fenchel_young_{name}"] = {"verdict": fy["passed"], **fy}
        reports[f"nfunction_{name}"] = {"verdict": all(conditions.values()), **conditions}

    if "M1" in o["functions"] and "M2" in o["functions"]:
        stronger = essentially_stronger_check(NFUNCTIONS["M1"], NFUNCTIONS["M2"])
        reports["M1_stronger_than_M2"] = {
            "verdict": stronger["passed"],
            "primal_passed": stronger["primal_passed"],
            "dual_passed": stronger["dual_passed"],
        }
        write_csv(ctx.out_dir / "stronger_table.csv", stronger["table"].reset_index(), ctx.meta)

    for line in summarize_reports(reports):
        print(f"  {line}")
    write_json_report(ctx.report_path, {"checks": reports}, ctx.meta)
    return reports


COMMANDS: Dict[str, Tuple[Callable[[Context], Reports], str]] = {
    "check-hypotheses": (run_check_hypotheses, "report.json"),
    "simulate": (run_simulate, "simulate.json"),
    "concentration": (run_concentration, "concentration.json"),
    "recession": (run_recession, "recession.json"),
    "probe-uniqueness": (run_probe_uniqueness, "probe.json"),
    "orlicz-suite": (run_orlicz_suite, "orlicz.json"),
}


def dispatch(
    command: str,
    cfg: RunConfig,
    out: Optional[Path] = None,
    threads: Optional[int] = None,
    strict_vacuum: Optional[bool] = None
) -> int:
    """
    运行一个子命令

    Args:
        command: COMMANDS 中的命令名
        cfg: 已校验的运行配置
        out: 输出目录, 或以 .json 结尾的报告路径; None 时用 output.dir
        threads: 并发上限
        strict_vacuum: 覆盖系统的真空处理

    Returns:
        退出码: 全部判定通过为 0, 任一失败为 1, 任何运行错误 (EntroFluxError, I/O 等) 为 2

    Example:
        >>> dispatch("orlicz-suite", parse_config("configs/orlicz.yaml"), Path("out"))
        0
    """
    if command not in COMMANDS:
        print(f"Unknown command '{command}'; available: {', '.join(COMMANDS)}")
        return EXIT_ERROR
    handler, default_name = COMMANDS[command]
    try:
        out_dir, report_path = _layout(out, cfg, default_name)
        out_dir.mkdir(parents=True, exist_ok=True)
        ctx = Context(
            cfg=cfg,
            system=cfg.build_system(strict_vacuum),
            out_dir=out_dir,
            report_path=report_path,
            meta=metadata_header(cfg.seed, config_hash(cfg)),
            threads=config.MAX_WORKERS if threads is None else max(1, int(threads)),
        )
        reports = handler(ctx)
    except EntroFluxError as exc:
        logger.error("%s failed: %s", command, exc)
        print(f"Error ({type(exc).__name__}): {exc}")
        return EXIT_ERROR
    except OSError as exc:
        logger.error("%s could not write artifacts: %s", command, exc)
        print(f"Error (I/O): {exc}")
        return EXIT_ERROR
    except Exception as exc:
        # 退出码 1 只表示判定失败
        logger.exception("%s crashed", command)
        print(f"Error ({type(exc).__name__}): {exc}")
        return EXIT_ERROR

    passed = overall_verdict(reports)
    print(f"{command}: {format_verdict(passed)} -> {report_path}")
    return EXIT_PASS if passed else EXIT_FAIL
