"""Microbenchmark harness for the per-operation and CG timings.

Reports median wall time of R repetitions (one discarded warm-up) for
dot, axpy, full SpMV and both accumulation modes of the symmetric SpMV,
then a full CG run per storage kind, with speedups against the workers=1
baseline of the same run. Load time is reported separately from compute
time.
"""

from __future__ import annotations

import hashlib
import io
import json
import statistics
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .core import CsrMatrix, SymHalfMatrix, expand_symmetric, extract_lower
from .kernels import KernelConfig
from .matio import LinearSystem
from .solver import CgOptions, cg_solve

OP_ROW_ORDER = ("dotProd", "AXPY", "SpMV", "SpMV(sym)/atomic", "SpMV(sym)/privatized")


@dataclass
class OpTiming:
    op: str
    workers: int
    median_ms: float
    speedup: float


@dataclass
class CgTiming:
    storage: str  # full | sym
    workers: int
    time_ms: float
    iterations: int
    converged: bool
    final_relative_residual: float
    speedup: float


@dataclass
class BenchReport:
    meta: dict
    ops: list[OpTiming] = field(default_factory=list)
    cg: list[CgTiming] = field(default_factory=list)

    # -- serialization ------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "BenchReport":
        raw = json.loads(text)
        return cls(
            meta=raw["meta"],
            ops=[OpTiming(**r) for r in raw["ops"]],
            cg=[CgTiming(**r) for r in raw["cg"]],
        )

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("# meta " + json.dumps(self.meta, sort_keys=True) + "\n")
        out.write("kind,name,workers,median_ms,speedup,iterations,converged,final_relative_residual\n")
        for r in self.ops:
            out.write(f"op,{r.op},{r.workers},{r.median_ms!r},{r.speedup!r},,,\n")
        for r in self.cg:
            out.write(
                f"cg,CG/#int ({r.storage}),{r.workers},{r.time_ms!r},{r.speedup!r},"
                f"{r.iterations},{int(r.converged)},{r.final_relative_residual!r}\n"
            )
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BenchReport":
        lines = text.strip().splitlines()
        meta = json.loads(lines[0].removeprefix("# meta "))
        report = cls(meta=meta)
        for line in lines[2:]:
            kind, name, workers, t, speedup, iters, conv, rel = line.split(",")
            if kind == "op":
                report.ops.append(OpTiming(name, int(workers), float(t), float(speedup)))
            else:
                storage = name[name.index("(") + 1 : name.index(")")]
                report.cg.append(
                    CgTiming(
                        storage, int(workers), float(t), int(iters),
                        bool(int(conv)), float(rel), float(speedup),
                    )
                )
        return report

    # -- rendering ----------------------------------------------------

    def to_text(self) -> str:
        out = io.StringIO()
        m = self.meta
        out.write(
            f"matrix: n={m['n']} nnz={m['nnz_full']} (half storage: {m['nnz_sym']}) "
            f"input={m['storage_kind']}\n"
        )
        out.write(
            f"backend={m['backend']} precision={m['precision']} "
            f"cg-accumulation={m['accumulation']} reps={m['reps']}\n"
        )
        out.write(f"load time: {m['load_time_ms']:.3f}ms (excluded from all rows below)\n")
        workers_seen = sorted({r.workers for r in self.ops})
        for w in workers_seen:
            out.write(f"\nworkers={w}\n")
            out.write(f"{'Operation':<24}{'Time':>12}{'Speedup':>10}\n")
            for r in self.ops:
                if r.workers == w:
                    out.write(f"{r.op:<24}{r.median_ms:>9.3f}ms{r.speedup:>9.2f}x\n")
            for r in self.cg:
                if r.workers == w:
                    label = f"CG/ # int ({r.storage})"
                    cell = f"{r.time_ms:.3f}ms/{r.iterations}"
                    flag = "" if r.converged else "  [NOT CONVERGED]"
                    out.write(f"{label:<24}{cell:>12}{r.speedup:>9.2f}x{flag}\n")
        return out.getvalue()


def system_checksum(system: LinearSystem) -> str:
    """Digest of every array in the system; used to prove the harness
    does not mutate its input."""
    h = hashlib.sha256()
    m = system.matrix
    h.update(type(m).__name__.encode())
    for a in (m.row_start, m.col_idx, m.values, system.b):
        h.update(a.tobytes())
    if system.x_ref is not None:
        h.update(system.x_ref.tobytes())
    return h.hexdigest()


def _median_ms(fn, reps: int) -> float:
    fn()  # warm-up, discarded
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        samples.append((time.perf_counter_ns() - t0) / 1e6)
    return statistics.median(samples)


def run_bench(
    system: LinearSystem,
    workers_list=(1,),
    reps: int = 5,
    accumulation: str = "atomic",
    tol: float = 1e-10,
    max_iter: int | None = None,
    load_time_ms: float = 0.0,
    seed: int = 1234,
) -> BenchReport:
    if reps < 3:
        raise ValueError("reps must be >= 3")
    m = system.matrix
    if isinstance(m, SymHalfMatrix):
        a_sym, a_full, kind = m, expand_symmetric(m), "sym"
    else:
        a_sym, a_full, kind = extract_lower(m), m, "full"

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(a_full.n).astype(a_full.dtype)
    u = rng.standard_normal(a_full.n).astype(a_full.dtype)

    report = BenchReport(
        meta={
            "n": a_full.n,
            "nnz_full": a_full.nnz,
            "nnz_sym": a_sym.nnz,
            "storage_kind": kind,
            "backend": kernels.get_backend(),
            "precision": str(a_full.dtype),
            "accumulation": accumulation,
            "reps": reps,
            "load_time_ms": load_time_ms,
        }
    )

    baseline_ops: dict[str, float] = {}
    baseline_cg: dict[str, float] = {}
    workers_list = list(workers_list)
    for w in workers_list:
        cfg = KernelConfig(workers=w)
        cfg_atomic = KernelConfig(workers=w, accumulation="atomic")
        cfg_priv = KernelConfig(workers=w, accumulation="privatized")
        measurements = [
            ("dotProd", lambda: kernels.dot(x, u, cfg)),
            ("AXPY", lambda: kernels.axpy(1.5, x, u, cfg)),
            ("SpMV", lambda: kernels.spmv_full(a_full, x, cfg)),
            ("SpMV(sym)/atomic", lambda: kernels.spmv_sym(a_sym, x, cfg_atomic)),
            ("SpMV(sym)/privatized", lambda: kernels.spmv_sym(a_sym, x, cfg_priv)),
        ]
        for op, fn in measurements:
            t = _median_ms(fn, reps)
            baseline_ops.setdefault(op, t)
            report.ops.append(OpTiming(op, w, t, baseline_ops[op] / t if t > 0 else 1.0))

        opts = CgOptions(tol=tol, max_iter=max_iter)
        cg_cfg = KernelConfig(workers=w, accumulation=accumulation)
        for storage, a in (("full", a_full), ("sym", a_sym)):
            t0 = time.perf_counter_ns()
            result = cg_solve(a, system.b, opts=opts, cfg=cg_cfg)
            t = (time.perf_counter_ns() - t0) / 1e6
            baseline_cg.setdefault(storage, t)
            report.cg.append(
                CgTiming(
                    storage, w, t, result.iterations, result.converged,
                    result.final_relative_residual, baseline_cg[storage] / t if t > 0 else 1.0,
                )
            )
    return report
