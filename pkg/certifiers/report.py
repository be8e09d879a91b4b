#!/usr/bin/env python3
"""
網格驗證與報表

每個 (family, k, q) 是一列獨立工作：建圖 → 團證書 → 譜證書 → Γ′ 恆等式與譜 →
頂點可遞抽樣 → 鄰域同構。單列流程以 LangGraph 工作流程串接，
每個階段各自捕捉錯誤並記錄在該列，整個網格不會因單列失敗而中止。
"""

import asyncio
import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypedDict

import numpy as np
from langgraph.graph import END, StateGraph
from pydantic import BaseModel, Field, field_validator, model_validator

from finite_geometry.errors import CapExceededError, InsufficientRowsError, KFreeError
from finite_geometry.field import field_of_order
from finite_geometry.geometry import PointClass, QuadraticSpace, census

from .cliques import certify_clique_bound
from .config import Settings
from .graphs import (
    POINT_CAP_FACTOR,
    Family,
    Graph,
    build_ak,
    build_gamma,
    build_gamma_prime,
    graph_stats,
)
from .isometry import check_neighborhoods, check_transitivity, transitivity_witness
from .spectral import (
    Spectrum,
    ambient_spectrum_check,
    density_diagnostic,
    eigenvalues,
    interlacing_check,
    pseudorandomness_report,
    verify_gamma_prime_identity,
)

logger = logging.getLogger(__name__)

ALL_CHECKS = ("clique", "spectral", "identity", "interlacing", "transitivity", "neighborhood")
DEFAULT_QS = (3, 5, 7, 9, 11, 13)
DEFAULT_GAMMA_KS = (2, 3, 4, 5)
# 斜率與預期值相差超過此值時在摘要中標為 FAIL
TREND_TOLERANCE = 0.05

CSV_COLUMNS = [
    "family",
    "epsilon",
    "k",
    "q",
    "kfree_order",
    "n",
    "d",
    "regular",
    "omega_observed",
    "omega_bound_certified",
    "kk_witness_found",
    "lambda",
    "spectral_bound",
    "spectral_passes",
    "density_diag",
    "ak_density_diag",
    "identity_pass",
    "ambient_spectrum_pass",
    "interlacing_pass",
    "transitivity_pass",
    "transitivity_pairs",
    "neighborhood_pass",
    "errors",
]


class GridRowSpec(BaseModel):
    """網格中的一列設定"""

    family: Family = Family.GAMMA
    k: int = Field(ge=2)
    q: int = Field(ge=3)
    epsilon: Optional[PointClass] = None
    checks: List[str] = list(ALL_CHECKS)

    @field_validator("checks")
    @classmethod
    def _known_checks(cls, value: List[str]) -> List[str]:
        unknown = [c for c in value if c not in ALL_CHECKS]
        if unknown:
            raise ValueError(f"未知的檢查項目: {', '.join(unknown)}（可用: {', '.join(ALL_CHECKS)}）")
        return [c for c in ALL_CHECKS if c in value]

    @model_validator(mode="after")
    def _family_epsilon(self) -> "GridRowSpec":
        if self.family is Family.GAMMA:
            if self.epsilon is None:
                self.epsilon = PointClass.SQUARE
            elif self.epsilon is PointClass.SINGULAR:
                raise ValueError("ε 必須是 square 或 nonsquare")
        elif self.family in (Family.GAMMA_PRIME, Family.AK):
            self.epsilon = None
        else:
            raise ValueError(f"網格不支援 {self.family.value} 圖族")
        return self

    @classmethod
    def from_labels(
        cls,
        family: str,
        k: int,
        q: int,
        epsilon: Optional[str] = None,
        checks: Optional[Sequence[str]] = None,
    ) -> "GridRowSpec":
        """接受命令列與設定檔的寫法（gamma-square、ak 等別名）"""
        label = family.strip().lower()
        eps: Optional[PointClass] = PointClass(epsilon.strip().lower()) if epsilon else None
        if label == "gamma-square":
            eps = PointClass.SQUARE
        elif label == "gamma-nonsquare":
            eps = PointClass.NONSQUARE
        values: Dict[str, Any] = dict(family=Family.parse(label), k=k, q=q, epsilon=eps)
        if checks is not None:
            values["checks"] = list(checks)
        return cls(**values)

    @property
    def kfree_order(self) -> int:
        """AK 圖在維度 k 只保證不含 K_(k+1)"""
        return self.k + 1 if self.family is Family.AK else self.k

    def describe(self) -> str:
        if self.family is Family.GAMMA:
            return f"Γ^{self.epsilon.value if self.epsilon else 'square'}({self.k}, {self.q})"
        if self.family is Family.GAMMA_PRIME:
            return f"Γ′({self.k}, {self.q})"
        return f"AK({self.k}, {self.q})"


class GridResult(BaseModel):
    family: Family
    epsilon: Optional[PointClass] = None
    k: int
    q: int
    kfree_order: int
    n: Optional[int] = None
    d: Optional[float] = None
    regular: Optional[bool] = None
    omega_observed: Optional[int] = None
    omega_bound_certified: Optional[bool] = None
    kk_witness_found: Optional[bool] = None
    lambda_: Optional[float] = None
    spectral_bound: Optional[float] = None
    spectral_passes: Optional[bool] = None
    density_diag: Optional[float] = None
    ak_density_diag: Optional[float] = None
    identity_pass: Optional[bool] = None
    ambient_spectrum_pass: Optional[bool] = None
    interlacing_pass: Optional[bool] = None
    transitivity_pass: Optional[bool] = None
    transitivity_pairs: Optional[int] = None
    neighborhood_pass: Optional[bool] = None
    errors: List[str] = []
    certificates: Dict[str, Any] = {}
    runtimes: Dict[str, float] = {}

    @classmethod
    def empty(cls, spec: GridRowSpec) -> "GridResult":
        return cls(
            family=spec.family,
            epsilon=spec.epsilon,
            k=spec.k,
            q=spec.q,
            kfree_order=spec.kfree_order,
        )

    @property
    def epsilon_label(self) -> str:
        return self.epsilon.value if self.epsilon is not None else "none"

    def failed_checks(self) -> List[str]:
        """明確失敗（False）的布林欄位"""
        flags = {
            "omega_bound_certified": self.omega_bound_certified,
            "spectral_passes": self.spectral_passes,
            "identity_pass": self.identity_pass,
            "ambient_spectrum_pass": self.ambient_spectrum_pass,
            "interlacing_pass": self.interlacing_pass,
            "transitivity_pass": self.transitivity_pass,
            "neighborhood_pass": self.neighborhood_pass,
        }
        if self.family is Family.AK:
            flags["kk_witness_found"] = self.kk_witness_found
        return [name for name, value in flags.items() if value is False]


class RowState(TypedDict):
    spec: GridRowSpec
    settings: Settings
    space: Optional[QuadraticSpace]
    graph: Optional[Graph]
    ambient: Optional[Graph]
    spectrum: Optional[Spectrum]
    result: GridResult


# 階段工作回傳 (GridResult 欄位更新, 證書, 狀態更新)
PhaseOutcome = Tuple[Dict[str, Any], Dict[str, Any], Dict[str, Any]]


class RowVerifier:
    """
    單列驗證流程

    build → clique → spectral → identity → ambient → transitivity → neighborhood
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self.workflow = self._create_workflow()

    def _phase(self, state: RowState, phase: str, work: Callable[[], PhaseOutcome]) -> RowState:
        """計時執行一個階段；KFreeError 與 ValueError 記為該列的錯誤"""
        start = time.perf_counter()
        fields: Dict[str, Any] = {}
        certs: Dict[str, Any] = {}
        updates: Dict[str, Any] = {}
        errors = list(state["result"].errors)
        try:
            fields, certs, updates = work()
        except (KFreeError, ValueError) as exc:
            logger.warning("%s [%s]：%s", state["spec"].describe(), phase, exc)
            errors.append(f"{phase}: {exc}")
        result = state["result"].model_copy(
            update={
                **fields,
                "errors": errors,
                "certificates": {**state["result"].certificates, **certs},
                "runtimes": {**state["result"].runtimes, phase: time.perf_counter() - start},
            }
        )
        return {**state, **updates, "result": result}  # type: ignore[typeddict-item]

    def _create_workflow(self) -> Any:
        settings = self.settings

        def wants(state: RowState, check: str) -> bool:
            return check in state["spec"].checks and state["graph"] is not None

        def build(state: RowState) -> RowState:
            spec = state["spec"]

            def work() -> PhaseOutcome:
                field = field_of_order(spec.q, settings.field_size_cap)
                space: Optional[QuadraticSpace] = None
                if spec.family is Family.AK:
                    g = build_ak(field, spec.k, settings.vertex_cap)
                else:
                    space = QuadraticSpace(field, spec.k)
                    if spec.family is Family.GAMMA_PRIME:
                        g = build_gamma_prime(space, settings.vertex_cap)
                    else:
                        eps = spec.epsilon or PointClass.SQUARE
                        g = build_gamma(space, eps, settings.vertex_cap)
                stats = graph_stats(g)
                d = float(stats.d) if stats.d is not None else stats.average_degree
                order = spec.kfree_order
                fields: Dict[str, Any] = dict(
                    n=g.n,
                    d=d,
                    regular=stats.is_regular,
                    density_diag=density_diagnostic(d, g.n, order),
                )
                if spec.family is Family.AK:
                    fields["ak_density_diag"] = density_diagnostic(d, g.n, order - 1)
                certs = {"graph": stats.model_dump(mode="json")}
                return fields, certs, {"graph": g, "space": space}

            return self._phase(state, "build", work)

        def clique(state: RowState) -> RowState:
            spec = state["spec"]
            if not wants(state, "clique") or spec.family is Family.GAMMA_PRIME:
                return state
            g = state["graph"]
            assert g is not None
            budget = settings.clique_time_budget

            def work() -> PhaseOutcome:
                if spec.family is Family.AK:
                    upper, found = certify_clique_bound(g, spec.k + 1, budget)
                    lower, _ = certify_clique_bound(g, spec.k, budget)
                    fields = dict(
                        omega_bound_certified=upper.k_free,
                        kk_witness_found=not lower.k_free,
                        omega_observed=found.omega if found.exact else None,
                    )
                    certs = {
                        "clique_upper": upper.model_dump(mode="json", exclude={"elapsed"}),
                        "clique_lower": lower.model_dump(mode="json", exclude={"elapsed"}),
                    }
                    return fields, certs, {}
                # 正交群在每個點類別上可遞（transitivity 階段逐對檢查）
                cert, found = certify_clique_bound(g, spec.k, budget, root=0)
                fields = dict(
                    omega_bound_certified=cert.k_free,
                    kk_witness_found=not cert.k_free,
                    omega_observed=found.omega if found.exact else None,
                )
                return fields, {"clique": cert.model_dump(mode="json", exclude={"elapsed"})}, {}

            return self._phase(state, "clique", work)

        def spectral(state: RowState) -> RowState:
            spec = state["spec"]
            if not wants(state, "spectral") or spec.family is not Family.GAMMA:
                return state
            g = state["graph"]
            assert g is not None

            def work() -> PhaseOutcome:
                spectrum = eigenvalues(g, settings.eigen_cap, settings.jacobi_max_n)
                report = pseudorandomness_report(
                    g,
                    tolerance=settings.tolerance,
                    spectrum=spectrum,
                    k=spec.k,
                )
                fields = dict(
                    lambda_=report.lambda_,
                    spectral_bound=report.bound,
                    spectral_passes=report.passes,
                )
                return fields, {"spectral": report.model_dump(mode="json")}, {"spectrum": spectrum}

            return self._phase(state, "spectral", work)

        def identity(state: RowState) -> RowState:
            spec = state["spec"]
            if spec.family is Family.AK or state["graph"] is None:
                return state
            if not {"identity", "interlacing"} & set(spec.checks):
                return state
            space = state["space"]
            assert space is not None

            def work() -> PhaseOutcome:
                if spec.family is Family.GAMMA_PRIME:
                    prime = state["graph"]
                else:
                    prime = build_gamma_prime(space, settings.vertex_cap)
                assert prime is not None
                if "identity" not in spec.checks:
                    return {}, {}, {"ambient": prime}
                check = verify_gamma_prime_identity(
                    prime,
                    full_cap=settings.identity_full_cap,
                    seed=settings.identity_seed,
                    vectors=settings.identity_vectors,
                )
                certs = {"identity": check.model_dump(mode="json")}
                return {"identity_pass": check.exact_pass}, certs, {"ambient": prime}

            return self._phase(state, "identity", work)

        def ambient(state: RowState) -> RowState:
            spec = state["spec"]
            prime = state["ambient"]
            if prime is None:
                return state
            need_interlacing = "interlacing" in spec.checks and state["spectrum"] is not None
            if "identity" not in spec.checks and not need_interlacing:
                return state

            def work() -> PhaseOutcome:
                outer = eigenvalues(prime, settings.eigen_cap, settings.jacobi_max_n)
                fields: Dict[str, Any] = {}
                certs: Dict[str, Any] = {}
                if "identity" in spec.checks:
                    ok = ambient_spectrum_check(outer.values, spec.q, spec.k, settings.tolerance)
                    fields["ambient_spectrum_pass"] = ok
                    certs["ambient_spectrum"] = {
                        "m": prime.n,
                        "largest": float(outer.values[0]) if len(outer.values) else None,
                        "passes": ok,
                        "solver": outer.solver,
                        "residual": outer.residual,
                    }
                if need_interlacing:
                    inner = state["spectrum"]
                    assert inner is not None
                    check = interlacing_check(outer.values, inner.values, settings.tolerance)
                    fields["interlacing_pass"] = check.passes
                    certs["interlacing"] = check.model_dump(mode="json")
                return fields, certs, {}

            return self._phase(state, "ambient", work)

        def transitivity(state: RowState) -> RowState:
            spec = state["spec"]
            if not wants(state, "transitivity") or spec.family is not Family.GAMMA:
                return state
            g, space = state["graph"], state["space"]
            assert g is not None and space is not None

            def work() -> PhaseOutcome:
                check = check_transitivity(
                    space,
                    g,
                    exhaustive_cap=settings.transitivity_exhaustive_cap,
                    samples=settings.transitivity_samples,
                    seed=settings.transitivity_seed,
                )
                certs: Dict[str, Any] = {"transitivity": check.model_dump(mode="json")}
                if g.n:
                    sample = transitivity_witness(space, g.labels[0], g.labels[g.n - 1])
                    certs["witness_sample"] = sample.model_dump(mode="json")
                fields = dict(
                    transitivity_pass=check.passes, transitivity_pairs=check.pairs_checked
                )
                return fields, certs, {}

            return self._phase(state, "transitivity", work)

        def neighborhood(state: RowState) -> RowState:
            spec = state["spec"]
            if (
                not wants(state, "neighborhood")
                or spec.family is not Family.GAMMA
                or spec.epsilon is not PointClass.SQUARE
                or spec.k < 3
            ):
                return state
            g, space = state["graph"], state["space"]
            assert g is not None and space is not None

            def work() -> PhaseOutcome:
                vertices: Optional[List[int]] = None
                if g.n > settings.neighborhood_cap:
                    rng = np.random.default_rng(settings.transitivity_seed)
                    drawn = rng.choice(g.n, size=settings.neighborhood_cap, replace=False)
                    vertices = sorted(int(v) for v in drawn)
                check = check_neighborhoods(space, g, vertices)
                passes = check.passes and (check.vertices_checked > 0 or g.n == 0)
                certs = {
                    "neighborhood": {
                        **check.model_dump(mode="json"),
                        "mode": "exhaustive" if vertices is None else "sampled",
                    }
                }
                return {"neighborhood_pass": passes}, certs, {}

            return self._phase(state, "neighborhood", work)

        workflow = StateGraph(RowState)
        workflow.add_node("build", build)
        workflow.add_node("clique", clique)
        workflow.add_node("spectral", spectral)
        workflow.add_node("identity", identity)
        workflow.add_node("ambient", ambient)
        workflow.add_node("transitivity", transitivity)
        workflow.add_node("neighborhood", neighborhood)

        workflow.set_entry_point("build")
        workflow.add_edge("build", "clique")
        workflow.add_edge("clique", "spectral")
        workflow.add_edge("spectral", "identity")
        workflow.add_edge("identity", "ambient")
        workflow.add_edge("ambient", "transitivity")
        workflow.add_edge("transitivity", "neighborhood")
        workflow.add_edge("neighborhood", END)

        return workflow.compile()

    def run(self, spec: GridRowSpec) -> GridResult:
        initial: RowState = {
            "spec": spec,
            "settings": self.settings,
            "space": None,
            "graph": None,
            "ambient": None,
            "spectrum": None,
            "result": GridResult.empty(spec),
        }
        try:
            final = self.workflow.invoke(initial)
        except Exception as exc:
            logger.error("%s：流程中斷：%s", spec.describe(), exc)
            return GridResult.empty(spec).model_copy(update={"errors": [f"workflow: {exc}"]})
        result: GridResult = final["result"]
        logger.info("%s：完成，失敗項目 %s", spec.describe(), result.failed_checks() or "無")
        return result


def _run_row(spec: Dict[str, Any], settings: Dict[str, Any]) -> Dict[str, Any]:
    """行程池的工作函式（參數與回傳值都是可 pickle 的 dict）"""
    verifier = RowVerifier(Settings.model_validate(settings))
    return verifier.run(GridRowSpec.model_validate(spec)).model_dump()


async def arun_grid(
    rows: Sequence[GridRowSpec], settings: Optional[Settings] = None
) -> List[GridResult]:
    """
    執行整個網格

    threads ≤ 1 時在目前行程依序執行；否則交給最多 threads 個工作行程。
    結果順序永遠與 rows 相同。
    """
    settings = settings or Settings()
    if not rows:
        return []
    if settings.threads <= 1:
        verifier = RowVerifier(settings)
        return [verifier.run(row) for row in rows]

    loop = asyncio.get_running_loop()
    payload = settings.model_dump()
    workers = min(settings.threads, len(rows))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [loop.run_in_executor(pool, _run_row, row.model_dump(), payload) for row in rows]
        outcomes = await asyncio.gather(*futures, return_exceptions=True)

    results: List[GridResult] = []
    for row, outcome in zip(rows, outcomes):
        if isinstance(outcome, BaseException):
            logger.error("%s：工作行程失敗：%s", row.describe(), outcome)
            failed = GridResult.empty(row).model_copy(update={"errors": [f"worker: {outcome}"]})
            results.append(failed)
        else:
            results.append(GridResult.model_validate(outcome))
    return results


def run_grid(rows: Sequence[GridRowSpec], settings: Optional[Settings] = None) -> List[GridResult]:
    return asyncio.run(arun_grid(rows, settings))


def default_grid(settings: Optional[Settings] = None) -> List[GridRowSpec]:
    """
    預設網格

    Γ^□：k ∈ {2, 3, 4, 5}、q ∈ {3, 5, …, 13} 中頂點數不超過 vertex_cap 者；
    AK：維度 3 與 4 的所有 q，維度 5 只取 q ≤ 7。
    """
    settings = settings or Settings()
    rows: List[GridRowSpec] = []
    for k in DEFAULT_GAMMA_KS:
        for q in DEFAULT_QS:
            space = QuadraticSpace(field_of_order(q, settings.field_size_cap), k)
            try:
                size = census(space, POINT_CAP_FACTOR * settings.vertex_cap).square
            except CapExceededError:
                continue
            if size <= settings.vertex_cap:
                rows.append(GridRowSpec(family=Family.GAMMA, k=k, q=q, epsilon=PointClass.SQUARE))
    for k in (3, 4, 5):
        for q in DEFAULT_QS:
            if k == 5 and q > 7:
                continue
            rows.append(GridRowSpec(family=Family.AK, k=k, q=q, checks=["clique"]))
    return rows


def _matches_family(result: GridResult, family: str) -> bool:
    label = family.strip().lower()
    if label == "gamma-square":
        return result.family is Family.GAMMA and result.epsilon is PointClass.SQUARE
    if label == "gamma-nonsquare":
        return result.family is Family.GAMMA and result.epsilon is PointClass.NONSQUARE
    return result.family is Family.parse(label)


def density_trend(results: Sequence[GridResult], k: int, family: str = "gamma-square") -> float:
    """
    log(d/n) 對 log(n) 的最小平方斜率

    以 kfree_order 篩選：AK 維度 3 的列屬於 k = 4。

    Raises:
        InsufficientRowsError: 可用的列少於 3
    """
    rows = [
        r
        for r in results
        if _matches_family(r, family) and r.kfree_order == k and r.n and r.d and r.d > 0
    ]
    if len(rows) < 3:
        raise InsufficientRowsError(f"{family} k = {k} 只有 {len(rows)} 列可用，至少需要 3 列")
    x = np.log([float(r.n or 0) for r in rows])
    y = np.log([float(r.d or 0.0) / float(r.n or 1) for r in rows])
    slope = float(np.polyfit(x, y, 1)[0])
    logger.info("%s k = %d：斜率 %.4f（%d 列）", family, k, slope, len(rows))
    return slope


def _csv_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9f}"
    if isinstance(value, (Family, PointClass)):
        return value.value
    return str(value)


def csv_row(result: GridResult) -> Dict[str, str]:
    values = result.model_dump()
    values["lambda"] = result.lambda_
    values["epsilon"] = result.epsilon_label
    values["errors"] = " | ".join(result.errors)
    return {column: _csv_value(values[column]) for column in CSV_COLUMNS}


def write_csv(results: Sequence[GridResult], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for result in results:
            writer.writerow(csv_row(result))
    return path


def trend_lines(results: Sequence[GridResult], tolerance: float = TREND_TOLERANCE) -> List[str]:
    """可計算的密度趨勢（附與預期斜率的偏差）與 Γ^□ 相對 AK 的斜率差"""
    lines: List[str] = []
    slopes: Dict[Tuple[str, int], float] = {}
    orders = sorted({r.kfree_order for r in results})
    for family, expected in (("gamma-square", 1), ("alon-krivelevich", 2)):
        for k in orders:
            if k - expected < 1:
                continue
            try:
                slope = density_trend(results, k, family)
            except InsufficientRowsError:
                continue
            slopes[(family, k)] = slope
            target = -1.0 / (k - expected)
            deviation = slope - target
            within = "pass" if abs(deviation) <= tolerance else "FAIL"
            lines.append(
                f"trend family={family} k={k} slope={slope:.6f} expected={target:.6f} "
                f"deviation={deviation:+.6f} within={within}"
            )
            if within == "FAIL":
                logger.warning(
                    "%s k=%d 的斜率 %.3f 偏離預期 %.3f 超過 %.2f", family, k, slope, target, tolerance
                )
    for k in orders:
        if ("gamma-square", k) in slopes and ("alon-krivelevich", k) in slopes:
            gap = slopes[("gamma-square", k)] - slopes[("alon-krivelevich", k)]
            lines.append(f"trend-gap k={k} gamma-minus-ak={gap:.6f}")
    return lines


def _summary_line(r: GridResult) -> str:
    def flag(value: Optional[bool]) -> str:
        return "-" if value is None else ("pass" if value else "FAIL")

    d = _csv_value(r.d) or "-"
    head = f"{r.family.value} eps={r.epsilon_label} k={r.k} q={r.q} n={r.n} d={d}"
    omega = "-" if r.omega_observed is None else str(r.omega_observed)
    checks = (
        f"omega={omega} kfree={flag(r.omega_bound_certified)} "
        f"spectral={flag(r.spectral_passes)} identity={flag(r.identity_pass)} "
        f"ambient={flag(r.ambient_spectrum_pass)} interlacing={flag(r.interlacing_pass)} "
        f"transitivity={flag(r.transitivity_pass)} neighborhood={flag(r.neighborhood_pass)}"
    )
    if r.family is Family.AK:
        checks += f" kk_witness={flag(r.kk_witness_found)}"
    line = f"{head} {checks}"
    if r.errors:
        line += " errors=" + " | ".join(r.errors)
    return line


def write_summary(results: Sequence[GridResult], path: Path) -> Path:
    lines = [f"rows={len(results)}"]
    lines.extend(_summary_line(r) for r in results)
    lines.extend(trend_lines(results))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def bundle_name(result: GridResult) -> str:
    return f"{result.family.value}_{result.epsilon_label}_k{result.k}_q{result.q}.json"


def write_bundles(results: Sequence[GridResult], directory: Path) -> List[Path]:
    """每列一個證書檔（不含耗時）"""
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for result in results:
        payload = result.model_dump(mode="json", exclude={"runtimes"})
        path = directory / bundle_name(result)
        text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
        path.write_text(text + "\n", encoding="utf-8")
        written.append(path)
    return written


def write_timings(results: Sequence[GridResult], path: Path) -> Path:
    rows = [
        {
            "family": r.family.value,
            "epsilon": r.epsilon_label,
            "k": r.k,
            "q": r.q,
            "runtimes": {phase: round(sec, 6) for phase, sec in r.runtimes.items()},
            "total": round(math.fsum(r.runtimes.values()), 6),
        }
        for r in results
    ]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(rows, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path
