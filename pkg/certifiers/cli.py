#!/usr/bin/env python3
"""
命令列介面

子命令：generate、verify、grid、census、witness。
結束碼：0 全部通過，1 有證書失敗，2 用法、設定或資源錯誤。
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ValidationError, model_validator

from finite_geometry.errors import ConfigError, KFreeError
from finite_geometry.field import field_of_order, split_prime_power
from finite_geometry.geometry import (
    PointClass,
    QuadraticSpace,
    canonicalize,
    census,
    format_point,
    parse_point,
)

from .cliques import clique_certificate_check, verify_k_free
from .config import Settings, load_settings
from .exports import read_dimacs, write_dimacs, write_edgelist
from .graphs import (
    POINT_CAP_FACTOR,
    Family,
    Graph,
    build_ak,
    build_gamma,
    build_gamma_prime,
    graph_stats,
    strongly_regular_parameters,
)
from .isometry import gram_matrix, transitivity_witness
from .report import (
    ALL_CHECKS,
    GridResult,
    GridRowSpec,
    bundle_name,
    default_grid,
    run_grid,
    trend_lines,
    write_bundles,
    write_csv,
    write_summary,
    write_timings,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CERTIFICATE_FAILED = 1
EXIT_USAGE = 2

GENERATE_FORMATS = ("edgelist", "dimacs")
VERIFY_FORMATS = ("report", "csv")
# 強正則參數是 O(n²) 的整數比對，只在小圖上計算
SRG_REPORT_MAX_N = 2000
ROW_KEYS = ("family", "k", "q", "epsilon", "checks")


class CliConfig(BaseModel):
    """解析後、建構前已驗證的命令列設定"""

    command: str
    family: Family = Family.GAMMA
    k: Optional[int] = None
    q: Optional[int] = None
    epsilon: Optional[PointClass] = None
    format: Optional[str] = None
    checks: List[str] = list(ALL_CHECKS)
    config_file: Optional[Path] = None
    input_path: Optional[Path] = None
    source: Optional[str] = None
    target: Optional[str] = None
    verbosity: int = 0
    settings: Settings = Settings()
    # 命令列明確指定的設定值，優先於設定檔
    overrides: Dict[str, Any] = {}

    @model_validator(mode="after")
    def _validate(self) -> "CliConfig":
        needs_kq = self.command in ("generate", "census", "witness") or (
            self.command == "verify" and self.input_path is None
        )
        if needs_kq:
            if self.k is None or self.q is None:
                raise ValueError(f"{self.command} 需要 --k 與 --q")
            split_prime_power(self.q)
        if self.k is not None and self.k < 1:
            raise ValueError(f"--k 必須 ≥ 1，收到 {self.k}")
        if self.command == "verify" and self.input_path is not None and self.k is None:
            raise ValueError("驗證外部圖檔時需要 --k（要證明不含的團大小）")
        if self.family is Family.GAMMA:
            if self.epsilon is PointClass.SINGULAR:
                raise ValueError("--epsilon 只能是 square 或 nonsquare")
        elif self.epsilon is not None:
            raise ValueError(f"--epsilon 只適用於 gamma 圖族，不適用於 {self.family.value}")
        if self.family in (Family.GAMMA_PRIME, Family.AK) and self.k is not None and self.k < 2:
            raise ValueError(f"{self.family.value} 需要 k ≥ 2")
        if self.family in (Family.NEIGHBORHOOD, Family.CUSTOM):
            raise ValueError(f"--family 不支援 {self.family.value}")
        if self.command == "generate" and self.format not in GENERATE_FORMATS:
            raise ValueError(f"generate 的 --format 必須是 {' 或 '.join(GENERATE_FORMATS)}")
        if self.command == "verify" and self.format not in VERIFY_FORMATS:
            raise ValueError(f"verify 的 --format 必須是 {' 或 '.join(VERIFY_FORMATS)}")
        unknown = [c for c in self.checks if c not in ALL_CHECKS]
        if unknown:
            raise ValueError(f"未知的檢查項目: {', '.join(unknown)}（可用: {', '.join(ALL_CHECKS)}）")
        if self.command == "witness" and (not self.source or not self.target):
            raise ValueError("witness 需要 --source 與 --target")
        return self

    @property
    def output_dir(self) -> Path:
        return self.settings.output_dir

    def row(self) -> GridRowSpec:
        assert self.k is not None and self.q is not None
        return GridRowSpec(
            family=self.family, k=self.k, q=self.q, epsilon=self.epsilon, checks=self.checks
        )


# ---- 設定檔 ----


def _split_list(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _int_list(value: str, key: str, lineno: int) -> List[int]:
    try:
        items = [int(part) for part in _split_list(value)]
    except ValueError:
        raise ConfigError(f"{key} 必須是以逗號分隔的整數，收到 {value!r}", lineno) from None
    if not items:
        raise ConfigError(f"{key} 不可為空", lineno)
    return items


def _expand_row(fields: Dict[str, Tuple[str, int]], start: int) -> List[GridRowSpec]:
    for key in ("k", "q"):
        if key not in fields:
            raise ConfigError(f"[row] 缺少 {key}", start)
    family, _ = fields.get("family", ("gamma-square", start))
    epsilon, _ = fields.get("epsilon", ("", start))
    checks_text, _ = fields.get("checks", (",".join(ALL_CHECKS), start))
    ks = _int_list(fields["k"][0], "k", fields["k"][1])
    qs = _int_list(fields["q"][0], "q", fields["q"][1])
    rows = []
    for k in ks:
        for q in qs:
            try:
                split_prime_power(q)
                rows.append(
                    GridRowSpec.from_labels(family, k, q, epsilon or None, _split_list(checks_text))
                )
            except (ValueError, KFreeError) as exc:
                line = fields["q"][1] if isinstance(exc, KFreeError) else start
                raise ConfigError(f"k = {k}, q = {q}: {exc}", line) from None
    return rows


def parse_grid_config(text: str) -> Tuple[Dict[str, str], List[GridRowSpec]]:
    """
    解析網格設定檔

    `[row]` 之前的 key=value 是設定覆寫（Settings 欄位）；每個 `[row]` 區段描述
    一組列，k 與 q 可用逗號列出多個值，依 k 再 q 的順序展開。

    Raises:
        ConfigError: 語法錯誤或未知的鍵（含行號）
    """
    overrides: Dict[str, str] = {}
    rows: List[GridRowSpec] = []
    current: Optional[Dict[str, Tuple[str, int]]] = None
    start = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line != "[row]":
                raise ConfigError(f"未知的區段 {line!r}，只支援 [row]", lineno)
            if current is not None:
                rows.extend(_expand_row(current, start))
            current, start = {}, lineno
            continue
        if "=" not in line:
            raise ConfigError(f"預期 key = value，收到 {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if current is None:
            if key not in Settings.model_fields:
                raise ConfigError(f"未知的設定鍵 {key!r}", lineno)
            overrides[key] = value
        else:
            if key not in ROW_KEYS:
                raise ConfigError(f"[row] 中未知的鍵 {key!r}（可用: {', '.join(ROW_KEYS)}）", lineno)
            if key in current:
                raise ConfigError(f"[row] 中重複的鍵 {key!r}", lineno)
            current[key] = (value, lineno)
    if current is not None:
        rows.extend(_expand_row(current, start))
    return overrides, rows


# ---- 子命令 ----


def _build(config: CliConfig) -> Graph:
    assert config.k is not None and config.q is not None
    settings = config.settings
    field = field_of_order(config.q, settings.field_size_cap)
    if config.family is Family.AK:
        return build_ak(field, config.k, settings.vertex_cap)
    space = QuadraticSpace(field, config.k)
    if config.family is Family.GAMMA_PRIME:
        return build_gamma_prime(space, settings.vertex_cap)
    return build_gamma(space, config.epsilon or PointClass.SQUARE, settings.vertex_cap)


def cmd_generate(config: CliConfig) -> int:
    g = _build(config)
    stats = graph_stats(g)
    print(f"🔧 {g.meta.describe()}")
    print(f"   頂點 n = {stats.n}，邊 {stats.edge_count}，自環 {stats.loop_count}")
    if stats.is_regular:
        print(f"   {stats.d}-正則")
    else:
        print(f"   度數 {stats.degree_min}..{stats.degree_max}，平均 {stats.average_degree:.4f}")
    if g.n <= SRG_REPORT_MAX_N:
        srg = strongly_regular_parameters(g)
        if srg is not None:
            print(f"   強正則參數 (n, d, λ, μ) = ({srg.n}, {srg.d}, {srg.lam}, {srg.mu})")

    config.output_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{g.meta.family.value}_{g.meta.epsilon_label}_k{g.meta.k}_q{g.meta.q}"
    if config.format == "dimacs":
        path = write_dimacs(g, config.output_dir / f"{stem}.dimacs")
    else:
        path = write_edgelist(g, config.output_dir / f"{stem}.edgelist")
    print(f"📦 已寫入 {path}")
    return EXIT_OK


def _print_result(result: GridResult) -> None:
    labels = {
        "omega_bound_certified": f"不含 K_{result.kfree_order}",
        "kk_witness_found": f"含 K_{result.k}",
        "spectral_passes": "λ ≤ q^((k-2)/2)",
        "identity_pass": "A² = μJ + (δ − μ)I",
        "ambient_spectrum_pass": "Γ′ 譜",
        "interlacing_pass": "特徵值交錯",
        "transitivity_pass": "頂點可遞",
        "neighborhood_pass": "鄰域同構",
    }
    values = result.model_dump()
    for name, label in labels.items():
        value = values[name]
        if value is None:
            continue
        print(f"   {'✅' if value else '❌'} {label}")
    if result.omega_observed is not None:
        print(f"   ω = {result.omega_observed}")
    if result.lambda_ is not None:
        print(f"   λ = {result.lambda_:.6f}（界 {result.spectral_bound:.6f}）")
    for error in result.errors:
        print(f"   ⚠️ {error}")


def _verify_file(config: CliConfig) -> int:
    assert config.input_path is not None and config.k is not None
    g = read_dimacs(config.input_path)
    print(f"🔍 {config.input_path}：n = {g.n}，檢查是否不含 K_{config.k}")
    cert = verify_k_free(g, config.k, config.settings.clique_time_budget)
    if not clique_certificate_check(g, cert):
        print("❌ 證書重新檢查失敗")
        return EXIT_CERTIFICATE_FAILED
    config.output_dir.mkdir(parents=True, exist_ok=True)
    path = config.output_dir / f"{config.input_path.stem}_k{config.k}.json"
    payload = cert.model_dump(mode="json", exclude={"elapsed"})
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    if cert.k_free:
        print(f"✅ 不含 K_{config.k}")
    else:
        print(f"❌ 找到 K_{config.k}：{cert.witness}")
    print(f"📦 已寫入 {path}")
    return EXIT_OK if cert.k_free else EXIT_CERTIFICATE_FAILED


def cmd_verify(config: CliConfig) -> int:
    if config.input_path is not None:
        return _verify_file(config)
    row = config.row()
    print(f"🔍 驗證 {row.describe()}：{', '.join(row.checks)}")
    result = run_grid([row], config.settings.merged(threads=1))[0]
    _print_result(result)

    config.output_dir.mkdir(parents=True, exist_ok=True)
    if config.format == "csv":
        path = write_csv([result], config.output_dir / bundle_name(result).replace(".json", ".csv"))
    else:
        path = write_bundles([result], config.output_dir)[0]
    print(f"📦 已寫入 {path}")

    if result.failed_checks():
        return EXIT_CERTIFICATE_FAILED
    if result.errors:
        return EXIT_USAGE
    return EXIT_OK


def cmd_grid(config: CliConfig) -> int:
    settings = config.settings
    if config.config_file is not None:
        text = config.config_file.read_text(encoding="utf-8")
        overrides, rows = parse_grid_config(text)
        try:
            settings = Settings.model_validate(
                {**settings.model_dump(), **overrides, **config.overrides}
            )
        except ValidationError as exc:
            raise ConfigError(f"{config.config_file} 的設定值無效: {exc}") from exc
    else:
        rows = default_grid(settings)
    print(f"🔍 執行網格：{len(rows)} 列，{settings.threads} 個工作行程")
    results = run_grid(rows, settings)

    out = settings.output_dir
    write_csv(results, out / "grid.csv")
    write_summary(results, out / "summary.txt")
    write_bundles(results, out / "certificates")
    write_timings(results, out / "timings.json")
    failed = [r for r in results if r.failed_checks()]
    for line in trend_lines(results):
        print(f"📈 {line}")
    print(f"{'✅' if not failed else '❌'} {len(results) - len(failed)}/{len(results)} 列全部通過")
    print(f"📦 已寫入 {out}")
    return EXIT_OK


def cmd_census(config: CliConfig) -> int:
    assert config.k is not None and config.q is not None
    field = field_of_order(config.q, config.settings.field_size_cap)
    space = QuadraticSpace(field, config.k)
    counts = census(space, POINT_CAP_FACTOR * config.settings.vertex_cap)
    print(f"🔍 PG({config.k - 1}, {config.q})，ξ = {space.xi}")
    print(f"   X₀ = {counts.singular}")
    print(f"   X_□ = {counts.square}")
    print(f"   X_⊠ = {counts.nonsquare}")
    print(f"   總數 = {counts.total}")
    return EXIT_OK


def cmd_witness(config: CliConfig) -> int:
    assert config.k is not None and config.q is not None
    assert config.source is not None and config.target is not None
    field = field_of_order(config.q, config.settings.field_size_cap)
    space = QuadraticSpace(field, config.k)
    try:
        x = canonicalize(field, parse_point(field, config.source))
        y = canonicalize(field, parse_point(field, config.target))
    except (ValueError, IndexError) as exc:
        raise ValueError(f"無法解析點座標: {exc}") from None
    if len(x) != config.k or len(y) != config.k:
        raise ValueError(f"點座標必須有 {config.k} 個分量")
    w = transitivity_witness(space, x, y)
    print(f"🔍 {format_point(field, x)} → {format_point(field, y)}")
    print("   B =")
    for row in gram_matrix(space):
        print("     " + " ".join(field.format_code(int(c)) for c in row))
    print("   A =")
    for line in w.format(field):
        print(f"     {line}")
    print("✅ AᵀBA = B，A·x ∈ ⟨y⟩")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "grid": cmd_grid,
    "census": cmd_census,
    "witness": cmd_witness,
}


# ---- 參數解析 ----


def _add_graph_args(parser: argparse.ArgumentParser, kq_required: bool = True) -> None:
    parser.add_argument("--family", default="gamma", help="gamma、gamma-prime 或 ak")
    parser.add_argument("--k", type=int, required=kq_required, help="向量空間維度")
    parser.add_argument("--q", type=int, required=kq_required, help="奇質數冪")
    parser.add_argument("--epsilon", choices=["square", "nonsquare"], help="Γ^ε 的 ε")


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", type=Path, help="輸出目錄（預設 KFREE_OUTPUT_DIR）")
    parser.add_argument("--vertex-cap", type=int)
    parser.add_argument("--eigen-cap", type=int)
    parser.add_argument("--identity-full-cap", type=int)
    parser.add_argument("--field-size-cap", type=int)
    parser.add_argument("--time-budget", type=float, help="團搜尋秒數上限")
    parser.add_argument("--threads", type=int)
    parser.add_argument("--env-file", help="指定 .env 檔")
    parser.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kfree",
        description="二次型正交圖的建構與機器驗證（不含 K_k 的偽隨機圖）",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="建構圖並寫出檔案")
    _add_graph_args(gen)
    gen.add_argument("--format", choices=GENERATE_FORMATS, default="edgelist")
    _add_common_args(gen)

    ver = sub.add_parser("verify", help="對單一圖執行證書檢查")
    _add_graph_args(ver, kq_required=False)
    ver.add_argument("--checks", default=",".join(ALL_CHECKS), help="以逗號分隔的檢查項目")
    ver.add_argument("--format", choices=VERIFY_FORMATS, default="report")
    ver.add_argument("--input", type=Path, help="DIMACS 圖檔（只做團檢查）")
    _add_common_args(ver)

    grid = sub.add_parser("grid", help="執行網格並輸出 CSV 與摘要")
    grid.add_argument("--config", type=Path, help="網格設定檔（預設使用內建網格）")
    _add_common_args(grid)

    cen = sub.add_parser("census", help="計算各類射影點數量")
    cen.add_argument("--k", type=int, required=True)
    cen.add_argument("--q", type=int, required=True)
    _add_common_args(cen)

    wit = sub.add_parser("witness", help="印出把 source 送到 target 的等距矩陣")
    wit.add_argument("--k", type=int, required=True)
    wit.add_argument("--q", type=int, required=True)
    wit.add_argument("--source", required=True, help="冒號分隔座標，例如 0:0:1")
    wit.add_argument("--target", required=True)
    _add_common_args(wit)
    return parser


def _family_and_epsilon(args: argparse.Namespace) -> Tuple[Family, Optional[PointClass]]:
    label = getattr(args, "family", "gamma").strip().lower()
    epsilon = getattr(args, "epsilon", None)
    eps = PointClass(epsilon) if epsilon else None
    if label == "gamma-square":
        eps = PointClass.SQUARE
    elif label == "gamma-nonsquare":
        eps = PointClass.NONSQUARE
    return Family.parse(label), eps


def config_from_args(args: argparse.Namespace) -> CliConfig:
    """
    命令列參數 → CliConfig

    Raises:
        ConfigError: 環境變數或參數組合無效
    """
    explicit = {
        key: value
        for key, value in dict(
            output_dir=args.output,
            vertex_cap=args.vertex_cap,
            eigen_cap=args.eigen_cap,
            identity_full_cap=args.identity_full_cap,
            field_size_cap=args.field_size_cap,
            clique_time_budget=args.time_budget,
            threads=args.threads,
        ).items()
        if value is not None
    }
    settings = load_settings(env_file=args.env_file, **explicit)
    try:
        family, epsilon = _family_and_epsilon(args)
        values: Dict[str, Any] = dict(
            command=args.command,
            family=family,
            k=getattr(args, "k", None),
            q=getattr(args, "q", None),
            epsilon=epsilon,
            format=getattr(args, "format", None),
            config_file=getattr(args, "config", None),
            input_path=getattr(args, "input", None),
            source=getattr(args, "source", None),
            target=getattr(args, "target", None),
            verbosity=args.verbose,
            settings=settings,
            overrides=explicit,
        )
        if getattr(args, "checks", None) is not None:
            values["checks"] = _split_list(args.checks)
        return CliConfig(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _configure_logging(config: CliConfig) -> None:
    if config.verbosity >= 2:
        level = logging.DEBUG
    elif config.verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, config.settings.log_level)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        config = config_from_args(args)
        _configure_logging(config)
        return COMMANDS[config.command](config)
    except ConfigError as exc:
        print(f"❌ 設定錯誤: {exc}", file=sys.stderr)
    except KFreeError as exc:
        print(f"❌ {type(exc).__name__}: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"❌ 參數錯誤: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"❌ 檔案錯誤: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
