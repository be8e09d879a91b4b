#!/usr/bin/env python3
"""
圖檔匯出與讀取

邊列表（0-based，含標頭）與 DIMACS `p edge` 格式。
"""

import logging
from pathlib import Path
from typing import IO, List, Tuple, Union

from finite_geometry.errors import ConfigError

from .graphs import Family, Graph, GraphMeta

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def write_edgelist(g: Graph, path: PathLike) -> Path:
    """
    標頭 `# family k q epsilon n m`，之後每行一個 `u v`（u < v）

    自環寫成 `u u`；m 是資料行數（邊 + 自環）。
    """
    path = Path(path)
    edges = list(g.edges())
    meta = g.meta
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            f"# {meta.family.value} {meta.k} {meta.q} {meta.epsilon_label} {g.n} {len(edges)}\n"
        )
        for u, v in edges:
            fh.write(f"{u} {v}\n")
    logger.info("寫入邊列表 %s（%d 行）", path, len(edges))
    return path


def write_dimacs(g: Graph, path: PathLike) -> Path:
    """DIMACS 格式（1-based，略過自環），供外部團搜尋工具使用"""
    path = Path(path)
    edges = [(u, v) for u, v in g.edges() if u != v]
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"c {g.meta.describe()}\n")
        fh.write(f"p edge {g.n} {len(edges)}\n")
        for u, v in edges:
            fh.write(f"e {u + 1} {v + 1}\n")
    logger.info("寫入 DIMACS %s（%d 條邊）", path, len(edges))
    return path


def _ints(tokens: List[str], lineno: int, source: str) -> Tuple[int, int]:
    try:
        return int(tokens[0]), int(tokens[1])
    except ValueError:
        raise ConfigError(f"無法解析整數 {' '.join(tokens)!r}（{source}）", lineno) from None


def _parse_dimacs(fh: IO[str], source: str) -> Tuple[int, List[Tuple[int, int]]]:
    n = None
    declared = 0
    edges: List[Tuple[int, int]] = []
    for lineno, line in enumerate(fh, start=1):
        tokens = line.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[0] == "p":
            if len(tokens) != 4 or tokens[1].lower() not in ("edge", "col"):
                raise ConfigError(f"無法辨識的問題行 {line.strip()!r}（{source}）", lineno)
            n, declared = _ints(tokens[2:4], lineno, source)
        elif tokens[0] == "e":
            if n is None:
                raise ConfigError(f"邊出現在 p 行之前（{source}）", lineno)
            if len(tokens) != 3:
                raise ConfigError(f"邊行需要兩個端點 {line.strip()!r}（{source}）", lineno)
            u, v = _ints(tokens[1:3], lineno, source)
            edges.append((u - 1, v - 1))
        else:
            raise ConfigError(f"未知的行格式 {line.strip()!r}（{source}）", lineno)
    if n is None:
        raise ConfigError(f"{source} 缺少 p 行")
    if declared != len(edges):
        logger.warning("%s 宣告 %d 條邊，實際讀到 %d 條", source, declared, len(edges))
    return n, edges


def read_dimacs(path: PathLike) -> Graph:
    """
    讀取 DIMACS 圖

    Raises:
        ConfigError: 檔案格式錯誤（含行號）
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        n, edges = _parse_dimacs(fh, str(path))
    return Graph.from_edges(n, edges, meta=GraphMeta(family=Family.CUSTOM))
