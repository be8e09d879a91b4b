#!/usr/bin/env python3
"""
等距見證

以正交群元素（AᵀBA = B）證明 Γ^ε(k, q) 頂點可遞，並給出 N(v) 到
Γ^□(k-1, q) 的明確同構。矩陣以編碼陣列（k×k int64）運算，
乘積與垂直子空間的基底都交給 finite_geometry.linalg。
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from finite_geometry import linalg
from finite_geometry.errors import WitnessConstructionError
from finite_geometry.field import Field, square_root
from finite_geometry.geometry import (
    PointClass,
    PointLike,
    QuadraticSpace,
    as_coords,
    canonicalize,
    classify,
    format_point,
    locate,
    point_keys,
)
from finite_geometry.linalg import matmul_codes

from .graphs import Graph, build_gamma

logger = logging.getLogger(__name__)

# 不超過此頂點數時以稠密矩陣一次比對鄰接
DENSE_CHECK_MAX_N = 4096


class IsometryWitness(BaseModel):
    """k×k 矩陣（元素編碼）及其對應的來源、目標點"""

    p: int
    e: int
    k: int
    matrix: List[List[int]]
    source: List[int]
    target: List[int]

    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(self.k, self.k)

    def format(self, field: Field) -> List[str]:
        """每列一行，元素以空白分隔"""
        return [" ".join(field.format_code(c) for c in row) for row in self.matrix]


class TransitivityResult(BaseModel):
    mode: str
    pairs_checked: int
    failures: int
    first_failure: Optional[Tuple[int, int]] = None

    @property
    def passes(self) -> bool:
        return self.failures == 0 and self.pairs_checked > 0


class NeighborhoodResult(BaseModel):
    vertices_checked: int
    mismatched_bits: int
    failed_vertices: List[int] = []

    @property
    def passes(self) -> bool:
        return self.mismatched_bits == 0 and not self.failed_vertices


# ---- 編碼矩陣運算 ----


def gram_matrix(space: QuadraticSpace) -> np.ndarray:
    """B = diag(ξ, 1, …, 1)，β(x, y) = xᵀBy"""
    B = np.zeros((space.k, space.k), dtype=np.int64)
    np.fill_diagonal(B, space.coefficients)
    return B


def preserves_form(space: QuadraticSpace, A: np.ndarray) -> bool:
    """AᵀBA = B（精確）"""
    B = gram_matrix(space)
    return bool(np.array_equal(matmul_codes(space.field, matmul_codes(space.field, A.T, B), A), B))


def orthogonal_inverse(space: QuadraticSpace, A: np.ndarray) -> np.ndarray:
    """A⁻¹ = B⁻¹AᵀB"""
    f = space.field
    B = gram_matrix(space)
    B_inv = np.zeros_like(B)
    np.fill_diagonal(B_inv, f.inv(np.array(space.coefficients)))
    return matmul_codes(f, matmul_codes(f, B_inv, A.T), B)


# ---- 見證建構 ----


def _perp_candidates(space: QuadraticSpace, columns: Sequence[np.ndarray]) -> np.ndarray:
    """與已選欄位都正交的子空間中，所有標準點（依標準順序）"""
    f = space.field
    rows = linalg.from_codes(f, [f.mul(col, np.array(space.coefficients)) for col in columns])
    basis = linalg.nullspace(f, rows, space.k)
    basis_codes = np.array(linalg.to_codes(basis), dtype=np.int64)
    coeffs = np.array(list(itertools.product(range(f.q), repeat=len(basis))), dtype=np.int64)
    vectors = np.zeros((len(coeffs), space.k), dtype=np.int64)
    for i in range(len(basis)):
        vectors = f.add(vectors, f.mul(coeffs[:, i : i + 1], basis_codes[i][None, :]))
    vectors = vectors[(vectors != 0).any(axis=1)]
    points = canonicalize(f, vectors)
    _, first = np.unique(point_keys(f.q, points), return_index=True)
    return points[first]


def _scaled_column(space: QuadraticSpace, candidates: np.ndarray, target_code: int) -> np.ndarray:
    """第一個能縮放成 β(c, c) = target 的候選點，回傳縮放後的向量"""
    f = space.field
    values = space.evaluate(candidates)
    for point, value in zip(candidates, values):
        if value == 0:
            continue
        ratio = f.from_code(int(value)) / f.from_code(target_code)
        root = square_root(ratio)
        if root is not None:
            return f.mul(point, f.inv(root.code))
    raise WitnessConstructionError(
        f"垂直子空間中找不到 β(c, c) = {f.format_code(target_code)} 的候選向量"
    )


def base_witness(space: QuadraticSpace, y: PointLike) -> np.ndarray:
    """
    把類別基準點送到 y 的等距矩陣

    平方類的基準點是 ⟨e_k⟩（c_k 取 y 並縮放成 β = 1），非平方類是 ⟨e_1⟩
    （c_1 取 y 並縮放成 β = ξ）。其餘欄位依序取垂直子空間中第一個可縮放的標準點。

    Raises:
        ValueError: y 是奇異點
        WitnessConstructionError: 找不到可用候選或 AᵀBA ≠ B
    """
    f = space.field
    k = space.k
    one, xi = f.one_code, space.xi.code
    y = as_coords(y)
    cls = classify(space, y)
    if cls is PointClass.SINGULAR:
        raise ValueError(f"奇異點 {format_point(f, y)} 不是 Γ 的頂點")

    columns: Dict[int, np.ndarray] = {}
    if cls is PointClass.SQUARE:
        columns[k - 1] = _scaled_column(space, y[None, :], one)
        fill = list(range(k - 2, -1, -1))
    else:
        columns[0] = _scaled_column(space, y[None, :], xi)
        fill = list(range(k - 1, 0, -1))
    for col in fill:
        candidates = _perp_candidates(space, list(columns.values()))
        columns[col] = _scaled_column(space, candidates, xi if col == 0 else one)

    A = np.stack([columns[c] for c in range(k)], axis=1)
    if not preserves_form(space, A):
        raise WitnessConstructionError(f"{format_point(f, y)} 的見證不滿足 AᵀBA = B")
    return A


def transitivity_witness(
    space: QuadraticSpace,
    x: PointLike,
    y: PointLike,
    bases: Optional[Dict[Tuple[int, ...], np.ndarray]] = None,
) -> IsometryWitness:
    """
    把 x 送到 y 的等距：A = A_y · A_x⁻¹

    bases 是 base_witness 的快取（以座標為鍵），大量配對時重複使用。

    Raises:
        ValueError: x、y 類別不同或為奇異點
    """
    if space.k < 1:
        raise ValueError("k 必須 ≥ 1")
    f = space.field
    x, y = as_coords(x), as_coords(y)
    if classify(space, x) is not classify(space, y):
        raise ValueError(f"{format_point(f, x)} 與 {format_point(f, y)} 類別不同")
    cache = bases if bases is not None else {}

    def base(point: np.ndarray) -> np.ndarray:
        key = tuple(int(c) for c in point)
        if key not in cache:
            cache[key] = base_witness(space, point)
        return cache[key]

    A = matmul_codes(f, base(y), orthogonal_inverse(space, base(x)))
    image = canonicalize(f, matmul_codes(f, A, x[:, None])[:, 0])
    if not np.array_equal(image, canonicalize(f, y)) or not preserves_form(space, A):
        raise WitnessConstructionError(f"{format_point(f, x)} → {format_point(f, y)} 的見證無效")
    return IsometryWitness(
        p=f.p,
        e=f.e,
        k=space.k,
        matrix=A.tolist(),
        source=[int(c) for c in x],
        target=[int(c) for c in y],
    )


def apply_isometry(w: IsometryWitness, g: Graph) -> List[int]:
    """
    等距在 g 的頂點上誘導的置換：perm[u] = A·u 所在的頂點

    Raises:
        ValueError: 像點不在頂點集合中
    """
    if g.field is None:
        raise ValueError("此圖沒有射影點標籤")
    f = g.field
    images = matmul_codes(f, g.labels, w.array().T)
    perm = locate(f, g.labels, images)
    if np.any(perm < 0):
        raise ValueError("等距的像點不在頂點集合中")
    return [int(v) for v in perm]


def preserves_adjacency(g: Graph, perm: Sequence[int]) -> bool:
    """perm 是雙射且 u ~ v ⇔ perm[u] ~ perm[v]"""
    mapping = np.asarray(perm, dtype=np.int64)
    if len(mapping) != g.n or len(np.unique(mapping)) != g.n:
        return False
    if g.n <= DENSE_CHECK_MAX_N:
        dense = g.to_dense(np.uint8)
        return bool(np.array_equal(dense[np.ix_(mapping, mapping)], dense))
    for u in range(g.n):
        mapped = np.sort(mapping[g.row_indices(u)])
        if not np.array_equal(mapped, g.row_indices(int(mapping[u]))):
            return False
    return True


def check_transitivity(
    space: QuadraticSpace,
    g: Graph,
    exhaustive_cap: int = 200,
    samples: int = 500,
    seed: int = 20190101,
) -> TransitivityResult:
    """
    對頂點配對建構見證並檢查誘導置換保持鄰接

    n ≤ exhaustive_cap 時檢查所有有序配對，否則以固定種子抽樣 samples 對。
    """
    if g.n == 0:
        return TransitivityResult(mode="empty", pairs_checked=0, failures=0)
    if g.n <= exhaustive_cap:
        pairs = list(itertools.product(range(g.n), repeat=2))
        mode = "exhaustive"
    else:
        rng = np.random.default_rng(seed)
        drawn = rng.integers(0, g.n, size=(samples, 2))
        pairs = [(int(a), int(b)) for a, b in drawn]
        mode = "sampled"
    bases: Dict[Tuple[int, ...], np.ndarray] = {}
    failures = 0
    first: Optional[Tuple[int, int]] = None
    for a, b in pairs:
        try:
            w = transitivity_witness(space, g.labels[a], g.labels[b], bases)
            perm = apply_isometry(w, g)
            ok = perm[a] == b and preserves_adjacency(g, perm)
        except (WitnessConstructionError, ValueError) as exc:
            logger.warning("配對 (%d, %d) 失敗：%s", a, b, exc)
            ok = False
        if not ok:
            failures += 1
            first = first or (a, b)
    logger.info("%s：%s 檢查 %d 對，失敗 %d", g.meta.describe(), mode, len(pairs), failures)
    return TransitivityResult(
        mode=mode, pairs_checked=len(pairs), failures=failures, first_failure=first
    )


# ---- 鄰域同構 ----


@dataclass
class NeighborhoodMap:
    """N(center) → Γ^□(k-1, q) 的頂點對應：neighbors[i] ↦ images[i]"""

    center: int
    neighbors: List[int]
    images: List[int]
    target: Graph

    def is_bijection(self) -> bool:
        return (
            len(self.images) == self.target.n
            and all(i >= 0 for i in self.images)
            and len(set(self.images)) == len(self.images)
        )

    def mismatched_bits(self, g: Graph) -> int:
        """鄰接不一致的無序配對數（images 必須都有效）"""
        if not self.neighbors:
            return 0
        source = g.subgraph(self.neighbors).to_dense(np.uint8)
        image = np.asarray(self.images, dtype=np.int64)
        mapped = self.target.to_dense(np.uint8)[np.ix_(image, image)]
        return int(np.triu(source != mapped, 1).sum())


def neighborhood_isomorphism(
    space: QuadraticSpace,
    g: Graph,
    v: int,
    target: Optional[Graph] = None,
    bases: Optional[Dict[Tuple[int, ...], np.ndarray]] = None,
) -> NeighborhoodMap:
    """
    以 v → ⟨e_k⟩ 的等距加上刪去最後座標，把 N(v) 對到 Γ^□(k-1, q)

    target 可傳入已建好的 Γ^□(k-1, q)。
    """
    if space.k < 3:
        raise ValueError(f"鄰域同構需要 k ≥ 3，收到 k = {space.k}")
    f = space.field
    if target is None:
        target = build_gamma(space.reduced(space.k - 1))
    e_k = np.zeros(space.k, dtype=np.int64)
    e_k[-1] = f.one_code
    w = transitivity_witness(space, g.labels[v], e_k, bases)
    neighbors = g.neighbors(v)
    if not neighbors:
        return NeighborhoodMap(v, [], [], target)
    moved = matmul_codes(f, g.labels[neighbors], w.array().T)
    if np.any(moved[:, -1] != 0):
        raise WitnessConstructionError(f"頂點 {v} 的鄰居沒有落在 e_k^⊥")
    images = locate(f, target.labels, moved[:, :-1])
    return NeighborhoodMap(v, neighbors, [int(i) for i in images], target)


def check_neighborhoods(
    space: QuadraticSpace, g: Graph, vertices: Optional[Sequence[int]] = None
) -> NeighborhoodResult:
    """對給定頂點（預設全部）檢查鄰域同構，累計不一致的鄰接位元"""
    target = build_gamma(space.reduced(space.k - 1))
    bases: Dict[Tuple[int, ...], np.ndarray] = {}
    chosen = range(g.n) if vertices is None else vertices
    mismatched = 0
    failed: List[int] = []
    count = 0
    for v in chosen:
        count += 1
        try:
            nmap = neighborhood_isomorphism(space, g, v, target, bases)
        except WitnessConstructionError as exc:
            logger.warning("頂點 %d：%s", v, exc)
            failed.append(v)
            continue
        if not nmap.is_bijection():
            failed.append(v)
            continue
        mismatched += nmap.mismatched_bits(g)
    logger.info("%s：檢查 %d 個鄰域，不一致位元 %d", g.meta.describe(), count, mismatched)
    return NeighborhoodResult(
        vertices_checked=count, mismatched_bits=mismatched, failed_vertices=failed
    )
