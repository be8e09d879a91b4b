#!/usr/bin/env python3
"""
正交圖建構

Γ^ε(k, q)、含自環的環境圖 Γ′(k, q)，以及 Alon–Krivelevich 比較圖。
鄰接以 Python 整數位元列儲存：第 v 列的第 u 位元代表 u ~ v。
"""

import logging
from enum import Enum
from typing import Callable, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel
from scipy import sparse

from finite_geometry.errors import CapExceededError
from finite_geometry.field import Field, construct_field
from finite_geometry.geometry import (
    DEFAULT_VERTEX_CAP,
    DiagonalForm,
    PointClass,
    ProjectivePoint,
    QuadraticSpace,
    projective_points,
    standard_form,
)

logger = logging.getLogger(__name__)

# 列舉階段允許的點數相對於頂點上限的倍數（Γ^ε 約取一半的點）
POINT_CAP_FACTOR = 3
# 每批計算 β 的列數上限（以元素數計）
BLOCK_ENTRIES = 1 << 22


class Family(str, Enum):
    GAMMA = "gamma"
    GAMMA_PRIME = "gamma-prime"
    AK = "alon-krivelevich"
    NEIGHBORHOOD = "neighborhood"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, text: str) -> "Family":
        aliases = {"ak": cls.AK, "gamma-square": cls.GAMMA, "gamma-nonsquare": cls.GAMMA}
        key = text.strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


class GraphMeta(BaseModel):
    """建構描述：足以重建整張圖"""

    family: Family
    k: int = 0
    q: int = 0
    p: int = 0
    e: int = 1
    epsilon: Optional[PointClass] = None
    xi: Optional[int] = None
    modulus_poly: List[int] = []
    parent: Optional["GraphMeta"] = None
    center: Optional[int] = None

    @property
    def epsilon_label(self) -> str:
        return self.epsilon.value if self.epsilon is not None else "none"

    def describe(self) -> str:
        if self.family is Family.NEIGHBORHOOD and self.parent is not None:
            return f"N({self.center}) ⊂ {self.parent.describe()}"
        if self.family is Family.GAMMA:
            return f"Γ^{self.epsilon_label}({self.k}, {self.q})"
        if self.family is Family.GAMMA_PRIME:
            return f"Γ′({self.k}, {self.q})"
        if self.family is Family.AK:
            return f"AK({self.k}, {self.q})"
        return "custom"


GraphMeta.model_rebuild()


class GraphStats(BaseModel):
    n: int
    degree_min: int
    degree_max: int
    edge_count: int
    loop_count: int
    is_regular: bool
    d: Optional[int] = None
    average_degree: float


class SRGParameters(NamedTuple):
    n: int
    d: int
    lam: int
    mu: int


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class Graph:
    """
    位元列鄰接的有限圖

    自環同時記錄在 loops 位元集合與 rows 的對角位元上。
    labels 是每個頂點的射影點座標編碼（n×k），point_ids 是它在 PG(k-1, q) 列舉中的位置。
    """

    __slots__ = ("n", "rows", "loops", "labels", "point_ids", "field", "meta")

    def __init__(
        self,
        rows: List[int],
        loops: int = 0,
        labels: Optional[np.ndarray] = None,
        point_ids: Optional[np.ndarray] = None,
        field: Optional[Field] = None,
        meta: Optional[GraphMeta] = None,
    ):
        self.n = len(rows)
        self.rows = rows
        self.loops = loops
        self.labels = labels if labels is not None else np.zeros((self.n, 0), dtype=np.int64)
        self.point_ids = point_ids if point_ids is not None else np.arange(self.n)
        self.field = field
        self.meta = meta if meta is not None else GraphMeta(family=Family.CUSTOM)

    # ---- 查詢 ----

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def has_loop(self, v: int) -> bool:
        return bool((self.loops >> v) & 1)

    def degree(self, v: int) -> int:
        """列和（自環計 1）"""
        return self.rows[v].bit_count()

    def neighbors(self, v: int) -> List[int]:
        """不含自己的鄰居，依索引遞增"""
        return [u for u in _bits(self.rows[v]) if u != v]

    def neighbor_mask(self, v: int) -> int:
        return self.rows[v] & ~(1 << v)

    def edges(self) -> Iterator[Tuple[int, int]]:
        """u < v 的邊，再來是 (v, v) 形式的自環"""
        for u in range(self.n):
            for v in _bits(self.rows[u] >> (u + 1)):
                yield u, u + 1 + v
        for v in _bits(self.loops):
            yield v, v

    @property
    def loop_count(self) -> int:
        return self.loops.bit_count()

    @property
    def edge_count(self) -> int:
        """不含自環的邊數"""
        return (sum(r.bit_count() for r in self.rows) - self.loop_count) // 2

    def label(self, v: int) -> ProjectivePoint:
        if self.field is None:
            raise ValueError("此圖沒有射影點標籤")
        coords = tuple(int(c) for c in self.labels[v])
        return ProjectivePoint(coords, int(self.point_ids[v]), self.field)

    # ---- 轉換 ----

    def _row_bytes(self) -> np.ndarray:
        width = (self.n + 7) // 8
        buf = b"".join(r.to_bytes(width, "little") for r in self.rows)
        return np.frombuffer(buf, dtype=np.uint8).reshape(self.n, width)

    def to_dense(self, dtype: type = np.int64) -> np.ndarray:
        """鄰接矩陣（對角線為自環）"""
        if self.n == 0:
            return np.zeros((0, 0), dtype=dtype)
        bits = np.unpackbits(self._row_bytes(), axis=1, bitorder="little")[:, : self.n]
        return bits.astype(dtype)

    def row_indices(self, v: int) -> np.ndarray:
        """第 v 列所有 1 位元的欄位（含對角）"""
        width = (self.n + 7) // 8
        row_bits = np.unpackbits(
            np.frombuffer(self.rows[v].to_bytes(width, "little"), dtype=np.uint8),
            bitorder="little",
        )
        return np.flatnonzero(row_bits[: self.n])

    def to_sparse(self) -> sparse.csr_matrix:
        """int64 CSR 鄰接矩陣，逐列解包以免配置 n×n 陣列"""
        indptr = [0]
        indices = []
        for v in range(self.n):
            cols = self.row_indices(v)
            indices.append(cols)
            indptr.append(indptr[-1] + len(cols))
        data_idx = np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64)
        data = np.ones(len(data_idx), dtype=np.int64)
        return sparse.csr_matrix((data, data_idx, np.array(indptr)), shape=(self.n, self.n))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[Tuple[int, int]], meta: Optional[GraphMeta] = None
    ) -> "Graph":
        """由邊列表建圖；(v, v) 視為自環"""
        rows = [0] * n
        loops = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"邊 ({u}, {v}) 超出頂點範圍 n = {n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
            if u == v:
                loops |= 1 << v
        return cls(rows, loops, meta=meta)

    def subgraph(self, vertices: Sequence[int], meta: Optional[GraphMeta] = None) -> "Graph":
        """誘導子圖，保留給定的頂點順序與標籤"""
        vertices = list(vertices)
        if not vertices:
            return Graph(
                [], 0, self.labels[:0], self.point_ids[:0], self.field, meta or self.meta
            )
        dense_rows = np.unpackbits(
            self._row_bytes()[vertices], axis=1, bitorder="little"
        )[:, : self.n][:, vertices]
        packed = np.packbits(dense_rows, axis=1, bitorder="little")
        rows = [int.from_bytes(row.tobytes(), "little") for row in packed]
        loops = 0
        for i, v in enumerate(vertices):
            if self.has_loop(v):
                loops |= 1 << i
        return Graph(
            rows,
            loops,
            self.labels[vertices],
            self.point_ids[vertices],
            self.field,
            meta or self.meta,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.rows == other.rows and self.loops == other.loops

    def __repr__(self) -> str:
        return f"Graph({self.meta.describe()}, n={self.n}, m={self.edge_count})"


# ---- 建構 ----


def _pack_rows(form: DiagonalForm, points: np.ndarray) -> List[int]:
    """β(x, y) = 0 的位元列，逐批計算"""
    n = len(points)
    block = max(1, BLOCK_ENTRIES // max(n, 1))
    rows: List[int] = []
    for start in range(0, n, block):
        mask = form.gram_block(points[start : start + block], points) == 0
        packed = np.packbits(mask, axis=1, bitorder="little")
        rows.extend(int.from_bytes(r.tobytes(), "little") for r in packed)
    return rows


def _meta_for(field: Field, k: int, family: Family, **extra) -> GraphMeta:
    return GraphMeta(
        family=family,
        k=k,
        q=field.q,
        p=field.p,
        e=field.e,
        modulus_poly=list(field.modulus_poly),
        **extra,
    )


def _select(
    form: DiagonalForm, keep: Callable[[np.ndarray], np.ndarray], vertex_cap: int
) -> Tuple[np.ndarray, np.ndarray]:
    field = form.field
    points = projective_points(field, form.k, vertex_cap=POINT_CAP_FACTOR * vertex_cap)
    ids = np.flatnonzero(keep(form.characters(points)))
    if len(ids) > vertex_cap:
        raise CapExceededError("頂點數", len(ids), vertex_cap)
    return points[ids], ids


def build_gamma(
    space: QuadraticSpace,
    epsilon: PointClass = PointClass.SQUARE,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> Graph:
    """
    Γ^ε(k, q)：頂點為 X_ε，x ~ y 當且僅當 β(x, y) = 0

    Raises:
        CapExceededError: 頂點數超過上限
    """
    if epsilon is PointClass.SINGULAR:
        raise ValueError("ε 必須是 square 或 nonsquare")
    target = epsilon.character
    labels, ids = _select(space, lambda chars: chars == target, vertex_cap)
    rows = _pack_rows(space, labels)
    meta = _meta_for(space.field, space.k, Family.GAMMA, epsilon=epsilon, xi=space.xi.code)
    g = Graph(rows, 0, labels, ids, space.field, meta)
    logger.info("建立 %s：n = %d，m = %d", meta.describe(), g.n, g.edge_count)
    return g


def build_gamma_prime(space: QuadraticSpace, vertex_cap: int = DEFAULT_VERTEX_CAP) -> Graph:
    """Γ′(k, q)：PG(k-1, q) 全部點的正交圖，X₀ 上有自環"""
    if space.k < 2:
        raise ValueError(f"Γ′ 需要 k ≥ 2，收到 k = {space.k}")
    points = projective_points(space.field, space.k, vertex_cap=vertex_cap)
    rows = _pack_rows(space, points)
    loops = 0
    for v in np.flatnonzero(space.characters(points) == 0):
        loops |= 1 << int(v)
    meta = _meta_for(space.field, space.k, Family.GAMMA_PRIME, xi=space.xi.code)
    g = Graph(rows, loops, points, np.arange(len(points)), space.field, meta)
    logger.info("建立 %s：m = %d，自環 %d 個", meta.describe(), g.n, g.loop_count)
    return g


def build_ak(field: Field, k: int, vertex_cap: int = DEFAULT_VERTEX_CAP) -> Graph:
    """Alon–Krivelevich 圖：標準型 Σ x_i y_i 下非自正交的點"""
    if k < 2:
        raise ValueError(f"AK 圖需要 k ≥ 2，收到 k = {k}")
    form = standard_form(field, k)
    labels, ids = _select(form, lambda chars: chars != 0, vertex_cap)
    rows = _pack_rows(form, labels)
    meta = _meta_for(field, k, Family.AK)
    g = Graph(rows, 0, labels, ids, field, meta)
    logger.info("建立 %s：n = %d，m = %d", meta.describe(), g.n, g.edge_count)
    return g


def induced_neighborhood(g: Graph, v: int) -> Graph:
    """N(v) 的誘導子圖，頂點順序與標籤沿用原圖"""
    if not 0 <= v < g.n:
        raise ValueError(f"頂點 {v} 超出範圍 n = {g.n}")
    meta = GraphMeta(
        family=Family.NEIGHBORHOOD,
        k=g.meta.k,
        q=g.meta.q,
        p=g.meta.p,
        e=g.meta.e,
        epsilon=g.meta.epsilon,
        xi=g.meta.xi,
        modulus_poly=g.meta.modulus_poly,
        parent=g.meta,
        center=v,
    )
    return g.subgraph(g.neighbors(v), meta)


def rebuild(meta: GraphMeta, vertex_cap: int = DEFAULT_VERTEX_CAP) -> Graph:
    """依建構描述重建圖"""
    if meta.family is Family.NEIGHBORHOOD:
        if meta.parent is None or meta.center is None:
            raise ValueError("鄰域描述缺少 parent 或 center")
        return induced_neighborhood(rebuild(meta.parent, vertex_cap), meta.center)
    if meta.family is Family.CUSTOM:
        raise ValueError("自訂圖沒有可重建的描述")
    field = construct_field(meta.p, meta.e, size_cap=meta.q)
    if meta.family is Family.AK:
        return build_ak(field, meta.k, vertex_cap)
    space = QuadraticSpace(field, meta.k, meta.xi)
    if meta.family is Family.GAMMA_PRIME:
        return build_gamma_prime(space, vertex_cap)
    return build_gamma(space, meta.epsilon or PointClass.SQUARE, vertex_cap)


# ---- 統計 ----


def graph_stats(g: Graph) -> GraphStats:
    """由鄰接重新計數；度數包含自環（列和慣例）"""
    degrees = [r.bit_count() for r in g.rows]
    dmin = min(degrees, default=0)
    dmax = max(degrees, default=0)
    regular = dmin == dmax
    total = sum(degrees)
    return GraphStats(
        n=g.n,
        degree_min=dmin,
        degree_max=dmax,
        edge_count=(total - g.loop_count) // 2,
        loop_count=g.loop_count,
        is_regular=regular,
        d=dmin if regular else None,
        average_degree=total / g.n if g.n else 0.0,
    )


def strongly_regular_parameters(g: Graph) -> Optional[SRGParameters]:
    """
    強正則參數 (n, d, λ, μ)

    圖有自環、不正則、或共同鄰居數不固定時回傳 None；
    完全圖與無邊圖也回傳 None（λ 或 μ 沒有定義）。
    """
    if g.loops or g.n < 2:
        return None
    stats = graph_stats(g)
    if not stats.is_regular:
        return None
    lam: Optional[int] = None
    mu: Optional[int] = None
    for i in range(g.n):
        ri = g.rows[i]
        for j in range(i + 1, g.n):
            common = (ri & g.rows[j]).bit_count()
            if (ri >> j) & 1:
                if lam is None:
                    lam = common
                elif common != lam:
                    return None
            else:
                if mu is None:
                    mu = common
                elif common != mu:
                    return None
    if lam is None or mu is None:
        return None
    return SRGParameters(g.n, stats.d or 0, lam, mu)
