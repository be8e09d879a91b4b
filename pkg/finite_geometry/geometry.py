#!/usr/bin/env python3
"""
射影幾何 PG(k-1, q) 與二次型

列舉標準射影點、計算 Q 與 β、依 Q 值把點分成 X₀ / X_□ / X_⊠，並判斷正交。
點以編碼陣列表示，每一列是一個首個非零座標為 1 的代表向量。
"""

import itertools
import logging
from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel

from .errors import CapExceededError
from .field import Field, FieldElement, smallest_nonsquare

logger = logging.getLogger(__name__)

DEFAULT_VERTEX_CAP = 20000


class PointClass(str, Enum):
    """射影點的類別（X₀ / X_□ / X_⊠）"""

    SINGULAR = "singular"
    SQUARE = "square"
    NONSQUARE = "nonsquare"

    @classmethod
    def from_character(cls, character: int) -> "PointClass":
        return {0: cls.SINGULAR, 1: cls.SQUARE, -1: cls.NONSQUARE}[int(character)]

    @property
    def character(self) -> int:
        return {"singular": 0, "square": 1, "nonsquare": -1}[self.value]


@dataclass(frozen=True)
class ProjectivePoint:
    """PG(k-1, q) 的點：標準代表向量（編碼）與在標準列舉中的位置"""

    coords: Tuple[int, ...]
    index: int
    field: Field = dataclass_field(compare=False, repr=False)

    def vector(self) -> List[FieldElement]:
        return [self.field.from_code(c) for c in self.coords]

    def label(self) -> str:
        return format_point(self.field, self.coords)

    def __str__(self) -> str:
        return f"⟨({self.label()})⟩"


PointLike = Union[ProjectivePoint, Sequence[int], np.ndarray]


def as_coords(x: PointLike) -> np.ndarray:
    if isinstance(x, ProjectivePoint):
        return np.asarray(x.coords, dtype=np.int64)
    return np.asarray(x, dtype=np.int64)


def format_point(field: Field, coords: Sequence[int]) -> str:
    """報表格式：座標以冒號分隔，擴張體元素寫成以逗號分隔的係數"""
    return ":".join(field.format_code(int(c)) for c in coords)


def parse_point(field: Field, text: str) -> Tuple[int, ...]:
    return tuple(field.parse_code(part) for part in text.strip().split(":"))


class DiagonalForm:
    """
    對角二次型 Q(x) = Σ a_i x_i²

    β(x, y) = Σ a_i x_i y_i 為其極化形式。
    """

    __slots__ = ("field", "k", "coefficients", "_coeff_array")

    def __init__(self, field: Field, coefficients: Sequence[int]):
        if len(coefficients) < 1:
            raise ValueError("維度 k 必須 ≥ 1")
        self.field = field
        self.k = len(coefficients)
        self.coefficients = tuple(int(c) for c in coefficients)
        self._coeff_array = np.array(self.coefficients, dtype=np.int64)

    @property
    def q(self) -> int:
        return self.field.q

    def evaluate(self, X: PointLike) -> np.ndarray:
        """Q(x)，X 的最後一軸為座標"""
        X = as_coords(X)
        f = self.field
        if f.e == 1:
            return (X * X % f.p * self._coeff_array).sum(axis=-1) % f.p
        acc = np.zeros(X.shape[:-1], dtype=np.int64)
        for i, c in enumerate(self.coefficients):
            acc = f.add(acc, f.mul(f.mul(X[..., i], X[..., i]), c))
        return acc

    def bilinear(self, X: PointLike, Y: PointLike) -> np.ndarray:
        """逐列 β(x, y)（可廣播）"""
        X = as_coords(X)
        Y = as_coords(Y)
        f = self.field
        if f.e == 1:
            return (X * Y % f.p * self._coeff_array).sum(axis=-1) % f.p
        acc = np.zeros(np.broadcast_shapes(X.shape, Y.shape)[:-1], dtype=np.int64)
        for i, c in enumerate(self.coefficients):
            acc = f.add(acc, f.mul(f.mul(X[..., i], Y[..., i]), c))
        return acc

    def gram_block(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """所有配對的 β 值，形狀 (len(X), len(Y))"""
        f = self.field
        if f.e == 1:
            return ((X * self._coeff_array) % f.p) @ Y.T % f.p
        acc = np.zeros((X.shape[0], Y.shape[0]), dtype=np.int64)
        for i, c in enumerate(self.coefficients):
            left = f.mul(X[:, i], c)
            acc = f.add(acc, f.mul(left[:, None], Y[None, :, i]))
        return acc

    def characters(self, X: np.ndarray) -> np.ndarray:
        """每個點的 Q 值二次特徵"""
        return self.field.character(self.evaluate(X))

    def __repr__(self) -> str:
        coeffs = ", ".join(self.field.format_code(c) for c in self.coefficients)
        return f"DiagonalForm({self.field!r}, [{coeffs}])"


class QuadraticSpace(DiagonalForm):
    """
    二次空間 Q(x) = ξx₁² + Σ_{i≥2} x_i²，ξ 為非平方

    ξ 預設為標準順序中最小的非平方元素。
    """

    __slots__ = ("xi",)

    def __init__(self, field: Field, k: int, xi: Optional[Union[FieldElement, int]] = None):
        if k < 1:
            raise ValueError(f"維度 k = {k} 必須 ≥ 1")
        if xi is None:
            xi = smallest_nonsquare(field)
        elif not isinstance(xi, FieldElement):
            xi = field.from_code(int(xi))
        if int(field.character(xi.code)) != -1:
            raise ValueError(f"ξ = {xi} 必須是 {field} 的非平方元素")
        super().__init__(field, (xi.code,) + (field.one_code,) * (k - 1))
        self.xi = xi

    def reduced(self, k: int) -> "QuadraticSpace":
        """相同體與 ξ、較低維度的空間"""
        return QuadraticSpace(self.field, k, self.xi)

    def __repr__(self) -> str:
        return f"QuadraticSpace(GF({self.q}), k={self.k}, ξ={self.xi})"


def standard_form(field: Field, k: int) -> DiagonalForm:
    """標準型 Σ x_i²（Alon–Krivelevich 比較圖使用）"""
    return DiagonalForm(field, (field.one_code,) * k)


def point_count(q: int, k: int) -> int:
    return (q**k - 1) // (q - 1)


@lru_cache(maxsize=32)
def _cached_points(field: Field, k: int) -> np.ndarray:
    q = field.q
    blocks = []
    for lead in range(k):
        tail = k - lead - 1
        if tail:
            rest = np.array(list(itertools.product(range(q), repeat=tail)), dtype=np.int64)
        else:
            rest = np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((rest.shape[0], k), dtype=np.int64)
        block[:, lead] = field.one_code
        block[:, lead + 1 :] = rest
        blocks.append(block)
    points = np.concatenate(blocks)
    points = points[np.lexsort(points.T[::-1])]
    points.setflags(write=False)
    logger.debug("列舉 PG(%d, %d)：%d 個點", k - 1, q, len(points))
    return points


def projective_points(field: Field, k: int, vertex_cap: int = DEFAULT_VERTEX_CAP) -> np.ndarray:
    """
    PG(k-1, q) 全部標準點（唯讀編碼陣列，依標準座標順序排序）

    Raises:
        CapExceededError: 點數超過 vertex_cap
    """
    if k < 1:
        raise ValueError(f"維度 k = {k} 必須 ≥ 1")
    count = point_count(field.q, k)
    if count > vertex_cap:
        raise CapExceededError(f"PG({k - 1}, {field.q}) 點數", count, vertex_cap)
    return _cached_points(field, k)


def point_keys(q: int, X: np.ndarray) -> np.ndarray:
    """把座標列壓成整數鍵；鍵的大小順序與標準點順序一致"""
    X = np.asarray(X, dtype=np.int64)
    weights = q ** np.arange(X.shape[-1] - 1, -1, -1, dtype=np.int64)
    return (X * weights).sum(axis=-1)


def canonicalize(field: Field, X: PointLike) -> np.ndarray:
    """把非零向量縮放成首個非零座標為 1 的標準代表"""
    X = as_coords(X)
    nonzero = X != 0
    if not np.all(nonzero.any(axis=-1)):
        raise ValueError("零向量不代表射影點")
    lead_pos = nonzero.argmax(axis=-1)
    lead = np.take_along_axis(X, lead_pos[..., None], axis=-1)
    return field.mul(X, field.inv(lead))


def locate(field: Field, points: np.ndarray, X: np.ndarray) -> np.ndarray:
    """在已排序的標準點陣列中尋找 X 的各列；找不到的回傳 -1"""
    all_keys = point_keys(field.q, points)
    keys = point_keys(field.q, canonicalize(field, X))
    idx = np.searchsorted(all_keys, keys)
    clipped = np.minimum(idx, len(all_keys) - 1)
    found = (idx < len(all_keys)) & (all_keys[clipped] == keys)
    return np.where(found, idx, -1)


def point_index(field: Field, points: np.ndarray, x: PointLike) -> int:
    """單一點在標準列舉中的位置（找不到為 -1）"""
    return int(locate(field, points, as_coords(x)[None, :])[0])


def enumerate_points(
    space: DiagonalForm, vertex_cap: int = DEFAULT_VERTEX_CAP
) -> List[ProjectivePoint]:
    """PG(k-1, q) 的 (q^k-1)/(q-1) 個標準點，index 等於序列位置"""
    points = projective_points(space.field, space.k, vertex_cap)
    return [
        ProjectivePoint(tuple(int(c) for c in row), i, space.field)
        for i, row in enumerate(points)
    ]


def classify(space: DiagonalForm, x: PointLike) -> PointClass:
    """依 Q(x) 的二次特徵分類（與代表向量的選擇無關）"""
    return PointClass.from_character(int(space.characters(as_coords(x))))


def orthogonal(space: DiagonalForm, x: PointLike, y: PointLike) -> bool:
    """x ∈ y^⊥ 當且僅當 β(x, y) = 0"""
    return int(space.bilinear(x, y)) == 0


def polarization(space: DiagonalForm, x: PointLike, y: PointLike) -> np.ndarray:
    """½(Q(x+y) − Q(x) − Q(y))，用 2 的反元素實作"""
    f = space.field
    X, Y = as_coords(x), as_coords(y)
    total = f.sub(f.sub(space.evaluate(f.add(X, Y)), space.evaluate(X)), space.evaluate(Y))
    return f.mul(total, f.inv(f.embed(2)))


class Census(BaseModel):
    """各類點的數量"""

    k: int
    q: int
    singular: int
    square: int
    nonsquare: int
    total: int

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.singular, self.square, self.nonsquare)


def census(space: DiagonalForm, vertex_cap: int = DEFAULT_VERTEX_CAP) -> Census:
    """完整列舉後計數 (n₀, n_□, n_⊠)"""
    chars = space.characters(projective_points(space.field, space.k, vertex_cap))
    return Census(
        k=space.k,
        q=space.q,
        singular=int(np.count_nonzero(chars == 0)),
        square=int(np.count_nonzero(chars == 1)),
        nonsquare=int(np.count_nonzero(chars == -1)),
        total=len(chars),
    )


def perp_partner_map(space: QuadraticSpace) -> List[Tuple[int, int]]:
    """
    k = 2 時 ⟨(a₁, a₂)⟩ ↦ ⟨(a₂, −ξa₁)⟩

    回傳 (平方點索引, 對應非平方點索引) 配對；這是 X_□ 到 X_⊠ 的雙射。
    """
    if space.k != 2:
        raise ValueError("perp_partner_map 只適用於 k = 2")
    f = space.field
    points = projective_points(f, 2)
    square_idx = np.flatnonzero(space.characters(points) == 1)
    src = points[square_idx]
    images = np.stack([src[:, 1], f.neg(f.mul(src[:, 0], space.xi.code))], axis=1)
    targets = locate(f, points, images)
    return [(int(s), int(t)) for s, t in zip(square_idx, targets)]
