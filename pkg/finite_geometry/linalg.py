#!/usr/bin/env python3
"""
GF(q) 上的小型線性代數

高斯消去以 FieldElement 的巢狀 list 表示矩陣（列優先），維度只到 k ≤ 6 左右，
全部用純 Python 迴圈。矩陣乘法則作用在元素編碼的 int64 陣列上，
一次處理整批射影點。
"""

from typing import List, Sequence, Tuple

import numpy as np

from .field import Field, FieldElement

Matrix = List[List[FieldElement]]


def identity(field: Field, n: int) -> Matrix:
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def from_codes(field: Field, rows: Sequence[Sequence[int]]) -> Matrix:
    return [[field.from_code(int(c)) for c in row] for row in rows]


def to_codes(mat: Matrix) -> List[List[int]]:
    return [[x.code for x in row] for row in mat]


def matmul_codes(field: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """編碼陣列的乘積 A·B（質數體直接取模）"""
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"矩陣維度不相容: {A.shape} 與 {B.shape}")
    if field.e == 1:
        return (A @ B) % field.p
    acc = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for t in range(A.shape[1]):
        acc = field.add(acc, field.mul(A[:, t : t + 1], B[t : t + 1, :]))
    return acc


def rref(field: Field, mat: Matrix) -> Tuple[Matrix, List[int]]:
    """
    簡化列梯形式

    Returns:
        (化簡後的矩陣, 樞紐欄位列表)
    """
    m = [list(row) for row in mat]
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        factor = m[r][c].inverse()
        m[r] = [x * factor for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - y * f for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def nullspace(field: Field, mat: Matrix, ncols: int) -> Matrix:
    """
    {x : mat · x = 0} 的基底（每個自由變數一個向量）

    mat 可以沒有任何列，此時回傳標準基底。
    """
    if not mat:
        return identity(field, ncols)
    reduced, pivots = rref(field, mat)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [field.zero] * ncols
        vec[fcol] = field.one
        for row_idx, pcol in enumerate(pivots):
            vec[pcol] = -reduced[row_idx][fcol]
        basis.append(vec)
    return basis
