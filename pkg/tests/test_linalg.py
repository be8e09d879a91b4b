import numpy as np
import pytest

from finite_geometry import linalg
from finite_geometry.field import field_of_order


@pytest.fixture
def gf7():
    return field_of_order(7)


class TestLinearAlgebra:
    """GF(q) 上的高斯消去"""

    def test_rref_pivots(self, gf7):
        """測試簡化列梯形式的樞紐欄位"""
        mat = linalg.from_codes(gf7, [[1, 2, 3], [2, 4, 6], [0, 1, 1]])
        reduced, pivots = linalg.rref(gf7, mat)
        assert pivots == [0, 1]
        assert linalg.to_codes(reduced)[2] == [0, 0, 0]

    @pytest.mark.parametrize("q", [7, 9, 25])
    def test_nullspace_is_annihilated(self, q):
        """測試零空間基底確實被矩陣消去"""
        f = field_of_order(q)
        rows = [[1, 2, 3, 4], [0, 1, 5, 6]]
        basis = linalg.nullspace(f, linalg.from_codes(f, rows), 4)
        assert len(basis) == 2
        product = linalg.matmul_codes(f, np.array(rows), np.array(linalg.to_codes(basis)).T)
        assert not product.any()

    def test_nullspace_of_empty(self, gf7):
        """測試沒有約束時回傳標準基底"""
        basis = linalg.nullspace(gf7, [], 3)
        assert linalg.to_codes(basis) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


class TestMatmulCodes:
    """編碼陣列的乘積"""

    def test_prime_field(self, gf7):
        """測試質數體上等於整數乘積取模"""
        A = np.array([[1, 2], [3, 4]])
        B = np.array([[5, 6], [0, 1]])
        assert linalg.matmul_codes(gf7, A, B).tolist() == [[5, 1], [1, 1]]

    def test_extension_field(self):
        """測試 GF(9) 上逐元素以體運算累加"""
        f9 = field_of_order(9)
        A = np.array([[4, 1], [3, 5]])
        expected = [
            [int(f9.add(f9.mul(A[i, 0], A[0, j]), f9.mul(A[i, 1], A[1, j]))) for j in range(2)]
            for i in range(2)
        ]
        assert linalg.matmul_codes(f9, A, A).tolist() == expected

    def test_identity(self):
        """測試乘上單位矩陣不變"""
        f25 = field_of_order(25)
        A = np.arange(9).reshape(3, 3) + 10
        eye = np.array(linalg.to_codes(linalg.identity(f25, 3)))
        assert linalg.matmul_codes(f25, A, eye).tolist() == A.tolist()

    def test_shape_mismatch(self, gf7):
        """測試維度不相容"""
        with pytest.raises(ValueError):
            linalg.matmul_codes(gf7, np.zeros((2, 3), np.int64), np.zeros((2, 2), np.int64))
