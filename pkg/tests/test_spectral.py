import math

import numpy as np
import pytest
from scipy.linalg import eigvalsh

from finite_geometry.errors import CapExceededError, EigenSolverError
from finite_geometry.field import field_of_order
from finite_geometry.geometry import QuadraticSpace
from certifiers import spectral
from certifiers.graphs import Graph, build_ak, build_gamma, build_gamma_prime
from certifiers.spectral import (
    ambient_parameters,
    ambient_spectrum_check,
    density_diagnostic,
    eigenvalues,
    interlacing_check,
    jacobi_eigenvalues,
    pseudorandomness_report,
    symmetric_eigen,
    trace_lower_bound,
    verify_gamma_prime_identity,
)


def space(q, k):
    return QuadraticSpace(field_of_order(q), k)


def with_flipped_edge(g, u, v):
    """複製 g 並翻轉一條邊"""
    rows = list(g.rows)
    rows[u] ^= 1 << v
    rows[v] ^= 1 << u
    return Graph(rows, g.loops, g.labels, g.point_ids, g.field, g.meta)


class TestIdentity:
    """A² = μJ + (δ − μ)I"""

    def test_parameters(self):
        """測試 δ 與 μ"""
        assert ambient_parameters(3, 3) == (4, 1)
        assert ambient_parameters(3, 4) == (13, 4)
        assert ambient_parameters(5, 2) == (1, 0)

    @pytest.mark.parametrize("q,k", [(3, 3), (5, 3), (9, 3), (3, 4), (5, 2)])
    def test_full_check(self, q, k):
        """測試逐項整數檢查通過"""
        check = verify_gamma_prime_identity(build_gamma_prime(space(q, k)))
        assert check.exact_pass
        assert check.mode == "full"
        assert check.first_violation is None

    def test_randomized_check(self):
        """測試隨機向量版本通過"""
        check = verify_gamma_prime_identity(build_gamma_prime(space(5, 4)), full_cap=0)
        assert check.exact_pass
        assert check.mode == "randomized"
        assert check.vectors_checked == 32

    @pytest.mark.parametrize("full_cap", [3000, 0])
    def test_detects_corruption(self, full_cap):
        """測試翻轉一條邊後兩種模式都失敗"""
        g = build_gamma_prime(space(3, 3))
        broken = with_flipped_edge(g, 0, 5)
        check = verify_gamma_prime_identity(broken, full_cap=full_cap)
        assert not check.exact_pass
        assert check.first_violation is not None

    def test_rejects_small_k(self):
        """測試 k < 2 不是 Γ′"""
        with pytest.raises(ValueError):
            verify_gamma_prime_identity(build_gamma(space(5, 1)))


class TestEigenvalues:
    """特徵值求解"""

    @pytest.mark.parametrize("seed", range(20))
    def test_jacobi_matches_lapack(self, seed):
        """測試隨機對稱整數矩陣（n ≤ 50）的 Jacobi 與 scipy eigvalsh 一致"""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 51))
        a = rng.integers(-5, 6, size=(n, n))
        sym = (a + a.T).astype(np.float64)
        values, vectors = jacobi_eigenvalues(sym)
        assert np.allclose(np.sort(values), eigvalsh(sym), atol=1e-9)
        assert np.allclose(vectors.T @ vectors, np.eye(n), atol=1e-9)
        assert np.abs(sym @ vectors - vectors * values).max() < 1e-9

    @pytest.mark.parametrize("scale", [1e-300, 1e150])
    def test_jacobi_extreme_scale(self, scale):
        """測試對角差極大或非對角極小時結果仍為有限值"""
        matrix = np.array([[scale, 1.0, 0.0], [1.0, -scale, 1e-300], [0.0, 1e-300, 2.0]])
        values, vectors = jacobi_eigenvalues(matrix)
        assert np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))
        assert np.allclose(np.sort(values), eigvalsh(matrix), rtol=1e-12, atol=1e-9)

    def test_residual_is_eigen_equation(self):
        """測試兩種求解器的殘差 max|AV − VΛ| 都很小"""
        matrix = build_gamma(space(5, 3)).to_dense(np.float64)
        spectrum = symmetric_eigen(matrix)
        assert spectrum.solver == "jacobi" and spectrum.residual < 1e-10
        skewed = matrix + np.diag(np.arange(10) * 1e-3)
        assert symmetric_eigen(skewed, jacobi_max_n=0).residual < 1e-10

    def test_jacobi_not_converging(self, monkeypatch):
        """測試超過輪數上限"""
        monkeypatch.setattr(spectral, "JACOBI_MAX_SWEEPS", 0)
        with pytest.raises(EigenSolverError):
            jacobi_eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_solver_selection(self):
        """測試依大小選擇求解器"""
        matrix = build_gamma(space(7, 3)).to_dense(np.float64)
        small = symmetric_eigen(matrix, jacobi_max_n=100)
        large = symmetric_eigen(matrix, jacobi_max_n=10)
        assert (small.solver, large.solver) == ("jacobi", "lapack")
        assert np.allclose(small.values, large.values, atol=1e-8)
        assert small.residual < 1e-8 and large.residual < 1e-8

    def test_petersen_spectrum(self):
        """測試 Petersen 圖的譜 {3, 1⁵, (−2)⁴}"""
        values = eigenvalues(build_gamma(space(5, 3))).values
        expected = [3.0] + [1.0] * 5 + [-2.0] * 4
        assert np.allclose(values, expected, atol=1e-9)

    def test_eigen_cap(self):
        """測試特徵值求解的頂點數上限"""
        with pytest.raises(CapExceededError):
            eigenvalues(build_gamma(space(5, 4)), eigen_cap=10)


class TestPseudorandomness:
    """(n, d, λ) 報告"""

    def test_petersen_report(self):
        """測試 Γ^□(3, 5)：λ = 2 ≤ √5"""
        report = pseudorandomness_report(build_gamma(space(5, 3)))
        assert (report.n, report.degree) == (10, 3)
        assert report.lambda_ == pytest.approx(2.0)
        assert report.bound == pytest.approx(math.sqrt(5))
        assert report.passes and report.trace_consistent
        assert report.lambda_over_sqrt_d == pytest.approx(2 / math.sqrt(3))
        assert report.trace_lower_bound == pytest.approx(math.sqrt(21 / 9))

    @pytest.mark.parametrize("q,k", [(3, 4), (5, 4), (7, 3), (9, 3), (3, 5)])
    def test_bound_holds(self, q, k):
        """測試 λ ≤ q^((k-2)/2)"""
        report = pseudorandomness_report(build_gamma(space(q, k)))
        assert report.passes
        assert report.lambda_ <= q ** ((k - 2) / 2) + 1e-6
        assert report.lambda_ >= report.trace_lower_bound - 1e-9

    def test_irregular_rejected(self):
        """測試不正則的圖無法給出報告"""
        with pytest.raises(ValueError):
            pseudorandomness_report(build_ak(field_of_order(5), 3))

    def test_density_diagnostics(self):
        """測試密度診斷與跡下界"""
        assert density_diagnostic(3, 10, 3) == pytest.approx(0.3 * math.sqrt(10))
        assert density_diagnostic(3, 0, 3) == 0.0
        assert trace_lower_bound(3, 10) == pytest.approx(math.sqrt(3 * 7 / 9))


class TestAmbientSpectrum:
    """Γ′ 的譜與交錯"""

    @pytest.mark.parametrize("q,k", [(3, 3), (5, 3), (3, 4), (5, 2)])
    def test_ambient_spectrum(self, q, k):
        """測試 Γ′ 的譜為 {δ, ±q^((k-2)/2)}"""
        values = eigenvalues(build_gamma_prime(space(q, k))).values
        assert ambient_spectrum_check(values, q, k)

    def test_ambient_spectrum_rejects(self):
        """測試錯誤的譜被拒絕"""
        assert not ambient_spectrum_check([4.0, 1.0, 1.5], 3, 3)
        assert not ambient_spectrum_check([], 3, 3)

    @pytest.mark.parametrize("q,k", [(5, 3), (7, 3), (3, 4)])
    def test_interlacing(self, q, k):
        """測試 Γ^□ 的特徵值在 Γ′ 的特徵值之間交錯"""
        sp = space(q, k)
        outer = eigenvalues(build_gamma_prime(sp)).values
        inner = eigenvalues(build_gamma(sp)).values
        assert interlacing_check(outer, inner).passes

    def test_interlacing_violation(self):
        """測試違反時回傳第一個（從 1 起算的）位置"""
        result = interlacing_check([3.0, 1.0, -1.0], [5.0, 0.0])
        assert not result.passes
        assert result.first_violation == 1

    def test_inner_longer(self):
        """測試內層序列不可比外層長"""
        with pytest.raises(ValueError):
            interlacing_check([1.0], [1.0, 0.0])
