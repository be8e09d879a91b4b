#!/usr/bin/env python3
"""
譜驗證

- Γ′ 的精確矩陣恆等式 A² = μJ + (δ − μ)I（整數運算）
- 鄰接矩陣特徵值：小矩陣用循環 Jacobi，大矩陣用 LAPACK (scipy eigh)
- 特徵值交錯檢查與 (n, d, λ) 報告
"""

import logging
import math
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
from pydantic import BaseModel

from finite_geometry.errors import CapExceededError, EigenSolverError

from .config import IDENTITY_SEED
from .graphs import Graph

logger = logging.getLogger(__name__)

DEFAULT_EIGEN_CAP = 6000
DEFAULT_IDENTITY_FULL_CAP = 3000
DEFAULT_JACOBI_MAX_N = 64
DEFAULT_TOLERANCE = 1e-6
JACOBI_MAX_SWEEPS = 100


class IdentityCheck(BaseModel):
    m: int
    delta: int
    mu: int
    exact_pass: bool
    first_violation: Optional[Tuple[int, int]] = None
    mode: str = "full"
    vectors_checked: int = 0


class Spectrum(NamedTuple):
    values: np.ndarray
    residual: float
    solver: str


class InterlacingResult(BaseModel):
    passes: bool
    first_violation: Optional[int] = None


class SpectralReport(BaseModel):
    family: str
    k: int
    q: int
    epsilon: str
    n: int
    d: float
    degree: Optional[int] = None
    lambda2: float
    lambda_min: float
    lambda_: float
    bound: float
    passes: bool
    residual: float
    solver: str
    density_diag: float
    trace_lower_bound: float
    lambda_over_sqrt_d: float
    trace_consistent: bool


def ambient_parameters(q: int, k: int) -> Tuple[int, int]:
    """δ = (q^(k-1) − 1)/(q − 1)，μ = (q^(k-2) − 1)/(q − 1)"""
    return (q ** (k - 1) - 1) // (q - 1), (q ** (k - 2) - 1) // (q - 1)


# ---- 恆等式 ----


def _full_identity(g: Graph, delta: int, mu: int) -> Optional[Tuple[int, int]]:
    rows = g.rows
    for i in range(g.n):
        ri = rows[i]
        if ri.bit_count() != delta:
            return (i, i)
        for j in range(i + 1, g.n):
            if (ri & rows[j]).bit_count() != mu:
                return (i, j)
    return None


def _randomized_identity(
    g: Graph, delta: int, mu: int, seed: int, vectors: int
) -> Optional[Tuple[int, int]]:
    rng = np.random.default_rng(seed)
    V = rng.integers(-1000, 1000, size=(g.n, vectors), dtype=np.int64)
    A = g.to_sparse()
    lhs = A @ (A @ V)
    rhs = mu * V.sum(axis=0, keepdims=True) + (delta - mu) * V
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        return int(bad[0][0]), int(bad[0][1])
    return None


def verify_gamma_prime_identity(
    g: Graph,
    full_cap: int = DEFAULT_IDENTITY_FULL_CAP,
    seed: int = IDENTITY_SEED,
    vectors: int = 32,
) -> IdentityCheck:
    """
    檢查 A² = μJ + (δ − μ)I

    m ≤ full_cap 時逐項比對 (A²)_ij = |N(i) ∩ N(j)|；否則檢查
    A(Av) = μ(Jv) + (δ − μ)v 對固定種子的整數向量成立。全程整數運算。
    """
    k, q = g.meta.k, g.meta.q
    if k < 2 or q < 3:
        raise ValueError(f"{g.meta.describe()} 不是 Γ′ 圖")
    delta, mu = ambient_parameters(q, k)
    if g.n <= full_cap:
        violation = _full_identity(g, delta, mu)
        mode, checked = "full", 0
    else:
        violation = _randomized_identity(g, delta, mu, seed, vectors)
        mode, checked = "randomized", vectors
    check = IdentityCheck(
        m=g.n,
        delta=delta,
        mu=mu,
        exact_pass=violation is None,
        first_violation=violation,
        mode=mode,
        vectors_checked=checked,
    )
    logger.info("%s：A² 恆等式 (%s) %s", g.meta.describe(), mode, "通過" if check.exact_pass else "失敗")
    return check


# ---- 特徵值 ----


def jacobi_eigenvalues(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    循環 Jacobi 旋轉

    非對角 Frobenius 範數 < 1e-13·n·max|a_ij| 時收斂。
    |a_pq| ≤ ε·max|a_ij| 的元素直接歸零、不旋轉，τ² 因此不會溢位。

    Returns:
        (未排序的特徵值, 特徵向量矩陣（行向量為特徵向量）)

    Raises:
        EigenSolverError: 超過 sweep 次數仍未收斂
    """
    A = np.array(matrix, dtype=np.float64)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(float(np.abs(A).max(initial=0.0)), 1.0)
    threshold = 1e-13 * max(n, 1) * scale
    negligible = np.finfo(np.float64).eps * scale
    for sweep in range(JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off < threshold:
            logger.debug("Jacobi 在第 %d 輪收斂（n = %d）", sweep, n)
            return np.diag(A).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= negligible:
                    A[p, q] = A[q, p] = 0.0
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    raise EigenSolverError(f"Jacobi 在 {JACOBI_MAX_SWEEPS} 輪內未收斂（n = {n}）")


def symmetric_eigen(matrix: np.ndarray, jacobi_max_n: int = DEFAULT_JACOBI_MAX_N) -> Spectrum:
    """對稱矩陣的遞減特徵值與殘差 max|AV − VΛ|"""
    n = matrix.shape[0]
    if n == 0:
        return Spectrum(np.zeros(0), 0.0, "none")
    if n <= jacobi_max_n:
        w, V = jacobi_eigenvalues(matrix)
        solver = "jacobi"
    else:
        w, V = sla.eigh(np.asarray(matrix, dtype=np.float64), check_finite=False, driver="evd")
        solver = "lapack"
    A = np.asarray(matrix, dtype=np.float64)
    residual = float(np.abs(A @ V - V * w).max())
    return Spectrum(np.sort(w)[::-1], residual, solver)


def eigenvalues(
    g: Graph, eigen_cap: int = DEFAULT_EIGEN_CAP, jacobi_max_n: int = DEFAULT_JACOBI_MAX_N
) -> Spectrum:
    """
    鄰接矩陣（對角線含自環）的特徵值，遞減排序

    Raises:
        CapExceededError: n 超過 eigen_cap
        EigenSolverError: Jacobi 未收斂
    """
    if g.n > eigen_cap:
        raise CapExceededError("特徵值求解的頂點數", g.n, eigen_cap)
    spectrum = symmetric_eigen(g.to_dense(np.float64), jacobi_max_n)
    logger.debug("%s：%s 求解，殘差 %.2e", g.meta.describe(), spectrum.solver, spectrum.residual)
    return spectrum


def interlacing_check(
    spec_outer: Sequence[float], spec_inner: Sequence[float], tolerance: float = DEFAULT_TOLERANCE
) -> InterlacingResult:
    """λ′_i ≥ λ_i ≥ λ′_(m−n+i)，i 從 1 起算；兩者皆為遞減序列"""
    m, n = len(spec_outer), len(spec_inner)
    if n > m:
        raise ValueError(f"內層長度 {n} 不可超過外層長度 {m}")
    for i in range(n):
        upper = spec_outer[i]
        lower = spec_outer[m - n + i]
        if not (upper + tolerance >= spec_inner[i] >= lower - tolerance):
            return InterlacingResult(passes=False, first_violation=i + 1)
    return InterlacingResult(passes=True)


def ambient_spectrum_check(
    values: Sequence[float], q: int, k: int, tolerance: float = DEFAULT_TOLERANCE
) -> bool:
    """Γ′ 的譜恰為 {δ¹, (±q^((k-2)/2))^(m-1)}"""
    delta, _ = ambient_parameters(q, k)
    if not len(values):
        return False
    root = q ** ((k - 2) / 2)
    rest = np.abs(np.asarray(values[1:], dtype=np.float64))
    return abs(values[0] - delta) <= tolerance and bool(np.all(np.abs(rest - root) <= tolerance))


def density_diagnostic(d: float, n: int, k: int) -> float:
    """(d/n)·n^(1/(k-1))"""
    if n == 0 or k < 2:
        return 0.0
    return d / n * n ** (1.0 / (k - 1))


def trace_lower_bound(d: float, n: int) -> float:
    """√(d(n−d)/(n−1))：由 tr(A²) = nd 得到的 λ 下界"""
    if n < 2:
        return 0.0
    return math.sqrt(max(d * (n - d), 0.0) / (n - 1))


def pseudorandomness_report(
    g: Graph,
    eigen_cap: int = DEFAULT_EIGEN_CAP,
    jacobi_max_n: int = DEFAULT_JACOBI_MAX_N,
    tolerance: float = DEFAULT_TOLERANCE,
    spectrum: Optional[Spectrum] = None,
    k: Optional[int] = None,
) -> SpectralReport:
    """
    (n, d, λ) 報告

    passes 當且僅當 λ = max(|λ₂|, |λ_min|) ≤ q^((k-2)/2) + tolerance。
    k 預設取自建構描述；可傳入已算好的 spectrum 以免重算。
    """
    degrees = {r.bit_count() for r in g.rows}
    if len(degrees) > 1:
        raise ValueError(f"{g.meta.describe()} 不是正則圖，無法給出 (n, d, λ) 報告")
    if spectrum is None:
        spectrum = eigenvalues(g, eigen_cap, jacobi_max_n)
    values = spectrum.values
    k = g.meta.k if k is None else k
    q = g.meta.q
    degree = degrees.pop() if degrees else 0
    d = float(values[0]) if len(values) else 0.0
    lambda2 = float(values[1]) if len(values) > 1 else 0.0
    lambda_min = float(values[-1]) if len(values) > 1 else 0.0
    lam = max(abs(lambda2), abs(lambda_min))
    bound = q ** ((k - 2) / 2) if q else 0.0
    trace = float((values**2).sum())
    report = SpectralReport(
        family=g.meta.family.value,
        k=k,
        q=q,
        epsilon=g.meta.epsilon_label,
        n=g.n,
        d=d,
        degree=degree,
        lambda2=lambda2,
        lambda_min=lambda_min,
        lambda_=lam,
        bound=bound,
        passes=lam <= bound + tolerance and abs(d - degree) <= tolerance,
        residual=spectrum.residual,
        solver=spectrum.solver,
        density_diag=density_diagnostic(degree, g.n, k),
        trace_lower_bound=trace_lower_bound(degree, g.n),
        lambda_over_sqrt_d=lam / math.sqrt(degree) if degree else 0.0,
        trace_consistent=abs(trace - sum(r.bit_count() for r in g.rows)) <= g.n * 1e-7 + tolerance,
    )
    logger.info(
        "%s：λ = %.6f，界 %.6f，%s", g.meta.describe(), lam, bound, "通過" if report.passes else "失敗"
    )
    return report
