#!/usr/bin/env python3
"""
精確最大團搜尋

分支定界：退化序重新編號、貪婪下界、貪婪著色上界。
已知頂點可遞的圖只需搜尋單一頂點的鄰域。
找到 ω 之後再以遞增 DFS 取字典序最小的最大團作為見證，
因此見證只取決於圖本身，不取決於搜尋順序。
"""

import heapq
import logging
import time
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel

from finite_geometry.errors import CliqueSearchTimeout

from .graphs import Graph, induced_neighborhood

logger = logging.getLogger(__name__)

DEFAULT_TIME_BUDGET = 300.0
# 每展開這麼多節點檢查一次時間
_CLOCK_EVERY = 1024


class CertificateMode(str, Enum):
    UPPER_BOUND_PROOF = "UpperBoundProof"
    WITNESS_FOUND = "WitnessFound"


class CliqueCertificate(BaseModel):
    """K_k 存在與否的證書"""

    family: str = "custom"
    k: int = 0
    q: int = 0
    mode: CertificateMode
    bound_k: int
    witness: List[int] = []
    nodes: int = 0
    elapsed: float = 0.0
    # 頂點可遞時只搜尋 N(root)：ω(G) = 1 + ω(N(root))
    root: Optional[int] = None

    @property
    def k_free(self) -> bool:
        return self.mode is CertificateMode.UPPER_BOUND_PROOF

    def to_record(self) -> str:
        """單行文字紀錄（不含耗時，方便比對）"""
        witness = ",".join(str(v) for v in self.witness) or "-"
        reduction = "" if self.root is None else f" root={self.root}"
        return (
            f"family={self.family} k={self.k} q={self.q} mode={self.mode.value} "
            f"bound={self.bound_k} witness={witness} nodes={self.nodes}{reduction}"
        )


class CliqueResult(BaseModel):
    omega: int
    witness: List[int]
    exact: bool
    nodes: int
    elapsed: float


class _CutoffReached(Exception):
    pass


def _lsb(x: int) -> int:
    return (x & -x).bit_length() - 1


def _bits_to_list(bits: int) -> List[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


def _color_sort(P: int, adj: List[int]) -> Tuple[List[int], List[int]]:
    """貪婪著色：回傳頂點順序與對應顏色（顏色遞增）"""
    order: List[int] = []
    colors: List[int] = []
    color = 0
    while P:
        color += 1
        Q = P
        while Q:
            v = _lsb(Q)
            bit = 1 << v
            order.append(v)
            colors.append(color)
            P &= ~bit
            Q &= ~bit & ~adj[v]
    return order, colors


def _color_bound(P: int, adj: List[int]) -> int:
    colors = 0
    while P:
        colors += 1
        Q = P
        while Q:
            v = _lsb(Q)
            bit = 1 << v
            P &= ~bit
            Q &= ~bit & ~adj[v]
    return colors


def _degeneracy_order(adj: List[int]) -> List[int]:
    """最小度刪除順序（堆積，延遲刪除）"""
    n = len(adj)
    deg = [a.bit_count() for a in adj]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * n
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        for w in _bits_to_list(adj[v]):
            if not removed[w]:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
    return order


def _relabel(adj: List[int], new_of_old: List[int]) -> List[int]:
    out = [0] * len(adj)
    for old, mask in enumerate(adj):
        rel = 0
        for u in _bits_to_list(mask):
            rel |= 1 << new_of_old[u]
        out[new_of_old[old]] = rel
    return out


def _greedy_lb(adj: List[int], trials: int = 64) -> Tuple[int, int]:
    verts = sorted(range(len(adj)), key=lambda v: (-adj[v].bit_count(), v))
    best_mask, best_size = 0, 0
    for s in verts[:trials]:
        clique = 1 << s
        P = adj[s]
        while P:
            best_v, best_score = -1, -1
            for v in _bits_to_list(P):
                score = (adj[v] & P).bit_count()
                if score > best_score:
                    best_score, best_v = score, v
            clique |= 1 << best_v
            P &= adj[best_v]
        if clique.bit_count() > best_size:
            best_size, best_mask = clique.bit_count(), clique
    return best_size, best_mask


class MaxCliqueSolver:
    """位元集合上的分支定界，adj 不可含自環"""

    def __init__(self, adj: List[int], time_budget: float = DEFAULT_TIME_BUDGET):
        self.adj = adj
        self.n = len(adj)
        self.time_budget = time_budget
        self.best_size = 0
        self.best_bits = 0
        self.nodes = 0
        self.deadline = float("inf")
        self.cutoff: Optional[int] = None

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes % _CLOCK_EVERY == 0 and time.perf_counter() > self.deadline:
            raise TimeoutError

    def _record(self, size: int, bits: int) -> None:
        if size > self.best_size:
            self.best_size, self.best_bits = size, bits
            if self.cutoff is not None and size > self.cutoff:
                raise _CutoffReached

    def max_size(
        self, init_size: int = 0, init_bits: int = 0, cutoff: Optional[int] = None
    ) -> bool:
        """回傳 True 表示搜尋完整結束（或達到 cutoff）"""
        self.best_size, self.best_bits = init_size, init_bits
        self.cutoff = cutoff
        self.deadline = time.perf_counter() + self.time_budget
        if cutoff is not None and init_size > cutoff:
            return True
        try:
            self._expand(0, 0, (1 << self.n) - 1)
        except _CutoffReached:
            pass
        except TimeoutError:
            return False
        return True

    def _expand(self, size: int, R: int, P: int) -> None:
        order, colors = _color_sort(P, self.adj)
        for i in range(len(order) - 1, -1, -1):
            if size + colors[i] <= self.best_size:
                return
            v = order[i]
            self._tick()
            bit = 1 << v
            P2 = P & self.adj[v]
            if P2:
                self._expand(size + 1, R | bit, P2)
            else:
                self._record(size + 1, R | bit)
            P &= ~bit

    def lex_least(self, target: int) -> Optional[List[int]]:
        """字典序最小、大小為 target 的團（以遞增順序 DFS）"""
        self.deadline = time.perf_counter() + self.time_budget
        try:
            return self._lex(target, [], (1 << self.n) - 1)
        except TimeoutError:
            raise CliqueSearchTimeout(target, budget=self.time_budget) from None

    def _lex(self, need: int, R: List[int], P: int) -> Optional[List[int]]:
        if need == 0:
            return R
        if P.bit_count() < need or _color_bound(P, self.adj) < need:
            return None
        while P:
            v = _lsb(P)
            P &= P - 1
            self._tick()
            found = self._lex(need - 1, R + [v], P & self.adj[v])
            if found is not None:
                return found
        return None


def _plain_adjacency(g: Graph) -> List[int]:
    return [g.neighbor_mask(v) for v in range(g.n)]


def max_clique(
    g: Graph, cutoff: Optional[int] = None, time_budget: float = DEFAULT_TIME_BUDGET
) -> CliqueResult:
    """
    精確團數與字典序最小的最大團（自環不計）

    Args:
        cutoff: 找到大小超過 cutoff 的團即停止；此時 omega 只是下界（exact = False）
        time_budget: 兩階段各自的秒數上限

    Raises:
        CliqueSearchTimeout: 超過時間預算，附帶目前的下界與團
    """
    start = time.perf_counter()
    if g.n == 0:
        return CliqueResult(omega=0, witness=[], exact=True, nodes=0, elapsed=0.0)

    adj = _plain_adjacency(g)
    removal = _degeneracy_order(adj)
    # 核心數高的頂點排在前面
    old_of_new = removal[::-1]
    new_of_old = [0] * g.n
    for new, old in enumerate(old_of_new):
        new_of_old[old] = new
    solver = MaxCliqueSolver(_relabel(adj, new_of_old), time_budget)

    lb_size, lb_bits = _greedy_lb(solver.adj)
    logger.debug("%s：貪婪下界 %d", g.meta.describe(), lb_size)
    complete = solver.max_size(lb_size, lb_bits, cutoff)
    if not complete:
        witness = sorted(old_of_new[v] for v in _bits_to_list(solver.best_bits))
        raise CliqueSearchTimeout(solver.best_size, witness, time_budget)
    omega = solver.best_size
    exact = cutoff is None or omega <= cutoff

    canonical = MaxCliqueSolver(adj, time_budget)
    witness = canonical.lex_least(omega) or []
    nodes = solver.nodes + canonical.nodes
    elapsed = time.perf_counter() - start
    logger.info(
        "%s：ω %s %d（%d 個節點，%.2f 秒）",
        g.meta.describe(),
        "=" if exact else "≥",
        omega,
        nodes,
        elapsed,
    )
    return CliqueResult(omega=omega, witness=witness, exact=exact, nodes=nodes, elapsed=elapsed)


def _rooted_clique(g: Graph, root: int, cutoff: int, time_budget: float) -> CliqueResult:
    """在 N(root) 上搜尋並加回 root；頂點可遞時 omega 即 ω(G)"""
    if not 0 <= root < g.n:
        raise ValueError(f"頂點 {root} 超出範圍 n = {g.n}")
    start = time.perf_counter()
    inner = max_clique(induced_neighborhood(g, root), cutoff=cutoff - 1, time_budget=time_budget)
    neighbors = g.neighbors(root)
    return CliqueResult(
        omega=inner.omega + 1,
        witness=sorted([root] + [neighbors[v] for v in inner.witness]),
        exact=inner.exact,
        nodes=inner.nodes,
        elapsed=time.perf_counter() - start,
    )


def certify_clique_bound(
    g: Graph, k: int, time_budget: float = DEFAULT_TIME_BUDGET, root: Optional[int] = None
) -> Tuple[CliqueCertificate, CliqueResult]:
    """
    verify_k_free 並一併回傳搜尋結果

    不含 K_k 時搜尋會完整結束，CliqueResult.omega 就是精確團數。

    Args:
        root: 呼叫端已知 g 頂點可遞時傳入；只搜尋 N(root)，證書記下 root。
            此時 CliqueResult.witness 是含 root 的團中字典序最小者。
    """
    if k < 1:
        raise ValueError(f"k = {k} 必須 ≥ 1")
    start = time.perf_counter()
    rooted = False
    if root is not None and k >= 2 and g.n > 0:
        rooted = True
        result = _rooted_clique(g, root, k - 1, time_budget)
    else:
        result = max_clique(g, cutoff=k - 1, time_budget=time_budget)
    base = dict(family=g.meta.family.value, k=g.meta.k, q=g.meta.q, bound_k=k)
    if result.omega < k:
        cert = CliqueCertificate(
            mode=CertificateMode.UPPER_BOUND_PROOF,
            nodes=result.nodes,
            elapsed=time.perf_counter() - start,
            root=root if rooted else None,
            **base,
        )
        return cert, result
    nodes = result.nodes
    if result.omega == k and not rooted:
        witness = result.witness
    else:
        solver = MaxCliqueSolver(_plain_adjacency(g), time_budget)
        witness = solver.lex_least(k) or []
        nodes += solver.nodes
    cert = CliqueCertificate(
        mode=CertificateMode.WITNESS_FOUND,
        witness=witness,
        nodes=nodes,
        elapsed=time.perf_counter() - start,
        **base,
    )
    return cert, result


def verify_k_free(g: Graph, k: int, time_budget: float = DEFAULT_TIME_BUDGET) -> CliqueCertificate:
    """
    證明 g 不含 K_k，或給出一個 K_k

    WitnessFound 的見證是字典序最小的 K_k。

    Raises:
        CliqueSearchTimeout: 超過時間預算
    """
    cert, _ = certify_clique_bound(g, k, time_budget)
    logger.info("%s：%s", g.meta.describe(), cert.to_record())
    return cert


def clique_certificate_check(g: Graph, cert: CliqueCertificate) -> bool:
    """
    重新檢查證書

    WitnessFound：只讀 |witness|² 個鄰接位元確認兩兩相鄰且大小為 bound_k。
    UpperBoundProof 沒有可以便宜重驗的內容，只檢查結構（見證為空）。
    """
    if cert.mode is CertificateMode.UPPER_BOUND_PROOF:
        return not cert.witness
    w = cert.witness
    if len(w) != cert.bound_k or len(set(w)) != len(w):
        return False
    if any(not 0 <= v < g.n for v in w):
        return False
    return all(g.has_edge(u, v) for i, u in enumerate(w) for v in w[i + 1 :])
