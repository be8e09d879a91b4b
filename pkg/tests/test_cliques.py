import itertools

import networkx as nx
import pytest

from finite_geometry.errors import CliqueSearchTimeout
from finite_geometry.field import field_of_order
from finite_geometry.geometry import QuadraticSpace
from certifiers import cliques
from certifiers.cliques import (
    CertificateMode,
    certify_clique_bound,
    clique_certificate_check,
    max_clique,
    verify_k_free,
)
from certifiers.graphs import Graph, build_ak, build_gamma, induced_neighborhood


def gamma(q, k):
    return build_gamma(QuadraticSpace(field_of_order(q), k))


def from_networkx(h):
    return Graph.from_edges(h.number_of_nodes(), h.edges())


def lex_least_clique(g, size):
    """暴力列舉：字典序第一個大小為 size 的團"""
    for combo in itertools.combinations(range(g.n), size):
        if all(g.has_edge(u, v) for u, v in itertools.combinations(combo, 2)):
            return list(combo)
    return None


class TestMaxClique:
    """精確最大團"""

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_networkx(self, seed):
        """測試隨機圖的團數與 networkx 一致"""
        h = nx.gnp_random_graph(40, 0.45, seed=seed)
        result = max_clique(from_networkx(h))
        assert result.exact
        assert result.omega == max(len(c) for c in nx.find_cliques(h))

    @pytest.mark.parametrize("seed", range(4))
    def test_witness_is_lex_least(self, seed):
        """測試見證是字典序最小的最大團"""
        g = from_networkx(nx.gnp_random_graph(14, 0.5, seed=100 + seed))
        result = max_clique(g)
        assert result.witness == lex_least_clique(g, result.omega)
        assert lex_least_clique(g, result.omega + 1) is None

    def test_petersen(self):
        """測試 Petersen 圖 ω = 2，見證為第一條邊"""
        g = gamma(5, 3)
        result = max_clique(g)
        assert result.omega == 2
        assert tuple(result.witness) == next(iter(g.edges()))

    def test_empty_graph(self):
        """測試沒有頂點的圖"""
        result = max_clique(Graph([]))
        assert (result.omega, result.witness, result.exact) == (0, [], True)

    def test_loops_ignored(self):
        """測試自環不影響團數"""
        g = Graph.from_edges(3, [(0, 0), (0, 1), (1, 1)])
        assert max_clique(g).omega == 2

    def test_cutoff(self):
        """測試找到超過 cutoff 的團即停止"""
        g = from_networkx(nx.complete_graph(6))
        result = max_clique(g, cutoff=2)
        assert not result.exact
        assert result.omega >= 3

    def test_timeout(self, monkeypatch):
        """測試超過時間預算時帶回下界"""
        monkeypatch.setattr(cliques, "_CLOCK_EVERY", 1)
        with pytest.raises(CliqueSearchTimeout) as excinfo:
            max_clique(gamma(5, 3), time_budget=-1.0)
        assert excinfo.value.lower_bound == 2
        assert len(excinfo.value.witness) == 2


class TestKFreeCertificates:
    """不含 K_k 的證書"""

    @pytest.mark.parametrize("q,k", [(3, 3), (5, 3), (7, 3), (9, 3), (3, 4), (5, 4)])
    def test_gamma_is_k_free(self, q, k):
        """測試 Γ^□(k, q) 不含 K_k"""
        cert = verify_k_free(gamma(q, k), k)
        assert cert.mode is CertificateMode.UPPER_BOUND_PROOF
        assert cert.k_free
        assert cert.witness == []

    def test_gamma_4_5_omega(self):
        """測試 Γ^□(4, 5) 的團數恰為 3"""
        cert, result = certify_clique_bound(gamma(5, 4), 4)
        assert cert.k_free
        assert result.exact and result.omega == 3

    def test_alon_krivelevich_4_5(self):
        """測試 AK(4, 5) 含 K_4 但不含 K_5"""
        g = build_ak(field_of_order(5), 4)
        upper = verify_k_free(g, 5)
        lower = verify_k_free(g, 4)
        assert upper.k_free
        assert lower.mode is CertificateMode.WITNESS_FOUND
        assert len(lower.witness) == 4
        assert clique_certificate_check(g, lower)
        assert lower.witness == lex_least_clique(g, 4)

    def test_witness_certificate_check(self):
        """測試竄改後的見證無法通過檢查"""
        g = gamma(5, 3)
        cert = verify_k_free(g, 2)
        assert cert.mode is CertificateMode.WITNESS_FOUND
        assert clique_certificate_check(g, cert)
        u, v = cert.witness
        non_neighbor = next(w for w in range(g.n) if w != u and not g.has_edge(u, w))
        forged = cert.model_copy(update={"witness": [u, non_neighbor]})
        assert not clique_certificate_check(g, forged)
        assert not clique_certificate_check(g, cert.model_copy(update={"witness": [u]}))

    def test_record_is_deterministic(self):
        """測試單行紀錄不含耗時"""
        g = gamma(3, 4)
        first = verify_k_free(g, 4).to_record()
        second = verify_k_free(g, 4).to_record()
        assert first == second
        assert first.startswith("family=gamma k=4 q=3 mode=UpperBoundProof bound=4 witness=-")

    def test_invalid_k(self):
        """測試 k < 1"""
        with pytest.raises(ValueError):
            certify_clique_bound(gamma(5, 3), 0)


class TestRootedCertificates:
    """頂點可遞時只搜尋 N(root)"""

    @pytest.mark.parametrize("q,k", [(5, 3), (3, 4), (5, 4), (3, 5)])
    def test_agrees_with_full_search(self, q, k):
        """測試單一鄰域與整張圖的結論相同"""
        g = gamma(q, k)
        rooted, rooted_result = certify_clique_bound(g, k, root=0)
        full, full_result = certify_clique_bound(g, k)
        assert rooted.mode is full.mode is CertificateMode.UPPER_BOUND_PROOF
        assert rooted_result.omega == full_result.omega
        assert rooted.root == 0 and full.root is None
        assert 0 in rooted_result.witness
        assert rooted.to_record().endswith(" root=0")

    def test_witness_ignores_root(self):
        """測試含 K_k 時見證仍是整張圖字典序最小的 K_k"""
        g = gamma(5, 3)
        cert, _ = certify_clique_bound(g, 2, root=7)
        assert cert.mode is CertificateMode.WITNESS_FOUND
        assert cert.root is None
        assert cert.witness == lex_least_clique(g, 2)

    def test_root_out_of_range(self):
        """測試 root 超出頂點範圍"""
        with pytest.raises(ValueError):
            certify_clique_bound(gamma(5, 3), 3, root=10)

    def test_gamma_5_11_within_budget(self):
        """測試 Γ^□(5, 11) 在預設時間預算內證明不含 K_5"""
        g = gamma(11, 5)
        cert, result = certify_clique_bound(g, 5, root=0)
        assert cert.k_free
        assert result.exact and result.omega == 4
        assert cert.elapsed < cliques.DEFAULT_TIME_BUDGET
        assert clique_certificate_check(g, cert)


class TestNeighborhoodCliques:
    """最大團頂點的鄰域團數少一"""

    @pytest.mark.parametrize("q,k,omega", [(5, 4, 3), (3, 5, 4), (7, 4, 3)])
    def test_drops_by_one(self, q, k, omega):
        """測試 ω(N(v)) = ω(G) − 1，v 取最大團中的每個頂點"""
        g = gamma(q, k)
        result = max_clique(g)
        assert result.omega == omega
        for v in result.witness:
            assert max_clique(induced_neighborhood(g, v)).omega == omega - 1
