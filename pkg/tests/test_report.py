import json

import pytest

from finite_geometry.errors import InsufficientRowsError
from finite_geometry.geometry import PointClass
from certifiers.config import Settings
from certifiers.graphs import Family
from certifiers.report import (
    CSV_COLUMNS,
    GridResult,
    GridRowSpec,
    RowVerifier,
    arun_grid,
    bundle_name,
    csv_row,
    default_grid,
    density_trend,
    run_grid,
    trend_lines,
    write_bundles,
    write_csv,
    write_summary,
    write_timings,
)

TREND_QS = (5, 7, 9, 11, 13)


def build_only(family, k, qs):
    """只建圖（不跑任何檢查）的列"""
    return [GridRowSpec.from_labels(family, k, q, checks=[]) for q in qs]


@pytest.fixture(scope="module")
def verifier():
    return RowVerifier(Settings())


@pytest.fixture(scope="module")
def trend_results():
    rows = (
        build_only("gamma-square", 3, TREND_QS)
        + build_only("gamma-square", 4, TREND_QS)
        + build_only("ak", 3, (5, 7, 11, 13))
    )
    return run_grid(rows, Settings())


class TestGridRowSpec:
    """網格列的設定"""

    def test_defaults(self):
        """測試 Γ 預設 ε = square 並跑全部檢查"""
        spec = GridRowSpec(k=3, q=5)
        assert spec.epsilon is PointClass.SQUARE
        assert spec.kfree_order == 3
        assert spec.describe() == "Γ^square(3, 5)"

    def test_labels(self):
        """測試設定檔寫法的別名"""
        spec = GridRowSpec.from_labels("gamma-nonsquare", 3, 7, checks=["spectral", "clique"])
        assert (spec.family, spec.epsilon) == (Family.GAMMA, PointClass.NONSQUARE)
        assert spec.checks == ["clique", "spectral"]
        ak = GridRowSpec.from_labels("ak", 3, 5, epsilon="square")
        assert ak.epsilon is None
        assert ak.kfree_order == 4

    @pytest.mark.parametrize(
        "values",
        [
            dict(k=1, q=5),
            dict(k=3, q=2),
            dict(k=3, q=5, checks=["clique", "magic"]),
            dict(k=3, q=5, epsilon=PointClass.SINGULAR),
            dict(family=Family.CUSTOM, k=3, q=5),
        ],
    )
    def test_invalid(self, values):
        """測試不合法的列"""
        with pytest.raises(ValueError):
            GridRowSpec(**values)


class TestRowVerifier:
    """單列驗證流程"""

    @pytest.mark.parametrize("q", [5, 7])
    def test_gamma_all_checks(self, verifier, q):
        """測試 Γ^□(3, q) 全部檢查通過"""
        result = verifier.run(GridRowSpec(k=3, q=q))
        assert result.errors == []
        assert result.failed_checks() == []
        assert result.omega_bound_certified and not result.kk_witness_found
        assert result.spectral_passes and result.identity_pass
        assert result.ambient_spectrum_pass and result.interlacing_pass
        assert result.transitivity_pass and result.neighborhood_pass
        assert result.transitivity_pairs == result.n * result.n
        assert "witness_sample" in result.certificates
        assert set(result.runtimes) >= {"build", "clique", "spectral", "transitivity"}

    def test_petersen_row(self, verifier):
        """測試 Γ^□(3, 5) 的數值欄位"""
        result = verifier.run(GridRowSpec(k=3, q=5))
        assert (result.n, result.d, result.regular) == (10, 3.0, True)
        assert result.omega_observed == 2
        assert result.lambda_ == pytest.approx(2.0)

    def test_gamma_prime_row(self, verifier):
        """測試 Γ′ 列不做團檢查，只驗證恆等式與譜"""
        result = verifier.run(GridRowSpec(family=Family.GAMMA_PRIME, k=3, q=3))
        assert result.errors == []
        assert result.identity_pass and result.ambient_spectrum_pass
        assert result.omega_bound_certified is None
        assert result.spectral_passes is None
        assert result.n == 13

    def test_ak_row(self, verifier):
        """測試 AK(4, 5)：證明不含 K_5 並找到 K_4"""
        result = verifier.run(GridRowSpec(family=Family.AK, k=4, q=5, checks=["clique"]))
        assert result.errors == []
        assert result.omega_bound_certified is True
        assert result.kk_witness_found is True
        assert result.failed_checks() == []
        assert (result.regular, result.d) == (True, 25.0)
        assert len(result.certificates["clique_lower"]["witness"]) == 4
        assert result.ak_density_diag is not None

    def test_build_error_is_recorded(self):
        """測試建圖失敗時錯誤留在該列，其餘階段略過"""
        result = RowVerifier(Settings(vertex_cap=5)).run(GridRowSpec(k=3, q=5))
        assert len(result.errors) == 1
        assert result.errors[0].startswith("build:")
        assert result.n is None
        assert result.failed_checks() == []

    def test_checks_subset(self, verifier):
        """測試只執行指定的檢查"""
        result = verifier.run(GridRowSpec(k=4, q=3, checks=["neighborhood"]))
        assert result.neighborhood_pass is True
        assert result.omega_bound_certified is None
        assert result.identity_pass is None
        assert "clique" not in result.runtimes


class TestGrid:
    """網格執行"""

    async def test_empty(self):
        """測試空網格"""
        assert await arun_grid([], Settings()) == []

    async def test_keeps_order(self):
        """測試結果順序與輸入相同"""
        rows = [GridRowSpec(k=3, q=7, checks=["clique"]), GridRowSpec(k=2, q=5, checks=["clique"])]
        results = await arun_grid(rows, Settings())
        assert [(r.k, r.q) for r in results] == [(3, 7), (2, 5)]
        assert all(r.omega_bound_certified for r in results)

    def test_threads_do_not_change_output(self, tmp_path):
        """測試多行程與單行程的 CSV 完全相同"""
        rows = [GridRowSpec(k=3, q=q) for q in (3, 5, 7)]
        single = write_csv(run_grid(rows, Settings(threads=1)), tmp_path / "a.csv")
        multi = write_csv(run_grid(rows, Settings(threads=2)), tmp_path / "b.csv")
        assert single.read_text() == multi.read_text()

    def test_default_grid(self):
        """測試預設網格的內容與頂點數上限"""
        rows = default_grid(Settings(vertex_cap=100))
        gamma = [(r.k, r.q) for r in rows if r.family is Family.GAMMA]
        assert (2, 13) in gamma and (3, 13) in gamma
        assert (4, 3) in gamma and (4, 5) in gamma and (4, 7) not in gamma
        ak = [(r.k, r.q) for r in rows if r.family is Family.AK]
        assert (5, 7) in ak and (5, 9) not in ak
        assert all(r.checks == ["clique"] for r in rows if r.family is Family.AK)


class TestDensityTrend:
    """log(d/n) 對 log(n) 的斜率"""

    def test_gamma_dimension_3(self, trend_results):
        """測試 k = 3 的斜率接近 −1/2"""
        assert abs(density_trend(trend_results, 3) + 0.5) < 0.15

    def test_gamma_dimension_4(self, trend_results):
        """測試 k = 4 的斜率接近 −1/3"""
        assert abs(density_trend(trend_results, 4) + 1 / 3) < 0.1

    def test_ak(self, trend_results):
        """測試 AK 維度 3（不含 K_4）的斜率接近 −1/2"""
        assert abs(density_trend(trend_results, 4, "alon-krivelevich") + 0.5) < 0.05

    def test_gamma_denser_than_ak(self, trend_results):
        """測試同樣不含 K_4 時 Γ^□ 的斜率比 AK 平緩"""
        gap = density_trend(trend_results, 4) - density_trend(trend_results, 4, "ak")
        assert gap > 0.1
        lines = trend_lines(trend_results)
        assert any(line.startswith("trend-gap k=4 gamma-minus-ak=") for line in lines)
        assert any(line.startswith("trend family=gamma-square k=3 ") for line in lines)

    def test_insufficient_rows(self, trend_results):
        """測試列數不足"""
        with pytest.raises(InsufficientRowsError):
            density_trend(trend_results[:2], 3)
        with pytest.raises(InsufficientRowsError):
            density_trend(trend_results, 5)

    def test_exact_power_law(self):
        """測試 d = n^(1/2) 時斜率為 −1/2"""
        results = [
            GridResult(
                family=Family.GAMMA,
                epsilon=PointClass.SQUARE,
                k=3,
                q=q,
                kfree_order=3,
                n=n,
                d=n**0.5,
            )
            for q, n in ((3, 4), (5, 16), (7, 64))
        ]
        assert density_trend(results, 3) == pytest.approx(-0.5)

    @staticmethod
    def power_law(exponent):
        return [
            GridResult(
                family=Family.GAMMA,
                epsilon=PointClass.SQUARE,
                k=3,
                q=q,
                kfree_order=3,
                n=n,
                d=n**exponent,
            )
            for q, n in ((3, 4), (5, 16), (7, 64))
        ]

    def test_trend_within_tolerance(self):
        """測試斜率與預期相差不超過 0.05 時標為 pass"""
        (line,) = trend_lines(self.power_law(0.52))
        assert line.startswith("trend family=gamma-square k=3 slope=-0.480000 expected=-0.500000")
        assert line.endswith("deviation=+0.020000 within=pass")

    def test_trend_deviation_flagged(self):
        """測試斜率偏離預期超過 0.05 時標為 FAIL"""
        (line,) = trend_lines(self.power_law(0.4))
        assert line.endswith("deviation=-0.100000 within=FAIL")
        (relaxed,) = trend_lines(self.power_law(0.4), tolerance=0.2)
        assert relaxed.endswith("within=pass")

    def test_trend_flags_on_real_rows(self, trend_results):
        """測試小 q 的 Γ^□(3, q) 斜率偏離被標出，AK 則在容許範圍內"""
        lines = trend_lines(trend_results)
        gamma3 = next(x for x in lines if x.startswith("trend family=gamma-square k=3 "))
        ak4 = next(x for x in lines if x.startswith("trend family=alon-krivelevich k=4 "))
        assert gamma3.endswith("within=FAIL")
        assert ak4.endswith("within=pass")


class TestOutputs:
    """CSV、摘要、證書檔與耗時"""

    @pytest.fixture(scope="class")
    def results(self):
        rows = [GridRowSpec(k=3, q=5), GridRowSpec(family=Family.AK, k=3, q=5, checks=["clique"])]
        return run_grid(rows, Settings())

    def test_csv(self, results, tmp_path):
        """測試 CSV 欄位與數值格式"""
        lines = write_csv(results, tmp_path / "grid.csv").read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 3
        row = csv_row(results[0])
        assert (row["family"], row["epsilon"]) == ("gamma", "square")
        assert (row["n"], row["d"]) == ("10", "3.000000000")
        assert row["spectral_passes"] == "true"
        assert row["lambda"].startswith("2.0000")
        ak = csv_row(results[1])
        assert (ak["epsilon"], ak["kfree_order"], ak["lambda"]) == ("none", "4", "")

    def test_summary(self, results, tmp_path):
        """測試摘要第一行為列數"""
        lines = write_summary(results, tmp_path / "summary.txt").read_text().splitlines()
        assert lines[0] == "rows=2"
        assert lines[1].startswith("gamma eps=square k=3 q=5 n=10")
        assert "kk_witness=" in lines[2]

    def test_bundles(self, results, tmp_path):
        """測試每列一個證書檔且不含耗時"""
        paths = write_bundles(results, tmp_path / "certificates")
        assert [p.name for p in paths] == [bundle_name(r) for r in results]
        assert paths[0].name == "gamma_square_k3_q5.json"
        assert paths[1].name == "alon-krivelevich_none_k3_q5.json"
        payload = json.loads(paths[0].read_text())
        assert "runtimes" not in payload
        assert payload["certificates"]["clique"]["mode"] == "UpperBoundProof"

    def test_timings(self, results, tmp_path):
        """測試耗時檔"""
        rows = json.loads(write_timings(results, tmp_path / "timings.json").read_text())
        assert [r["family"] for r in rows] == ["gamma", "alon-krivelevich"]
        assert [(r["k"], r["q"]) for r in rows] == [(3, 5), (3, 5)]
        assert all(r["total"] >= 0 for r in rows)
