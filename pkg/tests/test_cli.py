import json
import os

import pytest

from finite_geometry.errors import ConfigError
from certifiers.cli import (
    EXIT_CERTIFICATE_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    main,
    parse_grid_config,
)
from certifiers.config import ENV_PREFIX
from certifiers.graphs import Family


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in list(os.environ):
        if name.startswith(ENV_PREFIX):
            monkeypatch.delenv(name)


@pytest.fixture
def run(tmp_path):
    """以 tmp_path 為輸出目錄執行 kfree；第一個參數以空白切開"""
    env_file = tmp_path / "empty.env"
    env_file.write_text("")

    def _run(line, *extra):
        argv = [*line.split(), *extra, "--output", str(tmp_path / "out")]
        return main([*argv, "--env-file", str(env_file)])

    return _run


class TestGenerate:
    """generate 子命令"""

    def test_edgelist(self, run, tmp_path, capsys):
        """測試寫出 Petersen 圖的邊列表"""
        assert run("generate --k 3 --q 5") == EXIT_OK
        path = tmp_path / "out" / "gamma_square_k3_q5.edgelist"
        assert path.read_text().splitlines()[0] == "# gamma 3 5 square 10 15"
        out = capsys.readouterr().out
        assert "(10, 3, 0, 1)" in out

    def test_dimacs(self, run, tmp_path):
        """測試 DIMACS 輸出與 Γ′ 的檔名"""
        assert run("generate --family gamma-prime --k 3 --q 3 --format dimacs") == EXIT_OK
        assert (tmp_path / "out" / "gamma-prime_none_k3_q3.dimacs").exists()

    @pytest.mark.parametrize("q", ["4", "6", "15"])
    def test_invalid_q(self, run, q, capsys):
        """測試偶數或非質數冪的 q"""
        assert run("generate --k 3 --q", q) == EXIT_USAGE
        assert "❌" in capsys.readouterr().err

    def test_missing_k(self, run):
        """測試缺少必要參數"""
        assert run("generate --q 5") == EXIT_USAGE

    def test_epsilon_on_ak(self, run):
        """測試 --epsilon 只能用於 gamma"""
        assert run("generate --family ak --k 3 --q 5 --epsilon square") == EXIT_USAGE

    def test_vertex_cap(self, run, capsys):
        """測試超出頂點數上限"""
        assert run("generate --k 4 --q 5 --vertex-cap 10") == EXIT_USAGE
        assert "CapExceededError" in capsys.readouterr().err


class TestVerify:
    """verify 子命令"""

    def test_gamma_report(self, run, tmp_path):
        """測試 Γ^□(3, 5) 全部通過並寫出證書檔"""
        assert run("verify --k 3 --q 5") == EXIT_OK
        payload = json.loads((tmp_path / "out" / "gamma_square_k3_q5.json").read_text())
        assert payload["spectral_passes"] is True
        assert payload["neighborhood_pass"] is True

    def test_csv(self, run, tmp_path):
        """測試 --format csv"""
        assert run("verify --k 3 --q 7 --checks clique,spectral --format csv") == EXIT_OK
        lines = (tmp_path / "out" / "gamma_square_k3_q7.csv").read_text().splitlines()
        assert len(lines) == 2

    def test_gamma_prime_identity(self, run):
        """測試 Γ′ 的恆等式"""
        assert run("verify --family gamma-prime --k 3 --q 3 --checks identity") == EXIT_OK

    def test_ak_clique(self, run, tmp_path):
        """測試 AK(4, 5) 的團證書"""
        assert run("verify --family ak --k 4 --q 5 --checks clique") == EXIT_OK
        payload = json.loads((tmp_path / "out" / "alon-krivelevich_none_k4_q5.json").read_text())
        assert payload["kk_witness_found"] is True

    def test_unknown_check(self, run):
        """測試未知的檢查項目"""
        assert run("verify --k 3 --q 5 --checks clique,magic") == EXIT_USAGE

    def test_row_error(self, run):
        """測試單列錯誤以結束碼 2 回報"""
        assert run("verify --k 4 --q 5 --checks clique --vertex-cap 10") == EXIT_USAGE

    def test_dimacs_input(self, run, tmp_path):
        """測試外部 DIMACS 圖檔：K_4 含 K_4 但不含 K_5"""
        path = tmp_path / "k4.dimacs"
        edges = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
        path.write_text("p edge 4 6\n" + "".join(f"e {u} {v}\n" for u, v in edges))
        assert run("verify --k 5 --input", str(path)) == EXIT_OK
        assert run("verify --k 4 --input", str(path)) == EXIT_CERTIFICATE_FAILED
        payload = json.loads((tmp_path / "out" / "k4_k4.json").read_text())
        assert payload["witness"] == [0, 1, 2, 3]

    def test_dimacs_input_requires_k(self, run, tmp_path):
        """測試外部圖檔必須指定 --k"""
        path = tmp_path / "g.dimacs"
        path.write_text("p edge 2 1\ne 1 2\n")
        assert run("verify --input", str(path)) == EXIT_USAGE


class TestGrid:
    """grid 子命令與設定檔"""

    def test_config_file(self, run, tmp_path):
        """測試只有一列的設定檔"""
        config = tmp_path / "grid.conf"
        config.write_text(
            "# 小網格\nidentity_full_cap = 100\n\n[row]\nfamily = gamma-square\nk = 3\nq = 5\n"
        )
        assert run("grid --config", str(config)) == EXIT_OK
        out = tmp_path / "out"
        assert len((out / "grid.csv").read_text().splitlines()) == 2
        assert (out / "summary.txt").read_text().splitlines()[0] == "rows=1"
        assert (out / "certificates" / "gamma_square_k3_q5.json").exists()
        timings = json.loads((out / "timings.json").read_text())
        assert timings[0]["q"] == 5

    def test_malformed_config(self, run, tmp_path, capsys):
        """測試設定檔錯誤附上行號"""
        config = tmp_path / "bad.conf"
        config.write_text("[row]\nk = 3\nq = 5\nbogus = 1\n")
        assert run("grid --config", str(config)) == EXIT_USAGE
        assert "第 4 行" in capsys.readouterr().err

    def test_invalid_setting_value(self, run, tmp_path):
        """測試設定檔中的設定值無效"""
        config = tmp_path / "bad.conf"
        config.write_text("threads = many\n[row]\nk = 3\nq = 5\n")
        assert run("grid --config", str(config)) == EXIT_USAGE


class TestParseGridConfig:
    """設定檔解析"""

    def test_expansion_order(self):
        """測試 k 與 q 依序展開"""
        overrides, rows = parse_grid_config(
            "threads = 2\n[row]\nk = 3, 4\nq = 3,5\nchecks = clique\n"
            "[row]\nfamily = ak\nk = 3\nq = 7\n"
        )
        assert overrides == {"threads": "2"}
        assert [(r.k, r.q) for r in rows] == [(3, 3), (3, 5), (4, 3), (4, 5), (3, 7)]
        assert rows[0].checks == ["clique"]
        assert rows[-1].family is Family.AK

    @pytest.mark.parametrize(
        "text,line",
        [
            ("[rows]\n", 1),
            ("unknown_setting = 3\n", 1),
            ("[row]\nk = 3\nk = 4\n", 3),
            ("[row]\nk = three\nq = 5\n", 2),
            ("[row]\nk = 3\n\nq = 5, 6\n", 4),
            ("[row]\nq = 5\n", 1),
            ("[row]\nk = 3\nq 5\n", 3),
            ("[row]\nfamily = gamma\nepsilon = singular\nk = 3\nq = 5\n", 1),
        ],
    )
    def test_errors(self, text, line):
        """測試各種錯誤的行號"""
        with pytest.raises(ConfigError) as excinfo:
            parse_grid_config(text)
        assert excinfo.value.line == line


class TestCensusAndWitness:
    """census 與 witness 子命令"""

    def test_census(self, run, capsys):
        """測試 PG(2, 5) 的點數"""
        assert run("census --k 3 --q 5") == EXIT_OK
        out = capsys.readouterr().out
        assert "X₀ = 6" in out
        assert "X_□ = 10" in out
        assert "X_⊠ = 15" in out
        assert "總數 = 31" in out

    def test_witness(self, run, capsys):
        """測試印出等距矩陣"""
        assert run("witness --k 3 --q 5 --source 0:0:1 --target 1:1:1") == EXIT_OK
        out = capsys.readouterr().out
        assert "A =" in out and "AᵀBA = B" in out

    @pytest.mark.parametrize(
        "source,target",
        [("0:0:1", "1:0:0"), ("0:1", "1:1:1"), ("0:1:2", "0:1:2")],
    )
    def test_witness_rejected(self, run, source, target):
        """測試類別不同、長度錯誤或奇異點"""
        assert run("witness --k 3 --q 5", "--source", source, "--target", target) == EXIT_USAGE
