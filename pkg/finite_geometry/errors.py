"""
錯誤類型

所有模組共用的例外階層
"""

from typing import List, Optional


class KFreeError(Exception):
    """所有驗證流程例外的根類別"""


class FieldConstructionError(KFreeError, ValueError):
    """無法建立有限體（偶特徵、非質數冪、超出大小上限）"""


class CapExceededError(KFreeError):
    """超出設定的資源上限（頂點數、特徵值求解器等）"""

    def __init__(self, what: str, size: int, cap: int):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__(f"{what} 超出上限: {size} > {cap}")


class CliqueSearchTimeout(KFreeError):
    """團搜尋超過時間預算，附帶目前找到的下界"""

    def __init__(self, lower_bound: int, witness: Optional[List[int]] = None, budget: float = 0.0):
        self.lower_bound = lower_bound
        self.witness = list(witness or [])
        self.budget = budget
        super().__init__(f"團搜尋逾時 ({budget:.1f} 秒)，目前下界 ω ≥ {lower_bound}")


class EigenSolverError(KFreeError):
    """特徵值求解未收斂"""


class WitnessConstructionError(KFreeError):
    """等距見證建構失敗（內部不變量被破壞）"""


class ConfigError(KFreeError):
    """設定檔或命令列參數錯誤"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"第 {line} 行: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class InsufficientRowsError(KFreeError):
    """趨勢回歸所需的資料列不足"""
