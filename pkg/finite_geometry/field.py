#!/usr/bin/env python3
"""
有限體 GF(q)

奇質數冪 q = p^e 的精確算術，包含二次特徵與平方根。
元素以整數編碼 Σ c_j·p^(e-1-j) 儲存（c_0 為常數項，放在最高位），
因此整數大小順序就是標準順序：依係數序列字典序、常數項先比較。
"""

import itertools
import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import FieldConstructionError

logger = logging.getLogger(__name__)

DEFAULT_FIELD_SIZE_CAP = 8192

Codes = Union[int, Sequence[int], np.ndarray]


def is_prime(n: int) -> bool:
    """試除法質數判定"""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_factors(n: int) -> List[int]:
    factors = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            factors.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        factors.append(n)
    return factors


def split_prime_power(q: int) -> Tuple[int, int]:
    """
    將 q 分解為 (p, e)，q = p^e 且 p 為奇質數

    Raises:
        FieldConstructionError: q 為偶數、小於 3 或不是質數冪
    """
    if q < 3:
        raise FieldConstructionError(f"q = {q} 太小，需為奇質數冪")
    if q % 2 == 0:
        raise FieldConstructionError(f"q = {q} 為偶數，只支援奇特徵的有限體")
    p = _prime_factors(q)[0]
    e, rest = 0, q
    while rest % p == 0:
        rest //= p
        e += 1
    if rest != 1:
        raise FieldConstructionError(f"q = {q} 不是質數冪")
    return p, e


def _poly_rem(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    """a mod b（b 為首一多項式，係數由低次到高次）"""
    r = [x % p for x in a]
    db = len(b) - 1
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        if c:
            for j in range(db + 1):
                r[i - db + j] = (r[i - db + j] - c * b[j]) % p
    r = r[:db]
    return r + [0] * (db - len(r))


def _poly_mulmod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int], p: int) -> List[int]:
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    return _poly_rem(prod, modulus, p)


def _is_irreducible(poly: Sequence[int], p: int) -> bool:
    e = len(poly) - 1
    for d in range(1, e // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if not any(_poly_rem(poly, list(tail) + [1], p)):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> Tuple[int, ...]:
    """依字典序掃描首一 e 次多項式，回傳第一個不可約者"""
    if e == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=e):
        poly = tail + (1,)
        if _is_irreducible(poly, p):
            return poly
    raise FieldConstructionError(f"找不到 GF({p}) 上的 {e} 次不可約多項式")


class Field:
    """
    有限體 GF(p^e)

    純量運算透過 FieldElement；批次運算接受編碼陣列並回傳 numpy 陣列。
    乘法與反元素使用以原根建立的對數表。
    """

    __slots__ = ("p", "e", "q", "modulus_poly", "_weights", "_exp", "_log", "generator_code")

    def __init__(self, p: int, e: int, modulus_poly: Sequence[int]):
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus_poly = tuple(int(c) for c in modulus_poly)
        self._weights = np.array([p ** (e - 1 - j) for j in range(e)], dtype=np.int64)
        self.generator_code, self._exp, self._log = self._build_log_tables()

    # ---- 編碼 ----

    @property
    def one_code(self) -> int:
        return int(self._weights[0])

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, self.one_code)

    def coefficients(self, code: int) -> Tuple[int, ...]:
        """編碼 → 多項式基底座標（常數項在前）"""
        return tuple(int(code // int(w)) % self.p for w in self._weights)

    def encode(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.e:
            raise ValueError(f"GF({self.q}) 的元素需要 {self.e} 個係數，收到 {len(coeffs)}")
        return sum((int(c) % self.p) * int(w) for c, w in zip(coeffs, self._weights))

    def embed(self, value: int) -> int:
        """整數 → 質子體元素的編碼"""
        return (value % self.p) * self.one_code

    def element(self, value: Union[int, Sequence[int]]) -> "FieldElement":
        if isinstance(value, int):
            return FieldElement(self, self.embed(value))
        return FieldElement(self, self.encode(value))

    def from_code(self, code: int) -> "FieldElement":
        if not 0 <= code < self.q:
            raise ValueError(f"編碼 {code} 超出 GF({self.q}) 範圍")
        return FieldElement(self, code)

    def elements(self) -> List["FieldElement"]:
        """依標準順序列出所有元素"""
        return [FieldElement(self, c) for c in range(self.q)]

    def format_code(self, code: int) -> str:
        if self.e == 1:
            return str(int(code))
        return ",".join(str(c) for c in self.coefficients(int(code)))

    def parse_code(self, text: str) -> int:
        parts = [s for s in text.strip().split(",") if s != ""]
        if self.e == 1 and len(parts) == 1:
            return self.embed(int(parts[0]))
        return self.encode([int(s) for s in parts])

    # ---- 對數表 ----

    def _mul_slow(self, a: int, b: int) -> int:
        prod = _poly_mulmod(self.coefficients(a), self.coefficients(b), self.modulus_poly, self.p)
        return self.encode(prod)

    def _pow_slow(self, a: int, n: int) -> int:
        result, base = self.one_code, a
        while n:
            if n & 1:
                result = self._mul_slow(result, base)
            base = self._mul_slow(base, base)
            n >>= 1
        return result

    def _build_log_tables(self) -> Tuple[int, np.ndarray, np.ndarray]:
        order = self.q - 1
        primes = _prime_factors(order)
        one = self.one_code
        generator = next(
            c for c in range(1, self.q) if all(self._pow_slow(c, order // r) != one for r in primes)
        )
        exp = np.empty(order, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        x = one
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = self._mul_slow(x, generator)
        return generator, exp, log

    # ---- 批次運算（編碼陣列） ----

    def _digits(self, a: np.ndarray) -> np.ndarray:
        return (a[..., None] // self._weights) % self.p

    def add(self, a: Codes, b: Codes) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a + b) % self.p
        digits = (self._digits(a) + self._digits(b)) % self.p
        return (digits * self._weights).sum(axis=-1)

    def neg(self, a: Codes) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.e == 1:
            return (-a) % self.p
        return (((self.p - self._digits(a)) % self.p) * self._weights).sum(axis=-1)

    def sub(self, a: Codes, b: Codes) -> np.ndarray:
        return self.add(a, self.neg(b))

    def mul(self, a: Codes, b: Codes) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a * b) % self.p
        a, b = np.broadcast_arrays(a, b)
        out = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a: Codes) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("零元素沒有乘法反元素")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def character(self, a: Codes) -> np.ndarray:
        """批次二次特徵：0 / +1 / -1（以離散對數的奇偶判斷）"""
        a = np.asarray(a, dtype=np.int64)
        return np.where(a == 0, 0, np.where(self._log[a] % 2 == 0, 1, -1)).astype(np.int8)

    # ---- 其他 ----

    def describe(self) -> dict:
        return {"p": self.p, "e": self.e, "q": self.q, "modulus_poly": list(self.modulus_poly)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Field):
            return NotImplemented
        return (self.p, self.e, self.modulus_poly) == (other.p, other.e, other.modulus_poly)

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus_poly))

    def __repr__(self) -> str:
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.e}, modulus={list(self.modulus_poly)})"

    def __reduce__(self):
        return (_cached_field, (self.p, self.e))


class FieldElement:
    """GF(q) 的單一元素（不可變）"""

    __slots__ = ("field", "code")

    def __init__(self, field: Field, code: int):
        self.field = field
        self.code = int(code)

    @property
    def coeffs(self) -> Tuple[int, ...]:
        return self.field.coefficients(self.code)

    def _coerce(self, other: Union["FieldElement", int]) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(f"不同有限體的元素無法運算: {self.field} 與 {other.field}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.field.element(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, int(self.field.add(self.code, other.code)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, int(self.field.sub(self.code, other.code)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, int(self.field.mul(self.code, other.code)))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, int(self.field.inv(self.code)))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, int(self.field.neg(self.code)))

    def __pow__(self, exponent: int) -> "FieldElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = self.field.one, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __bool__(self) -> bool:
        return self.code != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == self.field.embed(int(other))
        return NotImplemented

    def __lt__(self, other: "FieldElement") -> bool:
        return self.code < other.code

    def __hash__(self) -> int:
        return hash((self.field.q, self.code))

    def __repr__(self) -> str:
        return f"{self.field.format_code(self.code)} ∈ GF({self.field.q})"

    def __str__(self) -> str:
        return self.field.format_code(self.code)


@lru_cache(maxsize=None)
def _cached_field(p: int, e: int) -> Field:
    modulus = smallest_irreducible(p, e)
    logger.debug("建立 GF(%d^%d)，模多項式 %s", p, e, modulus)
    return Field(p, e, modulus)


def construct_field(p: int, e: int = 1, size_cap: int = DEFAULT_FIELD_SIZE_CAP) -> Field:
    """
    建立 GF(p^e)

    相同的 (p, e) 一律得到同一個物件（模多項式取字典序最小的首一不可約多項式）。

    Raises:
        FieldConstructionError: p = 2、p 非質數、e < 1 或 q 超過上限
    """
    if p == 2:
        raise FieldConstructionError("偶特徵 (p = 2) 不支援：需要奇數 q")
    if not is_prime(p):
        raise FieldConstructionError(f"p = {p} 不是質數")
    if e < 1:
        raise FieldConstructionError(f"擴張次數 e = {e} 必須 ≥ 1")
    if p**e > size_cap:
        raise FieldConstructionError(f"q = {p}^{e} = {p**e} 超過上限 {size_cap}")
    return _cached_field(p, e)


def field_of_order(q: int, size_cap: int = DEFAULT_FIELD_SIZE_CAP) -> Field:
    p, e = split_prime_power(q)
    return construct_field(p, e, size_cap=size_cap)


def quadratic_character(a: FieldElement) -> int:
    """二次特徵：a = 0 → 0；非零平方 → +1；非平方 → -1（以 a^((q-1)/2) 計算）"""
    if not a:
        return 0
    return 1 if a ** ((a.field.q - 1) // 2) == a.field.one else -1


@lru_cache(maxsize=None)
def smallest_nonsquare(field: Field) -> FieldElement:
    """依標準順序第一個非平方元素"""
    for a in field.elements()[1:]:
        if quadratic_character(a) == -1:
            return a
    raise FieldConstructionError(f"{field} 沒有非平方元素")


def _tonelli_shanks(a: FieldElement) -> FieldElement:
    field = a.field
    odd, s = field.q - 1, 0
    while odd % 2 == 0:
        odd //= 2
        s += 1
    c = smallest_nonsquare(field) ** odd
    r = a ** ((odd + 1) // 2)
    t = a**odd
    m = s
    one = field.one
    while t != one:
        i, temp = 0, t
        while temp != one:
            temp = temp * temp
            i += 1
            if i == m:
                raise ArithmeticError(f"Tonelli–Shanks 失敗：{a!r} 不是平方")
        b = c ** (1 << (m - i - 1))
        r = r * b
        t = t * b * b
        c = b * b
        m = i
    return r


def square_root(a: FieldElement, method: str = "auto") -> Optional[FieldElement]:
    """
    平方根

    Args:
        a: 非零元素
        method: "auto"、"tonelli"（通用）或 "fast"（q ≡ 3 mod 4 時的 a^((q+1)/4)）

    Returns:
        編碼較小的那個根；a 為非平方時回傳 None
    """
    if not a:
        raise ValueError("square_root 不接受零元素")
    if quadratic_character(a) != 1:
        return None
    q = a.field.q
    if method == "auto":
        method = "fast" if q % 4 == 3 else "tonelli"
    if method == "fast":
        if q % 4 != 3:
            raise ValueError(f"快速平方根只適用於 q ≡ 3 (mod 4)，收到 q = {q}")
        root = a ** ((q + 1) // 4)
    elif method == "tonelli":
        root = _tonelli_shanks(a)
    else:
        raise ValueError(f"未知的平方根方法: {method}")
    return min(root, -root)
