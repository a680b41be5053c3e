#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
相空间核心模块
Wigner Core Module - Fock对角态的精确相空间代数：Wigner函数、损耗信道、似然卷积核

约定: [x, p] = i，真空每个正交分量方差 1/2，W0(x,p) = exp(-(x²+p²))/π。
所有径向函数都表示为 f(x,p) = exp(-λs)·Σ c_k s^k，s = x²+p²。
"""

import math
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy.special import comb, eval_genlaguerre
from scipy.stats import binom

from src.errors import CapabilityError, DomainError
from src.logger import get_logger

# Fock 态支持上限
MAX_PHOTON_NUMBER = 8
# 卷积后多项式次数上限
MAX_DEGREE = 8
WEIGHT_TOLERANCE = 1e-12

logger = get_logger("WignerCore")

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class QuadraturePoint:
    """相空间中的一点 (x, p)"""

    x: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise DomainError(f"正交分量必须有限: ({self.x}, {self.p})")

    @property
    def s(self) -> float:
        return self.x * self.x + self.p * self.p


@dataclass(frozen=True)
class PhotonMixture:
    """
    光子数分布（Fock对角混合态）

    weights: ((n, 概率), ...)，按光子数升序
    """

    weights: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        numbers = [n for n, _ in self.weights]
        if not numbers:
            raise DomainError("光子数分布不能为空")
        if len(set(numbers)) != len(numbers):
            raise DomainError(f"光子数重复: {numbers}")
        for n, w in self.weights:
            if int(n) != n or n < 0:
                raise DomainError(f"光子数必须是非负整数: {n}")
            if not math.isfinite(w) or w < 0:
                raise DomainError(f"概率必须非负: n={n}, p={w}")
        total = math.fsum(w for _, w in self.weights)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise DomainError(f"概率之和必须为1，实际为 {total!r}")

    @classmethod
    def from_dict(cls, weights: Mapping[int, float]) -> "PhotonMixture":
        """由 {n: p} 字典构造，零权重分量被丢弃"""
        items = sorted((int(n), float(w)) for n, w in weights.items() if w != 0.0)
        return cls(tuple(items))

    @classmethod
    def fock(cls, n: int) -> "PhotonMixture":
        """纯 Fock 态 |n>"""
        return cls(((int(n), 1.0),))

    def as_dict(self) -> Dict[int, float]:
        return dict(self.weights)

    def probability(self, n: int) -> float:
        return self.as_dict().get(n, 0.0)

    @property
    def max_photon_number(self) -> int:
        return max(n for n, _ in self.weights)


@dataclass(frozen=True)
class RadialPolyGaussian:
    """
    径向多项式高斯函数 f(s) = exp(-lam·s)·Σ_k coeffs[k]·s^k

    lam 对应函数形式中的 λ（lambda 是保留字）。
    """

    lam: float
    coeffs: Tuple[float, ...]

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"λ 必须为正: {self.lam}")
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            coeffs = (0.0,)
        if not all(math.isfinite(c) for c in coeffs):
            raise DomainError(f"系数必须有限: {coeffs}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        """最高非零项次数（全零时为0）"""
        nonzero = [k for k, c in enumerate(self.coeffs) if c != 0.0]
        return nonzero[-1] if nonzero else 0

    def integral(self) -> float:
        """全平面积分 π·Σ c_k·k!/λ^(k+1)"""
        return math.pi * math.fsum(
            c * math.factorial(k) / self.lam ** (k + 1) for k, c in enumerate(self.coeffs)
        )

    def at_s(self, s: ArrayLike) -> np.ndarray:
        """
        在 s = x²+p² 处求值（向量化）

        每一项按 exp(k·ln s - λs) 计算，s 到 100 都不会溢出。
        """
        s = np.asarray(s, dtype=float)
        total = np.zeros_like(s)
        with np.errstate(divide="ignore"):
            log_s = np.log(s)
        for k, c in enumerate(self.coeffs):
            if c == 0.0:
                continue
            if k == 0:
                total = total + c * np.exp(-self.lam * s)
            else:
                total = total + c * np.exp(k * log_s - self.lam * s)
        return total

    def polynomial_at(self, s: ArrayLike) -> np.ndarray:
        """只求多项式因子 Σ c_k s^k"""
        return np.polynomial.polynomial.polyval(np.asarray(s, dtype=float), self.coeffs)

    def scaled(self, factor: float) -> "RadialPolyGaussian":
        return RadialPolyGaussian(self.lam, tuple(factor * c for c in self.coeffs))


def _combine(terms: Sequence[Tuple[float, RadialPolyGaussian]]) -> RadialPolyGaussian:
    """同一 λ 的径向函数线性组合"""
    lam = terms[0][1].lam
    size = max(len(f.coeffs) for _, f in terms)
    out = np.zeros(size)
    for weight, f in terms:
        if f.lam != lam:
            raise DomainError(f"线性组合要求相同的 λ: {f.lam} != {lam}")
        out[:len(f.coeffs)] += weight * np.asarray(f.coeffs)
    return RadialPolyGaussian(lam, tuple(out))


def fock_wigner(n: int) -> RadialPolyGaussian:
    """
    Fock 态 |n> 的 Wigner 函数

    W_n(s) = (-1)^n/π · exp(-s) · L_n(2s)，L_n 为 Laguerre 多项式。

    Args:
        n: 光子数

    Returns:
        λ = 1 的 RadialPolyGaussian，积分为1

    Raises:
        CapabilityError: n 超出支持范围
    """
    if int(n) != n or n < 0:
        raise DomainError(f"光子数必须是非负整数: {n}")
    n = int(n)
    if n > MAX_PHOTON_NUMBER:
        raise CapabilityError(f"不支持光子数 n={n}（上限 {MAX_PHOTON_NUMBER}）")

    # L_n(t) = Σ_k (-1)^k C(n,k) t^k / k!
    coeffs = tuple(
        (-1) ** (n + k) * comb(n, k, exact=True) * 2 ** k / (math.factorial(k) * math.pi)
        for k in range(n + 1)
    )
    return RadialPolyGaussian(1.0, coeffs)


def mixture_wigner(mix: PhotonMixture) -> RadialPolyGaussian:
    """
    光子数混合态的 Wigner 函数（Fock Wigner 函数的凸组合）

    Args:
        mix: 光子数分布

    Returns:
        RadialPolyGaussian
    """
    return _combine([(w, fock_wigner(n)) for n, w in mix.weights])


def apply_loss(mix: PhotonMixture, loss: float) -> PhotonMixture:
    """
    光子损耗信道：n 光子分量变为二项分布 C(n,k)(1-loss)^k·loss^(n-k)

    Args:
        mix: 输入光子数分布
        loss: 损耗比例 [0, 1]

    Returns:
        输出光子数分布

    Raises:
        DomainError: loss 不在 [0, 1]
    """
    if not (0.0 <= loss <= 1.0):
        raise DomainError(f"损耗必须在 [0, 1] 内: {loss}")

    out: Dict[int, float] = {}
    for n, w in mix.weights:
        pmf = binom.pmf(np.arange(n + 1), n, 1.0 - loss)
        for k, pk in enumerate(pmf):
            out[k] = out.get(k, 0.0) + w * float(pk)

    # 累加误差归一化
    total = math.fsum(out.values())
    return PhotonMixture.from_dict({k: p / total for k, p in out.items()})


def _trinomial(j: int, cross: float, square: float) -> Iterator[Tuple[Tuple[int, int, int], float]]:
    """
    展开 (T + cross·M + square·S)^j

    Yields:
        ((p, q, r), 系数)，对应单项式 T^p M^q S^r
    """
    fj = math.factorial(j)
    for p in range(j + 1):
        for q in range(j - p + 1):
            r = j - p - q
            coef = fj / (math.factorial(p) * math.factorial(q) * math.factorial(r))
            yield (p, q, r), coef * cross ** q * square ** r


def convolve(a: RadialPolyGaussian, b: RadialPolyGaussian) -> RadialPolyGaussian:
    """
    二维卷积 (a*b)(u) = ∫∫ a(w)·b(u-w) d²w 的闭式解

    配方后令 z = w - c·u（c = β/(α+β)，d = α/(α+β)），
    |w|² = |z|² + 2c z·u + c²S，|u-w|² = |z|² - 2d z·u + d²S。
    对 z 的各向同性高斯矩逐项积分：
    ∫ |z|^(2P) (z·u)^Q exp(-γ|z|²) d²z = π·C(Q,Q/2)/2^Q · n!/γ^(n+1) · S^(Q/2)，n = P+Q/2（Q 为偶数）。

    Args:
        a: 第一个径向函数
        b: 第二个径向函数

    Returns:
        λ = αβ/(α+β) 的 RadialPolyGaussian

    Raises:
        CapabilityError: 结果多项式次数超过 MAX_DEGREE
    """
    da, db = a.degree, b.degree
    if da + db > MAX_DEGREE:
        raise CapabilityError(f"卷积多项式次数 {da + db} 超过上限 {MAX_DEGREE}")

    alpha, beta = a.lam, b.lam
    gamma = alpha + beta
    c = beta / gamma
    d = alpha / gamma

    out = np.zeros(da + db + 1)
    for (j, aj), (k, bk) in product(enumerate(a.coeffs[:da + 1]), enumerate(b.coeffs[:db + 1])):
        if aj == 0.0 or bk == 0.0:
            continue
        for (p1, q1, r1), t1 in _trinomial(j, 2.0 * c, c * c):
            for (p2, q2, r2), t2 in _trinomial(k, -2.0 * d, d * d):
                q = q1 + q2
                if q % 2:
                    continue
                half = q // 2
                n = p1 + p2 + half
                angular = comb(q, half, exact=True) / 2.0 ** q
                radial = math.factorial(n) / gamma ** (n + 1)
                out[r1 + r2 + half] += aj * bk * t1 * t2 * angular * radial

    return RadialPolyGaussian(alpha * beta / gamma, tuple(math.pi * out))


def evaluate(f: RadialPolyGaussian, pt: QuadraturePoint) -> float:
    """
    在相空间点求值

    Args:
        f: 径向函数
        pt: 相空间点

    Returns:
        函数值
    """
    return float(f.at_s(pt.s))


def radial_profile(f: RadialPolyGaussian, radii: Sequence[float]) -> List[Tuple[float, float]]:
    """
    径向剖面：在 (r, 0) 处求值

    Args:
        f: 径向函数
        radii: 半径列表（≥ 0）

    Returns:
        [(半径, 函数值), ...]

    Raises:
        DomainError: 存在负半径
    """
    radii = [float(r) for r in radii]
    negative = [r for r in radii if r < 0]
    if negative:
        raise DomainError(f"半径不能为负: {negative[:3]}")
    values = f.at_s(np.square(radii)) if radii else np.zeros(0)
    return list(zip(radii, (float(v) for v in values)))


def fock_pair_overlap(m: int, n: int, s: ArrayLike) -> np.ndarray:
    """
    纯 Fock 态卷积核的位移矩阵元表示

    (W_m * W_n)(u) = |<m|D(α)|n>|²/(2π)，|α|² = s/2；
    m ≥ n 时 |<m|D(α)|n>|² = n!/m! · t^(m-n) · exp(-t) · [L_n^(m-n)(t)]²，t = |α|²。

    Args:
        m: 第一个光子数
        n: 第二个光子数
        s: |u|²

    Returns:
        卷积核的值
    """
    if m < n:
        m, n = n, m
    t = np.asarray(s, dtype=float) / 2.0
    ratio = math.factorial(n) / math.factorial(m)
    lag = eval_genlaguerre(n, m - n, t)
    return ratio * t ** (m - n) * np.exp(-t) * lag * lag / (2.0 * math.pi)


def is_nonnegative(f: RadialPolyGaussian, s_max: float = 100.0, points: int = 4001,
                   tolerance: float = 1e-12) -> bool:
    """在 s ∈ [0, s_max] 的网格上检查函数非负"""
    values = f.at_s(np.linspace(0.0, s_max, points))
    return bool(np.all(values >= -tolerance))
