"""Formula AST: atoms, Boolean connectives and the windowed convolution operator.

The convolution operator ``Conv(kernel, threshold, child)`` holds at time t
when the kernel-weighted fraction of its window on which ``child`` holds is
at least ``threshold``.  ``ConvDual`` is its dual (strict ``>`` comparison),
equivalent to ``Not(Conv(kernel, 1 - threshold, Not(child)))``.

``globally``/``eventually`` are flat-kernel abbreviations with thresholds 1
and 0; ``And``/``Implies`` are kept as AST nodes so formulas print the way
they were written, and :func:`desugar` rewrites everything into the core
fragment (constants, atoms, Not, Or, Conv).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import SclError
from .kernels import BoundedKernel, FlatKernel

_COMPARISONS = (">=", "<=", ">", "<")


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Atom:
    """Threshold comparison on one trace variable, e.g. ``G >= 70``.

    Strict and non-strict forms coincide at the Boolean level (signals of
    finite variation make the difference measure-zero); robustness uses the
    same signed distance for both.
    """

    variable: str
    op: str
    threshold: float

    def __post_init__(self) -> None:
        if self.op not in _COMPARISONS:
            raise SclError(f"unknown comparison {self.op!r}; use one of {_COMPARISONS}")
        if not math.isfinite(self.threshold):
            raise SclError(f"atom threshold must be finite, got {self.threshold}")


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


def _check_conv_args(kernel: BoundedKernel, threshold: float) -> None:
    if not (0.0 <= threshold <= 1.0):
        raise SclError(f"convolution threshold must be in [0, 1], got {threshold}")
    if kernel.lower < 0:
        raise SclError(
            f"convolution windows must look forward (lower bound >= 0), "
            f"got [{kernel.lower}, {kernel.upper}]"
        )


@dataclass(frozen=True)
class Conv:
    """Kernel-weighted coverage of the child is ``>= threshold``."""

    kernel: BoundedKernel
    threshold: float
    child: "Formula"

    def __post_init__(self) -> None:
        _check_conv_args(self.kernel, self.threshold)


@dataclass(frozen=True)
class ConvDual:
    """Kernel-weighted coverage of the child is strictly ``> threshold``."""

    kernel: BoundedKernel
    threshold: float
    child: "Formula"

    def __post_init__(self) -> None:
        _check_conv_args(self.kernel, self.threshold)


Formula = Union[Const, Atom, Not, Or, And, Implies, Conv, ConvDual]


def globally(lower: float, upper: float, child: Formula) -> Conv:
    """True at t iff the child holds throughout ``[t+lower, t+upper]``."""
    return Conv(FlatKernel(lower, upper), 1.0, child)


def eventually(lower: float, upper: float, child: Formula) -> ConvDual:
    """True at t iff the child holds somewhere in ``[t+lower, t+upper]``."""
    return ConvDual(FlatKernel(lower, upper), 0.0, child)


def horizon(f: Formula) -> float:
    """Minimal trace duration needed to evaluate ``f`` at time 0."""
    match f:
        case Const() | Atom():
            return 0.0
        case Not(child):
            return horizon(child)
        case Or(left, right) | And(left, right) | Implies(left, right):
            return max(horizon(left), horizon(right))
        case Conv(kernel, _, child) | ConvDual(kernel, _, child):
            return kernel.upper + horizon(child)
    raise SclError(f"not a formula: {f!r}")


def desugar(f: Formula) -> Formula:
    """Rewrite into the core fragment (Const, Atom, Not, Or, Conv); idempotent."""
    match f:
        case Const() | Atom():
            return f
        case Not(child):
            return Not(desugar(child))
        case Or(left, right):
            return Or(desugar(left), desugar(right))
        case And(left, right):
            return Not(Or(Not(desugar(left)), Not(desugar(right))))
        case Implies(left, right):
            return Or(Not(desugar(left)), desugar(right))
        case Conv(kernel, threshold, child):
            return Conv(kernel, threshold, desugar(child))
        case ConvDual(kernel, threshold, child):
            return Not(Conv(kernel, 1.0 - threshold, Not(desugar(child))))
    raise SclError(f"not a formula: {f!r}")


def formula_size(f: Formula) -> int:
    """Number of operator nodes in the desugared formula."""

    def count(g: Formula) -> int:
        match g:
            case Const() | Atom():
                return 0
            case Not(child):
                return 1 + count(child)
            case Or(left, right):
                return 1 + count(left) + count(right)
            case Conv(_, _, child):
                return 1 + count(child)
        raise SclError(f"unexpected node after desugaring: {g!r}")

    return count(desugar(f))


def variables(f: Formula) -> tuple[str, ...]:
    """Trace variables referenced by the formula, in first-use order."""
    seen: list[str] = []

    def walk(g: Formula) -> None:
        match g:
            case Atom(variable, _, _):
                if variable not in seen:
                    seen.append(variable)
            case Const():
                pass
            case Not(child) | Conv(_, _, child) | ConvDual(_, _, child):
                walk(child)
            case Or(left, right) | And(left, right) | Implies(left, right):
                walk(left)
                walk(right)

    walk(f)
    return tuple(seen)
