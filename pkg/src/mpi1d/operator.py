"""Dense operator matrices tagged with the spaces they map between."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

import numpy as np

TAGS = ("space", "fov", "time", "freq", "cheb")


class TagMismatchError(ValueError):
    """Raised when operators are chained across incompatible spaces."""


def _frozen(arr, name, length=None):
    if arr is None:
        return None
    a = np.array(arr, dtype=float)
    if a.ndim != 1 or (length is not None and a.shape[0] != length):
        raise ValueError(f"{name} must be a vector of length {length}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Immutable dense matrix plus the identity of its domain and codomain.

    ``domain_weights``/``codomain_weights`` are the quadrature weights of the
    underlying discrete L2 inner products, and ``*_coords`` the sample
    locations (positions, times, or frequency indices). All four are
    optional metadata; they are not part of the binary file format.
    """

    data: np.ndarray
    domain_tag: str
    codomain_tag: str
    domain_weights: Optional[np.ndarray] = None
    codomain_weights: Optional[np.ndarray] = None
    domain_coords: Optional[np.ndarray] = None
    codomain_coords: Optional[np.ndarray] = None
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        data = np.array(self.data, dtype=float, order="C")
        if data.ndim != 2:
            raise ValueError("operator data must be two-dimensional")
        if not np.all(np.isfinite(data)):
            raise ValueError("operator entries must be finite")
        data.setflags(write=False)
        for tag in (self.domain_tag, self.codomain_tag):
            if tag not in TAGS:
                raise ValueError(f"unknown grid tag {tag!r}; expected one of {TAGS}")
        rows, cols = data.shape
        set_ = object.__setattr__
        set_(self, "data", data)
        set_(self, "domain_weights", _frozen(self.domain_weights, "domain_weights", cols))
        set_(self, "codomain_weights", _frozen(self.codomain_weights, "codomain_weights", rows))
        set_(self, "domain_coords", _frozen(self.domain_coords, "domain_coords", cols))
        set_(self, "codomain_coords", _frozen(self.codomain_coords, "codomain_coords", rows))
        set_(self, "meta", MappingProxyType(dict(self.meta)))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.cols:
            raise ValueError(f"vector of length {x.shape[0]} does not match {self.cols} columns")
        return self.data @ x

    def with_meta(self, **kw) -> "OperatorMatrix":
        return replace(self, meta={**self.meta, **kw})

    @property
    def T(self) -> "OperatorMatrix":
        return OperatorMatrix(
            self.data.T, self.codomain_tag, self.domain_tag,
            self.codomain_weights, self.domain_weights,
            self.codomain_coords, self.domain_coords, dict(self.meta),
        )

    def orthonormal(self) -> "OperatorMatrix":
        """Matrix of the same operator in quadrature-orthonormal coordinates.

        Returns ``diag(sqrt(wc)) @ data @ diag(1/sqrt(wd))``, whose Euclidean
        singular values are those of the operator between the weighted
        discrete L2 spaces. Square same-space results are symmetrized when
        already symmetric up to rounding.
        """
        if self.domain_weights is None or self.codomain_weights is None:
            raise ValueError("orthonormal form needs both domain and codomain weights")
        if np.any(self.domain_weights <= 0):
            raise ValueError("domain weights must be strictly positive")
        sc = np.sqrt(self.codomain_weights)
        sd = np.sqrt(self.domain_weights)
        data = sc[:, None] * self.data / sd[None, :]
        if self.domain_tag == self.codomain_tag and data.shape[0] == data.shape[1]:
            asym = np.max(np.abs(data - data.T)) if data.size else 0.0
            if asym <= 1e-12 * max(np.max(np.abs(data)), 1e-300):
                data = 0.5 * (data + data.T)
        return OperatorMatrix(
            data, self.domain_tag, self.codomain_tag,
            np.ones(self.cols), np.ones(self.rows),
            self.domain_coords, self.codomain_coords,
            {**self.meta, "orthonormal": True},
        )


def compose(ops: Sequence[OperatorMatrix]) -> OperatorMatrix:
    """Product ``ops[0] @ ops[1] @ ... @ ops[-1]`` (rightmost acts first).

    Adjacent operators must agree on the intermediate space: the domain tag
    of ``ops[k]`` has to equal the codomain tag of ``ops[k+1]``.
    """
    ops = list(ops)
    if not ops:
        raise ValueError("compose needs at least one operator")
    for left, right in zip(ops[:-1], ops[1:]):
        if left.domain_tag != right.codomain_tag:
            raise TagMismatchError(
                f"cannot compose: left operator expects {left.domain_tag!r} "
                f"but right operator produces {right.codomain_tag!r}"
            )
        if left.cols != right.rows:
            raise TagMismatchError(
                f"cannot compose {left.domain_tag!r} grids of different size "
                f"({left.cols} vs {right.rows})"
            )
    data = ops[0].data if len(ops) == 1 else np.linalg.multi_dot([op.data for op in ops])
    first, last = ops[0], ops[-1]
    return OperatorMatrix(
        data, last.domain_tag, first.codomain_tag,
        last.domain_weights, first.codomain_weights,
        last.domain_coords, first.codomain_coords,
        {"composed_of": tuple(op.meta.get("name", "?") for op in ops)},
    )
