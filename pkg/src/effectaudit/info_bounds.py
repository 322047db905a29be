"""Information-theoretic feasibility bounds for discrete joint distributions.

The central check: summed mutual informations with one outcome cannot exceed
the outcome entropy plus each variable's redundancy with the rest,

    sum_i I(X_i; y) <= H(y) + sum_i I(X_i; X_-i).

All quantities are computed by exact marginalization of a dense table, so
joint sizes are capped (product of alphabet sizes <= 10**6).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    EmptySubsetError,
    IndexOutOfRangeError,
    InvalidJointError,
    InvalidPermutationError,
    InvalidShapeError,
    OverlappingSubsetsError,
)

MAX_JOINT_CELLS = 10**6
MASS_TOLERANCE = 1e-12
MI_TOLERANCE = 1e-12
CHAIN_RULE_TOLERANCE = 1e-10

_LN2 = math.log(2.0)

Atom = tuple[int, ...]


def _in_units(nats: float, units: str) -> float:
    if units == "nats":
        return nats
    if units == "bits":
        return nats / _LN2
    raise ValueError(f"units must be 'nats' or 'bits', got {units!r}")


@dataclass(frozen=True, eq=False)
class DiscreteJoint:
    """Joint pmf over num_vars finite variables.

    ``pmf`` maps index tuples to probabilities; omitted atoms have probability
    zero.  A dense table is materialized at construction for exact
    marginalization.
    """

    alphabet_sizes: tuple[int, ...]
    pmf: Mapping[Atom, float]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.alphabet_sizes)
        if len(sizes) < 1 or any(s < 1 for s in sizes):
            raise InvalidJointError(f"bad alphabet sizes {sizes!r}")
        cells = math.prod(sizes)
        if cells > MAX_JOINT_CELLS:
            raise InvalidJointError(
                f"joint has {cells} cells, exceeding the cap of {MAX_JOINT_CELLS}"
            )
        table = np.zeros(sizes, dtype=float)
        seen: set[Atom] = set()
        for atom, prob in self.pmf.items():
            atom = tuple(int(i) for i in atom)
            if len(atom) != len(sizes):
                raise InvalidJointError(f"atom {atom!r} has arity {len(atom)}, expected {len(sizes)}")
            if any(not 0 <= idx < s for idx, s in zip(atom, sizes)):
                raise InvalidJointError(f"atom {atom!r} outside alphabet ranges {sizes!r}")
            if atom in seen:
                raise InvalidJointError(f"duplicate atom {atom!r}")
            seen.add(atom)
            prob = float(prob)
            if prob < 0.0:
                raise InvalidJointError(f"negative probability {prob!r} at {atom!r}")
            table[atom] = prob
        total = float(table.sum())
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise InvalidJointError(f"probabilities sum to {total!r}, expected 1")
        table.flags.writeable = False
        object.__setattr__(self, "alphabet_sizes", sizes)
        object.__setattr__(
            self,
            "pmf",
            MappingProxyType({tuple(int(i) for i in k): float(v) for k, v in self.pmf.items()}),
        )
        object.__setattr__(self, "_table", table)

    @classmethod
    def from_table(cls, table: np.ndarray) -> "DiscreteJoint":
        """Build from a dense probability array (zero cells are dropped)."""
        t = np.asarray(table, dtype=float)
        atoms = {
            tuple(int(i) for i in idx): float(t[idx])
            for idx in zip(*np.nonzero(t))
        }
        return cls(alphabet_sizes=t.shape, pmf=atoms)

    @property
    def num_vars(self) -> int:
        return len(self.alphabet_sizes)

    @property
    def table(self) -> np.ndarray:
        return self._table


@dataclass(frozen=True)
class MIReport:
    """Result of the summed-mutual-information check for one outcome."""

    per_var_mi: tuple[float, ...]
    per_var_leaveout_mi: tuple[float, ...]
    h_y: float
    lhs: float
    rhs: float
    satisfied: bool


def _normalize_subset(joint: DiscreteJoint, subset: Iterable[int]) -> tuple[int, ...]:
    idx = tuple(sorted({int(i) for i in subset}))
    if not idx:
        raise EmptySubsetError("variable subset is empty")
    for i in idx:
        if not 0 <= i < joint.num_vars:
            raise IndexOutOfRangeError(
                f"variable index {i} outside 0..{joint.num_vars - 1}"
            )
    return idx


def _entropy_nats(joint: DiscreteJoint, subset: tuple[int, ...]) -> float:
    """H of the marginal over ``subset``, in nats.  Zero cells contribute 0."""
    drop = tuple(i for i in range(joint.num_vars) if i not in subset)
    marg = joint.table.sum(axis=drop) if drop else joint.table
    p = marg.ravel()
    p = p[p > 0.0]
    return float(-(p * np.log(p)).sum())


def entropy(joint: DiscreteJoint, var_subset: Iterable[int], units: str = "nats") -> float:
    """Entropy of the marginal distribution over ``var_subset``."""
    return _in_units(_entropy_nats(joint, _normalize_subset(joint, var_subset)), units)


def conditional_entropy(
    joint: DiscreteJoint,
    target: Iterable[int],
    given: Iterable[int],
    units: str = "nats",
) -> float:
    """H(target | given) = H(target, given) - H(given).

    ``given`` may be empty, in which case this is the plain entropy of
    ``target``.
    """
    t = _normalize_subset(joint, target)
    g_list = tuple(sorted({int(i) for i in given}))
    for i in g_list:
        if not 0 <= i < joint.num_vars:
            raise IndexOutOfRangeError(
                f"variable index {i} outside 0..{joint.num_vars - 1}"
            )
    if set(t) & set(g_list):
        raise OverlappingSubsetsError(f"target {t!r} overlaps given {g_list!r}")
    if not g_list:
        return _in_units(_entropy_nats(joint, t), units)
    joint_h = _entropy_nats(joint, tuple(sorted(set(t) | set(g_list))))
    return _in_units(joint_h - _entropy_nats(joint, g_list), units)


def mutual_information(
    joint: DiscreteJoint,
    a: Iterable[int],
    b: Iterable[int],
    units: str = "nats",
) -> float:
    """I(a; b) = H(a) + H(b) - H(a, b); symmetric by construction."""
    sa = _normalize_subset(joint, a)
    sb = _normalize_subset(joint, b)
    if set(sa) & set(sb):
        raise OverlappingSubsetsError(f"subsets {sa!r} and {sb!r} overlap")
    nats = (
        _entropy_nats(joint, sa)
        + _entropy_nats(joint, sb)
        - _entropy_nats(joint, tuple(sorted(set(sa) | set(sb))))
    )
    return _in_units(nats, units)


def mi_piranha_check(
    joint: DiscreteJoint, outcome_index: int, units: str = "nats"
) -> MIReport:
    """Check sum_i I(X_i; y) <= H(y) + sum_i I(X_i; X_-i).

    ``outcome_index`` selects y; every other variable is an X_i, and X_-i is
    the set of explanatory variables other than X_i.  Raw (unclamped) values
    enter both sides; tiny negative mutual informations from rounding are a
    display concern, not a correctness one.
    """
    if units not in ("nats", "bits"):
        raise ValueError(f"units must be 'nats' or 'bits', got {units!r}")
    if joint.num_vars < 2:
        raise InvalidShapeError("need at least one explanatory variable and one outcome")
    y = int(outcome_index)
    if not 0 <= y < joint.num_vars:
        raise IndexOutOfRangeError(
            f"outcome index {y} outside 0..{joint.num_vars - 1}"
        )
    predictors = [i for i in range(joint.num_vars) if i != y]
    per_var = tuple(mutual_information(joint, [i], [y], "nats") for i in predictors)
    leaveout = tuple(
        mutual_information(joint, [i], [j for j in predictors if j != i], "nats")
        if len(predictors) > 1
        else 0.0
        for i in predictors
    )
    h_y = _entropy_nats(joint, (y,))
    lhs = float(sum(per_var))
    rhs = float(h_y + sum(leaveout))
    scale = 1.0 if units == "nats" else 1.0 / _LN2
    return MIReport(
        per_var_mi=tuple(v * scale for v in per_var),
        per_var_leaveout_mi=tuple(v * scale for v in leaveout),
        h_y=h_y * scale,
        lhs=lhs * scale,
        rhs=rhs * scale,
        satisfied=bool(lhs <= rhs + MI_TOLERANCE),
    )


def chain_rule_check(joint: DiscreteJoint, ordering: Iterable[int]) -> bool:
    """Verify H(all) == sum_i H(v_i | v_1..v_{i-1}) along ``ordering``.

    ``ordering`` must be a permutation of all variable indices.  True when the
    telescoped conditional entropies match the joint entropy within 1e-10.
    """
    order = [int(i) for i in ordering]
    if sorted(order) != list(range(joint.num_vars)):
        raise InvalidPermutationError(
            f"{order!r} is not a permutation of 0..{joint.num_vars - 1}"
        )
    total = 0.0
    for k, v in enumerate(order):
        total += conditional_entropy(joint, [v], order[:k])
    h_all = _entropy_nats(joint, tuple(range(joint.num_vars)))
    return abs(total - h_all) <= CHAIN_RULE_TOLERANCE


def max_independent_informative(h_y: float, alpha: float) -> int:
    """Most mutually independent variables that can each carry alpha about y.

    floor(h_y / alpha) with a 1e-12 relative nudge against float
    representation error; h_y and alpha must share units.
    """
    if alpha <= 0.0:
        raise InvalidShapeError(f"alpha must be positive, got {alpha!r}")
    if h_y < 0.0:
        raise InvalidShapeError(f"entropy must be non-negative, got {h_y!r}")
    return int(math.floor((h_y / alpha) * (1.0 + 1e-12)))
