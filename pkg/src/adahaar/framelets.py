"""Haar-type tight framelet systems on hierarchical partitions.

Every parent block with c >= 2 children contributes one generator per
unordered child pair: the signed combination of the two normalized child
indicators that integrates to zero. Together with the normalized root
indicator these form a tight frame for the span of the finest-level
indicators; when every split is binary the system is an orthonormal basis.

Functions are materialized at the finest level of the partition and all
inner products are direct measure-weighted sums.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (BadPair, BadWeights, DegenerateSpan, IndexMismatch,
                     ParseError, PartitionMismatch)
from .hierarchy import HierarchicalPartition

RANK_TOL = 1e-10


def pair_to_flat(i1: int, i2: int, m: int) -> int:
    """Rank of the pair (i1, i2), 1 <= i1 < i2 <= m, in lexicographic order.

    Bijection onto 1..m(m-1)/2; see flat_to_pair for the inverse.
    """
    if not (1 <= i1 < i2 <= m):
        raise BadPair(f"need 1 <= i1 < i2 <= m, got ({i1}, {i2}) with m={m}")
    return (2 * m - i1) * (i1 - 1) // 2 + i2 - i1


def flat_to_pair(i: int, m: int) -> tuple:
    """Inverse of pair_to_flat."""
    n = m * (m - 1) // 2
    if not (1 <= i <= n):
        raise BadPair(f"flat index {i} out of range 1..{n}")
    i1 = 1
    while (2 * m - i1) * (i1 - 1) // 2 + (m - i1) < i:
        i1 += 1
    i2 = i - (2 * m - i1) * (i1 - 1) // 2 + i1
    return i1, i2


def refinement_matrix(b) -> np.ndarray:
    """Column-orthogonal matrix coupling a parent split to its detail pairs.

    For m positive weights b summing to 1 the matrix has shape
    (1 + m(m-1)/2, m): row 0 is sqrt(b), and the row of pair (i1, i2) holds
    sqrt(b[i2]) at column i1 and -sqrt(b[i1]) at column i2. Its transpose is
    a left inverse, which is what makes the generated systems tight.
    """
    b = np.asarray(b, dtype=float)
    m = b.size
    if m < 1 or np.any(b <= 0.0):
        raise BadWeights("weights must be positive")
    if abs(b.sum() - 1.0) > 1e-12:
        raise BadWeights(f"weights sum to {b.sum()!r}, not 1")
    n = m * (m - 1) // 2
    A = np.zeros((n + 1, m))
    A[0] = np.sqrt(b)
    for i1, i2 in combinations(range(1, m + 1), 2):
        r = pair_to_flat(i1, i2, m)
        A[r, i1 - 1] = math.sqrt(b[i2 - 1])
        A[r, i2 - 1] = -math.sqrt(b[i1 - 1])
    return A


@dataclass(frozen=True, eq=False)
class PwcFunction:
    """Piecewise-constant function as values on finest-level blocks (absent = 0)."""

    partition: HierarchicalPartition
    values: dict

    def __post_init__(self):
        leaf_set = set(self.partition.leaf_ids)
        bad = [k for k in self.values if k not in leaf_set]
        if bad:
            raise ValueError(f"values keyed by non-leaf blocks: {bad[:5]}")

    def to_vector(self) -> np.ndarray:
        return np.array([self.values.get(b, 0.0) for b in self.partition.leaf_ids])

    @classmethod
    def from_vector(cls, partition, vec) -> "PwcFunction":
        return cls(partition, dict(zip(partition.leaf_ids, map(float, vec))))


def leaf_measures(partition) -> np.ndarray:
    return np.array([float(partition.blocks[b].measure) for b in partition.leaf_ids])


def inner_product(f: PwcFunction, g: PwcFunction) -> float:
    """L2 inner product: sum over leaves of f*g weighted by leaf measure."""
    if f.partition != g.partition:
        raise PartitionMismatch("functions live on different partitions")
    if len(g.values) < len(f.values):
        f, g = g, f
    blocks = f.partition.blocks
    return math.fsum(v * g.values.get(k, 0.0) * float(blocks[k].measure)
                     for k, v in f.values.items())


def norm2(f: PwcFunction) -> float:
    return math.sqrt(max(inner_product(f, f), 0.0))


@dataclass(frozen=True, eq=False)
class FrameletAtom:
    """One generator: supported on two sibling blocks, zero integral.

    l1 < l2 are 1-based positions within the parent's child list; block1 and
    block2 are the corresponding block ids.
    """

    level: int
    parent: int
    l1: int
    l2: int
    block1: int
    block2: int
    function: PwcFunction

    @property
    def key(self) -> tuple:
        return (self.level, self.parent, self.l1, self.l2)


def make_atom(partition, level, parent, l1, l2) -> FrameletAtom:
    kids = partition.children[parent]
    m = len(kids)
    if not (1 <= l1 < l2 <= m):
        raise BadPair(f"pair ({l1}, {l2}) out of range for parent {parent} with {m} children")
    b1_id, b2_id = kids[l1 - 1], kids[l2 - 1]
    pm = partition.blocks[parent].measure
    m1 = partition.blocks[b1_id].measure
    m2 = partition.blocks[b2_id].measure
    # value on a child = sqrt(sibling weight) / sqrt(child measure); the
    # ratio is an exact rational, so only the final sqrt rounds
    v1 = math.sqrt(float((m2 / pm) / m1))
    v2 = -math.sqrt(float((m1 / pm) / m2))
    values = {leaf: v1 for leaf in partition.leaves_under(b1_id)}
    values.update({leaf: v2 for leaf in partition.leaves_under(b2_id)})
    return FrameletAtom(level, parent, l1, l2, b1_id, b2_id,
                        PwcFunction(partition, values))


def build_generators(partition, parent) -> list:
    """All child-pair generators of one parent block, in flat pair order."""
    level = partition.level_of[parent]
    m = len(partition.children[parent])
    return [make_atom(partition, level, parent, l1, l2)
            for l1, l2 in combinations(range(1, m + 1), 2)]


class FrameletSystem:
    """The normalized root indicator plus generators for levels 0..depth-1.

    Immutable; `subset` derives restricted systems that share the partition
    and scaling function. Atom order is (level, parent id, pair rank), which
    fixes the coefficient indexing used for serialization.
    """

    def __init__(self, partition, depth, scaling, atoms):
        self.partition = partition
        self.depth = depth
        self.scaling = scaling
        self.atoms = tuple(atoms)
        self._matrix = None

    def __len__(self):
        return 1 + len(self.atoms)

    def functions(self):
        """The scaling function followed by every atom function."""
        yield self.scaling
        for a in self.atoms:
            yield a.function

    def counts_by_level(self) -> list:
        counts = [0] * self.depth
        for a in self.atoms:
            counts[a.level] += 1
        return counts

    def subset(self, atoms) -> "FrameletSystem":
        return FrameletSystem(self.partition, self.depth, self.scaling, atoms)

    def function_matrix(self) -> np.ndarray:
        """Row per function, column per leaf of the partition (cached)."""
        if self._matrix is None:
            self._matrix = np.vstack([f.to_vector() for f in self.functions()])
            self._matrix.setflags(write=False)
        return self._matrix

    def to_json(self) -> dict:
        return {"depth": self.depth,
                "atoms": [[a.level, a.parent, a.l1, a.l2] for a in self.atoms]}

    @classmethod
    def from_json(cls, partition, obj) -> "FrameletSystem":
        try:
            depth = int(obj["depth"])
            atoms = [make_atom(partition, int(j), int(p), int(l1), int(l2))
                     for j, p, l1, l2 in obj["atoms"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed system JSON: {exc}") from exc
        return cls(partition, depth, scaling_function(partition), atoms)


def scaling_function(partition) -> PwcFunction:
    v = 1.0 / math.sqrt(float(partition.measure))
    return PwcFunction(partition, {leaf: v for leaf in partition.leaf_ids})


def build_system(partition, depth=None) -> FrameletSystem:
    """Cut-off framelet system on the partition, generators for levels < depth."""
    if depth is None:
        depth = partition.depth
    if depth > partition.depth:
        raise ValueError(f"system depth {depth} exceeds partition depth {partition.depth}")
    atoms = []
    for j in range(depth):
        for parent in partition.levels[j]:
            atoms.extend(build_generators(partition, parent))
    return FrameletSystem(partition, depth, scaling_function(partition), atoms)


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Analysis coefficients: scaling coefficient plus one value per atom."""

    system: FrameletSystem
    c0: float
    coefficients: np.ndarray

    def __post_init__(self):
        if self.coefficients.shape != (len(self.system.atoms),):
            raise IndexMismatch("coefficient count does not match the system")

    def energy(self) -> float:
        return self.c0 ** 2 + float(np.dot(self.coefficients, self.coefficients))


def analyze(system: FrameletSystem, f: PwcFunction) -> CoefficientVector:
    """Inner products of f against every system function."""
    if f.partition != system.partition:
        raise PartitionMismatch("signal lives on a different partition")
    weighted = system.function_matrix() * leaf_measures(system.partition)
    c = weighted @ f.to_vector()
    return CoefficientVector(system, float(c[0]), c[1:])


def synthesize(system: FrameletSystem, cv: CoefficientVector) -> PwcFunction:
    """Coefficient-weighted sum of the system functions."""
    if cv.system is not system and cv.system.to_json() != system.to_json():
        raise IndexMismatch("coefficients indexed by a different system")
    if cv.coefficients.shape != (len(system.atoms),):
        raise IndexMismatch("coefficient count does not match the system")
    vec = np.concatenate(([cv.c0], cv.coefficients)) @ system.function_matrix()
    return PwcFunction.from_vector(system.partition, vec)


def gram_matrix(system: FrameletSystem) -> np.ndarray:
    """Pairwise inner products of all system functions (scaling first)."""
    F = system.function_matrix()
    mu = leaf_measures(system.partition)
    return (F * mu) @ F.T


def frame_bounds(functions, space) -> tuple:
    """Extreme eigenvalues of the frame operator restricted to span(space).

    `functions` and `space` are PwcFunctions on one partition. The span
    basis is whitened through its Gram matrix first; a numerically rank
    deficient basis raises DegenerateSpan. Both bounds equal 1 exactly when
    the functions form a tight frame for the span.
    """
    if not functions or not space:
        raise ValueError("need non-empty function and span lists")
    part = space[0].partition
    for g in list(functions) + list(space):
        if g.partition != part:
            raise PartitionMismatch("all functions must share one partition")
    mu = leaf_measures(part)
    S = np.vstack([g.to_vector() for g in space])
    F = np.vstack([f.to_vector() for f in functions])
    G = (S * mu) @ S.T
    w, U = np.linalg.eigh(G)
    if w[-1] <= 0 or w[0] < RANK_TOL * w[-1]:
        raise DegenerateSpan("span basis is numerically rank deficient")
    onb = (U / np.sqrt(w)).T @ S          # rows: orthonormal basis of the span
    T = (F * mu) @ onb.T                  # projections of each function
    ev = np.linalg.eigvalsh(T.T @ T)
    return float(ev[0]), float(ev[-1])


def coefficients_to_csv(cv: CoefficientVector, fh) -> None:
    """Rows (level, parent, l1, l2, value); the scaling row is (-1, 0, 0, 0, c0)."""
    w = csv.writer(fh)
    w.writerow(["level", "parent", "l1", "l2", "value"])
    w.writerow([-1, 0, 0, 0, "%.17g" % cv.c0])
    for a, c in zip(cv.system.atoms, cv.coefficients):
        w.writerow([a.level, a.parent, a.l1, a.l2, "%.17g" % c])


def coefficients_from_csv(system: FrameletSystem, fh) -> CoefficientVector:
    rows = [r for r in csv.reader(fh) if r]
    if rows and rows[0][0] == "level":
        rows = rows[1:]
    got = {}
    c0 = 0.0
    for lvl, parent, l1, l2, value in rows:
        key = (int(lvl), int(parent), int(l1), int(l2))
        if key[0] == -1:
            c0 = float(value)
        else:
            got[key] = float(value)
    keys = [a.key for a in system.atoms]
    if set(got) != set(keys):
        raise IndexMismatch("coefficient rows do not match the system's atoms")
    return CoefficientVector(system, c0, np.array([got[k] for k in keys]))
