"""Sparse Fock-space states over labeled bosonic modes.

States are dictionaries mapping occupation tuples to complex amplitudes.
Everything here is exact up to float arithmetic: no sampling, no cutoff
tricks beyond an explicit total-photon-number truncation that callers set
when they build a state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

PRUNE_EPS = 1e-15
NORM_TOL = 1e-12


class ModeLabel(NamedTuple):
    """One bosonic mode: spatial arm, polarization, optional wavepacket tag.

    pol is "H" or "V" (or "+"/"-" after an analyzer rewrites the basis).
    tag distinguishes wavepackets that never interfere with each other,
    e.g. extraordinary/ordinary cone labels or per-source marks.
    """

    arm: int
    pol: str
    tag: str = ""


@dataclass(frozen=True)
class ModeRegistry:
    """Ordered set of modes. Construction order is the canonical order."""

    labels: tuple[ModeLabel, ...]
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        idx = {}
        for i, lab in enumerate(self.labels):
            if lab in idx:
                raise ValueError(f"duplicate mode label {lab}")
            idx[lab] = i
        object.__setattr__(self, "_index", idx)

    def index(self, label: ModeLabel) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"mode {label} not in registry") from None

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[ModeLabel]:
        return iter(self.labels)

    def __contains__(self, label: ModeLabel) -> bool:
        return label in self._index


def registry_from(labels) -> ModeRegistry:
    return ModeRegistry(tuple(labels))


@dataclass(frozen=True)
class AmplitudeState:
    """Superposition over occupation-number basis states of a registry.

    terms maps occupation tuples (one int per registry mode) to complex
    amplitudes. States are value objects: every operation returns a new
    instance. Amplitudes below PRUNE_EPS in magnitude are dropped.

    truncation_order caps the total photon number; creation operators
    silently drop any component that would exceed it. This is how the
    perturbative pair-source expansion is kept finite.
    """

    registry: ModeRegistry
    terms: dict
    truncation_order: int

    def __post_init__(self):
        nmodes = len(self.registry)
        for occ in self.terms:
            if len(occ) != nmodes:
                raise ValueError("occupation length does not match registry")

    # ---- Norms and inner products ----

    def norm_sq(self) -> float:
        return sum((a * a.conjugate()).real for a in self.terms.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def inner(self, other: "AmplitudeState") -> complex:
        """<self|other>. Conjugates self's amplitudes."""
        if self.registry is not other.registry and self.registry != other.registry:
            raise ValueError("inner product requires a shared registry")
        if len(self.terms) > len(other.terms):
            return other.inner(self).conjugate()
        total = 0j
        for occ, a in self.terms.items():
            b = other.terms.get(occ)
            if b is not None:
                total += a.conjugate() * b
        return total

    def normalized(self) -> "AmplitudeState":
        n = self.norm()
        if n < NORM_TOL:
            raise ValueError("cannot normalize a (near-)zero state")
        return self.scaled(1.0 / n)

    # ---- Algebra ----

    def scaled(self, c: complex) -> "AmplitudeState":
        if c == 0:
            return AmplitudeState(self.registry, {}, self.truncation_order)
        return AmplitudeState(
            self.registry,
            _pruned({occ: c * a for occ, a in self.terms.items()}),
            self.truncation_order,
        )

    def plus(self, other: "AmplitudeState") -> "AmplitudeState":
        if self.registry != other.registry:
            raise ValueError("cannot add states over different registries")
        out = dict(self.terms)
        for occ, a in other.terms.items():
            out[occ] = out.get(occ, 0j) + a
        return AmplitudeState(
            self.registry, _pruned(out), min(self.truncation_order, other.truncation_order)
        )

    def __mul__(self, c) -> "AmplitudeState":
        return self.scaled(c)

    __rmul__ = __mul__

    def __add__(self, other) -> "AmplitudeState":
        return self.plus(other)

    # ---- Occupation structure ----

    def total_photons(self) -> int:
        """Max total photon number over terms (0 for vacuum or empty)."""
        return max((sum(occ) for occ in self.terms), default=0)

    def occupied_mode_indices(self) -> set:
        out = set()
        for occ in self.terms:
            for i, n in enumerate(occ):
                if n:
                    out.add(i)
        return out

    def photon_number_sectors(self) -> dict:
        """Split terms by total photon number: {n: AmplitudeState}."""
        buckets: dict = {}
        for occ, a in self.terms.items():
            buckets.setdefault(sum(occ), {})[occ] = a
        return {
            n: AmplitudeState(self.registry, t, self.truncation_order)
            for n, t in sorted(buckets.items())
        }


def _pruned(terms: dict) -> dict:
    return {occ: a for occ, a in terms.items() if abs(a) > PRUNE_EPS}


def vacuum(registry: ModeRegistry, truncation_order: int) -> AmplitudeState:
    return AmplitudeState(registry, {(0,) * len(registry): 1.0 + 0j}, truncation_order)


def apply_creation(
    state: AmplitudeState, label: ModeLabel, coeff: complex = 1.0
) -> AmplitudeState:
    """Apply coeff times the creation operator for one mode.

    Each term picks up coeff * sqrt(n+1) where n is the mode's occupation
    before the photon is added. Terms that would exceed the state's
    truncation order are dropped, not raised: the truncation defines the
    working subspace.
    """
    i = state.registry.index(label)
    out: dict = {}
    for occ, a in state.terms.items():
        if sum(occ) + 1 > state.truncation_order:
            continue
        n = occ[i]
        new_occ = occ[:i] + (n + 1,) + occ[i + 1 :]
        out[new_occ] = out.get(new_occ, 0j) + a * coeff * math.sqrt(n + 1)
    return AmplitudeState(state.registry, _pruned(out), state.truncation_order)


def apply_pair_creation(
    state: AmplitudeState, first: ModeLabel, second: ModeLabel, coeff: complex = 1.0
) -> AmplitudeState:
    """Two creations at once; reads better in pair-source code."""
    return apply_creation(apply_creation(state, first), second, coeff)


def inner_product(a: AmplitudeState, b: AmplitudeState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    return a.inner(b)


def tensor_product(
    a: AmplitudeState, b: AmplitudeState, truncation: int | None = None
) -> AmplitudeState:
    """Combine states over disjoint registries into one over both.

    The combined registry lists a's modes then b's; amplitudes multiply.
    Truncation defaults to the sum of the two budgets; pass a smaller cap
    to drop high-photon-number cross terms.
    """
    shared = set(a.registry.labels) & set(b.registry.labels)
    if shared:
        raise ValueError(f"registries overlap on {sorted(shared)[:3]}")
    combined = ModeRegistry(a.registry.labels + b.registry.labels)
    trunc = a.truncation_order + b.truncation_order
    if truncation is not None:
        trunc = min(trunc, truncation)
    out: dict = {}
    for occ_a, amp_a in a.terms.items():
        base = sum(occ_a)
        if base > trunc:
            continue
        for occ_b, amp_b in b.terms.items():
            if base + sum(occ_b) > trunc:
                continue
            out[occ_a + occ_b] = amp_a * amp_b
    return AmplitudeState(combined, _pruned(out), trunc)


def product_state(a: AmplitudeState, b: AmplitudeState) -> AmplitudeState:
    """Combine two independent states living on disjoint modes of one registry.

    Occupations add and amplitudes multiply. Only valid when the two states
    never populate the same mode; that is checked once per call.
    """
    if a.registry != b.registry:
        raise ValueError("product_state requires a shared registry")
    if a.occupied_mode_indices() & b.occupied_mode_indices():
        raise ValueError("product_state inputs overlap in mode support")
    trunc = min(a.truncation_order, b.truncation_order)
    out: dict = {}
    for occ_a, amp_a in a.terms.items():
        for occ_b, amp_b in b.terms.items():
            tot = 0
            merged = []
            for x, y in zip(occ_a, occ_b):
                n = x + y
                tot += n
                merged.append(n)
            if tot > trunc:
                continue
            key = tuple(merged)
            out[key] = out.get(key, 0j) + amp_a * amp_b
    return AmplitudeState(a.registry, _pruned(out), trunc)


def map_modes(
    state: AmplitudeState, new_registry: ModeRegistry, relabel
) -> AmplitudeState:
    """Re-express a state in another registry via a label mapping.

    relabel is a callable ModeLabel -> ModeLabel. Every occupied mode must
    map to a distinct mode of the new registry; amplitudes are untouched,
    so this is a pure renaming (norms are preserved).
    """
    src = state.registry
    dest_index = [None] * len(src)
    for i, lab in enumerate(src):
        target = relabel(lab)
        if target is not None:
            dest_index[i] = new_registry.index(target)
    seen = [d for d in dest_index if d is not None]
    if len(set(seen)) != len(seen):
        raise ValueError("relabeling collapses two modes onto one")
    width = len(new_registry)
    out: dict = {}
    for occ, a in state.terms.items():
        new_occ = [0] * width
        for i, n in enumerate(occ):
            if not n:
                continue
            d = dest_index[i]
            if d is None:
                raise ValueError(f"occupied mode {src.labels[i]} has no target")
            new_occ[d] = n
        key = tuple(new_occ)
        out[key] = out.get(key, 0j) + a
    return AmplitudeState(new_registry, out, state.truncation_order)


# ---- Serialization ----


def state_to_lines(state: AmplitudeState) -> list:
    """One line per term: comma-separated occupations, then Re and Im.

    repr() keeps floats exact through a round trip.
    """
    lines = []
    for occ in sorted(state.terms):
        a = complex(state.terms[occ])
        parts = [str(n) for n in occ] + [repr(a.real), repr(a.imag)]
        lines.append(",".join(parts))
    return lines


def state_from_lines(
    lines, registry: ModeRegistry, truncation_order: int
) -> AmplitudeState:
    nmodes = len(registry)
    terms: dict = {}
    for raw in lines:
        raw = raw.strip()
        if not raw:
            continue
        parts = raw.split(",")
        if len(parts) != nmodes + 2:
            raise ValueError(f"bad state line (expected {nmodes}+2 fields): {raw!r}")
        occ = tuple(int(p) for p in parts[:nmodes])
        terms[occ] = complex(float(parts[-2]), float(parts[-1]))
    return AmplitudeState(registry, terms, truncation_order)
