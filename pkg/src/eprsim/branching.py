"""Measurement as unitary branching over observer memory registers.

A measurement never collapses anything: it splits each branch of the
global state into one sub-branch per outcome, appends the outcome to the
measuring observer's register, and leaves every other particle and every
other register untouched. Branch amplitudes multiply down the tree, so
the amplitude attached to a full record history equals the overlap
product that the closed-form pair analysis computes directly.

States are stored branch-wise. Within a branch the particles are
partitioned into blocks: particles that were prepared jointly share one
joint ket until a measurement factorizes them, after which the measured
particle sits alone in an exact basis column. Relative kets left behind
by a partial measurement are normalized and put in a canonical phase
gauge (largest-modulus entry real positive), with the removed factor
absorbed into the branch amplitude; the physical content is unchanged
and equal branches get equal representations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import (
    ConsistencyError,
    DimensionError,
    NormalizationError,
    SlotError,
)

STATE_TOL = 1e-12
DEFAULT_PRUNE_TOL = 1e-14

Register = tuple["OutcomeLabel", ...]
Block = tuple[tuple[int, ...], np.ndarray]


@dataclass(frozen=True)
class OutcomeLabel:
    """One memory record: which observable was measured, which outcome."""

    observable_id: int
    index: int


@dataclass(frozen=True, eq=False)
class ObservableBasis:
    """Measurement basis as a unitary overlap matrix with the reference basis.

    Column ``j`` of ``matrix`` is eigenket ``j`` written in the reference
    basis, i.e. ``matrix[i, j]`` is the overlap of reference ket ``i``
    with basis ket ``j``. Identity is by ``basis_id`` alone: a basis
    rebuilt with the same id is the same observable.
    """

    basis_id: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = linalg.as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"basis matrix must be square, got {m.shape}")
        linalg.require_unitary(m, name=f"basis {self.basis_id}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def ket(self, index: int) -> np.ndarray:
        if not 0 <= index < self.dim:
            raise IndexError(f"outcome index {index} out of range for dim {self.dim}")
        return self.matrix[:, index].copy()

    def __eq__(self, other: object):
        if not isinstance(other, ObservableBasis):
            return NotImplemented
        return self.basis_id == other.basis_id

    def __hash__(self) -> int:
        return hash(self.basis_id)


def identity_basis(dim: int, basis_id: int = 0) -> ObservableBasis:
    """The reference basis itself, by convention observable id 0."""
    return ObservableBasis(basis_id, np.eye(dim, dtype=np.complex128))


@dataclass(frozen=True)
class Branch:
    """One branch: amplitude, particle blocks, one register per observer.

    ``blocks`` partition the particle slots; each entry pairs the slot
    tuple (ascending) with a normalized ket over those slots, indexed
    row-major in slot order.
    """

    amplitude: complex
    blocks: tuple[Block, ...]
    registers: tuple[Register, ...]

    def __post_init__(self) -> None:
        amp = complex(self.amplitude)
        if not np.isfinite([amp.real, amp.imag]).all():
            raise ValueError("branch amplitude must be finite")
        object.__setattr__(self, "amplitude", amp)
        frozen = []
        for slots, ket in self.blocks:
            ket = linalg.as_ket(ket)
            if not linalg.is_normalized(ket, tol=STATE_TOL):
                raise NormalizationError(
                    f"block {slots} ket has norm {linalg.norm(ket)!r}, expected 1"
                )
            ket = ket.copy()
            ket.flags.writeable = False
            frozen.append((tuple(int(s) for s in slots), ket))
        object.__setattr__(self, "blocks", tuple(frozen))
        object.__setattr__(
            self, "registers", tuple(tuple(r) for r in self.registers)
        )

    @property
    def weight(self) -> float:
        return abs(self.amplitude) ** 2

    def block_containing(self, slot: int) -> tuple[int, int]:
        """Index of the block holding ``slot`` and the slot's axis within it."""
        for bi, (slots, _) in enumerate(self.blocks):
            if slot in slots:
                return bi, slots.index(slot)
        raise SlotError(f"no block contains particle slot {slot}")

    def state_vector(self, dims: Sequence[int]) -> np.ndarray:
        """Full joint ket over all slots, row-major in ascending slot order."""
        vec = np.ones(1, dtype=np.complex128)
        order: list[int] = []
        for slots, ket in self.blocks:
            vec = np.kron(vec, ket)
            order.extend(slots)
        axes = np.argsort(order)
        shaped = vec.reshape([dims[s] for s in order])
        return np.transpose(shaped, axes).reshape(-1)


@dataclass(frozen=True)
class BranchedState:
    """The global state: particle dimensions, observers, branches.

    Branch weights must sum to 1 and no two branches may carry the same
    register history; coherent duplicates are merged by the operations
    that can create them.
    """

    dims: tuple[int, ...]
    observer_count: int
    branches: tuple[Branch, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"particle dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)
        if self.observer_count < 0:
            raise ValueError("observer count must be nonnegative")
        all_slots = set(range(len(dims)))
        seen: set[tuple[Register, ...]] = set()
        for br in self.branches:
            if len(br.registers) != self.observer_count:
                raise ValueError(
                    f"branch has {len(br.registers)} registers, "
                    f"expected {self.observer_count}"
                )
            covered: list[int] = []
            for slots, ket in br.blocks:
                covered.extend(slots)
                want = int(np.prod([dims[s] for s in slots]))
                if ket.size != want:
                    raise DimensionError(
                        f"block {slots} ket has size {ket.size}, expected {want}"
                    )
            if sorted(covered) != sorted(all_slots):
                raise SlotError(
                    f"branch blocks cover slots {sorted(covered)}, "
                    f"expected {sorted(all_slots)}"
                )
            if br.registers in seen:
                raise ValueError(
                    f"duplicate register history {br.registers}; "
                    "coherent duplicates must be merged"
                )
            seen.add(br.registers)
        total = self.total_weight()
        if abs(total - 1.0) > STATE_TOL:
            raise NormalizationError(
                f"branch weights sum to {total!r}, expected 1 within {STATE_TOL}"
            )

    def total_weight(self) -> float:
        return float(sum(br.weight for br in self.branches))

    def amplitude_table(self) -> dict[tuple[Register, ...], complex]:
        """Map from register history to branch amplitude."""
        return {br.registers: br.amplitude for br in self.branches}


def initial_state(
    particle_kets: Iterable[np.ndarray], observer_count: int
) -> BranchedState:
    """Product state of independent particles with empty observer registers."""
    kets = [linalg.as_ket(k) for k in particle_kets]
    if not kets:
        raise DimensionError("need at least one particle")
    for i, ket in enumerate(kets):
        if not linalg.is_normalized(ket, tol=STATE_TOL):
            raise NormalizationError(f"particle {i} ket is not normalized")
    dims = tuple(k.size for k in kets)
    blocks = tuple(((i,), ket) for i, ket in enumerate(kets))
    branch = Branch(1.0 + 0.0j, blocks, ((),) * observer_count)
    return BranchedState(dims, int(observer_count), (branch,))


def from_coefficients(coeffs, observer_count: int = 2) -> BranchedState:
    """Two-particle entangled state from a coefficient matrix.

    ``coeffs[i, j]`` multiplies reference product ket ``|i>|j>``; the
    squared magnitudes must sum to 1. Accepts a raw matrix or any object
    with a ``matrix`` attribute.
    """
    m = linalg.as_matrix(getattr(coeffs, "matrix", coeffs))
    total = float(np.sum(np.abs(m) ** 2))
    if abs(total - 1.0) > STATE_TOL:
        raise NormalizationError(
            f"coefficient magnitudes sum to {total!r}, expected 1"
        )
    d1, d2 = m.shape
    joint = m.reshape(-1)  # row-major matches the (i, j) -> i*d2 + j layout
    branch = Branch(1.0 + 0.0j, (((0, 1), joint),), ((),) * observer_count)
    return BranchedState((d1, d2), int(observer_count), (branch,))


def measure(
    state: BranchedState,
    particle: int,
    observer: int,
    basis: ObservableBasis,
    prune_tol: float = DEFAULT_PRUNE_TOL,
) -> BranchedState:
    """Measure one particle for one observer; split every branch.

    Each branch yields one sub-branch per outcome whose amplitude is the
    parent amplitude times the component of the branch's ket along the
    outcome ket. The measured slot is left in the exact basis column, the
    outcome is appended to the observer's register, and all other slots
    and registers are carried over unchanged. Sub-branches of modulus
    below ``prune_tol`` are dropped; branches that end up with identical
    registers are merged coherently.
    """
    if not 0 <= particle < len(state.dims):
        raise SlotError(f"particle slot {particle} out of range")
    if not 0 <= observer < state.observer_count:
        raise SlotError(f"observer slot {observer} out of range")
    dim = state.dims[particle]
    if basis.dim != dim:
        raise DimensionError(
            f"basis dimension {basis.dim} does not match particle dimension {dim}"
        )
    mh = basis.matrix.conj().T

    children: list[Branch] = []
    for br in state.branches:
        bi, axis = br.block_containing(particle)
        slots, ket = br.blocks[bi]
        if len(slots) == 1:
            comps = mh @ ket
            for out in range(dim):
                amp = br.amplitude * comps[out]
                if abs(amp) < prune_tol:
                    continue
                blocks = list(br.blocks)
                blocks[bi] = ((particle,), basis.ket(out))
                children.append(
                    Branch(
                        amp,
                        tuple(blocks),
                        _record(br.registers, observer, basis.basis_id, out),
                    )
                )
        else:
            block_dims = [state.dims[s] for s in slots]
            rows = np.moveaxis(ket.reshape(block_dims), axis, 0).reshape(dim, -1)
            rel = mh @ rows  # rel[out] is the unnormalized relative ket
            rest_slots = tuple(s for s in slots if s != particle)
            for out in range(dim):
                rest = rel[out]
                rnorm = float(np.linalg.norm(rest))
                if abs(br.amplitude) * rnorm < prune_tol:
                    continue
                factor = _gauge_factor(rest, rnorm)
                blocks = list(br.blocks)
                blocks[bi] = ((particle,), basis.ket(out))
                blocks.insert(bi + 1, (rest_slots, rest / factor))
                blocks.sort(key=lambda b: b[0][0])
                children.append(
                    Branch(
                        br.amplitude * factor,
                        tuple(blocks),
                        _record(br.registers, observer, basis.basis_id, out),
                    )
                )
    merged = _merge(children, state.dims, prune_tol)
    return BranchedState(state.dims, state.observer_count, merged)


def remeasure_consistency(
    state: BranchedState,
    particle: int,
    observer: int,
    basis: ObservableBasis,
    prune_tol: float = DEFAULT_PRUNE_TOL,
) -> BranchedState:
    """Repeat a measurement and verify the records cannot disagree.

    Requires that ``particle`` already holds a definite value of
    ``basis`` in every branch (it was measured in this basis before).
    After the repeat, the branch count is unchanged, each branch keeps
    its amplitude modulus, and whenever the observer's latest record was
    already for this observable the new record duplicates it exactly.
    Any violation raises ConsistencyError.
    """
    if not 0 <= particle < len(state.dims):
        raise SlotError(f"particle slot {particle} out of range")
    mh = basis.matrix.conj().T
    definite: dict[tuple[Register, ...], int] = {}
    for br in state.branches:
        bi, _ = br.block_containing(particle)
        slots, ket = br.blocks[bi]
        outcome = -1
        if len(slots) == 1:
            comps = np.abs(mh @ ket)
            best = int(np.argmax(comps))
            if comps[best] >= 1.0 - linalg.UNITARY_TOL:
                outcome = best
        if outcome < 0:
            raise ConsistencyError(
                f"particle {particle} has no definite value of basis "
                f"{basis.basis_id} in branch {br.registers}"
            )
        definite[br.registers] = outcome

    result = measure(state, particle, observer, basis, prune_tol=prune_tol)
    if len(result.branches) != len(state.branches):
        raise ConsistencyError(
            f"repeat measurement changed the branch count from "
            f"{len(state.branches)} to {len(result.branches)}"
        )
    parents = state.amplitude_table()
    for br in result.branches:
        reg = br.registers[observer]
        if not reg:
            raise ConsistencyError("repeat measurement recorded nothing")
        parent_regs = list(br.registers)
        parent_regs[observer] = reg[:-1]
        key = tuple(parent_regs)
        if key not in parents:
            raise ConsistencyError(
                f"repeat measurement produced an unexpected history {br.registers}"
            )
        if abs(abs(br.amplitude) - abs(parents[key])) > STATE_TOL:
            raise ConsistencyError(
                "repeat measurement changed a branch amplitude modulus"
            )
        if reg[-1].index != definite[key]:
            raise ConsistencyError(
                f"repeat measurement recorded outcome {reg[-1].index}, "
                f"expected {definite[key]}"
            )
        prior = reg[:-1]
        if prior and prior[-1].observable_id == basis.basis_id:
            if prior[-1] != reg[-1]:
                raise ConsistencyError(
                    f"observer {observer} recorded {prior[-1]} then {reg[-1]} "
                    "for the same observable"
                )
    return result


def coherent_combine(
    terms: Sequence[tuple[complex, BranchedState]],
    prune_tol: float = DEFAULT_PRUNE_TOL,
) -> BranchedState:
    """Coherent superposition of branched states with given weights.

    Branches with identical register histories are merged by summing
    amplitudes (same blocks) or by adding full joint kets (different
    blocks). The weights must leave the result normalized.
    """
    if not terms:
        raise ValueError("need at least one term")
    dims = terms[0][1].dims
    observer_count = terms[0][1].observer_count
    children: list[Branch] = []
    for weight, st in terms:
        if st.dims != dims or st.observer_count != observer_count:
            raise DimensionError("all terms must share dims and observer count")
        for br in st.branches:
            children.append(Branch(weight * br.amplitude, br.blocks, br.registers))
    merged = _merge(children, dims, prune_tol)
    return BranchedState(dims, observer_count, merged)


def _record(
    registers: tuple[Register, ...], observer: int, observable_id: int, index: int
) -> tuple[Register, ...]:
    updated = list(registers)
    updated[observer] = updated[observer] + (OutcomeLabel(observable_id, index),)
    return tuple(updated)


def _gauge_factor(vec: np.ndarray, vnorm: float) -> complex:
    # Canonical gauge: divide out the phase of the largest-modulus entry,
    # so the stored relative ket has that entry real positive.
    lead = vec[int(np.argmax(np.abs(vec)))]
    return vnorm * (lead / abs(lead))


def _merge(
    children: list[Branch], dims: tuple[int, ...], prune_tol: float
) -> tuple[Branch, ...]:
    groups: dict[tuple[Register, ...], list[Branch]] = {}
    for br in children:
        groups.setdefault(br.registers, []).append(br)
    out: list[Branch] = []
    for registers, group in groups.items():
        if len(group) == 1:
            out.append(group[0])
            continue
        first = group[0]
        same_partition = all(
            [s for s, _ in br.blocks] == [s for s, _ in first.blocks]
            for br in group[1:]
        )
        if same_partition:
            differing = [
                bi
                for bi in range(len(first.blocks))
                if any(
                    not np.allclose(
                        br.blocks[bi][1], first.blocks[bi][1], rtol=0.0, atol=STATE_TOL
                    )
                    for br in group[1:]
                )
            ]
            if not differing:
                amp = sum(br.amplitude for br in group)
                if abs(amp) < prune_tol:
                    continue
                out.append(Branch(amp, first.blocks, registers))
                continue
            if len(differing) == 1:
                # the group is a coherent sum within one block: combine that
                # block's kets and gauge it exactly as measure() would, so
                # amplitudes stay comparable with the unmerged route
                t = differing[0]
                combined = np.zeros_like(first.blocks[t][1])
                for br in group:
                    combined = combined + br.amplitude * br.blocks[t][1]
                cnorm = float(np.linalg.norm(combined))
                if cnorm < prune_tol:
                    continue
                factor = _gauge_factor(combined, cnorm)
                blocks = list(first.blocks)
                blocks[t] = (first.blocks[t][0], combined / factor)
                out.append(Branch(factor, tuple(blocks), registers))
                continue
        vec = np.zeros(int(np.prod(dims)), dtype=np.complex128)
        for br in group:
            vec += br.amplitude * br.state_vector(dims)
        vnorm = float(np.linalg.norm(vec))
        if vnorm < prune_tol:
            continue
        factor = _gauge_factor(vec, vnorm)
        all_slots = tuple(range(len(dims)))
        out.append(Branch(factor, ((all_slots, vec / factor),), registers))
    return tuple(out)
