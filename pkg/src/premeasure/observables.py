"""Discrete observables as spectral forms and the coarsening calculus.

A spectral form is a list of pairwise-distinct eigenvalues with orthogonal
eigenprojectors summing to the identity. Eigenvalues are carried for
reporting but all verification logic is index-based: only the projectors
and their common index matter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qlin
from .tolerances import GROUPING_TOL, TOL_OP


@dataclass(frozen=True)
class SpectralForm:
    """A discrete observable: distinct eigenvalues with eigenprojectors."""

    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]
    dim: int

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for value, proj in zip(self.eigenvalues, self.projectors):
            m += value * proj
        return m

    def ranks(self) -> tuple[int, ...]:
        return tuple(int(round(np.trace(p).real)) for p in self.projectors)


def make_spectral_form(eigenvalues, projectors,
                       grouping_tol: float = GROUPING_TOL) -> SpectralForm:
    """Validate and build a SpectralForm.

    Rejects repeated eigenvalues, non-projector entries, non-orthogonal
    pairs, and incomplete families (sum != identity).
    """
    eigenvalues = tuple(float(v) for v in eigenvalues)
    projectors = tuple(qlin.as_op(p) for p in projectors)
    if len(eigenvalues) != len(projectors):
        raise ValueError("eigenvalues and projectors must have equal length")
    if not projectors:
        raise ValueError("a spectral form needs at least one projector")
    dim = projectors[0].shape[0]
    for i, a in enumerate(eigenvalues):
        for j in range(i):
            if abs(a - eigenvalues[j]) <= grouping_tol:
                raise ValueError(f"duplicate eigenvalue at indices ({j}, {i})")
    total = np.zeros((dim, dim), dtype=complex)
    for i, p in enumerate(projectors):
        if p.shape[0] != dim:
            raise ValueError("all projectors must share one dimension")
        if not qlin.is_projector(p):
            residual = np.linalg.norm(p @ p - p, 2)
            raise ValueError(f"entry {i} is not a projector (residual {residual:.2e})")
        total += p
    for i in range(len(projectors)):
        for j in range(i):
            cross = np.linalg.norm(projectors[i] @ projectors[j], 2)
            if cross > TOL_OP:
                raise ValueError(
                    f"projectors {j} and {i} are not orthogonal (residual {cross:.2e})")
    completeness = np.linalg.norm(total - np.eye(dim), 2)
    if completeness > TOL_OP:
        raise ValueError(f"projectors do not sum to identity (residual {completeness:.2e})")
    return SpectralForm(eigenvalues, projectors, dim)


def spectral_decompose(h: np.ndarray, grouping_tol: float = GROUPING_TOL) -> SpectralForm:
    """Unique spectral form of a Hermitian matrix.

    Eigenvalues closer than grouping_tol are merged into one degenerate
    eigenvalue; gaps inside (TOL_OP, grouping_tol) are rejected as
    ill-conditioned because the grouping would be arbitrary.
    """
    h = qlin.as_op(h)
    if not qlin.is_hermitian(h):
        raise ValueError("input is not Hermitian")
    values, vectors = np.linalg.eigh(h)
    groups: list[list[int]] = [[0]]
    for i in range(1, len(values)):
        gap = values[i] - values[i - 1]
        if TOL_OP < gap <= grouping_tol:
            raise ValueError("an eigenvalue gap falls between the noise floor and "
                             "the grouping tolerance; grouping would be ill-conditioned")
        if gap <= grouping_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    eigenvalues = []
    projectors = []
    for group in groups:
        eigenvalues.append(float(np.mean(values[group])))
        p = np.zeros_like(h)
        for i in group:
            v = vectors[:, i]
            p += np.outer(v, v.conj())
        projectors.append(p)
    return make_spectral_form(eigenvalues, projectors, grouping_tol=grouping_tol)


@dataclass(frozen=True)
class IndexFunction:
    """Extensional index map k -> l with the target eigenvalues.

    mapping[k] = l; target indices must cover 0..max contiguously and
    target_values must be pairwise distinct.
    """

    mapping: tuple[int, ...]
    target_values: tuple[float, ...]

    def __post_init__(self):
        targets = set(self.mapping)
        if targets != set(range(len(self.target_values))):
            raise ValueError("target indices must be contiguous from 0 and "
                             "match the supplied target values")
        if len(set(self.target_values)) != len(self.target_values):
            raise ValueError("target values must be pairwise distinct")

    def preimage(self, l: int) -> list[int]:
        return [k for k, v in enumerate(self.mapping) if v == l]

    def compose(self, g: "IndexFunction") -> "IndexFunction":
        """g after self: k -> g(self(k))."""
        return IndexFunction(tuple(g.mapping[l] for l in self.mapping), g.target_values)


def _merge_projectors(o: SpectralForm, f: IndexFunction) -> list[np.ndarray]:
    if len(f.mapping) != len(o):
        raise ValueError("index function is not total on the observable's index set")
    merged = []
    for l in range(len(f.target_values)):
        p = np.zeros((o.dim, o.dim), dtype=complex)
        for k in f.preimage(l):
            p += o.projectors[k]
        merged.append(p)
    return merged


def apply_function(o: SpectralForm, f: IndexFunction) -> SpectralForm:
    """The coarser observable obtained by merging eigenprojectors under f."""
    return make_spectral_form(f.target_values, _merge_projectors(o, f))


def coarsen_pointer(p: SpectralForm, f: IndexFunction, target_values) -> SpectralForm:
    """Merge pointer positions under f, with freely chosen position values."""
    target_values = tuple(float(v) for v in target_values)
    if len(target_values) != len(f.target_values):
        raise ValueError("one target value per merged position is required")
    return make_spectral_form(target_values, _merge_projectors(p, f))
