# Filename: diracgap/assembly.py
"""Galerkin pencil (H, S) of the kappa = -1 radial Dirac operator

    H = [[1 + V, D+], [D-, -1 + V]]

over a two-component basis. Entries are real; H is symmetrized and the defect kept.
"""
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import AssemblyError, DomainError
from .models import PotentialSpec
from .radial import apply_d_minus, apply_d_plus, inner

if TYPE_CHECKING:
    from .basis import BasisSet, BasisVector

logger = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-9


@dataclass(frozen=True)
class Pencil:
    h: np.ndarray
    s: np.ndarray
    labels: tuple[str, ...]
    potential: PotentialSpec
    hermiticity_defect: float = 0.0
    vectors: tuple = field(default=(), repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @property
    def h_max(self) -> float:
        return float(np.max(np.abs(self.h))) if self.h.size else 0.0


class _Operands:
    """Per-vector derived data, computed once: D- u, and D+ v when v is plain."""

    def __init__(self, vec: "BasisVector"):
        self.u = vec.upper
        self.v = vec.lower
        self.d_minus_u = apply_d_minus(self.u) if not self.u.is_zero else self.u
        self.v_weighted = self.v.rational_weight
        self.d_plus_v = apply_d_plus(self.v) if not (self.v.is_zero or self.v_weighted) else None


def _symmetric_part(a: _Operands, b: _Operands, potential: PotentialSpec) -> tuple[float, float]:
    uu = inner(a.u, b.u)
    vv = inner(a.v, b.v)
    pot = inner(a.u, b.u, potential) + inner(a.v, b.v, potential)
    return uu + vv, uu - vv + pot


def _coupling(a: _Operands, b: _Operands) -> float:
    """<u_a, D+ v_b> + <v_a, D- u_b>."""
    if b.v_weighted:
        # integration by parts; boundary term vanishes for admissible components
        upper_part = inner(a.d_minus_u, b.v)
    elif b.d_plus_v is None:
        upper_part = 0.0
    else:
        upper_part = inner(a.u, b.d_plus_v)
    return upper_part + inner(a.v, b.d_minus_u)


def _blocks(rows: list[_Operands], cols: list[_Operands], potential: PotentialSpec, square: bool = False):
    """S and raw H for rows x cols. With square=True rows is cols and the symmetric part is
    evaluated on the upper triangle only."""
    n, m = len(rows), len(cols)
    s = np.zeros((n, m))
    sym = np.zeros((n, m))
    coupling = np.zeros((n, m))
    for i, a in enumerate(rows):
        for j, b in enumerate(cols):
            if not square or j >= i:
                s[i, j], sym[i, j] = _symmetric_part(a, b, potential)
            coupling[i, j] = _coupling(a, b)
    if square:
        s = np.triu(s) + np.triu(s, 1).T
        sym = np.triu(sym) + np.triu(sym, 1).T
    return s, sym + coupling


def _check_defect(h_raw: np.ndarray, labels) -> float:
    defect = float(np.max(np.abs(h_raw - h_raw.T))) if h_raw.size else 0.0
    scale = float(np.max(np.abs(h_raw))) if h_raw.size else 0.0
    if defect > HERMITICITY_TOL * max(scale, 1e-300):
        i, j = np.unravel_index(np.argmax(np.abs(h_raw - h_raw.T)), h_raw.shape)
        raise AssemblyError(
            f"hermiticity defect {defect:.3e} (|H|max {scale:.3e}) at ({labels[i]}, {labels[j]}); "
            "inadmissible basis/potential pairing"
        )
    return defect


def assemble(basis: "BasisSet", potential: PotentialSpec) -> Pencil:
    """S_ij = <b_i, b_j>,  H_ij = <b_i, H b_j>  (then H <- (H + H^T) / 2)."""
    basis.check_admissible(potential)
    ops = [_Operands(v) for v in basis.vectors]
    s, h_raw = _blocks(ops, ops, potential, square=True)
    labels = tuple(basis.labels)
    defect = _check_defect(h_raw, labels)
    s = 0.5 * (s + s.T)
    h = 0.5 * (h_raw + h_raw.T)
    logger.debug("assembled %dx%d pencil on %s, hermiticity defect %.2e", len(ops), len(ops),
                 potential.describe(), defect)
    return Pencil(h, s, labels, potential, defect, tuple(basis.vectors))


def append_vectors(p: Pencil, potential: PotentialSpec, extras) -> Pencil:
    """Border p with the extra vectors; the existing block is copied unchanged."""
    extras = list(extras)
    if not extras:
        return p
    if not p.vectors:
        raise AssemblyError("pencil carries no basis vectors to border against")
    if potential.singular_at_origin and not potential.is_zero:
        bad = [v.label for v in extras if not v.coulomb_compatible]
        if bad:
            raise DomainError(f"appended components not Coulomb-compatible: {bad}")

    old = [_Operands(v) for v in p.vectors]
    new = [_Operands(v) for v in extras]
    s_on, h_on = _blocks(old, new, potential)      # <old, H new>
    _, h_no = _blocks(new, old, potential)         # <new, H old>
    s_nn, h_nn = _blocks(new, new, potential, square=True)

    d, k = p.dim, len(new)
    labels = p.labels + tuple(v.label for v in extras)
    h_raw_border = np.zeros((d + k, d + k))
    h_raw_border[:d, d:] = h_on
    h_raw_border[d:, :d] = h_no
    h_raw_border[d:, d:] = h_nn
    h_raw_border[:d, :d] = p.h
    defect = max(p.hermiticity_defect, _check_defect(h_raw_border, labels))

    h = np.empty((d + k, d + k))
    s = np.empty((d + k, d + k))
    h[:d, :d] = p.h
    s[:d, :d] = p.s
    h[:d, d:] = 0.5 * (h_on + h_no.T)
    h[d:, :d] = h[:d, d:].T
    s[:d, d:] = s_on
    s[d:, :d] = s_on.T
    h[d:, d:] = 0.5 * (h_nn + h_nn.T)
    s[d:, d:] = 0.5 * (s_nn + s_nn.T)
    return Pencil(h, s, labels, potential, defect, p.vectors + tuple(extras))


def append_vector(p: Pencil, basis: "BasisSet", potential: PotentialSpec, extra: "BasisVector") -> Pencil:
    if len(basis) != p.dim:
        raise AssemblyError(f"basis has {len(basis)} vectors but the pencil is {p.dim}x{p.dim}")
    if not p.vectors:
        p = Pencil(p.h, p.s, p.labels, p.potential, p.hermiticity_defect, tuple(basis.vectors))
    return append_vectors(p, potential, [extra])


def rayleigh_quotient(vector: "BasisVector", potential: PotentialSpec) -> float:
    """<psi, H psi> / <psi, psi>: the 1x1 pencil."""
    op = _Operands(vector)
    s, h = _symmetric_part(op, op, potential)
    return (h + _coupling(op, op)) / s
