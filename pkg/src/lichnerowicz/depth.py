"""Depth decomposition and spectrally defined operators.

Within a fixed rank ``r`` the Casimir ``c`` acts on ``g^k Phi`` (``Phi``
trace-free of rank ``s = r - 2k``) with eigenvalue ``-s(s+n-2)``.  These values
are distinct for the admissible ``s``, so the pieces are recovered by Lagrange
interpolation polynomials in ``c``.  On a piece the operators ``Ncal`` and
``C`` act as the numbers ``s + 2k + n/2`` and ``s + (n-2)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import CAS, NCAL, NCFunction
from .operators import apply_div, apply_g, apply_grad, apply_tr, casimir_c
from .tensors import SymTensorField


class DenominatorSingularOnSpectrum(ArithmeticError):
    def __init__(self, s: int, k: int, n: int, detail: str = ""):
        self.s, self.k, self.n = s, k, n
        msg = f"denominator vanishes on the spectral point s={s}, k={k}, n={n}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class BoxSymbolPresent(ValueError):
    pass


class DecompositionError(ArithmeticError):
    pass


def ncal_eigenvalue(s: int, k: int, n: int) -> Fraction:
    return Fraction(2 * (s + 2 * k) + n, 2)


def cas_eigenvalue(s: int, n: int) -> Fraction:
    return Fraction(2 * s + n - 2, 2)


@dataclass(frozen=True)
class DepthComponent:
    s: int
    k: int
    phi: SymTensorField

    @property
    def n(self) -> int:
        return self.phi.dim

    @property
    def N_eig(self) -> int:
        return self.s + 2 * self.k

    @property
    def Ncal_eig(self) -> Fraction:
        return ncal_eigenvalue(self.s, self.k, self.n)

    @property
    def Ccal_eig(self) -> Fraction:
        return cas_eigenvalue(self.s, self.n)

    @property
    def kappa_eig(self) -> int:
        return self.k

    def piece(self) -> SymTensorField:
        out = self.phi
        for _ in range(self.k):
            out = apply_g(out)
        return out

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "k": self.k,
            "phi": self.phi.to_text(),
            "phi_json": self.phi.to_json(),
            "N_eig": self.N_eig,
            "Ncal_eig": str(self.Ncal_eig),
            "Ccal_eig": str(self.Ccal_eig),
            "kappa_eig": self.kappa_eig,
        }


@dataclass(frozen=True)
class DepthDecomposition:
    components: tuple[DepthComponent, ...]
    geometry: object

    def reassemble(self) -> SymTensorField:
        out = SymTensorField.zero(self.geometry)
        for comp in self.components:
            out = out + comp.piece()
        return out

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.components]

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)


def casimir_eigenvalue(s: int, n: int) -> int:
    return -s * (s + n - 2)


def spectral_pieces(psi: SymTensorField) -> list[tuple[int, int, SymTensorField]]:
    """``(s, k, g^k Phi)`` for every nonzero piece of ``psi``."""
    n = psi.dim
    out = []
    for r, part in psi.by_rank().items():
        spins = list(range(r, -1, -2))
        if len(spins) == 1:
            out.append((r, 0, part))
            continue
        # c^j applied to the rank-r part, reused by every projector
        powers = [part]
        for _ in range(len(spins) - 1):
            powers.append(casimir_c(powers[-1]))
        total = SymTensorField.zero(psi.geometry)
        for s in spins:
            lam = casimir_eigenvalue(s, n)
            # coefficients of prod_{s' != s} (c - lam')/(lam - lam') as a polynomial in c
            coeffs = [Fraction(1)]
            for s2 in spins:
                if s2 == s:
                    continue
                lam2 = casimir_eigenvalue(s2, n)
                scale = Fraction(1, lam - lam2)
                shifted = [Fraction(0)] + coeffs
                for i, a in enumerate(coeffs):
                    shifted[i] -= lam2 * a
                coeffs = [a * scale for a in shifted]
            piece = SymTensorField.zero(psi.geometry)
            for a, p in zip(coeffs, powers):
                if a:
                    piece = piece + p * a
            if piece:
                out.append((s, (r - s) // 2, piece))
                total = total + piece
        if total != part:
            raise DecompositionError(
                f"rank-{r} projector pieces do not reassemble (n={n}, signature "
                f"{psi.geometry.signature})"
            )
    return out


def trace_decompose(psi: SymTensorField) -> DepthDecomposition:
    n = psi.dim
    comps = []
    for s, k, piece in spectral_pieces(psi):
        phi = piece
        norm = Fraction(1)
        for j in range(1, k + 1):
            phi = apply_tr(phi)
            norm *= 2 * j * (2 * s + 2 * j + n - 2)
        comps.append(DepthComponent(s, k, phi * (1 / norm)))
    return DepthDecomposition(tuple(comps), psi.geometry)


def apply_NC_function(f: NCFunction, psi: SymTensorField) -> SymTensorField:
    """Act with ``f(Ncal, C)`` diagonally on the depth pieces of ``psi``."""
    if f.has_box():
        raise BoxSymbolPresent(f"box symbol present in {f}")
    n = psi.dim
    if f.is_constant():
        return psi * f.constant_value()
    out = SymTensorField.zero(psi.geometry)
    for s, k, piece in spectral_pieces(psi):
        ncal, cas = ncal_eigenvalue(s, k, n), cas_eigenvalue(s, n)
        if not f.denominator_value(ncal, cas):
            raise DenominatorSingularOnSpectrum(s, k, n, f"{f} at Ncal={ncal}, C={cas}")
        out = out + piece * f.evaluate(ncal, cas)
    return out


SHIFTED_SUM = NCAL + CAS - 1  # eigenvalue 2s + 2k + n - 2
KAPPA = (NCAL - CAS - 1) / 2


def _inverse_shifted_sum(psi: SymTensorField, feeds) -> SymTensorField:
    """``(Ncal + C - 1)^-1 psi``; a singular piece is dropped only if ``feeds`` kills it."""
    n = psi.dim
    out = SymTensorField.zero(psi.geometry)
    for s, k, piece in spectral_pieces(psi):
        ev = 2 * s + 2 * k + n - 2
        if ev == 0:
            if feeds is not None and feeds(piece).is_zero():
                continue
            raise DenominatorSingularOnSpectrum(s, k, n, "Ncal + C - 1 = 0")
        out = out + piece * Fraction(1, ev)
    return out


def grad_tilde(psi: SymTensorField) -> SymTensorField:
    """``grad - g div (Ncal + C - 1)^-1``."""
    correction = apply_g(apply_div(_inverse_shifted_sum(psi, apply_div)))
    return apply_grad(psi) - correction


def div_tilde(psi: SymTensorField) -> SymTensorField:
    """``div - (Ncal + C - 1)^-1 grad tr``."""
    return apply_div(psi) - _inverse_shifted_sum(apply_grad(apply_tr(psi)), None)


_GRAD_FROM_GRADT = (NCAL + CAS - 3) / (CAS - 1) / 2
_GRAD_FROM_G_DIVT = (NCAL + CAS - 3) / (2 * CAS * (NCAL + CAS - 1))
_DIV_FROM_DIVT = (NCAL + CAS - 3) / (CAS - 1) / 2
_DIV_FROM_GRADT_TR = (NCAL + CAS - 3) / (2 * CAS * (NCAL + CAS - 1))


def _check_targets(f: NCFunction, targets, n: int) -> None:
    for s, k in targets:
        if s >= 0 and not f.denominator_value(ncal_eigenvalue(s, k, n), cas_eigenvalue(s, n)):
            raise DenominatorSingularOnSpectrum(s, k, n, str(f))


def reconstruct_grad(psi: SymTensorField) -> SymTensorField:
    """``grad`` rebuilt from ``gradt`` and ``g divt``.

    The coefficients are checked on the formal image spectrum of every input
    piece, since in low dimension ``divt`` can vanish exactly where its
    coefficient blows up and the true ``grad`` is then not recovered.
    """
    n = psi.dim
    for s, k, _ in spectral_pieces(psi):
        _check_targets(_GRAD_FROM_GRADT, [(s + 1, k)], n)
        if s >= 1:
            _check_targets(_GRAD_FROM_G_DIVT, [(s - 1, k + 1)], n)
    first = apply_NC_function(_GRAD_FROM_GRADT, grad_tilde(psi))
    second = apply_NC_function(_GRAD_FROM_G_DIVT, apply_g(div_tilde(psi)))
    return first + second


def reconstruct_div(psi: SymTensorField) -> SymTensorField:
    """``div`` rebuilt from ``divt`` and ``gradt tr``."""
    first = div_tilde(apply_NC_function(_DIV_FROM_DIVT, psi))
    second = grad_tilde(apply_tr(apply_NC_function(_DIV_FROM_GRADT_TR, psi)))
    return first + second


def apply_ncal(psi: SymTensorField) -> SymTensorField:
    from .operators import apply_N

    return apply_N(psi) + psi * Fraction(psi.dim, 2)


def apply_cas(psi: SymTensorField) -> SymTensorField:
    return apply_NC_function(CAS, psi)


def apply_kappa(psi: SymTensorField) -> SymTensorField:
    return apply_NC_function(KAPPA, psi)
