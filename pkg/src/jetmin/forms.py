"""Truncated (1,0)-forms, weighted Gram matrices, jet constraint systems.

Forms are F = (sum_l a_l zeta^l) d zeta in disc coordinates; inner products
are int |F|^2 e^{-phi} c(-psi) over {psi < -t}.  Gram entries use the
conjugate-linear-first convention H[l][m] = <zeta^l d zeta, zeta^m d zeta>,
matching numpy.vdot.  Weighted Grams on the raw monomial basis can diverge
at divisor zeros; the reduced path substitutes the jet-constraint null-space
parametrization first and integrates only functions with the enforced
vanishing, which is always integrable for admissible weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import BadInputError, NonIntegrableWeightError
from .gain import GainFunction, growth_rate_bound
from .geometry import UNIT_DISC, DomainSpec, check_marked_points
from .quadrature import PatchSpec, QuadratureConfig, assembled_gram
from .series import moebius_taylor, pderiv, pmul
from .weights import WeightKernel, WeightPair

_SIGMA_TOL = 1e-12
_LOC_TOL = 1e-12


@dataclass(frozen=True)
class TruncatedForm:
    """F = (sum coeffs[l] zeta^l) d zeta; coeffs in increasing degree."""

    coeffs: tuple[complex, ...]

    def __post_init__(self) -> None:
        c = tuple(complex(x) for x in self.coeffs)
        if not c:
            raise BadInputError("a truncated form needs at least one coefficient")
        if not all(math.isfinite(x.real) and math.isfinite(x.imag) for x in c):
            raise BadInputError("form coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian weighted Gram with region/weight metadata."""

    entries: np.ndarray
    t: float = 0.0
    weight_label: str = "trivial"
    quad_error: float = 0.0
    degenerate: bool = False

    def __post_init__(self) -> None:
        H = np.asarray(self.entries, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise BadInputError("Gram entries must form a square matrix")
        H = 0.5 * (H + H.conj().T)
        object.__setattr__(self, "entries", H)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class JetConstraintSystem:
    """Rows: order-nu local Taylor coefficient functionals; labels (j, nu)."""

    matrix: np.ndarray
    rhs: np.ndarray
    labels: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        A = np.asarray(self.matrix, dtype=complex)
        b = np.asarray(self.rhs, dtype=complex)
        if A.ndim != 2 or b.shape != (A.shape[0],) or len(self.labels) != A.shape[0]:
            raise BadInputError("constraint system shapes disagree")
        s = np.linalg.svd(A, compute_uv=False)
        if A.shape[0] and (s.size < A.shape[0] or s[-1] <= 1e-10 * max(s[0], 1.0)):
            raise BadInputError("constraint rows are rank deficient (coincident points?)")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "rhs", b)

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_coeffs(self) -> int:
        return self.matrix.shape[1]


def jet_constraints(
    w: WeightPair, N: int, dom: DomainSpec = UNIT_DISC
) -> JetConstraintSystem:
    """Linear functionals picking local jet coefficients of truncated forms.

    For each marked point the order-nu coefficient of F/dw_j in the local
    coordinate w_j = s_j (z - z_j) must be 0 for nu < k_j and a_j at nu = k_j.
    Rows are normalized to the plain x = z - z_j expansion of F/dz, so the
    right-hand side at top order is a_j s_j^{k_j+1}.
    """
    if N < 0:
        raise BadInputError("truncation degree must be >= 0")
    check_marked_points(dom, w.marked)
    total = sum(pt.jet_order + 1 for pt in w.marked)
    if N + 1 < total:
        raise BadInputError(
            f"need N+1 >= {total} coefficients for {total} jet conditions, got N = {N}"
        )
    a, b, c, d = dom.map_coeffs
    rows, rhs, labels = [], [], []
    for j, pt in enumerate(w.marked):
        k = pt.jet_order
        zj = complex(pt.location)
        # series in x = z - z_j of zeta(z_j + x) = T^{-1}(z_j + x) and its x-derivative
        zeta_series = moebius_taylor(d * zj - b, d, a - c * zj, -c, k + 2)
        dzeta = pderiv(zeta_series)
        if dzeta.size < k + 1:
            dzeta = np.concatenate([dzeta, np.zeros(k + 1 - dzeta.size, complex)])
        M = np.zeros((k + 1, N + 1), dtype=complex)
        cur = dzeta[: k + 1].copy()  # zeta^l * dzeta/dz, truncated to order k
        for l in range(N + 1):
            M[:, l] = cur[: k + 1]
            cur = pmul(cur, zeta_series, k + 1)
        target = pt.jet_coeff * pt.coord_scale ** (k + 1)
        for nu in range(k + 1):
            rows.append(M[nu])
            rhs.append(target if nu == k else 0.0)
            labels.append((j, nu))
    return JetConstraintSystem(
        matrix=np.array(rows), rhs=np.array(rhs, dtype=complex), labels=tuple(labels)
    )


def gram_analytic_disc(N: int, *, radius: float = 1.0, scale: float = 1.0) -> GramMatrix:
    """Closed-form Gram for the trivial weight on a centered disc region.

    Monomial forms are orthogonal there: entry [l][l] is
    scale * 2 pi radius^{2l+2} / (l+1).
    """
    if N < 0:
        raise BadInputError("truncation degree must be >= 0")
    if not (0 < radius <= 1):
        raise BadInputError(f"radius must lie in (0, 1], got {radius}")
    if not (scale > 0):
        raise BadInputError(f"weight scale must be > 0, got {scale}")
    l = np.arange(N + 1)
    diag = scale * 2 * math.pi * radius ** (2 * l + 2) / (l + 1)
    return GramMatrix(entries=np.diag(diag.astype(complex)),
                      weight_label=f"analytic disc r={radius:g}")


def analytic_reduction(
    dom: DomainSpec, w: WeightPair, g: GainFunction, t: float
) -> tuple[float, float]:
    """(radius, scale) when the weighted region integral has a closed form.

    Requires the identity domain, a constant gain, and a divisor realizing
    psi exactly (so e^{-phi} is identically 1); the region must be the full
    disc (t = 0) or a centered sublevel disc (all psi mass at the origin).
    Raises BadInputError otherwise, pointing at gram_quadrature.
    """
    hint = "no closed-form Gram for this configuration; use gram_quadrature"
    if not dom.is_identity or g.kind != "constant":
        raise BadInputError(hint)
    if w.phi.bump != 0 or any(x != 0 for x in w.phi.u_coeffs):
        raise BadInputError(hint)
    if abs(abs(w.phi.leading) - 1.0) > 1e-14:
        raise BadInputError(hint)
    need = [(loc, coeff) for loc, coeff in w.psi.all_terms()]
    have = list(w.phi.zeros)
    matched = []
    for loc, coeff in need:
        hit = None
        for i, (zloc, m) in enumerate(have):
            if abs(zloc - loc) <= _LOC_TOL and i not in matched:
                if abs(2 * m - coeff) > 1e-12:
                    raise BadInputError(hint)
                hit = i
                break
        if hit is None:
            raise BadInputError(hint)
        matched.append(hit)
    if len(matched) != len(have):
        raise BadInputError(hint)
    if t == 0:
        return 1.0, g.value
    if len(need) == 1 and abs(need[0][0]) <= _LOC_TOL:
        p_total = need[0][1] / 2.0
        return math.exp(-t / (2.0 * p_total)), g.value
    raise BadInputError(hint)


def _patch_specs(kernel: WeightKernel, g: GainFunction, enforced: bool,
                 check: bool = True) -> list[PatchSpec]:
    """Singular-center descriptors with local integrand exponents.

    sigma = 2 nu + 2 p (1 - delta) - 2 m at each center, where nu is the
    vanishing order of the integrated family (0 on the raw monomial basis),
    p the psi mass, m the divisor order, delta the gain growth rate.
    Divergent exponents (sigma <= -2) are refused.
    """
    delta = growth_rate_bound(g)
    specs = []
    for zeta_c, p, m, nu in kernel.singular_centers():
        nu_eff = nu if enforced else 0
        sigma = 2 * nu_eff + 2 * p * (1 - delta) - 2 * m
        if check:
            if sigma <= -2 + _SIGMA_TOL:
                raise NonIntegrableWeightError(
                    f"weighted integrand exponent {sigma:g} at center {zeta_c} diverges; "
                    "the weight is integrable only against forms with enforced vanishing"
                )
        else:
            # band regions exclude the singular cores; clamp only to keep the
            # fallback ring depth finite
            sigma = max(sigma, 0.0)
        specs.append(PatchSpec(center=zeta_c, order=nu_eff, exponent=sigma))
    return specs


def _monomials(N: int) -> list[np.ndarray]:
    out = []
    for l in range(N + 1):
        e = np.zeros(l + 1, dtype=complex)
        e[l] = 1.0
        out.append(e)
    return out


def gram_quadrature(
    dom: DomainSpec,
    w: WeightPair,
    g: GainFunction,
    t: float,
    N: int,
    mesh: QuadratureConfig | None = None,
) -> GramMatrix:
    """Weighted monomial Gram over {psi < -t} by adaptive polar quadrature.

    Valid only when the weight is integrable against the raw monomials
    (every center exponent > -2); otherwise use gram_reduced.
    """
    if N < 0:
        raise BadInputError("truncation degree must be >= 0")
    mesh = mesh or QuadratureConfig()
    kernel = WeightKernel(dom, w)
    specs = _patch_specs(kernel, g, enforced=False)
    H, err, degen = assembled_gram(kernel, g, _monomials(N), specs, mesh, t=t)
    return GramMatrix(entries=H, t=float(t), weight_label=f"quadrature {g.describe()}",
                      quad_error=err, degenerate=degen)


def constraint_basis(C: JetConstraintSystem) -> tuple[np.ndarray, np.ndarray]:
    """Min-norm particular solution and orthonormal null-space basis."""
    A, b = C.matrix, C.rhs
    a_part = np.linalg.lstsq(A, b, rcond=None)[0]
    resid = np.linalg.norm(A @ a_part - b)
    if resid > 1e-10 * (1 + np.linalg.norm(b)):
        raise BadInputError(f"infeasible jet constraints, residual {resid:g}")
    Z = linalg.null_space(A)
    return a_part, Z


def gram_reduced(
    dom: DomainSpec,
    w: WeightPair,
    g: GainFunction,
    t: float,
    N: int,
    mesh: QuadratureConfig | None = None,
    constraints: JetConstraintSystem | None = None,
) -> tuple[GramMatrix, np.ndarray, np.ndarray]:
    """Gram on [particular | null-space] after constraint substitution.

    This is the regularization that makes singular weights integrable: every
    reduced basis function carries the enforced vanishing at the marked
    points.  Returns (reduced Gram, particular coefficients, null basis).
    """
    mesh = mesh or QuadratureConfig()
    C = constraints if constraints is not None else jet_constraints(w, N, dom)
    a_part, Z = constraint_basis(C)
    kernel = WeightKernel(dom, w)
    specs = _patch_specs(kernel, g, enforced=True)
    basis = [a_part] + [Z[:, i] for i in range(Z.shape[1])]
    H, err, degen = assembled_gram(kernel, g, basis, specs, mesh, t=t)
    gram = GramMatrix(entries=H, t=float(t),
                      weight_label=f"reduced {g.describe()}",
                      quad_error=err, degenerate=degen)
    return gram, a_part, Z


def form_norm_quadrature(
    dom: DomainSpec,
    w: WeightPair,
    g: GainFunction,
    F: TruncatedForm,
    *,
    t: float = 0.0,
    band: tuple[float, float] | None = None,
    mesh: QuadratureConfig | None = None,
) -> tuple[float, float, bool]:
    """Weighted norm of one constrained form over a sublevel set or band.

    Returns (value, error estimate, degenerate flag).  The form is assumed
    to carry the enforced vanishing at the marked points, which keeps the
    integrand integrable at the singular centers.
    """
    mesh = mesh or QuadratureConfig()
    kernel = WeightKernel(dom, w)
    specs = _patch_specs(kernel, g, enforced=True, check=band is None)
    H, err, degen = assembled_gram(kernel, g, [F.coeff_array()], specs, mesh,
                                   t=t, band=band)
    return float(H[0, 0].real), err, degen


def norm_of_form(F: TruncatedForm, H: GramMatrix) -> float:
    """a* H a for the form's coefficients; real and nonnegative up to roundoff."""
    a = F.coeff_array()
    if a.size != H.size:
        raise BadInputError(
            f"form has {a.size} coefficients but the Gram is {H.size}x{H.size}"
        )
    return float(np.real(np.vdot(a, H.entries @ a)))
