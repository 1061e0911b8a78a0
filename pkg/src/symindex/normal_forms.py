"""Symplectic matrices, basic normal forms, the diamond product and D_omega.

Coordinates are ordered (p_1..p_n, q_1..q_n), so the standard symplectic
form is J = [[0, -I], [I, 0]].  Matrices carry either exact Fraction
entries or float64 entries; exact matrices admit exact determinant and
kernel computations at omega = +-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .scalars import Scalar, scalar_from_json, scalar_to_json

__all__ = [
    "SymplecticMatrix",
    "BasicNormalForm",
    "NormalFormError",
    "standard_J",
    "diamond",
    "realize",
    "d_omega",
    "nu_omega",
    "nontrivial_n2_block",
    "trivial_n2_block",
]

RANK_TOL = 1e-9  # singular-value threshold for float kernels (CLI-tunable)
SYMPLECTIC_TOL = 1e-9


class NormalFormError(ValueError):
    pass


def standard_J(n: int) -> np.ndarray:
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = -np.eye(n)
    J[n:, :n] = np.eye(n)
    return J


def _exact_J(n: int) -> np.ndarray:
    J = np.full((2 * n, 2 * n), Fraction(0), dtype=object)
    for i in range(n):
        J[i, n + i] = Fraction(-1)
        J[n + i, i] = Fraction(1)
    return J


class SymplecticMatrix:
    """A 2n x 2n real symplectic matrix.

    Entries are a numpy array, dtype object (Fractions, exact) or float64.
    The symplectic relation M^T J M = J is checked on construction to the
    1e-9 tolerance (exactly for rational entries).
    """

    def __init__(self, n: int, entries, check: bool = True):
        self.n = int(n)
        arr = np.asarray(entries)
        if arr.shape != (2 * n, 2 * n):
            raise NormalFormError(f"expected shape {(2*n, 2*n)}, got {arr.shape}")
        if arr.dtype == object:
            self.entries = arr
        else:
            self.entries = arr.astype(float)
        if check:
            defect = self.symplectic_defect()
            if defect > SYMPLECTIC_TOL:
                raise NormalFormError(
                    f"matrix is not symplectic: max |M^T J M - J| entry = {defect:.3e}")

    # ----- basics ---------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.entries.dtype == object

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "SymplecticMatrix":
        if exact:
            ent = np.full((2 * n, 2 * n), Fraction(0), dtype=object)
            for i in range(2 * n):
                ent[i, i] = Fraction(1)
            return cls(n, ent, check=False)
        return cls(n, np.eye(2 * n), check=False)

    def as_float(self) -> np.ndarray:
        if self.exact:
            return np.array([[float(x) for x in row] for row in self.entries])
        return self.entries

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        if self.n != other.n:
            raise NormalFormError("dimension mismatch")
        if self.exact and other.exact:
            prod = self.entries.dot(other.entries)
        else:
            prod = self.as_float() @ other.as_float()
        return SymplecticMatrix(self.n, prod, check=False)

    def transpose(self) -> "SymplecticMatrix":
        return SymplecticMatrix(self.n, self.entries.T.copy(), check=False)

    def symplectic_defect(self) -> float:
        if self.exact:
            J = _exact_J(self.n)
            res = self.entries.T.dot(J).dot(self.entries) - J
            return float(max(abs(x) for x in res.flat))
        J = standard_J(self.n)
        res = self.entries.T @ J @ self.entries - J
        return float(np.max(np.abs(res)))

    def is_symplectic(self, tol: float = SYMPLECTIC_TOL) -> bool:
        return self.symplectic_defect() <= tol

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"SymplecticMatrix(n={self.n}, {kind})"

    # ----- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        rows = []
        for row in self.entries:
            out = []
            for x in row:
                if isinstance(x, Fraction):
                    out.append(f"{x.numerator}/{x.denominator}")
                else:
                    out.append(float(x))
            rows.append(out)
        return {"n": self.n, "entries": rows}

    @classmethod
    def from_json(cls, obj: dict) -> "SymplecticMatrix":
        n = int(obj["n"])
        raw = obj["entries"]
        exact = any(isinstance(x, str) for row in raw for x in row)
        if exact:
            ent = np.full((2 * n, 2 * n), Fraction(0), dtype=object)
            for i, row in enumerate(raw):
                for j, x in enumerate(row):
                    ent[i, j] = Fraction(x) if isinstance(x, str) else Fraction(x)
        else:
            ent = np.array(raw, dtype=float)
        return cls(n, ent)


# ----- basic normal forms ---------------------------------------------------


@dataclass(frozen=True)
class BasicNormalForm:
    """One of the 2x2 / 4x4 building blocks D, N1, R, N2.

    kind       : "D" | "N1" | "R" | "N2"
    lam        : eigenvalue parameter for D (+-2) and N1 (+-1)
    b          : shear parameter for N1 (one of 1, 0, -1)
    theta      : rotation angle as a Scalar of theta/pi, in (0,2) minus {1}
    b_block    : 2x2 block for N2 (must make the 4x4 matrix symplectic,
                 with b_block[0,1] != b_block[1,0])
    """

    kind: str
    lam: int = 0
    b: int = 0
    theta: Optional[Scalar] = None
    b_block: Optional[tuple] = None

    def __post_init__(self):
        if self.kind == "D":
            if self.lam not in (2, -2):
                raise NormalFormError("D(lambda) needs lambda in {2, -2}")
        elif self.kind == "N1":
            if self.lam not in (1, -1) or self.b not in (1, 0, -1):
                raise NormalFormError("N1(lambda, b) needs lambda in {1,-1}, b in {1,0,-1}")
        elif self.kind in ("R", "N2"):
            t = self.theta
            if t is None:
                raise NormalFormError(f"{self.kind} needs an angle")
            if not (Scalar.rational(0) < t < Scalar.rational(2)) or t == Scalar.rational(1):
                raise NormalFormError("angle theta/pi must lie in (0,2) minus {1}")
            if self.kind == "N2":
                bb = self.b_block
                if bb is None:
                    raise NormalFormError("N2 needs a 2x2 b block")
                if len(bb) != 2 or len(bb[0]) != 2 or len(bb[1]) != 2:
                    raise NormalFormError("b block must be 2x2")
                if bb[0][1] == bb[1][0]:
                    raise NormalFormError("N2 requires b_2 != b_3")
        else:
            raise NormalFormError(f"unknown normal form kind {self.kind!r}")

    @property
    def half_dim(self) -> int:
        return 2 if self.kind == "N2" else 1

    def sin_sign(self) -> int:
        """Sign of sin(theta), decided from the tag (theta/pi < 1 or > 1)."""
        if self.theta is None:
            raise NormalFormError("no angle")
        return 1 if self.theta < Scalar.rational(1) else -1

    def is_trivial_n2(self) -> bool:
        """Trivial iff (b_2 - b_3) sin(theta) > 0; defined only for N2."""
        if self.kind != "N2":
            raise NormalFormError("triviality is defined for N2 blocks only")
        diff = self.b_block[0][1] - self.b_block[1][0]
        val = (1 if diff > 0 else -1) * self.sin_sign()
        return val > 0

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind in ("D", "N1"):
            out["lam"] = self.lam
        if self.kind == "N1":
            out["b"] = self.b
        if self.theta is not None:
            out["theta_over_pi"] = scalar_to_json(self.theta)
        if self.b_block is not None:
            out["b_block"] = [list(map(float, row)) for row in self.b_block]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "BasicNormalForm":
        theta = scalar_from_json(obj["theta_over_pi"]) if "theta_over_pi" in obj else None
        bb = obj.get("b_block")
        if bb is not None:
            bb = (tuple(bb[0]), tuple(bb[1]))
        return cls(kind=obj["kind"], lam=obj.get("lam", 0), b=obj.get("b", 0),
                   theta=theta, b_block=bb)


def _rotation_entries(theta: Scalar):
    """cos/sin of pi * (theta/pi); exact at the quarter turns."""
    if theta.is_rational:
        fr = theta.fraction
        if fr.denominator == 2:  # pi/2 or 3pi/2
            if fr == Fraction(1, 2):
                return Fraction(0), Fraction(1)
            if fr == Fraction(3, 2):
                return Fraction(0), Fraction(-1)
    x = float(theta) * math.pi
    return math.cos(x), math.sin(x)


def realize(form: BasicNormalForm) -> SymplecticMatrix:
    """The literal matrix of a basic normal form."""
    if form.kind == "D":
        lam = Fraction(form.lam)
        ent = np.full((2, 2), Fraction(0), dtype=object)
        ent[0, 0] = lam
        ent[1, 1] = 1 / lam
        return SymplecticMatrix(1, ent)
    if form.kind == "N1":
        ent = np.full((2, 2), Fraction(0), dtype=object)
        ent[0, 0] = Fraction(form.lam)
        ent[0, 1] = Fraction(form.b)
        ent[1, 1] = Fraction(form.lam)
        return SymplecticMatrix(1, ent)
    if form.kind == "R":
        c, s = _rotation_entries(form.theta)
        if isinstance(c, Fraction):
            ent = np.array([[c, -s], [s, c]], dtype=object)
        else:
            ent = np.array([[c, -s], [s, c]], dtype=float)
        return SymplecticMatrix(1, ent)
    # N2: [[R, b], [0, R]] in (p1, p2, q1, q2) coordinates
    c, s = _rotation_entries(form.theta)
    c, s = float(c), float(s)
    b = np.array(form.b_block, dtype=float)
    ent = np.zeros((4, 4))
    R = np.array([[c, -s], [s, c]])
    ent[:2, :2] = R
    ent[:2, 2:] = b
    ent[2:, 2:] = R
    try:
        return SymplecticMatrix(2, ent)
    except NormalFormError as exc:
        raise NormalFormError(
            "N2 b block incompatible with the rotation part "
            "(R(theta)^T b must be symmetric): " + str(exc)) from exc


def nontrivial_n2_block(theta: Scalar) -> BasicNormalForm:
    """An N2(omega, b) with (b2-b3) sin(theta) < 0; here b = R(theta)."""
    c, s = _rotation_entries(theta)
    c, s = float(c), float(s)
    return BasicNormalForm(kind="N2", theta=theta, b_block=((c, -s), (s, c)))


def trivial_n2_block(theta: Scalar) -> BasicNormalForm:
    """An N2(omega, b) with (b2-b3) sin(theta) > 0; here b = -R(theta)."""
    c, s = _rotation_entries(theta)
    c, s = float(c), float(s)
    return BasicNormalForm(kind="N2", theta=theta, b_block=((-c, s), (-s, -c)))


# ----- diamond product ------------------------------------------------------


def _diamond_index_maps(n1: int, n2: int):
    n = n1 + n2
    map1 = [i if i < n1 else n + (i - n1) for i in range(2 * n1)]
    map2 = [n1 + i if i < n2 else n + n1 + (i - n2) for i in range(2 * n2)]
    return map1, map2


def diamond(M1: SymplecticMatrix, M2: SymplecticMatrix) -> SymplecticMatrix:
    """Block-interleaved direct sum of two symplectic matrices.

    In (p, q)-ordered coordinates this is the displayed 4-block layout:
    the p-coordinates of M1 come first, then those of M2, then the two
    q-coordinate groups in the same order.
    """
    for M in (M1, M2):
        defect = M.symplectic_defect()
        if defect > SYMPLECTIC_TOL:
            raise NormalFormError(
                f"diamond operand is not symplectic: max |M^T J M - J| entry = {defect:.3e}")
    n = M1.n + M2.n
    exact = M1.exact and M2.exact
    if exact:
        ent = np.full((2 * n, 2 * n), Fraction(0), dtype=object)
    else:
        ent = np.zeros((2 * n, 2 * n))
    map1, map2 = _diamond_index_maps(M1.n, M2.n)
    A1 = M1.entries if exact else M1.as_float()
    A2 = M2.entries if exact else M2.as_float()
    for i in range(2 * M1.n):
        for j in range(2 * M1.n):
            ent[map1[i], map1[j]] = A1[i, j]
    for i in range(2 * M2.n):
        for j in range(2 * M2.n):
            ent[map2[i], map2[j]] = A2[i, j]
    return SymplecticMatrix(n, ent, check=False)


def diamond_all(mats) -> SymplecticMatrix:
    mats = list(mats)
    if not mats:
        raise NormalFormError("empty diamond product")
    out = mats[0]
    for M in mats[1:]:
        out = diamond(out, M)
    return out


# ----- D_omega and nu_omega -------------------------------------------------


def _det_exact(a) -> Fraction:
    """Fraction Gaussian elimination determinant (matrices are tiny)."""
    n = a.shape[0]
    rows = [[Fraction(x) for x in a[i]] for i in range(n)]
    det = Fraction(1)
    for k in range(n):
        piv = None
        for i in range(k, n):
            if rows[i][k] != 0:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            det = -det
        det *= rows[k][k]
        inv = 1 / rows[k][k]
        for i in range(k + 1, n):
            if rows[i][k] == 0:
                continue
            f = rows[i][k] * inv
            for j in range(k, n):
                rows[i][j] -= f * rows[k][j]
    return det


def _rank_exact(a) -> int:
    n, m = a.shape
    rows = [[Fraction(x) for x in a[i]] for i in range(n)]
    rank = 0
    col = 0
    while rank < n and col < m:
        piv = None
        for i in range(rank, n):
            if rows[i][col] != 0:
                piv = i
                break
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        for i in range(rank + 1, n):
            if rows[i][col] != 0:
                f = rows[i][col] * inv
                for j in range(col, m):
                    rows[i][j] -= f * rows[rank][j]
        rank += 1
        col += 1
    return rank


def d_omega(M: SymplecticMatrix, omega):
    """D_omega(M) = (-1)^(n-1) * conj(omega)^n * det(M - omega I).

    Real-valued on the unit circle; returned as an exact Fraction for
    rational matrices at omega = +-1, as a float otherwise.
    """
    n = M.n
    if omega in (1, -1) and M.exact:
        shifted = M.entries.copy()
        for i in range(2 * n):
            shifted[i, i] = shifted[i, i] - Fraction(omega)
        det = _det_exact(shifted)
        return Fraction(-1) ** (n - 1) * Fraction(omega) ** n * det
    om = complex(omega)
    if abs(abs(om) - 1) > 1e-9:
        raise NormalFormError(f"omega must lie on the unit circle, got |omega| = {abs(om)}")
    A = M.as_float().astype(complex) - om * np.eye(2 * n)
    val = (-1) ** (n - 1) * np.conj(om) ** n * np.linalg.det(A)
    return val.real if omega in (1, -1) else val


def nu_omega(M: SymplecticMatrix, omega, tol: float = RANK_TOL) -> int:
    """dim_C ker(M - omega I), via exact rank for rational M at omega = +-1,
    else via SVD with the given singular-value threshold."""
    n = M.n
    if omega in (1, -1) and M.exact:
        shifted = M.entries.copy()
        for i in range(2 * n):
            shifted[i, i] = shifted[i, i] - Fraction(omega)
        return 2 * n - _rank_exact(shifted)
    om = complex(omega)
    if abs(abs(om) - 1) > 1e-9:
        raise NormalFormError(f"omega must lie on the unit circle, got |omega| = {abs(om)}")
    A = M.as_float().astype(complex) - om * np.eye(2 * n)
    sv = np.linalg.svd(A, compute_uv=False)
    scale = max(1.0, float(sv[0]))
    return int(np.sum(sv < tol * scale))


def realize_decomposition(decomp) -> SymplecticMatrix:
    """Diamond product of basic blocks matching a NormalFormDecomposition.

    Hyperbolic blocks are realized as D(2)^k (the decomposition does not
    record the D(-2) variant; either choice has empty unit spectrum).
    """
    blocks = []
    blocks += [BasicNormalForm("N1", lam=1, b=1)] * decomp.p_minus
    blocks += [BasicNormalForm("N1", lam=1, b=0)] * decomp.p_zero
    blocks += [BasicNormalForm("N1", lam=1, b=-1)] * decomp.p_plus
    blocks += [BasicNormalForm("N1", lam=-1, b=1)] * decomp.q_minus
    blocks += [BasicNormalForm("N1", lam=-1, b=0)] * decomp.q_zero
    blocks += [BasicNormalForm("N1", lam=-1, b=-1)] * decomp.q_plus
    blocks += [BasicNormalForm("R", theta=t) for t in decomp.thetas]
    blocks += [nontrivial_n2_block(t) for t in decomp.alphas]
    blocks += [trivial_n2_block(t) for t in decomp.betas]
    blocks += [BasicNormalForm("D", lam=2)] * decomp.k
    if not blocks:
        raise NormalFormError("empty decomposition")
    return diamond_all(realize(b) for b in blocks)


# re-exported here because the operation belongs to the normal-form surface,
# while the decomposition type it consumes lives with the iteration formulas
from .iteration import unit_spectrum  # noqa: E402,F401
