"""Geometric index oracle: crossing counts of sampled symplectic paths.

The index of a path gamma is computed from first principles as the signed
count of crossings of t -> D_omega(beta(t)) along the extended path
beta = gamma * xi_n.  Each crossing contributes the signature of the
crossing form v* S(t) v restricted to ker(beta(t) - omega I), where
S = -J (d beta/dt) beta^{-1} is the symmetric generator; the junction of
the extension (always at the identity when omega = 1) contributes a half
signature, the corner convention for a one-sided crossing.

Degenerate situations (endpoint on the crossing variety, paths running
inside it) are resolved by multiplying gamma by e^{-eps (t/T) J}, which
moves the endpoint to gamma(T) e^{-eps J}; the whole-path version of that
endpoint convention shifts every crossing form downward and realizes the
infimum over nearby nondegenerate paths.  The sign convention is pinned by
agreement with the iteration formulas on rotation paths and recorded here:
a crossing passed in the direction of the curve M e^{t eps J} counts +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import expm

from .normal_forms import RANK_TOL, standard_J

__all__ = [
    "OracleError",
    "SampledSymplecticPath",
    "path_from_quadratic_hamiltonian",
    "path_from_samples",
    "path_from_matrix_function",
    "path_from_logm",
    "diamond_paths",
    "iterate_path",
    "extend_with_xi",
    "cz_index",
    "estimate_splitting",
]

DEFAULT_STEPS = 2048
MAX_STEPS = 1 << 20
DEFAULT_PERT = 1e-4
STEP_BOUND = 0.05  # max entry change between consecutive samples


class OracleError(RuntimeError):
    pass


class _NeedPerturbation(Exception):
    pass


@dataclass
class SampledSymplecticPath:
    """A discretized path in Sp(2n) starting at the identity.

    ts / mats hold the samples; evaluator, when present, returns the exact
    matrix at arbitrary t and is what crossing localization refines with.
    junction_index marks the concatenation point on extended paths.
    """

    n: int
    tau: float
    ts: np.ndarray
    mats: np.ndarray
    evaluator: Optional[Callable[[float], np.ndarray]] = None
    junction_index: Optional[int] = None

    def __post_init__(self):
        self.ts = np.asarray(self.ts, dtype=float)
        self.mats = np.asarray(self.mats, dtype=float)
        if self.mats.shape[1:] != (2 * self.n, 2 * self.n):
            raise OracleError("sample shape does not match half-dimension")
        if len(self.ts) != len(self.mats):
            raise OracleError("ts and mats length mismatch")

    def validate(self, eta: float = STEP_BOUND, sympl_tol: float = 1e-9):
        if not np.allclose(self.mats[0], np.eye(2 * self.n), atol=1e-12):
            raise OracleError("path must start at the identity")
        steps = np.max(np.abs(np.diff(self.mats, axis=0)), axis=(1, 2))
        if steps.size and float(np.max(steps)) > eta:
            raise OracleError(
                f"step-size bound violated: max entry change {float(np.max(steps)):.3g} > {eta}")
        J = standard_J(self.n)
        worst = 0.0
        for idx in (0, len(self.mats) // 2, len(self.mats) - 1):
            M = self.mats[idx]
            worst = max(worst, float(np.max(np.abs(M.T @ J @ M - J))))
        if worst > sympl_tol:
            raise OracleError(f"samples are not symplectic to {sympl_tol}: defect {worst:.3g}")
        return self

    def endpoint(self) -> np.ndarray:
        return self.mats[-1]

    def evaluate(self, t: float) -> np.ndarray:
        if self.evaluator is not None:
            return self.evaluator(t)
        # fallback: linear interpolation between bracketing samples
        i = int(np.searchsorted(self.ts, t, side="right")) - 1
        i = min(max(i, 0), len(self.ts) - 2)
        t0, t1 = self.ts[i], self.ts[i + 1]
        if t1 == t0:
            return self.mats[i]
        w = (t - t0) / (t1 - t0)
        return (1 - w) * self.mats[i] + w * self.mats[i + 1]


def path_from_quadratic_hamiltonian(B, tau: float, steps: int = DEFAULT_STEPS,
                                    check: bool = True) -> SampledSymplecticPath:
    """Solution samples of d gamma/dt = J B gamma with constant symmetric B.

    Samples come from repeated multiplication by the one-step exponential
    (scaling-and-squaring under the hood); the evaluator recomputes the
    exact exponential at arbitrary t.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] % 2:
        raise OracleError("B must be a 2n x 2n matrix")
    if not np.allclose(B, B.T, atol=1e-12):
        raise OracleError("B must be symmetric")
    n = B.shape[0] // 2
    X = standard_J(n) @ B
    dt = tau / steps
    step = expm(X * dt)
    mats = np.empty((steps + 1, 2 * n, 2 * n))
    mats[0] = np.eye(2 * n)
    for i in range(1, steps + 1):
        mats[i] = step @ mats[i - 1]
    ts = np.linspace(0.0, tau, steps + 1)
    path = SampledSymplecticPath(n=n, tau=float(tau), ts=ts, mats=mats,
                                 evaluator=lambda t: expm(X * t))
    if check:
        path.validate()
    return path


def path_from_samples(ts, mats, n: int, tau: float) -> SampledSymplecticPath:
    return SampledSymplecticPath(n=n, tau=tau, ts=ts, mats=mats).validate()


def path_from_matrix_function(f: Callable[[float], np.ndarray], tau: float, n: int,
                              steps: int = DEFAULT_STEPS, check: bool = True) -> SampledSymplecticPath:
    """Sample an explicit matrix path t -> f(t) on [0, tau]; f doubles as evaluator."""
    ts = np.linspace(0.0, tau, steps + 1)
    mats = np.stack([np.asarray(f(t), dtype=float) for t in ts])
    path = SampledSymplecticPath(n=n, tau=float(tau), ts=ts, mats=mats, evaluator=f)
    if check:
        path.validate()
    return path


def path_from_logm(M_target, tau: float = 1.0, steps: int = DEFAULT_STEPS) -> SampledSymplecticPath:
    """The one-parameter path exp(t log M) reaching M_target at t = tau.

    Requires the principal matrix logarithm of M_target to be Hamiltonian,
    which holds for symplectic targets without negative real eigenvalues.
    """
    from scipy.linalg import logm

    M = np.asarray(M_target, dtype=float)
    n = M.shape[0] // 2
    X = logm(M)
    if np.max(np.abs(X.imag)) > 1e-9:
        raise OracleError("target has no real logarithm (negative real eigenvalues?)")
    X = X.real
    J = standard_J(n)
    if np.max(np.abs(J @ X + X.T @ J)) > 1e-7:
        raise OracleError("log of target is not Hamiltonian")
    B = -J @ X
    B = 0.5 * (B + B.T)
    return path_from_quadratic_hamiltonian(B, tau, steps)


def diamond_paths(p1: SampledSymplecticPath, p2: SampledSymplecticPath,
                  steps: int = DEFAULT_STEPS) -> SampledSymplecticPath:
    """Pointwise diamond product of two paths over a common period."""
    if abs(p1.tau - p2.tau) > 1e-12:
        raise OracleError("diamond of paths needs a common period")
    n1, n2 = p1.n, p2.n
    n = n1 + n2
    idx1 = [i if i < n1 else n + (i - n1) for i in range(2 * n1)]
    idx2 = [n1 + i if i < n2 else n + n1 + (i - n2) for i in range(2 * n2)]

    def combine(M1, M2):
        out = np.zeros((2 * n, 2 * n))
        out[np.ix_(idx1, idx1)] = M1
        out[np.ix_(idx2, idx2)] = M2
        return out

    def f(t):
        return combine(p1.evaluate(t), p2.evaluate(t))

    return path_from_matrix_function(f, p1.tau, n, steps=steps, check=False)


def iterate_path(path: SampledSymplecticPath, m: int) -> SampledSymplecticPath:
    """The m-fold iterate gamma^m(t) = gamma(t - j tau) gamma(tau)^j on [0, m tau]."""
    if m < 1:
        raise OracleError("m must be >= 1")
    if m == 1:
        return path
    mono = path.endpoint()
    powers = [np.eye(2 * path.n)]
    for _ in range(m):
        powers.append(mono @ powers[-1])
    ts_parts = []
    mats_parts = []
    for j in range(m):
        sel = slice(0, -1) if j < m - 1 else slice(0, None)
        ts_parts.append(path.ts[sel] + j * path.tau)
        mats_parts.append(path.mats[sel] @ powers[j])
    ts = np.concatenate(ts_parts)
    mats = np.concatenate(mats_parts)

    base_eval = path.evaluator
    tau = path.tau

    def evaluator(t, _powers=powers, _tau=tau, _m=m):
        j = min(int(t // _tau), _m - 1)
        if base_eval is not None:
            return base_eval(t - j * _tau) @ _powers[j]
        return path.evaluate(t - j * _tau) @ _powers[j]

    return SampledSymplecticPath(n=path.n, tau=m * path.tau, ts=ts, mats=mats,
                                 evaluator=evaluator)


def xi_matrix(n: int, t: float, tau: float) -> np.ndarray:
    """The canonical extension block diag(2 - t/tau, (2 - t/tau)^-1) per mode."""
    a = 2.0 - t / tau
    d = np.concatenate([np.full(n, a), np.full(n, 1.0 / a)])
    return np.diag(d)


def extend_with_xi(path: SampledSymplecticPath) -> SampledSymplecticPath:
    """Concatenate: first the canonical arc from diag(2,...,1/2,...) to I, then gamma."""
    n = path.n
    tau = path.tau
    steps = max(64, int(round(tau / max(path.ts[1] - path.ts[0], 1e-12))))
    steps = min(steps, DEFAULT_STEPS)
    xi_ts = np.linspace(0.0, tau, steps + 1)
    xi_mats = np.stack([xi_matrix(n, t, tau) for t in xi_ts])
    ts = np.concatenate([xi_ts[:-1], path.ts + tau])
    mats = np.concatenate([xi_mats[:-1], path.mats])
    junction_index = steps  # index of gamma(0) = I in the combined arrays

    def evaluator(t):
        if t <= tau:
            return xi_matrix(n, t, tau)
        return path.evaluate(t - tau)

    return SampledSymplecticPath(n=n, tau=tau + path.tau, ts=ts, mats=mats,
                                 evaluator=evaluator, junction_index=junction_index)


# ----- crossing machinery ---------------------------------------------------


def _d_batch(mats: np.ndarray, omega: complex, n: int) -> np.ndarray:
    """Vectorized D_omega over stacked samples (real part; the function is
    real on Sp(2n) up to roundoff)."""
    A = mats.astype(complex) - omega * np.eye(2 * n)
    det = np.linalg.det(A)
    pref = (-1) ** (n - 1) * np.conj(omega) ** n
    return (pref * det).real


def _d_single(M: np.ndarray, omega: complex, n: int) -> float:
    return float(_d_batch(M[None, :, :], omega, n)[0])


def _kernel(M: np.ndarray, omega: complex, tol: float):
    A = M.astype(complex) - omega * np.eye(M.shape[0])
    u, s, vh = np.linalg.svd(A)
    scale = max(1.0, float(s[0]))
    k = int(np.sum(s < tol * scale))
    if k == 0:
        return np.zeros((M.shape[0], 0), dtype=complex), s[-1] / scale
    V = vh.conj().T[:, -k:]
    return V, s[-1] / scale


def _nu_of(M: np.ndarray, omega: complex, tol: float = RANK_TOL) -> int:
    A = M.astype(complex) - omega * np.eye(M.shape[0])
    s = np.linalg.svd(A, compute_uv=False)
    scale = max(1.0, float(s[0]))
    return int(np.sum(s < tol * scale))


class _PerturbedPath:
    """gamma multiplied by e^{-pert (t - t0)/(T - t0) J} past the junction."""

    def __init__(self, ext: SampledSymplecticPath, pert: float):
        self.ext = ext
        self.pert = pert
        self.n = ext.n
        self.t0 = ext.ts[ext.junction_index]
        self.T = ext.ts[-1]
        self.J = standard_J(ext.n)

    def _rot(self, t: float) -> np.ndarray:
        if self.pert == 0.0 or t <= self.t0:
            return np.eye(2 * self.n)
        s = -self.pert * (t - self.t0) / (self.T - self.t0)
        return math.cos(s) * np.eye(2 * self.n) + math.sin(s) * self.J

    def sample_mats(self) -> np.ndarray:
        if self.pert == 0.0:
            return self.ext.mats
        out = self.ext.mats.copy()
        for i in range(self.ext.junction_index, len(out)):
            out[i] = out[i] @ self._rot(self.ext.ts[i])
        return out

    def evaluate(self, t: float) -> np.ndarray:
        return self.ext.evaluate(t) @ self._rot(t)

    def generator(self, t: float, h: float) -> np.ndarray:
        """Symmetric S(t) = -J dM/dt M^{-1}, central difference (one-sided at ends)."""
        t_lo = max(t - h, 0.0)
        t_hi = min(t + h, self.T)
        M_lo = self.evaluate(t_lo)
        M_hi = self.evaluate(t_hi)
        Mdot = (M_hi - M_lo) / (t_hi - t_lo)
        M = self.evaluate(t)
        S = -self.J @ (Mdot @ np.linalg.inv(M))
        return 0.5 * (S + S.T)

    def generator_onesided(self, t: float, h: float, forward: bool) -> np.ndarray:
        sgn = 1.0 if forward else -1.0
        M0 = self.evaluate(t)
        M1 = self.evaluate(t + sgn * h)
        M2 = self.evaluate(t + 2 * sgn * h)
        Mdot = sgn * (-3 * M0 + 4 * M1 - M2) / (2 * h)
        S = -self.J @ (Mdot @ np.linalg.inv(M0))
        return 0.5 * (S + S.T)

    def windowed_generator(self, t: float, h: float) -> np.ndarray:
        """Effective generator over [t, t+h] via the matrix logarithm.

        Robust against reparametrizations with vanishing derivative: the
        average rotation direction over the window decides the junction
        contribution, not the instantaneous speed."""
        from scipy.linalg import logm

        M0 = self.evaluate(t)
        M1 = self.evaluate(t + h)
        X = logm(M1 @ np.linalg.inv(M0))
        S = -self.J @ X.real / h
        return 0.5 * (S + S.T)


def _signature(gram: np.ndarray, tol: float):
    """(n_plus - n_minus, degenerate?) of a Hermitian form."""
    if gram.size == 0:
        return 0, False
    ev = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
    scale = max(1.0, float(np.max(np.abs(ev))))
    degenerate = bool(np.any(np.abs(ev) < tol * scale))
    sig = int(np.sum(ev > 0)) - int(np.sum(ev < 0))
    return sig, degenerate


def _half_signature_regularized(S: np.ndarray, reg: float) -> int:
    """Half signature with near-zero eigenvalues pushed down (infimum side);
    the result is an integer because dim is even and zeros count negative."""
    ev = np.linalg.eigvalsh(S)
    scale = max(1.0, float(np.max(np.abs(ev))))
    n_plus = int(np.sum(ev > reg * scale))
    n_rest = len(ev) - n_plus
    return (n_plus - n_rest) // 2


@dataclass
class _ScanResult:
    index: int
    events: list = field(default_factory=list)


def _fail_or_perturb(pp, pert_allowed: bool, msg: str):
    if pp.pert == 0.0 and pert_allowed:
        return _NeedPerturbation(msg)
    return OracleError(msg + " (not resolved after refinement)")


def _bisect_zero(f, t_lo, t_hi, f_lo, f_hi, width: float):
    while t_hi - t_lo > width:
        t_mid = 0.5 * (t_lo + t_hi)
        f_mid = f(t_mid)
        if f_mid == 0.0:
            return t_mid
        if (f_lo < 0) != (f_mid < 0):
            t_hi, f_hi = t_mid, f_mid
        else:
            t_lo, f_lo = t_mid, f_mid
    return 0.5 * (t_lo + t_hi)


def _golden_min(f, t_lo, t_hi, width: float):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = t_lo, t_hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    return t, f(t)


def _scan(pp: _PerturbedPath, omega: complex, *, kernel_tol: float,
          form_tol: float, pert_allowed: bool) -> _ScanResult:
    ext = pp.ext
    n = pp.n
    ts = ext.ts
    N = len(ts)
    mats = pp.sample_mats()
    d = _d_batch(mats, omega, n)
    scale = float(np.max(np.abs(d)))
    if scale == 0.0:
        raise _NeedPerturbation("D_omega vanishes along the whole path")
    z_tol = 1e-10 * scale
    dip_tol = 1e-3 * scale
    is_zero = np.abs(d) <= z_tol

    if pp.pert == 0.0 and pert_allowed:
        # unperturbed pass: any zero run beyond the junction sample means the
        # path sits inside the crossing variety and needs the perturbation
        run = 0
        for i in range(len(d)):
            run = run + 1 if is_zero[i] else 0
            if run >= 4:
                raise _NeedPerturbation("path runs inside the crossing variety")

    jidx = ext.junction_index
    t_junction = ts[jidx]
    T = ts[-1]
    total = 0
    events = []

    # junction: for omega = 1 the concatenation point sits on the variety
    if abs(omega - 1.0) < 1e-12:
        step = ts[min(jidx + 1, N - 1)] - t_junction
        h = max(4 * step, (T - t_junction) * 1e-9)
        S0 = pp.windowed_generator(t_junction, h)
        ev = np.linalg.eigvalsh(S0)
        ev_scale = max(1.0, float(np.max(np.abs(ev))))
        if pp.pert == 0.0 and pert_allowed and bool(np.any(np.abs(ev) < 1e-6 * ev_scale)):
            raise _NeedPerturbation("degenerate junction form")
        contrib = _half_signature_regularized(S0, 1e-7)
        total += contrib
        events.append(("junction", float(t_junction), contrib))

    def d_at(t: float) -> float:
        return _d_single(pp.evaluate(t), omega, n)

    width = 1e-12 * max(1.0, T)
    boundary_margin = 50 * width
    handled = []

    def contribute(t_star: float, kind: str) -> None:
        nonlocal total
        if any(abs(t_star - t0) <= 10 * width for t0 in handled):
            return
        if T - t_star < boundary_margin:
            # a minimum pinned at the endpoint is a crossing pushed off the
            # domain by the perturbation, not an interior crossing
            return
        M = pp.evaluate(t_star)
        V, _rel = _kernel(M, omega, kernel_tol)
        k = V.shape[1]
        if k == 0:
            return  # near miss: no unit eigenvalue actually crosses here
        if kind == "touch" and k == 1:
            # D_omega keeps its sign through a one-dimensional kernel: the
            # path dips onto a single smooth sheet and returns, so the two
            # resolved crossings cancel (Jordan-block passages land here)
            total += 0
            handled.append(t_star)
            events.append((kind, float(t_star), 0))
            return
        if kind == "crossing" and k % 2 == 0:
            raise _fail_or_perturb(pp, pert_allowed,
                                   f"sign change with even kernel at t = {t_star:.6g}")
        h = (T - t_junction) * 1e-6
        if T - t_star < 2 * h:
            S = pp.generator_onesided(t_star, h, forward=False)
        else:
            S = pp.generator(t_star, h)
        gram = V.conj().T @ S @ V
        sig, degenerate = _signature(gram, form_tol)
        if degenerate:
            raise _fail_or_perturb(pp, pert_allowed,
                                   f"degenerate crossing form at t = {t_star:.6g}")
        total += sig
        handled.append(t_star)
        events.append((kind, float(t_star), sig))

    # walk the samples past the junction; the extension arc keeps D_omega < 0.
    # The zero cluster attached to the junction is the junction itself.
    i = jidx
    if is_zero[jidx]:
        while i < N - 1 and is_zero[i + 1]:
            i += 1
        i += 1
    scan_start = i

    while i < N - 1:
        a, b = d[i], d[i + 1]
        if is_zero[i]:
            j = i
            while j < N - 1 and is_zero[j + 1]:
                j += 1
            lo = max(i - 1, scan_start - 1, jidx)
            hi = min(j + 1, N - 1)
            t_star, _ = _golden_min(lambda t: abs(d_at(t)), ts[lo], ts[hi], width)
            kind = "crossing" if d[lo] * d[hi] < 0 else "touch"
            contribute(t_star, kind)
            i = j + 1
            continue
        if a * b < 0:
            t_star = _bisect_zero(d_at, ts[i], ts[i + 1], a, b, width)
            contribute(t_star, "crossing")
            i += 1
            continue
        # interior |d| local minimum below the dip threshold: possible touch
        if i > scan_start and abs(a) < dip_tol and \
                abs(d[i - 1]) >= abs(a) and abs(b) >= abs(a):
            t_star, f_star = _golden_min(lambda t: abs(d_at(t)), ts[i - 1], ts[i + 1], width)
            if f_star < abs(a):
                contribute(t_star, "touch")
        i += 1

    # edge minimum at the last sample: a touch may sit inside the final step
    if N - 2 >= scan_start and abs(d[N - 1]) < dip_tol and abs(d[N - 2]) >= abs(d[N - 1]):
        t_star, f_star = _golden_min(lambda t: abs(d_at(t)), ts[N - 2], T, width)
        contribute(t_star, "touch")

    return _ScanResult(index=total, events=events)


def cz_index(path: SampledSymplecticPath, omega, eps: float = DEFAULT_PERT,
             rank_tol: float = RANK_TOL, max_retries: int = 5,
             return_events: bool = False):
    """(i_omega, nu_omega) of a sampled path by geometric crossing count.

    omega is a unit-circle complex number (1 and -1 included).  eps is the
    perturbation scale of the degenerate-endpoint convention: when
    D_omega(gamma(tau)) = 0 the count is taken on gamma e^{-eps (t/T) J},
    whose endpoint is gamma(tau) e^{-eps J}.  The scan retries with smaller
    perturbations until two consecutive scales agree; persistent tangential
    ambiguity is an explicit error.
    """
    omega = complex(omega)
    if abs(abs(omega) - 1.0) > 1e-9:
        raise OracleError(f"omega must lie on the unit circle, got {omega!r}")
    nu = _nu_of(path.endpoint(), omega, rank_tol)

    # retry plan: perturbation scale shrinks while the sampling density
    # doubles (doubling needs an evaluator and is capped at MAX_STEPS)
    endpoint_degenerate = nu > 0
    if endpoint_degenerate:
        plan = [(eps, 1), (eps / 4, 2), (eps / 16, 4), (eps / 64, 8)]
    else:
        plan = [(0.0, 1), (eps, 1), (eps / 4, 2), (eps / 16, 4), (eps / 64, 8)]
    kernel_tol = 1e-8
    form_tol = 1e-5

    extensions = {}

    def ext_at(factor: int):
        if factor not in extensions:
            extensions[factor] = extend_with_xi(_resample(path, factor))
        return extensions[factor]

    last_error = None
    for attempt, (pert, factor) in enumerate(plan[:max_retries]):
        try:
            ext = ext_at(factor)
            res = _scan(_PerturbedPath(ext, pert), omega,
                        kernel_tol=kernel_tol, form_tol=form_tol,
                        pert_allowed=(attempt + 1 < len(plan)))
            if pert > 0.0:
                res2 = _scan(_PerturbedPath(ext, pert / 2), omega,
                             kernel_tol=kernel_tol, form_tol=form_tol,
                             pert_allowed=False)
                if res2.index != res.index:
                    last_error = OracleError(
                        f"unstable count under perturbation ({res.index} vs {res2.index})")
                    continue
            if return_events:
                return res.index, nu, res.events
            return res.index, nu
        except _NeedPerturbation as exc:
            last_error = exc
        except OracleError as exc:
            last_error = exc
    raise OracleError(f"crossing count did not stabilize after {max_retries} attempts: {last_error}")


def _resample(path: SampledSymplecticPath, factor: int) -> SampledSymplecticPath:
    """Rebuild the samples at factor-times density via the evaluator;
    sample-list paths without an evaluator keep their resolution."""
    if factor <= 1 or path.evaluator is None:
        return path
    steps = min((len(path.ts) - 1) * factor, MAX_STEPS)
    ts = np.linspace(0.0, path.tau, steps + 1)
    mats = np.stack([path.evaluator(t) for t in ts])
    return SampledSymplecticPath(n=path.n, tau=path.tau, ts=ts, mats=mats,
                                 evaluator=path.evaluator)


def estimate_splitting(path: SampledSymplecticPath, omega, epsilons=(1e-3, 1e-4),
                       eps: float = DEFAULT_PERT):
    """Oracle estimate of the splitting pair (S^+, S^-) at omega.

    Computes i at omega e^{+- i eps'} for each probe eps' and requires the
    two probes to agree (stability check of the one-sided limits).
    """
    omega = complex(omega)
    i_base, _ = cz_index(path, omega, eps=eps)
    plus_vals = []
    minus_vals = []
    for e in epsilons:
        wp = omega * complex(math.cos(e), math.sin(e))
        wm = omega * complex(math.cos(e), -math.sin(e))
        plus_vals.append(cz_index(path, wp, eps=eps)[0] - i_base)
        minus_vals.append(cz_index(path, wm, eps=eps)[0] - i_base)
    if len(set(plus_vals)) != 1 or len(set(minus_vals)) != 1:
        raise OracleError(
            f"splitting estimate unstable across probes: +{plus_vals}, -{minus_vals}")
    return plus_vals[0], minus_vals[0]
