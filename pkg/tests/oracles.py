"""Independent reference computations for the test suite.

Everything here works from point values only: central finite differences
for derivatives and plain numpy for linear algebra. None of it calls the
symbolic differentiation or the jet machinery under test.
"""

from __future__ import annotations

import numpy as np

from gencrf import exprcore as ec
from gencrf.tensorcalc import evaluate_array

H = 1e-5


def random_expr(rng: np.random.Generator, dim: int, depth: int = 3) -> ec.Expr:
    """Smooth random expression over ``dim`` coordinates (no poles, no log/sqrt)."""
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.6:
            return ec.coord(int(rng.integers(dim)))
        return ec.const(round(float(rng.uniform(-2, 2)), 3))
    op = rng.choice(["add", "sub", "mul", "mul", "sin", "cos", "exp", "pow"])
    a = random_expr(rng, dim, depth - 1)
    if op in ("sin", "cos"):
        return ec.func(op, a)
    if op == "exp":
        # keep exp arguments bounded on the unit box
        return ec.exp(ec.mul(ec.const(0.5), ec.sin(a)))
    if op == "pow":
        return ec.power(a, int(rng.integers(2, 4)))
    b = random_expr(rng, dim, depth - 1)
    return {"add": ec.add, "sub": ec.sub, "mul": ec.mul}[op](a, b)


def random_poly(rng: np.random.Generator, dim: int, degree: int = 2) -> ec.Expr:
    """Random polynomial with coefficients in [-1, 1]."""
    terms = [ec.const(float(rng.uniform(-1, 1)))]
    for _ in range(degree + dim):
        mono = ec.const(float(rng.uniform(-1, 1)))
        for _ in range(int(rng.integers(1, degree + 1))):
            mono = ec.mul(mono, ec.coord(int(rng.integers(dim))))
        terms.append(mono)
    return ec.total(terms)


def values(comp, points) -> np.ndarray:
    return evaluate_array(np.asarray(comp, dtype=object), np.atleast_2d(points))[0]


def fd_grad(comp, points, h: float = H) -> np.ndarray:
    """Central-difference gradient: shape (N, *comp.shape, m)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m = pts.shape[1]
    out = []
    for i in range(m):
        e = np.zeros(m)
        e[i] = h
        out.append((values(comp, pts + e) - values(comp, pts - e)) / (2 * h))
    return np.stack(out, axis=-1)


def fd_lie_bracket(X, Y, points) -> np.ndarray:
    """``[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i`` from point values."""
    Xv, Yv = values(X, points), values(Y, points)
    dX, dY = fd_grad(X, points), fd_grad(Y, points)
    return np.einsum("nj,nij->ni", Xv, dY) - np.einsum("nj,nij->ni", Yv, dX)


def fd_lie_form(X, a, points) -> np.ndarray:
    """``(L_X a)_i = X^j d_j a_i + a_j d_i X^j``."""
    Xv, av = values(X, points), values(a, points)
    dX, da = fd_grad(X, points), fd_grad(a, points)
    return np.einsum("nj,nij->ni", Xv, da) + np.einsum("nj,nji->ni", av, dX)


def fd_courant(X, a, Y, b, points) -> np.ndarray:
    """Courant bracket of ``(X, a)`` and ``(Y, b)`` from point values; shape (N, 2m)."""
    pts = np.atleast_2d(points)
    m = len(X)
    ay = ec.total(ec.mul(a[j], Y[j]) for j in range(m))
    bx = ec.total(ec.mul(b[j], X[j]) for j in range(m))
    df = fd_grad(np.array([ec.sub(ay, bx)], dtype=object), pts)[:, 0, :]
    form = fd_lie_form(X, b, pts) - fd_lie_form(Y, a, pts) + 0.5 * df
    return np.concatenate([fd_lie_bracket(X, Y, pts), form], axis=1)


def fd_d_one(a, points) -> np.ndarray:
    """``(da)_ij = d_i a_j - d_j a_i``."""
    g = fd_grad(a, points)  # (N, j, i)
    return np.swapaxes(g, 1, 2) - g


def fd_d_two(w, points) -> np.ndarray:
    """``(dw)_ijk = d_i w_jk + d_j w_ki + d_k w_ij``."""
    g = fd_grad(w, points)  # (N, j, k, i)
    t = np.moveaxis(g, -1, 1)  # (N, i, j, k)
    return t + np.transpose(t, (0, 2, 3, 1)) + np.transpose(t, (0, 3, 1, 2))


def fd_christoffel(gamma, points) -> np.ndarray:
    """``Gamma^k_ij`` from point values of the metric."""
    g = values(gamma, points)
    dg = fd_grad(gamma, points)  # (N, i, j, l) = d_l g_ij
    low = 0.5 * (np.einsum("njli->nlij", dg) + np.einsum("nilj->nlij", dg)
                 - np.einsum("nijl->nlij", dg))
    return np.einsum("nkl,nlij->nkij", np.linalg.inv(g), low)


def g_matrix(m: int) -> np.ndarray:
    I = np.eye(m)
    Z = np.zeros((m, m))
    return 0.5 * np.block([[Z, I], [I, Z]])


def phi_matrix(A, pi, sigma) -> np.ndarray:
    """Numeric ``[[A, -pi], [-sigma, -A^T]]`` for stacked (N, m, m) blocks."""
    return np.concatenate([
        np.concatenate([A, -pi], axis=-1),
        np.concatenate([-sigma, -np.swapaxes(A, -1, -2)], axis=-1),
    ], axis=-2)


def compatible_pair(rng: np.random.Generator, m: int, rank: int):
    """Constant (gamma, F) with F gamma-skew and F^3 + F = 0 of the given even rank.

    ``gamma = L L^T`` and ``F = L^-T K L^T`` with ``K`` a skew matrix whose
    nonzero blocks are planar rotations by a right angle.
    """
    L = np.eye(m) + 0.3 * rng.standard_normal((m, m))
    Q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    K0 = np.zeros((m, m))
    for k in range(rank // 2):
        K0[2 * k, 2 * k + 1], K0[2 * k + 1, 2 * k] = -1.0, 1.0
    K = Q @ K0 @ Q.T
    return L @ L.T, np.linalg.inv(L).T @ K @ L.T


def random_quadruple(rng: np.random.Generator, m: int, rank_p: int, rank_m: int):
    """Random compatible quadruple with coordinate-dependent gamma and psi.

    ``gamma = L L^T`` with ``L`` a constant matrix plus small sine terms, and
    ``F_pm = L^-T K_pm L^T`` as above. Built with the package's expression
    types, but the linear algebra identities it relies on are elementary.
    """
    from gencrf.exprcore import CoordinateDomain
    from gencrf.genmetric import MetricQuadruple
    from gencrf.tensorcalc import EndField, MetricField, TwoFormField, emat, symbolic_inverse

    L = np.empty((m, m), dtype=object)
    L0 = np.eye(m) + 0.3 * rng.standard_normal((m, m))
    for i in range(m):
        for j in range(m):
            L[i, j] = ec.add(ec.const(L0[i, j]),
                             ec.mul(ec.const(0.1 * rng.uniform(-1, 1)), ec.sin(ec.coord(int(rng.integers(m))))))
    Li = symbolic_inverse(L)

    def skew(rank):
        Q, _ = np.linalg.qr(rng.standard_normal((m, m)))
        K0 = np.zeros((m, m))
        for k in range(rank // 2):
            K0[2 * k, 2 * k + 1], K0[2 * k + 1, 2 * k] = -1.0, 1.0
        K = Q @ K0 @ Q.T
        Kc = np.vectorize(ec.const, otypes=[object])(K)
        return EndField(emat(Li.T, emat(Kc, L.T)))

    psi = np.empty((m, m), dtype=object)
    for i in range(m):
        psi[i, i] = ec.ZERO
        for j in range(i + 1, m):
            psi[i, j] = ec.mul(ec.const(0.3), random_expr(rng, m, 1))
            psi[j, i] = ec.neg(psi[i, j])
    gamma = MetricField(emat(L, L.T))
    return MetricQuadruple(gamma, TwoFormField(psi), skew(rank_p), skew(rank_m),
                           CoordinateDomain.cube(m))
