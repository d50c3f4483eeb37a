"""Regenerates crates/core/data/states.json.

Every set is rebuilt from its defining construction and checked for
equiangularity and tightness before it is written.
"""
import json
import itertools
import numpy as np
from scipy.optimize import minimize, least_squares

OUT = "crates/core/data/states.json"


def harmonic(n, diffset):
    m = len(diffset)
    w = np.exp(2j * np.pi / n)
    return np.array([[w ** (d * k) for d in diffset] for k in range(n)]) / np.sqrt(m)


def simplex(m):
    # Harmonic frame on Z_{m+1} with the difference set {1..m}.
    return harmonic(m + 1, list(range(1, m + 1)))


def legendre(a, q):
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def paley_conference(q):
    """Conference matrix of order q+1: skew for q = 3 mod 4, symmetric for q = 1 mod 4."""
    n = q + 1
    c = np.zeros((n, n))
    eps = 1 if q % 4 == 1 else -1
    for i in range(1, n):
        c[0, i] = 1
        c[i, 0] = eps
    for i in range(q):
        for j in range(q):
            c[i + 1, j + 1] = legendre(j - i, q)
    return c


def from_gram(g, m):
    vals, vecs = np.linalg.eigh(g)
    idx = np.argsort(vals)[::-1][:m]
    v = (vecs[:, idx] * np.sqrt(vals[idx])).conj().T
    return v.T  # rows are states


def conference_etf(q):
    c = paley_conference(q)
    n = q + 1
    if q % 4 == 3:
        g = np.eye(n) + 1j * c / np.sqrt(n - 1)
    else:
        g = np.eye(n) + c / np.sqrt(n - 1)
    return from_gram(g, n // 2)


def weyl_heisenberg_orbit(fid):
    d = len(fid)
    w = np.exp(2j * np.pi / d)
    x = np.roll(np.eye(d), 1, axis=0)
    z = np.diag([w ** k for k in range(d)])
    out = []
    for p in range(d):
        for s in range(d):
            out.append(np.linalg.matrix_power(x, p) @ np.linalg.matrix_power(z, s) @ fid)
    return np.array(out)


def sic4():
    d = 4
    rng = np.random.default_rng(7)

    def unpack(v):
        f = v[:d] + 1j * v[d:]
        return f / np.linalg.norm(f)

    def cost(v):
        s = weyl_heisenberg_orbit(unpack(v))
        g = np.abs(s.conj() @ s.T) ** 2
        return np.sum(g ** 2)

    best = None
    for _ in range(20):
        r = minimize(cost, rng.normal(size=2 * d), method="BFGS", options={"gtol": 1e-12, "maxiter": 10000})
        if best is None or r.fun < best.fun:
            best = r

    def residuals(v):
        s = weyl_heisenberg_orbit(unpack(v))
        return np.abs(s[1:].conj() @ s[0]) ** 2 - 1 / (d + 1)

    polished = least_squares(residuals, best.x, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return weyl_heisenberg_orbit(unpack(polished.x))


def mub4():
    i2 = np.eye(2)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1.0, -1.0]).astype(complex)
    classes = [
        [np.kron(z, i2), np.kron(i2, z)],
        [np.kron(x, i2), np.kron(i2, x)],
        [np.kron(y, i2), np.kron(i2, y)],
        [np.kron(x, z), np.kron(z, y)],
        [np.kron(z, x), np.kron(y, z)],
    ]
    states = []
    for a, b in classes:
        h = a + 2 * b + 0.5 * (a @ b)
        _, vecs = np.linalg.eigh(h)
        for k in range(4):
            v = vecs[:, k]
            v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v) > 1e-9)]))
            states.append(v)
    return np.array(states)


def check_etf(s, tol=1e-12):
    n, m = s.shape
    g = np.abs(s.conj() @ s.T) ** 2
    target = (n - m) / (m * (n - 1))
    off = g[~np.eye(n, dtype=bool)]
    frame = s.T @ s.conj()
    ok = np.allclose(np.diag(g), 1, atol=tol) and np.max(np.abs(off - target)) < tol
    tight = np.max(np.abs(frame - n / m * np.eye(m))) < tol
    return ok and tight


def check_mub(s, m, tol=1e-12):
    g = np.abs(s.conj() @ s.T) ** 2
    n = len(s)
    for i in range(n):
        for j in range(n):
            same = i // m == j // m
            want = (1.0 if i == j else 0.0) if same else 1 / m
            if abs(g[i, j] - want) > tol:
                return False
    return True


def encode(s):
    return [[[float(f"{z.real:.17g}"), float(f"{z.imag:.17g}")] for z in row] for row in s]


def main():
    real3 = np.array([[np.cos(t), np.sin(t)] for t in (0, np.pi / 3, 2 * np.pi / 3)], dtype=complex)
    hesse = weyl_heisenberg_orbit(np.array([0, 1, -1], dtype=complex) / np.sqrt(2))
    entries = [
        ("etf", "real lines at 0, 60 and 120 degrees", real3),
        ("sic", "qubit tetrahedron from the skew Paley conference matrix of order 4", conference_etf(3)),
        ("etf", "simplex: harmonic frame on Z_4", simplex(3)),
        ("etf", "icosahedron lines from the symmetric Paley conference matrix of order 6", conference_etf(5)),
        ("etf", "harmonic frame on Z_7 with difference set {1,2,4}", harmonic(7, [1, 2, 4])),
        ("sic", "Hesse SIC: Weyl-Heisenberg orbit of (0,1,-1)/sqrt(2)", hesse),
        ("etf", "simplex: harmonic frame on Z_5", simplex(4)),
        ("etf", "harmonic frame on Z_7 with difference set {0,3,5,6}", harmonic(7, [0, 3, 5, 6])),
        ("etf", "from the skew Paley conference matrix of order 8", conference_etf(7)),
        ("etf", "harmonic frame on Z_13 with difference set {0,1,3,9}", harmonic(13, [0, 1, 3, 9])),
        ("sic", "Weyl-Heisenberg covariant SIC in dimension 4 (numerical fiducial)", sic4()),
    ]
    out = []
    for kind, note, s in entries:
        n, m = s.shape
        assert check_etf(s), (kind, n, m)
        out.append({"kind": kind, "dim": m, "count": n, "source": note, "vectors": encode(s)})
    mub = mub4()
    assert check_mub(mub, 4)
    out.append({"kind": "mub", "dim": 4, "count": 20, "source": "two-qubit Pauli stabilizer bases", "vectors": encode(mub)})
    with open(OUT, "w") as f:
        json.dump({"sets": out}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
