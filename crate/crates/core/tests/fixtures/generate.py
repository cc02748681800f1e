"""Regenerates the operator fixtures from full tensor-product matrices.

Every operator is built on (qubit)^N x (photon 0..1), exponentiated there when
needed, and only then restricted to the N + 2 zero/one-excitation states
ordered as vacuum, atom 1 .. atom N, photon.
"""
import json
import sys
from functools import reduce

import numpy as np
from scipy.linalg import expm

EPS, K, GAMMA, OMEGA, OMEGA0 = 1e5, 1e4, 1e3, 1e14, 1e14

lower = np.array([[0, 1], [0, 0]], dtype=complex)  # |g> = (1, 0), |e> = (0, 1)
eye2 = np.eye(2, dtype=complex)


def kron_all(ops):
    return reduce(np.kron, ops)


def atom_op(op, i, n):
    return kron_all([op if k == i else eye2 for k in range(n)] + [eye2])


def field_op(op, n):
    return kron_all([eye2] * n + [op])


def basis_indices(n):
    def index(bits):
        return int("".join(str(b) for b in bits), 2)

    vac = index([0] * (n + 1))
    atoms = [index([1 if k == h else 0 for k in range(n)] + [0]) for h in range(n)]
    photon = index([0] * n + [1])
    return [vac] + atoms + [photon]


def restrict(m, n):
    idx = basis_indices(n)
    return m[np.ix_(idx, idx)]


def fixtures(n):
    sm = [atom_op(lower, i, n) for i in range(n)]
    sp = [s.conj().T for s in sm]
    a = field_op(lower, n)
    dim = 2 ** (n + 1)

    u = np.eye(dim, dtype=complex)
    for i in range(2, n + 1):
        delta = -np.arctan(1 / np.sqrt(i - 1))
        gen = sp[0] @ sm[i - 1] - sm[0] @ sp[i - 1]
        u = u @ expm(delta * gen)

    s_minus = sum(sm)
    sz = 0.5 * sum(sp[i] @ sm[i] - sm[i] @ sp[i] for i in range(n))
    s_plus = s_minus.conj().T
    sx = 0.5 * (s_plus + s_minus)
    sy = -0.5j * (s_plus - s_minus)
    s2 = sx @ sx + sy @ sy + sz @ sz
    num = a.conj().T @ a + sum(sp[i] @ sm[i] for i in range(n))
    h_frame = (OMEGA0 - OMEGA) * sum(sp[i] @ sm[i] for i in range(n)) + EPS * sum(
        a.conj().T @ sm[i] + sp[i] @ a for i in range(n)
    )

    out = {
        "u": u,
        "s_z": sz,
        "s_minus": s_minus,
        "s_squared": s2,
        "photon_annihilation": a,
        "excitation_number": num,
        "hamiltonian_ac_in_frame": h_frame,
    }
    for i in range(n):
        out[f"lowering_{i}"] = sm[i]
    out = {k: restrict(v, n) for k, v in out.items()}
    out["gamma_matrix"] = np.full((n, n), GAMMA, dtype=complex)
    return {k: [[[z.real, z.imag] for z in row] for row in v] for k, v in out.items()}


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "."
    for n in (2, 3):
        with open(f"{target}/operators_n{n}.json", "w") as f:
            json.dump(fixtures(n), f, indent=1)
            f.write("\n")
