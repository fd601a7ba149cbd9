"""Hot loops of the simulator, each in a numba and a pure-numpy flavour.

The two flavours are numerically interchangeable (agreement to rounding);
``backend=None`` picks the one selected by ``QTMCHAOS_DISABLE_NUMBA``.
"""

import numpy as np

from ._accel import default_backend, njit

BACKENDS = ("numba", "numpy")


@njit
def _evolve_numba(psi0, cos_half, sin_half, steps, n_spins):
    dim = psi0.shape[0]
    half = dim // 2
    tape_bit = half // 2
    out = np.empty((steps + 1, dim), dtype=np.complex128)
    out[0] = psi0
    for n in range(1, steps + 1):
        prev = out[n - 1]
        cur = out[n]
        if n % 2 == 1:
            m = (n - 1) // 2
            c = cos_half[m]
            ms = -1j * sin_half[m]
            for i in range(half):
                a = prev[i]
                b = prev[i + half]
                cur[i] = c * a + ms * b
                cur[i + half] = ms * a + c * b
        else:
            for i in range(half):
                if i & tape_bit:
                    cur[i] = prev[i - tape_bit]
                else:
                    cur[i] = prev[i + tape_bit]
            for i in range(half, dim):
                cur[i] = prev[i]
    return out


def _evolve_numpy(psi0, cos_half, sin_half, steps, n_spins):
    dim = psi0.shape[0]
    out = np.empty((steps + 1, dim), dtype=np.complex128)
    out[0] = psi0
    # view: (head, tape spin 1, rest)
    shape = (2, 2, dim // 4)
    for n in range(1, steps + 1):
        prev = out[n - 1].reshape(shape)
        cur = out[n].reshape(shape)
        if n % 2 == 1:
            m = (n - 1) // 2
            c, ms = cos_half[m], -1j * sin_half[m]
            cur[0] = c * prev[0] + ms * prev[1]
            cur[1] = ms * prev[0] + c * prev[1]
        else:
            cur[0] = prev[0, ::-1]
            cur[1] = prev[1]
    return out


@njit
def _reduced_numba(states, n_spins, keep):
    t_len, dim = states.shape
    lo = 1 << (n_spins - keep - 1)
    hi = dim // (2 * lo)
    out = np.zeros((t_len, 2, 2), dtype=np.complex128)
    for t in range(t_len):
        for a in range(hi):
            for b in range(lo):
                base = a * 2 * lo + b
                x0 = states[t, base]
                x1 = states[t, base + lo]
                out[t, 0, 0] += x0 * np.conj(x0)
                out[t, 0, 1] += x0 * np.conj(x1)
                out[t, 1, 1] += x1 * np.conj(x1)
        out[t, 1, 0] = np.conj(out[t, 0, 1])
    return out


def _reduced_numpy(states, n_spins, keep):
    t_len = states.shape[0]
    psi = states.reshape(t_len, 1 << keep, 2, 1 << (n_spins - keep - 1))
    return np.einsum("taib,tajb->tij", psi, psi.conj())


def _pick(backend):
    backend = default_backend() if backend is None else backend
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    return backend


def evolve(psi0, angles, steps, n_spins, backend=None):
    """Alternate head rotations by ``angles`` with QCNOT(head, tape 1).

    Step ``2m-1`` rotates the head by ``angles[m-1]``, step ``2m`` applies the
    QCNOT. Returns every state, shape ``(steps + 1, 2**n_spins)``.
    """
    psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    angles = np.asarray(angles, dtype=np.float64)
    if angles.shape[0] < (steps + 1) // 2:
        raise ValueError("not enough angles for the requested steps")
    cos_half = np.cos(angles / 2)
    sin_half = np.sin(angles / 2)
    if _pick(backend) == "numba":
        return _evolve_numba(psi0, cos_half, sin_half, int(steps), int(n_spins))
    return _evolve_numpy(psi0, cos_half, sin_half, int(steps), int(n_spins))


def reduced_density(states, n_spins, keep, backend=None):
    """Single-spin reduced density matrices for a stack of pure states."""
    states = np.ascontiguousarray(states, dtype=np.complex128)
    squeeze = states.ndim == 1
    if squeeze:
        states = states[None, :]
    if _pick(backend) == "numba":
        out = _reduced_numba(states, int(n_spins), int(keep))
    else:
        out = _reduced_numpy(states, int(n_spins), int(keep))
    return out[0] if squeeze else out


def bloch_components(rho):
    """(l1, l2, l3) from stacked 2x2 matrices, using l3 = P11 - P00."""
    rho = np.asarray(rho)
    l1 = 2.0 * rho[..., 1, 0].real
    l2 = -2.0 * rho[..., 1, 0].imag
    l3 = (rho[..., 1, 1] - rho[..., 0, 0]).real
    return np.stack([l1, l2, l3], axis=-1)
