"""Pure numpy implementation of the constant-potential transfer step.

Mirrors ``_transfer.pyx`` exactly; used when the compiled extension is not
available and as the reference for the parity tests.
"""
import numpy as np

# |z| below this uses the power series for cos(sqrt z), sin(sqrt z)/sqrt z
SERIES_RADIUS = 0.5
_NTERMS = 12


def entire_cs(z):
    """Return ``(c, S, dS)`` for ``c = cos(sqrt z)``, ``S = sin(sqrt z)/sqrt z``
    and ``dS = dS/dz``.

    All three are entire in ``z``, so the branch of the square root never
    matters. *z* may be a scalar or an array.
    """
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        c, S, dS = entire_cs(z[None])
        return c[0], S[0], dS[0]
    small = np.abs(z) < SERIES_RADIUS

    # direct evaluation everywhere; small-|z| entries are overwritten below
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.sqrt(z)
        c = np.cos(r)
        S = np.where(small, 1.0, np.sin(r) / np.where(small, 1.0, r))
        dS = (c - S) / (2.0 * np.where(small, 1.0, z))

    if np.any(small):
        zs = z[small]
        cs = np.zeros_like(zs)
        Ss = np.zeros_like(zs)
        dSs = np.zeros_like(zs)
        term_c = np.ones_like(zs)
        term_s = np.ones_like(zs)
        for n in range(_NTERMS):
            cs += term_c
            Ss += term_s
            # d/dz of term_s = n * term_s / z, written without dividing by z
            if n >= 1:
                dSs += n * term_s_prev * (-1.0 / ((2 * n) * (2 * n + 1)))
            term_s_prev = term_s
            term_c = term_c * (-zs) / ((2 * n + 1) * (2 * n + 2))
            term_s = term_s * (-zs) / ((2 * n + 2) * (2 * n + 3))
        c = c.copy()
        S = S.copy()
        dS = dS.copy()
        c[small] = cs
        S[small] = Ss
        dS[small] = dSs
    return c, S, dS


def transfer(widths, heights, energies, psi0=0.0, dpsi0=1.0, derivative=False):
    """Advance ``(psi, psi')`` across consecutive constant-potential segments.

    Returns an array of shape ``(2, n)`` with ``psi`` and ``psi'`` at the last
    edge, or ``(4, n)`` with the energy derivatives appended when *derivative*
    is set.
    """
    E = np.atleast_1d(np.asarray(energies, dtype=complex))
    psi = np.full(E.shape, psi0, dtype=complex)
    dpsi = np.full(E.shape, dpsi0, dtype=complex)
    psi_e = np.zeros_like(psi)
    dpsi_e = np.zeros_like(psi)

    for d, v in zip(widths, heights):
        if d <= 0.0:
            continue
        q = 2.0 * (E - v)
        c, S, dS = entire_cs(q * d * d)
        s = d * S
        m21 = -q * s
        if derivative:
            dm11 = -d * d * S
            dm12 = 2.0 * d ** 3 * dS
            dm21 = -2.0 * s - q * dm12
            psi_e, dpsi_e = (
                dm11 * psi + c * psi_e + dm12 * dpsi + s * dpsi_e,
                dm21 * psi + m21 * psi_e + dm11 * dpsi + c * dpsi_e,
            )
        psi, dpsi = c * psi + s * dpsi, m21 * psi + c * dpsi

    if derivative:
        return np.array([psi, dpsi, psi_e, dpsi_e])
    return np.array([psi, dpsi])
