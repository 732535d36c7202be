"""Closed-form manufactured solution for the coupled problem on
``(0,1)^2`` (fluid) and ``(0,1) x (1,2)`` (structure), interface ``y = 1``.

With ``th = x + y + 2t``, ``a = x + t`` and ``b = y + t``::

    u   = (sin th, -sin th)
    p   = -2 nu_f cos th + 2 nu_s cos a sin b
    eta = (sin a sin b, cos a cos b)

so that ``div u = 0``, ``div eta = 0`` and ``d eta/dt = u`` everywhere.
Forcings follow by substitution into the momentum equations.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MmsExact:
    rho_f: float = 1.0
    nu_f: float = 1.0
    rho_s: float = 1.0
    nu_s: float = 1.0
    lam: float = 1.0

    @classmethod
    def from_params(cls, params):
        return cls(params.rho_f, params.nu_f, params.rho_s, params.nu_s, params.lam)

    # fluid -------------------------------------------------------------
    def u(self, x, y, t):
        s = np.sin(x + y + 2 * t)
        return np.stack([s, -s], axis=-1)

    def grad_u(self, x, y, t):
        c = np.cos(x + y + 2 * t)
        return np.stack([np.stack([c, c], -1), np.stack([-c, -c], -1)], axis=-2)

    def p(self, x, y, t):
        return -2 * self.nu_f * np.cos(x + y + 2 * t) + 2 * self.nu_s * np.cos(x + t) * np.sin(y + t)

    def f_f(self, x, y, t):
        th, a, b = x + y + 2 * t, x + t, y + t
        c, s = np.cos(th), np.sin(th)
        return np.stack(
            [
                2 * self.rho_f * c + 4 * self.nu_f * s - 2 * self.nu_s * np.sin(a) * np.sin(b),
                -2 * self.rho_f * c + 2 * self.nu_s * np.cos(a) * np.cos(b),
            ],
            axis=-1,
        )

    # structure ---------------------------------------------------------
    def eta(self, x, y, t):
        a, b = x + t, y + t
        return np.stack([np.sin(a) * np.sin(b), np.cos(a) * np.cos(b)], axis=-1)

    def grad_eta(self, x, y, t):
        a, b = x + t, y + t
        sa, ca, sb, cb = np.sin(a), np.cos(a), np.sin(b), np.cos(b)
        return np.stack(
            [np.stack([ca * sb, sa * cb], -1), np.stack([-sa * cb, -ca * sb], -1)], axis=-2
        )

    def etadot(self, x, y, t):
        return self.u(x, y, t)

    def f_s(self, x, y, t):
        th, a, b = x + y + 2 * t, x + t, y + t
        c = np.cos(th)
        return np.stack(
            [
                2 * self.rho_s * c + 2 * self.nu_s * np.sin(a) * np.sin(b),
                -2 * self.rho_s * c + 2 * self.nu_s * np.cos(a) * np.cos(b),
            ],
            axis=-1,
        )

    # interface tractions on y = 1 -------------------------------------
    def sigma_f_n(self, x, t):
        """Fluid traction with ``n_f = (0, 1)``."""
        v = -2 * self.nu_s * np.cos(x + t) * np.sin(1 + t)
        return np.stack([np.zeros_like(v), v], axis=-1)

    def sigma_s_n(self, x, t):
        """Structure traction with ``n_s = (0, -1)``."""
        return -self.sigma_f_n(x, t)


def mms_exact(t, x, y, exact=None):
    """All manufactured fields at ``(x, y, t)`` as a dict."""
    e = exact or MmsExact()
    return {
        "u": e.u(x, y, t),
        "p": e.p(x, y, t),
        "eta": e.eta(x, y, t),
        "etadot": e.etadot(x, y, t),
        "f_f": e.f_f(x, y, t),
        "f_s": e.f_s(x, y, t),
        "sigma_f_n": e.sigma_f_n(x, t),
        "sigma_s_n": e.sigma_s_n(x, t),
    }
