"""Closed-form propagators and their factorization routes.

Four kernels: the free particle and the oscillator on the full line, and
their half-line counterparts with an inverse-square term, expressed through
a modified Bessel function of order n.  Each kernel can also be assembled
from a disentangling identity (quadratic phase factors around a re-timed
inverse-square kernel, plus a dilation rescaling for the appendix routes);
the assembled and direct values must agree, which is the core consistency
check of the package.

All square roots are principal-branch; the i in 1/sqrt(i t) carries the
phase e^{-i pi/4} for t > 0.  Evaluation refuses within ``CAUSTIC_TOL`` of a
zero of sin(w t), where the oscillator kernels are distributional; no
continuation phase beyond the first caustic is asserted anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import bessel_i_complex
from .sl2rep import PhysParams, factor_coeffs

__all__ = [
    "CAUSTIC_TOL",
    "NEAR_CAUSTIC",
    "ROUTE_IDS",
    "KERNEL_NAMES",
    "CausticSingularity",
    "KernelPoint",
    "KernelValue",
    "effective_time",
    "free_kernel",
    "sho_kernel",
    "radial_h0_kernel",
    "radial_sho_kernel",
    "kernel_values",
    "kernel_via_route",
]

CAUSTIC_TOL = 1e-8
# Above the refusal tolerance but close enough that the caller should know
# the prefactor is blowing up.
NEAR_CAUSTIC = 1e-6

ROUTE_IDS = ("DIRECT", "ELEMENT", "A1a", "A2a", "A3a")
KERNEL_NAMES = ("free", "sho", "radial_h0", "radial_sho")


class CausticSingularity(ValueError):
    """Requested time is within CAUSTIC_TOL of a zero of sin(w t)."""

    def __init__(self, t: float, omega: float, caustic_tol: float):
        k = round(omega * t / math.pi)
        self.t = t
        self.nearest_caustic_time = k * math.pi / omega
        super().__init__(
            f"|sin(w t)| <= {caustic_tol:g} at t={t}; nearest caustic at "
            f"t={self.nearest_caustic_time}"
        )


@dataclass(frozen=True)
class KernelPoint:
    """Evaluation point (x1, x2, t); x1 and x2 may be broadcastable arrays."""

    x1: object
    x2: object
    t: float


@dataclass(frozen=True)
class KernelValue:
    """Kernel value plus a note on how close the evaluation sat to a caustic."""

    value: object
    branch_note: str = "principal"


def effective_time(t, omega: float):
    """The re-parameterized time sin(w t)/w that maps the oscillator kernels
    onto the w = 0 ones; reduces to t itself as w -> 0."""
    if omega == 0.0:
        return t
    return np.sin(omega * t) / omega


def _branch_note(t, params: PhysParams, caustic_tol: float) -> str:
    if params.omega == 0.0:
        return "principal"
    s = abs(np.sin(params.omega * t))
    if s <= caustic_tol:
        raise CausticSingularity(t, params.omega, caustic_tol)
    return "near_caustic" if s < NEAR_CAUSTIC else "principal"


def _check_time(t):
    if t == 0:
        raise ValueError("t = 0 is not a valid kernel argument (delta limit)")


def _check_positive(*arrays):
    for a in arrays:
        if np.any(np.asarray(a).real <= 0):
            raise ValueError("half-line kernels require strictly positive positions")


def _free_value(x1, x2, t, params: PhysParams):
    h, m = params.hbar, params.m
    pref = np.sqrt(m / (2.0 * np.pi * h)) / np.sqrt(1j * t)
    return pref * np.exp(1j * m * (np.asarray(x1) - np.asarray(x2)) ** 2 / (2.0 * h * t))


def _sho_value(x1, x2, t, params: PhysParams):
    h, m, w = params.hbar, params.m, params.omega
    s = np.sin(w * t)
    c = np.cos(w * t)
    x1 = np.asarray(x1)
    x2 = np.asarray(x2)
    pref = np.sqrt(m * w / (2.0 * np.pi * h)) / np.sqrt(1j * s)
    phase = 1j * m * w / (2.0 * h) * ((x1**2 + x2**2) * c / s - 2.0 * x1 * x2 / s)
    return pref * np.exp(phase)


def _radial_h0_bessel_value(x1, x2, t, params: PhysParams):
    """Direct Bessel-route evaluation, any order n >= 0.

    The Bessel argument m x1 x2 / (i hbar t) is purely imaginary for real t,
    so the modified Bessel factor reduces to an ordinary (bounded) Bessel
    function through the imaginary-axis connection and never overflows.
    """
    h, m = params.hbar, params.m
    x1 = np.asarray(x1)
    x2 = np.asarray(x2)
    z = m * x1 * x2 / (1j * h * t)
    i_fac = bessel_i_complex(params.n, z)
    return (m * np.sqrt(x1 * x2) / (1j * h * t)) * i_fac * np.exp(
        1j * m * (x1**2 + x2**2) / (2.0 * h * t)
    )


def _radial_h0_value(x1, x2, t, params: PhysParams):
    # Order 1/2 is exactly the Dirichlet image combination of free kernels;
    # using it as the evaluation path keeps the equality bit-exact.
    if params.n == 0.5:
        return _free_value(x1, x2, t, params) - _free_value(x1, -np.asarray(x2), t, params)
    return _radial_h0_bessel_value(x1, x2, t, params)


def _radial_sho_bessel_value(x1, x2, t, params: PhysParams):
    h, m, w = params.hbar, params.m, params.omega
    x1 = np.asarray(x1)
    x2 = np.asarray(x2)
    s = np.sin(w * t)
    c = np.cos(w * t)
    z = m * w * x1 * x2 / (1j * h * s)
    i_fac = bessel_i_complex(params.n, z)
    return (m * w * np.sqrt(x1 * x2) / (1j * h * s)) * i_fac * np.exp(
        1j * m * w * (x1**2 + x2**2) * c / (2.0 * h * s)
    )


def _radial_sho_value(x1, x2, t, params: PhysParams):
    if params.n == 0.5:
        # Quadratic phases around the image combination at the effective
        # time; identical code path to the CLI's image-formula mode.
        coeffs = factor_coeffs("MAIN", t, params)
        te = 2.0 * params.m * params.hbar * coeffs.beta
        x1 = np.asarray(x1)
        x2 = np.asarray(x2)
        ph1 = np.exp(-1j * coeffs.alpha * x1**2)
        ph2 = np.exp(-1j * coeffs.alpha * x2**2)
        return ph1 * _radial_h0_value(x1, x2, te, params) * ph2
    return _radial_sho_bessel_value(x1, x2, t, params)


def free_kernel(pt: KernelPoint, params: PhysParams) -> KernelValue:
    """Free-particle kernel sqrt(m/(2 pi i hbar t)) e^{i m (x1-x2)^2 / 2 hbar t}.

    Its modulus sqrt(m/(2 pi hbar |t|)) is independent of the positions, and
    t -> -t conjugates the value.
    """
    _check_time(pt.t)
    v = _free_value(pt.x1, pt.x2, pt.t, params)
    return KernelValue(value=v if np.ndim(v) else complex(v))


def sho_kernel(pt: KernelPoint, params: PhysParams) -> KernelValue:
    """Full-line oscillator kernel (coupling-free case).

    sqrt(m w/(2 pi i hbar sin wt)) exp{(i m w/2 hbar)[(x1^2+x2^2) cot wt
    - 2 x1 x2 / sin wt]}.  Requires w > 0 and |sin wt| above the caustic
    tolerance; as w -> 0 it goes over into the free kernel.
    """
    if params.omega <= 0:
        raise ValueError("sho_kernel requires omega > 0; use free_kernel at omega = 0")
    _check_time(pt.t)
    note = _branch_note(pt.t, params, CAUSTIC_TOL)
    v = _sho_value(pt.x1, pt.x2, pt.t, params)
    return KernelValue(value=v if np.ndim(v) else complex(v), branch_note=note)


def radial_h0_kernel(pt: KernelPoint, params: PhysParams) -> KernelValue:
    """Half-line kernel of the pure inverse-square Hamiltonian.

    (m sqrt(x1 x2)/(i hbar t)) I_n(m x1 x2/(i hbar t))
    e^{i m (x1^2+x2^2)/(2 hbar t)} on x1, x2 > 0.  Order 1/2 reduces to the
    image-method difference of free kernels and is evaluated that way.
    """
    _check_time(pt.t)
    _check_positive(pt.x1, pt.x2)
    v = _radial_h0_value(pt.x1, pt.x2, pt.t, params)
    return KernelValue(value=v if np.ndim(v) else complex(v))


def radial_sho_kernel(pt: KernelPoint, params: PhysParams) -> KernelValue:
    """Half-line kernel with both the inverse-square and oscillator terms.

    (m w sqrt(x1 x2)/(i hbar sin wt)) I_n(m w x1 x2/(i hbar sin wt))
    e^{(i m w/2 hbar)(x1^2+x2^2) cot wt}; equals the quadratic phases wrapped
    around the w = 0 kernel at effective time sin(wt)/w.
    """
    if params.omega <= 0:
        raise ValueError(
            "radial_sho_kernel requires omega > 0; use radial_h0_kernel at omega = 0"
        )
    _check_time(pt.t)
    _check_positive(pt.x1, pt.x2)
    note = _branch_note(pt.t, params, CAUSTIC_TOL)
    v = _radial_sho_value(pt.x1, pt.x2, pt.t, params)
    return KernelValue(value=v if np.ndim(v) else complex(v), branch_note=note)


_KERNEL_FUNCS = {
    "free": free_kernel,
    "sho": sho_kernel,
    "radial_h0": radial_h0_kernel,
    "radial_sho": radial_sho_kernel,
}


def kernel_values(name: str, x1, x2, t, params: PhysParams):
    """Raw complex kernel values for array arguments; used by propagation."""
    if name not in _KERNEL_FUNCS:
        raise ValueError(f"unknown kernel {name!r}; choose from {KERNEL_NAMES}")
    return _KERNEL_FUNCS[name](KernelPoint(x1=x1, x2=x2, t=t), params).value


def kernel_via_route(
    route: str,
    pt: KernelPoint,
    params: PhysParams,
    halfline: bool = True,
) -> KernelValue:
    """Kernel assembled along one factorization route.

    ``DIRECT`` evaluates the closed form.  ``ELEMENT`` wraps the w = 0
    kernel at the effective time sin(wt)/w in the quadratic phase factors of
    the symmetric factorization.  The appendix routes additionally carry a
    dilation factor e^{+-hbar gamma} and a rescaled position argument
    (position eigenstates pick up e^{hbar gamma} and a stretch e^{2 hbar
    gamma} under the dilation).  The inverse-square factor is the w = 0
    kernel at effective time 2 m hbar beta.

    ``halfline=False`` selects the coupling-free full-line assembly (order
    pinned to 1/2, i.e. lam = 0) whose direct form is ``sho_kernel``.

    All routes must agree with DIRECT; the appendix routes require
    cos(wt) > 0 on top of the caustic window.
    """
    if route not in ROUTE_IDS:
        raise ValueError(f"unknown route {route!r}; choose from {ROUTE_IDS}")
    if params.omega <= 0:
        raise ValueError("routes re-parameterize time and require omega > 0")
    if halfline:
        _check_positive(pt.x1, pt.x2)
        base = _radial_h0_value
        direct = radial_sho_kernel
    else:
        if params.n != 0.5:
            raise ValueError("full-line routes require lam = 0, i.e. n = 1/2")
        base = _free_value
        direct = sho_kernel

    if route == "DIRECT":
        return direct(pt, params)

    _check_time(pt.t)
    note = _branch_note(pt.t, params, CAUSTIC_TOL)
    h = params.hbar
    x1 = np.asarray(pt.x1)
    x2 = np.asarray(pt.x2)

    if route == "ELEMENT":
        coeffs = factor_coeffs("MAIN", pt.t, params)
        te = 2.0 * params.m * h * coeffs.beta
        v = (
            np.exp(-1j * coeffs.alpha * x1**2)
            * base(x1, x2, te, params)
            * np.exp(-1j * coeffs.alpha * x2**2)
        )
        return KernelValue(value=v if np.ndim(v) else complex(v), branch_note=note)

    coeffs = factor_coeffs(route, pt.t, params)
    te = 2.0 * params.m * h * coeffs.beta
    g = coeffs.gamma
    if route == "A1a":
        v = (
            np.exp(-1j * coeffs.alpha * x1**2)
            * math.exp(-h * g)
            * base(x1 * math.exp(-2.0 * h * g), x2, te, params)
        )
    elif route == "A2a":
        x1s = x1 * math.exp(-2.0 * h * g)
        v = (
            math.exp(-h * g)
            * np.exp(-1j * coeffs.alpha * x1s**2)
            * base(x1s, x2, te, params)
        )
    else:  # A3a
        v = (
            np.exp(-1j * coeffs.alpha * x1**2)
            * math.exp(h * g)
            * base(x1, x2 * math.exp(2.0 * h * g), te, params)
        )
    return KernelValue(value=v if np.ndim(v) else complex(v), branch_note=note)
