"""
The function mu^_X representing the Fourier transform of the orbital integral.

Two independent routes:

- direct: Phi_X(Z -> Lambda(<Z, Y>)), an oscillatory orbit integral that is
  stabilized when the first shell beyond the window contributes nothing;
- huntsinger: Phi_X(eta~_{Y,l}) with l <= depth(X); the kernel has compact
  support, certified by its pointwise vanishing on the `support_shells`
  outermost tested shells beyond the window.

Shells are K-invariant, so both routes agree shell by shell. Windows grow
one at a time and the first certified one is kept.
"""

import hashlib
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import mpmath

from padicbench.config import settings
from padicbench.cyclotomic import CycValue
from padicbench.errors import InsufficientPrecision, NoConstancyDepth, SupportNotCertified, WorkbenchError
from padicbench.integrate import q_power
from padicbench.localfield import FieldSpec, character
from padicbench.moyprasad import depth, in_depth_domain
from padicbench.orbital.eta import EtaKernel
from padicbench.orbital.lie import LieElement, OrbitType, classify, discriminant, require_regular, trace_form
from padicbench.orbital.orbits import ShellSums, shell_integral

logger = logging.getLogger(__name__)

DIRECT = "direct"
HUNTSINGER = "huntsinger"
REFERENCE = "reference"
ROUTES = (DIRECT, HUNTSINGER)


@dataclass(frozen=True)
class MuHatReport:
    x: LieElement
    y: LieElement
    value: CycValue
    route: str
    window: int
    stabilized: bool
    shells: Dict[int, CycValue] = dataclass_field(default_factory=dict)
    certificates: Dict[str, object] = dataclass_field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "route": self.route,
            "value": self.value.to_json(),
            "window": self.window,
            "stabilized": self.stabilized,
            "shells": {str(n): v.to_json() for n, v in sorted(self.shells.items())},
            "certificates": self.certificates,
        }


def _initial_depth(y: LieElement) -> int:
    return max(1, settings.conductor - y.min_valuation())


def _direct(x: LieElement, y: LieElement, window: int) -> ShellSums:
    return shell_integral(x, lambda z: character(trace_form(z, y)), window, _initial_depth(y))


def _check_level(x: LieElement, level: Fraction) -> None:
    inside = in_depth_domain(x, level)
    if inside is None:
        raise InsufficientPrecision(f"cannot decide whether X lies in g_{level} from the digits at hand")
    if inside is False:
        raise ValueError(f"X must lie in g_{level} for the kernel cutoff at {level}")


def _huntsinger(x: LieElement, kernel: EtaKernel, window: int, support_shells: int):
    nonzero: Dict[int, int] = defaultdict(int)

    def observe(n: int, z: LieElement, value: CycValue) -> None:
        if not value.is_zero():
            nonzero[n] += 1

    # the orbit of X lies in g_level, so the cutoff indicator is 1 on it
    sums = shell_integral(x, kernel, window + support_shells - 1, _initial_depth(kernel.y), observe)
    sums.statistics["kernel_orbits"] = kernel.orbits
    return sums, dict(nonzero)


def _support_certified(nonzero: Dict[int, int], window: int, support_shells: int = 1) -> bool:
    return not any(nonzero.get(window + k) for k in range(1, support_shells + 1))


def mu_hat(
    x: LieElement,
    y: LieElement,
    route: str = DIRECT,
    window: Optional[int] = None,
    max_window: int = 2,
    level: Optional[Fraction] = None,
    support_shells: int = 1,
) -> MuHatReport:
    """
    mu^_X(Y) by the chosen route.

    With `window` set, that truncation is used and certified (direct: flag;
    huntsinger: SupportNotCertified on failure). Without it, windows
    0, 1, ..., max_window are tried in turn and the first certified one is
    kept. `support_shells` is the number of shells beyond the window on which
    the kernel must vanish (1 or 2).
    """
    if x.is_zero:
        return MuHatReport(x, y, CycValue.one(), REFERENCE, 0, True, {0: CycValue.one()}, {"convention": "mu^_0 = 1"})
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}")
    if support_shells not in (1, 2):
        raise ValueError("support_shells must be 1 or 2")
    require_regular(x)
    require_regular(y)
    candidates = [window] if window is not None else list(range(max_window + 1))

    if route == DIRECT:
        for chosen in candidates:
            sums = _direct(x, y, chosen)
            if sums.stabilized(chosen):
                break
        stabilized = sums.stabilized(chosen)
        if not stabilized:
            logger.warning("direct route not stabilized at window %d", chosen)
        certificates = {"initial_depth": _initial_depth(y), **sums.statistics}
    else:
        level = Fraction(math.floor(depth(x).value)) if level is None else Fraction(level)
        _check_level(x, level)
        kernel = EtaKernel(y)
        for chosen in candidates:
            sums, nonzero = _huntsinger(x, kernel, chosen, support_shells)
            if _support_certified(nonzero, chosen, support_shells):
                break
        else:
            raise SupportNotCertified(
                f"kernel does not vanish on the outer shells (nonzero counts per shell: {nonzero})"
            )
        stabilized = sums.stabilized(chosen)
        certificates = {
            "initial_depth": _initial_depth(y),
            "level": str(level),
            "support_shells": support_shells,
            "nonzero_kernel_cells": {str(n): c for n, c in sorted(nonzero.items())},
            **sums.statistics,
        }
    shells = {n: v for n, v in sums.shells.items() if n <= chosen + support_shells}
    return MuHatReport(x, y, sums.value(chosen), route, chosen, stabilized, shells, certificates)


def mu_hat_both(x: LieElement, y: LieElement, **params) -> Dict[str, object]:
    """Both routes and their agreement verdict."""
    direct = mu_hat(x, y, DIRECT, **params)
    indirect = mu_hat(x, y, HUNTSINGER, **params)
    return {
        "direct": direct,
        "huntsinger": indirect,
        "agree": direct.value == indirect.value,
    }


# local constancy in Y


def _bucket(seed: str, modulus: int) -> int:
    return int.from_bytes(hashlib.sha256(seed.encode()).digest()[:8], "big") % modulus


def perturbations(y: LieElement, m: int, count: int, salt: str = "") -> List[LieElement]:
    """Deterministic samples Y + w^m (d_a, d_b, d_c) with digits drawn by hashing."""
    field = y.field
    out = []
    for i in range(count):
        digits = [_bucket(f"{salt}:{m}:{i}:{coord}", field.p) for coord in "abc"]
        delta = LieElement(*(field.from_int(d).scale_by_uniformizer(m) for d in digits))
        out.append(y + delta)
    return out


@dataclass(frozen=True)
class ConstancyCertificate:
    """
    `minimal` is True when depth - 1 is known to fail: either depth is 1 or
    a witness at depth - 1 changed the value. Otherwise no sampled
    perturbation at depth - 1 moved mu^ and the depth is only an upper bound.
    """

    depth: int
    perturbations: int
    witness: Optional[LieElement]
    minimal: bool

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "perturbations": self.perturbations,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "minimal": self.minimal,
        }


def constancy_certificate(
    x: LieElement,
    y: LieElement,
    max_m: int,
    samples: int = 20,
    route: str = DIRECT,
    **params,
) -> ConstancyCertificate:
    """
    Least m <= max_m with mu^_X equal at `samples` perturbations of Y in
    Y + w^m g(Omega), plus a perturbation at depth m - 1 that changes the value.
    """
    base = mu_hat(x, y, route, **params).value
    found: Optional[int] = None
    for m in range(1, max_m + 1):
        if all(mu_hat(x, y2, route, **params).value == base for y2 in perturbations(y, m, samples)):
            found = m
            break
    if found is None:
        raise NoConstancyDepth(f"no depth up to {max_m} certifies local constancy of mu^")
    witness = None
    if found > 1:
        for y2 in perturbations(y, found - 1, samples, salt="witness"):
            if mu_hat(x, y2, route, **params).value != base:
                witness = y2
                break
    minimal = found == 1 or witness is not None
    if not minimal:
        logger.warning("constancy depth %d is an upper bound: no witness found at depth %d", found, found - 1)
    return ConstancyCertificate(found, samples, witness, minimal)


# niceness


def sample_shell(field: FieldSpec, v: int, count: int, salt: str = "") -> List[LieElement]:
    """Regular semisimple Y with min ord exactly v, digits chosen by hashing."""
    out = []
    attempt = 0
    while len(out) < count and attempt < 50 * count:
        digits = [_bucket(f"{salt}:{field.p}:{v}:{attempt}:{coord}", field.p) for coord in "abc"]
        attempt += 1
        if not any(digits):
            continue
        y = LieElement(*(field.from_int(d).scale_by_uniformizer(v) for d in digits))
        if classify(y) == OrbitType.REGULAR_SEMISIMPLE:
            out.append(y)
    return out


def _abs_discriminant(y: LieElement) -> Fraction:
    d = discriminant(y)
    order, _ = d.ord_ac()
    return q_power(y.field.q, order)


def niceness_scan(
    x: LieElement,
    shells: Sequence[int] = (0, -1, -2),
    samples: int = 2,
    route: str = DIRECT,
    max_window: int = 2,
) -> dict:
    """
    |D(Y)|^(1/2) |mu^_X(Y)|^2 over sampled Y per valuation shell, and the
    partial L1 sums sum_v q^(-3v) (1 - q^-3) mean|mu^_X| in shell order.
    Failing cells are recorded and the scan continues.
    """
    field = x.field
    q = field.q
    rows = []
    errors = []
    partial = []
    running = mpmath.mpf(0)
    maxima: Dict[int, mpmath.mpf] = {}
    for v in shells:
        moduli = []
        for y in sample_shell(field, v, samples):
            try:
                report = mu_hat(x, y, route, max_window=max_window)
            except WorkbenchError as exc:
                logger.warning("niceness cell failed at shell %d: %s", v, exc.detail)
                errors.append({"shell": v, "y": y.to_json(), "error": exc.to_dict()})
                continue
            abs_d = _abs_discriminant(y)
            modulus2 = report.value.abs2()
            weighted = modulus2.scaled(abs_d)
            bounded = mpmath.sqrt(mpmath.mpf(abs_d.numerator) / abs_d.denominator) * modulus2.real_value()
            moduli.append(mpmath.sqrt(modulus2.real_value()))
            maxima[v] = max(maxima.get(v, mpmath.mpf(0)), bounded)
            rows.append({
                "shell": v,
                "y": y.to_json(),
                "abs_discriminant": str(abs_d),
                "mu_hat": report.value.to_json(),
                "abs2": modulus2.to_json(),
                "abs_discriminant_times_abs2": weighted.to_json(),
                "sqrt_discriminant_times_abs2": mpmath.nstr(bounded, 15),
                "window": report.window,
                "stabilized": report.stabilized,
            })
        if moduli:
            mean = mpmath.fsum(moduli) / len(moduli)
            volume = q_power(q, 3 * v) * (1 - Fraction(1, q**3))
            running += mpmath.mpf(volume.numerator) / volume.denominator * mean
            partial.append({"shell": v, "partial_sum": mpmath.nstr(running, 15)})
    increments = []
    previous = mpmath.mpf(0)
    for entry in partial:
        value = mpmath.mpf(entry["partial_sum"])
        increments.append(value - previous)
        previous = value
    shell_zero_max = maxima.get(shells[0]) if shells else None
    bounded_trend = shell_zero_max is not None and all(m <= 2 * shell_zero_max for m in maxima.values())
    return {
        "x": x.to_json(),
        "rows": rows,
        "partial_l1": partial,
        "increments": [mpmath.nstr(i, 15) for i in increments],
        "increments_decreasing": all(b < a for a, b in zip(increments, increments[1:])),
        "bounded_by_shell_zero": bounded_trend,
        "errors": errors,
    }
