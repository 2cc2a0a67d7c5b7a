"""Closed-form descriptors for the real driving functions a(t), lambda(t)."""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

__all__ = ["Drive", "DrivingProfile", "profile_a", "profile_b", "profile_c",
           "DomainError"]


class DomainError(ValueError):
    """An input leaves the domain an operation is defined on."""


@dataclass(frozen=True)
class Drive:
    """One scalar drive: constant, sinusoidal, exponential or tabulated."""

    kind: str
    params: dict

    def value(self, t):
        p = self.params
        if self.kind == "constant":
            return p["value"] * np.ones_like(np.asarray(t, dtype=float))
        if self.kind == "sinusoidal":
            return p["offset"] + p["amplitude"] * np.sin(p["omega"] * np.asarray(t) + p.get("phase", 0.0))
        if self.kind == "exponential":
            return p["amplitude"] * np.exp(p["rate"] * np.asarray(t))
        if self.kind == "tabulated":
            return p["interpolant"](t)
        raise ValueError(f"unknown drive kind {self.kind!r}")

    def deriv(self, t):
        p = self.params
        if self.kind == "constant":
            return np.zeros_like(np.asarray(t, dtype=float))
        if self.kind == "sinusoidal":
            return p["amplitude"] * p["omega"] * np.cos(p["omega"] * np.asarray(t) + p.get("phase", 0.0))
        if self.kind == "exponential":
            return p["rate"] * p["amplitude"] * np.exp(p["rate"] * np.asarray(t))
        if self.kind == "tabulated":
            return p["interpolant"](t, 1)
        raise ValueError(f"unknown drive kind {self.kind!r}")

    def deriv2(self, t):
        p = self.params
        if self.kind == "constant":
            return np.zeros_like(np.asarray(t, dtype=float))
        if self.kind == "sinusoidal":
            return -p["amplitude"] * p["omega"] ** 2 * np.sin(p["omega"] * np.asarray(t) + p.get("phase", 0.0))
        if self.kind == "exponential":
            return p["rate"] ** 2 * p["amplitude"] * np.exp(p["rate"] * np.asarray(t))
        if self.kind == "tabulated":
            return p["interpolant"](t, 2)
        raise ValueError(f"unknown drive kind {self.kind!r}")

    @classmethod
    def constant(cls, value):
        return cls("constant", {"value": float(value)})

    @classmethod
    def sinusoidal(cls, offset, amplitude, omega=1.0, phase=0.0):
        return cls("sinusoidal", {"offset": float(offset), "amplitude": float(amplitude),
                                  "omega": float(omega), "phase": float(phase)})

    @classmethod
    def exponential(cls, amplitude, rate):
        return cls("exponential", {"amplitude": float(amplitude), "rate": float(rate)})


@dataclass(frozen=True)
class DrivingProfile:
    """The pair (a, lambda) driving the oscillator Hamiltonian."""

    a: Drive
    lam: Drive
    name: str = ""

    def check_lambda_nonzero(self, t0: float, t1: float, samples: int = 1024):
        ts = np.linspace(t0, t1, samples)
        vals = np.atleast_1d(self.lam.value(ts))
        if np.min(np.abs(vals)) <= 0.0:
            bad = ts[int(np.argmin(np.abs(vals)))]
            raise DomainError(f"lambda vanishes near t = {bad:.6g}")

    def a_value(self, t):
        return self.a.value(t)

    def lam_value(self, t):
        return self.lam.value(t)

    def lam_deriv(self, t):
        return self.lam.deriv(t)


# Standard test profiles shipped with the artifact.  The model itself does
# not single out any drive; these are reproducible defaults for reports.
def profile_a() -> DrivingProfile:
    return DrivingProfile(Drive.constant(1.0), Drive.constant(0.4), name="a")


def profile_b() -> DrivingProfile:
    return DrivingProfile(Drive.constant(1.0), Drive.sinusoidal(0.4, 0.1), name="b")


def profile_c() -> DrivingProfile:
    return DrivingProfile(Drive.constant(1.0), Drive.exponential(0.5, -0.1), name="c")


PROFILES = {"a": profile_a, "b": profile_b, "c": profile_c}
