"""TOML configuration with CLI override semantics.

Sections: [surface] (kind plus optional user-curve coefficient lists),
[lattice] (r, h, eps), [run] (outputs, transform parameters, eps lists).
Every CLI flag overrides its config counterpart.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .bjorling import BjorlingData, builtin_bjorling, curve_from_coefficients
from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml


@dataclass
class Settings:
    surface: str = "cylinder"
    r: float = 1.0
    h: float = 0.3
    eps: float = 0.05
    eps_list: list = field(default_factory=list)
    out: str | None = None
    export_quantities: str | None = None
    kind: str | None = None      # transform kind
    C: float | None = None
    seed: tuple | None = None
    user_curve: dict | None = None


def load_config(path: str | None) -> Settings:
    settings = Settings()
    if path is None:
        return settings
    try:
        with open(path, "rb") as fh:
            raw = _toml.load(fh)
    except (OSError, _toml.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    surf = raw.get("surface", {})
    if "kind" in surf:
        settings.surface = str(surf["kind"])
    if settings.surface == "user_curve":
        settings.user_curve = {
            "f_poly": surf.get("f_poly", [[], [], []]),
            "f_trig": surf.get("f_trig", [[], [], []]),
            "n_poly": surf.get("n_poly", [[], [], []]),
            "n_trig": surf.get("n_trig", [[], [], []]),
        }
    lat = raw.get("lattice", {})
    for key in ("r", "h", "eps"):
        if key in lat:
            setattr(settings, key, float(lat[key]))
    run = raw.get("run", {})
    if "eps_list" in run:
        settings.eps_list = [float(e) for e in run["eps_list"]]
    for key in ("out", "export_quantities", "kind"):
        if key in run:
            setattr(settings, key, str(run[key]))
    if "C" in run:
        settings.C = float(run["C"])
    if "seed" in run:
        seed = run["seed"]
        if not (isinstance(seed, list) and len(seed) == 3):
            raise ConfigError("run.seed must be a list of three numbers")
        settings.seed = tuple(float(c) for c in seed)
    return settings


def bjorling_from_settings(settings: Settings) -> BjorlingData:
    if settings.surface in ("cylinder", "sphere_mercator"):
        return builtin_bjorling(settings.surface, r=settings.r)
    if settings.surface == "user_curve":
        if not settings.user_curve:
            raise ConfigError("user_curve surface needs coefficient lists in [surface]")
        uc = settings.user_curve
        f, fp, fpp = curve_from_coefficients(uc["f_poly"], uc["f_trig"])
        n, np_, npp = curve_from_coefficients(uc["n_poly"], uc["n_trig"])
        return BjorlingData(f=f, fp=fp, n=n, np_=np_, r=settings.r,
                            name="user_curve", fpp=fpp, npp=npp)
    raise ConfigError(f"unknown surface kind {settings.surface!r}")
