"""Suite configuration: an INI-style file parsed with :mod:`configparser`.

Example::

    [run]
    suites = identities, positivity
    manifolds = torus4, hopf_product_3_1
    seed = 7
    points = 100
    out = report.json
    format = json

    [grids]
    quadrature_2d = 64
    quadrature_3d = 32

    [tolerances]
    pointwise = 1e-6
    weyl.tilde_norm = 1e-7

    [manifold:torus5]
    builder = flat_torus
    n = 5
    theta_const = (1.0, 0.5)
"""

from __future__ import annotations

import ast
import configparser
from dataclasses import dataclass, field
from typing import Optional

from ..catalog import BUILDERS, CATALOG_NAMES

SUITES = ("identities", "positivity", "gauge", "hermitian", "hodge")

DEFAULT_TOLERANCES = {
    "pointwise": 1e-6,  # identities between analytic partials
    "fd": 1e-5,  # identities that go through one finite-difference level
    "relative": 1e-5,  # relative cross-path comparisons
    "global": 1e-4,  # quadrature identities, relative
    "gauge": 1e-6,  # co-closure of θ in the computed gauge
    "gauge_recovery": 1e-5,  # sup error of the recovered conformal factor
    "spectral": 1e-4,  # eigenvalue targets
}

DEFAULT_GRIDS = {
    "quadrature_2d": 64,
    "quadrature_3d": 32,
    "sphere": 12,
    "gauge": 32,
    "gauge_4d": 21,  # odd: even 4D grids stall GMRES on Nyquist modes
    "b1_2d": 32,
    "b1_3d": 12,
}


class ConfigError(ValueError):
    """Invalid configuration (reported with exit status 2)."""


@dataclass
class SuiteConfig:
    suites: tuple = SUITES
    manifolds: tuple = CATALOG_NAMES
    seed: int = 20240601
    points: int = 100
    grids: dict = field(default_factory=lambda: dict(DEFAULT_GRIDS))
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    custom: dict = field(default_factory=dict)  # name -> (builder, params)
    out: Optional[str] = None
    csv: Optional[str] = None
    format: str = "json"

    def tolerance(self, check_id: str, kind: str) -> float:
        if check_id in self.tolerances:
            return float(self.tolerances[check_id])
        return float(self.tolerances[kind])

    @property
    def known_manifolds(self) -> tuple:
        return tuple(CATALOG_NAMES) + tuple(self.custom)

    def validate(self) -> "SuiteConfig":
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suite(s) {', '.join(bad)}; valid: {', '.join(SUITES + ('all',))}")
        bad = [m for m in self.manifolds if m not in self.known_manifolds]
        if bad:
            raise ConfigError(f"unknown manifold(s) {', '.join(bad)}; valid: {', '.join(self.known_manifolds)}")
        for name, (builder, _) in self.custom.items():
            if builder not in BUILDERS:
                raise ConfigError(f"manifold {name!r}: unknown builder {builder!r}; valid: {', '.join(BUILDERS)}")
        if self.format not in ("json", "table"):
            raise ConfigError(f"unknown format {self.format!r}; valid: json, table")
        if self.points < 1:
            raise ConfigError("points must be positive")
        for key, val in self.grids.items():
            if key not in DEFAULT_GRIDS:
                raise ConfigError(f"unknown grid key {key!r}; valid: {', '.join(DEFAULT_GRIDS)}")
            if int(val) < 4:
                raise ConfigError(f"grid {key} = {val} is too coarse (minimum 4)")
        return self


def _split(value: str) -> tuple:
    return tuple(v.strip() for v in value.replace("\n", ",").split(",") if v.strip())


def _literal(key: str, value: str):
    try:
        return ast.literal_eval(value)
    except (ValueError, SyntaxError):
        raise ConfigError(f"cannot parse value of {key!r}: {value!r}") from None


def parse_config(text: str) -> SuiteConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    cfg = SuiteConfig()
    known_sections = {"run", "grids", "tolerances"}
    for section in parser.sections():
        if section.startswith("manifold:"):
            name = section.split(":", 1)[1].strip()
            items = dict(parser[section])
            if "builder" not in items:
                raise ConfigError(f"section [{section}] needs a builder key")
            builder = items.pop("builder").strip()
            params = {k: _literal(k, v) for k, v in items.items()}
            cfg.custom[name] = (builder, params)
        elif section not in known_sections:
            raise ConfigError(f"unknown section [{section}]; valid: run, grids, tolerances, manifold:NAME")
    if parser.has_section("run"):
        run = parser["run"]
        allowed = {"suites", "manifolds", "seed", "points", "out", "csv", "format"}
        extra = set(run) - allowed
        if extra:
            raise ConfigError(f"unknown key(s) in [run]: {', '.join(sorted(extra))}; valid: {', '.join(sorted(allowed))}")
        if "suites" in run:
            suites = _split(run["suites"])
            cfg.suites = SUITES if suites == ("all",) else suites
        if "manifolds" in run:
            mans = _split(run["manifolds"])
            cfg.manifolds = CATALOG_NAMES + tuple(cfg.custom) if mans in (("all",), ("default",)) else mans
        elif cfg.custom:
            cfg.manifolds = CATALOG_NAMES + tuple(cfg.custom)
        try:
            cfg.seed = run.getint("seed", cfg.seed)
            cfg.points = run.getint("points", cfg.points)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        cfg.out = run.get("out", cfg.out) or None
        cfg.csv = run.get("csv", cfg.csv) or None
        cfg.format = run.get("format", cfg.format)
    if parser.has_section("grids"):
        for key, val in parser["grids"].items():
            try:
                cfg.grids[key] = int(val)
            except ValueError:
                raise ConfigError(f"grid {key} must be an integer, got {val!r}") from None
    if parser.has_section("tolerances"):
        for key, val in parser["tolerances"].items():
            try:
                cfg.tolerances[key] = float(val)
            except ValueError:
                raise ConfigError(f"tolerance {key} must be a number, got {val!r}") from None
    return cfg.validate()


def load_config(path: str) -> SuiteConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
