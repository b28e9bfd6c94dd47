"""Experiment configuration: INI-style sections of ``key = value`` lines.

Grammar
-------
::

    [experiment]
    kind = mu_sweep | soft_sweep | epsilon_sweep | uniformity_sweep | emt | bvp_check
    n = 256                 # nodes per inclusion curve
    n_omega = 256           # nodes on the outer boundary
    seed = 0
    workers = 1
    out = results.csv

    [material]
    lambda0 = 0.5
    mu0 = 0.5
    lambda = 1              # inclusion lambda (first value is used)
    mu = 10, 100, 1000      # swept shear moduli
    soft = 0.1, 0.01        # swept kappa = mu values (soft_sweep, uniformity_sweep)

    [geometry]
    inclusions = ellipse(1, 0.6); circle(0.5) @ 2, 0
    reference = circle(1)   # unit-scale shape B
    omega = circle(3)
    z0 = 0.3, -0.2
    epsilon = 0.2, 0.1, 0.05, 0.025

    [data]
    field = linear(0, 1, 1, 0) + harmonic2(0.3)

A curve is ``kind(p, ...) [@ cx, cy] [* scale]`` and several curves are
separated by ``;``.  Field terms are ``rigid(l[, c])``,
``linear(a11, a12, a21, a22)``, ``harmonic2(c)`` (the field
``c (x1^2 - x2^2, -2 x1 x2)``) and ``monomial(a1, a2, j)``, joined by ``+``.
Comments start with ``#`` (anywhere) or ``;`` (at the start of a line).
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, replace

from .fields import PolynomialField, linear_field, monomial_field, rigid_field
from .geometry import Curve, make_curve
from .material import LameParams, StrongConvexityError

KINDS = ("mu_sweep", "soft_sweep", "epsilon_sweep", "uniformity_sweep", "emt", "bvp_check")


class ConfigError(ValueError):
    """Invalid configuration; the message names the section, key and line."""


DEFAULTS = {
    "lambda0": 0.5,
    "mu0": 0.5,
    "lambda": (1.0,),
    "mu": (10.0, 1e2, 1e3, 1e4, 1e5),
    "soft": (1e-1, 1e-2, 1e-3, 1e-4, 1e-5),
    "inclusions": "ellipse(1, 0.6)",
    "reference": "circle(1)",
    "omega": "circle(3)",
    "z0": (0.3, -0.2),
    "epsilon": (0.2, 0.1, 0.05, 0.025),
    "field": "linear(0, 1, 1, 0)",
}

# overrides applied per experiment kind when the key is absent
KIND_DEFAULTS = {
    "epsilon_sweep": {"inclusion_lambda": 1.0, "mu": (2.0,),
                      "field": "linear(0.2, 1, 1, 0) + harmonic2(0.3)"},
    "uniformity_sweep": {"mu": (1e-2, 1.0, 1e2, 1e4), "soft": (1e-3,), "epsilon": (0.05,),
                         "field": "linear(0.2, 1, 1, 0) + harmonic2(0.3)"},
    "emt": {"lambda0": 0.0, "mu0": 1.0, "lambda": (0.0,), "mu": (2.0,), "inclusions": "circle(1)"},
    "bvp_check": {"inclusions": "ellipse(0.5, 0.3) @ 0.3, -0.2",
                  "field": "linear(0.2, 1, 1, 0) + harmonic2(0.3)"},
}


@dataclass
class ExperimentConfig:
    kind: str
    lambda0: float = 0.5
    mu0: float = 0.5
    lam: tuple = (1.0,)
    mu: tuple = (10.0, 1e2, 1e3, 1e4, 1e5)
    soft: tuple = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
    inclusions: tuple = ()
    reference: Curve | None = None
    omega: Curve | None = None
    z0: tuple = (0.3, -0.2)
    epsilon: tuple = (0.2, 0.1, 0.05, 0.025)
    field_spec: str = "linear(0, 1, 1, 0)"
    n: int = 256
    n_omega: int = 256
    seed: int = 0
    workers: int = 1
    out: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def background(self) -> LameParams:
        return LameParams(self.lambda0, self.mu0)

    @property
    def data_field(self) -> PolynomialField:
        return parse_field(self.field_spec)

    def with_n(self, n: int) -> "ExperimentConfig":
        return replace(self, n=int(n), n_omega=int(n))


_CURVE_RE = re.compile(
    r"^\s*(?P<kind>[a-z]+)\s*\((?P<params>[^)]*)\)\s*"
    r"(?:@\s*(?P<cx>[-+0-9.eE]+)\s*,\s*(?P<cy>[-+0-9.eE]+))?\s*"
    r"(?:\*\s*(?P<scale>[-+0-9.eE]+))?\s*$"
)


def parse_curve(text: str) -> Curve:
    m = _CURVE_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse curve {text!r}")
    params = [float(v) for v in m["params"].split(",") if v.strip()]
    center = (float(m["cx"]), float(m["cy"])) if m["cx"] is not None else (0.0, 0.0)
    scale = float(m["scale"]) if m["scale"] is not None else 1.0
    return make_curve(m["kind"], *params, center=center, scale=scale)


def parse_curves(text: str) -> tuple:
    return tuple(parse_curve(part) for part in text.split(";") if part.strip())


_TERM_RE = re.compile(r"^\s*(?P<name>[a-z0-9_]+)\s*\((?P<args>[^)]*)\)\s*$")


def parse_field(text: str) -> PolynomialField:
    terms = []
    for part in text.split("+"):
        m = _TERM_RE.match(part)
        if not m:
            raise ValueError(f"cannot parse field term {part.strip()!r}")
        args = [float(v) for v in m["args"].split(",") if v.strip()]
        name = m["name"]
        if name == "rigid" and len(args) in (1, 2):
            f = rigid_field(int(args[0]), args[1] if len(args) == 2 else 1.0)
        elif name == "linear" and len(args) == 4:
            f = linear_field([[args[0], args[1]], [args[2], args[3]]])
        elif name == "harmonic2" and len(args) == 1:
            c = args[0]
            f = PolynomialField([(0, (2, 0), c), (0, (0, 2), -c), (1, (1, 1), -2 * c)])
        elif name == "monomial" and len(args) == 3:
            f = monomial_field((int(args[0]), int(args[1])), int(args[2]))
        else:
            raise ValueError(f"unknown field term {part.strip()!r}")
        terms.extend(f.terms)
    return PolynomialField(terms, kind="config")


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _line_of(text: str, section: str, key: str) -> int | None:
    cur = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            cur = s[1:-1].strip()
        elif cur == section and "=" in s and s.split("=", 1)[0].strip().lower() == key:
            return i
    return None


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"malformed config: {err}") from err

    def fail(section, key, msg):
        line = _line_of(text, section, key)
        where = f"[{section}] {key}" + (f" (line {line})" if line else "")
        raise ConfigError(f"{where}: {msg}")

    if not cp.has_option("experiment", "kind"):
        raise ConfigError("[experiment] kind is required")
    kind = cp.get("experiment", "kind").strip()
    if kind not in KINDS:
        fail("experiment", "kind", f"unknown experiment kind {kind!r}")
    defaults = dict(DEFAULTS)
    defaults.update(KIND_DEFAULTS.get(kind, {}))

    def get(section, key, conv, default):
        if cp.has_option(section, key):
            raw = cp.get(section, key)
            try:
                return conv(raw)
            except (ValueError, TypeError) as err:
                fail(section, key, str(err))
        return default

    cfg = ExperimentConfig(kind=kind)
    cfg.n = get("experiment", "n", int, 256)
    cfg.n_omega = get("experiment", "n_omega", int, cfg.n)
    cfg.seed = get("experiment", "seed", int, 0)
    cfg.workers = get("experiment", "workers", int, 1)
    cfg.out = get("experiment", "out", str.strip, None)
    cfg.lambda0 = get("material", "lambda0", float, defaults["lambda0"])
    cfg.mu0 = get("material", "mu0", float, defaults["mu0"])
    lam_default = (defaults["inclusion_lambda"],) if "inclusion_lambda" in defaults else defaults["lambda"]
    cfg.lam = get("material", "lambda", _floats, lam_default)
    cfg.mu = get("material", "mu", _floats, defaults["mu"])
    cfg.soft = get("material", "soft", _floats, defaults["soft"])
    cfg.inclusions = get("geometry", "inclusions", parse_curves, parse_curves(defaults["inclusions"]))
    cfg.reference = get("geometry", "reference", parse_curve, parse_curve(defaults["reference"]))
    cfg.omega = get("geometry", "omega", parse_curve, parse_curve(defaults["omega"]))
    cfg.z0 = get("geometry", "z0", _floats, defaults["z0"])
    cfg.epsilon = get("geometry", "epsilon", _floats, defaults["epsilon"])
    cfg.field_spec = get("data", "field", str.strip, defaults["field"])

    # semantic validation
    if cfg.n % 2 or cfg.n < 16:
        fail("experiment", "n", "must be an even integer >= 16")
    if cfg.n_omega % 2 or cfg.n_omega < 16:
        fail("experiment", "n_omega", "must be an even integer >= 16")
    if cfg.workers < 1:
        fail("experiment", "workers", "must be positive")
    try:
        LameParams(cfg.lambda0, cfg.mu0)
    except StrongConvexityError as err:
        fail("material", "mu0" if cfg.mu0 <= 0 else "lambda0", str(err))
    for key, vals in (("mu", cfg.mu), ("soft", cfg.soft)):
        for v in vals:
            if not v > 0:
                fail("material", key, f"value {v:g} must be positive")
    for v in cfg.lam:
        for m in cfg.mu:
            try:
                LameParams(v, m)
            except StrongConvexityError as err:
                fail("material", "lambda", str(err))
    if len(cfg.z0) != 2:
        fail("geometry", "z0", "needs two coordinates")
    for e in cfg.epsilon:
        if not e > 0:
            fail("geometry", "epsilon", f"value {e:g} must be positive")
    try:
        parse_field(cfg.field_spec)
    except ValueError as err:
        fail("data", "field", str(err))
    for key, vals in (("mu", cfg.mu), ("soft", cfg.soft), ("epsilon", cfg.epsilon)):
        if len(vals) > 1 and len(set(vals)) != len(vals):
            fail("material" if key != "epsilon" else "geometry", key, "sweep values must be distinct")
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def default_config(kind: str) -> ExperimentConfig:
    return parse_config(f"[experiment]\nkind = {kind}\n")
