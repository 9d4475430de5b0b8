"""Parametric Lévy processes that drift to +infinity.

Five families are supported:

``DeterministicDrift``      xi_t = b t
``CompoundPoissonDrift``    xi_t = b t + sum of Poisson(rate) jumps
``BrownianDrift``           xi_t = b t + sigma W_t
``StableSubordinator``      positive alpha-stable subordinator, E exp(-q xi_t) = exp(-t c q^alpha)
``StableSubordinatorDrift`` the same plus a drift b >= 0

Models are frozen dataclasses and are validated on construction, so an
existing :class:`LevyModel` always drifts to +infinity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import ConfigError, RejectsModel, Unavailable
from .rng import RandomStream

ALPHA_MIN = 0.05
ALPHA_MAX = 0.95


class Family(str, enum.Enum):
    DETERMINISTIC_DRIFT = "DeterministicDrift"
    COMPOUND_POISSON_DRIFT = "CompoundPoissonDrift"
    BROWNIAN_DRIFT = "BrownianDrift"
    STABLE_SUBORDINATOR = "StableSubordinator"
    STABLE_SUBORDINATOR_DRIFT = "StableSubordinatorDrift"


class MeanClass(str, enum.Enum):
    FINITE_MEAN_POSITIVE = "FiniteMeanPositive"
    INFINITE_MEAN = "InfiniteMean"


@dataclass(frozen=True)
class JumpLaw:
    """Jump-size distribution of a compound Poisson process.

    ``constant``     every jump equals `param` (any nonzero real)
    ``exponential``  exponential with rate `param`
    ``pareto``       P(J > x) = x**(-param) for x >= 1; infinite mean when param <= 1
    """

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in ("constant", "exponential", "pareto"):
            raise RejectsModel(f"unknown jump law {self.kind!r}")
        if not math.isfinite(self.param):
            raise RejectsModel("jump parameter must be finite")
        if self.kind == "constant" and self.param == 0.0:
            raise RejectsModel("constant jumps of size 0 are not jumps")
        if self.kind in ("exponential", "pareto") and self.param <= 0.0:
            raise RejectsModel(f"{self.kind} jump parameter must be positive")

    @classmethod
    def constant(cls, value: float) -> "JumpLaw":
        return cls("constant", float(value))

    @classmethod
    def exponential(cls, rate: float) -> "JumpLaw":
        return cls("exponential", float(rate))

    @classmethod
    def pareto(cls, index: float) -> "JumpLaw":
        return cls("pareto", float(index))

    @property
    def nonnegative(self) -> bool:
        return self.kind != "constant" or self.param > 0.0

    @property
    def nonpositive(self) -> bool:
        return self.kind == "constant" and self.param < 0.0

    @property
    def mean(self) -> float:
        """Expected jump size (``inf`` for heavy-tailed Pareto)."""
        if self.kind == "constant":
            return self.param
        if self.kind == "exponential":
            return 1.0 / self.param
        a = self.param
        return a / (a - 1.0) if a > 1.0 else math.inf

    def laplace(self, q: float) -> float:
        """E[exp(-q J)] for q >= 0."""
        if q == 0.0:
            return 1.0
        if self.kind == "constant":
            return math.exp(-q * self.param)
        if self.kind == "exponential":
            return self.param / (self.param + q)
        a = self.param
        val, _ = integrate.quad(lambda x: a * math.exp(-q * x) * x ** (-a - 1.0), 1.0, math.inf)
        return val

    def sample(self, rng: RandomStream, size: int) -> np.ndarray:
        if self.kind == "constant":
            return np.full(size, self.param)
        if self.kind == "exponential":
            return rng.standard_exponential(size) / self.param
        return rng.pareto(self.param, size) + 1.0

    def describe(self) -> str:
        return f"{self.kind}({self.param:g})"


@dataclass(frozen=True)
class LevyModel:
    """A validated Lévy process drifting to +infinity.

    Use the family constructors (:meth:`deterministic_drift`,
    :meth:`compound_poisson`, ...) rather than the raw initializer.
    """

    family: Family
    drift: float = 0.0
    rate: float = 0.0
    jump: JumpLaw | None = None
    sigma: float = 0.0
    alpha: float = 0.0
    scale: float = 1.0
    mean_class: MeanClass = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "mean_class", validate(self))

    # -- constructors -------------------------------------------------------

    @classmethod
    def deterministic_drift(cls, b: float) -> "LevyModel":
        return cls(Family.DETERMINISTIC_DRIFT, drift=float(b))

    @classmethod
    def compound_poisson(cls, rate: float, jump: JumpLaw, drift: float = 0.0) -> "LevyModel":
        return cls(Family.COMPOUND_POISSON_DRIFT, drift=float(drift), rate=float(rate), jump=jump)

    @classmethod
    def brownian(cls, sigma: float, drift: float) -> "LevyModel":
        return cls(Family.BROWNIAN_DRIFT, drift=float(drift), sigma=float(sigma))

    @classmethod
    def stable_subordinator(cls, alpha: float, scale: float = 1.0) -> "LevyModel":
        return cls(Family.STABLE_SUBORDINATOR, alpha=float(alpha), scale=float(scale))

    @classmethod
    def stable_subordinator_drift(cls, alpha: float, drift: float, scale: float = 1.0) -> "LevyModel":
        return cls(Family.STABLE_SUBORDINATOR_DRIFT, drift=float(drift), alpha=float(alpha), scale=float(scale))

    # -- classification -----------------------------------------------------

    @property
    def is_stable(self) -> bool:
        return self.family in (Family.STABLE_SUBORDINATOR, Family.STABLE_SUBORDINATOR_DRIFT)

    @property
    def finite_activity(self) -> bool:
        return self.family in (Family.DETERMINISTIC_DRIFT, Family.COMPOUND_POISSON_DRIFT)

    @property
    def is_pure_drift(self) -> bool:
        return self.family == Family.DETERMINISTIC_DRIFT or (
            self.family == Family.COMPOUND_POISSON_DRIFT and self.rate == 0.0
        )

    @property
    def is_subordinator(self) -> bool:
        f = self.family
        if f == Family.DETERMINISTIC_DRIFT:
            return True
        if f == Family.COMPOUND_POISSON_DRIFT:
            return self.drift >= 0.0 and (self.rate == 0.0 or self.jump.nonnegative)
        return self.is_stable

    @property
    def mean(self) -> float:
        """E[xi_1]; ``inf`` for infinite-mean models."""
        if self.mean_class is MeanClass.INFINITE_MEAN:
            return math.inf
        if self.family == Family.COMPOUND_POISSON_DRIFT and self.rate > 0.0:
            return self.drift + self.rate * self.jump.mean
        return self.drift

    @property
    def drift_proxy(self) -> float:
        """Crude positive growth rate used to size the first simulation block."""
        if self.mean_class is MeanClass.FINITE_MEAN_POSITIVE:
            return self.mean
        return max(self.drift, 0.0) + (self.scale ** (1.0 / self.alpha) if self.is_stable else self.rate)

    def label(self) -> str:
        f = self.family
        if f == Family.DETERMINISTIC_DRIFT:
            return f"DeterministicDrift(b={self.drift:g})"
        if f == Family.COMPOUND_POISSON_DRIFT:
            return (
                f"CompoundPoissonDrift(rate={self.rate:g},jump={self.jump.describe()},b={self.drift:g})"
            )
        if f == Family.BROWNIAN_DRIFT:
            return f"BrownianDrift(sigma={self.sigma:g},b={self.drift:g})"
        if f == Family.STABLE_SUBORDINATOR:
            return f"StableSubordinator(alpha={self.alpha:g},c={self.scale:g})"
        return f"StableSubordinatorDrift(alpha={self.alpha:g},c={self.scale:g},b={self.drift:g})"

    def __str__(self) -> str:
        return self.label()


def validate(model: LevyModel) -> MeanClass:
    """Check that `model` drifts to +infinity and classify its mean.

    Raises
    ------
    RejectsModel
        With a human-readable reason when the model does not drift to +infinity
        or a parameter is out of range.
    """
    f = model.family
    b = model.drift
    for name in ("drift", "rate", "sigma", "alpha", "scale"):
        if not math.isfinite(getattr(model, name)):
            raise RejectsModel(f"{name} must be finite")
    if f == Family.DETERMINISTIC_DRIFT:
        if b <= 0.0:
            raise RejectsModel(f"pure drift b={b:g} does not drift to +infinity")
        return MeanClass.FINITE_MEAN_POSITIVE
    if f == Family.COMPOUND_POISSON_DRIFT:
        if model.rate < 0.0:
            raise RejectsModel("jump rate must be nonnegative")
        if model.rate == 0.0:
            if b <= 0.0:
                raise RejectsModel(f"pure drift b={b:g} does not drift to +infinity")
            return MeanClass.FINITE_MEAN_POSITIVE
        if model.jump is None:
            raise RejectsModel("compound Poisson model needs a jump law")
        m = model.jump.mean
        if math.isinf(m):
            # infinite positive mean: xi_t / t -> +inf a.s. whatever the drift
            return MeanClass.INFINITE_MEAN
        mean = b + model.rate * m
        if mean <= 0.0:
            raise RejectsModel(
                f"compound Poisson mean b + rate*E[J] = {mean:g} <= 0; the process does not drift to +infinity"
            )
        return MeanClass.FINITE_MEAN_POSITIVE
    if f == Family.BROWNIAN_DRIFT:
        if model.sigma <= 0.0:
            raise RejectsModel("Brownian volatility must be positive")
        if b <= 0.0:
            raise RejectsModel(f"Brownian drift b={b:g} <= 0; the process does not drift to +infinity")
        return MeanClass.FINITE_MEAN_POSITIVE
    # stable families
    if not (ALPHA_MIN <= model.alpha <= ALPHA_MAX):
        raise RejectsModel(f"stability index must lie in [{ALPHA_MIN}, {ALPHA_MAX}], got {model.alpha:g}")
    if model.scale <= 0.0:
        raise RejectsModel("stable scale must be positive")
    if f == Family.STABLE_SUBORDINATOR and b != 0.0:
        raise RejectsModel("StableSubordinator has no drift; use StableSubordinatorDrift")
    if b < 0.0:
        raise RejectsModel("stable subordinator drift must be nonnegative")
    return MeanClass.INFINITE_MEAN


def laplace_exponent(model: LevyModel, q: float) -> float:
    """phi(q) with E[exp(-q xi_t)] = exp(-t phi(q)), for subordinator families."""
    if q < 0.0:
        raise ValueError("q must be nonnegative")
    if not model.is_subordinator:
        raise Unavailable(f"{model.label()} is not a subordinator; no Laplace exponent")
    phi = model.drift * q
    if model.family == Family.COMPOUND_POISSON_DRIFT and model.rate > 0.0:
        phi += model.rate * (1.0 - model.jump.laplace(q))
    if model.is_stable:
        phi += model.scale * q ** model.alpha
    return phi


def sample_positive_stable(alpha: float, rng: RandomStream, size=None):
    """Positive alpha-stable draws with E[exp(-lam S)] = exp(-lam**alpha).

    Kanter's representation: for U uniform on (0, pi) and E standard
    exponential,

        S = sin(alpha U) / sin(U)**(1/alpha) * (sin((1-alpha) U) / E)**((1-alpha)/alpha)
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    n = 1 if size is None else size
    u = np.pi * (1.0 - rng.random(n))  # (0, pi]
    e = rng.standard_exponential(n)
    s = _kanter(alpha, u, e)
    return float(s[0]) if size is None else s


def _kanter(alpha, u, e):
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.sin(alpha * u) / np.sin(u) ** (1.0 / alpha)
        b = (np.sin((1.0 - alpha) * u) / e) ** ((1.0 - alpha) / alpha)
        s = a * b
    # u == pi (probability 2**-53) sends sin(u) to round-off; treat as +inf
    return np.where(np.isfinite(s) & (s > 0.0), s, np.inf)


def sample_increments(model: LevyModel, dt: float, rng: RandomStream, size: int) -> np.ndarray:
    """`size` independent exact draws of xi_{t+dt} - xi_t."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    f = model.family
    b = model.drift
    if f == Family.DETERMINISTIC_DRIFT:
        return np.full(size, b * dt)
    if f == Family.COMPOUND_POISSON_DRIFT:
        out = np.full(size, b * dt)
        if model.rate == 0.0:
            return out
        counts = rng.poisson(model.rate * dt, size)
        total = int(counts.sum())
        if total:
            jumps = model.jump.sample(rng, total)
            owner = np.repeat(np.arange(size), counts)
            out += np.bincount(owner, weights=jumps, minlength=size)
        return out
    if f == Family.BROWNIAN_DRIFT:
        return b * dt + model.sigma * math.sqrt(dt) * rng.standard_normal(size)
    scale = (model.scale * dt) ** (1.0 / model.alpha)
    return b * dt + scale * sample_positive_stable(model.alpha, rng, size)


def sample_increment(model: LevyModel, dt: float, rng: RandomStream) -> float:
    """One exact draw of xi_{t+dt} - xi_t."""
    return float(sample_increments(model, dt, rng, 1)[0])


# -- flat key/value serialization ------------------------------------------

_FAMILY_KEYS = {
    Family.DETERMINISTIC_DRIFT: ({"drift"}, set()),
    Family.COMPOUND_POISSON_DRIFT: ({"rate", "jump_law", "jump_param"}, {"drift"}),
    Family.BROWNIAN_DRIFT: ({"sigma", "drift"}, set()),
    Family.STABLE_SUBORDINATOR: ({"alpha"}, {"scale"}),
    Family.STABLE_SUBORDINATOR_DRIFT: ({"alpha", "drift"}, {"scale"}),
}


def model_to_config(model: LevyModel) -> dict[str, str]:
    """Flat ``key -> str`` section describing `model`."""
    out = {"family": model.family.value}
    required, optional = _FAMILY_KEYS[model.family]
    for key in sorted(required | optional):
        if key == "jump_law":
            out[key] = model.jump.kind
        elif key == "jump_param":
            out[key] = repr(model.jump.param)
        else:
            out[key] = repr(float(getattr(model, key)))
    return out


def model_from_config(section: dict[str, str]) -> LevyModel:
    """Inverse of :func:`model_to_config`; unknown or missing keys raise ConfigError."""
    if "family" not in section:
        raise ConfigError("model section: missing required key 'family'")
    try:
        family = Family(section["family"].strip())
    except ValueError:
        names = ", ".join(f.value for f in Family)
        raise ConfigError(f"model section: unknown family {section['family']!r} (expected one of {names})") from None
    required, optional = _FAMILY_KEYS[family]
    keys = set(section) - {"family"}
    unknown = sorted(keys - required - optional)
    if unknown:
        raise ConfigError(f"model section: unknown key {unknown[0]!r} for family {family.value}")
    missing = sorted(required - keys)
    if missing:
        raise ConfigError(f"model section: missing required key {missing[0]!r} for family {family.value}")

    def num(key, default=None):
        if key not in section:
            return default
        try:
            return float(section[key])
        except ValueError:
            raise ConfigError(f"model section: key {key!r} is not a number: {section[key]!r}") from None

    try:
        if family == Family.DETERMINISTIC_DRIFT:
            return LevyModel.deterministic_drift(num("drift"))
        if family == Family.COMPOUND_POISSON_DRIFT:
            jump = JumpLaw(section["jump_law"].strip(), num("jump_param"))
            return LevyModel.compound_poisson(num("rate"), jump, num("drift", 0.0))
        if family == Family.BROWNIAN_DRIFT:
            return LevyModel.brownian(num("sigma"), num("drift"))
        if family == Family.STABLE_SUBORDINATOR:
            return LevyModel.stable_subordinator(num("alpha"), num("scale", 1.0))
        return LevyModel.stable_subordinator_drift(num("alpha"), num("drift"), num("scale", 1.0))
    except RejectsModel as exc:
        raise ConfigError(f"model section: {exc}") from exc
