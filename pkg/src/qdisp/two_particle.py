"""Two identical particles in one dimension built from two coherent packets.

The (anti)symmetrized amplitude on the joint configuration space is::

    Psi(r1, r2) = psi1(r1) psi2(r2) -/+ psi1(r2) psi2(r1)

with the minus sign for fermions. Its squared modulus divided by the
normalization ``C_t`` is the joint density.

The cross term oscillates along the anti-diagonal with the relative carrier
wavenumber ``kappa = d/dr arg(psi1 psi2*)``. When ``kappa`` times the grid
spacing is too large the sampled cross term aliases and the grid density is
meaningless. In that regime the entropy is computed from the cross-term
phase average instead: with ``A = rho1(r1) rho2(r2) + rho1(r2) rho2(r1)`` and
``B = 2 sqrt(rho1(r1) rho2(r2) rho1(r2) rho2(r1))``, the local density runs
over ``(A -/+ B cos theta) / C`` with ``theta`` uniformly distributed, and::

    <-rho ln rho>_theta = -(a ln((a + s) / 2) + a - s),   s = sqrt(a^2 - b^2)

where ``a = A / C`` and ``b = B / C``. This does not depend on the sign, so
both statistics get the same entropy once the carrier is unresolved.
"""
from __future__ import annotations

import enum
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .dispersion import DispersionModel, group_velocity, hessian
from .errors import ConfigError, DegenerateState, NotNormalized
from .gaussian import CoherentPacket, EvolvedGaussian, propagate_gaussian
from .grid import EntropyTrajectory, GridSpec, density_entropy
from .partition import GRID_TOLERANCE

DEGENERACY_LIMIT = 1e-9
JOINT_MASS_TOLERANCE = 1e-6
# Largest carrier phase step per grid cell that still counts as resolved.
RESOLVED_PHASE_STEP = np.pi / 4


class ExchangeStatistics(enum.IntEnum):
    FERMION = -1
    BOSON = 1

    @classmethod
    def parse(cls, name: str) -> "ExchangeStatistics":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ConfigError(f"unknown statistics {name!r}; use 'fermion' or 'boson'") from None

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Packet1D:
    """A 1D packet with its own group velocity and dispersion Hessian.

    ``sigma`` is the width parameter: the amplitude covariance is ``sigma^2``.
    """

    center: float
    sigma: float
    k: float
    velocity: float = 0.0
    hessian: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigError(f"packet width must be positive, got {self.sigma}")

    @classmethod
    def from_model(cls, center: float, sigma: float, k: float,
                   model: DispersionModel) -> "Packet1D":
        return cls(center, sigma, k, float(group_velocity(model, [k])[0]),
                   float(hessian(model, [k])[0, 0]))

    def at(self, t: float) -> EvolvedGaussian:
        base = CoherentPacket([self.center], [[self.sigma ** 2]], [self.k])
        return propagate_gaussian(base, t, [self.velocity], [[self.hessian]])

    def carrier_gradient(self, x: np.ndarray, t: float) -> np.ndarray:
        """``d/dx arg psi(x, t)`` (omitting the time-only phase)."""
        z = self.sigma ** 2 + 1j * t * self.hessian
        return self.k - np.imag((x - self.center - self.velocity * t) / z)


def _sampled(g: EvolvedGaussian, x: np.ndarray) -> np.ndarray:
    """Amplitude on ``x``, normalized on the grid."""
    amp = g.amplitude(x)
    mass = np.sum(np.abs(amp) ** 2) * (x[1] - x[0])
    if not mass > 0:
        raise NotNormalized("packet has no mass on the grid")
    return amp / np.sqrt(mass)


def _marginal(grid: GridSpec) -> GridSpec:
    if grid.d == 2:
        if grid.origin[0] != grid.origin[1] or grid.spacing[0] != grid.spacing[1]:
            raise ConfigError("joint grid must be the square of one 1D grid")
        return GridSpec(1, grid.n, grid.origin[:1], grid.spacing[:1])
    if grid.d != 1:
        raise ConfigError("two-particle grids are 1D marginals or 2D joint grids")
    return grid


def joint_density(psi1: np.ndarray, psi2: np.ndarray, stats: ExchangeStatistics,
                  grid: GridSpec) -> tuple[np.ndarray, float]:
    """Normalized joint density on the square grid and the normalization ``C_t``.

    ``psi1`` and ``psi2`` are amplitudes sampled on the 1D marginal of
    ``grid``. The result is exactly symmetric under ``r1 <-> r2``.
    """
    grid = _marginal(grid)
    psi1 = np.asarray(psi1, dtype=complex)
    psi2 = np.asarray(psi2, dtype=complex)
    if psi1.shape != grid.shape or psi2.shape != grid.shape:
        raise ConfigError("amplitudes must be sampled on the marginal grid")
    cell = grid.cell_volume ** 2
    prod = np.outer(psi1, psi2)
    amp = prod - prod.T if stats is ExchangeStatistics.FERMION else prod + prod.T
    rho = amp.real ** 2 + amp.imag ** 2
    c_t = float(np.sum(rho) * cell)
    if c_t < DEGENERACY_LIMIT:
        raise DegenerateState(f"normalization C_t = {c_t:.3e}; the state vanishes")
    return rho / c_t, c_t


def joint_entropy(rho: np.ndarray, grid: GridSpec) -> float:
    """``-sum rho ln rho dA`` over the joint grid."""
    marginal = _marginal(grid)
    cell = marginal.cell_volume ** 2
    mass = float(np.sum(rho) * cell)
    if abs(mass - 1.0) > JOINT_MASS_TOLERANCE:
        raise NotNormalized(f"joint mass is {mass!r}")
    return density_entropy(rho, cell)


def incoherent_density(rho1: np.ndarray, rho2: np.ndarray, grid: GridSpec) -> np.ndarray:
    """``(rho1(r1) rho2(r2) + rho1(r2) rho2(r1))`` normalized: the density with the cross term averaged out."""
    marginal = _marginal(grid)
    prod = np.outer(rho1, rho2)
    a = prod + prod.T
    return a / (np.sum(a) * marginal.cell_volume ** 2)


def phase_averaged_entropy(rho1: np.ndarray, rho2: np.ndarray, grid: GridSpec) -> float:
    """Joint entropy with the unresolved exchange cross term averaged over its phase."""
    marginal = _marginal(grid)
    cell = marginal.cell_volume ** 2
    prod = np.outer(rho1, rho2)
    big_a = prod + prod.T
    norm = np.sum(big_a) * cell
    a = big_a / norm
    b = 2.0 * np.sqrt(prod * prod.T) / norm
    s = np.sqrt(np.maximum((a - b) * (a + b), 0.0))
    terms = np.zeros_like(a)
    live = a > 1e-300
    al, sl = a[live], s[live]
    terms[live] = al * np.log(0.5 * (al + sl)) + al - sl
    return float(-np.sum(terms) * cell)


def carrier_wavenumber(p1: Packet1D, p2: Packet1D, t: float, x: np.ndarray) -> float:
    """Largest ``|d/dr arg(psi1 psi2*)|`` where both packets overlap appreciably."""
    g1, g2 = p1.at(t), p2.at(t)
    weight = np.sqrt(g1.density(x) * g2.density(x))
    mask = weight >= 1e-10 * weight.max() if weight.max() > 0 else np.ones(x.shape, bool)
    kappa = p1.carrier_gradient(x, t) - p2.carrier_gradient(x, t)
    return float(np.max(np.abs(kappa[mask])))


def overlap(p1: Packet1D, p2: Packet1D, t: float, grid: GridSpec) -> complex:
    """``<psi1|psi2>`` by quadrature on ``grid`` refined until carriers and widths are resolved."""
    x = grid.axes()[0]
    kappa = max(carrier_wavenumber(p1, p2, t, x), abs(p1.k), abs(p2.k))
    h = min(grid.spacing[0], RESOLVED_PHASE_STEP / max(kappa, 1e-300),
            0.25 * min(p1.sigma, p2.sigma))
    n = int(np.ceil(grid.lengths[0] / h))
    fine = grid.origin[0] + grid.lengths[0] / n * np.arange(n)
    a1, a2 = _sampled(p1.at(t), fine), _sampled(p2.at(t), fine)
    return complex(np.sum(np.conj(a1) * a2) * (fine[1] - fine[0]))


@dataclass(frozen=True)
class PairEntropy:
    entropy: float
    c_t: float
    method: str


def pair_entropy(p1: Packet1D, p2: Packet1D, t: float, stats: ExchangeStatistics,
                 grid: GridSpec, method: str = "auto") -> PairEntropy:
    """Joint entropy of the (anti)symmetrized pair at time ``t``.

    ``method`` is ``'direct'`` (grid density), ``'averaged'`` (phase-averaged
    cross term) or ``'auto'``, which picks ``direct`` when the carrier
    advances at most ``pi/4`` per grid cell.
    """
    marginal = _marginal(grid)
    x = marginal.axes()[0]
    if method == "auto":
        kappa = carrier_wavenumber(p1, p2, t, x)
        method = "direct" if kappa * marginal.spacing[0] <= RESOLVED_PHASE_STEP else "averaged"
    if method == "direct":
        rho, c_t = joint_density(_sampled(p1.at(t), x), _sampled(p2.at(t), x), stats, marginal)
        return PairEntropy(joint_entropy(rho, marginal), c_t, method)
    if method == "averaged":
        c_t = 2.0 + 2.0 * int(stats) * abs(overlap(p1, p2, t, marginal)) ** 2
        if c_t < DEGENERACY_LIMIT:
            raise DegenerateState(f"normalization C_t = {c_t:.3e}; the state vanishes")
        rho1 = p1.at(t).density(x)
        rho2 = p2.at(t).density(x)
        return PairEntropy(phase_averaged_entropy(rho1, rho2, marginal), c_t, method)
    raise ConfigError(f"unknown entropy method {method!r}; use auto, direct or averaged")


def pair_density(p1: Packet1D, p2: Packet1D, t: float, stats: ExchangeStatistics,
                 grid: GridSpec, method: str = "auto") -> np.ndarray:
    """Joint density for plotting: the grid density, or its phase average when unresolved."""
    marginal = _marginal(grid)
    x = marginal.axes()[0]
    if method == "auto":
        kappa = carrier_wavenumber(p1, p2, t, x)
        method = "direct" if kappa * marginal.spacing[0] <= RESOLVED_PHASE_STEP else "averaged"
    if method == "direct":
        return joint_density(_sampled(p1.at(t), x), _sampled(p2.at(t), x), stats, marginal)[0]
    return incoherent_density(p1.at(t).density(x), p2.at(t).density(x), marginal)


# -- collision scenario ----------------------------------------------------

STATISTICS = (ExchangeStatistics.FERMION, ExchangeStatistics.BOSON)


@dataclass(frozen=True)
class CollisionScenario:
    """Two packets with mirrored momenta approaching each other.

    Packet 1 starts at ``x1`` with wavenumber ``k`` and velocity ``vg``;
    packet 2 starts at ``x2`` with ``-k`` and ``-vg``. Both share the width
    ``sigma`` and the Hessian, so the complementary constraints hold by
    construction. The joint grid is the square of ``grid_n`` points on
    ``[grid_min, grid_max)``.
    """

    sigma: float = 3.0
    k: float = 2 * np.pi
    vg: float = 2.0
    hessian: float = 10.0
    x1: float = 750.0
    x2: float = 1050.0
    grid_n: int = 1800
    grid_min: float = 0.0
    grid_max: float = 1800.0
    stats: tuple[ExchangeStatistics, ...] = STATISTICS
    t_end: float = 70.0
    dt: float = 1.0
    method: str = "auto"
    snapshots: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if not self.dt > 0 or self.t_end < 0:
            raise ConfigError("need dt > 0 and t_end >= 0")
        if self.method not in ("auto", "direct", "averaged"):
            raise ConfigError(f"unknown entropy method {self.method!r}")
        if not self.stats:
            raise ConfigError("at least one exchange statistics is required")
        self.grid  # validates the grid

    @classmethod
    def preset(cls, name: str, **overrides) -> "CollisionScenario":
        """``'full'``: 1800 points (spacing 1); ``'quarter'``: 450 points (spacing 4)."""
        sizes = {"full": 1800, "quarter": 450}
        if name not in sizes:
            raise ConfigError(f"unknown preset {name!r}; use 'full' or 'quarter'")
        return cls(grid_n=sizes[name], **overrides)

    @property
    def grid(self) -> GridSpec:
        return GridSpec.from_bounds(self.grid_min, self.grid_max, self.grid_n)

    def packets(self) -> tuple[Packet1D, Packet1D]:
        return (Packet1D(self.x1, self.sigma, self.k, self.vg, self.hessian),
                Packet1D(self.x2, self.sigma, -self.k, -self.vg, self.hessian))

    def times(self) -> np.ndarray:
        steps = int(np.floor(self.t_end / self.dt + 1e-9))
        return self.dt * np.arange(steps + 1)

    def closest_approach(self) -> float:
        """Time at which the two centers coincide (``inf`` when they never meet)."""
        if self.vg == 0:
            return np.inf
        return (self.x2 - self.x1) / (2.0 * self.vg)

    def under_resolved(self) -> bool:
        return self.sigma < 3.0 * self.grid.spacing[0]


@dataclass
class CollisionResult:
    scenario: CollisionScenario
    trajectories: dict[ExchangeStatistics, EntropyTrajectory]
    normalization: dict[ExchangeStatistics, np.ndarray]
    methods: list[str]
    snapshots: dict[tuple[ExchangeStatistics, float], np.ndarray] = field(default_factory=dict)


def collision_run(s: CollisionScenario, workers: int = 1) -> CollisionResult:
    """Entropy trajectory of the colliding pair for every requested statistics.

    Time samples are independent; ``workers > 1`` evaluates them on a thread
    pool. Results are assembled in time order, so they do not depend on
    ``workers``.
    """
    if s.under_resolved():
        warnings.warn(f"packet width {s.sigma} is below three grid spacings "
                      f"({s.grid.spacing[0]}); entropies are not converged", RuntimeWarning,
                      stacklevel=2)
    p1, p2 = s.packets()
    grid = s.grid
    times = s.times()

    def sample(t):
        return [pair_entropy(p1, p2, t, st, grid, s.method) for st in s.stats]

    per_time = _ordered_map(sample, times, workers)
    trajs, norms = {}, {}
    for i, st in enumerate(s.stats):
        trajs[st] = EntropyTrajectory(times, [row[i].entropy for row in per_time], GRID_TOLERANCE)
        norms[st] = np.array([row[i].c_t for row in per_time])
    methods = [row[0].method for row in per_time]
    snaps = {(st, float(t)): pair_density(p1, p2, t, st, grid, s.method)
             for t in s.snapshots for st in s.stats}
    return CollisionResult(s, trajs, norms, methods, snaps)


def _ordered_map(fn, items, workers: int) -> list:
    if workers <= 1:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- separation sweep --------------------------------------------------------

@dataclass(frozen=True)
class SweepScenario:
    """Two static packets at ``-x/2`` and ``+x/2`` for a range of separations ``x``.

    The domain is centered at zero with length ``8 max(sigma) + max(x)``.
    """

    sigma1: float = 50.0
    sigma2: float = 100.0
    k1: float = 1.0
    k2: float = 2.0
    grid_n: int = 2000
    separations: tuple[float, ...] = tuple(float(v) for v in range(0, 401, 10))
    method: str = "auto"

    def __post_init__(self):
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise ConfigError("packet widths must be positive")
        if not self.separations:
            raise ConfigError("no separations given")
        if min(self.separations) < 0:
            raise ConfigError("separations must be nonnegative")

    @property
    def grid(self) -> GridSpec:
        half = 0.5 * (8.0 * max(self.sigma1, self.sigma2) + max(self.separations))
        return GridSpec.from_bounds(-half, half, self.grid_n)

    def packets(self, x: float) -> tuple[Packet1D, Packet1D]:
        return (Packet1D(-0.5 * x, self.sigma1, self.k1),
                Packet1D(0.5 * x, self.sigma2, self.k2))


def separation_sweep(s: SweepScenario | None = None, distances=None,
                     workers: int = 1) -> np.ndarray:
    """Rows ``(x, S_fermion, S_boson)`` for each separation."""
    s = s or SweepScenario()
    if distances is not None:
        s = replace(s, separations=tuple(float(v) for v in distances))
    grid = s.grid

    def row(x):
        p1, p2 = s.packets(x)
        return [x] + [pair_entropy(p1, p2, 0.0, st, grid, s.method).entropy for st in STATISTICS]

    return np.array(_ordered_map(row, s.separations, workers))


# -- scenario files ----------------------------------------------------------

def _floats(text: str) -> tuple[float, ...]:
    """Comma list ``a,b,c`` or range ``start:stop:step`` (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ConfigError("range step must be positive")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(start + i * step) for i in range(count))
    return tuple(float(v) for v in text.split(",") if v.strip())


def _parse_stats(text: str) -> tuple[ExchangeStatistics, ...]:
    text = text.strip().lower()
    if text == "both":
        return STATISTICS
    return tuple(ExchangeStatistics.parse(v) for v in text.split(","))


COLLISION_KEYS = {"model", "sigma", "k", "vg", "hessian", "x1", "x2", "grid_n", "grid_min",
                  "grid_max", "stats", "t_end", "dt", "mass", "method", "snapshots"}
SWEEP_KEYS = {"sigma1", "sigma2", "k1", "k2", "grid_n", "separations", "method"}


def read_key_values(path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment; keys may not repeat."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def collision_from_mapping(cfg: dict[str, str]) -> CollisionScenario:
    """Build a scenario from string values.

    ``model`` is ``synthetic`` (default; ``vg`` and ``hessian`` given
    directly), ``schrodinger`` or ``dirac`` (both derived from ``k`` and
    ``mass`` with ``hbar = c = 1``).
    """
    unknown = set(cfg) - COLLISION_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario keys: {', '.join(sorted(unknown))}")
    try:
        kw = {}
        for name in ("sigma", "k", "vg", "hessian", "x1", "x2", "grid_min", "grid_max",
                     "t_end", "dt"):
            if name in cfg:
                kw[name] = float(cfg[name])
        if "grid_n" in cfg:
            kw["grid_n"] = int(cfg["grid_n"])
        if "stats" in cfg:
            kw["stats"] = _parse_stats(cfg["stats"])
        if "method" in cfg:
            kw["method"] = cfg["method"].strip()
        if "snapshots" in cfg:
            kw["snapshots"] = _floats(cfg["snapshots"])
        model = cfg.get("model", "synthetic").strip().lower()
        if model != "synthetic":
            if "vg" in cfg or "hessian" in cfg:
                raise ConfigError("vg and hessian follow from the model; give mass instead")
            mass = float(cfg.get("mass", 1.0))
            if model == "schrodinger":
                dm = DispersionModel.schrodinger(mass)
            elif model == "dirac":
                dm = DispersionModel.dirac(mass)
            else:
                raise ConfigError(f"unknown model {model!r}")
            probe = Packet1D.from_model(0.0, 1.0, kw.get("k", CollisionScenario.k), dm)
            kw["vg"], kw["hessian"] = probe.velocity, probe.hessian
        elif "mass" in cfg:
            raise ConfigError("mass only applies to the schrodinger and dirac models")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad scenario value: {exc}") from None
    return CollisionScenario(**kw)


def sweep_from_mapping(cfg: dict[str, str]) -> SweepScenario:
    unknown = set(cfg) - SWEEP_KEYS
    if unknown:
        raise ConfigError(f"unknown sweep keys: {', '.join(sorted(unknown))}")
    try:
        kw = {}
        for name in ("sigma1", "sigma2", "k1", "k2"):
            if name in cfg:
                kw[name] = float(cfg[name])
        if "grid_n" in cfg:
            kw["grid_n"] = int(cfg["grid_n"])
        if "separations" in cfg:
            kw["separations"] = _floats(cfg["separations"])
        if "method" in cfg:
            kw["method"] = cfg["method"].strip()
    except ValueError as exc:
        raise ConfigError(f"bad sweep value: {exc}") from None
    return SweepScenario(**kw)


def scenario_mapping(s) -> dict:
    """Resolved scenario as plain JSON-compatible values (for CSV headers)."""
    out = {}
    for f in fields(s):
        v = getattr(s, f.name)
        if f.name == "stats":
            v = [st.label for st in v]
        elif isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out
