"""TOML configuration: loading with line-precise diagnostics, and dumping."""
from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, field, fields, replace

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ValidationError
from .model import BlockerPopulation, Scenario
from .montecarlo import HARDCORE_RULES, MODES
from .planner import PROFILES, PathLossModel

__all__ = ["Numerics", "MonteCarloSettings", "Config", "load_config", "loads_config",
           "dump_config", "ConfigError"]


class ConfigError(ValidationError):
    pass


@dataclass(frozen=True)
class Numerics:
    grid_points: int = 4096
    quad_rel_tol: float = 1e-8
    tail_eps: float = 1e-9
    steps_per_mean: int = 200
    max_points: int = 250_000

    def __post_init__(self):
        if self.grid_points < 16:
            raise ValidationError("grid_points must be >= 16")
        if not 0 < self.quad_rel_tol < 1e-2:
            raise ValidationError("quad_rel_tol must lie in (0, 1e-2)")
        if not 0 < self.tail_eps < 1e-2:
            raise ValidationError("tail_eps must lie in (0, 1e-2)")
        if self.steps_per_mean < 10:
            raise ValidationError("steps_per_mean must be >= 10")
        if self.max_points < 1024:
            raise ValidationError("max_points must be >= 1024")

    def renewal_kwargs(self):
        return asdict(self)


@dataclass(frozen=True)
class MonteCarloSettings:
    trials: int = 10_000
    subsegments: int = 10
    seed: int = 20170101
    mode: str = "ppp"
    hardcore: str = "body"
    prefilter: str = "auto"

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if self.subsegments < 1:
            raise ValidationError("subsegments must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be >= 0")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if self.hardcore not in HARDCORE_RULES:
            raise ValidationError(f"hardcore must be one of {HARDCORE_RULES}")
        if self.prefilter not in ("auto", "on", "off"):
            raise ValidationError("prefilter must be auto, on or off")

    def run_kwargs(self, threads=1):
        pre = {"auto": None, "on": True, "off": False}[self.prefilter]
        return dict(trials=self.trials, subsegments=self.subsegments, seed=self.seed,
                    mode=self.mode, hardcore=self.hardcore, prefilter=pre,
                    threads=threads)


@dataclass(frozen=True)
class Config:
    scenario: Scenario = field(default_factory=Scenario)
    pathloss: PathLossModel = PROFILES["mmwave28"]
    pathloss_profile: str | None = "mmwave28"
    numerics: Numerics = field(default_factory=Numerics)
    mc: MonteCarloSettings = field(default_factory=MonteCarloSettings)


_SCENARIO_KEYS = ("tx_height_m", "rx_height_m", "rx_length_m", "distance_m")
_POPULATION_KEYS = tuple(f.name for f in fields(BlockerPopulation))
_PATHLOSS_KEYS = ("profile",) + tuple(f.name for f in fields(PathLossModel))
_BLOCKS = {
    "scenario": _SCENARIO_KEYS,
    "population": _POPULATION_KEYS,
    "pathloss": _PATHLOSS_KEYS,
    "numerics": tuple(f.name for f in fields(Numerics)),
    "mc": tuple(f.name for f in fields(MonteCarloSettings)),
}
_REQUIRED = ("scenario", "population")


def _line_index(text):
    """Map (block, key) and (block, None) to 1-based line numbers."""
    index = {}
    block = None
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"^\[\s*([A-Za-z0-9_.-]+)\s*\]", s)
        if m:
            block = m.group(1)
            index.setdefault((block, None), no)
            continue
        m = re.match(r"^([A-Za-z0-9_-]+)\s*=", s)
        if m:
            index.setdefault((block, m.group(1)), no)
    return index


class _Where:
    def __init__(self, text, source):
        self.index = _line_index(text)
        self.source = source

    def fail(self, block, key, message):
        line = self.index.get((block, key)) or self.index.get((block, None))
        loc = f"{self.source}:{line}" if line else self.source
        what = f"[{block}]" + (f" {key}" if key else "")
        raise ConfigError(f"{loc}: {what}: {message}")

    def build(self, block, cls, values, keys):
        try:
            return cls(**values)
        except ValidationError as err:
            msg = str(err)
            culprit = next((k for k in keys if k in msg and k in values), None)
            self.fail(block, culprit, msg)
        except TypeError as err:
            self.fail(block, None, str(err))


def _number(where, block, key, value, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        where.fail(block, key, f"expected a number, got {value!r}")
    if integer:
        if isinstance(value, float) and not value.is_integer():
            where.fail(block, key, f"expected an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        where.fail(block, key, "must be finite")
    return float(value)


def loads_config(text: str, source="<config>") -> Config:
    where = _Where(text, source)
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"{source}: {err}") from None

    for block, body in raw.items():
        if block not in _BLOCKS:
            where.fail(block, None, f"unknown block; expected one of {sorted(_BLOCKS)}")
        if not isinstance(body, dict):
            where.fail(block, None, "must be a table")
        for key in body:
            if key not in _BLOCKS[block]:
                where.fail(block, key, f"unknown key; expected one of {list(_BLOCKS[block])}")
    for block in _REQUIRED:
        if block not in raw:
            raise ConfigError(f"{source}: missing required block [{block}]")

    pop_raw = raw["population"]
    pop_vals = {k: _number(where, "population", k, v) for k, v in pop_raw.items()}
    population = where.build("population", BlockerPopulation, pop_vals, _POPULATION_KEYS)

    sc_raw = raw["scenario"]
    for key in _SCENARIO_KEYS:
        if key not in sc_raw:
            where.fail("scenario", None, f"missing key {key}")
    sc_vals = {k: _number(where, "scenario", k, v) for k, v in sc_raw.items()}
    scenario = where.build("scenario", Scenario, dict(sc_vals, population=population),
                           _SCENARIO_KEYS)

    pl_raw = dict(raw.get("pathloss", {"profile": "mmwave28"}))
    profile = pl_raw.pop("profile", None)
    coeffs = {k: _number(where, "pathloss", k, v) for k, v in pl_raw.items()}
    if profile is not None:
        if profile not in PROFILES:
            where.fail("pathloss", "profile", f"unknown profile {profile!r}; "
                                              f"known: {sorted(PROFILES)}")
        base = PROFILES[profile]
        if set(coeffs) - {"frequency_ghz"}:
            profile = None  # explicit coefficients override the named profile
        pathloss = where.build("pathloss", PathLossModel, {**asdict(base), **coeffs},
                               _PATHLOSS_KEYS)
    else:
        pathloss = where.build("pathloss", PathLossModel, coeffs, _PATHLOSS_KEYS)

    num_raw = raw.get("numerics", {})
    num_vals = {}
    for k, v in num_raw.items():
        integer = k in ("grid_points", "steps_per_mean", "max_points")
        num_vals[k] = _number(where, "numerics", k, v, integer=integer)
    numerics = where.build("numerics", Numerics, num_vals, tuple(num_vals))

    mc_raw = raw.get("mc", {})
    mc_vals = {}
    for k, v in mc_raw.items():
        if k in ("mode", "hardcore", "prefilter"):
            if isinstance(v, bool) and k == "prefilter":
                v = "on" if v else "off"
            if not isinstance(v, str):
                where.fail("mc", k, f"expected a string, got {v!r}")
            mc_vals[k] = v
        else:
            mc_vals[k] = _number(where, "mc", k, v, integer=True)
    mc = where.build("mc", MonteCarloSettings, mc_vals, tuple(mc_vals))
    return Config(scenario, pathloss, profile, numerics, mc)


def load_config(path) -> Config:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return loads_config(text, str(path))


def _fmt(v):
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def dump_config(cfg: Config) -> str:
    """Annotated TOML that :func:`loads_config` reads back to an equal Config."""
    sc = cfg.scenario
    pop = sc.population
    out = [
        "# Human-body blockage scenario. Lengths in metres, density per m^2.",
        "",
        "[scenario]",
        f"tx_height_m = {_fmt(sc.tx_height_m)}    # transmitter antenna height",
        f"rx_height_m = {_fmt(sc.rx_height_m)}    # receiver antenna height",
        f"rx_length_m = {_fmt(sc.rx_length_m)}    # receiver extent; 0 = point receiver",
        f"distance_m = {_fmt(sc.distance_m)}    # ground distance Tx base to Rx base",
        "",
        "[population]",
        f"density_per_m2 = {_fmt(pop.density_per_m2)}",
        f"height_mean_m = {_fmt(pop.height_mean_m)}    # Normal height, truncated at 0",
        f"height_std_m = {_fmt(pop.height_std_m)}",
        f"diameter_min_m = {_fmt(pop.diameter_min_m)}    # Uniform body diameter",
        f"diameter_max_m = {_fmt(pop.diameter_max_m)}",
        "",
        "[pathloss]",
    ]
    if cfg.pathloss_profile is not None and \
            replace(PROFILES[cfg.pathloss_profile],
                    frequency_ghz=cfg.pathloss.frequency_ghz) == cfg.pathloss:
        out.append(f"profile = {_fmt(cfg.pathloss_profile)}    # named coefficient set")
        out.append(f"frequency_ghz = {_fmt(cfg.pathloss.frequency_ghz)}")
    else:
        out.append("# L(d) = intercept + 10 * exponent * log10(d)")
        for f in fields(PathLossModel):
            out.append(f"{f.name} = {_fmt(getattr(cfg.pathloss, f.name))}")
    out += ["", "[numerics]"]
    for f in fields(Numerics):
        out.append(f"{f.name} = {_fmt(getattr(cfg.numerics, f.name))}")
    out += ["", "[mc]"]
    for f in fields(MonteCarloSettings):
        out.append(f"{f.name} = {_fmt(getattr(cfg.mc, f.name))}")
    return "\n".join(out) + "\n"
