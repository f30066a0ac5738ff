"""Run configuration: a flat key-value file with sections.

Example::

    [system]
    n = 2
    root_system = B3_embedded      # A1 | B2_euclidean | B3_embedded | B(m) | path to a roots file
    multiplicity = 1/2, 2          # one value per orbit, longest roots first; a single value is used for all
    # multiplicity_file = k.txt    # alternative: k.<i> = value lines

    [operator]
    j = 1
    weight = critical              # or an explicit scalar such as -3/2
    function = exp(x1/3)*(1 + x2^2)

    [run]
    seed = 0
    samples = 20
    degree = 4
    polys = 20
    group_cap = 1000000

    [tolerances]
    route_agreement = 1e-8

Unknown sections and keys are errors.
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from .rootsys import MultiplicityFunction, RootSystem, builtin_system, load_root_system, parse_multiplicity
from .scalars import parse_scalar
from .verify import TOLERANCES, SuiteSizes, multiplicity

_KEYS = {
    "system": {"n", "root_system", "multiplicity", "multiplicity_file"},
    "operator": {"j", "weight", "function"},
    "run": {"seed", "samples", "degree", "polys", "group_cap"},
    "tolerances": set(TOLERANCES),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int = 2
    root_system: str = "B2_euclidean"
    multiplicity: tuple = ("1/2",)
    multiplicity_file: str | None = None
    j: int = 1
    weight: str = "critical"
    function: str | None = None
    seed: int = 0
    samples: int = 20
    degree: int = 4
    polys: int = 20
    group_cap: int = 10**6
    tolerances: dict = field(default_factory=dict)
    base_dir: Path = field(default_factory=Path.cwd, repr=False)

    def system(self) -> RootSystem:
        name = self.root_system
        path = self.base_dir / name
        if os.sep in name or name.endswith(".txt") or path.is_file():
            R = load_root_system(path)
            if R.n != self.n:
                raise ConfigError(f"roots in {name} have chart dimension {R.n}, config says n = {self.n}")
            return R
        try:
            return builtin_system(name, self.n)
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def multiplicity_function(self, system: RootSystem) -> MultiplicityFunction:
        if self.multiplicity_file:
            return parse_multiplicity((self.base_dir / self.multiplicity_file).read_text(), system)
        vals = [parse_scalar(v) for v in self.multiplicity]
        if len(vals) not in (1, len(system.orbits)):
            raise ConfigError(f"{len(system.orbits)} orbits but {len(vals)} multiplicity values")
        return multiplicity(system, vals)

    def weight_value(self):
        return None if self.weight.strip().lower() == "critical" else parse_scalar(self.weight)

    def sizes(self) -> SuiteSizes:
        return SuiteSizes(
            degree=self.degree,
            polys=self.polys,
            pairs=max(1, self.polys // 2),
            points=self.samples,
            perturbations=2,
            derivatives=max(50, 5 * self.samples),
            max_power=max(2, min(self.j, 3)),
        )


def _int(section, key, raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}") from None


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    cfg = RunConfig(base_dir=base_dir or Path.cwd())
    for section in cp.sections():
        if section not in _KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            raw = raw.strip()
            if section == "tolerances":
                try:
                    cfg.tolerances[key] = float(raw)
                except ValueError:
                    raise ConfigError(f"[tolerances] {key}: expected a number") from None
            elif key in ("n", "j", "seed", "samples", "degree", "polys", "group_cap"):
                setattr(cfg, key, _int(section, key, raw))
            elif key == "multiplicity":
                cfg.multiplicity = tuple(v for v in raw.replace(",", " ").split() if v)
            else:
                setattr(cfg, key, raw)
    if cfg.n < 1:
        raise ConfigError("n must be positive")
    if cfg.j < 1:
        raise ConfigError("j must be positive")
    return cfg


def load_config(path) -> RunConfig:
    p = Path(path)
    return parse_config(p.read_text(), p.parent)
