"""Run configuration: INI parsing, defaults, environment presets.

Config files are flat INI sections ([system], [los], [trajectory],
[thresholds], [mc], [search], [output]); every key has a default, so an
empty file is a valid run at the reference parameter set. Decibel values
are accepted only here and converted to linear SI at the boundary.

LoS environment presets: the urban triple (0.3, 500, 15) is the reference
value used throughout; suburban, dense-urban and high-rise ship the
standard built-up parameters from the elevation-angle propagation
literature and can be overridden per run via [los] keys.
"""

import configparser
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .analysis import DecodingThresholds, threshold_from_rate
from .channel import (
    BuiltUpEnvironment,
    FixedLos,
    IturLos,
    LosModel,
    SystemParams,
    ThreeGppUrbanLos,
)
from .montecarlo import McConfig
from .planner import HeightSearchConfig
from .trajectory import (
    ChordWalkConfig,
    SpiralConfig,
    TrajectoryPoint,
    read_trajectory_csv,
    spiral_points,
    chord_walk_points,
)
from .units import attenuation_db_to_gain, db_to_linear, dbm_to_watts, linear_to_db

__all__ = [
    "ConfigError",
    "RunConfig",
    "ENVIRONMENT_PRESETS",
    "default_system_params",
    "load_config",
]


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


ENVIRONMENT_PRESETS: Dict[str, BuiltUpEnvironment] = {
    "suburban": BuiltUpEnvironment(0.1, 750.0, 8.0),
    "urban": BuiltUpEnvironment(0.3, 500.0, 15.0),
    "dense-urban": BuiltUpEnvironment(0.5, 300.0, 20.0),
    "high-rise": BuiltUpEnvironment(0.5, 300.0, 50.0),
}

_SECTIONS = ("system", "los", "trajectory", "thresholds", "mc", "search", "output")

_SYSTEM_DEFAULTS = {
    "cell_radius_m": "500",
    "bs_height_m": "30",
    "noise_dbm": "-100",
    "aue_tx_power_w": "0.1",
    "aue_gain": "1",
    "tue_gain": "1",
    "tue_cutoff_dbm": "-75",
    "pl_exp_terrestrial": "3.5",
    "pl_exp_los": "2.2",
    "pl_exp_nlos": "3.5",
    "atten_los_db": "0",
    "atten_nlos_db": "13",
    "m_los": "5",
    "m_nlos": "1",
    "bandwidth_hz": "10e6",
}


def default_system_params() -> SystemParams:
    """Reference parameter set (the values behind all defaults)."""
    return SystemParams(
        cell_radius=500.0,
        bs_height=30.0,
        noise_power=dbm_to_watts(-100.0),
        aue_tx_power=0.1,
        aue_gain=1.0,
        tue_gain=1.0,
        tue_cutoff=dbm_to_watts(-75.0),
        pl_exp_terrestrial=3.5,
        pl_exp_los=2.2,
        pl_exp_nlos=3.5,
        atten_los=1.0,
        atten_nlos=attenuation_db_to_gain(13.0),
        m_los=5,
        m_nlos=1,
        bandwidth=10e6,
    )


@dataclass
class RunConfig:
    system: SystemParams
    los: LosModel
    environment_names: List[str]          # preset names for multi-env sweeps
    trajectory_model: str                 # "spiral" | "chord-walk" | "csv"
    spiral: Optional[SpiralConfig]
    chord_walk: Optional[ChordWalkConfig]
    csv_path: Optional[Path]
    thresholds: List[DecodingThresholds]
    theta_labels: List[tuple]             # (theta_a_db, theta_t_db) per threshold
    mc: McConfig
    search: HeightSearchConfig
    output_dir: Path
    figures: bool = True
    table_heights: tuple = (25.0, 120.0)  # altitude grid for the LoS table

    def trajectory_points(self) -> List[TrajectoryPoint]:
        if self.trajectory_model == "spiral":
            return spiral_points(self.spiral)
        if self.trajectory_model == "chord-walk":
            return chord_walk_points(self.chord_walk)
        try:
            with open(self.csv_path, "r", encoding="utf-8") as fh:
                return read_trajectory_csv(fh, cell_radius=self.system.cell_radius)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"trajectory csv: {exc}") from exc

    def los_for_environment(self, name: str) -> LosModel:
        if not isinstance(self.los, IturLos) or name == "custom":
            return self.los
        if name not in ENVIRONMENT_PRESETS:
            raise ConfigError(f"unknown environment preset '{name}'")
        return IturLos(ENVIRONMENT_PRESETS[name])


def _parser_with_defaults() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    for section in _SECTIONS:
        parser.add_section(section)
    for key, value in _SYSTEM_DEFAULTS.items():
        parser.set("system", key, value)
    parser["los"].update({
        "model": "itu",
        "environment": "urban",
        "fixed_p": "1.0",
        "table_heights_m": "25,120",
    })
    parser["trajectory"].update({
        "model": "spiral",
        "rounds": "3",
        "speed_mps": "15",
        "period_s": "30",
        "height_m": "25",
        "seed": "1",
        "n_points": "10",
        "csv_path": "",
    })
    parser["thresholds"].update({
        "theta_a_db": "0,10,20,30,40",
        "theta_t_db": "0",
        "rate_a_mbps": "",
        "rate_t_mbps": "",
    })
    parser["mc"].update({
        "trials": "1000000",
        "seed": "1",
        "stream_count": "1",
    })
    parser["search"].update({
        "h_min_m": "25",
        "h_max_m": "300",
        "h_step_m": "1",
        "qos": "0.9",
    })
    parser["output"].update({
        "dir": "out",
        "figures": "true",
    })
    return parser


def _get_float(parser, section, key) -> float:
    raw = parser.get(section, key)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got '{raw}'") from None


def _get_int(parser, section, key) -> int:
    raw = parser.get(section, key)
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected an integer, got '{raw}'") from None


def _get_bool(parser, section, key) -> bool:
    raw = parser.get(section, key).strip().lower()
    if raw in ("true", "yes", "1", "on"):
        return True
    if raw in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"[{section}] {key}: expected a boolean, got '{raw}'")


def _float_list(parser, section, key) -> List[float]:
    raw = parser.get(section, key).strip()
    if not raw:
        return []
    try:
        return [float(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected comma-separated numbers") from None


def _system_params(parser) -> SystemParams:
    try:
        return SystemParams(
            cell_radius=_get_float(parser, "system", "cell_radius_m"),
            bs_height=_get_float(parser, "system", "bs_height_m"),
            noise_power=dbm_to_watts(_get_float(parser, "system", "noise_dbm")),
            aue_tx_power=_get_float(parser, "system", "aue_tx_power_w"),
            aue_gain=_get_float(parser, "system", "aue_gain"),
            tue_gain=_get_float(parser, "system", "tue_gain"),
            tue_cutoff=dbm_to_watts(_get_float(parser, "system", "tue_cutoff_dbm")),
            pl_exp_terrestrial=_get_float(parser, "system", "pl_exp_terrestrial"),
            pl_exp_los=_get_float(parser, "system", "pl_exp_los"),
            pl_exp_nlos=_get_float(parser, "system", "pl_exp_nlos"),
            atten_los=attenuation_db_to_gain(_get_float(parser, "system", "atten_los_db")),
            atten_nlos=attenuation_db_to_gain(_get_float(parser, "system", "atten_nlos_db")),
            m_los=_get_int(parser, "system", "m_los"),
            m_nlos=_get_int(parser, "system", "m_nlos"),
            bandwidth=_get_float(parser, "system", "bandwidth_hz"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[system]: {exc}") from exc


def _los_model(parser) -> tuple:
    model = parser.get("los", "model").strip().lower()
    env_names = [v.strip() for v in parser.get("los", "environment").split(",") if v.strip()]
    if model == "itu":
        if not env_names:
            raise ConfigError("[los] environment: at least one preset required")
        if parser.has_option("los", "built_ratio"):
            env = BuiltUpEnvironment(
                _get_float(parser, "los", "built_ratio"),
                _get_float(parser, "los", "buildings_per_km2"),
                _get_float(parser, "los", "height_scale_m"),
            )
            return IturLos(env), ["custom"]
        first = env_names[0]
        if first not in ENVIRONMENT_PRESETS:
            raise ConfigError(f"[los] environment: unknown preset '{first}'")
        for name in env_names:
            if name not in ENVIRONMENT_PRESETS:
                raise ConfigError(f"[los] environment: unknown preset '{name}'")
        return IturLos(ENVIRONMENT_PRESETS[first]), env_names
    if model == "3gpp":
        return ThreeGppUrbanLos(), ["3gpp-urban"]
    if model == "fixed":
        p = _get_float(parser, "los", "fixed_p")
        try:
            return FixedLos(p), ["fixed"]
        except ValueError as exc:
            raise ConfigError(f"[los] fixed_p: {exc}") from exc
    raise ConfigError(f"[los] model: expected itu | 3gpp | fixed, got '{model}'")


def _thresholds(parser, bandwidth: float) -> tuple:
    rate_a = _float_list(parser, "thresholds", "rate_a_mbps")
    rate_t = _float_list(parser, "thresholds", "rate_t_mbps")
    if rate_a or rate_t:
        if not (rate_a and rate_t):
            raise ConfigError("[thresholds]: rate_a_mbps and rate_t_mbps must both be set")
        theta_a = [threshold_from_rate(r * 1e6, bandwidth) for r in rate_a]
        theta_t = [threshold_from_rate(r * 1e6, bandwidth) for r in rate_t]
    else:
        theta_a_db = _float_list(parser, "thresholds", "theta_a_db")
        theta_t_db = _float_list(parser, "thresholds", "theta_t_db")
        if not theta_a_db or not theta_t_db:
            raise ConfigError("[thresholds]: threshold lists must be non-empty")
        theta_a = [db_to_linear(v) for v in theta_a_db]
        theta_t = [db_to_linear(v) for v in theta_t_db]

    thresholds = []
    labels = []
    for ta in theta_a:
        for tt in theta_t:
            try:
                thresholds.append(DecodingThresholds(ta, tt))
            except ValueError as exc:
                raise ConfigError(f"[thresholds]: {exc}") from exc
            labels.append((linear_to_db(ta), linear_to_db(tt)))
    return thresholds, labels


def load_config(path: Optional[Path] = None,
                overrides: Sequence[str] = ()) -> RunConfig:
    """Build a RunConfig from an optional INI file plus key overrides.

    ``overrides`` entries have the form ``section.key=value`` and are
    applied after the file, matching the CLI --set flag.
    """
    parser = _parser_with_defaults()
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"config parse error: {exc}") from exc
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"--set expects section.key=value, got '{item}'")
        target, value = item.split("=", 1)
        section, key = target.split(".", 1)
        if section not in _SECTIONS:
            raise ConfigError(f"--set: unknown section '{section}'")
        parser.set(section.strip(), key.strip(), value.strip())

    system = _system_params(parser)
    los, env_names = _los_model(parser)

    model = parser.get("trajectory", "model").strip().lower()
    spiral = chord = None
    csv_path = None
    if model == "spiral":
        try:
            spiral = SpiralConfig(
                rounds=_get_int(parser, "trajectory", "rounds"),
                speed=_get_float(parser, "trajectory", "speed_mps"),
                period=_get_float(parser, "trajectory", "period_s"),
                cell_radius=system.cell_radius,
                height=_get_float(parser, "trajectory", "height_m"),
            )
        except ValueError as exc:
            raise ConfigError(f"[trajectory]: {exc}") from exc
    elif model == "chord-walk":
        try:
            chord = ChordWalkConfig(
                seed=_get_int(parser, "trajectory", "seed"),
                n_points=_get_int(parser, "trajectory", "n_points"),
                speed=_get_float(parser, "trajectory", "speed_mps"),
                period=_get_float(parser, "trajectory", "period_s"),
                cell_radius=system.cell_radius,
                height=_get_float(parser, "trajectory", "height_m"),
            )
        except ValueError as exc:
            raise ConfigError(f"[trajectory]: {exc}") from exc
    elif model == "csv":
        raw = parser.get("trajectory", "csv_path").strip()
        if not raw:
            raise ConfigError("[trajectory] csv_path: required for model = csv")
        csv_path = Path(raw)
    else:
        raise ConfigError(
            f"[trajectory] model: expected spiral | chord-walk | csv, got '{model}'")

    thresholds, labels = _thresholds(parser, system.bandwidth)

    try:
        mc = McConfig(
            trials=_get_int(parser, "mc", "trials"),
            seed=_get_int(parser, "mc", "seed"),
            stream_count=_get_int(parser, "mc", "stream_count"),
        )
        search = HeightSearchConfig(
            h_min=_get_float(parser, "search", "h_min_m"),
            h_max=_get_float(parser, "search", "h_max_m"),
            h_step=_get_float(parser, "search", "h_step_m"),
            qos=_get_float(parser, "search", "qos"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc

    table_heights = _float_list(parser, "los", "table_heights_m")
    if not table_heights:
        raise ConfigError("[los] table_heights_m: must be non-empty")

    return RunConfig(
        system=system,
        los=los,
        environment_names=env_names,
        trajectory_model=model,
        spiral=spiral,
        chord_walk=chord,
        csv_path=csv_path,
        thresholds=thresholds,
        theta_labels=labels,
        mc=mc,
        search=search,
        output_dir=Path(parser.get("output", "dir")),
        figures=_get_bool(parser, "output", "figures"),
        table_heights=tuple(table_heights),
    )
