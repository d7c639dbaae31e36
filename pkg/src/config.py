"""Run configuration, search budgets and environment overrides.

Every search in this package is guaranteed to terminate by the theory but not
to terminate quickly, so each one runs against an explicit cap taken from a
`Budgets` record. Budgets come from defaults, then environment variables, then
the run config file, in that order. `RunConfig` bundles everything a sweep
needs and is loaded from JSON with field-by-field validation.
"""

import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from src.exceptions import ConfigValidationError

ENV_PREFIX = "FOLNER_BRUDNO_"
SAMPLER_KINDS = ("constant", "periodic", "uniform-random", "greedy-admissible")
DICTIONARY_MODES = ("occurring", "full-language")
OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Budgets:
    """Caps for every search performed by the package.

    Attributes:
        enumeration_nodes (int): Maximum number of nodes visited by a
            pattern-language backtracking search.
        search_cap (int): Largest tile index tried by invariance-index and
            normalisation searches.
        center_search_cap (int): Number of enumerated centers tried by the
            enumeration-based center decision.
        coset_cap (int): Number of kernel elements scanned when choosing the
            first member of a coset.
        exhaustive_words (int): Largest language size for which a sweep takes
            an exact maximum instead of sampling.
        max_tile_cells (int): Tiles larger than this are refused by the
            decompressor and by window checks.
        canonical_index_bits (int): Members at or above this bit position make
            a canonical index overflow.
    """

    enumeration_nodes: int = 2_000_000
    search_cap: int = 4096
    center_search_cap: int = 100_000
    coset_cap: int = 64
    exhaustive_words: int = 20_000
    max_tile_cells: int = 2_000_000
    canonical_index_bits: int = 4096

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ConfigValidationError(f"budgets.{f.name}: must be a positive integer, got {value!r}")

    @classmethod
    def from_env(
            cls,
            environ: dict[str, str] | None = None
            ) -> "Budgets":
        """Builds budgets from defaults overridden by environment variables.

        Each field can be set with `FOLNER_BRUDNO_<FIELD>`. The shorthand
        `FOLNER_BRUDNO_BUDGET` sets `enumeration_nodes` and is applied first,
        so an explicit `FOLNER_BRUDNO_ENUMERATION_NODES` wins over it.

        Args:
            environ (dict[str, str] | None, optional): The environment to read.
                Defaults to `os.environ`.

        Returns:
            Budgets: The resulting budgets.

        Raises:
            ConfigValidationError: If a variable is not a positive integer.
        """

        if environ is None:
            environ = dict(os.environ)

        overrides: dict[str, int] = {}
        shorthand = environ.get(f"{ENV_PREFIX}BUDGET")
        if shorthand is not None:
            overrides["enumeration_nodes"] = _parse_positive(f"{ENV_PREFIX}BUDGET", shorthand)

        for f in fields(cls):
            name = f"{ENV_PREFIX}{f.name.upper()}"
            if name in environ:
                overrides[f.name] = _parse_positive(name, environ[name])

        return cls(**overrides)

    def merged(
            self,
            values: dict[str, Any]
            ) -> "Budgets":
        """Returns a copy with the given fields replaced.

        Args:
            values (dict[str, Any]): Field names mapped to new values.

        Returns:
            Budgets: The updated budgets.

        Raises:
            ConfigValidationError: On unknown field names or invalid values.
        """

        known = {f.name for f in fields(self)}
        for key in values:
            if key not in known:
                raise ConfigValidationError(f"budgets.{key}: unknown budget")
        return replace(self, **values)


def _parse_positive(
        name: str,
        raw: str
        ) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise ConfigValidationError(f"{name}: expected an integer, got {raw!r}") from None
    if value <= 0:
        raise ConfigValidationError(f"{name}: must be positive, got {value}")
    return value


@dataclass(frozen=True)
class SamplerConfig:
    """How configurations are drawn when a language is too large to list.

    Attributes:
        kind (str): One of "constant", "periodic", "uniform-random",
            "greedy-admissible".
        seed (int): Base seed; sample j uses seed + j.
        samples (int): Number of configurations drawn per row.
        period (int): Period used by the "periodic" kind.
        letter (int): Letter used by the "constant" kind.
    """

    kind: str = "uniform-random"
    seed: int = 0
    samples: int = 8
    period: int = 2
    letter: int = 1


@dataclass(frozen=True)
class RunConfig:
    """Everything a complexity or Brudno sweep needs.

    Attributes:
        n_list (tuple[int, ...]): Tile indices of the sweep rows, in output order.
        k_sweep (tuple[int, ...]): Candidate dictionary tile indices.
        sampler (SamplerConfig): Sampling settings.
        mode (str): Dictionary mode, "occurring" or "full-language".
        budgets (Budgets): Search caps.
        output (str): "csv" or "json".
        group (str | None): Group name; when None the shift spec decides.
        normalize (bool): Whether the group's tiling is normalised first.
    """

    n_list: tuple[int, ...]
    k_sweep: tuple[int, ...]
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    mode: str = "occurring"
    budgets: Budgets = field(default_factory=Budgets)
    output: str = "csv"
    group: str | None = None
    normalize: bool = False


_RUN_KEYS = {"n_list", "k_sweep", "sampler", "mode", "budgets", "output", "group", "normalize"}
_SAMPLER_KEYS = {"kind", "seed", "samples", "period", "letter"}


def _require_int_list(
        name: str,
        value: Any
        ) -> tuple[int, ...]:
    if not isinstance(value, list) or len(value) == 0:
        raise ConfigValidationError(f"{name}: must be a nonempty list of positive integers")
    for item in value:
        if not isinstance(item, int) or isinstance(item, bool) or item <= 0:
            raise ConfigValidationError(f"{name}: must contain positive integers, got {item!r}")
    return tuple(value)


def parse_run_config(
        raw: dict[str, Any],
        budgets: Budgets | None = None
        ) -> RunConfig:
    """Validates a decoded JSON object and builds a `RunConfig`.

    Args:
        raw (dict[str, Any]): The decoded JSON document.
        budgets (Budgets | None, optional): Base budgets that the document's
            "budgets" section overrides. Defaults to `Budgets.from_env()`.

    Returns:
        RunConfig: The validated configuration.

    Raises:
        ConfigValidationError: On the first invalid or unknown field.
    """

    if not isinstance(raw, dict):
        raise ConfigValidationError("config: top level must be a JSON object")
    for key in raw:
        if key not in _RUN_KEYS:
            raise ConfigValidationError(f"{key}: unknown config field")

    if budgets is None:
        budgets = Budgets.from_env()

    if "n_list" not in raw:
        raise ConfigValidationError("n_list: required")
    if "k_sweep" not in raw:
        raise ConfigValidationError("k_sweep: required")
    n_list = _require_int_list("n_list", raw["n_list"])
    k_sweep = _require_int_list("k_sweep", raw["k_sweep"])

    sampler_raw = raw.get("sampler", {})
    if not isinstance(sampler_raw, dict):
        raise ConfigValidationError("sampler: must be an object")
    for key in sampler_raw:
        if key not in _SAMPLER_KEYS:
            raise ConfigValidationError(f"sampler.{key}: unknown sampler field")
    sampler = SamplerConfig(**sampler_raw)
    if sampler.kind not in SAMPLER_KINDS:
        raise ConfigValidationError(f"sampler.kind: must be one of {', '.join(SAMPLER_KINDS)}")
    for name in ("seed",):
        value = getattr(sampler, name)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ConfigValidationError(f"sampler.{name}: must be a nonnegative integer")
    for name in ("samples", "period", "letter"):
        value = getattr(sampler, name)
        if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
            raise ConfigValidationError(f"sampler.{name}: must be a positive integer")

    mode = raw.get("mode", "occurring")
    if mode not in DICTIONARY_MODES:
        raise ConfigValidationError(f"mode: must be one of {', '.join(DICTIONARY_MODES)}")

    output = raw.get("output", "csv")
    if output not in OUTPUT_FORMATS:
        raise ConfigValidationError(f"output: must be one of {', '.join(OUTPUT_FORMATS)}")

    budgets_raw = raw.get("budgets", {})
    if not isinstance(budgets_raw, dict):
        raise ConfigValidationError("budgets: must be an object")
    budgets = budgets.merged(budgets_raw)

    group = raw.get("group")
    if group is not None and not isinstance(group, str):
        raise ConfigValidationError("group: must be a string")

    normalize = raw.get("normalize", False)
    if not isinstance(normalize, bool):
        raise ConfigValidationError("normalize: must be true or false")

    return RunConfig(
        n_list=n_list,
        k_sweep=k_sweep,
        sampler=sampler,
        mode=mode,
        budgets=budgets,
        output=output,
        group=group,
        normalize=normalize
    )


def load_run_config(
        path: str | Path,
        budgets: Budgets | None = None
        ) -> RunConfig:
    """Reads and validates a run config file.

    Args:
        path (str | Path): Path to a JSON document.
        budgets (Budgets | None, optional): Base budgets. Defaults to the
            environment-derived budgets.

    Returns:
        RunConfig: The validated configuration.

    Raises:
        ConfigValidationError: If the file is unreadable, not JSON, or invalid.
    """

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigValidationError(f"config: cannot read {path}: {e.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"config: {path} is not valid JSON ({e.msg} at line {e.lineno})") from None
    return parse_run_config(raw, budgets=budgets)
