"""
Contains settings values, configuration-file parsing and setup functions.

Settings values are imported from the .env file or the current environment variables.
Model parameters are read from a plain-text key-value file; command-specific options are
validated by pydantic models that reject unknown keys.
"""

from collections.abc import Sequence

__all__: Sequence[str] = (
    "TRUE_VALUES",
    "FALSE_VALUES",
    "MODEL_CONFIG_KEYS",
    "Command",
    "OutputFormat",
    "ModelConfig",
    "WaveConfig",
    "EssentialConfig",
    "ContourConfig",
    "LocalizationConfig",
    "ScanConfig",
    "SlowScanConfig",
    "RunConfig",
    "settings",
    "run_setup",
    "reset_settings",
    "IS_ENV_VARIABLES_SETUP",
    "identify_tags_from_path",
    "load_model_config",
    "parse_model_config"
)

import enum
import logging
import os
import re
from collections.abc import Mapping
from logging import Logger
from pathlib import Path
from typing import Any, ClassVar, Final, Self, final

import dotenv
import pathvalidate
from identify import identify
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from shockfront_stability.exceptions import (
    ImproperlyConfiguredError,
    MissingInputError,
    UnknownConfigKeyError,
)
from shockfront_stability.model import DEFAULT_F_COEFFS, DEFAULT_R_COEFFS, ModelParams
from shockfront_stability.pde_sim import SimConfig
from shockfront_stability.reduced_spectra import DEFAULT_SLOW_SECTION
from shockfront_stability.utils import SuppressTraceback

TRUE_VALUES: Final[frozenset[str]] = frozenset({"true", "1", "t", "y", "yes", "on"})
FALSE_VALUES: Final[frozenset[str]] = frozenset({"false", "0", "f", "n", "no", "off"})
LOG_LEVEL_CHOICES: Final[Sequence[str]] = (
    "DEBUG",
    "INFO",
    "WARNING",
    "ERROR",
    "CRITICAL",
    "NONE"
)
MODEL_CONFIG_KEYS: Final[frozenset[str]] = frozenset(
    {"eps", "c", "F_coeffs", "R_coeffs", "use_paper_eq2_D"}
)
DEFAULT_OUTPUT_DIRECTORY: Final[str] = "shockfront-output"


def identify_tags_from_path(path: Path) -> set[str]:
    return identify.tags_from_path(str(path))


class Command(enum.StrEnum):
    WAVE = "wave"
    ESSENTIAL = "essential"
    EVANS = "evans"
    WINDING = "winding"
    FAST = "fast"
    SLOW = "slow"
    SIMULATE = "simulate"
    REPRODUCE_ALL = "reproduce-all"


class OutputFormat(enum.StrEnum):
    CSV = "csv"
    JSON = "json"


class _StrictBlock(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ModelConfig(_StrictBlock):
    """Model parameters as read from a configuration file."""

    eps: float = Field(default=1e-4, ge=0.0)
    c: float = 0.19686
    F_coeffs: tuple[float, float, float, float] = DEFAULT_F_COEFFS
    R_coeffs: tuple[float, float, float, float] = DEFAULT_R_COEFFS
    use_paper_eq2_D: bool = False

    def to_params(self) -> ModelParams:
        return ModelParams(
            eps=self.eps,
            c=self.c,
            F_coeffs=self.F_coeffs,
            R_coeffs=self.R_coeffs,
            use_paper_eq2_D=self.use_paper_eq2_D
        )


class WaveConfig(_StrictBlock):
    eps: float = Field(default=1e-4, gt=0.0, le=1e-2)
    L: float = Field(default=50.0, gt=0.0)
    N: int = Field(default=2000, ge=10)
    c_guess: float | None = None


class EssentialConfig(_StrictBlock):
    k_range: tuple[float, float] = (-20.0, 20.0)
    n: int = Field(default=2001, ge=2)
    probes: tuple[float, ...] = (1.0, -0.5, -2.5)


class ContourConfig(_StrictBlock):
    radius: float = Field(default=1e5, gt=1.0)
    detour_radius: float = Field(default=1.0, gt=0.0)
    n_initial: int = Field(default=64, ge=8)
    max_samples: int = Field(default=20_000, ge=64)

    @model_validator(mode="after")
    def _check_detour_inside(self) -> Self:
        if self.detour_radius >= self.radius:
            DETOUR_TOO_LARGE_MESSAGE: Final[str] = (
                "The detour radius must be smaller than the contour radius"
            )
            raise ValueError(DETOUR_TOO_LARGE_MESSAGE)
        return self


class LocalizationConfig(_StrictBlock):
    box: tuple[float, float, float, float] = (-2.0, 0.1, -0.5, 0.5)
    diameter_tolerance: float = Field(default=1e-3, gt=0.0)
    margin: float = Field(default=0.05, ge=0.0)
    max_samples: int = Field(default=20_000, ge=64)

    @model_validator(mode="after")
    def _check_box(self) -> Self:
        if not (self.box[0] < self.box[1] and self.box[2] < self.box[3]):
            EMPTY_BOX_MESSAGE: Final[str] = (
                f"box must be (re_min, re_max, im_min, im_max) with min < max "
                f"(got {self.box!r})"
            )
            raise ValueError(EMPTY_BOX_MESSAGE)
        return self


class ScanConfig(_StrictBlock):
    interval: tuple[float, float]
    n: int = Field(default=200, ge=2)

    @model_validator(mode="after")
    def _check_interval(self) -> Self:
        if self.interval[0] >= self.interval[1]:
            EMPTY_INTERVAL_MESSAGE: Final[str] = (
                f"interval must be increasing (got {self.interval!r})"
            )
            raise ValueError(EMPTY_INTERVAL_MESSAGE)
        return self


class SlowScanConfig(ScanConfig):
    section_U: float = Field(default=DEFAULT_SLOW_SECTION, gt=0.0, lt=1.0)


type CommandBlock = (
    WaveConfig
    | EssentialConfig
    | ContourConfig
    | LocalizationConfig
    | ScanConfig
    | SlowScanConfig
    | SimConfig
)


class RunConfig(_StrictBlock):
    """Fully resolved configuration of one command; echoed into the run manifest."""

    command: Command
    model: ModelConfig = ModelConfig()
    blocks: dict[str, CommandBlock] = {}
    output_dir: Path = Path(DEFAULT_OUTPUT_DIRECTORY)
    format: OutputFormat = OutputFormat.JSON


def _parse_bool(key: str, raw_value: str) -> bool:
    if raw_value.lower() in TRUE_VALUES:
        return True
    if raw_value.lower() in FALSE_VALUES:
        return False

    INVALID_BOOL_MESSAGE: Final[str] = f"{key} must be a boolean value (got {raw_value!r})"
    raise ImproperlyConfiguredError(INVALID_BOOL_MESSAGE)


def _parse_numbers(key: str, raw_value: str) -> tuple[float, ...]:
    try:
        return tuple(float(number) for number in raw_value.split(","))
    except ValueError:
        INVALID_NUMBER_MESSAGE: Final[str] = (
            f"{key} must be a number or a comma-separated list of numbers (got {raw_value!r})"
        )
        raise ImproperlyConfiguredError(INVALID_NUMBER_MESSAGE) from None


def parse_model_config(raw_values: Mapping[str, str | None]) -> ModelConfig:
    """Build a ModelConfig from raw key-value pairs, rejecting any unknown key."""
    parsed: dict[str, object] = {}

    key: str
    raw_value: str | None
    for key, raw_value in raw_values.items():
        if key not in MODEL_CONFIG_KEYS:
            raise UnknownConfigKeyError(key=key, known_keys=MODEL_CONFIG_KEYS)

        if raw_value is None or not raw_value.strip():
            EMPTY_VALUE_MESSAGE: Final[str] = f"{key} was given without a value"
            raise ImproperlyConfiguredError(EMPTY_VALUE_MESSAGE)

        if key == "use_paper_eq2_D":
            parsed[key] = _parse_bool(key, raw_value.strip())
            continue

        numbers: tuple[float, ...] = _parse_numbers(key, raw_value.strip())
        if key in {"eps", "c"}:
            if len(numbers) != 1:
                NOT_SCALAR_MESSAGE: Final[str] = f"{key} must be a single number"
                raise ImproperlyConfiguredError(NOT_SCALAR_MESSAGE)
            parsed[key] = numbers[0]
        else:
            parsed[key] = numbers

    e: ValidationError
    try:
        return ModelConfig.model_validate(parsed)
    except ValidationError as e:
        INVALID_MODEL_CONFIG_MESSAGE: Final[str] = f"Invalid model configuration: {e}"
        raise ImproperlyConfiguredError(INVALID_MODEL_CONFIG_MESSAGE) from None


def load_model_config(path: Path) -> ModelConfig:
    """Read the key-value model file at `path` (dotenv syntax, `key=value` per line)."""
    if not path.is_file():
        raise MissingInputError(path=path)

    if "text" not in identify_tags_from_path(path):
        NOT_TEXT_MESSAGE: Final[str] = f"Model configuration file {path} is not a text file"
        raise ImproperlyConfiguredError(NOT_TEXT_MESSAGE)

    model_config: ModelConfig = parse_model_config(dotenv.dotenv_values(path))
    model_config.to_params()
    logging.debug(f"Read model configuration from {path}: {model_config!r}")
    return model_config


@final
class Settings:
    """
    Settings class that provides access to all settings values.

    Settings values can be accessed via key (like a dictionary) or via class attribute.
    """

    _instance: ClassVar[Self | None] = None

    @classmethod
    def get_invalid_settings_key_message(cls, item: str) -> str:
        return f"{item!r} is not a valid settings key."

    # noinspection PyTypeHints
    def __new__(cls, *args: object, **kwargs: object) -> Self:
        """
        Return the singleton settings container instance.

        If no singleton instance exists, a new one is created, then stored as a class variable.
        """
        if not cls._instance:
            cls._instance = super().__new__(cls, *args, **kwargs)

        return cls._instance

    def __init__(self) -> None:
        """Instantiate a new settings container with False is_setup flags."""
        self._is_env_variables_setup: bool = False
        self._settings: dict[str, object] = {}

    def __getattr__(self, item: str) -> Any:
        """Retrieve settings value by attribute lookup."""
        if not self._is_env_variables_setup:
            self._setup_env_variables(threads=None, output_directory_path=None)

        if item in self._settings:
            return self._settings[item]

        if re.match(r"\A[A-Z](?:[A-Z_]*[A-Z])?\Z", item):
            INVALID_SETTINGS_KEY_MESSAGE: Final[str] = self.get_invalid_settings_key_message(
                item
            )
            raise AttributeError(INVALID_SETTINGS_KEY_MESSAGE)

        MISSING_ATTRIBUTE_MESSAGE: Final[str] = (
            f"{type(self).__name__!r} object has no attribute {item!r}"
        )
        raise AttributeError(MISSING_ATTRIBUTE_MESSAGE)

    def __getitem__(self, item: str) -> Any:
        """Retrieve settings value by key lookup."""
        e: AttributeError
        try:
            return getattr(self, item)
        except AttributeError as e:
            key_error_message: str = item

            if self.get_invalid_settings_key_message(item) in str(e):
                key_error_message = str(e)

            raise KeyError(key_error_message) from None

    def as_dict(self) -> dict[str, object]:
        """Return the resolved settings, with paths as strings, for the run manifest."""
        return {
            key: str(value) if isinstance(value, Path) else value
            for key, value
            in self._settings.items()
        }

    def _setup_logging(self, *, verbosity: int | None, force_env_variables: bool = False) -> None:  # noqa: E501
        log_level: str = (
            os.getenv("LOG_LEVEL", "" if force_env_variables else "WARNING").upper()  # noqa: E501, PLW1508
            if verbosity is None or force_env_variables
            else (
                "NONE"
                if verbosity < 0
                else (
                    "ERROR"
                    if verbosity == 0
                    else (
                        "WARNING"
                        if verbosity == 1
                        else (
                            "INFO"
                            if verbosity == 2  # noqa: PLR2004
                            else "DEBUG"
                        )
                    )
                )
            )
        )

        if log_level not in LOG_LEVEL_CHOICES:
            INVALID_LOG_LEVEL_MESSAGE: Final[str] = (
                f"LOG_LEVEL must be one of {",".join(
                    f"{log_level_choice!r}" for log_level_choice in LOG_LEVEL_CHOICES[:-1]
                )} or {LOG_LEVEL_CHOICES[-1]!r}."
            )
            raise ImproperlyConfiguredError(INVALID_LOG_LEVEL_MESSAGE)

        if log_level == "NONE":  # noqa: PLR2004
            logger: Logger = logging.getLogger()
            logger.propagate = False
            logger.setLevel(logging.CRITICAL + 1)
        else:
            # noinspection SpellCheckingInspection
            logging.basicConfig(
                level=getattr(logging, log_level),
                format="%(levelname)s: %(message)s"
            )
            logging.getLogger().setLevel(getattr(logging, log_level))

        self._settings["VERBOSITY"] = verbosity
        self._settings["LOG_LEVEL"] = log_level

    def _setup_threads(self, *, threads: int | None, force_env_variables: bool = False) -> None:  # noqa: E501
        if threads is None or force_env_variables:
            raw_threads: str = os.getenv("SHOCKFRONT_THREADS", "1")

            try:
                threads = int(raw_threads)
            except ValueError:
                threads = 0

        if threads < 1:
            INVALID_THREADS_MESSAGE: Final[str] = (
                "SHOCKFRONT_THREADS must be a whole number of worker processes (at least 1)"
            )
            raise ImproperlyConfiguredError(INVALID_THREADS_MESSAGE)

        self._settings["THREADS"] = threads

    def _setup_output_directory_path(self, *, output_directory_path: Path | None, force_env_variables: bool = False) -> None:  # noqa: E501
        if output_directory_path is None or force_env_variables:
            output_directory_path = Path(
                os.getenv("SHOCKFRONT_OUTPUT_DIR", "") or DEFAULT_OUTPUT_DIRECTORY
            )

        OUTPUT_DIRECTORY_PATH_IS_VALID: Final[bool] = bool(
            pathvalidate.is_valid_filepath(output_directory_path, platform="auto")
            and not output_directory_path.is_file()
        )
        if not OUTPUT_DIRECTORY_PATH_IS_VALID:
            INVALID_OUTPUT_DIRECTORY_PATH_MESSAGE: Final[str] = (
                "SHOCKFRONT_OUTPUT_DIR must be a valid path to a directory "
                "(it is created if it does not exist yet)"
            )
            raise ImproperlyConfiguredError(INVALID_OUTPUT_DIRECTORY_PATH_MESSAGE)

        self._settings["OUTPUT_DIRECTORY_PATH"] = output_directory_path

    def _setup_env_variables(self, *, threads: int | None, output_directory_path: Path | None, force_env_variables: bool = False, verbosity: int | None = 1) -> None:  # noqa: E501
        """
        Load environment values into the settings dictionary.

        Environment values are loaded from the .env file/the current environment variables and
        are only stored after the input values have been validated.
        """
        if self._is_env_variables_setup:
            logging.warning("Environment variables have already been set up.")
            return

        dotenv.load_dotenv()

        self._setup_logging(verbosity=verbosity, force_env_variables=force_env_variables)
        logging.debug("Successfully setup logging & Env variable: VERBOSITY")

        self._setup_threads(threads=threads, force_env_variables=force_env_variables)
        logging.debug("Successfully setup Env variable: SHOCKFRONT_THREADS")

        self._setup_output_directory_path(
            output_directory_path=output_directory_path,
            force_env_variables=force_env_variables
        )
        logging.debug("Successfully setup Env variable: SHOCKFRONT_OUTPUT_DIR")

        self._is_env_variables_setup = True

    def _reset(self) -> None:
        self._settings.clear()
        self._is_env_variables_setup = False


settings: Final[Settings] = Settings()


def run_setup(*, threads: int | None, output_directory_path: Path | None, force_env_variables: bool, verbosity: int) -> None:  # noqa: E501
    """Execute the setup functions required, before other modules can be run."""
    with SuppressTraceback(verbosity):
        # noinspection PyProtectedMember
        settings._setup_env_variables(  # noqa: SLF001
            threads=threads,
            output_directory_path=output_directory_path,
            force_env_variables=force_env_variables,
            verbosity=verbosity
        )


def reset_settings() -> None:
    """Forget every resolved setting, so that the next run resolves them afresh."""
    # noinspection PyProtectedMember
    settings._reset()  # noqa: SLF001


IS_ENV_VARIABLES_SETUP: bool


def __getattr__(item: str) -> object:
    if item == "IS_ENV_VARIABLES_SETUP":  # noqa: PLR2004
        # noinspection PyProtectedMember
        return settings._is_env_variables_setup  # noqa: SLF001

    MODULE_ATTRIBUTE_ERROR_MESSAGE: Final[str] = (
        f"module {__name__!r} has no attribute {item!r}"
    )
    raise AttributeError(MODULE_ATTRIBUTE_ERROR_MESSAGE)
