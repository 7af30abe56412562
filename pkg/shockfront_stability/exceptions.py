"""Custom exception classes that could be raised."""

from collections.abc import Sequence

__all__: Sequence[str] = (
    "BaseError",
    "ImproperlyConfiguredError",
    "UnknownConfigKeyError",
    "MissingInputError",
    "NumericalError",
    "SingularFlowError",
    "NoSignChangeError",
    "ConvergenceError",
    "BlowupError",
    "ChartFailureError",
    "BorderProximityError",
    "UnexpectedSignatureError",
    "WindingNumberError",
    "DegenerateJumpError",
    "InstabilityDetectedError",
    "RootPolePairError",
    "StageFailedError"
)

import abc
from collections.abc import Iterable
from pathlib import Path


class BaseError(BaseException, abc.ABC):
    """Base exception parent class."""

    DEFAULT_MESSAGE: str

    def __init__(self, message: str | None = None) -> None:
        """Initialize a new exception with the given error message."""
        self.message: str = message or self.DEFAULT_MESSAGE

        super().__init__(self.message)

    def __repr__(self) -> str:
        """Generate a developer-focused representation of the exception's attributes."""
        formatted: str = self.message

        if set(self.__dict__.keys()) - {"message"}:
            formatted += f" ({
                ", ".join(
                    sorted(
                        f"{key}={value!r}"
                        for key, value
                        in self.__dict__.items()
                        if key != "message"
                    )
                )
            })"

        return formatted


class ImproperlyConfiguredError(BaseError, Exception):
    """Exception class to raise when settings or config files are not correctly provided."""

    DEFAULT_MESSAGE: str = "Settings have not been correctly provided."


class UnknownConfigKeyError(ImproperlyConfiguredError):
    """Exception class for when a config file contains a key that is not recognised."""

    DEFAULT_MESSAGE: str = "The config file contains an unknown key."

    def __init__(self, message: str | None = None, key: str | None = None, known_keys: Iterable[str] = ()) -> None:  # noqa: E501
        """Create a new UnknownConfigKeyError naming the offending `key`."""
        self.key: str | None = key
        self.known_keys: tuple[str, ...] = tuple(known_keys)

        super().__init__(
            message
            if not self.key or message is not None
            else (
                f"Unknown config key {self.key!r}"
                f"{f" (expected one of: {", ".join(self.known_keys)})" if self.known_keys else ""}"  # noqa: E501
            )
        )


class MissingInputError(ImproperlyConfiguredError):
    """Exception class for when an upstream artifact required by a stage does not exist."""

    DEFAULT_MESSAGE: str = "A required input artifact is missing."

    def __init__(self, message: str | None = None, path: Path | None = None) -> None:
        """Create a new MissingInputError for the given file `path`."""
        self.path: Path | None = path

        super().__init__(
            message
            if self.path is None or message is not None
            else f"Required input file {str(self.path)!r} does not exist or is not readable"
        )


class NumericalError(BaseError, RuntimeError):
    """Parent class for failures of a numerical computation."""

    DEFAULT_MESSAGE: str = "A numerical computation failed."


class SingularFlowError(NumericalError):
    """Exception class for when the reduced flow is evaluated too close to a fold line."""

    DEFAULT_MESSAGE: str = "The reduced flow is singular at a fold line (D(U) = 0)."

    def __init__(self, message: str | None = None, u: float | None = None, diffusivity: float | None = None) -> None:  # noqa: E501
        """Create a new SingularFlowError at the given state `u`."""
        self.u: float | None = u
        self.diffusivity: float | None = diffusivity

        super().__init__(
            message
            if self.u is None or message is not None
            else f"{self.DEFAULT_MESSAGE.strip(".")}: U={self.u:.12g}, D(U)={self.diffusivity!r}"  # noqa: E501
        )


class NoSignChangeError(NumericalError):
    """Exception class for when a root bracket does not contain a sign change."""

    DEFAULT_MESSAGE: str = "The given bracket does not contain a sign change."

    def __init__(self, message: str | None = None, bracket: tuple[float, float] | None = None, values: tuple[float, float] | None = None) -> None:  # noqa: E501
        """Create a new NoSignChangeError for the given `bracket`."""
        self.bracket: tuple[float, float] | None = bracket
        self.values: tuple[float, float] | None = values

        super().__init__(
            message
            if self.bracket is None or message is not None
            else (
                f"{self.DEFAULT_MESSAGE.strip(".")}: {self.bracket!r} "
                f"(residuals {self.values!r})"
            )
        )


class ConvergenceError(NumericalError):
    """Exception class for when an iterative solver does not converge."""

    DEFAULT_MESSAGE: str = "An iterative solver did not converge."

    def __init__(self, message: str | None = None, solver: str | None = None, reason: str | None = None) -> None:  # noqa: E501
        """Create a new ConvergenceError for the named `solver`."""
        self.solver: str | None = solver
        self.reason: str | None = reason

        super().__init__(
            message
            if self.solver is None or message is not None
            else f"{self.solver} did not converge{f": {self.reason}" if self.reason else ""}"
        )


class BlowupError(NumericalError):
    """Exception class for when an integrated quantity leaves every finite bound."""

    DEFAULT_MESSAGE: str = "The integrated quantity blew up."

    def __init__(self, message: str | None = None, location: float | None = None, quantity: str | None = None) -> None:  # noqa: E501
        """Create a new BlowupError at the given `location` (time, ζ or step index)."""
        self.location: float | None = location
        self.quantity: str | None = quantity

        super().__init__(
            message
            if self.location is None or message is not None
            else f"{self.quantity or "Solution"} blew up at {self.location:.12g}"
        )


class ChartFailureError(NumericalError):
    """Exception class for when a subspace leaves the chart chosen to represent it."""

    DEFAULT_MESSAGE: str = "The frame is not representable on the chosen chart."

    def __init__(self, message: str | None = None, condition_number: float | None = None) -> None:  # noqa: E501
        """Create a new ChartFailureError with the condition number of the top block."""
        self.condition_number: float | None = condition_number

        super().__init__(
            message
            if self.condition_number is None or message is not None
            else (
                f"{self.DEFAULT_MESSAGE.strip(".")} "
                f"(condition number of top block: {self.condition_number:.3e})"
            )
        )


class BorderProximityError(NumericalError):
    """Exception class for when λ lies (numerically) on a Fredholm border."""

    DEFAULT_MESSAGE: str = "λ lies on a Fredholm border; the signature is undetermined."

    def __init__(self, message: str | None = None, lam: complex | None = None) -> None:
        """Create a new BorderProximityError for the given `lam`."""
        self.lam: complex | None = lam

        super().__init__(
            message
            if self.lam is None or message is not None
            else f"λ={self.lam!r} lies on a Fredholm border; the signature is undetermined."
        )


class UnexpectedSignatureError(NumericalError):
    """Exception class for an end-state signature pair that matches no known region."""

    DEFAULT_MESSAGE: str = "The end-state signatures do not match any known region."

    def __init__(self, message: str | None = None, sig_minus: str | None = None, sig_plus: str | None = None) -> None:  # noqa: E501
        """Create a new UnexpectedSignatureError reporting the raw signatures."""
        self.sig_minus: str | None = sig_minus
        self.sig_plus: str | None = sig_plus

        super().__init__(
            message
            if self.sig_minus is None or message is not None
            else (
                f"{self.DEFAULT_MESSAGE.strip(".")}: "
                f"sig_minus={self.sig_minus}, sig_plus={self.sig_plus}"
            )
        )


class WindingNumberError(NumericalError):
    """Exception class for when a winding number cannot be determined reliably."""

    DEFAULT_MESSAGE: str = "The winding number could not be determined reliably."


class DegenerateJumpError(NumericalError):
    """Exception class for a jump map whose denominators vanish."""

    DEFAULT_MESSAGE: str = "The jump map is degenerate (vanishing slow velocity at a jump point)."  # noqa: E501


class InstabilityDetectedError(NumericalError):
    """Exception class for when a perturbed wave moves away from the family of translates."""

    DEFAULT_MESSAGE: str = "The perturbation grew; the wave appears nonlinearly unstable."

    def __init__(self, message: str | None = None, time: float | None = None, growth: float | None = None) -> None:  # noqa: E501
        """Create a new InstabilityDetectedError at simulation time `time`."""
        self.time: float | None = time
        self.growth: float | None = growth

        super().__init__(
            message
            if self.time is None or message is not None
            else (
                f"{self.DEFAULT_MESSAGE.strip(".")}: residual grew by a factor of "
                f"{self.growth:.3g} by t={self.time:.6g}"
            )
        )


class RootPolePairError(NumericalError):
    """Exception class for a root and a pole too close together to be separated."""

    DEFAULT_MESSAGE: str = "A root and a pole could not be separated by subdivision."

    def __init__(self, message: str | None = None, root: complex | None = None, pole: complex | None = None) -> None:  # noqa: E501
        """Create a new RootPolePairError reporting the unresolved pair."""
        self.root: complex | None = root
        self.pole: complex | None = pole

        super().__init__(
            message
            if self.root is None or message is not None
            else (
                f"{self.DEFAULT_MESSAGE.strip(".")}: "
                f"root near {self.root!r}, pole near {self.pole!r}"
            )
        )


class StageFailedError(NumericalError):
    """Exception class wrapping a numerical failure with the pipeline stage it came from."""

    DEFAULT_MESSAGE: str = "A pipeline stage failed."

    def __init__(self, message: str | None = None, stage: str | None = None, reason: BaseError | None = None) -> None:  # noqa: E501
        """Create a new StageFailedError for the named `stage`."""
        self.stage: str | None = stage
        self.reason: BaseError | None = reason

        super().__init__(
            message
            if self.stage is None or message is not None
            else (
                f"Stage {self.stage!r} failed"
                f"{f": {self.reason.message}" if self.reason is not None else ""}"
            )
        )
