"""Common utility functions: logging setup, text parsing and JSON encoding."""

import sys
import logging
import re
from fractions import Fraction
from typing import Any, List, Sequence

from polymonodromy.core.errors import InputError

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def setup_logging(log_file_path: str) -> None:
    """
    Sets up logging to both a file and the console (stderr).

    Standard output is left alone because the scripts print JSON there.

    Args:
        log_file_path: The full path to the log file.
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(logging.INFO)

    # Clear any existing handlers so repeated calls do not duplicate output.
    if root_logger.hasHandlers():
        root_logger.handlers.clear()

    formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )

    try:
        file_handler = logging.FileHandler(log_file_path, mode="a", encoding="utf-8")
        file_handler.setLevel(logging.INFO)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)
    except Exception as e:
        logging.basicConfig()
        logging.error(f"Failed to set up file handler at {log_file_path}: {e}")

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setLevel(logging.INFO)
    stream_handler.setFormatter(formatter)
    root_logger.addHandler(stream_handler)

    logging.info("Logging configured successfully.")


def parse_rational(token: str, position: int = 0) -> Fraction:
    """Parse a single "p/q" or integer token."""
    token = token.strip()
    if not _RATIONAL_RE.match(token):
        raise InputError(
            f"Malformed coefficient {token!r} at position {position}",
            detail=f"position={position}",
        )
    num, _, den = token.partition("/")
    if den and int(den) == 0:
        raise InputError(f"Zero denominator at position {position}")
    return Fraction(int(num), int(den) if den else 1)


def parse_rational_list(text: str) -> List[Fraction]:
    """
    Parse comma-separated rationals, lowest degree first.

    Args:
        text: e.g. "0,-3,0,4" or "1/2,0,3".

    Returns:
        The coefficients as Fractions.

    Raises:
        InputError: naming the character position of the first bad token.
    """
    if text is None or not text.strip():
        raise InputError("Empty coefficient list")
    coeffs = []
    offset = 0
    for token in text.split(","):
        coeffs.append(parse_rational(token, offset))
        offset += len(token) + 1
    return coeffs


def parse_complex(text: str) -> complex:
    """Parse "re,im" into a complex number."""
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"Expected 're,im' but got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise InputError(f"Malformed complex number {text!r}: {e}")


def parse_index_pair(text: str) -> List[int]:
    """Parse a 1-based "i,j" pair and return it 0-based."""
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"Expected 'i,j' but got {text!r}")
    try:
        i, j = int(parts[0]), int(parts[1])
    except ValueError:
        raise InputError(f"Malformed index pair {text!r}")
    if i < 1 or j < 1:
        raise InputError(f"Indices are 1-based, got {text!r}")
    return [i - 1, j - 1]


def fraction_str(value: Fraction) -> str:
    """Render a Fraction the way the polynomial text format expects it."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def complex_pair(value: complex, digits: int = 12) -> List[float]:
    """Round a complex number to a [re, im] pair with stable JSON output."""
    re_part = round(float(value.real), digits) + 0.0
    im_part = round(float(value.imag), digits) + 0.0
    return [re_part, im_part]


def to_jsonable(value: Any) -> Any:
    """Recursively convert Fractions, complex numbers and tuples for json.dumps."""
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return round(value, 12) + 0.0
    if isinstance(value, complex):
        return complex_pair(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "item"):
        # numpy scalars
        return to_jsonable(value.item())
    return str(value)


def one_based(indices: Sequence[int]) -> List[int]:
    """Shift library indices to the 1-based form used in reports."""
    return [i + 1 for i in indices]
