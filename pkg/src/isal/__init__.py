"""IsalProgram: a total, regular, address-free assembly language and its VM."""

from .cdll import Cdll, Datum, EmptyInput, Tag, TypeMismatch
from .isa import (
    ALPHABET_SIZE,
    SIGMA,
    FormatError,
    Token,
    decode_bytes,
    decode_text,
    encode_bytes,
    encode_text,
    program,
    program_count,
)
from .literals import LiteralError, format_datum, parse_datum, parse_literals
from .vm import HALT, RunOutcome, Status, TraceRecord, VmState, init, run, step, trace, truthy

__version__ = "0.1.0"
