"""Line-oriented instance file format.

Layout (UTF-8, LF newlines, ``#`` starts a comment line, blank lines are
ignored)::

    EEDHFSSP 1
    F <int>
    M <int>
    N <int>
    SP <decimal>
    ELEC <decimal>
    CE_OFFON <decimal>
    T_OFFON <decimal>
    AUX <m decimals>
    P
    <n rows of m integers>
    PP
    <n rows of m decimals>

Decimals are written as their shortest round-tripping representation, so
write(read(file)) reproduces a generated file byte for byte.  The instance
id is the file stem; it is not stored in the file.
"""

from __future__ import annotations

from pathlib import Path

from ..model import Instance

FORMAT_MAGIC = "EEDHFSSP"
FORMAT_VERSION = 1


class ParseError(ValueError):
    """Malformed instance file; message carries the offending line number."""

    def __init__(self, path: str | Path, line: int, message: str):
        super().__init__(f"{path}: line {line}: {message}")
        self.path = str(path)
        self.line = line


class _Lines:
    """Iterator over meaningful lines that remembers file positions."""

    def __init__(self, path: str | Path, text: str):
        self.path = path
        self.items: list[tuple[int, str]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            self.items.append((number, stripped))
        self.pos = 0
        self.last_line = 0

    def next(self, expectation: str) -> tuple[int, str]:
        if self.pos >= len(self.items):
            raise ParseError(self.path, self.last_line + 1, f"expected {expectation}, found end of file")
        number, content = self.items[self.pos]
        self.pos += 1
        self.last_line = number
        return number, content

    def exhausted(self) -> bool:
        return self.pos >= len(self.items)


def _keyed_value(lines: _Lines, key: str) -> tuple[int, list[str]]:
    number, content = lines.next(f"'{key} <value>'")
    parts = content.split()
    if parts[0] != key:
        raise ParseError(lines.path, number, f"expected key {key}, got {parts[0]}")
    if len(parts) < 2:
        raise ParseError(lines.path, number, f"missing value for {key}")
    return number, parts[1:]


def _parse_int(path, line: int, token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(path, line, f"{what}: not an integer: {token!r}") from None


def _parse_decimal(path, line: int, token: str, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(path, line, f"{what}: not a number: {token!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise ParseError(path, line, f"{what}: not a finite number: {token!r}")
    return value


def read_instance(path: str | Path) -> Instance:
    """Parse an instance file; raises :class:`ParseError` with diagnostics."""
    path = Path(path)
    lines = _Lines(path, path.read_text(encoding="utf-8"))

    number, content = lines.next(f"'{FORMAT_MAGIC} {FORMAT_VERSION}'")
    parts = content.split()
    if parts[0] != FORMAT_MAGIC:
        raise ParseError(path, number, f"bad format magic {parts[0]!r}")
    if len(parts) != 2 or _parse_int(path, number, parts[1], "format version") != FORMAT_VERSION:
        raise ParseError(path, number, f"unsupported format version in {content!r}")

    scalars: dict[str, float | int] = {}
    for key, kind in (("F", int), ("M", int), ("N", int), ("SP", float),
                      ("ELEC", float), ("CE_OFFON", float), ("T_OFFON", float)):
        number, tokens = _keyed_value(lines, key)
        if len(tokens) != 1:
            raise ParseError(path, number, f"{key}: expected a single value, got {len(tokens)}")
        if kind is int:
            value = _parse_int(path, number, tokens[0], key)
            if value < 1:
                raise ParseError(path, number, f"{key} must be >= 1, got {value}")
        else:
            value = _parse_decimal(path, number, tokens[0], key)
            if value < 0:
                raise ParseError(path, number, f"{key} must be non-negative, got {value}")
        scalars[key] = value
    f, m, n = int(scalars["F"]), int(scalars["M"]), int(scalars["N"])

    number, tokens = _keyed_value(lines, "AUX")
    if len(tokens) != m:
        raise ParseError(path, number, f"AUX: expected m={m} values, got {len(tokens)}")
    aux = []
    for token in tokens:
        value = _parse_decimal(path, number, token, "AUX")
        if value < 0:
            raise ParseError(path, number, f"AUX values must be non-negative, got {value}")
        aux.append(value)

    def matrix(header: str, parse, low_check) -> list[list]:
        number, content = lines.next(f"'{header}' header")
        if content != header:
            raise ParseError(path, number, f"expected {header} header, got {content!r}")
        rows = []
        for r in range(n):
            number, content = lines.next(f"{header} row {r + 1}")
            tokens = content.split()
            if len(tokens) != m:
                raise ParseError(
                    path, number, f"{header} row {r + 1}: expected m={m} values, got {len(tokens)}"
                )
            row = []
            for token in tokens:
                value = parse(path, number, token, f"{header} row {r + 1}")
                low_check(number, value)
                row.append(value)
            rows.append(row)
        return rows

    def p_check(number: int, value: int) -> None:
        if value < 1:
            raise ParseError(path, number, f"processing times must be >= 1, got {value}")

    def pp_check(number: int, value: float) -> None:
        if value < 0:
            raise ParseError(path, number, f"PP values must be non-negative, got {value}")

    proc_time = matrix("P", _parse_int, p_check)
    proc_power = matrix("PP", _parse_decimal, pp_check)
    if not lines.exhausted():
        number, content = lines.items[lines.pos]
        raise ParseError(path, number, f"unexpected content after PP matrix: {content!r}")

    return Instance(
        id=path.stem,
        num_factories=f,
        num_machines=m,
        num_jobs=n,
        proc_time=tuple(tuple(row) for row in proc_time),
        proc_power=tuple(tuple(row) for row in proc_power),
        idle_power=float(scalars["SP"]),
        elec_coeff=float(scalars["ELEC"]),
        aux_coeff=tuple(aux),
        offon_emission=float(scalars["CE_OFFON"]),
        offon_time=float(scalars["T_OFFON"]),
    )


def _decimal(value: float) -> str:
    return repr(float(value))


def write_instance(instance: Instance, path: str | Path) -> None:
    """Write the canonical byte representation of an instance."""
    lines = [
        f"{FORMAT_MAGIC} {FORMAT_VERSION}",
        f"F {instance.num_factories}",
        f"M {instance.num_machines}",
        f"N {instance.num_jobs}",
        f"SP {_decimal(instance.idle_power)}",
        f"ELEC {_decimal(instance.elec_coeff)}",
        f"CE_OFFON {_decimal(instance.offon_emission)}",
        f"T_OFFON {_decimal(instance.offon_time)}",
        "AUX " + " ".join(_decimal(v) for v in instance.aux_coeff),
        "P",
    ]
    lines.extend(" ".join(str(v) for v in row) for row in instance.proc_time)
    lines.append("PP")
    lines.extend(" ".join(_decimal(v) for v in row) for row in instance.proc_power)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
