"""Reading and writing codes in the plain-text code file format.

    # optional comment lines
    n q m
    s s ... s      (m lines of n symbols in 0..q-1)

ASCII only, '\\n' line endings, a single space between the header fields and
a trailing newline after the last line. Blank lines are ignored.
"""
import logging
import re
from pathlib import Path
from typing import List, Optional, Sequence, Union

from codes import Code

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"(\d+) (\d+) (\d+)")
_TOKEN = re.compile(r"\S+")


class CodeFileError(ValueError):
    """Malformed code file; line and column are 1-based"""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


def parse_code_file(text: str) -> Code:
    """Parse code file text into a Code"""
    if not text.endswith("\n"):
        lines = text.split("\n")
        raise CodeFileError(len(lines), len(lines[-1]) + 1, "missing trailing newline")
    header: Optional[tuple] = None
    words: List[tuple] = []
    seen = {}
    for number, line in enumerate(text.split("\n")[:-1], start=1):
        for column, ch in enumerate(line, start=1):
            if not (ch == " " or ch == "\t" or 32 < ord(ch) < 127):
                raise CodeFileError(number, column, f"invalid character {ch!r}")
        if line.startswith("#") or line.strip() == "":
            continue
        if header is None:
            match = _HEADER.fullmatch(line)
            if match is None:
                raise CodeFileError(number, 1, "header must be 'n q m': three integers separated by single spaces")
            n, q, m = (int(value) for value in match.groups())
            if not 1 <= n <= 64:
                raise CodeFileError(number, match.start(1) + 1, f"n={n} outside 1..64")
            if not 2 <= q <= 256:
                raise CodeFileError(number, match.start(2) + 1, f"q={q} outside 2..256")
            if m < 1:
                raise CodeFileError(number, match.start(3) + 1, "m must be at least 1")
            header = (n, q, m)
            continue
        n, q, m = header
        if len(words) == m:
            raise CodeFileError(number, 1, f"more than m={m} words")
        tokens = list(_TOKEN.finditer(line))
        if len(tokens) != n:
            raise CodeFileError(number, 1, f"expected {n} symbols, found {len(tokens)}")
        word = []
        for token in tokens:
            raw = token.group()
            if not raw.isdigit():
                raise CodeFileError(number, token.start() + 1, f"symbol {raw!r} is not a base-10 integer")
            symbol = int(raw)
            if symbol >= q:
                raise CodeFileError(number, token.start() + 1, f"symbol {symbol} outside 0..{q - 1}")
            word.append(symbol)
        word = tuple(word)
        if word in seen:
            raise CodeFileError(number, 1, f"word repeats the word on line {seen[word]}")
        seen[word] = number
        words.append(word)
    if header is None:
        raise CodeFileError(1, 1, "missing header line")
    n, q, m = header
    if len(words) != m:
        raise CodeFileError(len(text.split("\n")) - 1, 1, f"header announces m={m} words, found {len(words)}")
    return Code(n=n, q=q, words=tuple(words))


def format_code_file(code: Code, comments: Sequence[str] = ()) -> str:
    """Render a code in the file format; comments become leading '#' lines"""
    lines = [f"# {comment}" for comment in comments]
    lines.append(f"{code.n} {code.q} {code.m}")
    lines.extend(" ".join(str(symbol) for symbol in word) for word in code.words)
    return "\n".join(lines) + "\n"


def decode_code_bytes(data: bytes) -> str:
    """ASCII-decode a code file, locating the first non-ASCII byte"""
    try:
        return data.decode("ascii")
    except UnicodeDecodeError as e:
        before = data[:e.start]
        line = before.count(b"\n") + 1
        column = e.start - (before.rfind(b"\n") + 1) + 1
        raise CodeFileError(line, column, f"non-ASCII byte 0x{data[e.start]:02x}")


def load_code(path: Union[str, Path]) -> Code:
    """Read and parse a code file"""
    code = parse_code_file(decode_code_bytes(Path(path).read_bytes()))
    logger.debug(f"Loaded ({code.n},{code.m},{code.q}) code from {path}")
    return code


def save_code(code: Code, path: Union[str, Path], comments: Sequence[str] = ()) -> None:
    Path(path).write_text(format_code_file(code, comments), encoding="ascii", newline="\n")
    logger.info(f"Wrote ({code.n},{code.m},{code.q}) code to {path}")
