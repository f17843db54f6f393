import pytest

from code_loader import CodeFileError, decode_code_bytes, format_code_file, load_code, parse_code_file, save_code
from codes import Code


def test_parse_with_comments_and_blank_lines():
    code = parse_code_file("# the even-weight code\n3 2 4\n0 0 0\n\n0 1 1\n1 0 1\n1 1 0\n")
    assert code == Code.from_strings(["000", "011", "101", "110"])


def test_symbols_may_be_separated_by_any_whitespace():
    code = parse_code_file("2 12 2\n0  11\n10\t3\n")
    assert code.words == ((0, 11), (10, 3))


@pytest.mark.parametrize("text, line, column, message", [
    ("2 2 2\n0 0\n0 2\n", 3, 3, "outside 0..1"),
    ("2 2 2\n0 0\n0 1", 3, 4, "trailing newline"),
    ("2 2 3\n0 0\n0 1\n", 3, 1, "found 2"),
    ("2 2 2\n0 0\n0 0\n", 3, 1, "line 2"),
    ("2 2 2\n0 0\n0\n", 3, 1, "expected 2 symbols"),
    ("2  2 2\n0 0\n", 1, 1, "header"),
    ("2 2 1\n0 0\n1 1\n", 3, 1, "more than m=1"),
    ("2 1 1\n0 0\n", 1, 3, "q=1"),
    ("2 2 1\n0 x\n", 2, 3, "not a base-10 integer"),
    ("# only a comment\n", 1, 1, "missing header"),
    ("2 2 1\n0 é\n", 2, 3, "invalid character"),
])
def test_parse_errors(text, line, column, message):
    with pytest.raises(CodeFileError, match=message) as excinfo:
        parse_code_file(text)
    assert (excinfo.value.line, excinfo.value.column) == (line, column)


def test_error_message_names_the_location():
    with pytest.raises(CodeFileError) as excinfo:
        parse_code_file("2 2 2\n0 0\n0 2\n")
    assert str(excinfo.value).startswith("line 3, column 3:")


def test_format_code_file():
    code = Code.from_strings(["00", "01"])
    assert format_code_file(code, comments=["found by hand"]) == "# found by hand\n2 2 2\n0 0\n0 1\n"


def test_save_and_load(tmp_path):
    code = Code(n=3, q=5, words=((4, 0, 1), (0, 0, 0), (2, 3, 4)))
    path = tmp_path / "code.txt"
    save_code(code, path, comments=["seed 1"])
    assert path.read_bytes().startswith(b"# seed 1\n3 5 3\n")
    assert load_code(path) == code


def test_non_ascii_bytes_are_located():
    with pytest.raises(CodeFileError, match="non-ASCII byte 0xe9") as excinfo:
        decode_code_bytes(b"2 2 2\n0 0\n0 \xe9\n")
    assert (excinfo.value.line, excinfo.value.column) == (3, 3)
    with pytest.raises(CodeFileError) as excinfo:
        decode_code_bytes(b"\xff2 2 1\n0 0\n")
    assert (excinfo.value.line, excinfo.value.column) == (1, 1)


def test_load_code_reports_non_ascii_location(tmp_path):
    path = tmp_path / "latin1.txt"
    path.write_bytes(b"# caf\xe9\n2 2 1\n0 0\n")
    with pytest.raises(CodeFileError) as excinfo:
        load_code(path)
    assert str(excinfo.value) == "line 1, column 6: non-ASCII byte 0xe9"
