import shutil
from pathlib import Path

import pytest

from chcfuzz.chc import parse_script

CORPUS = Path(__file__).resolve().parent.parent / "src" / "chcfuzz" / "corpus"
STUB = Path(__file__).resolve().parent / "stub_solver.py"

requires_z3 = pytest.mark.skipif(shutil.which("z3") is None, reason="z3 binary not on PATH")


def corpus_files():
    return sorted(CORPUS.glob("*.smt2"))


def expected(path: Path) -> str:
    return path.read_text().splitlines()[0].split()[-1]


@pytest.fixture(scope="session")
def corpus():
    return {p.stem: parse_script(p.read_text()) for p in corpus_files()}


def system(text: str):
    return parse_script(text)


FAKE = Path(__file__).resolve().parent / "fake_solver.py"

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def report(n: int, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
