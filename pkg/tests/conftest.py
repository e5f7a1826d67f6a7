import sys
from pathlib import Path

import pytest

from rewrite_rl.codemodel import parse

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).resolve().parents[1] / "src" / "rewrite_rl" / "data"

# reference snippets for the feature goldens, wrapped into functions
SHIFTED_LEFT = """
const int N = 64;
void f(int v[65])
{
    int i;
    for(i=1;i<N;i+=2) {
       v[i] = v[i-1];
       v[i+1] = v[i-1]*i;
    }
}
"""

SHIFTED_RIGHT = """
const int N = 64;
void f(int v[65])
{
    int i;
    int aux;
    for(i=0;i<N-1;i++) {
       aux = i*i;
       v[i+1] = aux;
    }
}
"""

NON_STATIC = """
const int N = 8;
void f(int v[64])
{
    int i;
    int j;
    for(j=0;j<N;j++) {
       for(i=0;i<size(v);i++)
          update(v[i]);
       clean(v);
    }
}
"""

LOOP_SCHEDULE = """
const int N = 8;
const int M = 8;
void f(int v[64], int w[8])
{
    int i;
    int j;
#pragma stml loop_schedule
    for(j=0;j<M;j++) {
       w[j] = 0;
       for(i=0;i<N;i++)
          w[j] += v[j*N+i];
    }
}
"""

AUX_INDEX = """
const int N = 8;
void f(int v[8], int w[8], int i)
{
    int j;
    int aux;
    aux = 0;
    for(j=0;j<N;j++) {
       w[i] = v[aux];
       aux++;
    }
}
"""

SNIPPETS = {
    "shifted_left": SHIFTED_LEFT,
    "shifted_right": SHIFTED_RIGHT,
    "non_static": NON_STATIC,
    "loop_schedule": LOOP_SCHEDULE,
    "aux_index": AUX_INDEX,
}


def corpus_sources():
    """Every C source shipped with the package plus the inline snippets."""
    out = {p.stem: p.read_text() for p in sorted((DATA / "snippets").glob("*.c"))}
    out["convolution"] = (DATA / "convolution.c").read_text()
    out.update(SNIPPETS)
    return out


@pytest.fixture
def conv_source():
    return (DATA / "convolution.c").read_text()


@pytest.fixture
def conv_unit(conv_source):
    return parse(conv_source)


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
