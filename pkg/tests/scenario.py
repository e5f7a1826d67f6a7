"""The convolution scenario shared by several test modules."""

from conftest import DATA

from rewrite_rl.abstraction import extract
from rewrite_rl.classify import LabeledSample, fit, make_class
from rewrite_rl.codemodel import parse
from rewrite_rl.rlengine import graph_from_sequence
from rewrite_rl.rules import apply_rule, find_sites

SEQUENCE = [0, 0, 0, 1]


def conv_unit():
    return parse((DATA / "convolution.c").read_text())


def conv_states():
    """Feature vectors C0..C4 along the flatten, flatten, flatten, collapse path."""
    unit = conv_unit()
    out = [extract(unit)]
    for rid in SEQUENCE:
        unit = apply_rule(unit, rid, find_sites(unit, rid)[0]).unit
        out.append(extract(unit))
    return out


def conv_graph(reward=100.0):
    return graph_from_sequence(conv_unit(), SEQUENCE, reward)


def fpga_tree():
    """C0..C3 ready only for shared-memory CPUs, C4 ready for FPGA."""
    states = conv_states()
    samples = [LabeledSample(tuple(x), make_class(["SM_CPU"])) for x in states[:4]]
    samples.append(LabeledSample(tuple(states[4]), make_class(["FPGA"])))
    return fit(samples)
