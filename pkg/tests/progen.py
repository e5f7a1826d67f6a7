"""Seeded random C-subset programs for property tests.

Every generator returns ``(source, inputs)`` where ``inputs`` binds every
parameter of the entry function ``kernel``.
"""

import random
from math import prod


def _rand_array(rng, n, lo=-20, hi=20):
    return [rng.randint(lo, hi) for _ in range(n)]


def _expr(rng, atoms, depth=2):
    if depth == 0 or rng.random() < 0.35:
        return rng.choice(atoms)
    op = rng.choice(["+", "-", "*", "+", "-"])
    return f"({_expr(rng, atoms, depth - 1)} {op} {_expr(rng, atoms, depth - 1)})"


def flatten_program(seed):
    """A program whose array ``m`` (2 or 3 dims) satisfies the flattening preconditions."""
    rng = random.Random(seed)
    ndim = rng.choice([2, 2, 3])
    extents = [rng.randint(1, 4) for _ in range(ndim)]
    total = prod(extents)
    where = rng.choice(["param", "local", "global"])
    loop_vars = ["i0", "i1", "i2"][:ndim]
    dims = "".join(f"[{e}]" for e in extents)
    globals_ = ["const int E0 = %d;" % extents[0]]
    params = [f"int out[{total}]", f"int src[{total}]", "int s"]
    if where == "param":
        params.insert(0, f"int m{dims}")
    elif where == "global":
        globals_.append(f"int m{dims};")
    body = [f"int {v};" for v in loop_vars] + ["int t;", "t = s;"]
    if where == "local":
        body.append(f"int m{dims};")

    def nest(inner_lines, vars_=loop_vars):
        lines, indent = [], "    "
        for d, v in enumerate(vars_):
            limit = "E0" if d == 0 and rng.random() < 0.5 else str(extents[d])
            lines.append(indent * (d + 1) + f"for ({v} = 0; {v} < {limit}; {v}++)")
        lines += [indent * (len(vars_) + 1) + ln for ln in inner_lines]
        return lines

    lin = " + ".join(
        f"{v} * {prod(extents[d + 1:])}" if prod(extents[d + 1:]) != 1 else v for d, v in enumerate(loop_vars)
    )
    idx = "".join(f"[{v}]" for v in loop_vars)
    atoms = list(loop_vars) + ["t", "s", f"src[{lin}]", str(rng.randint(-3, 5))]
    lines = body
    lines += nest([f"m{idx} = {_expr(rng, atoms)};"])
    # a second pass reading neighbours with clamped constant indices
    fixed = "".join(f"[{rng.randint(0, e - 1)}]" for e in extents)
    lines.append(f"    t = t + m{fixed};")
    if rng.random() < 0.5:
        lines += nest([f"m{idx} += m{fixed} * {rng.randint(-2, 2)};"])
    lines += nest([f"out[{lin}] = m{idx} + t;"])
    src = "\n".join(globals_) + "\n\nvoid kernel(" + ", ".join(params) + ")\n{\n" + "\n".join(lines) + "\n}\n"
    inputs = {"out": [0] * total, "src": _rand_array(rng, total), "s": rng.randint(-5, 5)}
    if where == "param":
        inputs["m"] = _rand_array(rng, total)
    return src, inputs


def collapse_program(seed):
    """A program whose first loop nest is a collapsible two-level perfect nest."""
    rng = random.Random(seed)
    n, m = rng.randint(1, 5), rng.randint(1, 5)
    size = n * m
    body_kind = rng.choice(["single", "block", "block_if", "inner_loop"])
    atoms = ["i", "j", "acc", f"a[i * {m} + j]", str(rng.randint(-3, 3))]
    lines = [
        "    int i;",
        "    int j;",
        "    int q;",
        "    int acc;",
        "    acc = s;",
        "    for (i = 0; i < N; i++)" if rng.random() < 0.5 else f"    for (i = 0; i < {n}; i++)",
        f"        for (j = 0; j < {m}; j++)",
    ]
    if body_kind == "single":
        lines.append(f"            c[i * {m} + j] = {_expr(rng, atoms)};")
    else:
        lines.append("        {")
        lines.append(f"            acc = acc + {_expr(rng, atoms, 1)};")
        if body_kind == "block_if":
            lines.append(f"            if ({_expr(rng, atoms, 1)} > {rng.randint(-5, 5)})")
            lines.append(f"                c[i * {m} + j] = acc;")
            lines.append("            else")
            lines.append(f"                c[i * {m} + j] = {_expr(rng, atoms)};")
        elif body_kind == "inner_loop":
            lines.append(f"            for (q = 0; q < {rng.randint(1, 3)}; q++)")
            lines.append(f"                c[i * {m} + j] += q * {_expr(rng, atoms, 1)};")
        else:
            lines.append(f"            c[i * {m} + j] = {_expr(rng, atoms)};")
        lines.append(f"            tot[0] = tot[0] + c[i * {m} + j];")
        lines.append("        }")
    lines.append("    tot[1] = acc;")
    src = (
        f"const int N = {n};\n\nvoid kernel(int a[{size}], int c[{size}], int tot[2], int s)\n{{\n"
        + "\n".join(lines)
        + "\n}\n"
    )
    inputs = {"a": _rand_array(rng, size), "c": _rand_array(rng, size), "tot": [0, 0], "s": rng.randint(-5, 5)}
    return src, inputs


def general_program(seed):
    """Unconstrained program mixing every construct, for abstraction invariants."""
    rng = random.Random(seed)
    counter = [0]
    scalars = ["x", "y", "g"]
    arrays = {"v": 1, "w": 2, "h": 3}

    def fresh_loop_var():
        counter[0] += 1
        return f"l{counter[0]}"

    loop_vars = []

    def index_for(name, live):
        pool = live + ["x", "y", "0", "1"]
        return "".join(f"[{rng.choice(pool)}]" for _ in range(arrays[name]))

    def stmt(depth, live, in_loop):
        kind = rng.choice(["assign", "assign", "for", "if", "call", "jump"] if depth < 3 else ["assign", "call"])
        pad = "    " * (depth + 1)
        if kind == "for":
            v = fresh_loop_var()
            loop_vars.append(v)
            step = rng.choice([f"{v}++", f"{v} += 2", f"{v}++"])
            init = rng.choice(["0", "0", "1"])
            limit = rng.choice(["8", "N", "x", "size(v)"])
            out = []
            prag = rng.random()
            if prag < 0.15:
                out.append(pad + "#pragma stml iteration_independent")
            elif prag < 0.25:
                out.append(pad + "#pragma stml loop_schedule")
            out.append(pad + f"for ({v} = {init}; {v} < {limit}; {step})")
            out.append(pad + "{")
            for _ in range(rng.randint(1, 3)):
                out += stmt(depth + 1, live + [v], True)
            out.append(pad + "}")
            return out
        if kind == "if":
            out = [pad + f"if ({rng.choice(scalars + live)} > {rng.randint(0, 4)})"]
            out += stmt(depth + 1, live, in_loop)
            return out
        if kind == "call":
            return [pad + f"{rng.choice(['update', 'clean', 'log'])}({rng.choice(['v', 'x', 'y + 1'])});"]
        if kind == "jump" and in_loop:
            return [pad + rng.choice(["break;", "continue;"])]
        name = rng.choice(list(arrays) + scalars)
        lhs = name + index_for(name, live) if name in arrays else name
        if name in arrays and live and rng.random() < 0.3:
            lhs = f"v[{live[-1]} + {rng.randint(1, 2)}]"
        rhs = rng.choice(scalars + live + ["1", "v[0]"])
        return [pad + f"{lhs} = {rhs};"]

    body = []
    for _ in range(rng.randint(0, 5)):
        body += stmt(0, [], False)
    decls = [f"    int {v};" for v in loop_vars]
    src = (
        "const int N = 8;\nint g;\nint h[2][2][2];\n\nvoid kernel(int v[16], int w[4][4], int x)\n{\n"
        "    int y;\n" + "\n".join(decls + body) + "\n}\n"
    )
    return src
